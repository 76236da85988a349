//! Spectral decomposition of the coupling matrix and the exact propagator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::chain::CouplingMatrix;
use crate::error::{invalid, Error, Result};

/// Eigenvalues of `iA` with magnitude below this (relative to `max|A|`) are
/// treated as exact zero modes.
const ZERO_MODE_TOL: f64 = 1e-10;
/// Eigenvalues closer than this (relative) belong to one degenerate shell.
const DEGENERACY_TOL: f64 = 1e-9;

/// Single-particle spectrum and canonical form of a quadratic chain.
///
/// `transform` is a real orthogonal `Q` with `A = Q D Qᵀ`, where `D` is block
/// diagonal with blocks `[[0, ε_k], [-ε_k, 0]]`. Columns `2k` and `2k+1` hold
/// mode `k`; modes are sorted by ascending `ε_k`, and within a degenerate
/// shell by ascending mean site position.
///
/// `ε_k` is the physical excitation energy: the many-body spectrum is
/// `E_GS + Σ_{k ∈ S} ε_k` with `E_GS = -½ Σ ε_k`. The eigenvalues of the
/// coupling matrix `C` itself are `±ξ_k = ±ε_k / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    energies: Vec<f64>,
    transform: DMatrix<f64>,
}

impl ModeBasis {
    pub fn n_modes(&self) -> usize {
        self.energies.len()
    }

    /// Excitation energies `ε_k`, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Positive eigenvalues `ξ_k` of `C`, ascending.
    pub fn coupling_eigenvalues(&self) -> Vec<f64> {
        self.energies.iter().map(|e| 0.5 * e).collect()
    }

    pub fn transform(&self) -> &DMatrix<f64> {
        &self.transform
    }

    pub fn ground_state_energy(&self) -> f64 {
        -0.5 * self.energies.iter().sum::<f64>()
    }

    /// Complex eigenvector `v` of `C` with eigenvalue `+ξ_k`; its conjugate
    /// carries `-ξ_k`.
    pub fn eigenvector(&self, k: usize) -> DVector<Complex64> {
        let q1 = self.transform.column(2 * k);
        let q2 = self.transform.column(2 * k + 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DVector::from_iterator(
            q1.len(),
            q1.iter().zip(q2.iter()).map(|(&a, &b)| Complex64::new(s * b, s * a)),
        )
    }

    /// `Q D Qᵀ`, which reproduces the generator.
    pub fn reconstruct_generator(&self) -> DMatrix<f64> {
        let dim = self.transform.nrows();
        let mut d = DMatrix::<f64>::zeros(dim, dim);
        for (k, &e) in self.energies.iter().enumerate() {
            d[(2 * k, 2 * k + 1)] = e;
            d[(2 * k + 1, 2 * k)] = -e;
        }
        &self.transform * d * self.transform.transpose()
    }

    /// `Q R(t)`: each mode block of `Q` rotated by `ε_k t`.
    fn rotated_transform(&self, t: f64) -> DMatrix<f64> {
        let mut qr = self.transform.clone();
        for (k, &e) in self.energies.iter().enumerate() {
            let (s, c) = (e * t).sin_cos();
            let q1 = self.transform.column(2 * k).clone_owned();
            let q2 = self.transform.column(2 * k + 1).clone_owned();
            qr.set_column(2 * k, &(&q1 * c - &q2 * s));
            qr.set_column(2 * k + 1, &(&q1 * s + &q2 * c));
        }
        qr
    }

    /// Exact propagator `T(t) = exp(A t)` from the spectral sum.
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        if !t.is_finite() {
            return Err(invalid(format!("propagation time must be finite, got {t}")));
        }
        let matrix = self.rotated_transform(t) * self.transform.transpose();
        Ok(Propagator { time: t, matrix })
    }

    /// Selected rows of `T(t)` (0-based Majorana indices).
    pub fn propagator_rows(&self, t: f64, rows: &[usize]) -> Result<DMatrix<f64>> {
        if !t.is_finite() {
            return Err(invalid(format!("propagation time must be finite, got {t}")));
        }
        let dim = self.transform.nrows();
        if let Some(&r) = rows.iter().find(|&&r| r >= dim) {
            return Err(invalid(format!("row {r} outside propagator of dimension {dim}")));
        }
        let qr = self.rotated_transform(t).select_rows(rows);
        Ok(qr * self.transform.transpose())
    }
}

/// Single-particle energies of a basis, ascending.
pub fn single_particle_energies(basis: &ModeBasis) -> Vec<f64> {
    basis.energies.clone()
}

/// Real orthogonal Heisenberg propagator `a(t) = T(t) a(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    time: f64,
    matrix: DMatrix<f64>,
}

impl Propagator {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Mean site position of a Majorana-space vector; used to order modes inside
/// degenerate shells.
fn position_operator_diag(dim: usize) -> Vec<f64> {
    (0..dim).map(|j| (j / 2) as f64).collect()
}

/// Rotates the columns of `v` (an orthonormal basis of one eigenspace) onto
/// eigenvectors of the site-position operator restricted to that space.
fn localize(v: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let pos = position_operator_diag(v.nrows());
    let xv = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * pos[i]);
    let mut p = v.adjoint() * xv;
    // symmetrize against round-off
    p = (&p + p.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(p);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let u = eig.eigenvectors.select_columns(&order);
    v * u
}

fn localize_real(v: &DMatrix<f64>) -> DMatrix<f64> {
    let pos = position_operator_diag(v.nrows());
    let xv = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * pos[i]);
    let mut p = v.transpose() * xv;
    p = (&p + p.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(p);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    v * eig.eigenvectors.select_columns(&order)
}

/// Multiplies by a phase so the largest component is real and positive.
fn fix_phase(v: &mut DVector<Complex64>) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        // the small slack keeps the pick stable against round-off ties
        if z.norm() > best_norm * (1.0 + 1e-9) {
            best = i;
            best_norm = z.norm();
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

fn orthonormalize_columns(q: &mut DMatrix<f64>) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for j in 0..q.ncols() {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                let mut qj = q.column_mut(j);
                qj.axpy(-proj, &qi, 1.0);
            }
            let norm = q.column(j).norm();
            q.column_mut(j).unscale_mut(norm);
        }
    }
}

/// Diagonalizes `C` through the Hermitian eigenproblem of `iA = 2C` and pairs
/// the `±ε` eigenvectors into the real canonical form.
pub fn diagonalize(coupling: &CouplingMatrix) -> Result<ModeBasis> {
    let a = coupling.generator();
    let dim = a.nrows();
    let n = dim / 2;
    let scale = a.amax().max(1.0);
    let zero_tol = ZERO_MODE_TOL * scale;
    let deg_tol = DEGENERACY_TOL * scale;

    let h = a.map(|x| Complex64::new(0.0, x));
    let eig = SymmetricEigen::new(h);

    let mut positive: Vec<usize> = (0..dim).filter(|&i| eig.eigenvalues[i] > zero_tol).collect();
    positive.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let n_zero_pairs = n.checked_sub(positive.len()).ok_or_else(|| {
        Error::Consistency(format!(
            "{} positive eigenvalues for {} modes; generator is not antisymmetric",
            positive.len(),
            n
        ))
    })?;
    let n_near_zero = (0..dim).filter(|&i| eig.eigenvalues[i].abs() <= zero_tol).count();
    if n_near_zero != 2 * n_zero_pairs {
        return Err(Error::Consistency(format!(
            "unpaired spectrum: {n_near_zero} near-zero eigenvalues, expected {}",
            2 * n_zero_pairs
        )));
    }

    let mut q = DMatrix::<f64>::zeros(dim, dim);
    let mut energies = Vec::with_capacity(n);
    let mut col = 0;

    if n_zero_pairs > 0 {
        // The kernel of A is real: take it from the real symmetric AᵀA.
        let ata = a.transpose() * a;
        let eig_r = SymmetricEigen::new(ata);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&x, &y| eig_r.eigenvalues[x].total_cmp(&eig_r.eigenvalues[y]));
        let kernel = eig_r.eigenvectors.select_columns(&order[..2 * n_zero_pairs]);
        let kernel = localize_real(&kernel);
        for j in 0..kernel.ncols() {
            q.set_column(col, &kernel.column(j));
            col += 1;
        }
        energies.extend(std::iter::repeat_n(0.0, n_zero_pairs));
    }

    let mut start = 0;
    while start < positive.len() {
        let mut end = start + 1;
        while end < positive.len() && eig.eigenvalues[positive[end]] - eig.eigenvalues[positive[end - 1]] <= deg_tol {
            end += 1;
        }
        let shell: Vec<usize> = positive[start..end].to_vec();
        let mut v = eig.eigenvectors.select_columns(&shell);
        if shell.len() > 1 {
            v = localize(&v);
        }
        let sqrt2 = std::f64::consts::SQRT_2;
        for (j, &idx) in shell.iter().enumerate() {
            let mut vec = v.column(j).clone_owned();
            fix_phase(&mut vec);
            let q1 = vec.map(|z| sqrt2 * z.im);
            let q2 = vec.map(|z| sqrt2 * z.re);
            q.set_column(col, &q1);
            q.set_column(col + 1, &q2);
            col += 2;
            // shell members share one energy up to deg_tol; keep each own value
            energies.push(eig.eigenvalues[idx]);
        }
        start = end;
    }

    orthonormalize_columns(&mut q);
    Ok(ModeBasis { energies, transform: q })
}
