//! Brute-force reference in the full `2^N` spin space.
//!
//! Basis states are bit strings with site 1 as the most significant bit and
//! bit value 0 meaning `σᶻ = +1`. Majoranas follow the Jordan-Wigner
//! convention of [`crate::chain`]: `a_{2n-1} = Z…Z X_n`, `a_{2n} = Z…Z Y_n`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::chain::ChainSpec;
use crate::error::{invalid, Error, Result};
use crate::fermion::ModeBasis;
use crate::state::OccupationPattern;

/// Largest chain the dense routines accept.
pub const MAX_DENSE_SITES: usize = 12;
/// Residual above which a constructed quasiparticle state is rejected.
pub const EIGENSTATE_RESIDUAL_TOL: f64 = 1e-6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_capacity(n_sites: usize) -> Result<()> {
    if n_sites > MAX_DENSE_SITES {
        return Err(Error::Capacity(format!(
            "dense oracle limited to {MAX_DENSE_SITES} sites, got {n_sites}"
        )));
    }
    Ok(())
}

#[inline]
fn site_bit(n_sites: usize, site: usize) -> usize {
    1 << (n_sites - site)
}

/// Dense `2^N × 2^N` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || !matrix.nrows().is_power_of_two() {
            return Err(invalid("dense operator must be square with power-of-two dimension"));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entry of `O - O†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).map(|z| z.norm()).max()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// Normalized pure state in the spin basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_sites: usize,
    amplitudes: DVector<Complex64>,
}

impl DenseState {
    pub fn new(n_sites: usize, amplitudes: DVector<Complex64>) -> Result<Self> {
        check_capacity(n_sites)?;
        if amplitudes.len() != 1 << n_sites {
            return Err(invalid("amplitude vector length must be 2^N"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { n_sites, amplitudes })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, op: &DenseOperator) -> Complex64 {
        self.amplitudes.dotc(&(op.matrix() * &self.amplitudes))
    }

    /// Dense-route correlation matrix `Γ_ij = ¼⟨[a_i, a_j]⟩`.
    pub fn correlation(&self) -> DMatrix<Complex64> {
        let dim = 2 * self.n_sites;
        let images: Vec<DVector<Complex64>> = (0..dim)
            .map(|j| apply_majorana(j, self.n_sites, &self.amplitudes))
            .collect();
        DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else {
                images[i].dotc(&images[j]) * 0.5
            }
        })
    }
}

/// Applies Majorana `a_j` (0-based) to a spin-basis vector.
pub fn apply_majorana(j: usize, n_sites: usize, psi: &DVector<Complex64>) -> DVector<Complex64> {
    let site = j / 2 + 1;
    let bit = site_bit(n_sites, site);
    // bits of sites 1..site-1 sit above `bit`
    let string_mask = !((bit << 1) - 1) & ((1 << n_sites) - 1);
    let mut out = DVector::<Complex64>::zeros(psi.len());
    for (s, &amp) in psi.iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let sign = if (s & string_mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let flipped = s ^ bit;
        let phase = if j.is_multiple_of(2) {
            Complex64::new(1.0, 0.0)
        } else if s & bit == 0 {
            I
        } else {
            -I
        };
        out[flipped] += amp * phase * sign;
    }
    out
}

/// `Σ_i c_i a_i ψ`.
fn apply_linear_majorana(coeffs: &[Complex64], n_sites: usize, psi: &DVector<Complex64>) -> DVector<Complex64> {
    let mut out = DVector::<Complex64>::zeros(psi.len());
    for (j, &c) in coeffs.iter().enumerate() {
        if c.norm() > 0.0 {
            out += apply_majorana(j, n_sites, psi) * c;
        }
    }
    out
}

/// `H ψ` for the chain, without forming the matrix.
pub fn apply_hamiltonian(spec: &ChainSpec, psi: &DVector<Complex64>) -> DVector<Complex64> {
    let n = spec.n_sites();
    let mut out = DVector::<Complex64>::zeros(psi.len());
    for (s, &amp) in psi.iter().enumerate() {
        let mut diag = 0.0;
        for site in 1..=n {
            let z = if s & site_bit(n, site) == 0 { 1.0 } else { -1.0 };
            diag -= spec.field(site) * z;
        }
        out[s] += amp * diag;
        for bond in (1..n).filter(|&b| !spec.is_cut(b)) {
            let flipped = s ^ site_bit(n, bond) ^ site_bit(n, bond + 1);
            out[flipped] -= amp;
        }
    }
    out
}

/// `-Σ_n (σˣ_n σˣ_{n+1} + σᶻ_n) + δ σᶻ_α` with cut bonds omitted.
pub fn dense_hamiltonian(spec: &ChainSpec) -> Result<DenseOperator> {
    let n = spec.n_sites();
    check_capacity(n)?;
    let dim = 1 << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for s in 0..dim {
        let mut e = DVector::<Complex64>::zeros(dim);
        e[s] = Complex64::new(1.0, 0.0);
        m.set_column(s, &apply_hamiltonian(spec, &e));
    }
    DenseOperator::new(m)
}

fn mode_coefficients(basis: &ModeBasis, k: usize, creation: bool) -> Vec<Complex64> {
    let q = basis.transform();
    let sign = if creation { -1.0 } else { 1.0 };
    // f_k = (b_{2k} + i b_{2k+1}) / 2 with b_m = Σ_i Q_{im} a_i
    (0..q.nrows())
        .map(|i| Complex64::new(0.5 * q[(i, 2 * k)], 0.5 * sign * q[(i, 2 * k + 1)]))
        .collect()
}

/// Eigenstate of the chain `spec` built by occupying modes of `basis` on top
/// of its quasiparticle vacuum.
///
/// The vacuum is obtained by projecting a fixed generic vector with
/// `Π_k f_k f_k†`. The result must be an eigenstate of the dense `spec`
/// Hamiltonian to within [`EIGENSTATE_RESIDUAL_TOL`].
pub fn dense_quasiparticle_state(
    spec: &ChainSpec,
    basis: &ModeBasis,
    pattern: &OccupationPattern,
) -> Result<DenseState> {
    let n = spec.n_sites();
    check_capacity(n)?;
    if basis.n_modes() != n || pattern.len() != n {
        return Err(invalid("spec, basis and pattern sizes differ"));
    }
    let dim = 1 << n;
    let mut psi = DVector::from_fn(dim, |s, _| {
        let x = s as f64;
        Complex64::new(1.0 + 0.37 * (0.71 * x).cos(), 0.29 * (1.31 * x + 0.4).sin())
    });
    for k in 0..n {
        let fd = mode_coefficients(basis, k, true);
        let f = mode_coefficients(basis, k, false);
        psi = apply_linear_majorana(&f, n, &apply_linear_majorana(&fd, n, &psi));
        let norm = psi.norm();
        if norm < 1e-8 {
            return Err(Error::Consistency(
                "vacuum projection annihilated the seed vector".into(),
            ));
        }
        psi.unscale_mut(norm);
    }
    for k in (0..n).filter(|&k| pattern.is_occupied(k)) {
        psi = apply_linear_majorana(&mode_coefficients(basis, k, true), n, &psi);
        let norm = psi.norm();
        if norm < 1e-8 {
            return Err(Error::Consistency(format!("mode {k} could not be occupied")));
        }
        psi.unscale_mut(norm);
    }
    let h_psi = apply_hamiltonian(spec, &psi);
    let energy = psi.dotc(&h_psi).re;
    let residual = (h_psi - &psi * Complex64::new(energy, 0.0)).norm();
    if residual > EIGENSTATE_RESIDUAL_TOL {
        return Err(Error::Consistency(format!(
            "quasiparticle state is not an eigenstate (residual {residual:e})"
        )));
    }
    DenseState::new(n, psi)
}

/// Cached spectral decomposition for repeated exact evolution.
#[derive(Debug, Clone)]
pub struct DenseEvolver {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl DenseEvolver {
    pub fn new(h: &DenseOperator) -> Self {
        let herm = (h.matrix() + h.matrix().adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(herm);
        Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `e^{-iHt}|ψ⟩`.
    pub fn evolve(&self, state: &DenseState, t: f64) -> Result<DenseState> {
        if !t.is_finite() {
            return Err(invalid("evolution time must be finite"));
        }
        if state.amplitudes.len() != self.energies.len() {
            return Err(invalid("state and Hamiltonian dimensions differ"));
        }
        let mut coeffs = self.vectors.adjoint() * &state.amplitudes;
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let mut out = &self.vectors * coeffs;
        // absorb round-off drift of the norm
        let norm = out.norm();
        out.unscale_mut(norm);
        DenseState::new(state.n_sites, out)
    }
}

/// One-shot `e^{-iHt}|ψ⟩`.
pub fn dense_evolve(state: &DenseState, h: &DenseOperator, t: f64) -> Result<DenseState> {
    DenseEvolver::new(h).evolve(state, t)
}

/// Partial trace onto `subsystem` (1-based sites; first listed site is the
/// most significant bit of the reduced basis).
pub fn dense_reduced_density(state: &DenseState, subsystem: &[usize]) -> Result<DenseOperator> {
    let n = state.n_sites;
    check_capacity(n)?;
    let kept = crate::state::majorana_indices(subsystem, n)?;
    let kept_sites: Vec<usize> = kept.iter().step_by(2).map(|j| j / 2 + 1).collect();
    let env_sites: Vec<usize> = (1..=n).filter(|s| !kept_sites.contains(s)).collect();
    let (dk, de) = (1usize << kept_sites.len(), 1usize << env_sites.len());
    let pack = |s: usize, sites: &[usize]| {
        sites.iter().fold(0usize, |acc, &site| {
            (acc << 1) | usize::from(s & site_bit(n, site) != 0)
        })
    };
    let mut psi = DMatrix::<Complex64>::zeros(dk, de);
    for (s, &amp) in state.amplitudes.iter().enumerate() {
        psi[(pack(s, &kept_sites), pack(s, &env_sites))] = amp;
    }
    DenseOperator::new(&psi * psi.adjoint())
}

/// Von Neumann entropy in bits.
pub fn dense_entropy(rho: &DenseOperator) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(invalid(format!("density matrix trace {tr} differs from 1")));
    }
    Ok(rho
        .eigenvalues()
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum())
}

/// Many-body spectrum `E_GS + Σ_{k∈S} ε_k` over all subsets, ascending.
pub fn free_fermion_spectrum(basis: &ModeBasis) -> Result<Vec<f64>> {
    check_capacity(basis.n_modes())?;
    let mut levels = vec![basis.ground_state_energy()];
    for &e in basis.energies() {
        let shifted: Vec<f64> = levels.iter().map(|l| l + e).collect();
        levels.extend(shifted);
    }
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

/// Deviations between the Gaussian pipeline and the dense route for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub spec: ChainSpec,
    pub spectrum: f64,
    pub correlation: f64,
    pub entropy: f64,
}

impl OracleCase {
    pub fn max_deviation(&self) -> f64 {
        self.spectrum.max(self.correlation).max(self.entropy)
    }
}

/// Times at which [`oracle_check`] compares evolved states.
pub const ORACLE_TIMES: [f64; 4] = [0.0, 0.5, 2.0, 10.0];

/// Quench from the clean chain into a few fixed impurity and cut-bond
/// chains for every `N` in `2..=max_n`.
pub fn oracle_check(max_n: usize) -> Result<Vec<OracleCase>> {
    use crate::fermion::diagonalize;
    use crate::state::{left_block, CorrelationMatrix};
    check_capacity(max_n)?;
    if max_n < 2 {
        return Err(invalid("oracle check needs max_n >= 2"));
    }
    let mut cases = Vec::new();
    for n in 2..=max_n {
        let spec0 = ChainSpec::uniform(n)?;
        let basis0 = diagonalize(&spec0.coupling())?;
        let pattern = OccupationPattern::from_decimal(0x5a5 % (1u128 << n), n)?;
        let g0 = CorrelationMatrix::eigenstate(&basis0, &pattern)?;
        let psi = dense_quasiparticle_state(&spec0, &basis0, &pattern)?;
        let specs = [
            ChainSpec::new(n, 1.0, n.div_ceil(2), [])?,
            ChainSpec::new(n, 0.4, 1, [])?.cut_bond(n / 2)?,
            ChainSpec::new(n, 1.7, n, [])?,
        ];
        for spec in specs {
            let basis = diagonalize(&spec.coupling())?;
            let h = dense_hamiltonian(&spec)?;
            let dense_levels = h.eigenvalues();
            let spectrum = dense_levels
                .iter()
                .zip(free_fermion_spectrum(&basis)?)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let evolver = DenseEvolver::new(&h);
            let sub = left_block((n / 2).max(1));
            let (mut correlation, mut entropy) = (0.0f64, 0.0f64);
            for t in ORACLE_TIMES {
                let g = g0.evolve(&basis.propagator(t)?)?;
                let dense = evolver.evolve(&psi, t)?;
                correlation = correlation.max((g.gamma() - dense.correlation()).map(|z| z.norm()).max());
                let s = g.reduce(&sub)?.mode_spectrum()?.entropy();
                entropy = entropy.max((s - dense_entropy(&dense_reduced_density(&dense, &sub)?)?).abs());
            }
            cases.push(OracleCase {
                spec,
                spectrum,
                correlation,
                entropy,
            });
        }
    }
    Ok(cases)
}
