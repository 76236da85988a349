//! Gaussian states as Majorana correlation matrices.
//!
//! A state is stored through the real antisymmetric matrix `M` with
//! `⟨a_i a_j⟩ = δ_ij + i M_ij`. The correlation matrix used throughout is
//! `Γ_ij = ½⟨[γ_i, γ_j]⟩ = (i/2) M_ij`, Hermitian and purely imaginary, with
//! eigenvalues in `[-½, ½]`; pure states have all eigenvalues at `±½`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::CouplingMatrix;
use crate::error::{invalid, Error, Result};
use crate::fermion::{ModeBasis, Propagator};

/// λ at or above `½ - PURE_MODE_TOL` is a pure mode with `ω = ∞`.
pub const PURE_MODE_TOL: f64 = 1e-12;
/// Largest tolerated overshoot of `|λ|` past `½`.
pub const EIGENVALUE_OVERSHOOT_TOL: f64 = 1e-9;
/// Largest subsystem for which the `2^N′` density-matrix spectrum is built.
pub const MAX_RHO_MODES: usize = 20;

/// Quasiparticle occupation pattern over the modes of a [`ModeBasis`].
///
/// `bits[0]` is mode 1, the lowest single-particle energy, and is the most
/// significant digit of the decimal label, so `|101⟩ ≡ |5_d⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupationPattern {
    bits: Vec<bool>,
}

impl OccupationPattern {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(invalid("occupation pattern needs at least one mode"));
        }
        Ok(Self { bits })
    }

    pub fn vacuum(n: usize) -> Result<Self> {
        Self::from_bits(vec![false; n])
    }

    pub fn from_decimal(label: u128, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("occupation pattern needs at least one mode"));
        }
        if n < 128 && label >> n != 0 {
            return Err(invalid(format!("label {label} does not fit in {n} modes")));
        }
        let bits = (0..n)
            .map(|k| {
                let shift = n - 1 - k;
                shift < 128 && (label >> shift) & 1 == 1
            })
            .collect();
        Ok(Self { bits })
    }

    /// Parses `"<decimal>_d"`, a plain decimal, or a bit string of length `n`
    /// (optionally suffixed `_b`). A bare string of exactly `n` binary digits
    /// is read as bits.
    pub fn parse(label: &str, n: usize) -> Result<Self> {
        let label = label.trim();
        let is_bits = |s: &str| s.len() == n && s.chars().all(|c| c == '0' || c == '1');
        if let Some(dec) = label.strip_suffix("_d") {
            let value: u128 = dec
                .parse()
                .map_err(|_| invalid(format!("bad decimal label `{label}`")))?;
            return Self::from_decimal(value, n);
        }
        if let Some(bits) = label.strip_suffix("_b") {
            if !is_bits(bits) {
                return Err(invalid(format!("bit label `{label}` needs exactly {n} binary digits")));
            }
            return Self::from_bits(bits.chars().map(|c| c == '1').collect());
        }
        if is_bits(label) {
            return Self::from_bits(label.chars().map(|c| c == '1').collect());
        }
        let value: u128 = label
            .parse()
            .map_err(|_| invalid(format!("unrecognised occupation label `{label}`")))?;
        Self::from_decimal(value, n)
    }

    /// Independent fair bits from ChaCha8 seeded with `seed`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        Self::random_stream(n, seed, 0)
    }

    /// Like [`random`](Self::random) but on ChaCha stream `stream`, so sample
    /// `i` of a sweep depends only on `(seed, i)`.
    pub fn random_stream(n: usize, seed: u64, stream: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self::from_rng(n, &mut rng)
    }

    pub fn from_rng<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::from_bits((0..n).map(|_| rng.random::<bool>()).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.bits[mode]
    }

    pub fn count_occupied(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Decimal label, if the pattern has at most 128 modes.
    pub fn decimal_label(&self) -> Option<u128> {
        if self.bits.len() > 128 {
            return None;
        }
        Some(self.bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128))
    }

    /// Excitation energy `Σ_{occupied} ε_k` above the vacuum of `basis`.
    pub fn excitation_energy(&self, basis: &ModeBasis) -> f64 {
        self.bits
            .iter()
            .zip(basis.energies())
            .filter(|(&b, _)| b)
            .map(|(_, e)| e)
            .sum()
    }
}

impl fmt::Display for OccupationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Majorana correlation matrix of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    majorana: DMatrix<f64>,
}

impl CorrelationMatrix {
    /// Wraps the real antisymmetric `M = -2iΓ`.
    pub fn from_majorana(majorana: DMatrix<f64>) -> Result<Self> {
        let dim = majorana.nrows();
        if dim == 0 || dim != majorana.ncols() || !dim.is_multiple_of(2) {
            return Err(invalid("correlation matrix must be square with even dimension"));
        }
        for i in 0..dim {
            for j in 0..=i {
                if (majorana[(i, j)] + majorana[(j, i)]).abs() > 1e-12 {
                    return Err(invalid(format!("correlation matrix not antisymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { majorana })
    }

    /// Accepts `Γ` directly; it must be Hermitian and purely imaginary.
    pub fn from_gamma(gamma: &DMatrix<Complex64>) -> Result<Self> {
        if gamma.iter().any(|z| z.re.abs() > 1e-12) {
            return Err(invalid("correlation matrix has a real part"));
        }
        Self::from_majorana(gamma.map(|z| 2.0 * z.im))
    }

    /// Eigenstate of the chain behind `basis` with the given modes occupied:
    /// `M = Q M_mode Qᵀ` where block `k` of `M_mode` is `±[[0, 1], [-1, 0]]`,
    /// `+` for an empty mode.
    pub fn eigenstate(basis: &ModeBasis, pattern: &OccupationPattern) -> Result<Self> {
        if basis.n_modes() != pattern.len() {
            return Err(invalid(format!(
                "pattern has {} modes but basis has {}",
                pattern.len(),
                basis.n_modes()
            )));
        }
        let q = basis.transform();
        let dim = q.nrows();
        // M = Σ_k s_k (q1 q2ᵀ - q2 q1ᵀ), built as X - Xᵀ with X = Q1 S Q2ᵀ
        let mut q1s = DMatrix::<f64>::zeros(dim, pattern.len());
        let mut q2 = DMatrix::<f64>::zeros(dim, pattern.len());
        for k in 0..pattern.len() {
            let s = if pattern.is_occupied(k) { -1.0 } else { 1.0 };
            q1s.set_column(k, &(q.column(2 * k) * s));
            q2.set_column(k, &q.column(2 * k + 1));
        }
        let x = q1s * q2.transpose();
        let majorana = &x - x.transpose();
        Ok(Self { majorana })
    }

    pub fn dim(&self) -> usize {
        self.majorana.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.dim() / 2
    }

    /// The real antisymmetric `M`.
    pub fn majorana(&self) -> &DMatrix<f64> {
        &self.majorana
    }

    /// `Γ = (i/2) M`.
    pub fn gamma(&self) -> DMatrix<Complex64> {
        self.majorana.map(|x| Complex64::new(0.0, 0.5 * x))
    }

    /// `Γ(t) = T Γ Tᵀ`.
    pub fn evolve(&self, propagator: &Propagator) -> Result<Self> {
        if propagator.dim() != self.dim() {
            return Err(invalid(format!(
                "propagator dimension {} does not match state dimension {}",
                propagator.dim(),
                self.dim()
            )));
        }
        let t = propagator.matrix();
        Ok(Self {
            majorana: antisymmetrize(t * &self.majorana * t.transpose()),
        })
    }

    /// Reduced state of `sites` (1-based, kept in the given order): rows and
    /// columns `2n-1, 2n` of each listed site.
    pub fn reduce(&self, sites: &[usize]) -> Result<Self> {
        let idx = majorana_indices(sites, self.n_sites())?;
        Ok(Self {
            majorana: self.majorana.select_rows(&idx).select_columns(&idx),
        })
    }

    /// Expected energy `Σ_ij C_ij Γ_ij = -¼ Σ_ij A_ij M_ij`.
    pub fn energy(&self, coupling: &CouplingMatrix) -> Result<f64> {
        if coupling.dim() != self.dim() {
            return Err(invalid("coupling and state dimensions differ"));
        }
        Ok(-0.25 * coupling.generator().component_mul(&self.majorana).sum())
    }

    /// Eigenvalues of `Γ`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self.gamma().symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// `max |Γ² - ¼ I|`; zero for a pure state.
    pub fn purity_defect(&self) -> f64 {
        let m2 = &self.majorana * &self.majorana;
        // Γ² = -M²/4
        let dim = self.dim();
        (m2.scale(-0.25) - DMatrix::<f64>::identity(dim, dim).scale(0.25)).amax()
    }

    /// Mode parameters `{λ_k, ω_k}` and entropy.
    pub fn mode_spectrum(&self) -> Result<ReducedSpectrum> {
        let vals = self.eigenvalues();
        let n = vals.len() / 2;
        let top = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top > 0.5 + EIGENVALUE_OVERSHOOT_TOL {
            return Err(Error::NumericalIntegrity(format!(
                "correlation eigenvalue {top} exceeds 1/2"
            )));
        }
        let lambdas = (0..n)
            .map(|k| (0.5 * (vals[n + k] - vals[n - 1 - k])).max(0.0))
            .collect();
        ReducedSpectrum::from_lambdas(lambdas)
    }
}

fn antisymmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m - m.transpose()).scale(0.5)
}

/// 0-based Majorana indices of 1-based `sites`.
pub(crate) fn majorana_indices(sites: &[usize], n_sites: usize) -> Result<Vec<usize>> {
    if sites.is_empty() {
        return Err(invalid("subsystem must contain at least one site"));
    }
    let mut seen = vec![false; n_sites + 1];
    let mut idx = Vec::with_capacity(2 * sites.len());
    for &s in sites {
        if s < 1 || s > n_sites {
            return Err(invalid(format!("site {s} outside [1, {n_sites}]")));
        }
        if std::mem::replace(&mut seen[s], true) {
            return Err(invalid(format!("site {s} listed twice")));
        }
        idx.push(2 * s - 2);
        idx.push(2 * s - 1);
    }
    Ok(idx)
}

/// Sites `1..=n`.
pub fn left_block(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `ω = 2 artanh(2λ)`; infinite for pure modes.
pub fn lambda_to_omega(lambda: f64) -> f64 {
    if lambda >= 0.5 - PURE_MODE_TOL {
        f64::INFINITY
    } else {
        2.0 * (2.0 * lambda).atanh()
    }
}

/// `λ = ½ tanh(ω/2)`.
pub fn omega_to_lambda(omega: f64) -> f64 {
    0.5 * (0.5 * omega).tanh()
}

/// Mode parameters of a reduced Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpectrum {
    lambdas: Vec<f64>,
    omegas: Vec<f64>,
    entropy: f64,
}

impl ReducedSpectrum {
    pub fn from_lambdas(mut lambdas: Vec<f64>) -> Result<Self> {
        if let Some(l) = lambdas
            .iter()
            .find(|l| !(0.0..=0.5 + EIGENVALUE_OVERSHOOT_TOL).contains(*l))
        {
            return Err(Error::NumericalIntegrity(format!(
                "mode parameter λ = {l} outside [0, 1/2]"
            )));
        }
        lambdas.iter_mut().for_each(|l| *l = l.min(0.5));
        lambdas.sort_by(f64::total_cmp);
        let omegas = lambdas.iter().map(|&l| lambda_to_omega(l)).collect();
        let entropy = lambdas.iter().map(|&l| binary_entropy(0.5 + l)).sum();
        Ok(Self {
            lambdas,
            omegas,
            entropy,
        })
    }

    pub fn from_omegas(omegas: &[f64]) -> Result<Self> {
        if omegas.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(invalid("ω must be non-negative"));
        }
        Self::from_lambdas(omegas.iter().map(|&w| omega_to_lambda(w)).collect())
    }

    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Entanglement entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    /// Occupation probabilities `p_k = 1/(1 + e^{ω_k})`.
    pub fn occupations(&self) -> Vec<f64> {
        self.omegas.iter().map(|&w| 1.0 / (1.0 + w.exp())).collect()
    }

    /// All `2^N′` eigenvalues of the reduced density matrix, indexed by the
    /// occupation bits (mode 1 most significant).
    pub fn rho_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.n_modes();
        if n > MAX_RHO_MODES {
            return Err(Error::Capacity(format!(
                "{n} modes exceeds the limit of {MAX_RHO_MODES} for explicit ρ spectra"
            )));
        }
        let p = self.occupations();
        let mut out = vec![1.0f64];
        for pk in p {
            out = out.iter().flat_map(|&v| [v * (1.0 - pk), v * pk]).collect();
        }
        Ok(out)
    }
}

/// Entropy in bits of a reduced spectrum.
pub fn entropy(spec: &ReducedSpectrum) -> f64 {
    spec.entropy()
}
