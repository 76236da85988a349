//! Free-fermion thermal reference, temperature fitting and spectral fidelity.

use crate::chain::ChainSpec;
use crate::error::{invalid, Error, Result};
use crate::fermion::diagonalize;

/// Target residual of the equation-of-state root.
pub const EOS_TOL: f64 = 1e-10;
/// Largest β the equation-of-state search brackets before declaring the
/// zero-temperature limit.
pub const BETA_CEILING: f64 = 1e12;
/// Log-spaced grid used to seed the fidelity maximisation.
pub const MAX_FIDELITY_RANGE: (f64, f64) = (1e-3, 1e3);
const MAX_FIDELITY_GRID: usize = 601;
const GOLDEN_REL_WIDTH: f64 = 1e-6;

/// How the inverse temperature of the reference state is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BetaMethod {
    EquationOfState,
    MaxFidelity,
}

impl BetaMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BetaMethod::EquationOfState => "equation_of_state",
            BetaMethod::MaxFidelity => "max_fidelity",
        }
    }
}

impl std::str::FromStr for BetaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equation_of_state" => Ok(BetaMethod::EquationOfState),
            "max_fidelity" => Ok(BetaMethod::MaxFidelity),
            other => Err(invalid(format!("unknown beta method `{other}`"))),
        }
    }
}

/// Fidelity of a reduced spectrum with the thermal reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub beta_used: f64,
    pub method: BetaMethod,
}

/// Grand-canonical-free ideal Fermi gas on the subsystem modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalModel {
    mode_energies: Vec<f64>,
}

/// `β·E` with the convention `∞·0 = 0` for exact zero modes.
fn scaled(beta: f64, energy: f64) -> f64 {
    if energy == 0.0 {
        0.0
    } else {
        beta * energy
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        return Err(invalid(format!("beta must be non-negative, got {beta}")));
    }
    Ok(())
}

impl ThermalModel {
    pub fn new(mut mode_energies: Vec<f64>) -> Result<Self> {
        if mode_energies.is_empty() {
            return Err(invalid("thermal model needs at least one mode"));
        }
        if let Some(e) = mode_energies.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(invalid(format!("mode energy {e} must be finite and non-negative")));
        }
        mode_energies.sort_by(f64::total_cmp);
        Ok(Self { mode_energies })
    }

    /// Single-particle energies of `spec` as the reference Hamiltonian.
    pub fn from_chain(spec: &ChainSpec) -> Result<Self> {
        let basis = diagonalize(&spec.coupling())?;
        Self::new(basis.energies().to_vec())
    }

    pub fn n_modes(&self) -> usize {
        self.mode_energies.len()
    }

    pub fn mode_energies(&self) -> &[f64] {
        &self.mode_energies
    }

    /// `ln Z(β) = Σ_k ln(1 + e^{-βE_k})`.
    pub fn log_partition(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self.log_partition_unchecked(beta))
    }

    fn log_partition_unchecked(&self, beta: f64) -> f64 {
        self.mode_energies
            .iter()
            .map(|&e| (-scaled(beta, e)).exp().ln_1p())
            .sum()
    }

    /// `U(β) = Σ_k E_k / (e^{βE_k} + 1)`.
    pub fn internal_energy(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self.internal_energy_unchecked(beta))
    }

    fn internal_energy_unchecked(&self, beta: f64) -> f64 {
        self.mode_energies
            .iter()
            .map(|&e| {
                let x = (-scaled(beta, e)).exp();
                e * x / (1.0 + x)
            })
            .sum()
    }

    /// Thermal entropy `ln Z + βU` in nats.
    pub fn thermal_entropy(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        let bu: f64 = self
            .mode_energies
            .iter()
            .map(|&e| {
                let be = scaled(beta, e);
                let x = (-be).exp();
                if x == 0.0 {
                    0.0
                } else {
                    be * x / (1.0 + x)
                }
            })
            .sum();
        Ok(self.log_partition_unchecked(beta) + bu)
    }

    /// Thermal occupation `1/(e^{βE_k} + 1)` per mode.
    pub fn occupations(&self, beta: f64) -> Result<Vec<f64>> {
        check_beta(beta)?;
        Ok(self
            .mode_energies
            .iter()
            .map(|&e| {
                let x = (-scaled(beta, e)).exp();
                x / (1.0 + x)
            })
            .collect())
    }

    /// Solves `ln Z(β) + βU(β) = S ln 2` for β.
    ///
    /// `entropy_bits ≥ N′` gives `β = 0`. Entropy at or below the floor set
    /// by exact zero modes (or `≤ 0`) gives `β = ∞`.
    pub fn fit_beta_eos(&self, entropy_bits: f64) -> Result<f64> {
        if entropy_bits.is_nan() {
            return Err(invalid("entropy is NaN"));
        }
        let target = entropy_bits * std::f64::consts::LN_2;
        let g = |beta: f64| self.thermal_entropy(beta).map(|s| s - target);
        if g(0.0)? <= 0.0 {
            return Ok(0.0);
        }
        if entropy_bits <= 0.0 {
            return Ok(f64::INFINITY);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        while g(hi)? > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > BETA_CEILING {
                return Ok(f64::INFINITY);
            }
        }
        // Thermal entropy decreases monotonically in β, so bisection is safe.
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            let gm = g(mid)?;
            if gm.abs() <= EOS_TOL || hi - lo <= f64::EPSILON * hi {
                return Ok(mid);
            }
            if gm > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Bhattacharyya overlap of the sorted mode spectra.
    pub fn classical_fidelity(&self, omegas: &[f64], beta: f64) -> Result<f64> {
        check_beta(beta)?;
        if omegas.len() != self.n_modes() {
            return Err(invalid(format!(
                "{} mode parameters for a {}-mode reference",
                omegas.len(),
                self.n_modes()
            )));
        }
        if omegas.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(invalid("ω must be non-negative"));
        }
        if omegas.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("ω must be sorted ascending"));
        }
        Ok(self.fidelity_unchecked(omegas, beta))
    }

    fn fidelity_unchecked(&self, omegas: &[f64], beta: f64) -> f64 {
        omegas
            .iter()
            .zip(&self.mode_energies)
            .map(|(&w, &e)| {
                let be = scaled(beta, e);
                // √(p q) + √((1-p)(1-q)) with p, q the empty-mode weights
                let num = 1.0 + (-0.5 * (w + be)).exp();
                let den = ((1.0 + (-w).exp()) * (1.0 + (-be).exp())).sqrt();
                num / den
            })
            .product()
    }

    /// β maximising the fidelity: log grid over [`MAX_FIDELITY_RANGE`]
    /// refined by golden-section search in `ln β`.
    pub fn fit_beta_max_fidelity(&self, omegas: &[f64]) -> Result<f64> {
        self.classical_fidelity(omegas, 1.0)?;
        let (lo, hi) = (MAX_FIDELITY_RANGE.0.ln(), MAX_FIDELITY_RANGE.1.ln());
        let step = (hi - lo) / (MAX_FIDELITY_GRID - 1) as f64;
        let f = |x: f64| self.fidelity_unchecked(omegas, x.exp());
        let mut best = 0;
        let mut best_f = f64::NEG_INFINITY;
        for i in 0..MAX_FIDELITY_GRID {
            let v = f(lo + step * i as f64);
            if v > best_f {
                best_f = v;
                best = i;
            }
        }
        let mut a = lo + step * best.saturating_sub(1) as f64;
        let mut b = lo + step * (best + 1).min(MAX_FIDELITY_GRID - 1) as f64;
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        // width in ln β equals relative width in β
        while b - a > GOLDEN_REL_WIDTH {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        let x = 0.5 * (a + b);
        // flat landscapes: never return worse than the grid optimum
        if f(x) >= best_f {
            Ok(x.exp())
        } else {
            Ok((lo + step * best as f64).exp())
        }
    }

    /// Fits β by `method` and evaluates the fidelity. Input need not be
    /// sorted.
    pub fn fidelity(&self, omegas: &[f64], entropy_bits: f64, method: BetaMethod) -> Result<FidelityResult> {
        let sorted = canonical_omegas(omegas);
        let beta = match method {
            BetaMethod::EquationOfState => self.fit_beta_eos(entropy_bits)?,
            BetaMethod::MaxFidelity => self.fit_beta_max_fidelity(&sorted)?,
        };
        Ok(FidelityResult {
            fidelity: self.classical_fidelity(&sorted, beta)?,
            beta_used: beta,
            method,
        })
    }
}

/// Sorted copy of a mode spectrum.
pub fn canonical_omegas(omegas: &[f64]) -> Vec<f64> {
    let mut v = omegas.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Mean and range of a fidelity trace over an open time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Averages the samples with `t₁ < t < t₂`. Samples within `1e-9` of an
/// endpoint count as on it, so grid round-off does not leak them in.
pub fn time_averaged_fidelity(trace: &[(f64, f64)], window: (f64, f64)) -> Result<WindowStats> {
    let (t1, t2) = window;
    let slack = |t: f64| 1e-9 * t.abs().max(1.0);
    let inside: Vec<f64> = trace
        .iter()
        .filter(|(t, _)| *t > t1 + slack(t1) && *t < t2 - slack(t2))
        .map(|&(_, f)| f)
        .collect();
    if inside.is_empty() {
        return Err(invalid(format!("no samples inside the window ({t1}, {t2})")));
    }
    let mean = inside.iter().sum::<f64>() / inside.len() as f64;
    let min = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let max = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(WindowStats {
        mean,
        min,
        max,
        count: inside.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::binary_entropy;

    #[test]
    fn partition_function_limits() {
        let m = ThermalModel::new(vec![1.0; 25]).unwrap();
        assert!((m.log_partition(0.0).unwrap() - 25.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let cold = ThermalModel::new(vec![1.0, 3.0]).unwrap();
        assert!(cold.log_partition(1e6).unwrap() < 1e-300);
        let one = ThermalModel::new(vec![1.0]).unwrap();
        assert!((one.log_partition(1.0).unwrap() - 0.313_261_687_518_222_8).abs() < 1e-12);
        assert!(one.log_partition(-1.0).is_err());
        assert!(one.internal_energy(-0.1).is_err());
    }

    #[test]
    fn internal_energy_values() {
        let m = ThermalModel::new(vec![0.5, 1.0, 2.5]).unwrap();
        assert!((m.internal_energy(0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(m.internal_energy(1e6).unwrap().abs() < 1e-300);
        let two = ThermalModel::new(vec![2.0]).unwrap();
        assert!((two.internal_energy(1.0).unwrap() - 0.238_405_844_044_234).abs() < 1e-12);
    }

    #[test]
    fn internal_energy_is_log_partition_derivative() {
        let m = ThermalModel::new(vec![0.1, 0.7, 1.3, 2.9, 4.0]).unwrap();
        let h = 1e-5;
        for beta in [0.05, 0.3, 1.0, 2.5] {
            let fd = -(m.log_partition(beta + h).unwrap() - m.log_partition(beta - h).unwrap()) / (2.0 * h);
            let u = m.internal_energy(beta).unwrap();
            assert!(((fd - u) / u).abs() < 1e-6, "beta={beta}");
        }
    }

    #[test]
    fn eos_limits_and_inversion() {
        let m = ThermalModel::new(vec![0.4, 1.0, 1.8]).unwrap();
        assert_eq!(m.fit_beta_eos(3.0).unwrap(), 0.0);
        assert_eq!(m.fit_beta_eos(3.5).unwrap(), 0.0);
        assert_eq!(m.fit_beta_eos(0.0).unwrap(), f64::INFINITY);
        assert!(m.fit_beta_eos(1e-9).unwrap() > 10.0);

        let one = ThermalModel::new(vec![1.0]).unwrap();
        let p = 1.0 / (1.0 + 1f64.exp());
        let beta = one.fit_beta_eos(binary_entropy(p)).unwrap();
        assert!((beta - 1.0).abs() < 1e-8, "{beta}");
    }

    #[test]
    fn eos_residual_is_monotone() {
        let m = ThermalModel::new(vec![0.2, 0.9, 1.1, 3.0]).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let s = m.thermal_entropy(i as f64 * 0.05).unwrap();
            assert!(s <= prev + 1e-15);
            prev = s;
        }
    }

    #[test]
    fn zero_mode_floor() {
        // one exact zero mode keeps one bit of entropy even at β = ∞
        let m = ThermalModel::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(m.fit_beta_eos(0.5).unwrap(), f64::INFINITY);
        let b = m.fit_beta_eos(1.5).unwrap();
        assert!(b.is_finite() && b > 0.0);
        assert!(m.classical_fidelity(&[0.0, 1.0], f64::INFINITY).unwrap() > 0.0);
    }

    #[test]
    fn fidelity_values() {
        let one = ThermalModel::new(vec![1.0]).unwrap();
        let f = one.classical_fidelity(&[2.0], 1.0).unwrap();
        assert!(f <= 1.0);
        let expect = (1.0 + (-1.5f64).exp()) / ((1.0 + (-2f64).exp()) * (1.0 + (-1f64).exp())).sqrt();
        let two = ThermalModel::new(vec![1.0]).unwrap();
        assert!((two.classical_fidelity(&[2.0], 1.0).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.981_491_847_663_229).abs() < 1e-12);

        let m = ThermalModel::new(vec![1.0, 2.0]).unwrap();
        assert!((m.classical_fidelity(&[1.5, 3.0], 1.5).unwrap() - 1.0).abs() < 1e-15);
        // βE → ∞ with ω = 0: factor 1/√2
        let cold = one.classical_fidelity(&[0.0], 1e6).unwrap();
        assert!((cold - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        // pure mode against finite temperature
        let pure = one.classical_fidelity(&[f64::INFINITY], 1.0).unwrap();
        assert!((pure - 1.0 / (1.0 + (-1f64).exp()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn fidelity_rejects_bad_input() {
        let m = ThermalModel::new(vec![1.0, 2.0]).unwrap();
        assert!(m.classical_fidelity(&[1.0], 1.0).is_err());
        assert!(m.classical_fidelity(&[2.0, 1.0], 1.0).is_err());
        assert!(m.classical_fidelity(&[1.0, 2.0], -1.0).is_err());
        assert!(ThermalModel::new(vec![]).is_err());
        assert!(ThermalModel::new(vec![-1.0]).is_err());
    }

    #[test]
    fn max_fidelity_recovers_thermal_beta() {
        let m = ThermalModel::new(vec![0.3, 0.8, 1.4, 2.2, 3.1]).unwrap();
        for beta0 in [0.01, 0.4, 1.7, 30.0] {
            let omegas: Vec<f64> = m.mode_energies().iter().map(|e| beta0 * e).collect();
            let beta = m.fit_beta_max_fidelity(&omegas).unwrap();
            assert!(((beta - beta0) / beta0).abs() < 1e-4, "{beta0} -> {beta}");
        }
    }

    #[test]
    fn max_fidelity_beats_reference_on_noisy_input() {
        let m = ThermalModel::new(vec![0.3, 0.8, 1.4, 2.2, 3.1]).unwrap();
        let beta0 = 0.9;
        let noise = [0.05, -0.03, 0.08, -0.06, 0.02];
        let omegas: Vec<f64> = m
            .mode_energies()
            .iter()
            .zip(noise)
            .map(|(e, n)| beta0 * e + n)
            .collect();
        let beta = m.fit_beta_max_fidelity(&omegas).unwrap();
        assert!(m.classical_fidelity(&omegas, beta).unwrap() >= m.classical_fidelity(&omegas, beta0).unwrap());
    }

    #[test]
    fn window_statistics() {
        let trace: Vec<(f64, f64)> = (0..=400).map(|i| (i as f64 * 0.1, 0.9)).collect();
        let s = time_averaged_fidelity(&trace, (30.0, 40.0)).unwrap();
        assert!((s.mean - 0.9).abs() < 1e-15);
        assert_eq!((s.min, s.max), (0.9, 0.9));
        assert_eq!(s.count, 99);

        let two = [(31.0, 0.8), (39.0, 1.0)];
        let s = time_averaged_fidelity(&two, (30.0, 40.0)).unwrap();
        assert!((s.mean - 0.9).abs() < 1e-15);
        assert_eq!((s.min, s.max), (0.8, 1.0));

        assert!(time_averaged_fidelity(&two, (40.0, 50.0)).is_err());
    }

    #[test]
    fn beta_method_parsing() {
        for m in [BetaMethod::EquationOfState, BetaMethod::MaxFidelity] {
            assert_eq!(m.as_str().parse::<BetaMethod>().unwrap(), m);
        }
        assert!("nope".parse::<BetaMethod>().is_err());
    }
}
