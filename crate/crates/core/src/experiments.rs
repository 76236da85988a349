//! Scenario runners: entropy and fidelity traces, spectrum snapshots,
//! input-versus-output scatter, fidelity histograms and the product-state
//! check.
//!
//! Samples are independent. Sample `i` draws its pattern from ChaCha stream
//! `i` of the master seed, so results do not depend on scheduling, and
//! outputs are always collected in sample order.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::chain::ChainSpec;
use crate::config::{ExperimentConfig, InitialState, ThermalReference};
use crate::error::{invalid, Error, Result};
use crate::fermion::{diagonalize, ModeBasis};
use crate::state::{left_block, majorana_indices, CorrelationMatrix, OccupationPattern, ReducedSpectrum};
use crate::thermal::{canonical_omegas, time_averaged_fidelity, BetaMethod, ThermalModel, WindowStats};

/// Maximum rejection-sampling draws per sample under an energy filter.
const MAX_FILTER_DRAWS: usize = 100_000;

/// Evolution Hamiltonian, initial-state Hamiltonian and subsystem, with the
/// spectral data they need.
#[derive(Debug, Clone)]
pub struct Scenario {
    evolution: ChainSpec,
    initial_chain: ChainSpec,
    basis: ModeBasis,
    initial_basis: ModeBasis,
    thermal: ThermalModel,
    subsystem: Vec<usize>,
}

/// Rows of `T(t)` for the subsystem Majoranas at a list of times.
#[derive(Debug, Clone)]
pub struct PropagatorTable {
    times: Vec<f64>,
    rows: Vec<DMatrix<f64>>,
}

impl PropagatorTable {
    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

impl Scenario {
    /// `subsystem_size` may equal the chain length here; the config layer is
    /// stricter.
    pub fn new(
        evolution: ChainSpec,
        initial_chain: ChainSpec,
        subsystem_size: usize,
        reference: ThermalReference,
    ) -> Result<Self> {
        if evolution.n_sites() != initial_chain.n_sites() {
            return Err(invalid("evolution and initial chains differ in length"));
        }
        if subsystem_size < 1 || subsystem_size > evolution.n_sites() {
            return Err(invalid(format!(
                "subsystem size {subsystem_size} outside [1, {}]",
                evolution.n_sites()
            )));
        }
        let basis = diagonalize(&evolution.coupling())?;
        let initial_basis = diagonalize(&initial_chain.coupling())?;
        let thermal = ThermalModel::from_chain(&reference.reference_chain(&evolution, subsystem_size)?)?;
        Ok(Self {
            evolution,
            initial_chain,
            basis,
            initial_basis,
            thermal,
            subsystem: left_block(subsystem_size),
        })
    }

    /// Quench from the clean uncut chain into `config.spec`.
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        Self::new(
            config.spec.clone(),
            ChainSpec::uniform(config.spec.n_sites())?,
            config.subsystem_size,
            config.thermal_reference,
        )
    }

    pub fn evolution(&self) -> &ChainSpec {
        &self.evolution
    }

    pub fn initial_chain(&self) -> &ChainSpec {
        &self.initial_chain
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn initial_basis(&self) -> &ModeBasis {
        &self.initial_basis
    }

    pub fn thermal(&self) -> &ThermalModel {
        &self.thermal
    }

    pub fn subsystem(&self) -> &[usize] {
        &self.subsystem
    }

    pub fn propagators(&self, times: &[f64]) -> Result<PropagatorTable> {
        let idx = majorana_indices(&self.subsystem, self.evolution.n_sites())?;
        let rows = times
            .iter()
            .map(|&t| self.basis.propagator_rows(t, &idx))
            .collect::<Result<Vec<_>>>()?;
        Ok(PropagatorTable {
            times: times.to_vec(),
            rows,
        })
    }

    pub fn initial_state(&self, pattern: &OccupationPattern) -> Result<CorrelationMatrix> {
        CorrelationMatrix::eigenstate(&self.initial_basis, pattern)
    }

    /// Reduced mode spectrum at each tabulated time.
    pub fn reduced_spectra(&self, g0: &CorrelationMatrix, table: &PropagatorTable) -> Result<Vec<ReducedSpectrum>> {
        table
            .rows
            .iter()
            .map(|rows| {
                let sub = rows * g0.majorana() * rows.transpose();
                let sub = (&sub - sub.transpose()).scale(0.5);
                CorrelationMatrix::from_majorana(sub)?.mode_spectrum()
            })
            .collect()
    }

    /// Fits both temperatures and evaluates the fidelity with `method`.
    pub fn fit(&self, t: f64, spectrum: &ReducedSpectrum, method: BetaMethod) -> Result<TraceRow> {
        let omegas = canonical_omegas(spectrum.omegas());
        let beta_eos = self.thermal.fit_beta_eos(spectrum.entropy())?;
        let beta_max_fidelity = self.thermal.fit_beta_max_fidelity(&omegas)?;
        let beta = match method {
            BetaMethod::EquationOfState => beta_eos,
            BetaMethod::MaxFidelity => beta_max_fidelity,
        };
        Ok(TraceRow {
            t,
            entropy: spectrum.entropy(),
            beta_eos,
            beta_max_fidelity,
            fidelity: self.thermal.classical_fidelity(&omegas, beta)?,
        })
    }

    fn run_sample(
        &self,
        pattern: &OccupationPattern,
        table: &PropagatorTable,
        method: BetaMethod,
        window: (f64, f64),
    ) -> Result<RunRecord> {
        let g0 = self.initial_state(pattern)?;
        let spectra = self.reduced_spectra(&g0, table)?;
        let rows = table
            .times
            .iter()
            .zip(&spectra)
            .map(|(&t, s)| self.fit(t, s, method))
            .collect::<Result<Vec<_>>>()?;
        RunRecord::new(pattern.clone(), rows, window)
    }
}

/// One time sample of a fidelity trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub entropy: f64,
    pub beta_eos: f64,
    pub beta_max_fidelity: f64,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub initial_fidelity: f64,
    pub window: WindowStats,
    /// Window means of the two temperature estimates.
    pub mean_beta_eos: f64,
    pub mean_beta_max_fidelity: f64,
}

/// Per-time rows of one sample plus its summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub pattern: OccupationPattern,
    pub rows: Vec<TraceRow>,
    pub summary: RunSummary,
}

impl RunRecord {
    fn new(pattern: OccupationPattern, rows: Vec<TraceRow>, window: (f64, f64)) -> Result<Self> {
        let first = rows.first().ok_or_else(|| invalid("empty time grid"))?;
        if rows.iter().any(|r| !(r.fidelity > 0.0 && r.fidelity <= 1.0 + 1e-12)) {
            return Err(Error::NumericalIntegrity("fidelity left (0, 1]".into()));
        }
        let trace: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.fidelity)).collect();
        let stats = time_averaged_fidelity(&trace, window)?;
        let in_window = |t: f64| trace_in_window(t, window);
        let betas: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| in_window(r.t))
            .map(|r| (r.beta_eos, r.beta_max_fidelity))
            .collect();
        let n = betas.len() as f64;
        let summary = RunSummary {
            initial_fidelity: first.fidelity,
            window: stats,
            mean_beta_eos: betas.iter().map(|b| b.0).sum::<f64>() / n,
            mean_beta_max_fidelity: betas.iter().map(|b| b.1).sum::<f64>() / n,
        };
        Ok(Self { pattern, rows, summary })
    }

    /// `⟨F⟩ - F(0)`.
    pub fn improvement(&self) -> f64 {
        self.summary.window.mean - self.summary.initial_fidelity
    }
}

fn trace_in_window(t: f64, (t1, t2): (f64, f64)) -> bool {
    let slack = |x: f64| 1e-9 * x.abs().max(1.0);
    t > t1 + slack(t1) && t < t2 - slack(t2)
}

/// Initial patterns for every sample of `config`.
pub fn sample_patterns(config: &ExperimentConfig, initial_basis: &ModeBasis) -> Result<Vec<OccupationPattern>> {
    let n = config.spec.n_sites();
    match &config.initial {
        InitialState::Label(label) => Ok(vec![OccupationPattern::parse(label, n)?]),
        InitialState::Random => (0..config.samples as u64)
            .map(|i| filtered_pattern(config, initial_basis, i))
            .collect(),
    }
}

fn filtered_pattern(config: &ExperimentConfig, basis: &ModeBasis, stream: u64) -> Result<OccupationPattern> {
    use rand::SeedableRng;
    let n = config.spec.n_sites();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let (lo, hi) = config.energy_density;
    for _ in 0..MAX_FILTER_DRAWS {
        let p = OccupationPattern::from_rng(n, &mut rng)?;
        let density = p.excitation_energy(basis) / n as f64;
        if lo.is_none_or(|l| density >= l) && hi.is_none_or(|h| density <= h) {
            return Ok(p);
        }
    }
    Err(invalid(format!(
        "no pattern met the energy-density filter within {MAX_FILTER_DRAWS} draws"
    )))
}

/// `t_start` plus every grid time strictly inside the fidelity window.
fn window_times(config: &ExperimentConfig) -> Vec<f64> {
    let grid = config.time_grid.times();
    let mut out = vec![grid[0]];
    out.extend(
        grid.into_iter()
            .skip(1)
            .filter(|&t| trace_in_window(t, config.fidelity_window)),
    );
    out
}

/// Entropy and mode parameters of the subsystem along the time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace {
    pub impurity_site: usize,
    pub pattern: OccupationPattern,
    pub times: Vec<f64>,
    pub spectra: Vec<ReducedSpectrum>,
}

impl EntropyTrace {
    pub fn entropies(&self) -> Vec<f64> {
        self.spectra.iter().map(|s| s.entropy()).collect()
    }
}

/// Entropy trace of the first sample.
pub fn entropy_trace(config: &ExperimentConfig) -> Result<EntropyTrace> {
    let scenario = Scenario::from_config(config)?;
    let pattern = sample_patterns(config, scenario.initial_basis())?.swap_remove(0);
    let table = scenario.propagators(&config.time_grid.times())?;
    let spectra = scenario.reduced_spectra(&scenario.initial_state(&pattern)?, &table)?;
    Ok(EntropyTrace {
        impurity_site: config.spec.impurity_site(),
        pattern,
        times: table.times,
        spectra,
    })
}

/// One entropy trace per impurity site in `alpha_sweep` (or the configured
/// site when the sweep is empty).
pub fn entropy_sweep(config: &ExperimentConfig) -> Result<Vec<EntropyTrace>> {
    let sites = if config.alpha_sweep.is_empty() {
        vec![config.spec.impurity_site()]
    } else {
        config.alpha_sweep.clone()
    };
    sites
        .into_par_iter()
        .map(|alpha| {
            let spec = config.spec.with_impurity(config.spec.impurity_strength(), alpha)?;
            entropy_trace(&config.with_spec(spec))
        })
        .collect()
}

/// Full fidelity traces, one per sample.
pub fn fidelity_trace(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let scenario = Scenario::from_config(config)?;
    let patterns = sample_patterns(config, scenario.initial_basis())?;
    let table = scenario.propagators(&config.time_grid.times())?;
    patterns
        .par_iter()
        .map(|p| scenario.run_sample(p, &table, config.beta_method, config.fidelity_window))
        .collect()
}

/// Sorted `e^{-ω_k}` against `e^{-βE_k}` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub t: f64,
    pub beta: f64,
    pub fidelity: f64,
    pub state: Vec<f64>,
    pub thermal: Vec<f64>,
}

impl SpectrumTable {
    pub fn max_gap(&self) -> f64 {
        self.state
            .iter()
            .zip(&self.thermal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Fidelity recomputed from the two columns alone.
    pub fn fidelity_from_columns(&self) -> f64 {
        self.state
            .iter()
            .zip(&self.thermal)
            .map(|(&x, &y)| (1.0 + (x * y).sqrt()) / ((1.0 + x) * (1.0 + y)).sqrt())
            .product()
    }
}

/// Spectrum comparison for the first sample at time `t`.
pub fn spectrum_compare(config: &ExperimentConfig, t: f64) -> Result<SpectrumTable> {
    let scenario = Scenario::from_config(config)?;
    spectrum_compare_in(&scenario, config, t)
}

pub fn spectrum_compare_in(scenario: &Scenario, config: &ExperimentConfig, t: f64) -> Result<SpectrumTable> {
    let pattern = sample_patterns(config, scenario.initial_basis())?.swap_remove(0);
    let table = scenario.propagators(&[t])?;
    let spectrum = scenario
        .reduced_spectra(&scenario.initial_state(&pattern)?, &table)?
        .swap_remove(0);
    let row = scenario.fit(t, &spectrum, config.beta_method)?;
    let beta = match config.beta_method {
        BetaMethod::EquationOfState => row.beta_eos,
        BetaMethod::MaxFidelity => row.beta_max_fidelity,
    };
    let state = canonical_omegas(spectrum.omegas()).iter().map(|w| (-w).exp()).collect();
    let thermal = scenario
        .thermal()
        .mode_energies()
        .iter()
        .map(|&e| if e == 0.0 { 1.0 } else { (-beta * e).exp() })
        .collect();
    Ok(SpectrumTable {
        t,
        beta,
        fidelity: row.fidelity,
        state,
        thermal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub sample: usize,
    pub initial: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl ScatterPoint {
    fn from_record(sample: usize, r: &RunRecord) -> Self {
        Self {
            sample,
            initial: r.summary.initial_fidelity,
            mean: r.summary.window.mean,
            min: r.summary.window.min,
            max: r.summary.window.max,
        }
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterReport {
    pub points: Vec<ScatterPoint>,
    pub records: Vec<RunRecord>,
    pub improved: usize,
    pub fraction_improved: f64,
    pub confidence_interval: (f64, f64),
}

/// Samples evaluated at `t_start` and throughout the fidelity window.
pub fn windowed_runs(scenario: &Scenario, config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let patterns = sample_patterns(config, scenario.initial_basis())?;
    let table = scenario.propagators(&window_times(config))?;
    patterns
        .par_iter()
        .map(|p| scenario.run_sample(p, &table, config.beta_method, config.fidelity_window))
        .collect()
}

/// `F(0)` against the window average for every sample.
pub fn scatter_in_out(config: &ExperimentConfig) -> Result<ScatterReport> {
    let scenario = Scenario::from_config(config)?;
    let records = windowed_runs(&scenario, config)?;
    Ok(scatter_from_records(records))
}

pub fn scatter_from_records(records: Vec<RunRecord>) -> ScatterReport {
    let points: Vec<ScatterPoint> = records
        .iter()
        .enumerate()
        .map(|(i, r)| ScatterPoint::from_record(i, r))
        .collect();
    let improved = points.iter().filter(|p| p.mean >= p.initial).count();
    ScatterReport {
        fraction_improved: improved as f64 / points.len() as f64,
        confidence_interval: wilson_interval(improved, points.len()),
        improved,
        points,
        records,
    }
}

/// Coupled chain or chain with the subsystem boundary bond cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Coupled,
    Cut,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Coupled => "coupled",
            Variant::Cut => "cut",
        }
    }

    /// Evolution chain of this variant.
    pub fn chain(self, config: &ExperimentConfig) -> Result<ChainSpec> {
        match self {
            Variant::Coupled => Ok(config.spec.restore_bond(config.subsystem_size)),
            Variant::Cut => config.spec.cut_bond(config.subsystem_size),
        }
    }
}

/// Counts over equal-width bins covering `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(values: impl IntoIterator<Item = f64>, bin_width: f64) -> Self {
        let n_bins = ((1.0 / bin_width) - 1e-9).ceil().max(1.0) as usize;
        let mut counts = vec![0; n_bins];
        for v in values {
            let idx = ((v / bin_width).floor().max(0.0) as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
        Self { bin_width, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantHistogram {
    pub variant: Variant,
    pub records: Vec<RunRecord>,
    pub initial: Histogram,
    pub averaged: Histogram,
}

impl VariantHistogram {
    pub fn median_average_fidelity(&self) -> f64 {
        median(self.records.iter().map(|r| r.summary.window.mean).collect())
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Histograms of `F(0)` and `⟨F⟩` per variant, always starting from
/// eigenstates of the clean uncut chain.
pub fn fidelity_histogram(config: &ExperimentConfig, variants: &[Variant]) -> Result<Vec<VariantHistogram>> {
    variants
        .iter()
        .map(|&variant| {
            let cfg = config.with_spec(variant.chain(config)?);
            let scenario = Scenario::from_config(&cfg)?;
            let records = windowed_runs(&scenario, &cfg)?;
            let initial = Histogram::build(records.iter().map(|r| r.summary.initial_fidelity), cfg.bin_width);
            let averaged = Histogram::build(records.iter().map(|r| r.summary.window.mean), cfg.bin_width);
            Ok(VariantHistogram {
                variant,
                records,
                initial,
                averaged,
            })
        })
        .collect()
}

/// Cross-cut entropy under decoupled and coupled evolution of a state that
/// starts as a product across the subsystem boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    pub pattern: OccupationPattern,
    pub times: Vec<f64>,
    pub decoupled: Vec<f64>,
    pub coupled: Vec<f64>,
    pub max_decoupled: f64,
    pub max_coupled: f64,
}

/// The initial state is an eigenstate of the clean chain with the boundary
/// bond cut, hence a product across it.
pub fn product_state_check(config: &ExperimentConfig) -> Result<ProductReport> {
    let boundary = config.subsystem_size;
    let decoupled = config.spec.cut_bond(boundary)?;
    let coupled = config.spec.restore_bond(boundary);
    let initial_chain = decoupled.without_impurity();
    let traces = [decoupled, coupled]
        .into_iter()
        .map(|evolution| {
            let scenario = Scenario::new(
                evolution,
                initial_chain.clone(),
                config.subsystem_size,
                config.thermal_reference,
            )?;
            let pattern = sample_patterns(config, scenario.initial_basis())?.swap_remove(0);
            let table = scenario.propagators(&config.time_grid.times())?;
            let spectra = scenario.reduced_spectra(&scenario.initial_state(&pattern)?, &table)?;
            Ok((pattern, spectra.iter().map(|s| s.entropy()).collect::<Vec<f64>>()))
        })
        .collect::<Result<Vec<_>>>()?;
    let [(pattern, dec), (_, cou)]: [(OccupationPattern, Vec<f64>); 2] = traces.try_into().expect("two traces");
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(ProductReport {
        pattern,
        times: config.time_grid.times(),
        max_decoupled: max(&dec),
        max_coupled: max(&cou),
        decoupled: dec,
        coupled: cou,
    })
}

/// Mean and standard error.
pub fn mean_and_standard_error(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn stationary_without_impurity() {
        let c = small_config(
            "n_sites = 8\nimpurity_strength = 0\ninitial = 77_d\nt_end = 20\nwindow_start = 10\nwindow_end = 20\n",
        );
        let s = entropy_trace(&c).unwrap().entropies();
        assert!(s.iter().all(|x| (x - s[0]).abs() < 1e-9));
    }

    #[test]
    fn thermal_input_has_unit_fidelity() {
        let m = ThermalModel::new(vec![0.2, 0.9, 1.7]).unwrap();
        let omegas: Vec<f64> = m.mode_energies().iter().map(|e| 0.8 * e).collect();
        let s = ReducedSpectrum::from_omegas(&omegas).unwrap();
        let beta = m.fit_beta_eos(s.entropy()).unwrap();
        assert!((beta - 0.8).abs() < 1e-8);
        let f = m.classical_fidelity(&canonical_omegas(s.omegas()), beta).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn window_times_cover_interior() {
        let c = ExperimentConfig::defaults(10).unwrap();
        let t = window_times(&c);
        assert_eq!(t[0], 0.0);
        assert_eq!(t.len(), 1 + 99);
    }

    #[test]
    fn histogram_conserves_counts() {
        let h = Histogram::build([0.0, 0.005, 0.5, 0.999, 1.0], 0.01);
        assert_eq!(h.counts.len(), 100);
        assert_eq!(h.total(), 5);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[99], 2);
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(95, 100);
        assert!(lo > 0.88 && lo < 0.95 && hi > 0.95 && hi < 1.0);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn energy_filter_respected() {
        let c = small_config("n_sites = 12\nsamples = 5\nenergy_density_min = 0.6\n");
        let basis = diagonalize(&ChainSpec::uniform(12).unwrap().coupling()).unwrap();
        for p in sample_patterns(&c, &basis).unwrap() {
            assert!(p.excitation_energy(&basis) / 12.0 >= 0.6);
        }
    }

    #[test]
    fn full_subsystem_spectrum_is_pure() {
        let c = small_config("n_sites = 6\ninitial = 13_d\n");
        let scenario = Scenario::new(
            c.spec.clone(),
            ChainSpec::uniform(6).unwrap(),
            6,
            ThermalReference::ImpurityIncluded,
        )
        .unwrap();
        let table = spectrum_compare_in(&scenario, &c, 4.0).unwrap();
        assert!(table.state.iter().all(|&x| x < 1e-10 || (x - 1.0).abs() < 1e-10));
    }
}
