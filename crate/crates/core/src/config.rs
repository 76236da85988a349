//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; the defaults depend on `n_sites`:
//!
//! | key | default |
//! |-----|---------|
//! | `n_sites` | 50 |
//! | `impurity_strength` | 1 |
//! | `impurity_site` | `n_sites / 2` |
//! | `cut_bonds` | empty (comma list) |
//! | `subsystem_size` | `n_sites / 2` |
//! | `initial` | `random`, or an occupation label such as `32_d` |
//! | `samples` | 1 |
//! | `seed` | 0 |
//! | `t_start`, `t_end`, `dt` | 0, 40, 0.1 |
//! | `window_start`, `window_end` | 30, 40 |
//! | `beta_method` | `equation_of_state` (or `max_fidelity`) |
//! | `thermal_reference` | `impurity_included` (or `impurity_excluded`) |
//! | `alpha_sweep` | empty (comma list of impurity sites) |
//! | `spectrum_times` | `0,30` |
//! | `bin_width` | 0.01 |
//! | `energy_density_min`, `energy_density_max` | unset |

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::chain::ChainSpec;
use crate::error::Error;
use crate::state::OccupationPattern;
use crate::thermal::BetaMethod;

pub const KEYS: &[&str] = &[
    "n_sites",
    "impurity_strength",
    "impurity_site",
    "cut_bonds",
    "subsystem_size",
    "initial",
    "samples",
    "seed",
    "t_start",
    "t_end",
    "dt",
    "window_start",
    "window_end",
    "beta_method",
    "thermal_reference",
    "alpha_sweep",
    "spectrum_times",
    "bin_width",
    "energy_density_min",
    "energy_density_max",
];

/// Every problem found in one configuration, in key order.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ConfigIssues(pub Vec<Error>);

impl ConfigIssues {
    pub fn keys(&self) -> Vec<&str> {
        self.0
            .iter()
            .filter_map(|e| match e {
                Error::Config { key, .. } => Some(key.as_str()),
                _ => None,
            })
            .collect()
    }
}

/// Which Hamiltonian supplies the thermal mode energies `E_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThermalReference {
    /// Sites `1..=N′` with the impurity kept when it lies inside.
    ImpurityIncluded,
    /// Sites `1..=N′` of the clean chain.
    ImpurityExcluded,
}

impl ThermalReference {
    pub fn as_str(self) -> &'static str {
        match self {
            ThermalReference::ImpurityIncluded => "impurity_included",
            ThermalReference::ImpurityExcluded => "impurity_excluded",
        }
    }

    pub fn reference_chain(self, spec: &ChainSpec, n_prime: usize) -> crate::Result<ChainSpec> {
        match self {
            ThermalReference::ImpurityIncluded => spec.subsystem(n_prime),
            ThermalReference::ImpurityExcluded => spec.without_impurity().subsystem(n_prime),
        }
    }
}

impl FromStr for ThermalReference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "impurity_included" => Ok(ThermalReference::ImpurityIncluded),
            "impurity_excluded" => Ok(ThermalReference::ImpurityExcluded),
            other => Err(format!(
                "expected impurity_included or impurity_excluded, got `{other}`"
            )),
        }
    }
}

/// Source of the initial quasiparticle pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialState {
    /// Fresh fair bits per sample, from stream `sample` of the master seed.
    Random,
    /// One fixed label, parsed by [`OccupationPattern::parse`].
    Label(String),
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Random => f.write_str("random"),
            InitialState::Label(l) => f.write_str(l),
        }
    }
}

/// Uniform sampling times `t_start + i·dt` up to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let steps = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=steps).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub spec: ChainSpec,
    pub initial: InitialState,
    pub samples: usize,
    pub subsystem_size: usize,
    pub time_grid: TimeGrid,
    pub fidelity_window: (f64, f64),
    pub beta_method: BetaMethod,
    pub thermal_reference: ThermalReference,
    pub seed: u64,
    pub alpha_sweep: Vec<usize>,
    pub spectrum_times: Vec<f64>,
    pub bin_width: f64,
    pub energy_density: (Option<f64>, Option<f64>),
}

fn issue(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Splits `key = value` lines, rejecting malformed ones.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigIssues> {
    let mut pairs = Vec::new();
    let mut issues = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
            None => issues.push(issue(
                &format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            )),
        }
    }
    if issues.is_empty() {
        Ok(pairs)
    } else {
        Err(ConfigIssues(issues))
    }
}

struct Fields<'a> {
    map: &'a BTreeMap<String, String>,
    issues: Vec<Error>,
}

impl Fields<'_> {
    fn get<T: FromStr>(&mut self, key: &str, default: T) -> T
    where
        T::Err: fmt::Display,
    {
        match self.map.get(key) {
            None => default,
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => v,
                Err(e) => {
                    self.issues.push(issue(key, format!("cannot parse `{raw}`: {e}")));
                    default
                }
            },
        }
    }

    fn get_opt<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.map.get(key)?;
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.issues.push(issue(key, format!("cannot parse `{raw}`: {e}")));
                None
            }
        }
    }

    fn get_list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Vec<T>
    where
        T::Err: fmt::Display,
    {
        let Some(raw) = self.map.get(key) else {
            return default;
        };
        let mut out = Vec::new();
        for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<T>() {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.issues
                        .push(issue(key, format!("cannot parse list item `{item}`: {e}")));
                    return default;
                }
            }
        }
        out
    }

    fn finite(&mut self, key: &str, default: f64) -> f64 {
        let v = self.get(key, default);
        if !v.is_finite() {
            self.issues.push(issue(key, "must be finite"));
            return default;
        }
        v
    }
}

impl ExperimentConfig {
    /// All defaults for a chain of `n_sites`.
    pub fn defaults(n_sites: usize) -> Result<Self, ConfigIssues> {
        Self::from_pairs(&[("n_sites".to_string(), n_sites.to_string())])
    }

    pub fn parse(text: &str) -> Result<Self, ConfigIssues> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    /// File contents followed by `overrides`; later keys win.
    pub fn from_sources(text: Option<&str>, overrides: &[(String, String)]) -> Result<Self, ConfigIssues> {
        let mut pairs = match text {
            Some(t) => parse_pairs(t)?,
            None => Vec::new(),
        };
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, ConfigIssues> {
        let mut issues = Vec::new();
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            if KEYS.contains(&k.as_str()) {
                map.insert(k.clone(), v.clone());
            } else {
                issues.push(issue(k, "unknown key"));
            }
        }
        let mut f = Fields { map: &map, issues };

        let n_sites = f.get("n_sites", 50usize);
        let half = (n_sites / 2).max(1);
        let delta = f.finite("impurity_strength", 1.0);
        let alpha = f.get("impurity_site", half);
        let cuts: Vec<usize> = f.get_list("cut_bonds", Vec::new());
        let subsystem_size = f.get("subsystem_size", half);
        let initial_raw: String = f.get("initial", "random".to_string());
        let samples = f.get("samples", 1usize);
        let seed = f.get("seed", 0u64);
        let t_start = f.finite("t_start", 0.0);
        let t_end = f.finite("t_end", 40.0);
        let dt = f.finite("dt", 0.1);
        let w1 = f.finite("window_start", 30.0);
        let w2 = f.finite("window_end", 40.0);
        let beta_method = f.get("beta_method", BetaMethod::EquationOfState);
        let thermal_reference = f.get("thermal_reference", ThermalReference::ImpurityIncluded);
        let alpha_sweep: Vec<usize> = f.get_list("alpha_sweep", Vec::new());
        let spectrum_times: Vec<f64> = f.get_list("spectrum_times", vec![0.0, 30.0]);
        let bin_width = f.finite("bin_width", 0.01);
        let e_min: Option<f64> = f.get_opt("energy_density_min");
        let e_max: Option<f64> = f.get_opt("energy_density_max");
        let mut issues = f.issues;

        let spec = match ChainSpec::new(n_sites, delta, alpha, cuts) {
            Ok(s) => Some(s),
            Err(e) => {
                let key = match &e {
                    Error::Validation(m) if m.contains("n_sites") => "n_sites",
                    Error::Validation(m) if m.contains("impurity_strength") => "impurity_strength",
                    Error::Validation(m) if m.contains("impurity_site") => "impurity_site",
                    _ => "cut_bonds",
                };
                issues.push(issue(key, e.to_string()));
                None
            }
        };
        if subsystem_size < 1 || subsystem_size >= n_sites {
            issues.push(issue(
                "subsystem_size",
                format!("must lie in [1, {}]", n_sites.saturating_sub(1)),
            ));
        }
        let initial = if initial_raw == "random" {
            InitialState::Random
        } else {
            if let Err(e) = OccupationPattern::parse(&initial_raw, n_sites) {
                issues.push(issue("initial", e.to_string()));
            }
            InitialState::Label(initial_raw)
        };
        if samples < 1 {
            issues.push(issue("samples", "must be at least 1"));
        }
        if dt <= 0.0 {
            issues.push(issue("dt", "must be positive"));
        }
        if t_start > w1 {
            issues.push(issue("window_start", "must not precede t_start"));
        }
        if w1 >= w2 {
            issues.push(issue("window_end", "must exceed window_start"));
        }
        if w2 > t_end {
            issues.push(issue("window_end", "must not exceed t_end"));
        }
        if let Some(&a) = alpha_sweep.iter().find(|&&a| a < 1 || a > n_sites) {
            issues.push(issue("alpha_sweep", format!("site {a} outside [1, {n_sites}]")));
        }
        if spectrum_times.iter().any(|t| !t.is_finite()) {
            issues.push(issue("spectrum_times", "must be finite"));
        }
        if bin_width <= 0.0 || bin_width > 1.0 {
            issues.push(issue("bin_width", "must lie in (0, 1]"));
        }
        if let (Some(a), Some(b)) = (e_min, e_max) {
            if a > b {
                issues.push(issue("energy_density_max", "must not be below energy_density_min"));
            }
        }

        if !issues.is_empty() {
            return Err(ConfigIssues(issues));
        }
        Ok(Self {
            spec: spec.expect("spec validated above"),
            initial,
            samples,
            subsystem_size,
            time_grid: TimeGrid {
                start: t_start,
                end: t_end,
                step: dt,
            },
            fidelity_window: (w1, w2),
            beta_method,
            thermal_reference,
            seed,
            alpha_sweep,
            spectrum_times,
            bin_width,
            energy_density: (e_min, e_max),
        })
    }

    /// Fully defaulted configuration text; parsing it yields `self` again.
    pub fn to_config_string(&self) -> String {
        let list = |v: &[String]| v.join(",");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("n_sites", self.spec.n_sites().to_string());
        kv("impurity_strength", self.spec.impurity_strength().to_string());
        kv("impurity_site", self.spec.impurity_site().to_string());
        kv(
            "cut_bonds",
            list(&self.spec.cut_bonds().iter().map(|b| b.to_string()).collect::<Vec<_>>()),
        );
        kv("subsystem_size", self.subsystem_size.to_string());
        kv("initial", self.initial.to_string());
        kv("samples", self.samples.to_string());
        kv("seed", self.seed.to_string());
        kv("t_start", self.time_grid.start.to_string());
        kv("t_end", self.time_grid.end.to_string());
        kv("dt", self.time_grid.step.to_string());
        kv("window_start", self.fidelity_window.0.to_string());
        kv("window_end", self.fidelity_window.1.to_string());
        kv("beta_method", self.beta_method.as_str().to_string());
        kv("thermal_reference", self.thermal_reference.as_str().to_string());
        kv(
            "alpha_sweep",
            list(&self.alpha_sweep.iter().map(|a| a.to_string()).collect::<Vec<_>>()),
        );
        kv(
            "spectrum_times",
            list(&self.spectrum_times.iter().map(|t| t.to_string()).collect::<Vec<_>>()),
        );
        kv("bin_width", self.bin_width.to_string());
        if let Some(v) = self.energy_density.0 {
            kv("energy_density_min", v.to_string());
        }
        if let Some(v) = self.energy_density.1 {
            kv("energy_density_max", v.to_string());
        }
        s
    }

    /// Same configuration on a different chain.
    pub fn with_spec(&self, spec: ChainSpec) -> Self {
        Self { spec, ..self.clone() }
    }
}
