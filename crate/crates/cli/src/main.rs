//! `isingquench`: run experiments and write CSV artifacts plus a manifest.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad configuration or usage,
//! 3 numerical-integrity failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use isingquench_core::config::{ConfigIssues, ExperimentConfig};
use isingquench_core::experiments::{self, Variant};
use isingquench_core::oracle::oracle_check;
use isingquench_core::output;
use isingquench_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "isingquench",
    version,
    about = "Quench dynamics and thermalization of an Ising chain with an impurity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[arg(
        long,
        global = true,
        env = "ISINGQUENCH_OUTPUT_DIR",
        default_value = "isingquench-out"
    )]
    output_dir: PathBuf,
    /// Master seed; takes precedence over the `seed` key.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Subsystem entropy over time, one file per impurity site.
    EntropyTrace,
    /// Fidelity with the fitted thermal state over time.
    FidelityTrace,
    /// Sorted state and thermal spectra at the configured times.
    SpectrumCompare {
        /// Comma-separated times; defaults to `spectrum_times`.
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
    },
    /// Initial against window-averaged fidelity per sample.
    Scatter,
    /// Fidelity histograms for the coupled and cut chains.
    Histogram {
        #[arg(long, value_delimiter = ',', default_values = ["coupled", "cut"])]
        variants: Vec<VariantArg>,
    },
    /// Cross-cut entropy of a product state under decoupled dynamics.
    ProductCheck,
    /// Compare the Gaussian pipeline against dense diagonalization.
    OracleCheck {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EntropyTrace => "entropy-trace",
            Command::FidelityTrace => "fidelity-trace",
            Command::SpectrumCompare { .. } => "spectrum-compare",
            Command::Scatter => "scatter",
            Command::Histogram { .. } => "histogram",
            Command::ProductCheck => "product-check",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Coupled,
    Cut,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Coupled => Variant::Coupled,
            VariantArg::Cut => Variant::Cut,
        }
    }
}

enum Failure {
    Config(ConfigIssues),
    Usage(String),
    Core(Error),
    Io(String),
    Oracle(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<ConfigIssues> for Failure {
    fn from(e: ConfigIssues) -> Self {
        Failure::Config(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Usage(_) => 2,
            Failure::Core(Error::Config { .. } | Error::Validation(_)) => 2,
            Failure::Core(Error::NumericalIntegrity(_)) | Failure::Oracle(_) => 3,
            Failure::Core(_) | Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(issues) => issues.to_string(),
            Failure::Usage(m) | Failure::Io(m) | Failure::Oracle(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    seed: u64,
    config_sha256: String,
    config: &'a str,
    files: &'a [String],
    wall_time_seconds: f64,
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: String, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(&name);
        fs::write(&path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(name);
        Ok(())
    }
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>, Failure> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure::Usage(format!("override `{s}` is not KEY=VALUE")))
        })
        .collect()
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let text = match &cli.config {
        Some(path) => {
            Some(fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?)
        }
        None => None,
    };
    let mut overrides = parse_overrides(&cli.overrides)?;
    if let Some(seed) = cli.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    Ok(ExperimentConfig::from_sources(text.as_deref(), &overrides)?)
}

/// File-name form of a time: `30` or `30.5`.
fn time_tag(t: f64) -> String {
    format!("{t}").replace('-', "m")
}

fn run(cli: &Cli, out: &mut Artifacts, config: &ExperimentConfig) -> Result<(), Failure> {
    match &cli.command {
        Command::EntropyTrace => {
            for trace in experiments::entropy_sweep(config)? {
                out.write(
                    format!("entropy_alpha{}.csv", trace.impurity_site),
                    &output::entropy_csv(&trace),
                )?;
            }
        }
        Command::FidelityTrace => {
            let records = experiments::fidelity_trace(config)?;
            out.write("fidelity.csv".into(), &output::fidelity_csv(&records))?;
            out.write("summary.csv".into(), &output::summary_csv(&records))?;
        }
        Command::SpectrumCompare { times } => {
            let times = if times.is_empty() {
                &config.spectrum_times
            } else {
                times
            };
            let scenario = experiments::Scenario::from_config(config)?;
            let tables = times
                .iter()
                .map(|&t| experiments::spectrum_compare_in(&scenario, config, t))
                .collect::<Result<Vec<_>, _>>()?;
            for table in &tables {
                out.write(
                    format!("spectrum_t{}.csv", time_tag(table.t)),
                    &output::spectrum_csv(table),
                )?;
            }
            out.write("spectrum_summary.csv".into(), &output::spectrum_summary_csv(&tables))?;
        }
        Command::Scatter => {
            let report = experiments::scatter_in_out(config)?;
            out.write("scatter.csv".into(), &output::scatter_csv(&report))?;
            out.write("scatter_stats.csv".into(), &output::scatter_stats_csv(&report))?;
            println!(
                "{}/{} samples improved, 95% CI [{:.3}, {:.3}]",
                report.improved,
                report.points.len(),
                report.confidence_interval.0,
                report.confidence_interval.1
            );
        }
        Command::Histogram { variants } => {
            let variants: Vec<Variant> = variants.iter().map(|&v| v.into()).collect();
            let histograms = experiments::fidelity_histogram(config, &variants)?;
            out.write("histogram.csv".into(), &output::histogram_csv(&histograms))?;
            for h in &histograms {
                out.write(
                    format!("summary_{}.csv", h.variant.as_str()),
                    &output::summary_csv(&h.records),
                )?;
                println!(
                    "{}: median <F> = {:.6}",
                    h.variant.as_str(),
                    h.median_average_fidelity()
                );
            }
        }
        Command::ProductCheck => {
            let report = experiments::product_state_check(config)?;
            out.write("product.csv".into(), &output::product_csv(&report))?;
            println!(
                "max cross-cut entropy: decoupled {:.3e}, coupled {:.3e}",
                report.max_decoupled, report.max_coupled
            );
        }
        Command::OracleCheck { max_n } => {
            let cases = oracle_check(*max_n)?;
            let mut csv =
                String::from("n_sites,impurity_strength,impurity_site,cut_bonds,spectrum,correlation,entropy\n");
            let mut worst = 0.0f64;
            for c in &cases {
                let cuts: Vec<String> = c.spec.cut_bonds().iter().map(|b| b.to_string()).collect();
                println!(
                    "N={} delta={} alpha={} cuts=[{}]: max deviation {:.3e}",
                    c.spec.n_sites(),
                    c.spec.impurity_strength(),
                    c.spec.impurity_site(),
                    cuts.join(" "),
                    c.max_deviation()
                );
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    c.spec.n_sites(),
                    output::real(c.spec.impurity_strength()),
                    c.spec.impurity_site(),
                    cuts.join(" "),
                    output::real(c.spectrum),
                    output::real(c.correlation),
                    output::real(c.entropy)
                ));
                worst = worst.max(c.max_deviation());
            }
            out.write("oracle.csv".into(), &csv)?;
            if worst > 1e-8 {
                return Err(Failure::Oracle(format!("oracle deviation {worst:.3e} exceeds 1e-8")));
            }
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let config = load_config(cli)?;
    let mut out = Artifacts::new(&cli.output_dir)?;
    let result = run(cli, &mut out, &config);
    let echo = config.to_config_string();
    let manifest = Manifest {
        tool: "isingquench",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name(),
        seed: config.seed,
        config_sha256: Sha256::digest(echo.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect(),
        config: &echo,
        files: &out.files,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(out.dir.join("manifest.json"), json + "\n").map_err(|e| Failure::Io(e.to_string()))?;
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("isingquench {}: {}", cli.command.name(), f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
