//! CSV rendering with fixed headers.
//!
//! Reals are written with 17 significant digits, which round-trips every
//! `f64` exactly, so identical runs give byte-identical files.

use std::fmt::Write;

use crate::experiments::{EntropyTrace, ProductReport, RunRecord, ScatterReport, SpectrumTable, VariantHistogram};

/// Round-trip-exact decimal form of `x`.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// `t,S,lambda_1..lambda_n`.
pub fn entropy_csv(trace: &EntropyTrace) -> String {
    let n = trace.spectra.first().map_or(0, |s| s.n_modes());
    let mut header = vec!["t".to_string(), "S".to_string()];
    header.extend((1..=n).map(|k| format!("lambda_{k}")));
    let mut out = String::new();
    push_row(&mut out, &header);
    for (t, s) in trace.times.iter().zip(&trace.spectra) {
        let mut row = vec![real(*t), real(s.entropy())];
        row.extend(s.lambdas().iter().map(|&l| real(l)));
        push_row(&mut out, &row);
    }
    out
}

pub const FIDELITY_HEADER: &str = "sample,t,S,beta_eos,beta_max_fidelity,F";

pub fn fidelity_csv(records: &[RunRecord]) -> String {
    let mut out = format!("{FIDELITY_HEADER}\n");
    for (i, r) in records.iter().enumerate() {
        for row in &r.rows {
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{}",
                real(row.t),
                real(row.entropy),
                real(row.beta_eos),
                real(row.beta_max_fidelity),
                real(row.fidelity)
            );
        }
    }
    out
}

pub const SUMMARY_HEADER: &str = "sample,pattern,F0,mean_F,min_F,max_F,mean_beta_eos,mean_beta_max_fidelity";

/// One line per sample; the pattern is written as its bit string.
pub fn summary_csv(records: &[RunRecord]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for (i, r) in records.iter().enumerate() {
        let s = &r.summary;
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{}",
            r.pattern,
            real(s.initial_fidelity),
            real(s.window.mean),
            real(s.window.min),
            real(s.window.max),
            real(s.mean_beta_eos),
            real(s.mean_beta_max_fidelity)
        );
    }
    out
}

pub const SPECTRUM_HEADER: &str = "k,exp_minus_omega,exp_minus_beta_e";

pub fn spectrum_csv(table: &SpectrumTable) -> String {
    let mut out = format!("{SPECTRUM_HEADER}\n");
    for (k, (s, th)) in table.state.iter().zip(&table.thermal).enumerate() {
        let _ = writeln!(out, "{},{},{}", k + 1, real(*s), real(*th));
    }
    out
}

pub fn spectrum_summary_csv(tables: &[SpectrumTable]) -> String {
    let mut out = String::from("t,beta,F,max_gap\n");
    for t in tables {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            real(t.t),
            real(t.beta),
            real(t.fidelity),
            real(t.max_gap())
        );
    }
    out
}

pub const SCATTER_HEADER: &str = "sample,F0,mean_F,min_F,max_F,diagonal";

/// `diagonal` repeats `F0`: the no-thermalization reference line.
pub fn scatter_csv(report: &ScatterReport) -> String {
    let mut out = format!("{SCATTER_HEADER}\n");
    for p in &report.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.sample,
            real(p.initial),
            real(p.mean),
            real(p.min),
            real(p.max),
            real(p.initial)
        );
    }
    out
}

pub fn scatter_stats_csv(report: &ScatterReport) -> String {
    format!(
        "samples,improved,fraction,ci_low,ci_high\n{},{},{},{},{}\n",
        report.points.len(),
        report.improved,
        real(report.fraction_improved),
        real(report.confidence_interval.0),
        real(report.confidence_interval.1)
    )
}

pub const HISTOGRAM_HEADER: &str = "variant,quantity,bin_low,bin_high,count";

pub fn histogram_csv(histograms: &[VariantHistogram]) -> String {
    let mut out = format!("{HISTOGRAM_HEADER}\n");
    for h in histograms {
        for (quantity, hist) in [("F0", &h.initial), ("mean_F", &h.averaged)] {
            for (b, count) in hist.counts.iter().enumerate() {
                let lo = b as f64 * hist.bin_width;
                let hi = (lo + hist.bin_width).min(1.0);
                let _ = writeln!(
                    out,
                    "{},{quantity},{},{},{count}",
                    h.variant.as_str(),
                    real(lo),
                    real(hi)
                );
            }
        }
    }
    out
}

pub const PRODUCT_HEADER: &str = "t,S_decoupled,S_coupled";

pub fn product_csv(report: &ProductReport) -> String {
    let mut out = format!("{PRODUCT_HEADER}\n");
    for ((t, d), c) in report.times.iter().zip(&report.decoupled).zip(&report.coupled) {
        let _ = writeln!(out, "{},{},{}", real(*t), real(*d), real(*c));
    }
    out
}
