//! Pass/fail thresholds applied by `rmt --check`.

use serde::{Deserialize, Serialize};

use super::diagnostics::DiagnosticsOutput;
use super::experiment::ComparisonReport;
use super::figures::{Figure1Output, Figure2Output, SemicircleOutput};

/// KS bound for MP and semicircle comparisons.
pub const KS_CLOSED_FORM: f64 = 0.08;
/// KS bound for comparisons with the generalized MP law.
pub const KS_GENERALIZED: f64 = 0.10;
/// Relative tolerance for the pooled mean eigenvalue against σ²E[ζ].
pub const MEAN_RELATIVE: f64 = 0.05;
/// Required share of runs with max|ξ′ᵢ|/n under √(6 log n/n).
pub const XI_BOUND_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckLine {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value >= threshold }
    }
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {:.5} (threshold {})", self.name, self.value, self.threshold)
    }
}

pub fn check_report(r: &ComparisonReport) -> Vec<CheckLine> {
    let mut lines = Vec::new();
    if let Some(ks) = r.pooled_ks {
        let bound = if r.law_params.law.as_deref() == Some("genmp") { KS_GENERALIZED } else { KS_CLOSED_FORM };
        lines.push(CheckLine::at_most("pooled KS", ks, bound));
    }
    if let (Some(pred), Some(zeta)) = (r.law_params.predicted_mean, r.law_params.zeta_mean) {
        if zeta > 0.0 {
            let rel = (r.pooled_spectrum.mean - pred).abs() / pred;
            lines.push(CheckLine::at_most("mean eigenvalue relative error", rel, MEAN_RELATIVE));
        }
    }
    if r.law_failure.is_some() {
        lines.push(CheckLine { name: "law evaluated".into(), value: 0.0, threshold: 1.0, pass: false });
    }
    lines
}

pub fn check_figure1(f: &Figure1Output) -> Vec<CheckLine> {
    f.runs.iter().flat_map(|r| prefixed(&format!("beta={}", fmt_beta(r)), check_report(&r.report))).collect()
}

fn fmt_beta(r: &super::experiment::ExperimentOutput) -> String {
    let cfg = &r.report.config.kernel;
    cfg.beta.map(|b| b.to_string()).unwrap_or_default()
}

pub fn check_figure2(f: &Figure2Output) -> Vec<CheckLine> {
    f.panels
        .iter()
        .map(|p| CheckLine::at_most(format!("tau={} KS vs MP(c, alpha^2 sigma^2)", p.tau), p.ks_alpha_squared, KS_CLOSED_FORM))
        .collect()
}

pub fn check_semicircle(s: &SemicircleOutput) -> Vec<CheckLine> {
    check_report(&s.run.report)
}

pub fn check_diagnostics(d: &DiagnosticsOutput) -> Vec<CheckLine> {
    vec![
        CheckLine::at_least("median W2(M, Mbar) strictly decreasing", d.verdict.w2_decreasing as u8 as f64, 1.0),
        CheckLine::at_least("share within xi-prime bound", d.verdict.fraction_within_bound, XI_BOUND_FRACTION),
    ]
}

fn prefixed(prefix: &str, lines: Vec<CheckLine>) -> Vec<CheckLine> {
    lines.into_iter().map(|mut l| {
        l.name = format!("{prefix} {}", l.name);
        l
    }).collect()
}
