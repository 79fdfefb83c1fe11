//! Seeded Monte-Carlo trials compared against a predicted law.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::predict::{select_prediction, LawParams, Prediction};
use crate::ensemble::{normalized_from_covariance, sample_data_matrix, truncated_covariance, KernelSpec, Regime};
use crate::error::{Result, RmtError};
use crate::exec::Exec;
use crate::laws::{linear_grid, InversionReport, LawSpec, LawTable, SolverOptions};
use crate::rng::{stream_seed, Stream};
use crate::spectra::{
    histogram, ks_distance, symmetric_eigenvalues, wasserstein2, esd, EmpiricalSpectrum, Histogram, SourceMeta,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W2Pair {
    pub i: usize,
    pub j: usize,
    pub w2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolverStats {
    pub max_residual: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl SpectrumSummary {
    pub fn of(s: &EmpiricalSpectrum) -> Self {
        Self { count: s.len(), mean: s.mean(), variance: s.variance(), min: s.min(), max: s.max() }
    }
}

/// Why the predicted law could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawFailureKind {
    Solver,
    Inversion,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawFailure {
    pub kind: LawFailureKind,
    pub message: String,
}

/// Outcome of one experiment. Deterministic given the config; wall-clock
/// time is kept out of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub config: ExperimentConfig,
    pub kernel: String,
    pub per_trial_ks: Vec<f64>,
    pub pooled_ks: Option<f64>,
    pub w2_pairs: Vec<W2Pair>,
    pub law_params: LawParams,
    pub solver: SolverStats,
    pub inversion: Option<InversionReport>,
    pub pooled_spectrum: SpectrumSummary,
    pub law_failure: Option<LawFailure>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ComparisonReport,
    pub trials: Vec<EmpiricalSpectrum>,
    pub pooled: EmpiricalSpectrum,
    pub histogram: Histogram,
    pub law: Option<LawSpec>,
    pub law_table: Option<LawTable>,
    pub runtime_seconds: f64,
}

pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const LAW_FILE: &str = "law.csv";
pub const REPORT_FILE: &str = "report.json";
pub const TIMING_FILE: &str = "timing.json";

/// Runs the experiment described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let kernel = cfg.kernel.build(cfg.p, cfg.sigma)?;
    run_experiment_with_kernel(cfg, &kernel, exec)
}

/// As [`run_experiment`] with an explicit kernel (e.g. a custom one); the
/// config's kernel section is then only echoed.
pub fn run_experiment_with_kernel(cfg: &ExperimentConfig, kernel: &KernelSpec, exec: Exec) -> Result<ExperimentOutput> {
    let start = Instant::now();
    cfg.regime_config()?;
    let prediction = select_prediction(cfg, kernel)?;
    let trials = simulate_trials(cfg, kernel, prediction.params.alpha_p.value, exec)?;
    let pooled = EmpiricalSpectrum::pooled(&trials)?;
    let hist = histogram(&pooled, cfg.histogram.bins, None)?;

    let (law_table, law_failure) = match &prediction.law {
        None => (None, None),
        Some(law) => match tabulate(cfg, law, exec) {
            Ok(t) => (Some(t), None),
            Err(e) => (None, Some(classify(e))),
        },
    };

    let (per_trial_ks, pooled_ks) = match &law_table {
        Some(t) => {
            let per = exec.map_slice(&trials, |s| ks_distance(s, |x| t.cdf_at(x)));
            (per, Some(ks_distance(&pooled, |x| t.cdf_at(x))))
        }
        None => (Vec::new(), None),
    };
    let pairs: Vec<(usize, usize)> =
        (0..trials.len()).flat_map(|i| (i + 1..trials.len()).map(move |j| (i, j))).collect();
    let w2_pairs = exec.try_map(pairs.len(), |k| {
        let (i, j) = pairs[k];
        wasserstein2(&trials[i], &trials[j]).map(|w2| W2Pair { i, j, w2 })
    })?;
    let inversion = law_table.as_ref().and_then(|t| t.inversion.clone());
    let solver = inversion
        .as_ref()
        .map(|i| SolverStats { max_residual: i.max_residual, max_iters: i.max_iterations })
        .unwrap_or_default();
    let Prediction { law, params } = prediction;
    let report = ComparisonReport {
        config: cfg.clone(),
        kernel: kernel.tag(),
        per_trial_ks,
        pooled_ks,
        w2_pairs,
        law_params: params,
        solver,
        inversion,
        pooled_spectrum: SpectrumSummary::of(&pooled),
        law_failure,
    };
    Ok(ExperimentOutput {
        report,
        trials,
        pooled,
        histogram: hist,
        law,
        law_table,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// One ESD per trial, each from its own data stream.
pub fn simulate_trials(cfg: &ExperimentConfig, kernel: &KernelSpec, alpha_p: f64, exec: Exec) -> Result<Vec<EmpiricalSpectrum>> {
    exec.try_map(cfg.trials, |t| {
        let seed = stream_seed(cfg.master_seed, Stream::Data, t as u64);
        let x = sample_data_matrix(cfg.p, cfg.n, cfg.entry_law, cfg.sigma, seed)?;
        let m = truncated_covariance(&x, kernel)?;
        let m = match cfg.regime {
            Regime::Proportional => m,
            Regime::SemiHighDim => normalized_from_covariance(&m, cfg.n, alpha_p, cfg.sigma)?,
        };
        let spec = esd(symmetric_eigenvalues(&m.view())?)?;
        Ok(spec.with_meta(SourceMeta { p: cfg.p, n: cfg.n, kernel: kernel.tag(), seed }))
    })
}

fn tabulate(cfg: &ExperimentConfig, law: &LawSpec, exec: Exec) -> Result<LawTable> {
    let (lo, hi) = law.default_range();
    let st = &cfg.stieltjes;
    let grid = linear_grid(st.x_lo.unwrap_or(lo), st.x_hi.unwrap_or(hi), st.points)?;
    law.tabulate(&grid, &st.v_schedule, &SolverOptions::default(), exec)
}

fn classify(e: RmtError) -> LawFailure {
    let kind = match e {
        RmtError::SolverFailure { .. } => LawFailureKind::Solver,
        RmtError::InversionQuality { .. } => LawFailureKind::Inversion,
        _ => LawFailureKind::Other,
    };
    LawFailure { kind, message: e.to_string() }
}

impl ExperimentOutput {
    /// Writes histogram.csv, law.csv (when a law was tabulated), report.json
    /// and timing.json into `dir`.
    pub fn write_artifacts(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(HISTOGRAM_FILE), histogram_csv(&self.histogram))?;
        if let Some(t) = &self.law_table {
            std::fs::write(dir.join(LAW_FILE), law_csv(&t.x, &t.density, &t.cdf))?;
        }
        std::fs::write(dir.join(REPORT_FILE), to_json(&self.report)?)?;
        let timing = serde_json::json!({ "runtime_seconds": self.runtime_seconds });
        std::fs::write(dir.join(TIMING_FILE), to_json(&timing)?)?;
        Ok(())
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,density\n");
    for (k, d) in h.densities.iter().enumerate() {
        writeln!(out, "{},{},{}", h.bin_edges[k], h.bin_edges[k + 1], d).unwrap();
    }
    out
}

pub fn law_csv(x: &[f64], density: &[f64], cdf: &[f64]) -> String {
    let mut out = String::from("x,density,cdf\n");
    for ((x, d), c) in x.iter().zip(density).zip(cdf) {
        writeln!(out, "{x},{d},{c}").unwrap();
    }
    out
}

/// Trapezoid mass of a density column; used to sanity-check emitted CSVs.
pub fn trapezoid_mass(x: &[f64], density: &[f64]) -> f64 {
    x.windows(2).zip(density.windows(2)).map(|(xs, ds)| 0.5 * (ds[0] + ds[1]) * (xs[1] - xs[0])).sum()
}
