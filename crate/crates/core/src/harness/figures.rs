//! Desk-scale reproductions of the indicator-kernel and gaussian-kernel
//! spectrum figures, and the semicircle experiment.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::config::{ext_float, ExperimentConfig, KernelConfig, LawConfig, SmoothScale};
use super::experiment::{law_csv, run_experiment, to_json, ExperimentOutput};
use crate::ensemble::{alpha_gaussian_limit, z_alpha_from_beta, EntryLaw, KernelSpec, KernelVariant, Regime};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::laws::{linear_grid, MPLaw, SCLaw};
use crate::spectra::{ks_distance, EmpiricalSpectrum};

/// Shared knobs for the figure drivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    pub p: usize,
    pub n: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub bins: usize,
    pub points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { p: 200, n: 500, sigma: 1.0, trials: 5, seed: 0, bins: 60, points: 400 }
    }
}

impl FigureOptions {
    fn config(&self, kernel: KernelConfig) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(self.p, self.n, kernel);
        cfg.sigma = self.sigma;
        cfg.trials = self.trials;
        cfg.master_seed = self.seed;
        cfg.histogram.bins = self.bins;
        cfg.stieltjes.points = self.points;
        cfg
    }

    fn c(&self) -> f64 {
        self.p as f64 / self.n as f64
    }
}

pub const FIGURE1_BETAS: [f64; 4] = [-0.1, 0.1, 0.3, f64::INFINITY];
pub const FIGURE2_TAUS: [f64; 4] = [0.4, 0.7, 1.0, 1.3];

/// Label used in directory names, e.g. `beta_-0.1`, `beta_inf`.
fn label(prefix: &str, v: f64) -> String {
    if v.is_infinite() {
        format!("{prefix}_inf")
    } else {
        format!("{prefix}_{v}")
    }
}

/// Grid spanning [0, 1.05·b] for MP overlays.
fn overlay(law: &MPLaw, hi: f64, points: usize) -> Result<String> {
    let x = linear_grid(0.0, hi, points)?;
    let d: Vec<f64> = x.iter().map(|&v| law.density(v)).collect();
    let c: Vec<f64> = x.iter().map(|&v| law.cdf(v)).collect();
    Ok(law_csv(&x, &d, &c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Panel {
    #[serde(with = "ext_float")]
    pub beta: Option<f64>,
    #[serde(with = "ext_float")]
    pub z_alpha: Option<f64>,
    /// KS against the panel's predicted law (generalized MP for finite β).
    pub pooled_ks: Option<f64>,
    /// KS against MP(c, σ²).
    pub ks_vs_mp: f64,
    pub pooled_mean: f64,
    /// σ² E[ζ] (σ² for β = ∞).
    pub predicted_mean: Option<f64>,
    pub mean_relative_error: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Figure1Output {
    pub options: FigureOptions,
    pub panels: Vec<Figure1Panel>,
    pub runs: Vec<ExperimentOutput>,
    pub mp: MPLaw,
}

/// One indicator-kernel panel per β with r(β) = √((2 + β)σ²p), each with its
/// predicted law, plus the MP(c, σ²) overlay.
pub fn figure1(opts: &FigureOptions, betas: &[f64], exec: Exec) -> Result<Figure1Output> {
    let mp = MPLaw::new(opts.c(), opts.sigma * opts.sigma)?;
    let mut runs = Vec::with_capacity(betas.len());
    let mut panels = Vec::with_capacity(betas.len());
    for &beta in betas {
        let out = run_experiment(&opts.config(KernelConfig::indicator_beta(beta)), exec)?;
        let pooled_mean = out.pooled.mean();
        let predicted = out.report.law_params.predicted_mean;
        panels.push(Figure1Panel {
            beta: Some(beta),
            z_alpha: Some(z_alpha_from_beta(beta, opts.p)),
            pooled_ks: out.report.pooled_ks,
            ks_vs_mp: ks_distance(&out.pooled, |x| mp.cdf(x)),
            pooled_mean,
            predicted_mean: predicted,
            mean_relative_error: predicted.map(|m| (pooled_mean - m) / m),
        });
        runs.push(out);
    }
    Ok(Figure1Output { options: opts.clone(), panels, runs, mp })
}

impl Figure1Output {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (panel, run) in self.panels.iter().zip(&self.runs) {
            run.write_artifacts(&dir.join(label("beta", panel.beta.unwrap())))?;
        }
        let (_, b) = self.mp.edges();
        std::fs::write(dir.join("mp_overlay.csv"), overlay(&self.mp, 1.05 * b, self.options.points)?)?;
        let summary = serde_json::json!({ "options": self.options, "panels": self.panels });
        std::fs::write(dir.join("summary.json"), to_json(&summary)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Panel {
    pub tau: f64,
    /// α = 1 − exp(−σ²/τ²).
    pub alpha_limit: f64,
    pub alpha_p: f64,
    /// KS against MP(c, α²σ²).
    pub ks_alpha_squared: f64,
    /// KS against MP(c, ασ²).
    pub ks_alpha: f64,
    /// KS against MP(c, α_p σ²), the harness prediction.
    pub pooled_ks: Option<f64>,
    /// KS against MP(c, σ²).
    pub ks_unit: f64,
    pub pooled_max: f64,
    pub edge_alpha_squared: f64,
    pub edge_alpha: f64,
}

#[derive(Debug, Clone)]
pub struct Figure2Output {
    pub options: FigureOptions,
    pub panels: Vec<Figure2Panel>,
    pub runs: Vec<ExperimentOutput>,
}

/// One gaussian-kernel panel per τ, compared with MP(c, σ²), MP(c, α²σ²)
/// and MP(c, ασ²).
pub fn figure2(opts: &FigureOptions, taus: &[f64], exec: Exec) -> Result<Figure2Output> {
    let c = opts.c();
    let s2 = opts.sigma * opts.sigma;
    let unit = MPLaw::new(c, s2)?;
    let mut runs = Vec::with_capacity(taus.len());
    let mut panels = Vec::with_capacity(taus.len());
    for &tau in taus {
        let mut cfg = opts.config(KernelConfig::gaussian(tau));
        cfg.law = LawConfig::Auto { smooth_scale: SmoothScale::Alpha };
        let out = run_experiment(&cfg, exec)?;
        let a = alpha_gaussian_limit(opts.sigma, tau);
        let sq = MPLaw::new(c, a * a * s2)?;
        let lin = MPLaw::new(c, a * s2)?;
        panels.push(Figure2Panel {
            tau,
            alpha_limit: a,
            alpha_p: out.report.law_params.alpha_p.value,
            ks_alpha_squared: ks_distance(&out.pooled, |x| sq.cdf(x)),
            ks_alpha: ks_distance(&out.pooled, |x| lin.cdf(x)),
            pooled_ks: out.report.pooled_ks,
            ks_unit: ks_distance(&out.pooled, |x| unit.cdf(x)),
            pooled_max: out.pooled.max(),
            edge_alpha_squared: sq.edges().1,
            edge_alpha: lin.edges().1,
        });
        runs.push(out);
    }
    Ok(Figure2Output { options: opts.clone(), panels, runs })
}

impl Figure2Output {
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let c = self.options.c();
        let s2 = self.options.sigma * self.options.sigma;
        let unit = MPLaw::new(c, s2)?;
        let hi = 1.05 * unit.edges().1;
        std::fs::write(dir.join("mp_unit.csv"), overlay(&unit, hi, self.options.points)?)?;
        for (panel, run) in self.panels.iter().zip(&self.runs) {
            let sub = dir.join(label("tau", panel.tau));
            run.write_artifacts(&sub)?;
            let a = panel.alpha_limit;
            std::fs::write(sub.join("mp_alpha_squared.csv"), overlay(&MPLaw::new(c, a * a * s2)?, hi, self.options.points)?)?;
            std::fs::write(sub.join("mp_alpha.csv"), overlay(&MPLaw::new(c, a * s2)?, hi, self.options.points)?)?;
        }
        let summary = serde_json::json!({ "options": self.options, "panels": self.panels });
        std::fs::write(dir.join("summary.json"), to_json(&summary)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemicircleOptions {
    pub p: usize,
    pub n: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub kernel: KernelConfig,
    pub bins: usize,
    pub points: usize,
}

impl Default for SemicircleOptions {
    fn default() -> Self {
        Self {
            p: 400,
            n: 20_000,
            sigma: 1.0,
            trials: 3,
            seed: 0,
            kernel: KernelConfig::indicator_z_alpha(0.0),
            bins: 60,
            points: 400,
        }
    }
}

/// Finite-n centering check: E is centered at α_p σ², while the exact mean of
/// diag(M) is γσ² with γ computed here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringDiagnostic {
    /// E[M]/σ² per diagonal entry.
    pub gamma: f64,
    /// √(n/p)(α_p − γ)σ², the offset this induces in the spectrum of E.
    pub offset: f64,
    /// KS of the ESD shifted by `offset` against the predicted semicircle.
    pub ks_recentered: f64,
    /// KS of the recentered ESD against a semicircle with its own variance.
    pub ks_recentered_own_variance: f64,
    pub recentered_variance: f64,
}

#[derive(Debug, Clone)]
pub struct SemicircleOutput {
    pub options: SemicircleOptions,
    pub run: ExperimentOutput,
    /// max |ϖ²s² + zs + 1| over a grid in ℂ⁺ for the predicted law.
    pub sc_residual: f64,
    pub centering: Option<CenteringDiagnostic>,
}

/// E = √(n/p)(M − α_p σ² I) against SC with ϖ = β_p σ², requiring p² > n.
pub fn semicircle_experiment(opts: &SemicircleOptions, exec: Exec) -> Result<SemicircleOutput> {
    if (opts.p as u128) * (opts.p as u128) <= opts.n as u128 {
        return invalid(format!("semicircle regime needs p² > n (p={}, n={})", opts.p, opts.n));
    }
    let mut cfg = ExperimentConfig::new(opts.p, opts.n, opts.kernel.clone());
    cfg.regime = Regime::SemiHighDim;
    cfg.sigma = opts.sigma;
    cfg.trials = opts.trials;
    cfg.master_seed = opts.seed;
    cfg.histogram.bins = opts.bins;
    cfg.stieltjes.points = opts.points;
    let run = run_experiment(&cfg, exec)?;

    let variance = run.report.law_params.variance.expect("semicircle prediction");
    let sc = SCLaw::new(variance)?;
    let sc_residual = (0..100)
        .map(|k| {
            let z = Complex64::new(-3.0 * sc.edge() + 0.06 * sc.edge() * k as f64, 0.01 + 0.02 * k as f64);
            let s = sc.stieltjes(z).expect("Im z > 0");
            (variance * s * s + z * s + 1.0).norm()
        })
        .fold(0.0, f64::max);

    let kernel = opts.kernel.build(opts.p, opts.sigma)?;
    let centering = finite_n_centering(&kernel, EntryLaw::Gaussian, opts.sigma, opts.n).map(|gamma| {
        let alpha = run.report.law_params.alpha_p.value;
        let offset = (opts.n as f64 / opts.p as f64).sqrt() * (alpha - gamma) * opts.sigma * opts.sigma;
        let shifted = shift(&run.pooled, offset);
        let own = SCLaw::new(shifted.variance()).expect("positive variance");
        CenteringDiagnostic {
            gamma,
            offset,
            ks_recentered: ks_distance(&shifted, |x| sc.cdf(x)),
            ks_recentered_own_variance: ks_distance(&shifted, |x| own.cdf(x)),
            recentered_variance: shifted.variance(),
        }
    });
    Ok(SemicircleOutput { options: opts.clone(), run, sc_residual, centering })
}

fn shift(s: &EmpiricalSpectrum, by: f64) -> EmpiricalSpectrum {
    crate::spectra::esd(s.eigenvalues().iter().map(|v| v + by).collect()).expect("nonempty")
}

/// γ with E[M] = γσ² I for Gaussian entries:
/// γ = ((n − 1)/n)·E[K(X₁,X₂)‖X₁ − X₂‖²]/(2pσ²). Closed form for the constant
/// and indicator kernels; `None` otherwise.
pub fn finite_n_centering(kernel: &KernelSpec, law: EntryLaw, sigma: f64, n: usize) -> Option<f64> {
    if law != EntryLaw::Gaussian {
        return None;
    }
    let f = (n as f64 - 1.0) / n as f64;
    match kernel.variant {
        KernelVariant::Constant => Some(f),
        KernelVariant::Indicator { radius } if radius.is_infinite() => Some(f),
        KernelVariant::Indicator { radius } => {
            // E[I(2σ²χ²_p ≤ r²) χ²_p] = p·P(χ²_{p+2} ≤ r²/(2σ²)).
            let chi = ChiSquared::new(kernel.dimension as f64 + 2.0).ok()?;
            Some(f * chi.cdf(radius * radius / (2.0 * sigma * sigma)))
        }
        _ => None,
    }
}

impl SemicircleOutput {
    pub fn write(&self, dir: &Path) -> Result<()> {
        self.run.write_artifacts(dir)?;
        let summary = serde_json::json!({
            "options": self.options,
            "pooled_ks": self.run.report.pooled_ks,
            "sc_residual": self.sc_residual,
            "centering": self.centering,
        });
        std::fs::write(dir.join("semicircle.json"), to_json(&summary)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> FigureOptions {
        FigureOptions { p: 40, n: 100, trials: 2, seed: 3, points: 150, ..Default::default() }
    }

    #[test]
    fn infinite_beta_matches_constant_kernel() {
        let opts = tiny();
        let f = figure1(&opts, &[f64::INFINITY], Exec::Sequential).unwrap();
        let constant = run_experiment(&opts.config(KernelConfig::constant()), Exec::Sequential).unwrap();
        assert_eq!(f.runs[0].pooled, constant.pooled);
        assert_eq!(f.runs[0].histogram, constant.histogram);
    }

    #[test]
    fn mean_eigenvalue_orders_with_beta() {
        let f = figure1(&tiny(), &[-0.1, 0.3], Exec::default()).unwrap();
        assert!(f.panels[0].pooled_mean < f.panels[1].pooled_mean);
        assert!(f.panels[0].predicted_mean.unwrap() < f.panels[1].predicted_mean.unwrap());
    }

    #[test]
    fn figure2_writes_overlays() {
        let dir = tempfile::tempdir().unwrap();
        let f = figure2(&tiny(), &[1.0], Exec::default()).unwrap();
        f.write(dir.path()).unwrap();
        assert!(dir.path().join("tau_1/mp_alpha_squared.csv").exists());
        assert!(dir.path().join("mp_unit.csv").exists());
        let p = &f.panels[0];
        assert!(p.ks_alpha < p.ks_alpha_squared);
    }

    #[test]
    fn semicircle_regime_is_enforced() {
        let opts = SemicircleOptions { p: 10, n: 100, ..Default::default() };
        assert!(semicircle_experiment(&opts, Exec::Sequential).is_err());
    }

    #[test]
    fn small_semicircle_run() {
        let opts = SemicircleOptions { p: 60, n: 1500, trials: 2, points: 100, ..Default::default() };
        let out = semicircle_experiment(&opts, Exec::default()).unwrap();
        assert!(out.sc_residual < 1e-12);
        let c = out.centering.unwrap();
        assert!(c.gamma > 0.0 && c.gamma < 1.0);
        assert!(out.run.report.pooled_ks.is_some());
    }

    #[test]
    fn constant_kernel_centering() {
        let k = KernelSpec::constant(10).unwrap();
        assert_eq!(finite_n_centering(&k, EntryLaw::Gaussian, 1.0, 4), Some(0.75));
        assert_eq!(finite_n_centering(&k, EntryLaw::Rademacher, 1.0, 4), None);
    }
}
