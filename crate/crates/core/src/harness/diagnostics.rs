//! Empirical checks of the reductions M → M̃ → M̄ across growing sizes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::KernelConfig;
use super::experiment::to_json;
use crate::ensemble::{
    build_graph_matrices, conditional_kernel_means, max_xi_prime_over_n, offdiagonal_norm, sample_data_matrix,
    truncated_covariance_rayleigh, xi_bar_from_means, EntryLaw, DEFAULT_MC_CONDITIONAL,
};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::rng::{stream_seed, Stream};
use crate::spectra::{matrix_spectrum, wasserstein2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsOptions {
    pub sizes: Vec<(usize, usize)>,
    pub kernel: KernelConfig,
    pub sigma: f64,
    pub seeds: usize,
    pub master_seed: u64,
    pub mc_conditional: usize,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            sizes: vec![(100, 250), (200, 500), (400, 1000)],
            kernel: KernelConfig::indicator_z_alpha(0.0),
            sigma: 1.0,
            seeds: 10,
            master_seed: 0,
            mc_conditional: DEFAULT_MC_CONDITIONAL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub p: usize,
    pub n: usize,
    pub seed: usize,
    /// W₂(μ_M, μ_M̄).
    pub w2_m_mbar: f64,
    /// max_i |ξ′ᵢ| / n.
    pub max_xi_prime: f64,
    /// ‖XAXᵀ/n²‖_HS / √p.
    pub offdiag_norm: f64,
    /// √(6 log n / n).
    pub xi_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub p: usize,
    pub n: usize,
    pub median_w2: f64,
    pub median_xi_prime: f64,
    pub median_offdiag: f64,
    pub xi_bound: f64,
    pub fraction_within_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub w2_decreasing: bool,
    pub xi_prime_decreasing: bool,
    pub offdiag_decreasing: bool,
    /// Share of all runs with max|ξ′ᵢ|/n ≤ √(6 log n/n).
    pub fraction_within_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsOutput {
    pub options: DiagnosticsOptions,
    pub rows: Vec<DiagnosticsRow>,
    pub summary: Vec<SizeSummary>,
    pub verdict: Verdict,
}

/// Runs every (size, seed) pair and summarizes the medians per size.
pub fn diagnostics_reductions(opts: &DiagnosticsOptions, exec: Exec) -> Result<DiagnosticsOutput> {
    if opts.sizes.is_empty() || opts.seeds == 0 {
        return invalid("need at least one size and one seed");
    }
    let jobs: Vec<(usize, usize)> =
        (0..opts.sizes.len()).flat_map(|s| (0..opts.seeds).map(move |k| (s, k))).collect();
    let rows = exec.try_map(jobs.len(), |j| {
        let (s, k) = jobs[j];
        let (p, n) = opts.sizes[s];
        let kernel = opts.kernel.build(p, opts.sigma)?;
        let index = (s * 1_000_003 + k) as u64;
        let x = sample_data_matrix(p, n, EntryLaw::Gaussian, opts.sigma, stream_seed(opts.master_seed, Stream::Data, index))?;
        let graph = build_graph_matrices(&x, &kernel)?;
        let m = truncated_covariance_rayleigh(&x, &graph)?;
        let seed = stream_seed(opts.master_seed, Stream::Conditional, index);
        let xi = conditional_kernel_means(&x, &kernel, opts.mc_conditional, seed)?;
        let mbar = xi_bar_from_means(&x, &xi)?;
        let w2 = wasserstein2(&matrix_spectrum(&m.view())?, &matrix_spectrum(&mbar.view())?)?;
        Ok::<_, crate::error::RmtError>(DiagnosticsRow {
            p,
            n,
            seed: k,
            w2_m_mbar: w2,
            max_xi_prime: max_xi_prime_over_n(&graph, &xi)?,
            offdiag_norm: offdiagonal_norm(&x, &graph)?,
            xi_bound: xi_bound(n),
        })
    })?;

    let summary: Vec<SizeSummary> = opts
        .sizes
        .iter()
        .map(|&(p, n)| {
            let group: Vec<&DiagnosticsRow> = rows.iter().filter(|r| r.p == p && r.n == n).collect();
            let within = group.iter().filter(|r| r.max_xi_prime <= r.xi_bound).count();
            SizeSummary {
                p,
                n,
                median_w2: median(group.iter().map(|r| r.w2_m_mbar).collect()),
                median_xi_prime: median(group.iter().map(|r| r.max_xi_prime).collect()),
                median_offdiag: median(group.iter().map(|r| r.offdiag_norm).collect()),
                xi_bound: xi_bound(n),
                fraction_within_bound: within as f64 / group.len() as f64,
            }
        })
        .collect();
    let decreasing = |f: fn(&SizeSummary) -> f64| summary.windows(2).all(|w| f(&w[1]) < f(&w[0]));
    let within = rows.iter().filter(|r| r.max_xi_prime <= r.xi_bound).count();
    let verdict = Verdict {
        w2_decreasing: decreasing(|s| s.median_w2),
        xi_prime_decreasing: decreasing(|s| s.median_xi_prime),
        offdiag_decreasing: decreasing(|s| s.median_offdiag),
        fraction_within_bound: within as f64 / rows.len() as f64,
    };
    Ok(DiagnosticsOutput { options: opts.clone(), rows, summary, verdict })
}

pub fn xi_bound(n: usize) -> f64 {
    let n = n as f64;
    (6.0 * n.ln() / n).sqrt()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

impl DiagnosticsOutput {
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("p,n,seed,w2_m_mbar,max_xi_prime,offdiag_norm,xi_bound\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{},{},{},{}", r.p, r.n, r.seed, r.w2_m_mbar, r.max_xi_prime, r.offdiag_norm, r.xi_bound)
                .unwrap();
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("reductions.csv"), self.rows_csv())?;
        let summary = serde_json::json!({ "summary": self.summary, "verdict": self.verdict, "options": self.options });
        std::fs::write(dir.join("reductions.json"), to_json(&summary)?)?;
        Ok(())
    }
}
