//! α_p = E K(X₁,X₂) and β_p² = E K(X₁,X₂)², in closed form where the entry
//! law allows it and by Monte Carlo otherwise.

use ndarray::Array1;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::data::EntryLaw;
use super::kernel::{KernelSpec, KernelVariant};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::rng::{stream_rng, Stream};

const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EstimateMethod {
    ClosedForm,
    Metadata,
    MonteCarlo { samples: usize },
}

/// A scalar with its Monte-Carlo standard error (zero for closed forms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, method: EstimateMethod::ClosedForm }
    }
}

/// α_p = 1 − (1 + 2σ²/(pτ²))^{−p/2} for the Gaussian kernel with Gaussian
/// entries (moment generating function of a χ²_p variable).
pub fn alpha_gaussian_closed_form(p: usize, sigma: f64, tau: f64) -> f64 {
    let p = p as f64;
    let t = 2.0 * sigma * sigma / (p * tau * tau);
    1.0 - (-0.5 * p * t.ln_1p()).exp()
}

/// Limit of α_p as p → ∞ for the Gaussian kernel: 1 − exp(−σ²/τ²).
pub fn alpha_gaussian_limit(sigma: f64, tau: f64) -> f64 {
    1.0 - (-(sigma * sigma) / (tau * tau)).exp()
}

/// E K² = 1 − 2(1 + 2σ²/(pτ²))^{−p/2} + (1 + 4σ²/(pτ²))^{−p/2} for the
/// Gaussian kernel with Gaussian entries.
pub fn beta_sq_gaussian_closed_form(p: usize, sigma: f64, tau: f64) -> f64 {
    let p = p as f64;
    let s2 = sigma * sigma / (p * tau * tau);
    1.0 - 2.0 * (-0.5 * p * (2.0 * s2).ln_1p()).exp() + (-0.5 * p * (4.0 * s2).ln_1p()).exp()
}

/// P(‖X₁ − X₂‖ ≤ r) with Gaussian entries, via ‖X₁ − X₂‖²/(2σ²) ∼ χ²_p.
pub fn alpha_indicator_closed_form(p: usize, sigma: f64, radius: f64) -> f64 {
    if radius.is_infinite() {
        return 1.0;
    }
    let chi = ChiSquared::new(p as f64).expect("p > 0");
    chi.cdf(radius * radius / (2.0 * sigma * sigma))
}

/// Monte-Carlo mean of K(X₁,X₂)^power over independent pairs.
pub fn kernel_moment_mc(kernel: &KernelSpec, law: EntryLaw, sigma: f64, power: i32, samples: usize, seed: u64) -> Result<Estimate> {
    kernel_moment_mc_with(kernel, law, sigma, power, samples, seed, Exec::default())
}

/// [`kernel_moment_mc`] with an explicit execution strategy; the result does
/// not depend on it.
pub fn kernel_moment_mc_with(
    kernel: &KernelSpec,
    law: EntryLaw,
    sigma: f64,
    power: i32,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<Estimate> {
    if samples == 0 {
        return invalid("mc_samples must be at least 1");
    }
    if !(sigma > 0.0) {
        return invalid("sigma must be positive");
    }
    let p = kernel.dimension;
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial = exec.map(chunks, |c| {
        let count = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut rng = stream_rng(seed, Stream::MonteCarlo, c as u64);
        let mut x1 = Array1::<f64>::zeros(p);
        let mut x2 = Array1::<f64>::zeros(p);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..count {
            x1.iter_mut().for_each(|v| *v = law.sample(sigma, &mut rng));
            x2.iter_mut().for_each(|v| *v = law.sample(sigma, &mut rng));
            let k = kernel.eval(x1.view(), x2.view()).powi(power);
            sum += k;
            sum_sq += k * k;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = partial.into_iter().fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let m = samples as f64;
    let mean = sum / m;
    let var = if samples > 1 { ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(Estimate { value: mean, std_error: (var / m).sqrt(), method: EstimateMethod::MonteCarlo { samples } })
}

/// α_p = E K(X₁, X₂).
pub fn alpha_p(kernel: &KernelSpec, law: EntryLaw, sigma: f64, mc_samples: usize, seed: u64) -> Result<Estimate> {
    if !(sigma > 0.0) {
        return invalid("sigma must be positive");
    }
    match kernel.variant {
        KernelVariant::Constant => return Ok(Estimate::exact(1.0)),
        KernelVariant::Gaussian { tau } if law == EntryLaw::Gaussian => {
            return Ok(Estimate::exact(alpha_gaussian_closed_form(kernel.dimension, sigma, tau)))
        }
        KernelVariant::Indicator { radius } if law == EntryLaw::Gaussian || radius.is_infinite() => {
            return Ok(Estimate::exact(alpha_indicator_closed_form(kernel.dimension, sigma, radius)))
        }
        _ => {}
    }
    if let Some(a) = kernel.alpha {
        return Ok(Estimate { value: a, std_error: 0.0, method: EstimateMethod::Metadata });
    }
    kernel_moment_mc(kernel, law, sigma, 1, mc_samples, seed)
}

/// β_p² = E K(X₁, X₂)². Equal to α_p for the indicator kernel since K² = K.
pub fn beta_p_sq(kernel: &KernelSpec, law: EntryLaw, sigma: f64, mc_samples: usize, seed: u64) -> Result<Estimate> {
    match kernel.variant {
        KernelVariant::Constant => Ok(Estimate::exact(1.0)),
        KernelVariant::Indicator { .. } => alpha_p(kernel, law, sigma, mc_samples, seed),
        _ => {
            if let Some(b) = kernel.beta_sq {
                return Ok(Estimate { value: b, std_error: 0.0, method: EstimateMethod::Metadata });
            }
            kernel_moment_mc(kernel, law, sigma, 2, mc_samples, seed)
        }
    }
}
