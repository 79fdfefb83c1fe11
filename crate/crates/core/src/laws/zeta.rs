//! The limit law of the conditional kernel means ξᵢ = E[K(Xᵢ,V) | Xᵢ]:
//! ζ = E_{Z₂} φ̃(√(m₂⁽¹⁾/m₂) Z₁ + √(m₂⁽²⁾/m₂) Z₂), represented as weighted atoms.

use std::cell::Cell;

use serde::{Deserialize, Serialize};
use libm::erfc;

use super::moments::DMoments;
use super::quadrature::{gauss_hermite, integrate_with_depth};
use crate::error::{invalid, RmtError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ZetaProvenance {
    PointMass,
    ClosedFormIndicator { z_alpha: f64 },
    Quadrature { n_outer: usize, n_inner: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

/// A discrete law on [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaDistribution {
    values: Vec<f64>,
    weights: Vec<f64>,
    pub provenance: ZetaProvenance,
}

impl ZetaDistribution {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, provenance: ZetaProvenance) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return invalid("zeta needs matching, nonempty values and weights");
        }
        if let Some(v) = values.iter().find(|v| !(-1e-12..=1.0 + 1e-12).contains(*v)) {
            return invalid(format!("zeta atom {v} lies outside [0,1]"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return invalid("zeta weights must be nonnegative");
        }
        let total = compensated_sum(&weights);
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("zeta weights sum to {total}, expected 1"));
        }
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(Self { values, weights, provenance })
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(vec![value], vec![1.0], ZetaProvenance::PointMass)
    }

    /// Equal-weight atoms at the given samples.
    pub fn from_samples(samples: Vec<f64>, seed: u64) -> Result<Self> {
        let m = samples.len();
        if m == 0 {
            return invalid("need at least one sample");
        }
        let w = vec![1.0 / m as f64; m];
        Self::new(samples, w, ZetaProvenance::MonteCarlo { samples: m, seed })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn moment(&self, k: i32) -> f64 {
        self.atoms().map(|(v, w)| w * v.powi(k)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Total weight on atoms equal to zero.
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms().filter(|(v, _)| *v == 0.0).map(|(_, w)| w).sum()
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// ζ = Φ(Z/√3 + 2z_α/√3) for the indicator kernel with Gaussian entries,
/// with Z discretized by an `n_atoms`-point Gauss–Hermite rule.
pub fn zeta_indicator(z_alpha: f64, n_atoms: usize) -> Result<ZetaDistribution> {
    if n_atoms < 16 {
        return invalid(format!("need at least 16 atoms, got {n_atoms}"));
    }
    if !z_alpha.is_finite() {
        return invalid("z_alpha must be finite");
    }
    let (nodes, weights) = gauss_hermite(n_atoms);
    let s3 = 3f64.sqrt();
    let values = nodes.iter().map(|z| normal_cdf((z + 2.0 * z_alpha) / s3)).collect();
    ZetaDistribution::new(values, weights, ZetaProvenance::ClosedFormIndicator { z_alpha })
}

/// Half-width of the truncated N(0,1) range used by the inner integral.
const INNER_RANGE: f64 = 10.0;

/// ζ for a general monotone limit profile φ̃.
///
/// Outer atoms sit at the Gauss–Hermite nodes z_k for Z₁. The inner
/// expectation over Z₂ is integrated adaptively against the normal density
/// on [−10, 10], split into `n_inner` initial panels, so step-shaped φ̃ are
/// resolved to ~10⁻¹².
pub fn zeta_general(
    phi_tilde: impl Fn(f64) -> f64,
    moments: &DMoments,
    n_outer: usize,
    n_inner: usize,
) -> Result<ZetaDistribution> {
    if n_outer < 1 || n_inner < 1 {
        return invalid("quadrature sizes must be positive");
    }
    moments.validate()?;
    let a = (moments.m2_1 / moments.m2).sqrt();
    let b = (moments.m2_2 / moments.m2).sqrt();
    let violation = Cell::new(None::<f64>);
    let checked = |t: f64| {
        let v = phi_tilde(t);
        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
            violation.set(Some(v));
        }
        v.clamp(0.0, 1.0)
    };
    let (nodes, weights) = gauss_hermite(n_outer);
    let gauss = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let panel = 2.0 * INNER_RANGE / n_inner as f64;
    let tol = 1e-13 / n_inner as f64;
    let values: Vec<f64> = nodes
        .iter()
        .map(|&z| {
            if b == 0.0 {
                return checked(a * z);
            }
            let f = |t: f64| checked(a * z + b * t) * gauss(t);
            let inner: f64 = (0..n_inner)
                .map(|k| {
                    let lo = -INNER_RANGE + k as f64 * panel;
                    integrate_with_depth(&f, lo, lo + panel, tol, 48).value
                })
                .sum();
            inner.clamp(0.0, 1.0)
        })
        .collect();
    if let Some(v) = violation.get() {
        return Err(RmtError::ContractViolation(format!("phi_tilde returned {v}, outside [0,1]")));
    }
    ZetaDistribution::new(values, weights, ZetaProvenance::Quadrature { n_outer, n_inner })
}
