use std::fmt;
use std::sync::Arc;

use ndarray::ArrayView1;

use crate::error::{invalid, Result};

type KernelFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// A user-supplied kernel. It must be symmetric and take values in [0,1].
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    f: Arc<KernelFn>,
}

impl CustomKernel {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f) }
    }
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum KernelVariant {
    /// K ≡ 1: the sample covariance matrix.
    Constant,
    /// K(x,y) = I(‖x − y‖ ≤ radius). An infinite radius is the complete graph.
    Indicator { radius: f64 },
    /// K(x,y) = 1 − exp(−‖x − y‖² / (2pτ²)).
    Gaussian { tau: f64 },
    Custom(CustomKernel),
}

/// A symmetric kernel on ℝᵖ with values in [0,1], plus whatever closed-form
/// metadata is known for it.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub variant: KernelVariant,
    pub dimension: usize,
    /// E K(X₁,X₂) when known in closed form.
    pub alpha: Option<f64>,
    /// E K(X₁,X₂)² when known in closed form.
    pub beta_sq: Option<f64>,
    /// Lipschitz constant κ_p.
    pub lipschitz: Option<f64>,
}

impl KernelSpec {
    fn with_variant(variant: KernelVariant, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return invalid("kernel dimension must be positive");
        }
        Ok(Self { variant, dimension, alpha: None, beta_sq: None, lipschitz: None })
    }

    pub fn constant(dimension: usize) -> Result<Self> {
        let mut k = Self::with_variant(KernelVariant::Constant, dimension)?;
        k.alpha = Some(1.0);
        k.beta_sq = Some(1.0);
        k.lipschitz = Some(0.0);
        Ok(k)
    }

    pub fn indicator(dimension: usize, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius < 0.0 {
            return invalid(format!("indicator radius must be nonnegative, got {radius}"));
        }
        Self::with_variant(KernelVariant::Indicator { radius }, dimension)
    }

    /// Radius with r² = (2p + 2√(2p)·z_α)σ².
    pub fn indicator_from_z_alpha(dimension: usize, z_alpha: f64, sigma: f64) -> Result<Self> {
        let p = dimension as f64;
        let r2 = (2.0 * p + 2.0 * (2.0 * p).sqrt() * z_alpha) * sigma * sigma;
        if r2.is_nan() || r2 < 0.0 {
            return invalid(format!("z_alpha = {z_alpha} gives a negative squared radius"));
        }
        Self::indicator(dimension, r2.sqrt())
    }

    /// Radius r(β) = √((2 + β)σ²p); `β = +∞` gives the complete graph.
    pub fn indicator_from_beta(dimension: usize, beta: f64, sigma: f64) -> Result<Self> {
        if beta == f64::INFINITY {
            return Self::indicator(dimension, f64::INFINITY);
        }
        let r2 = (2.0 + beta) * sigma * sigma * dimension as f64;
        if r2.is_nan() || r2 < 0.0 {
            return invalid(format!("beta = {beta} gives a negative squared radius"));
        }
        Self::indicator(dimension, r2.sqrt())
    }

    pub fn gaussian(dimension: usize, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return invalid(format!("gaussian bandwidth must be positive, got {tau}"));
        }
        let mut k = Self::with_variant(KernelVariant::Gaussian { tau }, dimension)?;
        k.lipschitz = Some(2f64.sqrt() / (std::f64::consts::E * (dimension as f64).sqrt() * tau));
        Ok(k)
    }

    pub fn custom(dimension: usize, kernel: CustomKernel) -> Result<Self> {
        Self::with_variant(KernelVariant::Custom(kernel), dimension)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_beta_sq(mut self, beta_sq: f64) -> Self {
        self.beta_sq = Some(beta_sq);
        self
    }

    pub fn with_lipschitz(mut self, kappa: f64) -> Self {
        self.lipschitz = Some(kappa);
        self
    }

    /// Short label used in reports and file names.
    pub fn tag(&self) -> String {
        match &self.variant {
            KernelVariant::Constant => "constant".into(),
            KernelVariant::Indicator { radius } => format!("indicator(r={radius})"),
            KernelVariant::Gaussian { tau } => format!("gaussian(tau={tau})"),
            KernelVariant::Custom(c) => format!("custom({})", c.name),
        }
    }

    /// Whether K depends on (x, y) only through ‖x − y‖².
    pub fn is_distance_profile(&self) -> bool {
        !matches!(self.variant, KernelVariant::Custom(_))
    }

    /// K as a function of the squared distance, for the profile kernels.
    pub fn eval_sq_dist(&self, d2: f64) -> Option<f64> {
        match self.variant {
            KernelVariant::Constant => Some(1.0),
            KernelVariant::Indicator { radius } => Some(if d2 <= radius * radius { 1.0 } else { 0.0 }),
            KernelVariant::Gaussian { tau } => {
                Some(1.0 - (-d2 / (2.0 * self.dimension as f64 * tau * tau)).exp())
            }
            KernelVariant::Custom(_) => None,
        }
    }

    pub fn eval(&self, x: ArrayView1<f64>, y: ArrayView1<f64>) -> f64 {
        match &self.variant {
            KernelVariant::Custom(c) => match (x.as_slice(), y.as_slice()) {
                (Some(xs), Some(ys)) => (c.f)(xs, ys),
                _ => (c.f)(&x.to_vec(), &y.to_vec()),
            },
            _ => {
                let d2: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                self.eval_sq_dist(d2).unwrap_or(0.0)
            }
        }
    }

    /// The z_α of an indicator kernel, from r² = (2p + 2√(2p)·z_α)σ².
    pub fn z_alpha(&self, sigma: f64) -> Option<f64> {
        match self.variant {
            KernelVariant::Indicator { radius } => {
                let p = self.dimension as f64;
                Some((radius * radius / (sigma * sigma) - 2.0 * p) / (2.0 * (2.0 * p).sqrt()))
            }
            _ => None,
        }
    }

    pub(crate) fn check_dimension(&self, p: usize) -> Result<()> {
        if self.dimension != p {
            return invalid(format!("kernel dimension {} does not match data dimension {p}", self.dimension));
        }
        Ok(())
    }
}

/// z_α = β√p / (2√2), the reparametrization linking r(β) and r_p(z_α).
pub fn z_alpha_from_beta(beta: f64, p: usize) -> f64 {
    beta * (p as f64).sqrt() / (2.0 * 2f64.sqrt())
}
