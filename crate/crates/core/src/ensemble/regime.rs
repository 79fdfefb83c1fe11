use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// p/n → c ∈ (0, ∞).
    #[default]
    Proportional,
    /// p/n → 0 with p ≫ √n, read as p² > n.
    SemiHighDim,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeConfig {
    pub regime: Regime,
    pub p: usize,
    pub n: usize,
    /// Target aspect ratio for the proportional regime.
    pub c: Option<f64>,
}

impl RegimeConfig {
    pub fn proportional(p: usize, n: usize, c: f64) -> Result<Self> {
        let cfg = Self { regime: Regime::Proportional, p, n, c: Some(c) };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn semi_high_dim(p: usize, n: usize) -> Result<Self> {
        let cfg = Self { regime: Regime::SemiHighDim, p, n, c: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n == 0 {
            return invalid("p and n must be positive");
        }
        match self.regime {
            Regime::Proportional => {
                let target = self.c.unwrap_or_else(|| self.aspect_ratio());
                if !(target > 0.0) {
                    return invalid("aspect ratio must be positive");
                }
                if (self.aspect_ratio() - target).abs() > 0.1 * target {
                    return invalid(format!("p/n = {} is not within 10% of c = {target}", self.aspect_ratio()));
                }
            }
            Regime::SemiHighDim => {
                let (p, n) = (self.p as u128, self.n as u128);
                if p * p <= n {
                    return invalid(format!("semi-high-dimensional regime needs p² > n (p={}, n={})", self.p, self.n));
                }
            }
        }
        Ok(())
    }
}
