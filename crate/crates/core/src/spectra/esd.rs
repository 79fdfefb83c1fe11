use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Where a spectrum came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMeta {
    pub p: usize,
    pub n: usize,
    pub kernel: String,
    pub seed: u64,
}

/// The uniform probability measure on the eigenvalues of a matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSpectrum {
    eigenvalues: Vec<f64>,
    pub source_meta: Option<SourceMeta>,
}

impl EmpiricalSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.len() - 1]
    }

    /// F(x) = #{λᵢ ≤ x} / dim, right-continuous.
    pub fn cdf(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// F(x−) = #{λᵢ < x} / dim.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.eigenvalues.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.eigenvalues.iter().sum::<f64>() / self.len() as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.eigenvalues.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.len() as f64
    }

    pub fn with_meta(mut self, meta: SourceMeta) -> Self {
        self.source_meta = Some(meta);
        self
    }

    /// ESD of the block-diagonal matrix assembled from several spectra.
    pub fn pooled(spectra: &[EmpiricalSpectrum]) -> Result<Self> {
        esd(spectra.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect())
    }
}

/// Builds the ESD from an eigenvalue list in any order.
pub fn esd(mut eigenvalues: Vec<f64>) -> Result<EmpiricalSpectrum> {
    if eigenvalues.is_empty() {
        return invalid("spectrum needs at least one eigenvalue");
    }
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return invalid("eigenvalues must be finite");
    }
    eigenvalues.sort_by(f64::total_cmp);
    Ok(EmpiricalSpectrum { eigenvalues, source_meta: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_evaluates_cdf() {
        let s = esd(vec![2.0, 1.0]).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 2.0]);
        assert_eq!(s.cdf(1.5), 0.5);
        assert_eq!(s.cdf(1.0), 0.5);
        assert_eq!(s.cdf_left(1.0), 0.0);
        assert_eq!(s.cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(s.cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn repeated_value_jumps_once() {
        let s = esd(vec![0.7; 9]).unwrap();
        assert_eq!(s.cdf(0.7 - 1e-12), 0.0);
        assert_eq!(s.cdf(0.7), 1.0);
    }

    #[test]
    fn empty_is_rejected() {
        assert!(esd(vec![]).is_err());
        assert!(esd(vec![f64::NAN]).is_err());
    }

    #[test]
    fn pooling_concatenates() {
        let a = esd(vec![1.0, 3.0]).unwrap();
        let b = esd(vec![2.0]).unwrap();
        let pooled = EmpiricalSpectrum::pooled(&[a, b]).unwrap();
        assert_eq!(pooled.eigenvalues(), &[1.0, 2.0, 3.0]);
        assert_eq!(pooled.mean(), 2.0);
    }
}
