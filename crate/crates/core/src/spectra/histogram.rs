use serde::{Deserialize, Serialize};

use super::esd::EmpiricalSpectrum;
use crate::error::{invalid, Result};

/// Density-normalized histogram: Σ densityₖ · widthₖ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.densities.len()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.bin_edges[k + 1] - self.bin_edges[k]
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.bins()).map(|k| self.densities[k] * self.width(k)).sum()
    }
}

/// Histogram of the eigenvalues over `range`, or over the observed span padded
/// by 1% on each side. Values outside an explicit range are dropped before
/// normalizing.
pub fn histogram(spec: &EmpiricalSpectrum, bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins < 1 {
        return invalid("histogram needs at least one bin");
    }
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !(hi > lo) {
                return invalid(format!("histogram range ({lo}, {hi}) is empty"));
            }
            (lo, hi)
        }
        None => {
            let spread = spec.max() - spec.min();
            let pad = if spread > 0.0 { 0.01 * spread } else { 0.5 };
            (spec.min() - pad, spec.max() + pad)
        }
    };
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect();
    let mut counts = vec![0usize; bins];
    let mut inside = 0usize;
    for &v in spec.eigenvalues() {
        if v < lo || v > hi {
            continue;
        }
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
        inside += 1;
    }
    let densities = if inside == 0 {
        vec![0.0; bins]
    } else {
        (0..bins).map(|k| counts[k] as f64 / (inside as f64 * (bin_edges[k + 1] - bin_edges[k]))).collect()
    };
    Ok(Histogram { bin_edges, densities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::esd::esd;

    #[test]
    fn single_value_single_bin() {
        let s = esd(vec![2.0]).unwrap();
        let h = histogram(&s, 1, None).unwrap();
        assert!((h.densities[0] - 1.0 / h.width(0)).abs() < 1e-15);
    }

    #[test]
    fn uniform_grid_is_flat() {
        let vals: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let h = histogram(&esd(vals).unwrap(), 10, Some((0.0, 1.0))).unwrap();
        for d in &h.densities {
            assert!((d - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_bins_rejected() {
        assert!(histogram(&esd(vec![1.0]).unwrap(), 0, None).is_err());
        assert!(histogram(&esd(vec![1.0]).unwrap(), 3, Some((1.0, 1.0))).is_err());
    }

    #[test]
    fn default_range_pads_one_percent() {
        let h = histogram(&esd(vec![0.0, 10.0]).unwrap(), 4, None).unwrap();
        assert!((h.bin_edges[0] + 0.1).abs() < 1e-12);
        assert!((h.bin_edges[4] - 10.1).abs() < 1e-12);
        assert!((h.total_mass() - 1.0).abs() < 1e-12);
    }
}
