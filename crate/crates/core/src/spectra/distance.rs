use ndarray::ArrayView2;

use super::eigen::symmetric_eigenvalues;
use super::esd::{esd, EmpiricalSpectrum};
use crate::error::{invalid, Result};
use crate::linalg::hs_norm;

/// Kolmogorov–Smirnov distance between an ESD and a nondecreasing CDF,
/// evaluated on both sides of every jump of the empirical CDF (left limits
/// against left limits, so step laws are handled exactly).
pub fn ks_distance(spec: &EmpiricalSpectrum, law_cdf: impl Fn(f64) -> f64) -> f64 {
    let ev = spec.eigenvalues();
    let m = ev.len() as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < ev.len() {
        let x = ev[i];
        let mut j = i;
        while j < ev.len() && ev[j] == x {
            j += 1;
        }
        let (left, right) = (law_cdf(x.next_down()), law_cdf(x));
        worst = worst.max((i as f64 / m - left).abs()).max((j as f64 / m - right).abs());
        i = j;
    }
    worst.min(1.0)
}

/// Two-sample Kolmogorov–Smirnov distance between two ESDs.
pub fn ks_two_sample(a: &EmpiricalSpectrum, b: &EmpiricalSpectrum) -> f64 {
    let (xa, xb) = (a.eigenvalues(), b.eigenvalues());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < xa.len() || j < xb.len() {
        let x = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / na - j as f64 / nb).abs());
    }
    worst
}

/// W₂ between two equal-size ESDs: the sorted (monotone) coupling.
pub fn wasserstein2(a: &EmpiricalSpectrum, b: &EmpiricalSpectrum) -> Result<f64> {
    if a.len() != b.len() {
        return invalid(format!("spectra have different sizes ({} vs {})", a.len(), b.len()));
    }
    let sum: f64 = a.eigenvalues().iter().zip(b.eigenvalues()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((sum / a.len() as f64).sqrt())
}

/// ‖S₁ − S₂‖_HS / √n, an upper bound on W₂ between the two spectra.
pub fn hoffman_wielandt_bound(s1: &ArrayView2<f64>, s2: &ArrayView2<f64>) -> Result<f64> {
    if s1.dim() != s2.dim() || s1.nrows() != s1.ncols() {
        return invalid(format!("need equal square matrices, got {:?} and {:?}", s1.dim(), s2.dim()));
    }
    if s1.nrows() == 0 {
        return invalid("matrices are empty");
    }
    Ok(hs_norm(&(s1 - s2).view()) / (s1.nrows() as f64).sqrt())
}

/// ESD of a symmetric matrix.
pub fn matrix_spectrum(s: &ArrayView2<f64>) -> Result<EmpiricalSpectrum> {
    esd(symmetric_eigenvalues(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn ks_trivial_cases() {
        let s = esd(vec![0.3, 1.2, 2.0, 2.5]).unwrap();
        assert_eq!(ks_distance(&s, |x| s.cdf(x)), 0.0);
        let point = esd(vec![0.0]).unwrap();
        assert_eq!(ks_distance(&point, |x| if x >= 1.0 { 1.0 } else { 0.0 }), 1.0);
    }

    #[test]
    fn ks_uses_both_sides_of_jump() {
        // Uniform[0,1] vs {0.5}: gap is 0.5 on either side.
        let s = esd(vec![0.5]).unwrap();
        assert!((ks_distance(&s, |x| x.clamp(0.0, 1.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_sample_ks() {
        let a = esd(vec![1.0, 2.0]).unwrap();
        let b = esd(vec![3.0, 4.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &b), 1.0);
        assert_eq!(ks_two_sample(&a, &a), 0.0);
    }

    #[test]
    fn wasserstein_cases() {
        let a = esd(vec![0.0, 0.0]).unwrap();
        let b = esd(vec![1.0, 1.0]).unwrap();
        assert_eq!(wasserstein2(&a, &a).unwrap(), 0.0);
        assert_eq!(wasserstein2(&a, &b).unwrap(), 1.0);
        assert!(wasserstein2(&a, &esd(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn shift_is_tight_for_hoffman_wielandt() {
        let s1 = array![[2.0, 0.5, 0.1], [0.5, 1.0, -0.3], [0.1, -0.3, 0.4]];
        let s2 = &s1 + &(Array2::<f64>::eye(3) * 0.25);
        let bound = hoffman_wielandt_bound(&s1.view(), &s2.view()).unwrap();
        let w = wasserstein2(&matrix_spectrum(&s1.view()).unwrap(), &matrix_spectrum(&s2.view()).unwrap()).unwrap();
        assert!((bound - 0.25).abs() < 1e-15);
        assert!((w - 0.25).abs() < 1e-14);
        assert_eq!(hoffman_wielandt_bound(&s1.view(), &s1.view()).unwrap(), 0.0);
        assert!(hoffman_wielandt_bound(&s1.view(), &Array2::<f64>::eye(2).view()).is_err());
    }
}
