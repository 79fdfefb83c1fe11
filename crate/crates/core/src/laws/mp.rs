use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{invalid, Result};

/// Marčenko–Pastur law MP(c, scale): the limit spectrum of (scale)·XXᵀ/n
/// for p/n → c with unit-variance entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MPLaw {
    pub c: f64,
    pub scale: f64,
}

impl MPLaw {
    pub fn new(c: f64, scale: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return invalid(format!("aspect ratio must be positive, got {c}"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return invalid(format!("scale must be positive, got {scale}"));
        }
        Ok(Self { c, scale })
    }

    /// Support edges (a, b) = scale·(1 ∓ √c)².
    pub fn edges(&self) -> (f64, f64) {
        let r = self.c.sqrt();
        (self.scale * (1.0 - r).powi(2), self.scale * (1.0 + r).powi(2))
    }

    /// Mass of the atom at 0 (nonzero only for c > 1).
    pub fn atom(&self) -> f64 {
        if self.c > 1.0 {
            1.0 - 1.0 / self.c
        } else {
            0.0
        }
    }

    /// Density of the absolutely continuous part; integrates to min(1, 1/c).
    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = self.edges();
        if x <= a || x >= b {
            return 0.0;
        }
        ((b - x) * (x - a)).sqrt() / (2.0 * PI * self.scale * self.c * x)
    }

    /// Continuous-part density in the angle θ with x = a + (b−a)(1 − cos θ)/2,
    /// which removes the square-root edges.
    fn angular_density(&self, theta: f64) -> f64 {
        let (a, b) = self.edges();
        let x = a + 0.5 * (b - a) * (1.0 - theta.cos());
        if x <= 0.0 {
            // c = 1 at θ = 0: limit of sin²θ / x.
            return (b - a) * (b - a) * 2.0 * (1.0 + theta.cos()) / (8.0 * PI * self.scale * self.c * b);
        }
        let s = theta.sin();
        (b - a) * (b - a) * s * s / (8.0 * PI * self.scale * self.c * x)
    }

    /// CDF: atom at 0 (for c > 1) plus adaptive Gauss–Kronrod integration of
    /// the density, absolute error ≲ 10⁻¹².
    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.edges();
        let atom = if x >= 0.0 { self.atom() } else { 0.0 };
        if x <= a {
            return atom;
        }
        if x >= b {
            return 1.0;
        }
        let t = (1.0 - 2.0 * (x - a) / (b - a)).clamp(-1.0, 1.0);
        let theta = t.acos();
        let cont = integrate(|th| self.angular_density(th), 0.0, theta, 1e-13).value;
        (atom + cont).clamp(0.0, 1.0)
    }

    /// Stieltjes transform: the root in ℂ⁺ of cσ²z s² + (z − σ²(1 − c)) s + 1 = 0.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return invalid("Stieltjes transform needs Im z > 0");
        }
        let qa = z * (self.c * self.scale);
        let qb = z - self.scale * (1.0 - self.c);
        let roots = quadratic_roots(qa, qb, Complex64::new(1.0, 0.0));
        Ok(pick_upper(roots))
    }
}

/// Roots of A s² + B s + C with the cancellation-free formula.
pub(crate) fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
    [q / a, c / q]
}

pub(crate) fn pick_upper(roots: [Complex64; 2]) -> Complex64 {
    if roots[0].im >= roots[1].im {
        roots[0]
    } else {
        roots[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_density_matches_formula() {
        let law = MPLaw::new(0.4, 1.0).unwrap();
        let (a, b) = law.edges();
        assert!((a + b - 2.8).abs() < 1e-14);
        let expected = ((b - 1.4) * (1.4 - a)).sqrt() / (2.0 * PI * 0.4 * 1.4);
        assert!((law.density(1.4) - expected).abs() < 1e-15);
        assert_eq!(law.density(a - 0.01), 0.0);
        assert_eq!(law.density(b + 0.01), 0.0);
    }

    #[test]
    fn density_normalization_by_direct_quadrature() {
        for (c, mass) in [(0.4, 1.0), (1.0, 1.0), (0.1, 1.0), (2.0, 0.5), (4.0, 0.25)] {
            let law = MPLaw::new(c, 1.7).unwrap();
            let (a, b) = law.edges();
            let r = integrate(|x| law.density(x), a, b, 1e-10);
            assert!((r.value - mass).abs() < 1e-8, "c={c}: {}", r.value);
        }
    }

    #[test]
    fn cdf_edges_and_atom() {
        let law = MPLaw::new(0.4, 1.0).unwrap();
        let (a, b) = law.edges();
        assert_eq!(law.cdf(a), 0.0);
        assert_eq!(law.cdf(b), 1.0);
        assert_eq!(law.cdf(b + 3.0), 1.0);
        let two = MPLaw::new(2.0, 1.0).unwrap();
        assert!((two.cdf(1e-300) - 0.5).abs() < 1e-15);
        assert_eq!(two.cdf(-1e-9), 0.0);
        assert!((two.cdf(1e6) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_is_monotone_and_continuous_at_upper_edge() {
        let law = MPLaw::new(0.4, 1.0).unwrap();
        let (a, b) = law.edges();
        let mut prev = 0.0;
        for k in 0..=400 {
            let x = a + (b - a) * k as f64 / 400.0;
            let f = law.cdf(x);
            assert!(f >= prev - 1e-14);
            prev = f;
        }
        assert!((law.cdf(b - 1e-12) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_invalid() {
        assert!(MPLaw::new(0.0, 1.0).is_err());
        assert!(MPLaw::new(0.5, -1.0).is_err());
        let law = MPLaw::new(0.5, 1.0).unwrap();
        assert!(law.stieltjes(Complex64::new(1.0, 0.0)).is_err());
    }
}
