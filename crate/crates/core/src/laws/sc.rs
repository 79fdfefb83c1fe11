use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Semicircle law SC(ϖ²) on [−2ϖ, 2ϖ].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SCLaw {
    /// ϖ².
    pub variance: f64,
}

impl SCLaw {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return invalid(format!("semicircle variance must be positive, got {variance}"));
        }
        Ok(Self { variance })
    }

    /// SC with ϖ = `radius_param`, i.e. variance ϖ².
    pub fn with_scale(varpi: f64) -> Result<Self> {
        Self::new(varpi * varpi)
    }

    pub fn varpi(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn edge(&self) -> f64 {
        2.0 * self.varpi()
    }

    pub fn density(&self, x: f64) -> f64 {
        let r2 = 4.0 * self.variance - x * x;
        if r2 <= 0.0 {
            0.0
        } else {
            r2.sqrt() / (2.0 * PI * self.variance)
        }
    }

    /// Closed-form antiderivative: 1/2 + (t√(1 − t²) + arcsin t)/π, t = x/(2ϖ).
    pub fn cdf(&self, x: f64) -> f64 {
        let t = x / self.edge();
        if t <= -1.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI
    }

    /// s(z) = (−z + √(z² − 4ϖ²)) / (2ϖ²) with the square root taken in the
    /// upper half-plane.
    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return invalid("Stieltjes transform needs Im z > 0");
        }
        let mut root = (z * z - 4.0 * self.variance).sqrt();
        if root.im < 0.0 {
            root = -root;
        }
        // (w − z)/(2ϖ²) = −2/(z + w) since w² − z² = −4ϖ².
        Ok(-2.0 / (z + root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::quadrature::integrate;

    #[test]
    fn density_and_cdf_values() {
        let law = SCLaw::new(1.0).unwrap();
        assert!((law.density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(law.density(2.0), 0.0);
        assert_eq!(law.density(-2.5), 0.0);
        assert_eq!(law.cdf(-2.0), 0.0);
        assert_eq!(law.cdf(2.0), 1.0);
        for v in [0.01, 0.5, 1.0, 7.0] {
            assert!((SCLaw::new(v).unwrap().cdf(0.0) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn cdf_matches_quadrature_of_density() {
        let law = SCLaw::new(0.37).unwrap();
        let e = law.edge();
        let total = integrate(|x| law.density(x), -e, e, 1e-11).value;
        assert!((total - 1.0).abs() < 1e-8);
        for x in [-0.9, -0.2, 0.33, 1.1] {
            let q = integrate(|t| law.density(t), -e, x, 1e-12).value;
            assert!((q - law.cdf(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn stieltjes_at_i() {
        let s = SCLaw::new(1.0).unwrap().stieltjes(Complex64::new(0.0, 1.0)).unwrap();
        assert!((s - Complex64::new(0.0, (5f64.sqrt() - 1.0) / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_satisfies_quadratic_on_grid() {
        let law = SCLaw::new(0.8).unwrap();
        for k in 0..100 {
            let z = Complex64::new(-4.0 + 8.0 * k as f64 / 99.0, 0.01 + 0.05 * (k % 7) as f64);
            let s = law.stieltjes(z).unwrap();
            assert!(s.im > 0.0);
            let res = law.variance * s * s + z * s + 1.0;
            assert!(res.norm() < 1e-12, "{res}");
        }
    }

    #[test]
    fn stieltjes_tail_asymptotics() {
        let law = SCLaw::new(1.0).unwrap();
        let z = Complex64::new(0.0, 1e3);
        let s = law.stieltjes(z).unwrap();
        assert!((s + 1.0 / z).norm() <= 2.0 * law.variance / z.norm().powi(3));
        assert!(law.stieltjes(Complex64::new(0.3, -1.0)).is_err());
    }
}
