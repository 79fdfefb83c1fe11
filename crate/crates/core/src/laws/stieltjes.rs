//! Fixed-point solver for the generalized Marčenko–Pastur Stieltjes transform
//!
//!   1 + z s = E_ζ[ σ² s ζ / (1 + c σ² s ζ) ],   s ∈ ℂ⁺,
//!
//! iterated in the rearranged form s ← [−z + E(σ²ζ / (1 + cσ²ζ s))]⁻¹ with
//! damping, plus Newton polishing once the iterate is close.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::zeta::ZetaDistribution;
use crate::error::{invalid, RmtError, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Weight η of the new iterate.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point; `None` uses i/(1 + |z|).
    pub init: Option<Complex64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { damping: 0.5, tol: 1e-10, max_iter: 10_000, init: None }
    }
}

/// Dampings tried in turn when the iteration stalls.
const FALLBACK_DAMPINGS: [f64; 2] = [0.25, 0.1];
/// Residual below which Newton steps are attempted.
const NEWTON_ZONE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOutcome {
    #[serde(with = "complex_serde")]
    pub value: Complex64,
    pub iterations: usize,
    pub residual: f64,
}

/// The generalized MP law with aspect ratio c, entry variance σ² and ζ law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedMpLaw {
    pub c: f64,
    pub sigma: f64,
    pub zeta: ZetaDistribution,
}

impl GeneralizedMpLaw {
    pub fn new(c: f64, sigma: f64, zeta: ZetaDistribution) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return invalid(format!("aspect ratio must be positive, got {c}"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return invalid(format!("sigma must be positive, got {sigma}"));
        }
        Ok(Self { c, sigma, zeta })
    }

    /// E[σ²ζ / (1 + cσ²ζ s)] and its derivative in s.
    fn expectation(&self, s: Complex64) -> (Complex64, Complex64) {
        let s2 = self.sigma * self.sigma;
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for (zeta, w) in self.zeta.atoms() {
            let a = s2 * zeta;
            let denom = 1.0 + self.c * a * s;
            let t = a / denom;
            value += w * t;
            deriv -= w * self.c * t * t;
        }
        (value, deriv)
    }

    /// |1 + z s − E[σ² s ζ / (1 + cσ² s ζ)]|.
    pub fn residual(&self, z: Complex64, s: Complex64) -> f64 {
        (1.0 + z * s - s * self.expectation(s).0).norm()
    }

    pub fn solve(&self, z: Complex64, opts: &SolverOptions) -> Result<SolverOutcome> {
        solve_fixed_point(self, z, opts)
    }

    /// Approximate support upper edge σ² max ζ (1 + √c)², used to size grids.
    pub fn upper_edge(&self) -> f64 {
        self.sigma * self.sigma * self.zeta.max_value() * (1.0 + self.c.sqrt()).powi(2)
    }

    /// Mass at 0 estimated from v·|s(iv)| at v = 10⁻⁴. Not certified.
    pub fn estimated_atom_at_zero(&self) -> Result<f64> {
        let v = 1e-4;
        let s = self.solve(Complex64::new(0.0, v), &SolverOptions { max_iter: 200_000, ..Default::default() })?;
        Ok((v * s.value.norm()).min(1.0))
    }
}

/// Solves for s(z) with damped fixed-point iteration, falling back to
/// smaller dampings, and finishing with Newton steps that keep Im s > 0.
pub fn solve_nonsmooth_stieltjes(
    z: Complex64,
    c: f64,
    sigma: f64,
    zeta: &ZetaDistribution,
    opts: &SolverOptions,
) -> Result<SolverOutcome> {
    let law = GeneralizedMpLaw::new(c, sigma, zeta.clone())?;
    solve_fixed_point(&law, z, opts)
}

fn solve_fixed_point(law: &GeneralizedMpLaw, z: Complex64, opts: &SolverOptions) -> Result<SolverOutcome> {
    if !(z.im > 0.0) {
        return invalid("solver needs Im z > 0");
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return invalid("damping must lie in (0, 1]");
    }
    let mut s = opts.init.unwrap_or_else(|| Complex64::new(0.0, 1.0) / (1.0 + z.norm()));
    if !(s.im > 0.0) {
        return invalid("initial point must lie in the upper half-plane");
    }
    let mut total_iter = 0usize;
    let mut best = (s, law.residual(z, s));
    for eta in std::iter::once(opts.damping).chain(FALLBACK_DAMPINGS.into_iter().filter(|&e| e < opts.damping)) {
        s = best.0;
        for _ in 0..opts.max_iter {
            let (e, de) = law.expectation(s);
            let res = (1.0 + z * s - s * e).norm();
            if res < best.1 {
                best = (s, res);
            }
            if res <= opts.tol {
                let (s, res) = polish(law, z, s, res);
                return Ok(SolverOutcome { value: s, iterations: total_iter, residual: res });
            }
            total_iter += 1;
            if res <= NEWTON_ZONE {
                // F(s) = 1 + z s − s E(s), F′ = z − E − s E′.
                let f = 1.0 + z * s - s * e;
                let fp = z - e - s * de;
                let step = s - f / fp;
                if step.im > 0.0 && law.residual(z, step) < res {
                    s = step;
                    continue;
                }
            }
            let mapped = 1.0 / (e - z);
            s = (1.0 - eta) * s + eta * mapped;
        }
    }
    let res = law.residual(z, s).min(best.1);
    Err(RmtError::SolverFailure { iterations: total_iter, residual: res })
}

/// A few Newton steps past the tolerance, so that solutions reached from
/// different starting points agree to rounding rather than to `tol`.
fn polish(law: &GeneralizedMpLaw, z: Complex64, mut s: Complex64, mut res: f64) -> (Complex64, f64) {
    for _ in 0..4 {
        let (e, de) = law.expectation(s);
        let step = s - (1.0 + z * s - s * e) / (z - e - s * de);
        let r = law.residual(z, step);
        if !(step.im > 0.0) || !(r <= res) {
            break;
        }
        let moved = (step - s).norm();
        s = step;
        res = r;
        if moved <= 1e-16 * s.norm() {
            break;
        }
    }
    (s, res)
}

/// Solutions over a set of points in ℂ⁺.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StieltjesSolution {
    #[serde(with = "complex_vec_serde")]
    pub grid: Vec<Complex64>,
    #[serde(with = "complex_vec_serde")]
    pub values: Vec<Complex64>,
    pub iterations: Vec<usize>,
    pub residuals: Vec<f64>,
}

impl StieltjesSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_iterations(&self) -> usize {
        self.iterations.iter().copied().max().unwrap_or(0)
    }
}

/// Cold-start solve at every grid point (points are independent).
pub fn solve_on_grid(law: &GeneralizedMpLaw, grid: &[Complex64], opts: &SolverOptions, exec: Exec) -> Result<StieltjesSolution> {
    let outcomes = exec.try_map(grid.len(), |k| law.solve(grid[k], opts))?;
    Ok(collect_solution(grid, outcomes))
}

/// Sequential solve where each point starts from its neighbour's solution.
pub fn solve_on_grid_warm(law: &GeneralizedMpLaw, grid: &[Complex64], opts: &SolverOptions) -> Result<StieltjesSolution> {
    let mut outcomes = Vec::with_capacity(grid.len());
    let mut prev: Option<Complex64> = None;
    for &z in grid {
        let o = law.solve(z, &SolverOptions { init: prev.or(opts.init), ..*opts })?;
        prev = Some(o.value);
        outcomes.push(o);
    }
    Ok(collect_solution(grid, outcomes))
}

fn collect_solution(grid: &[Complex64], outcomes: Vec<SolverOutcome>) -> StieltjesSolution {
    StieltjesSolution {
        grid: grid.to_vec(),
        values: outcomes.iter().map(|o| o.value).collect(),
        iterations: outcomes.iter().map(|o| o.iterations).collect(),
        residuals: outcomes.iter().map(|o| o.residual).collect(),
    }
}

pub(crate) mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

pub(crate) mod complex_vec_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
