//! Stieltjes–Perron inversion and CDFs tabulated from density grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, RmtError, Result};

/// Default sequence of imaginary offsets, coarse to fine.
pub const DEFAULT_V_SCHEDULE: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Densities below this are treated as rounding noise.
const NEGATIVE_SLACK: f64 = 1e-8;

/// f(x) ≈ Im s(x + iv)/π at each grid point.
pub fn stieltjes_invert<F>(s_fn: F, x_grid: &[f64], v: f64) -> Result<Vec<f64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(v > 0.0) || !v.is_finite() {
        return invalid(format!("inversion offset must be positive, got {v}"));
    }
    check_grid(x_grid)?;
    x_grid.iter().map(|&x| s_fn(Complex64::new(x, v)).map(|s| s.im / PI)).collect()
}

/// Inversion repeated over a v-schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedDensity {
    pub x: Vec<f64>,
    /// Values at the smallest v.
    pub density: Vec<f64>,
    pub v: f64,
    /// sup |f_v − f_{v′}| / 9 over the last two levels, the Richardson
    /// estimate of the error left at the finest level when it is O(v).
    /// `None` for a single-level schedule.
    pub stability: Option<f64>,
    /// Most negative raw value seen before clipping at 0.
    pub min_raw: f64,
}

/// Inverts at each v of the schedule (in the given order) and reports the
/// last level together with a stability estimate.
pub fn stieltjes_invert_refined<F>(s_fn: F, x_grid: &[f64], v_schedule: &[f64]) -> Result<RefinedDensity>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let levels = v_schedule
        .iter()
        .map(|&v| stieltjes_invert(&s_fn, x_grid, v))
        .collect::<Result<Vec<_>>>()?;
    refine_levels(x_grid, v_schedule, levels)
}

/// Assembles a [`RefinedDensity`] from densities computed elsewhere
/// (one vector per v in the schedule).
pub fn refine_levels(x_grid: &[f64], v_schedule: &[f64], levels: Vec<Vec<f64>>) -> Result<RefinedDensity> {
    if v_schedule.is_empty() || levels.len() != v_schedule.len() {
        return invalid("v-schedule must be nonempty and match the computed levels");
    }
    if levels.iter().any(|l| l.len() != x_grid.len()) {
        return invalid("density level length differs from the grid");
    }
    let finest = levels.last().unwrap();
    let stability = if levels.len() >= 2 {
        let prev = &levels[levels.len() - 2];
        Some(finest.iter().zip(prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / 9.0)
    } else {
        None
    };
    let min_raw = finest.iter().copied().fold(f64::INFINITY, f64::min);
    if min_raw < -NEGATIVE_SLACK * finest.iter().copied().fold(1.0, f64::max) {
        return Err(RmtError::ContractViolation(format!("inverted density is negative ({min_raw:.3e})")));
    }
    Ok(RefinedDensity {
        x: x_grid.to_vec(),
        density: finest.iter().map(|d| d.max(0.0)).collect(),
        v: *v_schedule.last().unwrap(),
        stability,
        min_raw,
    })
}

/// CDF built from a density grid by trapezoid accumulation plus an atom at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedCdf {
    pub x: Vec<f64>,
    /// Continuous part only, after renormalization.
    pub cumulative: Vec<f64>,
    pub atom_at_zero: f64,
    /// Raw trapezoid mass plus atom, before renormalization.
    pub raw_mass: f64,
    /// Factor applied to reach total mass 1.
    pub correction: f64,
}

/// Raw mass outside this window is an inversion-quality error.
pub const MASS_HARD_LIMITS: (f64, f64) = (0.9, 1.1);
/// Raw mass inside this window is the expected range.
pub const MASS_SOFT_LIMITS: (f64, f64) = (0.97, 1.03);

pub fn generalized_mp_cdf(x_grid: &[f64], density: &[f64], atom_at_zero: f64) -> Result<TabulatedCdf> {
    check_grid(x_grid)?;
    if density.len() != x_grid.len() {
        return invalid("density and grid lengths differ");
    }
    if density.iter().any(|&d| !(d >= -NEGATIVE_SLACK)) {
        return invalid("density must be nonnegative");
    }
    if !(0.0..=1.0).contains(&atom_at_zero) {
        return invalid(format!("atom mass must lie in [0, 1], got {atom_at_zero}"));
    }
    let mut cumulative = Vec::with_capacity(x_grid.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for k in 1..x_grid.len() {
        let (d0, d1) = (density[k - 1].max(0.0), density[k].max(0.0));
        acc += 0.5 * (d0 + d1) * (x_grid[k] - x_grid[k - 1]);
        cumulative.push(acc);
    }
    let raw_mass = acc + atom_at_zero;
    if !(MASS_HARD_LIMITS.0..=MASS_HARD_LIMITS.1).contains(&raw_mass) {
        return Err(RmtError::InversionQuality { mass: raw_mass });
    }
    let correction = 1.0 / raw_mass;
    cumulative.iter_mut().for_each(|c| *c *= correction);
    Ok(TabulatedCdf { x: x_grid.to_vec(), cumulative, atom_at_zero: atom_at_zero * correction, raw_mass, correction })
}

impl TabulatedCdf {
    /// Whether the raw mass stayed inside the expected window.
    pub fn within_soft_limits(&self) -> bool {
        (MASS_SOFT_LIMITS.0..=MASS_SOFT_LIMITS.1).contains(&self.raw_mass)
    }

    /// Piecewise-linear CDF; flat outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let atom = if x >= 0.0 { self.atom_at_zero } else { 0.0 };
        let n = self.x.len();
        let cont = if x <= self.x[0] {
            0.0
        } else if x >= self.x[n - 1] {
            return if x >= 0.0 || self.atom_at_zero == 0.0 { 1.0 } else { self.cumulative[n - 1] };
        } else {
            let k = self.x.partition_point(|&g| g <= x);
            let (x0, x1) = (self.x[k - 1], self.x[k]);
            let t = (x - x0) / (x1 - x0);
            self.cumulative[k - 1] + t * (self.cumulative[k] - self.cumulative[k - 1])
        };
        (cont + atom).clamp(0.0, 1.0)
    }
}

/// n evenly spaced points on [lo, hi].
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("grid needs lo < hi and at least 2 points (got [{lo}, {hi}], {n})"));
    }
    let h = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|k| if k == n - 1 { hi } else { lo + h * k as f64 }).collect())
}

fn check_grid(x: &[f64]) -> Result<()> {
    if x.len() < 2 {
        return invalid("grid needs at least 2 points");
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().any(|v| !v.is_finite()) {
        return invalid("grid must be finite and strictly ascending");
    }
    Ok(())
}
