//! Limiting spectral laws: Marčenko–Pastur, semicircle and the generalized
//! Marčenko–Pastur law defined through a Stieltjes fixed-point equation.

mod inversion;
mod moments;
mod mp;
pub mod quadrature;
mod sc;
mod stieltjes;
mod zeta;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use inversion::{
    generalized_mp_cdf, linear_grid, refine_levels, stieltjes_invert, stieltjes_invert_refined, RefinedDensity,
    TabulatedCdf, DEFAULT_V_SCHEDULE, MASS_HARD_LIMITS, MASS_SOFT_LIMITS,
};
pub use moments::{d_moments, d_moments_mc, DFunction, DMomentErrors, DMoments, DMomentsEstimate};
pub use mp::MPLaw;
pub use sc::SCLaw;
pub use stieltjes::{
    solve_nonsmooth_stieltjes, solve_on_grid, solve_on_grid_warm, GeneralizedMpLaw, SolverOptions, SolverOutcome,
    StieltjesSolution,
};
pub use zeta::{normal_cdf, zeta_general, zeta_indicator, ZetaDistribution, ZetaProvenance};

use crate::error::Result;
use crate::exec::Exec;

/// A theoretical limiting law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum LawSpec {
    Mp(MPLaw),
    Sc(SCLaw),
    GeneralizedMp(GeneralizedMpLaw),
}

impl LawSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LawSpec::Mp(_) => "mp",
            LawSpec::Sc(_) => "sc",
            LawSpec::GeneralizedMp(_) => "genmp",
        }
    }

    pub fn stieltjes(&self, z: Complex64) -> Result<Complex64> {
        match self {
            LawSpec::Mp(l) => l.stieltjes(z),
            LawSpec::Sc(l) => l.stieltjes(z),
            LawSpec::GeneralizedMp(l) => l.solve(z, &SolverOptions::default()).map(|o| o.value),
        }
    }

    /// Closed-form density; `None` for the generalized law (use [`LawSpec::tabulate`]).
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            LawSpec::Mp(l) => Some(l.density(x)),
            LawSpec::Sc(l) => Some(l.density(x)),
            LawSpec::GeneralizedMp(_) => None,
        }
    }

    /// Closed-form CDF; `None` for the generalized law.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        match self {
            LawSpec::Mp(l) => Some(l.cdf(x)),
            LawSpec::Sc(l) => Some(l.cdf(x)),
            LawSpec::GeneralizedMp(_) => None,
        }
    }

    /// A grid covering the support with a margin.
    pub fn default_range(&self) -> (f64, f64) {
        match self {
            LawSpec::Mp(l) => {
                let (_, b) = l.edges();
                (-0.05 * b, 1.05 * b)
            }
            LawSpec::Sc(l) => (-1.05 * l.edge(), 1.05 * l.edge()),
            LawSpec::GeneralizedMp(l) => {
                let b = l.upper_edge().max(1e-3);
                (-0.05 * b, 1.05 * b)
            }
        }
    }

    /// Density and CDF on `x_grid`. Closed-form laws are evaluated directly;
    /// the generalized law is inverted over `v_schedule`.
    pub fn tabulate(&self, x_grid: &[f64], v_schedule: &[f64], opts: &SolverOptions, exec: Exec) -> Result<LawTable> {
        match self {
            LawSpec::Mp(_) | LawSpec::Sc(_) => {
                let density = exec.map(x_grid.len(), |k| self.density(x_grid[k]).unwrap());
                let cdf = exec.map(x_grid.len(), |k| self.cdf(x_grid[k]).unwrap());
                let atom = match self {
                    LawSpec::Mp(l) => l.atom(),
                    _ => 0.0,
                };
                Ok(LawTable {
                    law: self.clone(),
                    x: x_grid.to_vec(),
                    density,
                    cdf,
                    atom,
                    inversion: None,
                })
            }
            LawSpec::GeneralizedMp(law) => tabulate_generalized(self, law, x_grid, v_schedule, opts, exec),
        }
    }
}

fn tabulate_generalized(
    spec: &LawSpec,
    law: &GeneralizedMpLaw,
    x_grid: &[f64],
    v_schedule: &[f64],
    opts: &SolverOptions,
    exec: Exec,
) -> Result<LawTable> {
    let estimated_atom = law.estimated_atom_at_zero()?;
    // Only for c > 1 is the atom removed before the CDF is assembled.
    let atom = if law.c > 1.0 { estimated_atom } else { 0.0 };
    let mut levels = Vec::with_capacity(v_schedule.len());
    let mut max_residual = 0f64;
    let mut max_iterations = 0usize;
    for &v in v_schedule {
        let grid: Vec<Complex64> = x_grid.iter().map(|&x| Complex64::new(x, v)).collect();
        let sol = solve_on_grid(law, &grid, opts, exec)?;
        max_residual = max_residual.max(sol.max_residual());
        max_iterations = max_iterations.max(sol.max_iterations());
        let level = x_grid
            .iter()
            .zip(&sol.values)
            .map(|(&x, s)| {
                let poisson = atom * v / (std::f64::consts::PI * (x * x + v * v));
                s.im / std::f64::consts::PI - poisson
            })
            .collect();
        levels.push(level);
    }
    let refined = refine_levels(x_grid, v_schedule, levels)?;
    let tab = generalized_mp_cdf(x_grid, &refined.density, atom)?;
    let cdf = x_grid.iter().map(|&x| tab.eval(x)).collect();
    Ok(LawTable {
        law: spec.clone(),
        x: x_grid.to_vec(),
        density: refined.density.clone(),
        cdf,
        atom,
        inversion: Some(InversionReport {
            v: refined.v,
            stability: refined.stability,
            min_raw_density: refined.min_raw,
            raw_mass: tab.raw_mass,
            mass_correction: tab.correction,
            estimated_atom_at_zero: estimated_atom,
            max_residual,
            max_iterations,
            cdf: tab,
        }),
    })
}

/// Diagnostics of a numerically inverted law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub v: f64,
    pub stability: Option<f64>,
    pub min_raw_density: f64,
    pub raw_mass: f64,
    pub mass_correction: f64,
    pub estimated_atom_at_zero: f64,
    pub max_residual: f64,
    pub max_iterations: usize,
    #[serde(skip)]
    cdf: TabulatedCdf,
}

/// A law tabulated on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LawTable {
    pub law: LawSpec,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Atom at 0 included in `cdf`.
    pub atom: f64,
    pub inversion: Option<InversionReport>,
}

impl LawTable {
    /// CDF at any x: closed form when available, else the tabulated CDF.
    pub fn cdf_at(&self, x: f64) -> f64 {
        match (&self.law.cdf(x), &self.inversion) {
            (Some(v), _) => *v,
            (None, Some(inv)) => inv.cdf.eval(x),
            (None, None) => unreachable!("generalized law always carries an inversion report"),
        }
    }
}

impl Default for TabulatedCdf {
    fn default() -> Self {
        Self { x: vec![0.0, 1.0], cumulative: vec![0.0, 0.0], atom_at_zero: 0.0, raw_mass: 0.0, correction: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_with_unit_zeta_matches_mp() {
        let law = LawSpec::GeneralizedMp(GeneralizedMpLaw::new(0.4, 1.0, ZetaDistribution::point_mass(1.0).unwrap()).unwrap());
        let mp = MPLaw::new(0.4, 1.0).unwrap();
        let (lo, hi) = law.default_range();
        let grid = linear_grid(lo, hi, 300).unwrap();
        let tab = law.tabulate(&grid, &DEFAULT_V_SCHEDULE, &SolverOptions::default(), Exec::default()).unwrap();
        let inv = tab.inversion.as_ref().unwrap();
        assert!(inv.max_residual <= 1e-10);
        assert!((inv.raw_mass - 1.0).abs() < 3e-2);
        for x in [0.3, 0.8, 1.4, 2.0, 2.5] {
            assert!((tab.cdf_at(x) - mp.cdf(x)).abs() < 1e-2, "x={x}");
        }
    }

    #[test]
    fn closed_form_tables() {
        let law = LawSpec::Sc(SCLaw::new(1.0).unwrap());
        let grid = linear_grid(-2.5, 2.5, 11).unwrap();
        let tab = law.tabulate(&grid, &DEFAULT_V_SCHEDULE, &SolverOptions::default(), Exec::Sequential).unwrap();
        assert!(tab.inversion.is_none());
        assert_eq!(tab.cdf_at(0.0), 0.5);
        assert_eq!(tab.cdf[0], 0.0);
    }

    #[test]
    fn stieltjes_tails() {
        let zeta = zeta_indicator(0.5, 32).unwrap();
        let laws = [
            LawSpec::Mp(MPLaw::new(2.0, 1.5).unwrap()),
            LawSpec::Sc(SCLaw::new(0.3).unwrap()),
            LawSpec::GeneralizedMp(GeneralizedMpLaw::new(0.4, 1.0, zeta).unwrap()),
        ];
        let z = Complex64::new(0.0, 1e3);
        for l in &laws {
            let s = l.stieltjes(z).unwrap();
            assert!((s * z + 1.0).norm() < 1e-2, "{}", l.name());
        }
    }
}
