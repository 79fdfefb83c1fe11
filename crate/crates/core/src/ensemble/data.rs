use ndarray::{Array2, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;

/// Law of the i.i.d. entries, always centered; the variance is carried
/// separately as σ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryLaw {
    #[default]
    Gaussian,
    Rademacher,
    UniformCentered,
}

impl EntryLaw {
    pub fn sample<R: Rng + ?Sized>(self, sigma: f64, rng: &mut R) -> f64 {
        match self {
            EntryLaw::Gaussian => sigma * rng.sample::<f64, _>(StandardNormal),
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    sigma
                } else {
                    -sigma
                }
            }
            EntryLaw::UniformCentered => {
                let half_width = 3f64.sqrt() * sigma;
                rng.random_range(-half_width..half_width)
            }
        }
    }

    /// E w⁴ / σ⁴.
    pub fn kurtosis(self) -> f64 {
        match self {
            EntryLaw::Gaussian => 3.0,
            EntryLaw::Rademacher => 1.0,
            EntryLaw::UniformCentered => 9.0 / 5.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryLaw::Gaussian => "gaussian",
            EntryLaw::Rademacher => "rademacher",
            EntryLaw::UniformCentered => "uniform_centered",
        }
    }
}

/// A p×n matrix whose columns X₁, …, Xₙ are the observations.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    entries: Array2<f64>,
    entry_law: EntryLaw,
    sigma: f64,
    seed: Option<u64>,
}

impl DataMatrix {
    /// Wraps caller-provided entries (no seed attached).
    pub fn from_entries(entries: Array2<f64>, entry_law: EntryLaw, sigma: f64) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return invalid("data matrix must have at least one row and one column");
        }
        if !(sigma > 0.0) {
            return invalid(format!("sigma must be positive, got {sigma}"));
        }
        Ok(Self { entries: entries.as_standard_layout().into_owned(), entry_law, sigma, seed: None })
    }

    pub fn p(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn column(&self, i: usize) -> ArrayView1<'_, f64> {
        self.entries.column(i)
    }

    pub fn entry_law(&self) -> EntryLaw {
        self.entry_law
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Same matrix with every entry multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return invalid("scale factor must be positive");
        }
        Ok(Self { entries: &self.entries * t, entry_law: self.entry_law, sigma: self.sigma * t, seed: self.seed })
    }

    /// Squared column norms ‖Xᵢ‖².
    pub fn column_sq_norms(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.column(i).iter().map(|v| v * v).sum()).collect()
    }
}

/// Draws a p×n matrix of i.i.d. entries. Entries are generated in row-major
/// order from a single ChaCha8 stream keyed by `seed`.
pub fn sample_data_matrix(p: usize, n: usize, entry_law: EntryLaw, sigma: f64, seed: u64) -> Result<DataMatrix> {
    if p == 0 || n == 0 {
        return invalid(format!("dimensions must be positive, got p={p}, n={n}"));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return invalid(format!("sigma must be positive and finite, got {sigma}"));
    }
    let mut rng = rng_from_seed(seed);
    let entries = Array2::from_shape_simple_fn((p, n), || entry_law.sample(sigma, &mut rng));
    Ok(DataMatrix { entries, entry_law, sigma, seed: Some(seed) })
}
