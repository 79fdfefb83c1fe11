//! Eigenvalues of symmetric matrices, empirical spectral distributions and
//! distances between spectra and laws.

mod distance;
mod eigen;
mod esd;
mod histogram;

pub use distance::{hoffman_wielandt_bound, ks_distance, ks_two_sample, matrix_spectrum, wasserstein2};
pub use eigen::symmetric_eigenvalues;
pub use esd::{esd, EmpiricalSpectrum, SourceMeta};
pub use histogram::{histogram, Histogram};
