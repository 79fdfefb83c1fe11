//! Seeded construction of data matrices, kernel graphs and the truncated
//! covariance matrices built from them.

mod covariance;
mod data;
mod graph;
mod kernel;
mod moments;
mod reduction;
mod regime;

pub use covariance::{
    normalized_from_covariance, normalized_matrix_e, truncated_covariance, truncated_covariance_direct,
    truncated_covariance_rayleigh,
};
pub use data::{sample_data_matrix, DataMatrix, EntryLaw};
pub use graph::{build_graph_matrices, GraphMatrices};
pub use kernel::{z_alpha_from_beta, CustomKernel, KernelSpec, KernelVariant};
pub use moments::{
    alpha_gaussian_closed_form, alpha_gaussian_limit, alpha_indicator_closed_form, alpha_p,
    beta_p_sq, beta_sq_gaussian_closed_form, kernel_moment_mc, kernel_moment_mc_with, Estimate, EstimateMethod,
};
pub use reduction::{
    conditional_kernel_means, max_xi_prime_over_n, offdiagonal_norm, xi_bar_from_means, xi_bar_matrix,
    DEFAULT_MC_CONDITIONAL,
};
pub use regime::{Regime, RegimeConfig};
