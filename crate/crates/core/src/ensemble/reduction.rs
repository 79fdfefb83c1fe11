//! Diagnostics for the reductions M → M̃ → M̄ used in the limit theory:
//! conditional kernel means ξᵢ = E[K(Xᵢ,V) | Xᵢ], the fluctuations
//! ξ′ᵢ = Σ_{j≠i}(K(Xᵢ,Xⱼ) − ξᵢ), and M̄ = (1/n) Σ ξᵢ XᵢXᵢᵀ.

use ndarray::{s, Array1, Array2, Axis};

use super::data::DataMatrix;
use super::graph::GraphMatrices;
use super::kernel::KernelSpec;
use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;

pub const DEFAULT_MC_CONDITIONAL: usize = 2000;
const V_BLOCK: usize = 1024;

/// Estimates ξᵢ by averaging K(Xᵢ, V_k) over `mc_conditional` fresh draws
/// V_k ∼ X₁. The same draws are shared by every i.
pub fn conditional_kernel_means(x: &DataMatrix, kernel: &KernelSpec, mc_conditional: usize, seed: u64) -> Result<Array1<f64>> {
    kernel.check_dimension(x.p())?;
    if mc_conditional < 100 {
        return invalid(format!("mc_conditional must be at least 100, got {mc_conditional}"));
    }
    let (p, n) = (x.p(), x.n());
    let mut rng = rng_from_seed(seed);
    let law = x.entry_law();
    let sigma = x.sigma();
    let v = Array2::from_shape_simple_fn((p, mc_conditional), || law.sample(sigma, &mut rng));
    let mut sums = Array1::<f64>::zeros(n);

    if kernel.is_distance_profile() {
        let sq_x = Array1::from(x.column_sq_norms());
        let mut start = 0;
        while start < mc_conditional {
            let end = (start + V_BLOCK).min(mc_conditional);
            let vb = v.slice(s![.., start..end]);
            let sq_v: Vec<f64> = vb.columns().into_iter().map(|c| c.dot(&c)).collect();
            let g = x.entries().t().dot(&vb);
            for ((i, k), &gik) in g.indexed_iter() {
                let d2 = (sq_x[i] + sq_v[k] - 2.0 * gik).max(0.0);
                sums[i] += kernel.eval_sq_dist(d2).unwrap_or(0.0);
            }
            start = end;
        }
    } else {
        for i in 0..n {
            sums[i] = v.columns().into_iter().map(|vk| kernel.eval(x.column(i), vk)).sum();
        }
    }
    Ok(sums / mc_conditional as f64)
}

/// M̄ = (1/n) Σ ξᵢ XᵢXᵢᵀ for given weights.
pub fn xi_bar_from_means(x: &DataMatrix, xi: &Array1<f64>) -> Result<Array2<f64>> {
    if xi.len() != x.n() {
        return invalid("one weight per column required");
    }
    let xm = x.entries();
    let weighted = xm * &xi.view().insert_axis(Axis(0));
    Ok(weighted.dot(&xm.t()) / x.n() as f64)
}

/// M̄ with ξᵢ estimated by conditional Monte Carlo.
pub fn xi_bar_matrix(x: &DataMatrix, kernel: &KernelSpec, mc_conditional: usize, seed: u64) -> Result<Array2<f64>> {
    let xi = conditional_kernel_means(x, kernel, mc_conditional, seed)?;
    xi_bar_from_means(x, &xi)
}

/// max_i |ξ′ᵢ| / n with ξ′ᵢ = Σ_{j≠i}(A_ij − ξᵢ).
pub fn max_xi_prime_over_n(graph: &GraphMatrices, xi: &Array1<f64>) -> Result<f64> {
    let n = graph.n();
    if xi.len() != n {
        return invalid("one weight per vertex required");
    }
    let worst = graph
        .degrees
        .iter()
        .zip(xi.iter())
        .map(|(d, x)| (d - (n as f64 - 1.0) * x).abs())
        .fold(0.0f64, f64::max);
    Ok(worst / n as f64)
}

/// ‖(1/n²) X A Xᵀ‖_HS / √p, the off-diagonal part dropped in M → M̃.
pub fn offdiagonal_norm(x: &DataMatrix, graph: &GraphMatrices) -> Result<f64> {
    if graph.n() != x.n() {
        return invalid("graph and data sizes differ");
    }
    let xm = x.entries();
    let n = x.n() as f64;
    let t = xm.dot(&graph.adjacency).dot(&xm.t()) / (n * n);
    Ok(crate::linalg::hs_norm(&t.view()) / (x.p() as f64).sqrt())
}
