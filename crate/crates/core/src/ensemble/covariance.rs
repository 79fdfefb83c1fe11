//! The truncated covariance matrix
//! M = (1/2n²) Σᵢⱼ K(Xᵢ,Xⱼ)(Xᵢ − Xⱼ)(Xᵢ − Xⱼ)ᵀ = X L Xᵀ / n²
//! and its semicircle-regime normalization E = √(n/p)(M − α_p σ² I).

use ndarray::{s, Array1, Array2, Axis};

use super::data::DataMatrix;
use super::graph::GraphMatrices;
use super::kernel::KernelSpec;
use crate::error::{invalid, Result};

/// Column block width for the streamed builder.
const BLOCK: usize = 512;

/// Pairwise double sum over i < j with explicit outer products. O(n²p²);
/// meant for small problems and as the independent route in tests.
pub fn truncated_covariance_direct(x: &DataMatrix, kernel: &KernelSpec) -> Result<Array2<f64>> {
    kernel.check_dimension(x.p())?;
    let (p, n) = (x.p(), x.n());
    let mut m = Array2::<f64>::zeros((p, p));
    let mut diff = vec![0.0; p];
    for i in 0..n {
        let xi = x.column(i);
        for j in (i + 1)..n {
            let xj = x.column(j);
            let k = kernel.eval(xi, xj);
            if k == 0.0 {
                continue;
            }
            for (d, (a, b)) in diff.iter_mut().zip(xi.iter().zip(xj.iter())) {
                *d = a - b;
            }
            for r in 0..p {
                let w = k * diff[r];
                for c in r..p {
                    m[[r, c]] += w * diff[c];
                }
            }
        }
    }
    let scale = 1.0 / (n as f64 * n as f64);
    for r in 0..p {
        for c in r..p {
            let v = m[[r, c]] * scale;
            m[[r, c]] = v;
            m[[c, r]] = v;
        }
    }
    Ok(m)
}

/// M = X L Xᵀ / n² from a prebuilt graph.
pub fn truncated_covariance_rayleigh(x: &DataMatrix, graph: &GraphMatrices) -> Result<Array2<f64>> {
    if graph.n() != x.n() {
        return invalid(format!("graph has {} vertices but data has {} columns", graph.n(), x.n()));
    }
    let xm = x.entries();
    let n = x.n() as f64;
    let m = xm.dot(&graph.laplacian).dot(&xm.t()) / (n * n);
    Ok(symmetrize_in_place(m))
}

/// M for any kernel without materializing the n×n graph.
///
/// Distance-profile kernels are evaluated from the Gram matrix in column
/// blocks: M = (X diag(deg) Xᵀ − Σ_J (X A_J) X_Jᵀ) / n². Custom kernels fall
/// back to the explicit graph.
pub fn truncated_covariance(x: &DataMatrix, kernel: &KernelSpec) -> Result<Array2<f64>> {
    kernel.check_dimension(x.p())?;
    if !kernel.is_distance_profile() {
        let g = super::graph::build_graph_matrices(x, kernel)?;
        return truncated_covariance_rayleigh(x, &g);
    }
    let xm = x.entries();
    let (p, n) = (x.p(), x.n());
    let sq = Array1::from(x.column_sq_norms());
    let mut degrees = Array1::<f64>::zeros(n);
    let mut xaxt = Array2::<f64>::zeros((p, p));
    let mut start = 0;
    while start < n {
        let end = (start + BLOCK).min(n);
        let xj = xm.slice(s![.., start..end]);
        let mut a = xm.t().dot(&xj);
        for ((i, jj), v) in a.indexed_iter_mut() {
            let j = start + jj;
            *v = if i == j {
                0.0
            } else {
                let d2 = (sq[i] + sq[j] - 2.0 * *v).max(0.0);
                kernel.eval_sq_dist(d2).unwrap_or(0.0)
            };
        }
        degrees.slice_mut(s![start..end]).assign(&a.sum_axis(Axis(0)));
        let y = xm.dot(&a);
        xaxt += &y.dot(&xj.t());
        start = end;
    }
    let weighted = xm * &degrees.view().insert_axis(Axis(0));
    let xdxt = weighted.dot(&xm.t());
    let nn = n as f64 * n as f64;
    Ok(symmetrize_in_place((xdxt - xaxt) / nn))
}

/// E = √(n/p)(M − α σ² I).
pub fn normalized_from_covariance(m: &Array2<f64>, n: usize, alpha: f64, sigma: f64) -> Result<Array2<f64>> {
    if m.nrows() != m.ncols() {
        return invalid("covariance must be square");
    }
    let p = m.nrows();
    let mut e = m.clone();
    let shift = alpha * sigma * sigma;
    for i in 0..p {
        e[[i, i]] -= shift;
    }
    Ok(e * (n as f64 / p as f64).sqrt())
}

/// E = √(n/p)(M − α_p σ² I), the matrix whose spectrum is studied when p/n → 0
/// with p² ≫ n. The regime is not enforced here; see
/// [`RegimeConfig`](super::RegimeConfig).
pub fn normalized_matrix_e(x: &DataMatrix, kernel: &KernelSpec, alpha_p: f64, sigma: f64) -> Result<Array2<f64>> {
    let m = truncated_covariance(x, kernel)?;
    normalized_from_covariance(&m, x.n(), alpha_p, sigma)
}

fn symmetrize_in_place(mut m: Array2<f64>) -> Array2<f64> {
    let p = m.nrows();
    for r in 0..p {
        for c in (r + 1)..p {
            let v = 0.5 * (m[[r, c]] + m[[c, r]]);
            m[[r, c]] = v;
            m[[c, r]] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::data::{sample_data_matrix, EntryLaw};
    use crate::ensemble::graph::build_graph_matrices;
    use crate::linalg::relative_hs_distance;

    fn centered_covariance(x: &DataMatrix) -> Array2<f64> {
        let xm = x.entries();
        let mean = xm.mean_axis(Axis(1)).unwrap();
        let c = xm - &mean.insert_axis(Axis(1));
        c.dot(&c.t()) / x.n() as f64
    }

    #[test]
    fn constant_kernel_is_sample_covariance() {
        let x = sample_data_matrix(6, 9, EntryLaw::Gaussian, 1.0, 4).unwrap();
        let k = KernelSpec::constant(6).unwrap();
        let direct = truncated_covariance_direct(&x, &k).unwrap();
        let cov = centered_covariance(&x);
        assert!(relative_hs_distance(&direct.view(), &cov.view()) < 1e-12);
        for (a, b) in direct.iter().zip(cov.iter()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn single_column_gives_zero() {
        let x = sample_data_matrix(3, 1, EntryLaw::Gaussian, 1.0, 5).unwrap();
        let k = KernelSpec::constant(3).unwrap();
        assert!(truncated_covariance_direct(&x, &k).unwrap().iter().all(|&v| v == 0.0));
        assert!(truncated_covariance(&x, &k).unwrap().iter().all(|&v| v == 0.0));
    }

    /// Hand-rolled sum over all ordered pairs, (1/2n²)Σᵢⱼ.
    fn all_pairs_oracle(x: &DataMatrix, k: &KernelSpec) -> Array2<f64> {
        let (p, n) = (x.p(), x.n());
        let mut m = Array2::<f64>::zeros((p, p));
        for i in 0..n {
            for j in 0..n {
                let w = k.eval(x.column(i), x.column(j));
                let d = &x.column(i) - &x.column(j);
                for r in 0..p {
                    for c in 0..p {
                        m[[r, c]] += w * d[r] * d[c];
                    }
                }
            }
        }
        m / (2.0 * (n * n) as f64)
    }

    #[test]
    fn direct_matches_all_pairs_oracle_on_small_indicator_case() {
        let x = sample_data_matrix(3, 4, EntryLaw::Gaussian, 1.0, 6).unwrap();
        let k = KernelSpec::indicator(3, 2.0).unwrap();
        let oracle = all_pairs_oracle(&x, &k);
        let direct = truncated_covariance_direct(&x, &k).unwrap();
        assert!(relative_hs_distance(&direct.view(), &oracle.view()) < 1e-12);
    }

    #[test]
    fn constant_kernel_rayleigh_matches_direct() {
        let x = sample_data_matrix(3, 5, EntryLaw::Gaussian, 1.0, 7).unwrap();
        let k = KernelSpec::constant(3).unwrap();
        let g = build_graph_matrices(&x, &k).unwrap();
        let r = truncated_covariance_rayleigh(&x, &g).unwrap();
        let d = truncated_covariance_direct(&x, &k).unwrap();
        assert!(relative_hs_distance(&r.view(), &d.view()) < 1e-12);
    }

    #[test]
    fn indicator_routes_agree_at_moderate_size() {
        let x = sample_data_matrix(50, 100, EntryLaw::Gaussian, 1.0, 8).unwrap();
        let k = KernelSpec::indicator_from_z_alpha(50, 0.0, 1.0).unwrap();
        let g = build_graph_matrices(&x, &k).unwrap();
        let r = truncated_covariance_rayleigh(&x, &g).unwrap();
        let d = truncated_covariance_direct(&x, &k).unwrap();
        let s = truncated_covariance(&x, &k).unwrap();
        assert!(relative_hs_distance(&r.view(), &d.view()) < 1e-10);
        assert!(relative_hs_distance(&s.view(), &d.view()) < 1e-10);
    }

    #[test]
    fn streamed_builder_crosses_block_boundaries() {
        let x = sample_data_matrix(7, BLOCK + 37, EntryLaw::Rademacher, 1.0, 9).unwrap();
        let k = KernelSpec::gaussian(7, 0.9).unwrap();
        let g = build_graph_matrices(&x, &k).unwrap();
        let r = truncated_covariance_rayleigh(&x, &g).unwrap();
        let s = truncated_covariance(&x, &k).unwrap();
        assert!(relative_hs_distance(&r.view(), &s.view()) < 1e-10);
    }

    #[test]
    fn empty_laplacian_gives_zero() {
        let x = sample_data_matrix(4, 6, EntryLaw::Gaussian, 1.0, 10).unwrap();
        let g = GraphMatrices::from_adjacency(Array2::zeros((6, 6)));
        assert!(truncated_covariance_rayleigh(&x, &g).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rayleigh_rejects_mismatched_graph() {
        let x = sample_data_matrix(4, 6, EntryLaw::Gaussian, 1.0, 10).unwrap();
        let g = GraphMatrices::from_adjacency(Array2::zeros((5, 5)));
        assert!(truncated_covariance_rayleigh(&x, &g).is_err());
    }

    #[test]
    fn normalization_of_exact_centering_is_zero() {
        let m = Array2::<f64>::eye(4) * (0.3 * 4.0);
        let e = normalized_from_covariance(&m, 100, 0.3, 2.0).unwrap();
        assert!(e.iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn constant_kernel_normalization_reduces_to_centered_covariance() {
        let x = sample_data_matrix(5, 40, EntryLaw::Gaussian, 1.5, 11).unwrap();
        let k = KernelSpec::constant(5).unwrap();
        let e = normalized_matrix_e(&x, &k, 1.0, 1.5).unwrap();
        let mut expected = centered_covariance(&x);
        for i in 0..5 {
            expected[[i, i]] -= 1.5 * 1.5;
        }
        expected *= (40.0f64 / 5.0).sqrt();
        assert!(relative_hs_distance(&e.view(), &expected.view()) < 1e-12);
    }
}
