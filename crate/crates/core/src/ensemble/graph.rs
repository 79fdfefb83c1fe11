use ndarray::{Array1, Array2};

use super::data::DataMatrix;
use super::kernel::KernelSpec;
use crate::error::Result;

/// Weighted adjacency A (zero diagonal), degrees D = diag(A·1) and the
/// Laplacian L = D − A of the random geometric graph on the columns of X.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMatrices {
    pub adjacency: Array2<f64>,
    pub degrees: Array1<f64>,
    pub laplacian: Array2<f64>,
}

impl GraphMatrices {
    pub fn from_adjacency(adjacency: Array2<f64>) -> Self {
        let degrees = adjacency.sum_axis(ndarray::Axis(1));
        let mut laplacian = -&adjacency;
        for (i, d) in degrees.iter().enumerate() {
            laplacian[[i, i]] += d;
        }
        Self { adjacency, degrees, laplacian }
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree_matrix(&self) -> Array2<f64> {
        Array2::from_diag(&self.degrees)
    }
}

/// A_ij = K(Xᵢ, Xⱼ) for i ≠ j, evaluated pair by pair on explicit differences.
pub fn build_graph_matrices(x: &DataMatrix, kernel: &KernelSpec) -> Result<GraphMatrices> {
    kernel.check_dimension(x.p())?;
    let n = x.n();
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let xi = x.column(i);
        for j in (i + 1)..n {
            let v = kernel.eval(xi, x.column(j));
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
    }
    Ok(GraphMatrices::from_adjacency(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::data::{sample_data_matrix, EntryLaw};
    use crate::spectra::symmetric_eigenvalues;

    #[test]
    fn constant_kernel_gives_complete_graph() {
        let x = sample_data_matrix(4, 3, EntryLaw::Gaussian, 1.0, 1).unwrap();
        let g = build_graph_matrices(&x, &KernelSpec::constant(4).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let (a, l) = if i == j { (0.0, 2.0) } else { (1.0, -1.0) };
                assert_eq!(g.adjacency[[i, j]], a);
                // L = 3I − J
                assert_eq!(g.laplacian[[i, j]], l);
            }
        }
    }

    #[test]
    fn zero_radius_gives_empty_graph() {
        let x = sample_data_matrix(4, 6, EntryLaw::Gaussian, 1.0, 2).unwrap();
        let g = build_graph_matrices(&x, &KernelSpec::indicator(4, 0.0).unwrap()).unwrap();
        assert!(g.adjacency.iter().all(|&v| v == 0.0));
        assert!(g.laplacian.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gaussian_laplacian_has_zero_row_sums_and_is_psd() {
        let x = sample_data_matrix(5, 4, EntryLaw::Gaussian, 1.0, 3).unwrap();
        let g = build_graph_matrices(&x, &KernelSpec::gaussian(5, 1.0).unwrap()).unwrap();
        for row in g.laplacian.rows() {
            assert!(row.sum().abs() <= 1e-14 * row.len() as f64);
        }
        let ev = symmetric_eigenvalues(&g.laplacian.view()).unwrap();
        assert!(ev[0] >= -1e-8 * 4.0);
        for i in 0..4 {
            assert_eq!(g.adjacency[[i, i]], 0.0);
            for j in 0..4 {
                assert_eq!(g.adjacency[[i, j]], g.adjacency[[j, i]]);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let x = sample_data_matrix(4, 3, EntryLaw::Gaussian, 1.0, 1).unwrap();
        assert!(build_graph_matrices(&x, &KernelSpec::constant(5).unwrap()).is_err());
    }
}
