//! Small dense helpers shared by the ensemble and spectra modules.

use ndarray::{Array2, ArrayView2};

use crate::error::{invalid, Result};

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(m: &ArrayView2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn trace(m: &ArrayView2<f64>) -> f64 {
    m.diag().sum()
}

/// Largest |S_ij - S_ji| relative to the largest |S_ij|.
pub fn asymmetry(m: &ArrayView2<f64>) -> f64 {
    let n = m.nrows();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[[i, j]] - m[[j, i]]).abs());
        }
    }
    worst / scale
}

/// Returns (S + Sᵀ)/2 after checking squareness and symmetry to `rel_tol`.
pub fn symmetrized(m: &ArrayView2<f64>, rel_tol: f64) -> Result<Array2<f64>> {
    if m.nrows() != m.ncols() {
        return invalid(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols()));
    }
    let asym = asymmetry(m);
    if asym > rel_tol {
        return invalid(format!("matrix is not symmetric (relative asymmetry {asym:.3e})"));
    }
    Ok((m + &m.t()) * 0.5)
}

/// Relative HS distance ‖a − b‖ / max(‖a‖, ‖b‖), zero when both vanish.
pub fn relative_hs_distance(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> f64 {
    let diff = hs_norm(&(a - b).view());
    let scale = hs_norm(a).max(hs_norm(b));
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
