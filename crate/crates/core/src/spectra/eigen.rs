//! Eigenvalues of a real symmetric matrix: Householder reduction to
//! tridiagonal form followed by the implicit QL iteration with Wilkinson-type
//! shifts. Eigenvectors are never accumulated.

use ndarray::ArrayView2;

use crate::error::{RmtError, Result};
use crate::linalg::symmetrized;

const SYMMETRY_TOL: f64 = 1e-10;
const MAX_QL_SWEEPS: usize = 60;

/// All eigenvalues of `s`, ascending.
pub fn symmetric_eigenvalues(s: &ArrayView2<f64>) -> Result<Vec<f64>> {
    let sym = symmetrized(s, SYMMETRY_TOL)?;
    let n = sym.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<f64> = sym.iter().copied().collect();
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Reduces the row-major symmetric `a` in place; returns the diagonal and the
/// sub-diagonal (e[k] couples k and k+1, e[n-1] = 0).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let m = k + 1;
        let norm = (m..n).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            e[k] = 0.0;
            continue;
        }
        let x0 = a[m * n + k];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        for i in m..n {
            u[i] = a[i * n + k];
        }
        u[m] -= alpha;
        let h = (m..n).map(|i| u[i] * u[i]).sum::<f64>();
        if h == 0.0 {
            e[k] = x0;
            continue;
        }
        let beta = 2.0 / h;
        // w = β A22 u
        for i in m..n {
            let row = &a[i * n..(i + 1) * n];
            w[i] = beta * (m..n).map(|j| row[j] * u[j]).sum::<f64>();
        }
        // q = w − (β uᵀw / 2) u
        let kappa = 0.5 * beta * (m..n).map(|i| u[i] * w[i]).sum::<f64>();
        for i in m..n {
            w[i] -= kappa * u[i];
        }
        for i in m..n {
            let (ui, wi) = (u[i], w[i]);
            let row = &mut a[i * n..(i + 1) * n];
            for j in m..n {
                row[j] -= ui * w[j] + wi * u[j];
            }
        }
        e[k] = alpha;
    }
    for k in 0..n {
        d[k] = a[k * n + k];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    e[n - 1] = 0.0;
    (d, e)
}

/// Implicit QL on the symmetric tridiagonal (d, e); eigenvalues land in d.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(RmtError::SolverFailure { iterations: sweeps, residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
