//! Smallest eigenvalues of symmetric tridiagonal matrices by Sturm
//! sequence bisection.
//!
//! The one-dimensional certificate operators discretize to tridiagonal
//! matrices with thousands of nodes; bisection on the Sturm count is
//! robust, needs no vectors, and gives each eigenvalue to near machine
//! precision independent of clustering.

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`
/// (negative inertia of `T - x I` via the LDL^T recurrence).
fn count_below(d: &[f64], e: &[f64], x: f64) -> usize {
    let n = d.len();
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let e2 = e[i - 1] * e[i - 1];
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = d[i] - x - e2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues of the symmetric tridiagonal matrix
/// with diagonal `d` and off-diagonal `e` (`e.len() == d.len() - 1`),
/// ascending, each to absolute accuracy `tol_abs` (floored at a few ulps
/// of the spectral bound).
pub fn smallest_eigenvalues(d: &[f64], e: &[f64], count: usize, tol_abs: f64) -> Vec<f64> {
    let n = d.len();
    assert!(n >= 1 && e.len() == n - 1, "inconsistent tridiagonal sizes");
    let count = count.min(n);
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = hi.abs().max(lo.abs()).max(1.0);
    let tol = tol_abs.max(4.0 * f64::EPSILON * scale);

    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        // lambda_k = inf { x : count_below(x) >= k+1 }.
        let (mut a, mut b) = (lo, hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if count_below(d, e, mid) >= k + 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_case() {
        let d = [5.0, 1.0, 3.0];
        let e = [0.0, 0.0];
        let vals = smallest_eigenvalues(&d, &e, 3, 1e-12);
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-10);
        assert_relative_eq!(vals[2], 5.0, epsilon = 1e-10);
    }

    #[test]
    fn discrete_dirichlet_laplacian_closed_form() {
        // -u'' on (0,1), n interior nodes: eigenvalues 4/h^2 sin^2(k pi h / 2).
        let n = 500;
        let h = 1.0 / (n as f64 + 1.0);
        let d = vec![2.0 / (h * h); n];
        let e = vec![-1.0 / (h * h); n - 1];
        let vals = smallest_eigenvalues(&d, &e, 3, 1e-10);
        for (k, &v) in vals.iter().enumerate() {
            let exact = 4.0 / (h * h)
                * (0.5 * (k as f64 + 1.0) * std::f64::consts::PI * h).sin().powi(2);
            assert_relative_eq!(v, exact, epsilon = 1e-8 * exact);
        }
        // First eigenvalue approximates pi^2.
        assert_relative_eq!(vals[0], std::f64::consts::PI.powi(2), epsilon = 1e-4);
    }

    #[test]
    fn clustered_eigenvalues_resolved() {
        let d = [1.0, 1.0 + 1e-9, 10.0];
        let e = [1e-12, 1e-12];
        let vals = smallest_eigenvalues(&d, &e, 2, 1e-13);
        assert!(vals[0] <= vals[1]);
        assert!((vals[1] - vals[0] - 1e-9).abs() < 1e-10);
    }
}
