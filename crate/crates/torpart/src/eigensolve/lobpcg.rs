//! Locally optimal block preconditioned conjugate gradient iteration.
//!
//! Finds the lowest eigenpairs of a symmetric positive (semi)definite
//! sparse operator by Rayleigh-Ritz over the evolving subspace
//! `[X, M^{-1}R, P]` (current block, preconditioned residuals, previous
//! search directions). The basis is kept orthonormal with a paired
//! Gram-Schmidt that applies identical column operations to the cached
//! products `A S`, so each iteration costs one block matvec plus FFT
//! preconditioner applications.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eigensolve::{dense, EigenPair, Preconditioner};
use crate::error::{Error, Result};
use crate::grid::SparseOperator;

/// Iteration controls for the block solver.
pub struct IterOptions {
    /// Residual target: converged when `||Av - t v|| <= tol * (1 + |t|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Extra block vectors beyond `count` (guards clustered eigenvalues).
    pub block_extra: usize,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            tol: 1e-8,
            max_iter: 10_000,
            seed: 0x7051_1A5E,
            block_extra: 2,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Remove the components of every column of `x` along the (orthonormal)
/// deflation vectors.
fn project_out(x: &mut Array2<f64>, deflate: &[Vec<f64>]) {
    if deflate.is_empty() {
        return;
    }
    let (n, m) = x.dim();
    for c in 0..m {
        for d in deflate {
            let mut coef = 0.0;
            for i in 0..n {
                coef += d[i] * x[(i, c)];
            }
            for i in 0..n {
                x[(i, c)] -= coef * d[i];
            }
        }
    }
}

/// Orthonormalize raw deflation vectors; near-dependent ones are dropped.
pub fn orthonormalize_vectors(raw: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in raw {
        let mut w = v.clone();
        for _pass in 0..2 {
            for d in &out {
                let c = dot(d, &w);
                for i in 0..w.len() {
                    w[i] -= c * d[i];
                }
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm > 1e-12 * (dot(v, v).sqrt() + 1e-300) {
            w.iter_mut().for_each(|x| *x /= norm);
            out.push(w);
        }
    }
    out
}

/// Paired modified Gram-Schmidt: orthonormalizes the columns of `s`
/// starting at `start` (earlier columns are assumed orthonormal), applying
/// the same elementary operations to `a_s` so that `a_s = A s` is
/// preserved. Returns the kept column indices.
fn orthonormalize_paired(
    s: &mut Array2<f64>,
    a_s: &mut Array2<f64>,
    start: usize,
) -> Vec<usize> {
    let (n, m) = s.dim();
    let mut kept: Vec<usize> = (0..start).collect();
    for c in start..m {
        let orig_norm = {
            let mut t = 0.0;
            for i in 0..n {
                t += s[(i, c)] * s[(i, c)];
            }
            t.sqrt()
        };
        for _pass in 0..2 {
            for &k in &kept {
                let mut coef = 0.0;
                for i in 0..n {
                    coef += s[(i, k)] * s[(i, c)];
                }
                for i in 0..n {
                    s[(i, c)] -= coef * s[(i, k)];
                    a_s[(i, c)] -= coef * a_s[(i, k)];
                }
            }
        }
        let mut norm = 0.0;
        for i in 0..n {
            norm += s[(i, c)] * s[(i, c)];
        }
        let norm = norm.sqrt();
        if norm > 1e-8 * (orig_norm + 1e-300) && norm > 0.0 {
            let inv = 1.0 / norm;
            for i in 0..n {
                s[(i, c)] *= inv;
                a_s[(i, c)] *= inv;
            }
            kept.push(c);
        }
    }
    kept
}

fn take_columns(a: &Array2<f64>, cols: &[usize]) -> Array2<f64> {
    let n = a.nrows();
    let mut out = Array2::zeros((n, cols.len()));
    for (new_c, &c) in cols.iter().enumerate() {
        for i in 0..n {
            out[(i, new_c)] = a[(i, c)];
        }
    }
    out
}

/// Lowest `count` eigenpairs of `op` by preconditioned block iteration.
pub fn solve(
    op: &SparseOperator,
    count: usize,
    opts: &IterOptions,
    mut precond: Option<&mut dyn Preconditioner>,
    deflate_raw: &[Vec<f64>],
    initial: Option<&Array2<f64>>,
) -> Result<Vec<EigenPair>> {
    let n = op.n;
    if count == 0 {
        return Err(Error::InvalidArgument("eigenpair count must be >= 1".into()));
    }
    let deflate = orthonormalize_vectors(deflate_raw);
    let m = (count + opts.block_extra).min(n.saturating_sub(deflate.len()));
    if m < count || 3 * m + deflate.len() >= n {
        return Err(Error::InvalidArgument(format!(
            "operator dimension {n} too small for block iteration with count {count}; \
             use the dense path"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Array2<f64> = Array2::zeros((n, m));
    if let Some(init) = initial {
        let copy_cols = init.ncols().min(m);
        let copy_rows = init.nrows().min(n);
        for c in 0..copy_cols {
            for i in 0..copy_rows {
                x[(i, c)] = init[(i, c)];
            }
        }
    }
    // Fill untouched or zero columns with reproducible noise.
    for c in 0..m {
        let mut norm = 0.0;
        for i in 0..n {
            norm += x[(i, c)] * x[(i, c)];
        }
        if norm < 1e-300 {
            for i in 0..n {
                x[(i, c)] = rng.random_range(-1.0..1.0);
            }
        }
    }
    project_out(&mut x, &deflate);
    let mut ax = Array2::zeros((n, m));
    op.matmul_into(&x, &mut ax);
    {
        let kept = orthonormalize_paired(&mut x, &mut ax, 0);
        if kept.len() < m {
            // Rank-deficient start (e.g. a degenerate warm start): replace
            // lost directions with fresh noise and redo the products.
            let mut x2 = take_columns(&x, &kept);
            while x2.ncols() < m {
                let mut col = Array2::zeros((n, 1));
                for i in 0..n {
                    col[(i, 0)] = rng.random_range(-1.0..1.0);
                }
                project_out(&mut col, &deflate);
                let mut joined = Array2::zeros((n, x2.ncols() + 1));
                joined.slice_mut(ndarray::s![.., ..x2.ncols()]).assign(&x2);
                joined
                    .slice_mut(ndarray::s![.., x2.ncols()..])
                    .assign(&col);
                x2 = joined;
            }
            x = x2;
            op.matmul_into(&x, &mut ax);
            let kept2 = orthonormalize_paired(&mut x, &mut ax, 0);
            if kept2.len() < m {
                return Err(Error::InvalidArgument(
                    "could not build a full-rank starting block".into(),
                ));
            }
        }
    }

    let mut p: Option<Array2<f64>> = None;
    let mut ap: Option<Array2<f64>> = None;
    let mut theta = vec![0.0; m];
    let mut best_resid = f64::INFINITY;

    for iter in 0..opts.max_iter {
        // Rayleigh-Ritz within the current block.
        let mut g = Array2::zeros((m, m));
        for r in 0..m {
            for c in 0..m {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += x[(i, r)] * ax[(i, c)];
                }
                g[(r, c)] = acc;
            }
        }
        let (vals, rot) = dense::symmetric_eigen(&g);
        theta.copy_from_slice(&vals[..m]);
        x = x.dot(&rot);
        ax = ax.dot(&rot);

        // Residuals R = AX - X diag(theta).
        let mut r_block = ax.clone();
        for c in 0..m {
            for i in 0..n {
                r_block[(i, c)] -= theta[c] * x[(i, c)];
            }
        }
        let res: Vec<f64> = (0..m)
            .map(|c| {
                let mut t = 0.0;
                for i in 0..n {
                    t += r_block[(i, c)] * r_block[(i, c)];
                }
                t.sqrt()
            })
            .collect();
        let worst = (0..count)
            .map(|c| res[c] / (1.0 + theta[c].abs()))
            .fold(0.0_f64, f64::max);
        best_resid = best_resid.min(worst);

        if worst <= opts.tol {
            // Verify against drift with fresh products before declaring
            // victory; the residual contract is part of the API.
            op.matmul_into(&x, &mut ax);
            let mut ok = true;
            let mut pairs = Vec::with_capacity(count);
            for c in 0..count {
                let mut rr = 0.0;
                let mut rayleigh = 0.0;
                for i in 0..n {
                    let r_i = ax[(i, c)] - theta[c] * x[(i, c)];
                    rr += r_i * r_i;
                    rayleigh += x[(i, c)] * ax[(i, c)];
                }
                let resid = rr.sqrt();
                if resid > opts.tol * (1.0 + theta[c].abs()) * 1.5 {
                    ok = false;
                    break;
                }
                pairs.push(EigenPair {
                    value: rayleigh,
                    vector: x.column(c).to_vec(),
                    residual: resid,
                });
            }
            if ok {
                return Ok(pairs);
            }
            // Drift detected: continue iterating with the refreshed AX.
        }

        // Preconditioned residuals.
        if let Some(pc) = precond.as_deref_mut() {
            pc.set_shift(theta[count - 1].abs().max(1.0));
            let mut rin = vec![0.0; n];
            let mut rout = vec![0.0; n];
            for c in 0..m {
                for i in 0..n {
                    rin[i] = r_block[(i, c)];
                }
                pc.apply(&rin, &mut rout);
                for i in 0..n {
                    r_block[(i, c)] = rout[i];
                }
            }
        }
        project_out(&mut r_block, &deflate);
        let mut aw = Array2::zeros((n, m));
        op.matmul_into(&r_block, &mut aw);

        // Assemble the trial basis S = [X | W | P] with paired products.
        let p_cols = p.as_ref().map_or(0, |pp| pp.ncols());
        let s_cols = m + m + p_cols;
        let mut s = Array2::zeros((n, s_cols));
        let mut a_s = Array2::zeros((n, s_cols));
        s.slice_mut(ndarray::s![.., ..m]).assign(&x);
        a_s.slice_mut(ndarray::s![.., ..m]).assign(&ax);
        s.slice_mut(ndarray::s![.., m..2 * m]).assign(&r_block);
        a_s.slice_mut(ndarray::s![.., m..2 * m]).assign(&aw);
        if let (Some(pp), Some(app)) = (&p, &ap) {
            s.slice_mut(ndarray::s![.., 2 * m..]).assign(pp);
            a_s.slice_mut(ndarray::s![.., 2 * m..]).assign(app);
        }
        let kept = orthonormalize_paired(&mut s, &mut a_s, m);
        let s = take_columns(&s, &kept);
        let mut a_s = take_columns(&a_s, &kept);
        // Periodic refresh of cached products to cap roundoff drift.
        if iter % 25 == 24 {
            op.matmul_into(&s, &mut a_s);
        }
        let sc = s.ncols();

        // Rayleigh-Ritz over the expanded subspace.
        let mut g2 = Array2::zeros((sc, sc));
        for r in 0..sc {
            for c in 0..sc {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += s[(i, r)] * a_s[(i, c)];
                }
                g2[(r, c)] = acc;
            }
        }
        let (_vals2, rot2) = dense::symmetric_eigen(&g2);
        let c_x = rot2.slice(ndarray::s![.., ..m]).to_owned();
        let x_next = s.dot(&c_x);
        let ax_next = a_s.dot(&c_x);

        // New search directions: the part of X_next outside the old X.
        let mut c_p = c_x.clone();
        for r in 0..m.min(sc) {
            for c in 0..m {
                c_p[(r, c)] = 0.0;
            }
        }
        let mut p_next = s.dot(&c_p);
        let mut ap_next = a_s.dot(&c_p);
        let kept_p = orthonormalize_paired(&mut p_next, &mut ap_next, 0);
        if kept_p.is_empty() {
            p = None;
            ap = None;
        } else {
            p = Some(take_columns(&p_next, &kept_p));
            ap = Some(take_columns(&ap_next, &kept_p));
        }

        x = x_next;
        ax = ax_next;
    }

    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: best_resid,
        tolerance: opts.tol,
    })
}
