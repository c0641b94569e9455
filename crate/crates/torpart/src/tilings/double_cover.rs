//! Three-cell partitions of `T(1, 1/sqrt 2)` projected from a nodal
//! pattern on the doubled torus.
//!
//! On `T(2, 1/sqrt 2)` the Laplacian eigenvalue `9 pi^2` is shared by
//! `cos(3 pi x)` and `cos(pi x) cos(2 sqrt 2 pi y)`, both of which flip
//! sign under the deck transformation `x -> x + 1` of the double cover
//! of `T(1, 1/sqrt 2)`. Any combination
//!
//! ```text
//! u = (1 - alpha) cos(3 pi x) + alpha cos(pi x) cos(2 sqrt 2 pi y)
//! ```
//!
//! is therefore an antiperiodic eigenfunction; whenever it has exactly
//! six nodal domains, the deck transformation pairs them (matching a
//! positive domain with a negative one), and each pair projects to one
//! cell of a 3-partition downstairs. Every cell inherits the restricted
//! eigenfunction as a positive Dirichlet eigenfunction, so its ground
//! energy is exactly `9 pi^2` — the same energy as the three-strip
//! partition, attained by cells that are not strips once `alpha > 0`.
//!
//! The construction is carried out on the grid: nodal domains are the
//! connected components of the strict sign sets of the sampled `u`, the
//! pairing is read off by shifting half a period, and the thin unsigned
//! layer along the nodal set joins a neighboring cell by majority vote.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{fill_unassigned_labels, CellGeometry, TilingKind, TilingSpec};
use crate::error::{Error, Result};
use crate::geom::TorusGeometry;
use crate::grid::{components_of, Grid};

/// Sampled sign structure of the antiperiodic eigenfunction on the
/// doubled torus: connected components of `{u > thr}` then `{u < -thr}`
/// in discovery order, with their signs.
struct NodalPattern {
    grid: Grid,
    comps: Vec<Vec<usize>>,
    positive: Vec<bool>,
}

fn nodal_pattern(alpha: f64, resolution: usize) -> Result<NodalPattern> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mixing weight must be finite, got {alpha}"
        )));
    }
    if resolution < 32 {
        return Err(Error::InvalidArgument(format!(
            "double-cover construction needs at least 32 nodes per unit, \
             got {resolution}"
        )));
    }
    let b = FRAC_1_SQRT_2;
    let ny = ((resolution as f64 * b).round() as usize).max(8);
    let grid = Grid::new(TorusGeometry::new(2.0, b)?, 2 * resolution, ny)?;
    let mut vals = vec![0.0; grid.len()];
    let mut max_abs: f64 = 0.0;
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let [x, y] = grid.point(i, j);
            let u = (1.0 - alpha) * (3.0 * PI * x).cos()
                + alpha * (PI * x).cos() * (2.0 * 2f64.sqrt() * PI * y).cos();
            vals[grid.node(i, j)] = u;
            max_abs = max_abs.max(u.abs());
        }
    }
    let thr = 1e-9 * max_abs;
    let pos: Vec<bool> = vals.iter().map(|&u| u > thr).collect();
    let neg: Vec<bool> = vals.iter().map(|&u| u < -thr).collect();
    let mut comps = components_of(&grid, &pos);
    let n_pos = comps.len();
    comps.extend(components_of(&grid, &neg));
    let positive = (0..comps.len()).map(|c| c < n_pos).collect();
    Ok(NodalPattern {
        grid,
        comps,
        positive,
    })
}

/// Build the 3-partition of `T(1, 1/sqrt 2)` whose cells are the
/// half-period-shift pairs of nodal domains of the mixed eigenfunction
/// at weight `alpha`, sampled at `resolution` nodes per unit length.
///
/// Fails when the mix does not have exactly six nodal domains (the
/// admissible weights form an interval starting at `alpha = 0`; see
/// [`six_domain_alpha_interval`]). The returned tiling is a raster
/// partition with `exact_lambda1 = 9 pi^2`.
pub fn double_cover_3partition(alpha: f64, resolution: usize) -> Result<TilingSpec> {
    let pattern = nodal_pattern(alpha, resolution)?;
    if pattern.comps.len() != 6 {
        return Err(Error::Construction(format!(
            "the eigenfunction mix at alpha = {alpha} yields {} nodal \
             domains on the double cover; the construction needs 6",
            pattern.comps.len()
        )));
    }
    let grid = pattern.grid;
    let mut comp_of: Vec<Option<usize>> = vec![None; grid.len()];
    for (c, comp) in pattern.comps.iter().enumerate() {
        for &idx in comp {
            comp_of[idx] = Some(c);
        }
    }
    // Pair each domain with its image under x -> x + 1 by majority over
    // shifted nodes; the thin unsigned layer makes a perfect-match test
    // too brittle at coarse resolutions.
    let mut partner = [usize::MAX; 6];
    for (c, comp) in pattern.comps.iter().enumerate() {
        let mut votes = [0usize; 6];
        for &idx in comp {
            let (i, j) = grid.coords(idx);
            let shifted = grid.node((i + resolution) % grid.nx, j);
            if let Some(t) = comp_of[shifted] {
                votes[t] += 1;
            }
        }
        let best = (0..6).max_by_key(|&t| votes[t]).unwrap();
        if votes[best] == 0 {
            return Err(Error::Construction(format!(
                "nodal domain {c} has no half-shift image at alpha = {alpha}"
            )));
        }
        partner[c] = best;
    }
    for c in 0..6 {
        if partner[c] == c
            || partner[partner[c]] != c
            || pattern.positive[c] == pattern.positive[partner[c]]
        {
            return Err(Error::Construction(format!(
                "nodal domains do not pair off under the half-period \
                 shift at alpha = {alpha}"
            )));
        }
    }
    // Cells are numbered by first appearance of either pair member.
    let mut pair_id = [usize::MAX; 6];
    let mut next = 0;
    for c in 0..6 {
        if pair_id[c] == usize::MAX {
            pair_id[c] = next;
            pair_id[partner[c]] = next;
            next += 1;
        }
    }
    // Project onto the base torus: the first half of the columns is a
    // fundamental domain of the deck transformation.
    let geom = TorusGeometry::new(1.0, grid.geom.b)?;
    let down = Grid::new(geom, resolution, grid.ny)?;
    let mut labels: Vec<Option<usize>> = vec![None; down.len()];
    for i in 0..down.nx {
        for j in 0..down.ny {
            labels[down.node(i, j)] =
                comp_of[grid.node(i, j)].map(|c| pair_id[c]);
        }
    }
    let labels = fill_unassigned_labels(&down, labels, 3)?;
    let spec = TilingSpec {
        kind: TilingKind::DoubleCover3,
        k: 3,
        geom,
        cells: CellGeometry::Raster { grid: down, labels },
        exact_lambda1: Some(9.0 * PI * PI),
        parameters: vec![("alpha".into(), alpha)],
    };
    spec.validate()?;
    Ok(spec)
}

/// Scan the mixing weight over `[0, 1]` in steps of `0.01` and return
/// the endpoints of the longest run where the sampled eigenfunction has
/// exactly six nodal domains, i.e. where [`double_cover_3partition`]
/// succeeds.
pub fn six_domain_alpha_interval(resolution: usize) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut run_start: Option<f64> = None;
    let mut run_end = 0.0;
    for step in 0..=100u32 {
        let alpha = f64::from(step) / 100.0;
        let six = nodal_pattern(alpha, resolution)?.comps.len() == 6;
        if six {
            run_start.get_or_insert(alpha);
            run_end = alpha;
        }
        if !six || step == 100 {
            if let Some(start) = run_start.take() {
                let keep = match best {
                    Some((lo, hi)) => run_end - start > hi - lo,
                    None => true,
                };
                if keep {
                    best = Some((start, run_end));
                }
            }
        }
    }
    best.ok_or_else(|| {
        Error::Construction(
            "no mixing weight in [0, 1] yields six nodal domains".into(),
        )
    })
}
