//! Polygon rasterization on the periodic grid.
//!
//! A tiling cell is stored as one planar lift of its vertex loop; a grid
//! node belongs to the cell iff some lattice translate of the lift contains
//! the node's point. Membership uses the even-odd rule with a guard band:
//! nodes within `1e-9` of an edge resolve as outside, so masks are inner
//! approximations of the open cell (up to the guard width) and nodes on
//! grid-aligned walls are excluded deterministically even when the wall
//! coordinate differs from the node coordinate by float rounding.

use crate::error::{Error, Result};
use crate::geom::Polygon;
use crate::grid::{DomainMask, Grid};

/// Nodes closer than this to a polygon edge count as boundary, hence
/// outside. Far below any usable mesh width, far above coordinate
/// roundoff for the O(1)..O(100) geometry sizes used here.
const BOUNDARY_GUARD: f64 = 1e-9;

/// Lattice translate range that could overlap the fundamental domain.
fn lift_range(lo: f64, hi: f64, period: f64, span: f64) -> (i64, i64) {
    // Polygon lift + k*period must intersect [0, span].
    let kmin = ((-hi) / period).floor() as i64;
    let kmax = ((span - lo) / period).ceil() as i64;
    (kmin, kmax)
}

/// Rasterize a polygon into a torus-aware node mask.
///
/// The polygon must be simple as a planar loop (self-intersecting lifts are
/// rejected); it may extend outside the fundamental domain, in which case
/// membership wraps around the periodic seams.
pub fn mask_from_polygon(grid: &Grid, poly: &Polygon) -> Result<DomainMask> {
    if poly.len() < 3 {
        return Err(Error::InvalidArgument(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    if !poly.is_simple() {
        return Err(Error::InvalidArgument(
            "polygon lift self-intersects".into(),
        ));
    }
    let a = grid.geom.a;
    let b = grid.geom.b;
    let (lo, hi) = poly.bounding_box();
    let (kx_min, kx_max) = lift_range(lo[0], hi[0], a, a);
    let (ky_min, ky_max) = lift_range(lo[1], hi[1], b, b);

    let mut inside = vec![false; grid.len()];
    for kx in kx_min..=kx_max {
        for ky in ky_min..=ky_max {
            let shift = [kx as f64 * a, ky as f64 * b];
            let lifted = poly.translated(shift);
            let (llo, lhi) = lifted.bounding_box();
            // Node index window covered by this lift (cheap reject).
            let i0 = (llo[0] / grid.hx()).floor().max(0.0) as usize;
            let i1 = ((lhi[0] / grid.hx()).ceil() as i64).min(grid.nx as i64 - 1);
            let j0 = (llo[1] / grid.hy()).floor().max(0.0) as usize;
            let j1 = ((lhi[1] / grid.hy()).ceil() as i64).min(grid.ny as i64 - 1);
            if i1 < i0 as i64 || j1 < j0 as i64 {
                continue;
            }
            for i in i0..=(i1 as usize) {
                for j in j0..=(j1 as usize) {
                    let idx = grid.node(i, j);
                    if inside[idx] {
                        continue;
                    }
                    let p = grid.point(i, j);
                    if lifted.contains(p) && lifted.boundary_distance(p) > BOUNDARY_GUARD {
                        inside[idx] = true;
                    }
                }
            }
        }
    }
    Ok(DomainMask {
        grid: *grid,
        inside,
    })
}

/// Torus-aware point location against one polygon: true iff some lattice
/// translate of the lift contains `p`.
pub fn polygon_contains_torus(grid: &Grid, poly: &Polygon, p: [f64; 2]) -> bool {
    let a = grid.geom.a;
    let b = grid.geom.b;
    let (lo, hi) = poly.bounding_box();
    let (kx_min, kx_max) = lift_range(lo[0], hi[0], a, 0.0);
    let (ky_min, ky_max) = lift_range(lo[1], hi[1], b, 0.0);
    for kx in kx_min..=kx_max {
        for ky in ky_min..=ky_max {
            let q = [p[0] - kx as f64 * a, p[1] - ky as f64 * b];
            if poly.contains(q) {
                return true;
            }
        }
    }
    false
}
