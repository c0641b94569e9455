//! Rows of congruent hexagons with the 120-degree meeting property.
//!
//! A straight-edged hexagon whose translates tile the plane is centrally
//! symmetric, and demanding 120-degree interior angles fixes its edge
//! directions up to one rotation: the edge vectors are `e_i = L_i u_i`
//! and their negatives, with `u_i` the unit vector at `theta + (i-1) 60`
//! degrees and `L_i > 0`. Its translation lattice is spanned by
//! `f_1 = e_1 + e_2` and `f_2 = e_2 + e_3`, so a target lattice basis
//! `(f_1, f_2)` determines the cell: matching components forces
//!
//! ```text
//! tan theta = (2 f1y - s f2x - f2y) / (2 f1x - f2x + s f2y),  s = sqrt 3,
//! L1 = 2 (f1 x u2)/s,  L2 = 2 (u1 x f1)/s,  L3 = 2 (u2 x f2)/s,
//! ```
//!
//! with `x` the planar cross product. A tiling of `T(1,b)` by `k`
//! congruent hexagons is exactly a plane tiling whose lattice contains
//! the period lattice `Z(1,0) + Z(0,b)` with index `k`; those
//! superlattices are enumerated in Hermite form (for each `d1 d2 = k`
//! and shift `0 <= c < d1`, the lattice spanned by `(1/d1, c b/k)` and
//! `(0, b/d2)`), each paired with every unimodular integer change of
//! basis with coefficients in `[-3, 3]`. Solutions with all edge lengths
//! positive are deduped by their sorted edge triple, and the returned
//! tiling is the member with the smallest Dirichlet ground energy, the
//! quantity the tiling is used to bound.
//!
//! The threshold [`hexagon_threshold`] marks where the reference family
//! of minimal-energy hexagon rows degenerates into strips; below it the
//! constructor refuses to build. The enumerated family itself stays
//! nonempty below the threshold (a flat brick-like row of hexagons
//! exists for every `b > 0`), so the threshold is enforced as a
//! precondition rather than rediscovered from the geometry.

use std::collections::HashSet;
use std::f64::consts::PI;

use rayon::prelude::*;

use super::{CellGeometry, TilingKind, TilingSpec};
use crate::error::{Error, Result};
use crate::geom::{Polygon, TorusGeometry};
use crate::spectral::planar_polygon_eigs;

/// Nodes per unit length of the ground-energy solves that rank the
/// candidate hexagons. Shape differences between distinct candidates
/// dwarf the raster error at this resolution, and the choice is part of
/// the deterministic construction.
const SELECT_RESOLUTION: usize = 64;

/// Unimodular basis coefficients are drawn from `[-RANGE, RANGE]`.
const COEFF_RANGE: i64 = 3;

/// Smallest admissible hexagon edge, relative to the lattice scale;
/// below this the cell is a degenerate parallelogram.
const MIN_EDGE: f64 = 1e-7;

/// Validity threshold of the hexagon family on `T(1,b)`: for
/// `b` above the returned value the row of `k` minimal-energy hexagons
/// exists; at the threshold it degenerates into the strip partition.
/// Only `k` in `{3, 4, 5}` is supported.
pub fn hexagon_threshold(k: usize) -> Result<f64> {
    match k {
        3 => Ok((11f64.sqrt() - 3f64.sqrt()) / 4.0),
        4 => Ok(1.0 / (2.0 * 3f64.sqrt())),
        5 => Ok((291f64.sqrt() - 5.0 * 3f64.sqrt()) / 36.0),
        _ => Err(Error::InvalidArgument(format!(
            "hexagon rows are constructed for k in {{3, 4, 5}}, got {k}"
        ))),
    }
}

/// One admissible all-120-degree hexagon together with the lattice data
/// that produced it.
struct Candidate {
    theta: f64,
    lengths: [f64; 3],
    /// Hermite data (d1, d2, c) of the superlattice.
    lattice: (usize, usize, usize),
}

/// Unit vector at angle `theta`.
fn dir(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

/// Solve `f1 = L1 u1 + L2 u2`, `f2 = L2 u2 + L3 u3` for the rotation and
/// the three positive edge lengths; `None` when no branch is admissible.
fn solve_edges(f1: [f64; 2], f2: [f64; 2]) -> Option<(f64, [f64; 3])> {
    let s = 3f64.sqrt();
    let scale = norm(f1).max(norm(f2));
    let num = 2.0 * f1[1] - s * f2[0] - f2[1];
    let den = 2.0 * f1[0] - f2[0] + s * f2[1];
    if num.hypot(den) < 1e-12 * scale {
        return None;
    }
    let theta = num.atan2(den);
    // The antipodal branch flips every u_i, hence every length; a sign
    // check on one branch covers both.
    let lengths_at = |t: f64| -> [f64; 3] {
        let u1 = dir(t);
        let u2 = dir(t + PI / 3.0);
        [
            2.0 * cross(f1, u2) / s,
            2.0 * cross(u1, f1) / s,
            2.0 * cross(u2, f2) / s,
        ]
    };
    let l = lengths_at(theta);
    let (theta, l) = if l.iter().all(|&x| x > 0.0) {
        (theta, l)
    } else if l.iter().all(|&x| x < 0.0) {
        (theta + PI, [-l[0], -l[1], -l[2]])
    } else {
        return None;
    };
    if l.iter().any(|&x| x < MIN_EDGE * scale) {
        return None;
    }
    // Guard against a spurious root: rebuild both lattice vectors.
    let u1 = dir(theta);
    let u2 = dir(theta + PI / 3.0);
    let u3 = dir(theta + 2.0 * PI / 3.0);
    let r1 = [
        l[0] * u1[0] + l[1] * u2[0] - f1[0],
        l[0] * u1[1] + l[1] * u2[1] - f1[1],
    ];
    let r2 = [
        l[1] * u2[0] + l[2] * u3[0] - f2[0],
        l[1] * u2[1] + l[2] * u3[1] - f2[1],
    ];
    if norm(r1) > 1e-9 * scale || norm(r2) > 1e-9 * scale {
        return None;
    }
    Some((theta, l))
}

/// Vertices of the hexagon with edge vectors `L_i u(theta + (i-1) 60deg)`
/// and their negatives, starting at the origin.
fn hexagon_vertices(theta: f64, lengths: [f64; 3]) -> Vec<[f64; 2]> {
    let e: Vec<[f64; 2]> = (0..3)
        .map(|i| {
            let u = dir(theta + i as f64 * PI / 3.0);
            [lengths[i] * u[0], lengths[i] * u[1]]
        })
        .collect();
    vec![
        [0.0, 0.0],
        e[0],
        [e[0][0] + e[1][0], e[0][1] + e[1][1]],
        [
            e[0][0] + e[1][0] + e[2][0],
            e[0][1] + e[1][1] + e[2][1],
        ],
        [e[1][0] + e[2][0], e[1][1] + e[2][1]],
        e[2],
    ]
}

/// All distinct admissible hexagons for `k` cells on `T(1,b)`, in a
/// deterministic enumeration order.
fn enumerate_candidates(k: usize, b: f64) -> Vec<Candidate> {
    let mut seen: HashSet<[i64; 3]> = HashSet::new();
    let mut out = Vec::new();
    for d1 in 1..=k {
        if k % d1 != 0 {
            continue;
        }
        let d2 = k / d1;
        for c in 0..d1 {
            let a_vec = [1.0 / d1 as f64, c as f64 * b / k as f64];
            let b_vec = [0.0, b / d2 as f64];
            for m11 in -COEFF_RANGE..=COEFF_RANGE {
                for m12 in -COEFF_RANGE..=COEFF_RANGE {
                    for m21 in -COEFF_RANGE..=COEFF_RANGE {
                        for m22 in -COEFF_RANGE..=COEFF_RANGE {
                            if (m11 * m22 - m12 * m21).abs() != 1 {
                                continue;
                            }
                            let f1 = [
                                m11 as f64 * a_vec[0] + m12 as f64 * b_vec[0],
                                m11 as f64 * a_vec[1] + m12 as f64 * b_vec[1],
                            ];
                            let f2 = [
                                m21 as f64 * a_vec[0] + m22 as f64 * b_vec[0],
                                m21 as f64 * a_vec[1] + m22 as f64 * b_vec[1],
                            ];
                            if let Some((theta, lengths)) = solve_edges(f1, f2) {
                                let mut key: Vec<i64> = lengths
                                    .iter()
                                    .map(|&l| (l * 1e8).round() as i64)
                                    .collect();
                                key.sort_unstable();
                                if seen.insert([key[0], key[1], key[2]]) {
                                    out.push(Candidate {
                                        theta,
                                        lengths,
                                        lattice: (d1, d2, c),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Build the row of `k` congruent 120-degree hexagons tiling `T(1,b)`.
///
/// The free shape parameters left by the angle and lattice constraints
/// are resolved by minimizing the cell's Dirichlet ground energy over
/// the enumerated family, since the tiling's purpose is to upper-bound
/// the minimal partition energy. Fails below [`hexagon_threshold`]
/// (where the minimal-energy family degenerates into strips) and for
/// `b > 1` (use the `k` strips of the short direction instead).
pub fn hexagonal_tiling(k: usize, b: f64) -> Result<TilingSpec> {
    let threshold = hexagon_threshold(k)?;
    if !(b > threshold) {
        return Err(Error::InvalidArgument(format!(
            "hexagon construction is degenerate below the threshold: \
             need b > {threshold:.6}, got b = {b}"
        )));
    }
    if !(b <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "hexagon rows are built for b in (threshold, 1], got b = {b}"
        )));
    }
    let candidates = enumerate_candidates(k, b);
    if candidates.is_empty() {
        return Err(Error::Construction(format!(
            "no admissible hexagon for k = {k}, b = {b} within the \
             enumerated lattice bases"
        )));
    }
    // Rank every admissible shape by its ground energy; candidates too
    // thin to evaluate at the selection resolution cannot win.
    let energies: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|cand| {
            let poly = Polygon::new(hexagon_vertices(cand.theta, cand.lengths));
            planar_polygon_eigs(&poly, 1, SELECT_RESOLUTION, 1e-7)
                .ok()
                .map(|pairs| pairs[0].0)
        })
        .collect();
    let best = energies
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.map(|v| (i, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::Construction(format!(
                "every admissible hexagon for k = {k}, b = {b} was too \
                 degenerate to evaluate"
            ))
        })?;
    let cand = &candidates[best];
    let geom = TorusGeometry::new(1.0, b)?;
    let (d1, d2, c) = cand.lattice;
    let a_vec = [1.0 / d1 as f64, c as f64 * b / k as f64];
    let b_vec = [0.0, b / d2 as f64];
    let base = hexagon_vertices(cand.theta, cand.lengths);
    let mut cells = Vec::with_capacity(k);
    for i in 0..d1 {
        for j in 0..d2 {
            let shift = geom.wrap([
                i as f64 * a_vec[0] + j as f64 * b_vec[0],
                i as f64 * a_vec[1] + j as f64 * b_vec[1],
            ]);
            cells.push(Polygon::new(base.clone()).translated(shift));
        }
    }
    let spec = TilingSpec {
        kind: TilingKind::Hexagons,
        k,
        geom,
        cells: CellGeometry::Polygons(cells),
        exact_lambda1: None,
        parameters: vec![
            ("b".into(), b),
            ("theta".into(), cand.theta),
            ("edge_1".into(), cand.lengths[0]),
            ("edge_2".into(), cand.lengths[1]),
            ("edge_3".into(), cand.lengths[2]),
            ("lattice_d1".into(), d1 as f64),
            ("lattice_d2".into(), d2 as f64),
            ("lattice_shift".into(), c as f64),
        ],
    };
    spec.validate()?;
    verify_meeting_property(&spec)?;
    Ok(spec)
}

/// Check the equal-angle meeting property of a polygon tiling on the
/// torus: every vertex is shared by exactly three cell corners, and the
/// three incident edge directions are pairwise at 120 degrees, both to
/// `1e-9`. The construction guarantees this in exact arithmetic; the
/// check guards the floating-point realization and is exported so
/// callers can audit a deserialized or hand-built tiling.
pub fn verify_meeting_property(tiling: &TilingSpec) -> Result<()> {
    let polys = match &tiling.cells {
        CellGeometry::Polygons(polys) => polys,
        CellGeometry::Raster { .. } => {
            return Err(Error::InvalidArgument(
                "meeting-property checks need straight-edged cells".into(),
            ))
        }
    };
    let geom = tiling.geom;
    let tol = 1e-9;
    // Collect every cell corner with its two incident edge directions.
    struct Corner {
        at: [f64; 2],
        dirs: [[f64; 2]; 2],
    }
    let mut corners = Vec::new();
    for poly in polys {
        let n = poly.len();
        for i in 0..n {
            let v = poly.vertices[i];
            let prev = poly.vertices[(i + n - 1) % n];
            let next = poly.vertices[(i + 1) % n];
            let unit = |to: [f64; 2]| -> [f64; 2] {
                let d = [to[0] - v[0], to[1] - v[1]];
                let len = norm(d);
                [d[0] / len, d[1] / len]
            };
            corners.push(Corner {
                at: geom.wrap(v),
                dirs: [unit(next), unit(prev)],
            });
        }
    }
    // Cluster corners by wrapped position (minimum-image metric).
    let close = |p: [f64; 2], q: [f64; 2]| -> bool {
        let dx = (p[0] - q[0]).abs();
        let dy = (p[1] - q[1]).abs();
        dx.min(geom.a - dx) < tol && dy.min(geom.b - dy) < tol
    };
    let mut cluster_of = vec![usize::MAX; corners.len()];
    let mut reps: Vec<[f64; 2]> = Vec::new();
    for (ci, corner) in corners.iter().enumerate() {
        match reps.iter().position(|&r| close(r, corner.at)) {
            Some(c) => cluster_of[ci] = c,
            None => {
                reps.push(corner.at);
                cluster_of[ci] = reps.len() - 1;
            }
        }
    }
    for (c, rep) in reps.iter().enumerate() {
        let members: Vec<&Corner> = corners
            .iter()
            .zip(&cluster_of)
            .filter(|(_, &cc)| cc == c)
            .map(|(corner, _)| corner)
            .collect();
        if members.len() != 3 {
            return Err(Error::Construction(format!(
                "vertex near ({:.6}, {:.6}) has degree {} instead of 3",
                rep[0],
                rep[1],
                members.len()
            )));
        }
        // Six incident half-edges, three distinct directions each shared
        // by two corners.
        let mut dirs: Vec<[f64; 2]> = Vec::new();
        for corner in &members {
            for d in corner.dirs {
                if !dirs
                    .iter()
                    .any(|&e| cross(e, d).abs() < tol && e[0] * d[0] + e[1] * d[1] > 0.0)
                {
                    dirs.push(d);
                }
            }
        }
        if dirs.len() != 3 {
            return Err(Error::Construction(format!(
                "vertex near ({:.6}, {:.6}) meets {} edge directions \
                 instead of 3",
                rep[0],
                rep[1],
                dirs.len()
            )));
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let dot = dirs[i][0] * dirs[j][0] + dirs[i][1] * dirs[j][1];
                if (dot + 0.5).abs() > tol {
                    return Err(Error::Construction(format!(
                        "edges at ({:.6}, {:.6}) meet at cos = {dot:.12} \
                         instead of -1/2",
                        rep[0], rep[1]
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thresholds_match_the_closed_forms() {
        assert_relative_eq!(hexagon_threshold(3).unwrap(), 0.396, epsilon = 5e-4);
        assert_relative_eq!(hexagon_threshold(4).unwrap(), 0.289, epsilon = 5e-4);
        assert_relative_eq!(hexagon_threshold(5).unwrap(), 0.233, epsilon = 5e-4);
        assert!(hexagon_threshold(2).is_err());
        assert!(hexagon_threshold(6).is_err());
    }

    #[test]
    fn construction_refuses_b_at_or_below_threshold() {
        assert!(hexagonal_tiling(3, 0.35).is_err());
        assert!(hexagonal_tiling(3, hexagon_threshold(3).unwrap()).is_err());
        assert!(hexagonal_tiling(4, 0.28).is_err());
        assert!(hexagonal_tiling(5, 0.23).is_err());
        assert!(hexagonal_tiling(3, 1.2).is_err());
        assert!(hexagonal_tiling(3, f64::NAN).is_err());
    }

    #[test]
    fn tilings_exist_just_above_the_threshold() {
        for k in [3usize, 4, 5] {
            let b = hexagon_threshold(k).unwrap() + 0.002;
            let tiling = hexagonal_tiling(k, b).unwrap();
            assert_eq!(tiling.k, k);
            let share = b / k as f64;
            for area in tiling.cell_areas() {
                assert_relative_eq!(area, share, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn every_vertex_meets_three_cells_at_equal_angles() {
        // The constructor runs the check itself; rerun it standalone on
        // a generic member as the audit entry point.
        let tiling = hexagonal_tiling(3, 0.9).unwrap();
        verify_meeting_property(&tiling).unwrap();
        let tiling = hexagonal_tiling(5, 0.6).unwrap();
        verify_meeting_property(&tiling).unwrap();
    }

    #[test]
    fn hexagons_overtake_strips_as_the_torus_fattens() {
        // Far from the crossing the sign of lambda_1(hex) - 9 pi^2 is
        // robust even at a coarse 64 nodes per unit.
        let nine = 9.0 * PI * PI;
        let thin = hexagonal_tiling(3, 0.6).unwrap();
        assert!(thin.fd_energy(64, 1e-8).unwrap() > nine);
        let fat = hexagonal_tiling(3, 0.9).unwrap();
        assert!(fat.fd_energy(64, 1e-8).unwrap() < nine);
    }

    #[test]
    fn selected_branch_varies_continuously_in_b() {
        // The minimizing member changes smoothly; a branch jump would
        // show up as an O(1) energy jump between nearby b values.
        let mut prev: Option<f64> = None;
        for step in 0..=4 {
            let b = 0.8 + 0.05 * step as f64;
            let lam = hexagonal_tiling(3, b)
                .unwrap()
                .fd_energy(48, 1e-8)
                .unwrap();
            if let Some(p) = prev {
                assert!(
                    (lam - p).abs() < 200.0 * 0.05 + 2.0,
                    "energy jumped from {p} to {lam} at b = {b}"
                );
            }
            prev = Some(lam);
        }
    }

    #[test]
    fn hexagon_row_covers_the_torus() {
        let tiling = hexagonal_tiling(3, 0.72).unwrap();
        let raster = tiling.rasterize(97).unwrap();
        assert!(raster.coverage_fraction() >= 0.995);
        assert!(raster.multiple_fraction() <= 0.005);
        let raster = hexagonal_tiling(4, 0.5).unwrap().rasterize(101).unwrap();
        assert!(raster.coverage_fraction() >= 0.995);
        assert!(raster.multiple_fraction() <= 0.005);
    }
}
