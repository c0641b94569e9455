//! Flat torus geometry and planar polygon primitives.
//!
//! The flat rectangular torus `T(a,b)` is the quotient `(R/aZ) x (R/bZ)`
//! with the flat metric; all partitions in this crate live on it. Tiling
//! cells are straight-edged polygons given as vertex loops in the plane
//! (a lift of the torus cell); membership on the torus is decided by
//! testing lattice translates of the lifted polygon.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side lengths of the flat rectangular torus `T(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGeometry {
    pub a: f64,
    pub b: f64,
}

impl TorusGeometry {
    /// New torus with sides `a`, `b`; both must be strictly positive.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "torus sides must be positive and finite, got a={a}, b={b}"
            )));
        }
        Ok(TorusGeometry { a, b })
    }

    /// Total area `a*b`.
    pub fn area(&self) -> f64 {
        self.a * self.b
    }

    /// Wrap a point into the fundamental domain `[0,a) x [0,b)`.
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0].rem_euclid(self.a), p[1].rem_euclid(self.b)]
    }
}

/// A planar simple polygon as a closed vertex loop (last vertex joins the
/// first). Tiling cells store one lift; edges crossing the periodic seam
/// are implicit in the lift coordinates extending outside `[0,a)x[0,b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        Polygon { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` as the ordered vertex pair `(v_i, v_{i+1 mod n})`.
    pub fn edge(&self, i: usize) -> ([f64; 2], [f64; 2]) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    /// Signed area by the shoelace formula (positive for counterclockwise
    /// loops).
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut s = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            s += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * s
    }

    /// Unsigned enclosed area.
    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Arithmetic mean of the vertices (adequate centering proxy for the
    /// convex cells used here).
    pub fn vertex_mean(&self) -> [f64; 2] {
        let n = self.vertices.len() as f64;
        let mut c = [0.0, 0.0];
        for v in &self.vertices {
            c[0] += v[0];
            c[1] += v[1];
        }
        [c[0] / n, c[1] / n]
    }

    /// Translate by `d`.
    pub fn translated(&self, d: [f64; 2]) -> Polygon {
        Polygon::new(
            self.vertices
                .iter()
                .map(|v| [v[0] + d[0], v[1] + d[1]])
                .collect(),
        )
    }

    /// Axis-aligned bounding box `([xmin, ymin], [xmax, ymax])`.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY, f64::INFINITY];
        let mut hi = [f64::NEG_INFINITY, f64::NEG_INFINITY];
        for v in &self.vertices {
            lo[0] = lo[0].min(v[0]);
            lo[1] = lo[1].min(v[1]);
            hi[0] = hi[0].max(v[0]);
            hi[1] = hi[1].max(v[1]);
        }
        (lo, hi)
    }

    /// Even-odd (ray crossing) interior test with the half-open vertex
    /// rule. Points exactly on an edge follow that half-open convention;
    /// rasterization pairs this with [`Polygon::boundary_distance`] to
    /// resolve all on-edge points as outside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let [x1, y1] = self.vertices[i];
            let [x2, y2] = self.vertices[(i + 1) % n];
            // Horizontal ray toward +x; half-open vertex rule avoids
            // double-counting a vertex shared by two edges.
            if (y1 > p[1]) != (y2 > p[1]) {
                let x_cross = x1 + (p[1] - y1) / (y2 - y1) * (x2 - x1);
                if p[0] < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance from `p` to the nearest point of the boundary loop.
    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.vertices.len() {
            let (a, b) = self.edge(i);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = if len2 > 0.0 {
                (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let foot = [a[0] + t * d[0], a[1] + t * d[1]];
            let dist = ((p[0] - foot[0]).powi(2) + (p[1] - foot[1]).powi(2)).sqrt();
            best = best.min(dist);
        }
        best
    }

    /// Whether the closed loop self-intersects (segment pair test; fine for
    /// the small vertex counts of tiling cells).
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let (a1, a2) = self.edge(i);
            for j in (i + 1)..n {
                // Adjacent edges share a vertex by construction.
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (b1, b2) = self.edge(j);
                if segments_intersect(a1, a2, b1, b2) {
                    return false;
                }
            }
        }
        true
    }

    /// Mirror image across the line through edge `side`.
    pub fn reflected_across_edge(&self, side: usize) -> Result<Polygon> {
        let (a, b) = self.edge(side);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        if len2 <= 1e-24 {
            return Err(Error::InvalidArgument(format!(
                "cannot reflect across degenerate edge {side}"
            )));
        }
        let reflect = |p: [f64; 2]| -> [f64; 2] {
            let t = ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2;
            let foot = [a[0] + t * d[0], a[1] + t * d[1]];
            [2.0 * foot[0] - p[0], 2.0 * foot[1] - p[1]]
        };
        Ok(Polygon::new(self.vertices.iter().map(|&v| reflect(v)).collect()))
    }
}

/// Strict segment intersection (shared endpoints do not count). Used to
/// reject self-intersecting lifts before rasterization.
fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
        (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    }
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

/// The planar polygon formed by a cell and its mirror image across the
/// chosen edge: the doubled domain used by the pair-compatibility test.
/// For congruent tiles glued along matching sides the reflection realizes
/// the gluing; the area doubles exactly.
pub fn glue_double(cell: &Polygon, side: usize) -> Result<Polygon> {
    let n = cell.len();
    if n < 3 {
        return Err(Error::InvalidArgument(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    if side >= n {
        return Err(Error::InvalidArgument(format!(
            "side index {side} out of range for a {n}-gon"
        )));
    }
    let mirrored = cell.reflected_across_edge(side)?;
    // Walk the cell boundary from the far end of the glued edge all the way
    // around to its near end, then return through the mirrored copy's
    // interior vertices. The mirrored loop has opposite orientation, so its
    // interior vertices are appended in reversed index order.
    let mut loop_vertices = Vec::with_capacity(2 * n - 2);
    for t in 0..n {
        loop_vertices.push(cell.vertices[(side + 1 + t) % n]);
    }
    for t in (1..n - 1).rev() {
        loop_vertices.push(mirrored.vertices[(side + 1 + t) % n]);
    }
    let glued = Polygon::new(loop_vertices);
    if !glued.is_simple() {
        return Err(Error::Construction(format!(
            "glued double across side {side} self-intersects"
        )));
    }
    Ok(glued)
}
