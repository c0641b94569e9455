//! Periodic finite-difference grid on the flat torus.
//!
//! Nodes sit at `(i*hx, j*hy)` for `i in 0..nx`, `j in 0..ny` with periodic
//! index arithmetic in both directions, matching the five-point Laplacian
//! `(Lu)_{ij} = (2u_{ij} - u_{i+1,j} - u_{i-1,j})/hx^2
//!            + (2u_{ij} - u_{i,j+1} - u_{i,j-1})/hy^2`.
//! Dirichlet domains are realized by node deletion: rows and columns of
//! outside nodes are removed while inside diagonals keep the full stencil
//! weight, which enforces `u = 0` at the first excluded node.

pub mod components;
pub mod polygon;

pub use components::{components_of, connected_components};
pub use polygon::{mask_from_polygon, polygon_contains_torus};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::TorusGeometry;

/// Uniform periodic grid over `T(a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub geom: TorusGeometry,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    /// New grid; both directions need at least 8 nodes for the stencil and
    /// the rasterization heuristics to make sense.
    pub fn new(geom: TorusGeometry, nx: usize, ny: usize) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidArgument(format!(
                "grid must be at least 8x8, got {nx}x{ny}"
            )));
        }
        Ok(Grid { geom, nx, ny })
    }

    /// Mesh step in x.
    pub fn hx(&self) -> f64 {
        self.geom.a / self.nx as f64
    }

    /// Mesh step in y.
    pub fn hy(&self) -> f64 {
        self.geom.b / self.ny as f64
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major node index of `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    /// Inverse of [`Grid::node`].
    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.ny, idx % self.ny)
    }

    /// Torus point of node `(i, j)`.
    #[inline]
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [i as f64 * self.hx(), j as f64 * self.hy()]
    }

    /// The four stencil neighbors of node `idx` with periodic wrap.
    #[inline]
    pub fn neighbors(&self, idx: usize) -> [usize; 4] {
        let (i, j) = self.coords(idx);
        let ip = if i + 1 == self.nx { 0 } else { i + 1 };
        let im = if i == 0 { self.nx - 1 } else { i - 1 };
        let jp = if j + 1 == self.ny { 0 } else { j + 1 };
        let jm = if j == 0 { self.ny - 1 } else { j - 1 };
        [
            self.node(ip, j),
            self.node(im, j),
            self.node(i, jp),
            self.node(i, jm),
        ]
    }

    /// Area associated with one node (cell area of the uniform mesh).
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }
}

/// Scalar values on the nodes of a [`Grid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: Grid) -> Self {
        GridField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        GridField {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Field sampled from a function of the torus point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let mut values = vec![0.0; grid.len()];
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                values[grid.node(i, j)] = f(grid.point(i, j));
            }
        }
        GridField { grid, values }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field length {} does not match grid {}x{}",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        Ok(GridField { grid, values })
    }

    /// Euclidean norm of the value vector.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Maximum absolute value.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Boolean membership field: the discretized open set.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMask {
    pub grid: Grid,
    pub inside: Vec<bool>,
}

impl DomainMask {
    pub fn empty(grid: Grid) -> Self {
        DomainMask {
            grid,
            inside: vec![false; grid.len()],
        }
    }

    pub fn full(grid: Grid) -> Self {
        DomainMask {
            grid,
            inside: vec![true; grid.len()],
        }
    }

    pub fn from_pred(grid: Grid, mut pred: impl FnMut([f64; 2]) -> bool) -> Self {
        let mut inside = vec![false; grid.len()];
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                inside[grid.node(i, j)] = pred(grid.point(i, j));
            }
        }
        DomainMask { grid, inside }
    }

    /// Number of inside nodes.
    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Pixel-count area estimate: inside nodes times cell area.
    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    /// Indices of inside nodes in row-major order.
    pub fn inside_indices(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&i| self.inside[i]).collect()
    }

    /// Set-complement on the same grid.
    pub fn complement(&self) -> DomainMask {
        DomainMask {
            grid: self.grid,
            inside: self.inside.iter().map(|b| !b).collect(),
        }
    }

    /// Whether `self` is a subset of `other`.
    pub fn subset_of(&self, other: &DomainMask) -> bool {
        self.inside
            .iter()
            .zip(&other.inside)
            .all(|(&a, &b)| !a || b)
    }

    /// Scatter a restricted vector (one entry per inside node, row-major
    /// order) back onto the full grid, zero outside.
    pub fn embed(&self, restricted: &[f64]) -> GridField {
        let mut field = GridField::zeros(self.grid);
        let mut r = 0;
        for (idx, &ins) in self.inside.iter().enumerate() {
            if ins {
                field.values[idx] = restricted[r];
                r += 1;
            }
        }
        debug_assert_eq!(r, restricted.len());
        field
    }
}

/// Symmetric sparse operator in compressed sparse row form.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl SparseOperator {
    /// Matrix-vector product `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for row in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[row] = acc;
        }
    }

    /// Product against a block of column vectors stored as an
    /// `(n x m)` array: `Y = A X`.
    pub fn matmul_into(&self, x: &ndarray::Array2<f64>, y: &mut ndarray::Array2<f64>) {
        let m = x.ncols();
        debug_assert_eq!(x.nrows(), self.n);
        debug_assert_eq!(y.dim(), x.dim());
        for row in 0..self.n {
            let mut acc = vec![0.0; m];
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                let v = self.vals[k];
                let xr = x.row(self.cols[k]);
                for (a, &xv) in acc.iter_mut().zip(xr.iter()) {
                    *a += v * xv;
                }
            }
            for (c, &a) in acc.iter().enumerate() {
                y[(row, c)] = a;
            }
        }
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for row in 0..self.n {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                if self.cols[k] == row {
                    d[row] += self.vals[k];
                }
            }
        }
        d
    }

    /// Dense copy (for the small-operator eigensolver path and tests).
    pub fn to_dense(&self) -> ndarray::Array2<f64> {
        let mut a = ndarray::Array2::zeros((self.n, self.n));
        for row in 0..self.n {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                a[(row, self.cols[k])] += self.vals[k];
            }
        }
        a
    }
}

/// Five-point periodic Laplacian of the full torus grid. Symmetric positive
/// semidefinite with kernel spanned by the constant field.
pub fn assemble_periodic_laplacian(grid: &Grid) -> SparseOperator {
    let wx = 1.0 / (grid.hx() * grid.hx());
    let wy = 1.0 / (grid.hy() * grid.hy());
    let n = grid.len();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    for idx in 0..n {
        let [xp, xm, yp, ym] = grid.neighbors(idx);
        cols.push(idx);
        vals.push(2.0 * wx + 2.0 * wy);
        // Periodic wrap can alias neighbors on tiny grids; accumulate by
        // pushing duplicates (matvec sums them), which keeps assembly simple.
        cols.push(xp);
        vals.push(-wx);
        cols.push(xm);
        vals.push(-wx);
        cols.push(yp);
        vals.push(-wy);
        cols.push(ym);
        vals.push(-wy);
        row_ptr.push(cols.len());
    }
    SparseOperator {
        n,
        row_ptr,
        cols,
        vals,
    }
}

/// Where the Dirichlet wall sits relative to the mask raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallConvention {
    /// Excluded nodes are wall points: `u = 0` on the first node outside
    /// the mask. The right convention for rasters of open sets whose
    /// boundary passes through grid nodes (polygon rasters with on-edge
    /// nodes excluded, nodal sets thresholded on nodes).
    OnNodes,
    /// Walls bisect the grid edges between included and excluded nodes
    /// (ghost-node reflection `u_ghost = -u_inside`). The right convention
    /// for label partitions where every node is owned by some domain: a
    /// domain of `W` columns then represents width exactly `W * hx`.
    MidEdge,
}

/// Dirichlet-masked five-point Laplacian (node deletion), with an optional
/// nonnegative potential added to the diagonal.
///
/// Rows and columns are restricted to inside nodes in row-major order;
/// couplings to outside nodes are dropped while the diagonal keeps the full
/// stencil weight, which realizes homogeneous Dirichlet data on the deleted
/// nodes ([`WallConvention::OnNodes`]). With the full mask this is the
/// periodic operator plus potential, which is exactly the relaxed operator
/// `-Delta + C(1-phi)` when the potential field is `C(1-phi)`.
pub fn assemble_dirichlet_laplacian(
    grid: &Grid,
    mask: &DomainMask,
    potential: Option<&GridField>,
) -> Result<SparseOperator> {
    assemble_dirichlet_with(grid, mask, potential, WallConvention::OnNodes)
}

/// [`assemble_dirichlet_laplacian`] with an explicit [`WallConvention`].
///
/// Under [`WallConvention::MidEdge`] every dropped coupling adds its weight
/// back to the diagonal, which realizes `u = 0` half a cell beyond the last
/// included node: for a 1-D run of `W` nodes the discrete spectrum is that
/// of an interval of length exactly `W * h`,
/// `(4/h^2) sin^2(m pi h / (2 W h))`.
pub fn assemble_dirichlet_with(
    grid: &Grid,
    mask: &DomainMask,
    potential: Option<&GridField>,
    convention: WallConvention,
) -> Result<SparseOperator> {
    if mask.grid != *grid {
        return Err(Error::InvalidArgument(
            "mask grid does not match assembly grid".into(),
        ));
    }
    if let Some(pot) = potential {
        if pot.grid != *grid {
            return Err(Error::InvalidArgument(
                "potential grid does not match assembly grid".into(),
            ));
        }
    }
    let m: Vec<usize> = {
        let mut map = vec![usize::MAX; grid.len()];
        let mut r = 0;
        for (idx, &ins) in mask.inside.iter().enumerate() {
            if ins {
                map[idx] = r;
                r += 1;
            }
        }
        if r == 0 {
            return Err(Error::InvalidArgument("empty domain mask".into()));
        }
        map
    };
    let n_in = m.iter().filter(|&&r| r != usize::MAX).count();
    let wx = 1.0 / (grid.hx() * grid.hx());
    let wy = 1.0 / (grid.hy() * grid.hy());
    let mut row_ptr = Vec::with_capacity(n_in + 1);
    let mut cols = Vec::with_capacity(5 * n_in);
    let mut vals = Vec::with_capacity(5 * n_in);
    row_ptr.push(0);
    for idx in 0..grid.len() {
        if m[idx] == usize::MAX {
            continue;
        }
        let mut diag = 2.0 * wx + 2.0 * wy;
        if let Some(pot) = potential {
            diag += pot.values[idx];
        }
        let diag_slot = cols.len();
        cols.push(m[idx]);
        vals.push(diag);
        let [xp, xm, yp, ym] = grid.neighbors(idx);
        for (nb, w) in [(xp, wx), (xm, wx), (yp, wy), (ym, wy)] {
            if m[nb] != usize::MAX {
                cols.push(m[nb]);
                vals.push(-w);
            } else if convention == WallConvention::MidEdge {
                vals[diag_slot] += w;
            }
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseOperator {
        n: n_in,
        row_ptr,
        cols,
        vals,
    })
}

/// Closed-form eigenvalues of the discrete periodic Laplacian:
/// `(4/hx^2) sin^2(pi m / nx) + (4/hy^2) sin^2(pi n / ny)`.
pub fn discrete_periodic_eigenvalue(grid: &Grid, m: usize, n: usize) -> f64 {
    let sx = (std::f64::consts::PI * m as f64 / grid.nx as f64).sin();
    let sy = (std::f64::consts::PI * n as f64 / grid.ny as f64).sin();
    4.0 / (grid.hx() * grid.hx()) * sx * sx + 4.0 / (grid.hy() * grid.hy()) * sy * sy
}

/// Render integer labels (0..=maxval) as a plain-text portable graymap (P2).
/// Row order is top-down (j = ny-1 first) so images display upright.
pub fn labels_to_p2(grid: &Grid, labels: &[usize], maxval: usize) -> String {
    assert_eq!(labels.len(), grid.len());
    let mut s = String::new();
    s.push_str("P2\n");
    s.push_str(&format!("{} {}\n{}\n", grid.nx, grid.ny, maxval.max(1)));
    for j in (0..grid.ny).rev() {
        let mut row = String::new();
        for i in 0..grid.nx {
            if i > 0 {
                row.push(' ');
            }
            row.push_str(&labels[grid.node(i, j)].min(maxval).to_string());
        }
        s.push_str(&row);
        s.push('\n');
    }
    s
}

/// Render a mask as a 0/1 P2 graymap.
pub fn mask_to_p2(mask: &DomainMask) -> String {
    let labels: Vec<usize> = mask.inside.iter().map(|&b| usize::from(b)).collect();
    labels_to_p2(&mask.grid, &labels, 1)
}
