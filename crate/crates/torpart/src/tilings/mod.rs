//! Candidate tilings of the flat torus and their spectral evaluation.
//!
//! The optimizer finds low-energy partitions numerically; this module
//! builds the explicit competitors they are measured against: equal
//! vertical strips, rows of congruent hexagons with straight edges and
//! 120-degree meetings, the five-square pattern on `T(1,1)`, and a
//! three-partition of `T(1, 1/sqrt 2)` projected from a nodal
//! six-partition of its double cover. Each constructor returns a
//! [`TilingSpec`] carrying the cell geometry, the closed-form ground
//! energy where one exists, and the free parameters that were resolved.
//! Spectral evaluation (per-cell Dirichlet ground energies, raster
//! coverage, the pair-compatibility diagnostic) happens on demand at a
//! caller-chosen resolution.
//!
//! Two different rasterizations serve two different purposes. Ground
//! energies use *open* cells: a strip keeps its free periodic direction
//! by masking node columns on the torus, a polygonal cell is embedded in
//! a padded planar grid, and a raster-backed cell owns its nodes with
//! walls on the half-edges. Coverage rasters instead assign *every* node
//! by half-open point location, so that label images and area audits see
//! the tiling as a partition of the whole torus.

mod double_cover;
mod hexagon;

pub use double_cover::{double_cover_3partition, six_domain_alpha_interval};
pub use hexagon::{hexagon_threshold, hexagonal_tiling, verify_meeting_property};

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{glue_double, Polygon, TorusGeometry};
use crate::grid::{polygon_contains_torus, DomainMask, Grid};
use crate::spectral::{masked_eigs, owned_cell_eigs, planar_polygon_eigs};

/// Eigensolver tolerance used by the tiling diagnostics; the geometric
/// raster error dominates it by many orders of magnitude.
const EIG_TOL: f64 = 1e-8;

/// Which of the candidate families a [`TilingSpec`] belongs to. The kind
/// selects how cells are evaluated spectrally (see
/// [`TilingSpec::lambda1_per_cell`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TilingKind {
    /// `k` equal vertical strips of `T(a,b)`.
    Strips,
    /// `k` congruent hexagons with 120-degree meetings on `T(1,b)`.
    Hexagons,
    /// Five congruent slanted squares on `T(1,1)`.
    Squares5,
    /// Three cells of `T(1, 1/sqrt 2)` projected from a nodal
    /// six-partition of the double cover.
    DoubleCover3,
}

/// Cell geometry of a tiling: straight-edged cells store one planar lift
/// of each vertex loop (torus membership wraps the lift through the
/// period lattice); nodal cells store the label raster they were born on.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum CellGeometry {
    /// One planar polygon per cell.
    Polygons(Vec<Polygon>),
    /// A full label field: `labels[idx] in 0..k` for every grid node.
    Raster { grid: Grid, labels: Vec<usize> },
}

/// An explicit candidate `k`-partition of the torus by congruent
/// (or, for the double-cover projection, equal-energy) cells.
#[derive(Debug, Clone, Serialize)]
pub struct TilingSpec {
    pub kind: TilingKind,
    pub k: usize,
    pub geom: TorusGeometry,
    pub cells: CellGeometry,
    /// Closed-form per-cell ground energy, when the family has one.
    pub exact_lambda1: Option<f64>,
    /// Free parameters fixed by the construction, as name/value pairs.
    pub parameters: Vec<(String, f64)>,
}

impl TilingSpec {
    /// Areas of the cells: shoelace areas for polygon cells, node count
    /// times cell area for raster cells.
    pub fn cell_areas(&self) -> Vec<f64> {
        match &self.cells {
            CellGeometry::Polygons(polys) => polys.iter().map(Polygon::area).collect(),
            CellGeometry::Raster { grid, labels } => {
                let mut counts = vec![0usize; self.k];
                for &l in labels {
                    counts[l] += 1;
                }
                counts
                    .into_iter()
                    .map(|c| c as f64 * grid.cell_area())
                    .collect()
            }
        }
    }

    /// Structural checks: cell count matches `k`, and for polygon-backed
    /// kinds every cell has area `a*b/k` within `1e-9` (the cells are
    /// congruent; raster-backed cells are only approximately balanced,
    /// so for them just nonemptiness and label range are enforced).
    pub fn validate(&self) -> Result<()> {
        match &self.cells {
            CellGeometry::Polygons(polys) => {
                if polys.len() != self.k {
                    return Err(Error::Construction(format!(
                        "tiling stores {} cells for k = {}",
                        polys.len(),
                        self.k
                    )));
                }
                let share = self.geom.area() / self.k as f64;
                for (c, poly) in polys.iter().enumerate() {
                    if (poly.area() - share).abs() > 1e-9 {
                        return Err(Error::Construction(format!(
                            "cell {c} has area {} instead of {share}",
                            poly.area()
                        )));
                    }
                    if !poly.is_simple() {
                        return Err(Error::Construction(format!(
                            "cell {c} self-intersects"
                        )));
                    }
                }
            }
            CellGeometry::Raster { grid, labels } => {
                if labels.len() != grid.len() {
                    return Err(Error::Construction(format!(
                        "label raster has {} entries for a {}x{} grid",
                        labels.len(),
                        grid.nx,
                        grid.ny
                    )));
                }
                let mut counts = vec![0usize; self.k];
                for &l in labels {
                    if l >= self.k {
                        return Err(Error::Construction(format!(
                            "label {l} out of range for k = {}",
                            self.k
                        )));
                    }
                    counts[l] += 1;
                }
                if let Some(c) = counts.iter().position(|&n| n == 0) {
                    return Err(Error::DegeneratePartition(format!(
                        "cell {c} of the raster tiling is empty"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Dirichlet ground energy of every cell at roughly `resolution`
    /// nodes per unit length.
    ///
    /// Strips keep their free periodic direction: each strip is a node
    /// mask on the torus with the two wall columns excluded, on a grid
    /// whose `nx` is rounded up to a multiple of `k` so the walls land
    /// exactly on node lines. Other polygon cells are planar Dirichlet
    /// domains, solved on a padded embedding grid. Raster cells are
    /// evaluated on their own stored grid with walls on the half-edges
    /// toward other labels (`resolution` is ignored for them: the raster
    /// already fixed its mesh when the tiling was constructed).
    pub fn lambda1_per_cell(&self, resolution: usize, tol: f64) -> Result<Vec<f64>> {
        match (&self.cells, self.kind) {
            (CellGeometry::Polygons(_), TilingKind::Strips) => {
                let k = self.k;
                let per_strip = ((resolution as f64 * self.geom.a / k as f64).ceil()
                    as usize)
                    .max((8 + k - 1) / k)
                    .max(2);
                let nx = per_strip * k;
                let ny = ((resolution as f64 * self.geom.b).ceil() as usize).max(8);
                let grid = Grid::new(self.geom, nx, ny)?;
                (0..k)
                    .into_par_iter()
                    .map(|m| {
                        let lo = m * per_strip;
                        let hi = (m + 1) * per_strip;
                        let inside = (0..grid.len())
                            .map(|idx| {
                                let (i, _) = grid.coords(idx);
                                i > lo && i < hi
                            })
                            .collect();
                        let mask = DomainMask { grid, inside };
                        masked_eigs(&mask, 1, tol).map(|pairs| pairs[0].0)
                    })
                    .collect()
            }
            (CellGeometry::Polygons(polys), _) => polys
                .par_iter()
                .map(|poly| planar_polygon_eigs(poly, 1, resolution, tol).map(|p| p[0].0))
                .collect(),
            (CellGeometry::Raster { grid, labels }, _) => (0..self.k)
                .into_par_iter()
                .map(|c| {
                    let mask = DomainMask {
                        grid: *grid,
                        inside: labels.iter().map(|&l| l == c).collect(),
                    };
                    owned_cell_eigs(&mask, 1, tol).map(|pairs| pairs[0].0)
                })
                .collect(),
        }
    }

    /// Partition energy of the tiling at finite resolution: the largest
    /// per-cell ground energy.
    pub fn fd_energy(&self, resolution: usize, tol: f64) -> Result<f64> {
        Ok(self
            .lambda1_per_cell(resolution, tol)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Label raster of the tiling at roughly `resolution` nodes per unit
    /// length, by half-open point location (no boundary guard): interior
    /// nodes get their cell, nodes exactly on a wall get whichever cell
    /// the even-odd rule assigns, and the report counts how many nodes
    /// were claimed by more than one cell. Raster-backed tilings return
    /// their stored labels (their mesh is already fixed).
    pub fn rasterize(&self, resolution: usize) -> Result<TilingRaster> {
        match &self.cells {
            CellGeometry::Raster { grid, labels } => Ok(TilingRaster {
                grid: *grid,
                labels: labels.iter().map(|&l| Some(l)).collect(),
                multiply_claimed: 0,
            }),
            CellGeometry::Polygons(polys) => {
                let nx = ((resolution as f64 * self.geom.a).round() as usize).max(8);
                let ny = ((resolution as f64 * self.geom.b).round() as usize).max(8);
                let grid = Grid::new(self.geom, nx, ny)?;
                let mut labels = vec![None; grid.len()];
                let mut claims = vec![0u8; grid.len()];
                for (c, poly) in polys.iter().enumerate() {
                    for i in 0..grid.nx {
                        for j in 0..grid.ny {
                            let idx = grid.node(i, j);
                            if polygon_contains_torus(&grid, poly, grid.point(i, j)) {
                                claims[idx] = claims[idx].saturating_add(1);
                                if labels[idx].is_none() {
                                    labels[idx] = Some(c);
                                }
                            }
                        }
                    }
                }
                Ok(TilingRaster {
                    grid,
                    labels,
                    multiply_claimed: claims.iter().filter(|&&n| n >= 2).count(),
                })
            }
        }
    }
}

/// Result of [`TilingSpec::rasterize`]: a (possibly partial) label field
/// plus the double-claim count used by the coverage audit.
#[derive(Debug, Clone)]
pub struct TilingRaster {
    pub grid: Grid,
    pub labels: Vec<Option<usize>>,
    /// Nodes claimed by two or more cells.
    pub multiply_claimed: usize,
}

impl TilingRaster {
    /// Number of nodes assigned to some cell.
    pub fn assigned(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    /// Fraction of grid nodes covered by the union of the cells.
    pub fn coverage_fraction(&self) -> f64 {
        self.assigned() as f64 / self.labels.len() as f64
    }

    /// Fraction of grid nodes claimed by more than one cell.
    pub fn multiple_fraction(&self) -> f64 {
        self.multiply_claimed as f64 / self.labels.len() as f64
    }
}

/// Complete a partial label field by synchronous rounds of neighbor
/// majority votes (ties to the lowest label). Unassigned nodes sit on
/// cell interfaces after rasterization or nodal thresholding; attaching
/// them to an adjacent cell moves each wall by at most one mesh cell.
pub fn fill_unassigned_labels(
    grid: &Grid,
    mut labels: Vec<Option<usize>>,
    k: usize,
) -> Result<Vec<usize>> {
    if labels.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "label field has {} entries for a {}x{} grid",
            labels.len(),
            grid.nx,
            grid.ny
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one label".into()));
    }
    while labels.iter().any(Option::is_none) {
        let mut round = Vec::new();
        for idx in 0..labels.len() {
            if labels[idx].is_some() {
                continue;
            }
            let mut votes = vec![0usize; k];
            let mut any = false;
            for nb in grid.neighbors(idx) {
                if let Some(l) = labels[nb] {
                    votes[l] += 1;
                    any = true;
                }
            }
            if any {
                let best = votes
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                    .map(|(l, _)| l)
                    .unwrap_or(0);
                round.push((idx, best));
            }
        }
        if round.is_empty() {
            return Err(Error::Construction(
                "unassigned nodes are isolated from every labeled cell".into(),
            ));
        }
        for (idx, l) in round {
            labels[idx] = Some(l);
        }
    }
    Ok(labels.into_iter().map(|l| l.unwrap()).collect())
}

/// Partition of `T(a,b)` into `k` equal vertical strips
/// `((m-1)a/k, m a/k) x` full circle. The ground state of a strip is the
/// one-dimensional interval mode, constant along the free direction, so
/// the partition energy is exactly `k^2 pi^2 / a^2`.
pub fn strips(k: usize, geom: TorusGeometry) -> Result<TilingSpec> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "strip partitions need k >= 2, got {k}"
        )));
    }
    let w = geom.a / k as f64;
    let cells = (0..k)
        .map(|m| {
            let x0 = m as f64 * w;
            let x1 = (m + 1) as f64 * w;
            Polygon::new(vec![[x0, 0.0], [x1, 0.0], [x1, geom.b], [x0, geom.b]])
        })
        .collect();
    let spec = TilingSpec {
        kind: TilingKind::Strips,
        k,
        geom,
        cells: CellGeometry::Polygons(cells),
        exact_lambda1: Some((k as f64 * PI / geom.a).powi(2)),
        parameters: Vec::new(),
    };
    spec.validate()?;
    Ok(spec)
}

/// The five-square partition of `T(1,1)`: the index-5 sublattice spanned
/// by `(2/5, 1/5)` and `(-1/5, 2/5)` tiles the torus with five congruent
/// slanted squares of side `1/sqrt 5`, so each cell has ground energy
/// exactly `2 pi^2 / (1/5) = 10 pi^2`.
pub fn five_squares() -> TilingSpec {
    let geom = TorusGeometry::new(1.0, 1.0).expect("unit torus");
    let s1 = [0.4, 0.2];
    let s2 = [-0.2, 0.4];
    let base = Polygon::new(vec![
        [0.0, 0.0],
        s1,
        [s1[0] + s2[0], s1[1] + s2[1]],
        s2,
    ]);
    let cells = (0..5)
        .map(|m| base.translated([m as f64 * s1[0], m as f64 * s1[1]]))
        .collect();
    let spec = TilingSpec {
        kind: TilingKind::Squares5,
        k: 5,
        geom,
        cells: CellGeometry::Polygons(cells),
        exact_lambda1: Some(10.0 * PI * PI),
        parameters: Vec::new(),
    };
    spec.validate().expect("five-square cells are exact");
    spec
}

/// Pair-compatibility diagnostic of a congruent-cell tiling: the ground
/// energy of one cell against the second Dirichlet eigenvalue of the
/// mirror double across each side.
#[derive(Debug, Clone, Serialize)]
pub struct PairCompatReport {
    /// FD ground energy of the reference cell.
    pub lambda1_cell: f64,
    /// FD second eigenvalue of the glued double, one entry per side.
    pub lambda2_doubles: Vec<f64>,
    /// `max_s |lambda1 - lambda2(s)| / lambda1`.
    pub max_gap: f64,
}

/// Evaluate the pair-compatibility condition for a congruent-cell
/// tiling: two neighboring cells of a minimal partition must be the
/// nodal domains of a second eigenfunction of their union, which forces
/// `lambda_2(union) = lambda_1(cell)`. The union of two congruent copies
/// glued along matching sides is realized as the mirror double of the
/// cell across each side in turn; a large relative gap signals that the
/// tiling cannot be minimal.
///
/// Preconditions: the tiling must carry straight-edged congruent cells
/// (raster-backed tilings are rejected), and the cell must span at least
/// 20 mesh cells across its narrow direction at the chosen resolution.
pub fn pair_compatibility(tiling: &TilingSpec, resolution: usize) -> Result<PairCompatReport> {
    let cell = match &tiling.cells {
        CellGeometry::Polygons(polys) => &polys[0],
        CellGeometry::Raster { .. } => {
            return Err(Error::InvalidArgument(
                "pair compatibility needs straight-edged congruent cells; \
                 raster-backed tilings have no side list to glue along"
                    .into(),
            ))
        }
    };
    let (lo, hi) = cell.bounding_box();
    let across = (hi[0] - lo[0]).min(hi[1] - lo[1]);
    if across * (resolution as f64) < 20.0 {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} puts only {:.1} mesh cells across the \
             cell; need at least 20",
            across * resolution as f64
        )));
    }
    let lambda1_cell = planar_polygon_eigs(cell, 1, resolution, EIG_TOL)?[0].0;
    let lambda2_doubles: Vec<f64> = (0..cell.len())
        .into_par_iter()
        .map(|side| {
            let double = glue_double(cell, side)?;
            Ok(planar_polygon_eigs(&double, 2, resolution, EIG_TOL)?[1].0)
        })
        .collect::<Result<_>>()?;
    let max_gap = lambda2_doubles
        .iter()
        .map(|l2| (lambda1_cell - l2).abs() / lambda1_cell)
        .fold(0.0, f64::max);
    Ok(PairCompatReport {
        lambda1_cell,
        lambda2_doubles,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{is_bipartite, neighbor_graph, partition_from_labels, Bipartiteness};
    use approx::assert_relative_eq;

    #[test]
    fn strips_carry_the_exact_interval_energy() {
        let t3 = strips(3, TorusGeometry::new(1.0, 0.5).unwrap()).unwrap();
        assert_relative_eq!(t3.exact_lambda1.unwrap(), 9.0 * PI * PI);
        for area in t3.cell_areas() {
            assert_relative_eq!(area, 0.5 / 3.0, epsilon = 1e-12);
        }
        let t2 = strips(2, TorusGeometry::new(2.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(t2.exact_lambda1.unwrap(), PI * PI);
        assert!(strips(1, TorusGeometry::new(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn strip_fd_energy_matches_the_closed_form() {
        // Walls land on node columns, so the only error is the O(h^2)
        // interval-mode bias; 64 nodes per unit is plenty for 1%.
        let tiling = strips(3, TorusGeometry::new(1.0, 0.6).unwrap()).unwrap();
        let lams = tiling.lambda1_per_cell(64, 1e-8).unwrap();
        let exact = 9.0 * PI * PI;
        assert_eq!(lams.len(), 3);
        for lam in lams {
            assert!(
                (lam - exact).abs() < 0.01 * exact,
                "strip energy {lam} vs {exact}"
            );
        }
    }

    #[test]
    fn strip_raster_covers_every_node_once() {
        let tiling = strips(3, TorusGeometry::new(1.0, 0.7).unwrap()).unwrap();
        // 129 columns: walls on node columns; 97: walls between nodes.
        for res in [129, 97] {
            let raster = tiling.rasterize(res).unwrap();
            assert_eq!(raster.assigned(), raster.grid.len(), "res {res}");
            assert_eq!(raster.multiply_claimed, 0, "res {res}");
        }
    }

    #[test]
    fn five_squares_tile_the_unit_torus() {
        let tiling = five_squares();
        assert_eq!(tiling.k, 5);
        assert_relative_eq!(tiling.exact_lambda1.unwrap(), 10.0 * PI * PI);
        for area in tiling.cell_areas() {
            assert_relative_eq!(area, 0.2, epsilon = 1e-12);
        }
        // Every square contains its own center, wrapped through the torus.
        let grid = Grid::new(tiling.geom, 16, 16).unwrap();
        if let CellGeometry::Polygons(cells) = &tiling.cells {
            for (m, cell) in cells.iter().enumerate() {
                let center = [0.4 * m as f64 + 0.1, 0.2 * m as f64 + 0.3];
                assert!(
                    polygon_contains_torus(&grid, cell, tiling.geom.wrap(center)),
                    "square {m} misses its center"
                );
            }
        } else {
            panic!("five-square cells should be polygons");
        }
        // Coverage at a resolution incommensurate with the 1/5 lattice.
        let raster = tiling.rasterize(93).unwrap();
        assert!(raster.coverage_fraction() >= 0.995);
        assert!(raster.multiple_fraction() <= 0.005);
    }

    #[test]
    fn five_squares_fd_energy_is_near_ten_pi_squared() {
        // Node-deletion walls on slanted edges bias low at O(h):
        // about -2.4% at 128 nodes per unit.
        let tiling = five_squares();
        let lams = tiling.lambda1_per_cell(128, 1e-8).unwrap();
        let exact = 10.0 * PI * PI;
        for lam in lams {
            let rel = (lam - exact) / exact;
            assert!(rel.abs() < 0.035, "relative error {rel}");
        }
    }

    #[test]
    fn rectangle_cells_are_pair_compatible_along_every_side() {
        // Gluing a rectangle across any side doubles one dimension, and
        // lambda_2 of the double equals lambda_1 of the cell; with walls
        // on node lines the identity survives discretization exactly, so
        // the gap is at the eigensolver tolerance.
        let tiling = strips(2, TorusGeometry::new(1.0, 0.6).unwrap()).unwrap();
        let report = pair_compatibility(&tiling, 160).unwrap();
        assert_eq!(report.lambda2_doubles.len(), 4);
        assert!(
            report.max_gap < 1e-6,
            "discrete self-compatibility broken: gap {}",
            report.max_gap
        );
    }

    #[test]
    fn pair_compatibility_rejects_coarse_rasters_and_raster_cells() {
        let tiling = strips(2, TorusGeometry::new(1.0, 0.5).unwrap()).unwrap();
        // 0.5 across the narrow direction * 30 per unit = 15 cells < 20.
        assert!(pair_compatibility(&tiling, 30).is_err());
        let cover = double_cover_3partition(0.25, 48).unwrap();
        assert!(pair_compatibility(&cover, 64).is_err());
    }

    #[test]
    fn unassigned_nodes_join_a_neighboring_cell() {
        let grid = Grid::new(TorusGeometry::new(1.0, 1.0).unwrap(), 8, 8).unwrap();
        let mut labels: Vec<Option<usize>> = vec![None; grid.len()];
        // Left half label 0, right half label 1, column 4 unassigned.
        for i in 0..8 {
            for j in 0..8 {
                labels[grid.node(i, j)] = match i {
                    0..=3 => Some(0),
                    4 => None,
                    _ => Some(1),
                };
            }
        }
        let filled = fill_unassigned_labels(&grid, labels, 2).unwrap();
        // Tie between the halves resolves to the lower label.
        for j in 0..8 {
            assert_eq!(filled[grid.node(4, j)], 0);
        }
        assert!(fill_unassigned_labels(&grid, vec![None; grid.len()], 2).is_err());
    }

    #[test]
    fn hexagonal_three_tiling_has_an_odd_neighbor_cycle() {
        // The three hexagons of a row each touch both others along true
        // edges, so the neighbor graph is the triangle: non-bipartite.
        let tiling = hexagonal_tiling(3, 0.72).unwrap();
        let raster = tiling.rasterize(64).unwrap();
        let labels = fill_unassigned_labels(&raster.grid, raster.labels, 3).unwrap();
        let part = partition_from_labels(raster.grid, labels, 3).unwrap();
        let graph = neighbor_graph(&part);
        assert_eq!(graph.edges, vec![(0, 1), (0, 2), (1, 2)]);
        match is_bipartite(&graph) {
            Bipartiteness::OddCycle { cycle } => assert!(cycle.len() % 2 == 1),
            Bipartiteness::Bipartite { .. } => panic!("triangle reported bipartite"),
        }
    }
}
