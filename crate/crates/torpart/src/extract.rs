//! Strong partitions from relaxed densities, and partition diagnostics.
//!
//! The relaxed optimizer produces overlapping densities; downstream
//! comparisons need honest open sets. Extraction labels each node by its
//! largest density, repairs disconnected labels, and recomputes every
//! domain's first Dirichlet eigenvalue with hard walls, so the reported
//! energy carries no relaxation bias. The diagnostics — the neighbor
//! graph, its bipartiteness, and nodal-domain counts — are the
//! combinatorial facts that distinguish candidate minimizers: an odd
//! cycle of neighbors rules the configuration out as a nodal partition
//! of a single eigenfunction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{components_of, DomainMask, Grid, GridField};
use crate::relax::{energy_lp, DensitySet};
use crate::spectral::owned_cell_eigs;

/// A hard partition of the torus grid into `k` labeled open sets.
#[derive(Debug, Clone)]
pub struct StrongPartition {
    pub grid: Grid,
    /// Label in `0..k` per node (every node is labeled).
    pub labels: Vec<usize>,
    /// One mask per label; disjoint, union is the whole grid.
    pub masks: Vec<DomainMask>,
    /// First Dirichlet eigenvalue of each domain.
    pub lambda1: Vec<f64>,
    /// `max_i lambda1[i]`, the quantity being minimized.
    pub energy: f64,
    /// Area of each domain (cell-count times cell area).
    pub areas: Vec<f64>,
}

/// Extract a strong partition from a density set.
///
/// Nodes take the label of their largest density (ties to the lowest
/// index). Labels are then repaired to be connected: every label keeps
/// its largest component, and each remaining fragment is reassigned
/// whole to the neighboring label it shares the most boundary edges
/// with (one fragment per pass, smallest first, until every label is a
/// single component — this subsumes any small-fragment threshold).
/// Fails with a degenerate-partition error if some label never wins a
/// node.
pub fn extract_strong(dens: &DensitySet) -> Result<StrongPartition> {
    let grid = dens.grid;
    let k = dens.k();
    let n = grid.len();
    if k < 2 {
        return Err(Error::InvalidArgument("need at least 2 densities".into()));
    }

    // Argmax labeling, ties to the lowest label index.
    let mut labels = vec![0usize; n];
    for (node, label) in labels.iter_mut().enumerate() {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, f) in dens.fields.iter().enumerate() {
            let v = f.values[node];
            if v > best.0 {
                best = (v, i);
            }
        }
        *label = best.1;
    }
    for i in 0..k {
        if !labels.contains(&i) {
            return Err(Error::DegeneratePartition(format!(
                "label {i} never attains the maximal density"
            )));
        }
    }

    connectivity_cleanup(&grid, &mut labels, k);
    partition_from_labels(grid, labels, k)
}

/// Rebuild a [`StrongPartition`] (masks, eigenvalues, areas) from an
/// explicit label field.
pub fn partition_from_labels(grid: Grid, labels: Vec<usize>, k: usize) -> Result<StrongPartition> {
    if labels.len() != grid.len() {
        return Err(Error::InvalidArgument("label field length mismatch".into()));
    }
    let mut masks = vec![DomainMask::empty(grid); k];
    for (node, &l) in labels.iter().enumerate() {
        if l >= k {
            return Err(Error::InvalidArgument("label out of range".into()));
        }
        masks[l].inside[node] = true;
    }
    if let Some(i) = masks.iter().position(|m| m.count() == 0) {
        return Err(Error::DegeneratePartition(format!("label {i} is empty")));
    }
    // Every node is owned by a label, so Dirichlet walls run along the
    // mid-edges between labels: each domain's spectrum corresponds to the
    // area it owns, with no one-cell inflation.
    let lambda1: Vec<f64> = masks
        .par_iter()
        .map(|m| owned_cell_eigs(m, 1, 1e-8).map(|pairs| pairs[0].0))
        .collect::<Result<_>>()?;
    let energy = lambda1.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let cell = grid.geom.a / grid.nx as f64 * (grid.geom.b / grid.ny as f64);
    let areas: Vec<f64> = masks.iter().map(|m| m.count() as f64 * cell).collect();
    Ok(StrongPartition {
        grid,
        labels,
        masks,
        lambda1,
        energy,
        areas,
    })
}

/// Reassign disconnected fragments until every label is one component.
///
/// Each pass protects the largest component of every label and moves the
/// smallest unprotected fragment (whole) to the adjacent label with the
/// most shared boundary edges (ties to the lowest label). A moved
/// fragment merges with at least one component of the receiving label,
/// so the total component count strictly decreases and the loop ends.
fn connectivity_cleanup(grid: &Grid, labels: &mut [usize], k: usize) {
    loop {
        // Components per label, each pass on fresh labels.
        let mut fragments: Vec<(usize, Vec<usize>)> = Vec::new();
        for label in 0..k {
            let pred: Vec<bool> = labels.iter().map(|&l| l == label).collect();
            let mut comps = components_of(grid, &pred);
            if comps.len() <= 1 {
                continue;
            }
            // Protect the largest (ties to the earliest-discovered, which
            // has the smallest leading node index).
            let keep = comps
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .unwrap();
            comps.remove(keep);
            fragments.extend(comps.into_iter().map(|c| (label, c)));
        }
        let Some((label, fragment)) = fragments
            .into_iter()
            .min_by(|a, b| a.1.len().cmp(&b.1.len()).then(a.1[0].cmp(&b.1[0])))
        else {
            return;
        };
        // Count boundary edges from the fragment to each other label.
        let mut adjacency = vec![0usize; k];
        for &node in &fragment {
            for nb in grid.neighbors(node) {
                if labels[nb] != label {
                    adjacency[labels[nb]] += 1;
                }
            }
        }
        let target = (0..k)
            .filter(|&l| l != label)
            .max_by(|&a, &b| adjacency[a].cmp(&adjacency[b]).then(b.cmp(&a)))
            .expect("k >= 2 guarantees a target label");
        for node in fragment {
            labels[node] = target;
        }
    }
}

/// `l^p` aggregation of the partition's exact eigenvalues.
pub fn partition_energy(part: &StrongPartition, p: f64) -> f64 {
    energy_lp(&part.lambda1, p)
}

/// Which labels share substantial boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborGraph {
    /// Number of vertices (labels).
    pub k: usize,
    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl NeighborGraph {
    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        let e = (i.min(j), i.max(j));
        self.edges.binary_search(&e).is_ok()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.k];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

/// Build the neighbor graph of a partition: labels are adjacent when
/// they share more than two grid-edge cells of boundary, so domains that
/// only touch at (discrete) corners do not count as neighbors.
pub fn neighbor_graph(part: &StrongPartition) -> NeighborGraph {
    let grid = part.grid;
    let k = part.masks.len();
    let mut shared = vec![vec![0usize; k]; k];
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let here = part.labels[grid.node(i, j)];
            // Count each boundary edge once via the +x and +y neighbors.
            let right = part.labels[grid.node((i + 1) % grid.nx, j)];
            let up = part.labels[grid.node(i, (j + 1) % grid.ny)];
            for other in [right, up] {
                if other != here {
                    shared[here.min(other)][here.max(other)] += 1;
                }
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            if shared[i][j] > 2 {
                edges.push((i, j));
            }
        }
    }
    NeighborGraph { k, edges }
}

/// Result of the two-coloring attempt on a neighbor graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bipartiteness {
    /// A valid 2-coloring, one color in `{0,1}` per label.
    Bipartite { coloring: Vec<u8> },
    /// Witness that no 2-coloring exists: the labels of an odd cycle.
    OddCycle { cycle: Vec<usize> },
}

/// Two-color the neighbor graph or exhibit an odd cycle.
pub fn is_bipartite(graph: &NeighborGraph) -> Bipartiteness {
    let adj = graph.adjacency();
    let mut color = vec![u8::MAX; graph.k];
    let mut parent = vec![usize::MAX; graph.k];
    for start in 0..graph.k {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    parent[v] = u;
                    queue.push_back(v);
                } else if color[v] == color[u] && v != parent[u] {
                    return Bipartiteness::OddCycle {
                        cycle: odd_cycle_through(&parent, u, v),
                    };
                }
            }
        }
    }
    Bipartiteness::Bipartite { coloring: color }
}

/// Reconstruct the odd cycle closed by the conflicting BFS edge `(u, v)`:
/// both ancestor paths up to their first common vertex, joined.
fn odd_cycle_through(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let path_to_root = |mut x: usize| {
        let mut path = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            path.push(x);
        }
        path
    };
    let pu = path_to_root(u);
    let pv = path_to_root(v);
    // Strip the common tail, keeping one copy of the meeting vertex.
    let mut iu = pu.len();
    let mut iv = pv.len();
    while iu > 1 && iv > 1 && pu[iu - 2] == pv[iv - 2] {
        iu -= 1;
        iv -= 1;
    }
    let mut cycle: Vec<usize> = pu[..iu].to_vec();
    cycle.extend(pv[..iv - 1].iter().rev());
    cycle
}

/// Count nodal domains of a field: connected components of the sets
/// where the value exceeds `1e-9 * max|u|` in absolute value, split by
/// sign. Nodes below the threshold (and nodes outside `mask`, when one
/// is given) separate domains but belong to none.
pub fn count_nodal_domains(u: &GridField, mask: Option<&DomainMask>) -> usize {
    let grid = u.grid;
    let threshold = 1e-9 * u.max_abs();
    let signed = |node: usize| -> i8 {
        if let Some(m) = mask {
            if !m.inside[node] {
                return 0;
            }
        }
        let v = u.values[node];
        if v > threshold {
            1
        } else if v < -threshold {
            -1
        } else {
            0
        }
    };
    let positive: Vec<bool> = (0..grid.len()).map(|i| signed(i) == 1).collect();
    let negative: Vec<bool> = (0..grid.len()).map(|i| signed(i) == -1).collect();
    components_of(&grid, &positive).len() + components_of(&grid, &negative).len()
}
