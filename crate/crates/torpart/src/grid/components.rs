//! Connected components with periodic wraparound.
//!
//! Connectivity is 4-neighbor, matching the coupling graph of the
//! five-point stencil, and wraps across both periodic seams; a band
//! touching the seam is one component, as it is on the torus.

use crate::grid::{DomainMask, Grid};

/// Connected components of an arbitrary node predicate, as lists of node
/// indices. Deterministic: components are discovered in row-major order of
/// their smallest node index.
pub fn components_of(grid: &Grid, pred: &[bool]) -> Vec<Vec<usize>> {
    debug_assert_eq!(pred.len(), grid.len());
    let mut seen = vec![false; grid.len()];
    let mut out = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for start in 0..grid.len() {
        if !pred[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            comp.push(idx);
            for nb in grid.neighbors(idx) {
                if pred[nb] && !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Connected components of a mask, each returned as its own mask.
/// The output masks partition the input.
pub fn connected_components(mask: &DomainMask) -> Vec<DomainMask> {
    components_of(&mask.grid, &mask.inside)
        .into_iter()
        .map(|comp| {
            let mut m = DomainMask::empty(mask.grid);
            for idx in comp {
                m.inside[idx] = true;
            }
            m
        })
        .collect()
}
