//! Convenience drivers tying grids, operators, and the eigensolver
//! together: periodic torus spectra, Dirichlet spectra of masked
//! subdomains, spectra of the relaxed density operator, and spectra of
//! planar polygons embedded in a padded torus.

use ndarray::Array2;

use crate::eigensolve::precond::PoissonPreconditioner;
use crate::eigensolve::{smallest_eigenpairs_opts, EigenPair, SolveOptions};
use crate::error::{Error, Result};
use crate::geom::{Polygon, TorusGeometry};
use crate::grid::{
    assemble_dirichlet_laplacian, assemble_dirichlet_with, assemble_periodic_laplacian,
    mask_from_polygon, DomainMask, Grid, GridField, WallConvention,
};

/// Lowest `count` eigenvalues of the periodic Laplacian on the grid.
///
/// With `include_kernel` the exact zero mode (constant vector) is
/// prepended; otherwise the spectrum starts at the first nonzero
/// eigenvalue (the constant kernel is deflated away).
pub fn periodic_eigs(grid: &Grid, count: usize, include_kernel: bool, tol: f64) -> Result<Vec<EigenPair>> {
    let op = assemble_periodic_laplacian(grid);
    let n = op.n;
    let kernel = vec![1.0 / (n as f64).sqrt(); n];
    let nonzero_count = if include_kernel {
        count.saturating_sub(1)
    } else {
        count
    };
    let mut pairs = Vec::with_capacity(count);
    if include_kernel {
        pairs.push(EigenPair {
            value: 0.0,
            vector: kernel.clone(),
            residual: 0.0,
        });
    }
    if nonzero_count > 0 {
        let mut pc = PoissonPreconditioner::new(grid, None);
        let opts = SolveOptions {
            tol,
            precond: Some(&mut pc),
            deflate: vec![kernel],
            ..SolveOptions::default()
        };
        pairs.extend(smallest_eigenpairs_opts(&op, nonzero_count, opts)?);
    }
    Ok(pairs)
}

/// Lowest `count` Dirichlet eigenpairs of the masked subdomain, with the
/// wall on the first excluded nodes ([`WallConvention::OnNodes`]) — the
/// convention for rasters of open sets.
///
/// Eigenvectors come back as full-grid fields (zero outside the mask).
pub fn masked_eigs(mask: &DomainMask, count: usize, tol: f64) -> Result<Vec<(f64, GridField)>> {
    masked_eigs_with(mask, count, tol, WallConvention::OnNodes)
}

/// Lowest `count` Dirichlet eigenpairs of a domain that owns its cells
/// (a label of a partition): walls bisect the edges to other labels
/// ([`WallConvention::MidEdge`]), so a strip of `W` columns has the
/// spectrum of width exactly `W * hx`.
pub fn owned_cell_eigs(
    mask: &DomainMask,
    count: usize,
    tol: f64,
) -> Result<Vec<(f64, GridField)>> {
    masked_eigs_with(mask, count, tol, WallConvention::MidEdge)
}

fn masked_eigs_with(
    mask: &DomainMask,
    count: usize,
    tol: f64,
    convention: WallConvention,
) -> Result<Vec<(f64, GridField)>> {
    let grid = mask.grid;
    let op = assemble_dirichlet_with(&grid, mask, None, convention)?;
    let mut pc = PoissonPreconditioner::new(&grid, Some(mask));
    let opts = SolveOptions {
        tol,
        precond: Some(&mut pc),
        ..SolveOptions::default()
    };
    let pairs = smallest_eigenpairs_opts(&op, count, opts)?;
    Ok(pairs
        .into_iter()
        .map(|p| (p.value, mask.embed(&p.vector)))
        .collect())
}

/// Lowest `count` eigenpairs of the relaxed operator `-Delta + C (1 - phi)`
/// on the full periodic grid. `phi` must take values in `[0, 1]`.
pub fn relaxed_eigs(
    phi: &GridField,
    stiffness: f64,
    count: usize,
    tol: f64,
    warm: Option<&Array2<f64>>,
    seed: u64,
) -> Result<Vec<EigenPair>> {
    let grid = phi.grid;
    if !(stiffness > 0.0) {
        return Err(Error::InvalidArgument(
            "penalty stiffness must be positive".into(),
        ));
    }
    let mut potential = GridField::zeros(grid);
    for (v, &p) in potential.values.iter_mut().zip(phi.values.iter()) {
        *v = stiffness * (1.0 - p);
    }
    let full = DomainMask::full(grid);
    let op = assemble_dirichlet_laplacian(&grid, &full, Some(&potential))?;
    let mut pc = PoissonPreconditioner::new(&grid, None);
    let opts = SolveOptions {
        tol,
        seed,
        precond: Some(&mut pc),
        initial: warm.cloned(),
        ..SolveOptions::default()
    };
    smallest_eigenpairs_opts(&op, count, opts)
}

/// Dirichlet eigenvalues of a planar polygon, computed by embedding it in
/// a fresh torus with at least a three-cell margin and masking the
/// interior. `resolution` is nodes per unit length.
pub fn planar_polygon_eigs(
    poly: &Polygon,
    count: usize,
    resolution: usize,
    tol: f64,
) -> Result<Vec<(f64, GridField)>> {
    if resolution < 8 {
        return Err(Error::InvalidArgument(
            "resolution must be at least 8 nodes per unit length".into(),
        ));
    }
    let (lo, hi) = poly.bounding_box();
    let h = 1.0 / resolution as f64;
    let pad = 3.0 * h;
    let width = hi[0] - lo[0] + 2.0 * pad;
    let height = hi[1] - lo[1] + 2.0 * pad;
    let nx = (width * resolution as f64).ceil() as usize;
    let ny = (height * resolution as f64).ceil() as usize;
    let nx = nx.max(8);
    let ny = ny.max(8);
    let geom = TorusGeometry::new(nx as f64 * h, ny as f64 * h)?;
    let grid = Grid::new(geom, nx, ny)?;
    let shifted = poly.translated([pad - lo[0], pad - lo[1]]);
    let mask = mask_from_polygon(&grid, &shifted)?;
    masked_eigs(&mask, count, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::torus_eigenvalue;

    #[test]
    fn periodic_eigs_with_kernel_prepends_zero() {
        let grid = Grid::new(TorusGeometry::new(1.0, 1.0).unwrap(), 16, 16).unwrap();
        let pairs = periodic_eigs(&grid, 3, true, 1e-9).unwrap();
        assert_eq!(pairs[0].value, 0.0);
        assert!(pairs[1].value > 1.0);
        assert!((pairs[1].value - pairs[2].value).abs() < 1e-6 * pairs[1].value);
    }

    #[test]
    fn unit_square_dirichlet_ground_state() {
        // lambda_1([0,1]^2) = 2 pi^2; interior of the unit square embedded
        // in a padded torus. Node-deletion walls bias low at O(h).
        let square = Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let pairs = planar_polygon_eigs(&square, 1, 64, 1e-8).unwrap();
        let exact = 2.0 * std::f64::consts::PI.powi(2);
        let rel = (pairs[0].0 - exact) / exact;
        assert!(rel.abs() < 0.04, "relative error {rel}");
    }

    #[test]
    fn masked_strip_matches_interval_mode() {
        // Vertical strip 0 < x < 1/2 on T(1, 0.5): ground state is the
        // 1-D interval mode, lambda = pi^2 / (1/2)^2 = 4 pi^2.
        let grid = Grid::new(TorusGeometry::new(1.0, 0.5).unwrap(), 64, 32).unwrap();
        let mask = DomainMask::from_pred(grid, |p| p[0] > 0.0 && p[0] < 0.5);
        let pairs = masked_eigs(&mask, 1, 1e-8).unwrap();
        let exact = 4.0 * std::f64::consts::PI.powi(2);
        // Walls fall exactly on node lines here, so only O(h^2) error.
        assert!(
            (pairs[0].0 - exact).abs() < 0.01 * exact,
            "got {} want {}",
            pairs[0].0,
            exact
        );
    }

    #[test]
    fn relaxed_indicator_approaches_masked_value() {
        let grid = Grid::new(TorusGeometry::new(1.0, 0.5).unwrap(), 48, 24).unwrap();
        let phi = GridField::from_fn(grid, |p| if p[0] < 0.5 { 1.0 } else { 0.0 });
        let relaxed = relaxed_eigs(&phi, 1e4, 1, 1e-8, None, 7).unwrap();
        let mask = DomainMask::from_pred(grid, |p| p[0] > 0.0 && p[0] < 0.5);
        let hard = masked_eigs(&mask, 1, 1e-8).unwrap();
        // Finite penalty lets mass leak outside (penetration ~ 1/sqrt(C)
        // per side) and the indicator support is one column wider than
        // the open strip, so the relaxed value sits below the hard-wall
        // one, but C = 1e4 keeps it within ~15 percent at this mesh.
        assert!(relaxed[0].value < hard[0].0);
        assert!(relaxed[0].value > 0.8 * hard[0].0);
    }

    #[test]
    fn torus_symbol_reference() {
        let exact = torus_eigenvalue(1.0, 1.0, 1, 0);
        assert!((exact - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
    }
}
