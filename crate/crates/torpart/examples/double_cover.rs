//! A continuum of non-strip 3-partitions of T(1, 1/sqrt 2) at the
//! strip energy.
//!
//! On the doubled torus T(2, 1/sqrt 2) the eigenvalue 9 pi^2 has the
//! two antiperiodic eigenfunctions cos(3 pi x) and
//! cos(pi x) cos(2 sqrt 2 pi y). Their mixes
//! u = (1-alpha) cos(3 pi x) + alpha cos(pi x) cos(2 sqrt 2 pi y) keep
//! six nodal domains for an interval of weights; pairing the domains
//! under x -> x+1 and projecting down yields 3-partitions whose cells
//! all have ground energy exactly 9 pi^2 — a one-parameter family of
//! equally good competitors at the transition width.

use std::f64::consts::PI;

use torpart::tilings::{double_cover_3partition, six_domain_alpha_interval};
use torpart::Result;

fn main() -> Result<()> {
    let (lo, hi) = six_domain_alpha_interval(96)?;
    println!("mixing weights with six upstairs nodal domains: [{lo:.2}, {hi:.2}]");
    println!("(alpha = 0 is the strip partition; larger alpha bends the walls)");

    let nine = 9.0 * PI * PI;
    println!();
    println!("cells of the projected partition at a few weights (res 96):");
    for alpha in [0.0, 0.25, 0.45] {
        let spec = double_cover_3partition(alpha, 96)?;
        let lambdas = spec.lambda1_per_cell(96, 1e-8)?;
        let devs: Vec<String> = lambdas
            .iter()
            .map(|l| format!("{:+.2}%", 100.0 * (l - nine) / nine))
            .collect();
        println!(
            "  alpha = {alpha:4.2}: areas {:?}, lambda1 vs 9 pi^2: {devs:?}",
            spec.cell_areas()
                .iter()
                .map(|a| (a * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        );
    }

    println!();
    println!("outside the interval the construction reports the domain count:");
    let err = double_cover_3partition(0.9, 96).unwrap_err();
    println!("  alpha = 0.9 -> {err}");
    Ok(())
}
