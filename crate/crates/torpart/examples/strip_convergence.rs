//! Strip partition energies: the masked Dirichlet solver against k^2 pi^2.
//!
//! The k-strip partition of T(1,b) has energy k^2 pi^2 for every b (its
//! cells are 1/k x b cylinders whose ground state depends only on the
//! width). The run builds the strip tiling, rasterizes it, and compares
//! the finite-difference ground energy of one strip with the closed
//! form across heights and resolutions.

use std::f64::consts::PI;

use torpart::geom::TorusGeometry;
use torpart::tilings::strips;
use torpart::Result;

fn main() -> Result<()> {
    let k = 3;
    let exact = (k as f64 * PI).powi(2);
    println!("k = {k} strips on T(1,b): exact energy k^2 pi^2 = {exact:.6}");
    println!();
    println!(
        "{:>5}  {:>12}  {:>12}  {:>10}",
        "b", "res 64", "res 128", "rel err 128"
    );
    for b in [0.3, 0.6, 1.0] {
        let tiling = strips(k, TorusGeometry::new(1.0, b)?)?;
        let coarse = tiling.fd_energy(64, 1e-8)?;
        let fine = tiling.fd_energy(128, 1e-8)?;
        println!(
            "{b:>5.2}  {coarse:>12.6}  {fine:>12.6}  {:>10.2e}",
            (fine - exact).abs() / exact
        );
    }
    println!();
    println!("note: the energy is independent of b, as the table shows;");
    println!("the FD error is set by the strip width alone.");
    Ok(())
}
