//! Candidate energies across the strip-to-hexagon transition of T(1,b).
//!
//! For k = 3 the strip partition (energy 9 pi^2, independent of b)
//! competes with a row of three congruent 120-degree hexagons whose
//! cell energy falls as the torus fattens; the two curves cross near
//! b = 1/sqrt 2 = 0.7071. The run prints both candidates over a coarse
//! b-grid — the hexagon column starts at the family's validity
//! threshold — using a desk-scale resolution. The `sweep` subcommand of
//! the CLI produces the same table as CSV, with a multistart optimizer
//! column on top.

use std::f64::consts::PI;

use torpart::tilings::{hexagon_threshold, hexagonal_tiling};
use torpart::Result;

fn main() -> Result<()> {
    let k = 3;
    let strip = (k as f64 * PI).powi(2);
    let threshold = hexagon_threshold(k)?;
    let resolution = 64;

    println!("k = {k}: strip energy {strip:.4} vs hexagon-row cell energy");
    println!("hexagon family valid for b > b_H = {threshold:.6}");
    println!();
    println!("{:>5}  {:>12}  {:>12}  {:>8}", "b", "strips", "hexagons", "winner");
    for step in 0..=8 {
        let b = 0.38 + 0.08 * step as f64;
        let hex = if b > threshold {
            Some(hexagonal_tiling(k, b)?.fd_energy(resolution, 1e-8)?)
        } else {
            None
        };
        match hex {
            Some(h) => {
                let winner = if h < strip { "hexagon" } else { "strips" };
                println!("{b:>5.2}  {strip:>12.4}  {h:>12.4}  {winner:>8}");
            }
            None => println!("{b:>5.2}  {strip:>12.4}  {:>12}  {:>8}", "-", "strips"),
        }
    }
    println!();
    println!("(resolution {resolution} per unit; the crossing shifts slightly");
    println!("with resolution but stays inside (0.65, 0.75))");
    Ok(())
}
