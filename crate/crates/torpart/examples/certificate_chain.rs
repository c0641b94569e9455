//! The one-dimensional certificate chain behind the strip lower bound.
//!
//! A competitor cell of rescaled area V on a thin torus has ground
//! energy at least J(V)/b^2, and J(V) is controlled through a chain of
//! one-dimensional reductions:
//!
//!   lambda1(narrow domain)  >=  nu1(V)        (2-D -> constrained 1-D)
//!   nu1(V) = pi^2 + mu1(2/V)                  (exact splitting)
//!   mu1(h) >= xi1(h) >= pi^2 h^2 / 32 (h<=4)  (square-well comparison)
//!
//! The run checks every link numerically for V in {1/2, 1, 2}: the
//! splitting via two independent FD discretizations, the operator
//! inequalities, and the 2-D enclosure J(V) in
//! [pi^2 (1 + 1/(8 V^2)), pi^2 (1 + 1/V^2)).

use std::f64::consts::PI;

use torpart::analytic::{j_bounds, mu1_lower_closed, xi1};
use torpart::oned::{cont_lambda1_default, mu1_fd, nu1_fd, OneDimOperatorSpec};
use torpart::Result;

fn main() -> Result<()> {
    for v in [0.5, 1.0, 2.0] {
        let h = 2.0 / v;
        println!("V = {v} (h = 2/V = {h}):");

        let nu = nu1_fd(&OneDimOperatorSpec::narrowing_width(v))?;
        let mu = mu1_fd(&OneDimOperatorSpec::quadratic_well(h))?;
        let split = (nu - PI * PI - mu).abs();
        println!("  nu1 = {nu:.9}, pi^2 + mu1 = {:.9}", PI * PI + mu);
        println!("  splitting residual: {split:.2e}");

        let xi = xi1(h)?;
        let closed = mu1_lower_closed(h);
        println!("  mu1 = {mu:.9} >= xi1 = {xi:.9}: {}", mu >= xi - 1e-9);
        if h <= 4.0 {
            println!(
                "  xi1 = {xi:.9} >= pi^2 h^2/32 = {:.9}: {}",
                PI * PI * h * h / 32.0,
                xi >= PI * PI * h * h / 32.0 - 1e-12
            );
        }
        println!("  closed-form lower bound in use: {closed:.9}");

        let lam = cont_lambda1_default(v, 96)?;
        let (lo, hi) = j_bounds(v)?;
        println!("  J({v}) ~ {lam:.9}, enclosure [{lo:.9}, {hi:.9})");
        println!(
            "  enclosure holds: {}",
            lam >= lo - 5e-3 * PI * PI && lam < hi
        );
        println!();
    }
    Ok(())
}
