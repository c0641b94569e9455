//! Square-well comparison levels for the quadratic-well operator.
//!
//! The operator -h^2 d^2/dt^2 + pi^2 (t^2 - 1)_+ is bounded below by a
//! square well whose ground level has the closed form
//! xi1(h) = (h^2/2) rho1(h)^2, with rho1 the smallest positive root of
//! the matching condition rho tan rho = sqrt(2 pi^2/h^2 - rho^2). The
//! run tabulates rho1, xi1, the proven closed-form bound pi^2 h^2/32
//! (valid for h <= 4), and the FD value mu1(h) that they certify.

use std::f64::consts::PI;

use torpart::analytic::{mu1_lower_closed, rho1, xi1};
use torpart::oned::{mu1_fd, OneDimOperatorSpec};
use torpart::Result;

fn main() -> Result<()> {
    println!(
        "{:>5}  {:>10}  {:>12}  {:>14}  {:>12}",
        "h", "rho1", "xi1", "pi^2 h^2/32", "mu1 (FD)"
    );
    for h in [0.5, 1.0, 2.0, 4.0, 6.0] {
        let rho = rho1(h)?;
        let xi = xi1(h)?;
        let closed = PI * PI * h * h / 32.0;
        let mu = mu1_fd(&OneDimOperatorSpec::quadratic_well(h))?;
        let closed_str = if h <= 4.0 {
            format!("{closed:>14.8}")
        } else {
            format!("{:>14}", "(h > 4: n/a)")
        };
        println!("{h:>5.2}  {rho:>10.8}  {xi:>12.8}  {closed_str}  {mu:>12.8}");
        assert!(mu >= xi - 1e-6, "operator inequality must hold");
        assert!(
            mu1_lower_closed(h) <= mu + 1e-6,
            "published lower bound must hold"
        );
    }
    println!();
    println!("rho1(4) = pi/4 exactly: {:.12} vs {:.12}", rho1(4.0)?, PI / 4.0);
    Ok(())
}
