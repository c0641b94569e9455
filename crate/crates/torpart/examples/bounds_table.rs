//! Transition-width bounds for the strip partitions of T(1,b).
//!
//! For each k the table shows the certified window around the
//! transition width b_k (the largest b at which k vertical strips stay
//! minimal): strips are provably minimal up to bS_lower, provably
//! non-minimal strictly above bS_upper, the exact value 2/k is known
//! for even k, and 2/sqrt(k^2-1) is the conjectured value for odd k.

use torpart::analytic::transition_bounds;
use torpart::Result;

fn main() -> Result<()> {
    println!("certified windows for the k-strip transition width b_k");
    println!();
    println!(
        "{:>3}  {:>12}  {:>12}  {:>12}  {:>14}",
        "k", "bS_lower", "bS_upper", "bk (even)", "bk (odd, conj)"
    );
    for k in 2..=10 {
        let rep = transition_bounds(k)?;
        let even = rep
            .bk_even
            .map_or_else(|| "-".into(), |v| format!("{v:.8}"));
        let odd = rep
            .bk_conjectured
            .map_or_else(|| "-".into(), |v| format!("{v:.8}"));
        println!(
            "{:>3}  {:>12.8}  {:>12.8}  {:>12}  {:>14}",
            rep.k, rep.bs_lower, rep.bs_upper, even, odd
        );
    }
    println!();
    println!("the lower bound comes with its one-dimensional certificate,");
    println!("evaluated at V = 1/bS_lower (see the squarewell_levels example):");
    let rep = transition_bounds(3)?;
    println!(
        "  k=3: V = {:.6}, rho1 = {:.6}, xi1 = {:.6}, pi^2 h^2/32 = {:.6}",
        rep.v_used, rep.rho1, rep.xi1, rep.mu1_lower_closed
    );
    Ok(())
}
