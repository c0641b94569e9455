//! Eleven-point acceptance gate: closed-form spectra, strip energies,
//! the one-dimensional certificate chain, the transition-bound table,
//! the relaxed optimizer, the transition sweep, and the reference
//! tilings, each at its stated tolerance.
//!
//! Every test prints one `criterion NN: PASS/FAIL - detail` line and
//! then asserts the verdict. Run
//! `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the line for passing criteria too. The optimizer criteria
//! (05, 06, 10) take tens of minutes together.

use std::f64::consts::PI;
use std::time::Instant;

use torpart::analytic::{j_bounds, strip_energy, torus_eigenvalue, transition_bounds, xi1};
use torpart::geom::TorusGeometry;
use torpart::grid::{Grid, GridField};
use torpart::oned::{cont_lambda1_default, mu1_fd, nu1_fd, OneDimOperatorSpec};
use torpart::relax::{gradient, multistart, DensitySet, RelaxParams};
use torpart::spectral::periodic_eigs;
use torpart::tilings::{
    double_cover_3partition, five_squares, hexagon_threshold, hexagonal_tiling,
    pair_compatibility, strips, verify_meeting_property,
};

const EIG_TOL: f64 = 1e-8;
/// Resolution for the five-square finite-difference check; the masked
/// rasterization converges at first order, so the 1% target needs a
/// fine mesh.
const FIVE_SQUARES_RES: usize = 512;

fn report(number: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {number:02}: {verdict} - {detail}");
    assert!(pass, "criterion {number:02} failed: {detail}");
}

fn grid(a: f64, b: f64, nx: usize, ny: usize) -> Grid {
    Grid::new(TorusGeometry::new(a, b).unwrap(), nx, ny).unwrap()
}

/// Optimizer controls for the multistart criteria: a short `p` schedule
/// and a looser stall tolerance keep the runs inside their time budgets
/// without hurting the few-percent accuracy targets.
fn search_params() -> RelaxParams {
    RelaxParams {
        p_schedule: vec![1.0, 4.0, 16.0],
        max_iters: 300,
        grad_tol: 1e-7,
        ..RelaxParams::default()
    }
}

#[test]
fn criterion_01_torus_spectrum_closed_form_and_fd() {
    // The (1,0) mode of T(1,1) must come out of the closed form exactly.
    let exact = torus_eigenvalue(1.0, 1.0, 1, 0);
    let closed_ok = exact == 4.0 * PI * PI;

    // First nonzero FD eigenvalue across a refinement ladder.
    let mut errs = Vec::new();
    let mut val128 = 0.0;
    for n in [32usize, 64, 128] {
        let g = grid(1.0, 1.0, n, n);
        let pairs = periodic_eigs(&g, 2, true, 1e-10).unwrap();
        let lam = pairs[1].value;
        if n == 128 {
            val128 = lam;
        }
        errs.push((lam - exact).abs());
    }
    let rel128 = (val128 - exact).abs() / exact;
    let order_coarse = (errs[0] / errs[1]).log2();
    let order_fine = (errs[1] / errs[2]).log2();
    let pass = closed_ok && rel128 <= 0.0025 && order_coarse >= 1.8 && order_fine >= 1.8;
    report(
        1,
        pass,
        &format!(
            "lambda_(1,0) = 4 pi^2 exactly; FD 128^2 rel err {rel128:.2e}; \
             orders {order_coarse:.2}, {order_fine:.2}"
        ),
    );
}

#[test]
fn criterion_02_strip_energy_independent_of_height() {
    let target = strip_energy(3, 1.0).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for b in [0.3, 0.6, 1.0] {
        let t = strips(3, TorusGeometry::new(1.0, b).unwrap()).unwrap();
        let lam = t.fd_energy(128, EIG_TOL).unwrap();
        let rel = (lam - target).abs() / target;
        pass &= rel <= 0.01;
        notes.push(format!("b={b}: {rel:.1e}"));
    }
    report(
        2,
        pass,
        &format!("strip lambda1 vs 9 pi^2, rel errors {}", notes.join(", ")),
    );
}

#[test]
fn criterion_03_certificate_chain_of_one_dimensional_wells() {
    let t0 = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for v in [0.5, 1.0, 2.0] {
        let h = 2.0 / v;
        let mu = mu1_fd(&OneDimOperatorSpec::quadratic_well(h)).unwrap();
        let nu = nu1_fd(&OneDimOperatorSpec::narrowing_width(v)).unwrap();
        let split = (nu - PI * PI - mu).abs();
        let xi = xi1(h).unwrap();
        let closed_lower = PI * PI * h * h / 32.0;
        let (lo, hi) = j_bounds(v).unwrap();
        let cont = cont_lambda1_default(v, 96).unwrap();
        let split_ok = split <= 1e-3 * PI * PI;
        let well_ok = mu >= xi - 1e-3 && xi >= closed_lower - 1e-9;
        let cont_ok = cont >= lo - 1e-3 * PI * PI && cont <= hi;
        pass &= split_ok && well_ok && cont_ok;
        notes.push(format!(
            "V={v}: split {split:.1e}, mu1-xi1 {:.4}, J {cont:.4} in [{lo:.4},{hi:.4})",
            mu - xi
        ));
    }
    let secs = t0.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    report(3, pass, &format!("{}; {secs:.1}s", notes.join("; ")));
}

#[test]
fn criterion_04_transition_bound_table() {
    let mut pass = true;
    for k in 2..=10u32 {
        let rep = transition_bounds(k).unwrap();
        pass &= rep.bs_lower < rep.bs_upper;
        if k % 2 == 0 {
            let even = rep.bk_even.expect("even k carries the exact value");
            pass &= (even - 2.0 / k as f64).abs() <= 1e-12;
        } else {
            let conj = rep.bk_conjectured.expect("odd k carries the conjecture");
            pass &= rep.bs_upper <= conj + 1e-12;
        }
    }
    let r3 = transition_bounds(3).unwrap();
    let to5 = |x: f64| (x * 1e5).round();
    pass &= to5(r3.bs_lower) == 33567.0
        && to5(r3.bs_upper) == 35355.0
        && to5(r3.bk_conjectured.unwrap()) == 70711.0;
    report(
        4,
        pass,
        &format!(
            "k=2..10 ordered; k=3 bounds {:.5} / {:.5} / {:.5}",
            r3.bs_lower,
            r3.bs_upper,
            r3.bk_conjectured.unwrap()
        ),
    );
}

#[test]
fn criterion_05_optimizer_desk_scale_and_gradient_check() {
    // Multistart on T(1, 1/2): two strips of width 1/2 are the optimum.
    let g = grid(1.0, 0.5, 96, 48);
    let outcome = multistart(&g, 2, &search_params(), 5).unwrap();
    let target = 4.0 * PI * PI;
    let energy = outcome.partition.energy;
    let energy_rel = (energy - target).abs() / target;

    // Finite-difference check of the energy gradient along a smooth
    // mass-exchange direction, at a strictly interior density pair.
    let g2 = grid(1.0, 1.0, 32, 32);
    let n = g2.len();
    let mut f0 = GridField::zeros(g2);
    let mut delta = vec![0.0; n];
    for idx in 0..n {
        let (i, j) = g2.coords(idx);
        let p = g2.point(i, j);
        f0.values[idx] = 0.5 + 0.3 * (2.0 * PI * p[0]).sin() * (2.0 * PI * p[1]).cos();
        delta[idx] = (2.0 * PI * p[0]).cos() * (4.0 * PI * p[1]).sin();
    }
    let mut f1 = GridField::zeros(g2);
    for idx in 0..n {
        f1.values[idx] = 1.0 - f0.values[idx];
    }
    let params = RelaxParams {
        eig_tol: 1e-11,
        ..RelaxParams::default()
    };
    let p = 2.0;
    let dens = DensitySet {
        grid: g2,
        fields: vec![f0.clone(), f1.clone()],
    };
    let rep = gradient(&dens, &params, p).unwrap();
    let analytic: f64 = (0..n)
        .map(|idx| (rep.fields[0].values[idx] - rep.fields[1].values[idx]) * delta[idx])
        .sum();
    let energy_at = |t: f64| -> f64 {
        let mut fields = vec![f0.clone(), f1.clone()];
        for idx in 0..n {
            fields[0].values[idx] += t * delta[idx];
            fields[1].values[idx] -= t * delta[idx];
        }
        let d = DensitySet { grid: g2, fields };
        gradient(&d, &params, p).unwrap().energy
    };
    let eps = 1e-5;
    let fd = (energy_at(eps) - energy_at(-eps)) / (2.0 * eps);
    let grad_rel = (fd - analytic).abs() / analytic.abs().max(1e-12);

    let pass = energy_rel <= 0.03 && grad_rel <= 1e-4;
    report(
        5,
        pass,
        &format!(
            "multistart energy {energy:.4} vs 4 pi^2 ({:+.2}%); \
             gradient FD rel err {grad_rel:.1e}",
            100.0 * (energy - target) / target
        ),
    );
}

#[test]
fn criterion_06_strip_to_hexagon_transition_sweep() {
    // At 128 columns a best-balanced strip partition (43/43/42 columns,
    // mid-edge walls) evaluates about 1.6% below 9 pi^2, well inside the
    // 3% band asserted on the strip side of the sweep.
    let target = strip_energy(3, 1.0).unwrap();
    let params = search_params();
    let mut pass = true;
    let mut rows = Vec::new();
    for b in [0.60_f64, 0.65, 0.70, 0.75, 0.80] {
        let ny = (128.0 * b).ceil() as usize;
        let g = grid(1.0, b, 128, ny);
        let outcome = multistart(&g, 3, &params, 5).unwrap();
        let energy = outcome.partition.energy;
        let dev = (energy - target) / target;
        if b < 0.66 {
            pass &= dev.abs() <= 0.03;
        } else if b > 0.74 {
            pass &= energy < target * 0.98;
        }
        rows.push(format!("b={b:.2}: {energy:.2} ({:+.2}%)", 100.0 * dev));
    }
    report(6, pass, &format!("best energy vs 9 pi^2: {}", rows.join(", ")));
}

#[test]
fn criterion_07_hexagon_thresholds_and_meeting_property() {
    let mut pass = true;
    let mut vals = Vec::new();
    for (k, expect) in [(3usize, 0.396_f64), (4, 0.289), (5, 0.233)] {
        let bh = hexagon_threshold(k).unwrap();
        pass &= (bh * 1e3).round() == (expect * 1e3).round();
        pass &= hexagonal_tiling(k, bh - 0.01).is_err();
        let t = hexagonal_tiling(k, bh + 0.002).unwrap();
        pass &= verify_meeting_property(&t).is_ok();
        vals.push(format!("b_H({k}) = {bh:.6}"));
    }
    // A fat torus exercises a different winning lattice branch.
    let fat = hexagonal_tiling(3, 0.9).unwrap();
    pass &= verify_meeting_property(&fat).is_ok();
    report(
        7,
        pass,
        &format!(
            "{}; below-threshold rejected; all vertices meet three cells at 120 degrees",
            vals.join(", ")
        ),
    );
}

#[test]
fn criterion_08_hexagon_overtakes_strips_inside_bracket() {
    let target = strip_energy(3, 1.0).unwrap();
    let below = hexagonal_tiling(3, 0.65)
        .unwrap()
        .fd_energy(128, EIG_TOL)
        .unwrap();
    let above = hexagonal_tiling(3, 0.75)
        .unwrap()
        .fd_energy(128, EIG_TOL)
        .unwrap();
    let pass = below > target && above < target;
    report(
        8,
        pass,
        &format!(
            "lambda1(Hex_3) - 9 pi^2 = {:+.3} at b=0.65, {:+.3} at b=0.75",
            below - target,
            above - target
        ),
    );
}

#[test]
fn criterion_09_pair_compatibility_gaps() {
    // Strips: each glued pair is the nodal pair of its second
    // eigenfunction, so the relative gap must vanish.
    let s = strips(2, TorusGeometry::new(1.0, 0.6).unwrap()).unwrap();
    let srep = pair_compatibility(&s, 160).unwrap();
    let strips_ok = srep.max_gap < 0.01;

    // Hexagons at b = 0.72: the reported gap is only meaningful if it
    // exceeds twice the FD convergence error of the cell eigenvalue.
    let hex = hexagonal_tiling(3, 0.72).unwrap();
    let coarse = pair_compatibility(&hex, 96).unwrap();
    let fine = pair_compatibility(&hex, 160).unwrap();
    let fd_err = (fine.lambda1_cell - coarse.lambda1_cell).abs() / fine.lambda1_cell;
    let threshold = (2.0 * fd_err).max(0.02);
    let hex_ok = fine.max_gap > threshold;
    let pass = strips_ok && hex_ok;
    report(
        9,
        pass,
        &format!(
            "strips gap {:.1e}; hexagon gap {:.4} at 160/unit ({:.4} at 96/unit) \
             vs threshold {threshold:.4} with 2x FD error {:.4}",
            srep.max_gap,
            fine.max_gap,
            coarse.max_gap,
            2.0 * fd_err
        ),
    );
}

#[test]
fn criterion_10_five_squares_value_and_search() {
    let t = five_squares();
    let exact = t.exact_lambda1.expect("five squares carry the closed form");
    let closed_ok = exact == 10.0 * PI * PI;
    let fd = t.fd_energy(FIVE_SQUARES_RES, EIG_TOL).unwrap();
    let fd_rel = (fd - exact).abs() / exact;

    let g = grid(1.0, 1.0, 128, 128);
    let outcome = multistart(&g, 5, &search_params(), 10).unwrap();
    let best = outcome.partition.energy;
    let best_rel = (best - exact).abs() / exact;
    let pass = closed_ok && fd_rel <= 0.01 && best_rel <= 0.05;
    report(
        10,
        pass,
        &format!(
            "cell lambda1 = 10 pi^2 exactly; FD at {FIVE_SQUARES_RES}/unit off {:.2}%; \
             multistart best {best:.2} ({:+.2}%)",
            100.0 * fd_rel,
            100.0 * (best - exact) / exact
        ),
    );
}

#[test]
fn criterion_11_double_cover_three_partition() {
    let t = double_cover_3partition(0.25, 384).unwrap();
    let target = strip_energy(3, 1.0).unwrap();
    let lams = t.lambda1_per_cell(0, EIG_TOL).unwrap();
    let mut worst = 0.0_f64;
    for &l in &lams {
        worst = worst.max((l - target).abs() / target);
    }
    let pass = t.k == 3 && lams.len() == 3 && worst <= 0.02;
    report(
        11,
        pass,
        &format!(
            "3 cells with lambda1 {:.2}, {:.2}, {:.2}; worst deviation {:.2}% of 9 pi^2",
            lams[0],
            lams[1],
            lams[2],
            100.0 * worst
        ),
    );
}
