//! Accelerated observers: the windowed wedge decomposition of the invariant
//! observable. Canonical constraints of the mixing kernel at the matched
//! discretization, then the wedge-restricted expectation values that return
//! the encoded integer scaled by the window weight.
//!
//! ```bash
//! cargo run --release --example rindler_wedges
//! ```

use bogochannel::channels::rindler::{rindler_alpha, RindlerKernel};

fn main() {
    let a = 1.0;
    println!("proper acceleration a = {a} (natural units)\n");

    println!("kernel is exactly zero across sign boundaries:");
    for (k, l) in [(1.0, -1.0), (-0.5, 2.0)] {
        println!("  alpha({k:+}, {l:+}) = {}", rindler_alpha(k, l, a).unwrap());
    }
    let sample = rindler_alpha(2.0, 1.5, a).unwrap();
    println!("  alpha(+2.0, +1.5) = {:.6}{:+.6}i\n", sample.re, sample.im);

    let kernel = RindlerKernel::matched(a, 0.25, 4.0, 17).unwrap();
    println!(
        "matched kernel: {} inertial modes over [0.25, 4], {} wedge modes up to {:.2}",
        kernel.l_points().len(),
        kernel.k_points().len(),
        kernel.k_points().last().unwrap()
    );

    let report = kernel.constraint_report();
    println!("\ncanonical constraints relative to the discrete delta scale:");
    println!("  diagonal error      {:.3e}", report.max_diag_rel_err);
    println!("  off-diagonal (max)  {:.3e}", report.max_offdiag_rel);
    println!("  second constraint   {:.3e}", report.max_second_rel);

    let fine = kernel.refined(2).unwrap();
    let rf = fine.constraint_report();
    println!("after refining both grids twofold:");
    println!("  off-diagonal (max)  {:.3e}", rf.max_offdiag_rel);
    println!("  second constraint   {:.3e}", rf.max_second_rel);

    let (wedge_i, wedge_ii) = kernel.regional_split();
    println!(
        "\nwedge window weight {:.3} per wedge; expectation on encoded eigenstates:",
        wedge_i.window_weight()
    );
    println!("{:>8}  {:>16}  {:>16}  {:>10}", "lambda", "wedge I", "wedge II", "target");
    for lambda in 0..=3i64 {
        let target = lambda as f64 * wedge_i.window_weight();
        println!(
            "{lambda:>8}  {:>16.12}  {:>16.12}  {target:>10.3}",
            wedge_i.expectation_eigenstate(lambda),
            wedge_ii.expectation_eigenstate(lambda)
        );
    }
    println!("\nvacuum expectation in either wedge: {}", wedge_i.expectation_vacuum());
}
