//! The measured spectrum is frame-independent: sorted eigenvalues of the
//! observable before and after random symmetric channels, compared on the
//! certified interior block of a buffered working space.
//!
//! ```bash
//! cargo run --release --example spectrum_invariance
//! ```

use bogochannel::channels::random_symmetric_channel_with_cap;
use bogochannel::cli::{spectrum_rows, Value};
use bogochannel::evolve::dense_unitary;
use bogochannel::fock::ModeSet;
use bogochannel::invariant::uniform_invariant;
use num_complex::Complex64;

fn main() {
    // show a few eigenvalues explicitly at a small size
    let working = ModeSet::new(&[1.0], 12).unwrap();
    let l = uniform_invariant(&working).unwrap();
    let ldense = l.fock_form().mat.to_dense();
    let interior = working.interior_indices(8); // occupations <= 4
    let lsub = ldense.select_rows(interior.as_slice()).select_columns(interior.as_slice());
    let mut base: Vec<f64> = lsub.symmetric_eigen().eigenvalues.iter().copied().collect();
    base.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let ch = random_symmetric_channel_with_cap(3, 0.3, &working, 0.15).unwrap();
    let h = ch.generator.as_ref().unwrap().to_fock(&working).unwrap();
    let u = dense_unitary(&h, 4096).unwrap();
    let t = u.adjoint() * &ldense * &u;
    let t = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
    let tsub = t.select_rows(interior.as_slice()).select_columns(interior.as_slice());
    let mut evolved: Vec<f64> = tsub.symmetric_eigen().eigenvalues.iter().copied().collect();
    evolved.sort_by(|a, b| a.partial_cmp(b).unwrap());

    println!("interior spectrum before and after one symmetric channel (occupations <= 4):");
    println!("{:>12}  {:>16}  {:>10}", "before", "after", "shift");
    for (b, e) in base.iter().zip(&evolved).step_by(3) {
        println!("{b:>12.6}  {e:>16.12}  {:>10.2e}", (b - e).abs());
    }

    // the batch check at the calibrated settings
    println!("\nworst eigenvalue shift per channel (certified block occ <= 5, buffer 16):");
    let rows = spectrum_rows(1, 5, 16, 10, 0.3, 99).unwrap();
    for row in &rows {
        let (Value::Int(c), Value::Float(dev)) = (&row[0], &row[1]) else {
            continue;
        };
        println!("  channel {c:>2}: {dev:.3e}");
    }
}
