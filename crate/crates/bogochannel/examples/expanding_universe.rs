//! Communication from the asymptotic past to the asymptotic future of an
//! expanding universe: sector mixing coefficients from two independent
//! routes, then the integer protocol straight through the expansion.
//!
//! ```bash
//! cargo run --release --example expanding_universe
//! ```

use bogochannel::channels::expanding::{rw_bogoliubov, rw_channel, rw_frequencies};
use bogochannel::fock::ModeSet;
use bogochannel::invariant::{schwinger_eigenstate, uniform_invariant, EigenstateProfile};
use bogochannel::protocol::{decode_expectation, transmit};

fn main() {
    let (k, m, sigma) = (0.2, 0.4, 1.0);
    println!("mode pair {{k, -k}} with k = {k}, mass {m}, expansion rate sigma = {sigma}\n");
    println!(
        "{:>6}  {:>9}  {:>9}  {:>10}  {:>10}  {:>10}  {:>12}",
        "eps", "omega_in", "omega_out", "alpha", "beta", "xi", "oracle delta"
    );
    for eps in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let (w_in, w_out) = rw_frequencies(k, m, eps);
        let rw = rw_bogoliubov(k, m, eps, sigma).unwrap();
        let xi = (rw.beta / rw.alpha).atanh();
        println!(
            "{eps:>6.2}  {w_in:>9.4}  {w_out:>9.4}  {:>10.6}  {:>10.6}  {:>10.6}  {:>12.2e}",
            rw.alpha, rw.beta, xi, rw.oracle_delta
        );
    }

    let eps = 2.0;
    println!("\nprotocol through the eps = {eps} expansion (sender in the past, receiver in the future):");
    let ch = rw_channel(k, m, eps, sigma).unwrap();
    let ms = ModeSet::new(&[k, -k], 13).unwrap();
    let l = uniform_invariant(&ms).unwrap();
    for lambda in 0..=3i64 {
        let psi = schwinger_eigenstate(lambda, &ms, &EigenstateProfile::Minimal).unwrap();
        let tx = transmit(&psi, &ch, 1e-6).unwrap();
        let (e, decoded) = decode_expectation(&tx.state, &l).unwrap();
        println!(
            "  sent {lambda} -> <L> = {e:+.9}, decoded {decoded}, leakage {:.2e}",
            tx.leakage
        );
    }
    println!("\nthe receiver never learned eps or sigma.");
}
