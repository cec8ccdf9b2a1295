//! Weighted spectra and generalized singular values: the non-increasing
//! rearrangement, its running integral, norms, and ideal classification.

use dixmier::spectrum::{Tail, WeightedSpectrum};

fn main() {
    // two atoms with real trace weights: eigenvalue 3 with weight 1,
    // eigenvalue 1 with weight 2
    let small = WeightedSpectrum::from_atoms([(3.0, 1.0), (1.0, 2.0)]).unwrap();
    println!("small spectrum:");
    for t in [0.5, 1.0, 2.0, 3.5] {
        println!("  mu_{t} = {}", small.mu(t).unwrap());
    }
    println!("  sigma_2 = {}  (3*1 + 1*1)", small.sigma(2.0).unwrap().value);
    println!("  ||.||_2 = {}", small.norm_p(2.0).unwrap().value);

    // the circle model |D|^{-1}: eigenvalues 1/n with weight 2, plus the
    // declared tail model for everything beyond the enumeration
    let n = 100_000u32;
    let circle = WeightedSpectrum::from_atoms((1..=n).map(|k| (1.0 / k as f64, 2.0)))
        .unwrap()
        .with_tail(Tail::decay(2.0, 1.0))
        .unwrap();
    println!("\ncircle |D|^-1 ({n} modes):");
    println!("  mu_5      = {}  (exact: 1/3)", circle.mu(5.0).unwrap());
    println!("  mu beyond the enumeration extrapolates: mu_1e6 = {:.3e}", circle.mu(1e6).unwrap());
    let too_far = circle.mu(1e12);
    println!("  ... but refuses far beyond its validity: {too_far:?}");

    let norm = circle.norm_1inf().unwrap();
    println!("  ||.||_1,inf = {:.6} (+- {:.1e})", norm.value, norm.error);

    let class = circle.classify(1.0).unwrap();
    println!(
        "  classification: tau-compact {:?}, trace class {:?}, weak trace class {:?}",
        class.tau_compact, class.l1, class.l1_inf
    );

    // serialization round-trips deterministically
    let json = small.to_json();
    let back = WeightedSpectrum::from_json(&json).unwrap();
    assert_eq!(back.to_json(), json);
    println!("\nwire format: {json}");
}
