//! Real-valued Fredholm indices of Toeplitz operators, computed four ways:
//! kernel counting, the Calderon trace formula, the odd cocycle pairing,
//! and kernel counting on the kernel-doubled space. With a rescaled trace
//! the index becomes a genuine fraction.

use dixmier::index::{doubled_toeplitz_index, odd_pairing, FredholmPair};
use dixmier::toeplitz::{sign_commutator_rank, toeplitz, CircleSymbol};
use num_complex::Complex64;

fn main() {
    println!("symbol u = e^(i m theta), trace scale 1:");
    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>10}", "m", "kernel", "calderon", "phi_1", "phi_3", "doubled");
    for m in [-3i64, -1, 1, 2, 3] {
        let u = CircleSymbol::monomial(m);
        let model = toeplitz(&u, 256).unwrap();
        let kernel = model.tau_index().unwrap();
        let pair = FredholmPair::toeplitz(model, 1.0).unwrap();
        let calderon = pair.calderon_index(1).unwrap();
        let phi1 = odd_pairing(&u, 0, 1.0).unwrap();
        let phi3 = odd_pairing(&u, 1, 1.0).unwrap();
        let doubled = doubled_toeplitz_index(&u, 24, 1.0).unwrap();
        println!("{m:>4} {kernel:>10.4} {calderon:>10.4} {phi1:>10.4} {phi3:>10.4} {doubled:>10.4}");
    }

    // the commutator with the Hardy symmetry has rank |m|, independently of
    // the truncation window
    for m in 1..=3i64 {
        let rank = sign_commutator_rank(&CircleSymbol::monomial(m), 30);
        println!("rank [F, e^(i {m} theta)] = {rank}");
    }

    // a non-monomial invertible symbol: winding number 1
    let u = CircleSymbol::new([
        (1, Complex64::new(3.0, 0.0)),
        (2, Complex64::new(1.0, 0.0)),
        (0, Complex64::new(0.5, 0.0)),
    ]);
    println!(
        "\nu = 3 e^(it) + e^(2it) + 1/2: winding {}, index {}",
        u.winding_number().unwrap(),
        toeplitz(&u, 512).unwrap().tau_index().unwrap()
    );

    // a rescaled trace makes the index a real number: tau = (1/3) Tr
    let u = CircleSymbol::monomial(1);
    let third = toeplitz(&u, 128).unwrap().with_scale(1.0 / 3.0).unwrap();
    println!(
        "with trace (1/3) Tr: index = {} (a non-integer index)",
        third.tau_index().unwrap()
    );
}
