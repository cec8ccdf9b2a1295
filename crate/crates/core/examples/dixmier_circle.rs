//! Three independent routes to the Dixmier trace of |D|^{-1} on the circle,
//! all equal to 2: the limiting process on sigma_t / log(1+t), the residue
//! of the zeta function at its convergence boundary, and the Weyl ratio of
//! the counting function.

use dixmier::limiting::{dixmier_trace_of_spectrum, LimitProcessConfig};
use dixmier::models::circle_dirac;
use dixmier::zeta::{residue_to_dixmier, weyl_ratio, ResidueOptions};

fn main() {
    let circle = circle_dirac(1_000_000).unwrap();
    let abs = circle.abs_positive(); // |D|: eigenvalue n, weight 2
    let inv = circle.inverse_abs(); // |D|^{-1}

    // route 1: omega-limit of sigma_t / log(1+t)
    let config = LimitProcessConfig::for_spectrum(&inv).unwrap();
    let direct = dixmier_trace_of_spectrum(&inv, &config).unwrap();
    println!(
        "limiting route:   trace = {:.8} (band {:.1e}, converged {})",
        direct.value, direct.error_band, direct.converged
    );

    // route 2: (x + d) zeta(x) -> A as x approaches the boundary -d;
    // the trace is -A/d
    let profile = residue_to_dixmier(&abs, ResidueOptions::default()).unwrap();
    println!(
        "residue route:    trace = {:.8} (A = {:.6}, d = {}, boundary {})",
        profile.trace, profile.a, profile.d, profile.boundary
    );

    // route 3: N(lambda) / lambda^d
    let weyl = weyl_ratio(&abs, None).unwrap();
    println!(
        "Weyl ratio route: trace = {:.8} (band {:.1e})",
        weyl.value, weyl.error_band
    );

    let worst = [direct.value, profile.trace, weyl.value]
        .iter()
        .map(|v| (v - 2.0).abs())
        .fold(0.0f64, f64::max);
    println!("\nall three equal 2 within {worst:.2e}");

    // the kernel mode is handled by the invertible replacement (D^2+1)^{1/2},
    // a bounded perturbation that leaves the trace unchanged
    let reg = circle.inverse_regularized();
    let cfg = LimitProcessConfig::for_spectrum(&reg).unwrap();
    let reg_trace = dixmier_trace_of_spectrum(&reg, &cfg).unwrap();
    println!("regularized model: trace = {:.8}", reg_trace.value);
}
