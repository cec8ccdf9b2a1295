//! Regularized spectral formulas: the heat-trace limit (the Weyl formula
//! with constant Gamma(p/2 + 1)) and general scaling functions with
//! constant C_p(f) = p * integral of f(t) t^{p-1}.

use dixmier::limiting::{dixmier_trace_of_spectrum, LimitProcessConfig};
use dixmier::models::{circle_dirac, torus_model, LeafKind};
use dixmier::special::gamma;
use dixmier::zeta::{c_p, heat_trace_check, mellin_plateau, regularized_integral, ScalingFunction};

fn main() {
    // circle, p = 1: t * sum 2 exp(-t^2 n^2) -> sqrt(pi)
    let circle = circle_dirac(100_000).unwrap().abs_positive();
    let heat = heat_trace_check(&circle, None, 1.0).unwrap();
    println!(
        "circle heat limit  = {:.8}  [sqrt(pi) = {:.8}]",
        heat.value,
        std::f64::consts::PI.sqrt()
    );

    // torus, p = 2: t^2 * sum 2 exp(-t^2 |k|^2) -> Gamma(2) * trace(|D|^-2)
    let torus = torus_model(2, LeafKind::Dirac, 360).unwrap().generator_spectrum();
    let heat = heat_trace_check(&torus, None, 2.0).unwrap();
    let inv2 = torus.pow(-2.0).unwrap();
    let cfg = LimitProcessConfig::for_spectrum(&inv2).unwrap();
    let trace = dixmier_trace_of_spectrum(&inv2, &cfg).unwrap();
    println!(
        "torus heat limit   = {:.6} vs Gamma(2) * {:.6} = {:.6}",
        heat.value,
        trace.value,
        gamma(2.0) * trace.value
    );

    // the same trace through arbitrary scaling profiles
    for f in [ScalingFunction::gaussian(), ScalingFunction::smoothed_indicator(0.1).unwrap()] {
        let constant = c_p(&f, 2.0).unwrap();
        let est = regularized_integral(&torus, None, &f, 2.0).unwrap();
        println!(
            "{:<16} C_2 = {:.6}, limit/C_2 = {:.6}",
            f.name(),
            constant,
            est.value / constant
        );
    }

    // the plateau form divides by log(lambda) instead and recovers
    // f(0) * trace directly
    let plateau = mellin_plateau(&circle, None, &ScalingFunction::exponential(), 1.0).unwrap();
    println!("circle plateau     = {:.6}  [trace of |D|^-1 = 2]", plateau.value);
}
