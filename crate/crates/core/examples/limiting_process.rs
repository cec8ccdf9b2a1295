//! The limiting process at work: logarithmic Cesàro averaging, windowed
//! extrapolation, and honest refusal on genuinely oscillatory input.

use dixmier::limiting::{log_cesaro, omega_limit, LimitProcessConfig};

fn main() {
    let config = LimitProcessConfig::for_range(1e6).unwrap();

    // averaging fixes constants bit-for-bit and contracts oscillation
    let constant = vec![3.0; config.grid.len()];
    let m = log_cesaro(&config.grid, &constant).unwrap();
    println!("M(3) = {} at the grid end", m.last().unwrap());

    let wobble = config.grid.sample(|t| t.ln().sin());
    let m = log_cesaro(&config.grid, &wobble).unwrap();
    let amp = m.iter().cloned().fold(0.0f64, |a, x| a.max(x.abs()));
    println!("sup |M(sin log t)| = {amp:.3} (< 1)");

    // a convergent function: the estimator reports its limit with a band
    let est = omega_limit(&config.grid, &config.grid.sample(|t| 1.0 + 1.0 / t), &config).unwrap();
    println!(
        "omega(1 + 1/t)      = {:.6} (band {:.1e}, converged {})",
        est.value, est.error_band, est.converged
    );

    // slow logarithmic corrections are extrapolated away
    let est = omega_limit(
        &config.grid,
        &config.grid.sample(|t| 2.0 - 0.3 / (1.0 + t).ln()),
        &config,
    )
    .unwrap();
    println!(
        "omega(2 - 0.3/log t) = {:.6} (band {:.1e}, converged {})",
        est.value, est.error_band, est.converged
    );

    // sin(log t) has no limit at infinity: the estimator refuses to commit
    // and brackets the window instead of fabricating a value
    let est = omega_limit(&config.grid, &config.grid.sample(|t| t.ln().sin()), &config).unwrap();
    println!(
        "omega(sin log t)     = {:.3} +- {:.3}, converged = {}",
        est.value, est.error_band, est.converged
    );

    // per-iteration diagnostics are kept: t, f, Mf, M^2 f, M^3 f
    println!("\nlast diagnostic row (t = {:.3e}):", config.grid.end());
    for (k, it) in est.diagnostics.iterates.iter().enumerate() {
        println!("  M^{k} f(end) = {:+.6}", it.last().unwrap());
    }
}
