//! The foliated identity on the flat 2-torus: the trace of
//! (1 + Laplacian)^{-1} computed from eigenvalues equals the chart integral
//! of the residue density of its symbol, and both scale linearly in the
//! transverse mass.

use dixmier::limiting::{dixmier_trace_of_spectrum, LimitProcessConfig};
use dixmier::models::{foliated_family, torus_model, LeafKind};
use dixmier::symbols::{cosphere_quadrature, foliated_residue, ClassicalSymbol, TrigPoly};
use num_complex::Complex64;

fn main() {
    // eigenvalue side: lattice points |k| <= 800, eigenvalues 1 + |k|^2
    let model = torus_model(2, LeafKind::Laplacian, 800).unwrap();
    let inverse = model.generator_spectrum().pow(-1.0).unwrap();
    let family = foliated_family(&inverse, &[0.25, 0.75]).unwrap(); // mass 1
    let spectrum = family.spectrum();
    let config = LimitProcessConfig::for_spectrum(&spectrum).unwrap();
    let eigen = dixmier_trace_of_spectrum(&spectrum, &config).unwrap();
    println!(
        "eigenvalue side: {:.6} (band {:.1e})   [pi = {:.6}]",
        eigen.value,
        eigen.error_band,
        std::f64::consts::PI
    );

    // symbol side: the principal symbol of (1 + Laplacian)^{-1} restricts to
    // the constant 1 on the cosphere; its residue density integrates to pi
    let one = TrigPoly::constant(2, Complex64::new(1.0, 0.0));
    let symbol = ClassicalSymbol::scalar(-2, &one);
    let quad = cosphere_quadrature(2, 8).unwrap();
    let residue = foliated_residue(&[(1.0, &symbol)], &quad, 8).unwrap();
    println!("symbol side:     {residue:.12}");

    // linearity in the transverse measure is exact
    let tripled = foliated_residue(&[(1.0, &symbol), (2.0, &symbol)], &quad, 8).unwrap();
    println!("mass 3 residue:  {tripled:.12} = 3 * {residue:.12}");

    // a position-dependent operator f(x) (1 + Laplacian)^{-1}: only the mean
    // of f survives on the eigenvalue side, matching the symbol integral
    let f = TrigPoly::from_coeffs(
        2,
        [
            (vec![0, 0], Complex64::new(1.0, 0.0)),
            (vec![1, 0], Complex64::new(0.5, 0.0)),
            (vec![-1, 0], Complex64::new(0.5, 0.0)),
        ],
    )
    .unwrap(); // f = 1 + cos x_1, mean 1
    let weighted = ClassicalSymbol::scalar(-2, &f);
    let value = foliated_residue(&[(1.0, &weighted)], &quad, 16).unwrap();
    println!("f = 1 + cos x1:  {value:.12} (mean(f) * pi)");
}
