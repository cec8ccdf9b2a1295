//! The singular-value toolbox on weighted matrix algebras: rescaled traces
//! realize non-integer dimensions, and the classical inequalities hold
//! exactly on random models.

use dixmier::models::WeightedMatrixAlgebra;
use dixmier::properties::snumber_suite;
use nalgebra::DMatrix;

fn main() {
    // tau = 0.5 * Tr: the identity on C^3 has trace 1.5
    let alg = WeightedMatrixAlgebra::new(3, 0.5).unwrap();
    let id = DMatrix::<f64>::identity(3, 3);
    println!("tau(1) = {}", alg.trace(&id));

    // singular values of a concrete matrix, each carrying weight 0.5
    let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]);
    let spectrum = alg.singular_spectrum(&m);
    println!("singular spectrum of m:");
    for atom in spectrum.atoms() {
        println!("  value {:.6}, weight {}", atom.value, atom.weight);
    }
    for t in [0.25, 0.75, 1.25] {
        println!("  mu_{t} = {:.6}, sigma_{t} = {:.6}", alg.mu(&m, t).unwrap(), alg.sigma(&m, t).unwrap());
    }

    // the seeded property suite: symmetry, scaling, monotone functions, the
    // sum/product inequalities, sigma super/subadditivity, the interpolation
    // description with its attaining soft-threshold split, and the trace
    // formula — all exact up to linear-algebra noise
    let report = snumber_suite(42, 50);
    println!("\n{}", report.summary());
}
