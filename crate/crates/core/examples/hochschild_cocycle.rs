//! The symbol-level Hochschild pairing on the flat 2-torus: the graded
//! Clifford trace of a0 c(da1) c(da2) integrates to a fixed multiple of the
//! volume-form pairing a0 da1 ^ da2, with the normalization constant
//! reported rather than absorbed.

use dixmier::index::{even_pairing, even_pairing_minimal, graded_index, EvenModel};
use dixmier::symbols::{hochschild_pairing, TrigPoly};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() {
    // paired exponentials: a0 carries the opposite total frequency, so the
    // wedge integral is nonzero
    let a0 = TrigPoly::monomial(&[-1, -1]);
    let a1 = TrigPoly::monomial(&[1, 0]);
    let a2 = TrigPoly::monomial(&[0, 1]);
    let report = hochschild_pairing(&[a0.clone(), a1.clone(), a2.clone()]).unwrap();
    println!("pairing        = {:.10}", report.value);
    println!("wedge integral = {:.10}", report.wedge);
    println!("ratio          = {:.10}  [i / 2 pi = {:.10}i]", report.ratio.unwrap(), 1.0 / (2.0 * std::f64::consts::PI));

    // antisymmetry in the one-form slots
    let swapped = hochschild_pairing(&[a0, a2, a1]).unwrap();
    println!("swap(a1, a2)   = {:.10} (sign flip)", swapped.value);

    // constants are annihilated
    let trivial = hochschild_pairing(&[
        TrigPoly::constant(2, Complex64::new(2.0, 0.0)),
        TrigPoly::constant(2, Complex64::new(1.0, 0.0)),
        TrigPoly::constant(2, Complex64::new(5.0, 0.0)),
    ])
    .unwrap();
    println!("constants      = {:.1e}", trivial.value.norm());

    // the even cocycle pairing against projections equals the graded index;
    // here a rank-1 block projection on the doubled circle model
    let model = EvenModel::doubled_circle(8, 1.0).unwrap();
    let n = model.dim() / 2;
    let mut p = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    p[(3, 3)] = Complex64::new(1.0, 0.0);
    let e = model.block_projection(&p, &DMatrix::zeros(n, n));
    let index = graded_index(&model, &e).unwrap();
    let phi2 = even_pairing(&model, &e, 1).unwrap();
    let phi4 = even_pairing(&model, &e, 2).unwrap();
    let minimal = even_pairing_minimal(&model.clone().with_summability(2.0), &e).unwrap();
    println!("\neven model: graded index {index}, phi_2 {phi2}, phi_4 {phi4}, minimal {minimal}");
}
