//! Numerical toolkit for semifinite spectral theory.
//!
//! The crate makes the machinery of traces on semifinite von Neumann algebras
//! executable at desk scale:
//!
//! - [`spectrum`]: weighted spectra (eigenvalues with real trace weights),
//!   generalized singular values `mu_t`, their integrals `sigma_t`, norms and
//!   weak-ideal classification;
//! - [`limiting`]: the limiting process realized as iterated logarithmic
//!   Cesàro averaging plus windowed extrapolation, and Dixmier traces built
//!   on it;
//! - [`zeta`]: counting functions, spectral dimension, zeta functions and
//!   their residues, heat-trace and scaling-function regularizations;
//! - [`models`]: verifiable operator models (circle and torus spectra,
//!   foliated families with a transverse measure, weighted matrix algebras,
//!   the kernel-doubling construction);
//! - [`toeplitz`]: Toeplitz operators with trigonometric-polynomial symbols
//!   on the Hardy space;
//! - [`symbols`]: classical principal symbols, cosphere quadrature, local and
//!   foliated residues, and the symbol-level Hochschild pairing;
//! - [`index`]: real-valued Fredholm indices (kernel counting and the
//!   Calderon formula) and cyclic cocycle pairings;
//! - [`properties`]: the seeded property suite for the singular-value
//!   inequalities on random weighted matrix models.
//!
//! Everything is a pure function of immutable inputs; fixed seeds give
//! bit-identical runs. Asymptotic quantities always carry explicit error
//! bands, and estimators report non-convergence instead of fabricating a
//! value.

pub mod error;
pub mod index;
pub mod limiting;
pub mod models;
pub mod properties;
pub mod special;
pub mod spectrum;
pub mod symbols;
pub mod toeplitz;
pub mod zeta;

pub use error::{Error, Result};
pub use limiting::{
    bilinear_vanishing_check, dixmier_trace, dixmier_trace_of_spectrum, log_cesaro, omega_limit,
    truncated_trace_formulas, LimitEstimate, LimitProcessConfig, LogGrid,
};
pub use spectrum::{
    Atom, IdealClassification, Membership, NormValue, SigmaValue, SingularValueFunction, Tail,
    WeightedSpectrum,
};
