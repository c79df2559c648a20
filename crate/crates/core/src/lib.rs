//! Lower bounds for the first coexact eigenvalues of the Hodge Laplacian on
//! hyperbolic 3-manifolds with long Margulis tubes.
//!
//! The pipeline has three layers:
//! - [`tube_model`] and [`tube_spectrum`]: tube geometry and the two 1-D
//!   weighted eigenproblems that control a tube's first coexact eigenvalue,
//!   solved by the finite-element code in [`sturm_liouville`];
//! - [`cohomology`]: exact integer algebra for the section matrix of the
//!   Mayer–Vietoris coboundary and its norm;
//! - [`covering_bound`] and [`assembly`]: the two-open covering bound and the
//!   end-to-end sweeps; [`cli`] wraps them for the command line.

pub mod assembly;
pub mod cli;
pub mod cohomology;
pub mod covering_bound;
pub mod error;
pub mod quadrature;
pub mod scalar;
pub mod sturm_liouville;
pub mod tube_model;
pub mod tube_spectrum;

pub use error::{Error, Result};

pub type Tube64 = tube_model::Tube<f64>;
pub type Tube32 = tube_model::Tube<f32>;
pub type SlProblem64 = sturm_liouville::SlProblem<f64>;
pub type SlProblem32 = sturm_liouville::SlProblem<f32>;
pub type IntMatrix = cohomology::IntegerMatrix<i64>;
pub type BigIntMatrix = cohomology::IntegerMatrix<num_bigint::BigInt>;
pub type Cover64 = covering_bound::CoverSpec<f64>;
/// Covering bound in exact rational arithmetic.
pub type ExactCover = covering_bound::CoverSpec<num_rational::BigRational>;
pub type Model64 = assembly::ModelManifold<f64>;
pub type Report64 = assembly::BoundReport<f64>;
