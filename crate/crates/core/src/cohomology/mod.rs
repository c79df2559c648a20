//! Integer linear algebra of the Mayer–Vietoris section for Dehn fillings.
//!
//! `P = [A | B'_1 .. B'_{l-k}]` collects the images of thick-part classes
//! (columns of `A`) and of retained tube generators (the `B'_i`) in the
//! overlap cohomology. The section is `P⁻¹ = adj(P) / det(P)`; note the
//! inverse is the adjugate divided by the determinant, not multiplied.

mod isotropy;
mod matrix;
mod section;

use thiserror::Error;

pub use isotropy::{boundary_image_check, symplectic_form, IsotropyReport};
pub use matrix::{IntScalar, IntegerMatrix};
pub use section::{
    assemble_section, section_ct_bound_general, section_ct_bound_single, ColumnGrowth, GeneralSectionBound,
    SectionData, SingleSectionBound, SlopeMode,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("bad matrix shape: {0}")]
    Shape(String),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("intersection form is not antisymmetric")]
    NotAntisymmetric,
    #[error("intersection form is degenerate (det = {0})")]
    DegenerateForm(String),
    #[error("thick-part matrix has rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },
    #[error("no invertible completion: reached rank {rank} of {needed}")]
    NoInvertibleCompletion { rank: usize, needed: usize },
    #[error("slope with b = 0 is excluded")]
    ZeroSlopeDenominator,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
