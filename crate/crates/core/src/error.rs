use thiserror::Error;

use crate::cohomology::CohomologyError;
use crate::covering_bound::CoverError;
use crate::sturm_liouville::SolverError;
use crate::tube_model::TubeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Tube(#[from] TubeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
