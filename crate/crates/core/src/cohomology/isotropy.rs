
use super::{CohomologyError, IntScalar, IntegerMatrix};

/// Outcome of checking that a boundary image is a Lagrangian-sized isotropic subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropyReport {
    pub rank: usize,
    /// Half the boundary dimension.
    pub half_dimension: usize,
    /// `Xᵀ J X = 0` exactly.
    pub isotropic: bool,
    /// `rank = half_dimension`.
    pub half_dim: bool,
}

impl IsotropyReport {
    pub fn passes(&self) -> bool {
        self.isotropic && self.half_dim
    }
}

/// Block-diagonal `[[0, 1], [-1, 0]]` form on `Z^{2k}`: the intersection form
/// of `k` boundary tori.
pub fn symplectic_form<I: IntScalar>(blocks: usize) -> IntegerMatrix<I> {
    let n = 2 * blocks;
    let mut j = IntegerMatrix::zeros(n, n);
    for b in 0..blocks {
        j.set(2 * b, 2 * b + 1, I::one());
        j.set(2 * b + 1, 2 * b, -I::one());
    }
    j
}

/// Rank and isotropy of the image of `H¹(M) → H¹(∂M)` for the form `J`.
///
/// The restriction map and the coboundary into compactly supported cohomology
/// are transposes under Poincaré duality, which forces the image to be
/// isotropic of half dimension.
pub fn boundary_image_check<I: IntScalar>(
    image: &IntegerMatrix<I>,
    form: &IntegerMatrix<I>,
) -> Result<IsotropyReport, CohomologyError> {
    if !form.is_square() {
        return Err(CohomologyError::NotSquare { rows: form.rows(), cols: form.cols() });
    }
    let n = form.rows();
    if n % 2 != 0 {
        return Err(CohomologyError::DimensionMismatch(format!("form has odd dimension {n}")));
    }
    if image.rows() != n {
        return Err(CohomologyError::DimensionMismatch(format!(
            "image has {} rows, form has dimension {n}",
            image.rows()
        )));
    }
    if form.transpose() != form.scale(&-I::one()) {
        return Err(CohomologyError::NotAntisymmetric);
    }
    let det = form.det()?;
    if !det.abs().is_one() {
        return Err(CohomologyError::DegenerateForm(format!("{det:?}")));
    }
    let gram = image.transpose().mul(form)?.mul(image)?;
    let rank = image.rank();
    let half_dimension = n / 2;
    Ok(IsotropyReport { rank, half_dimension, isotropic: gram.is_zero(), half_dim: rank == half_dimension })
}
