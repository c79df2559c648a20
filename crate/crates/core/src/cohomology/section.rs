use crate::scalar::Real;

use super::{CohomologyError, IntScalar, IntegerMatrix};

/// Square invertible section matrix `P = [A | B'_1 .. B'_{l-k}]` and its adjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionData<I, T> {
    pub a: IntegerMatrix<I>,
    pub b_cols: Vec<Vec<I>>,
    /// Indices into `b_cols` of the retained columns, in order.
    pub selected: Vec<usize>,
    pub p: IntegerMatrix<I>,
    pub det_p: I,
    pub adj_p: IntegerMatrix<I>,
    /// Radii of the tubes behind the retained columns.
    pub r_values: Vec<T>,
}

impl<I: IntScalar, T: Real> SectionData<I, T> {
    /// Number of thick-part classes `k`.
    pub fn thick_rank(&self) -> usize {
        self.a.cols()
    }

    /// Dimension `l` of the overlap image.
    pub fn image_dim(&self) -> usize {
        self.p.rows()
    }

    /// `P⁻¹ = adj(P) / det(P)` as floating point.
    pub fn inverse<U: Real>(&self) -> Vec<Vec<U>> {
        let d = U::lit(self.det_p.to_f64().expect("determinant converts"));
        self.adj_p.to_real::<U>().into_iter().map(|row| row.into_iter().map(|x| x / d).collect()).collect()
    }
}

/// Complete `A` to a square invertible matrix with columns of `b_cols`.
///
/// Columns are taken greedily in the given order, skipping any that do not
/// raise the rank, until the matrix is square.
pub fn assemble_section<I: IntScalar, T: Real>(
    a: IntegerMatrix<I>,
    b_cols: Vec<Vec<I>>,
    r_values: &[T],
) -> Result<SectionData<I, T>, CohomologyError> {
    if r_values.len() != b_cols.len() {
        return Err(CohomologyError::DimensionMismatch(format!(
            "{} columns but {} radii",
            b_cols.len(),
            r_values.len()
        )));
    }
    if b_cols.iter().any(|c| c.len() != a.rows()) {
        return Err(CohomologyError::DimensionMismatch("tube column length differs from A".into()));
    }
    let rank_a = a.rank();
    if rank_a < a.cols() {
        return Err(CohomologyError::RankDeficient { rank: rank_a, cols: a.cols() });
    }
    let needed = a.rows();
    let mut current = a.clone();
    let mut rank = rank_a;
    let mut selected = Vec::new();
    for (idx, col) in b_cols.iter().enumerate() {
        if rank == needed {
            break;
        }
        let trial = current.with_columns(std::slice::from_ref(col))?;
        let r = trial.rank();
        if r > rank {
            current = trial;
            rank = r;
            selected.push(idx);
        }
    }
    if rank < needed {
        return Err(CohomologyError::NoInvertibleCompletion { rank, needed });
    }
    let det_p = current.det()?;
    let adj_p = current.adjugate()?;
    let r_values = selected.iter().map(|&i| r_values[i]).collect();
    Ok(SectionData { a, b_cols, selected, p: current, det_p, adj_p, r_values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeMode {
    Raw,
    /// Also report whether `|b| ≥ R |a|`, where the bound is uniform.
    FillingRegime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleSectionBound<T> {
    pub value: T,
    pub regime_ok: Option<bool>,
}

/// `C_T ≤ c' max(1, R (a/b)^2)` for a single filling slope `(a, b)`.
pub fn section_ct_bound_single<T: Real>(
    a: i64,
    b: i64,
    radius: T,
    c_prime: T,
    mode: SlopeMode,
) -> Result<SingleSectionBound<T>, CohomologyError> {
    if b == 0 {
        return Err(CohomologyError::ZeroSlopeDenominator);
    }
    let q = T::lit(a as f64) / T::lit(b as f64);
    let value = c_prime * T::one().max(radius * q * q);
    let regime_ok = match mode {
        SlopeMode::Raw => None,
        SlopeMode::FillingRegime => Some(T::lit(b.unsigned_abs() as f64) >= radius * T::lit(a.unsigned_abs() as f64)),
    };
    Ok(SingleSectionBound { value, regime_ok })
}

/// Growth `‖B'_i‖ ≤ c'' e^{exponent · R_i}` of tube columns with the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnGrowth<T> {
    pub c_double_prime: T,
    pub exponent: T,
}

impl<T: Real> ColumnGrowth<T> {
    pub fn bound(&self, radius: T) -> T {
        self.c_double_prime * (self.exponent * radius).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSectionBound<T> {
    pub value: T,
    /// `C · R_max`.
    pub prefactor: T,
    /// `c'' e^{γ R_i}` per retained column.
    pub factors: Vec<T>,
    /// Measured `‖adj P‖`.
    pub adjugate_norm: T,
    /// Measured Euclidean norms of the retained columns.
    pub column_norms: Vec<T>,
}

/// `C_T ≤ C R_max ∏_i c'' e^{γ R_i}`; an empty product is 1.
pub fn section_ct_bound_general<I: IntScalar, T: Real>(
    section: &SectionData<I, T>,
    r_max: T,
    big_c: T,
    growth: ColumnGrowth<T>,
) -> Result<GeneralSectionBound<T>, CohomologyError> {
    if !(r_max > T::zero()) || !(big_c > T::zero()) {
        return Err(CohomologyError::InvalidParameter("R_max and C must be positive".into()));
    }
    let prefactor = big_c * r_max;
    let factors: Vec<T> = section.r_values.iter().map(|&r| growth.bound(r)).collect();
    let value = factors.iter().fold(prefactor, |acc, &f| acc * f);
    let column_norms = section
        .selected
        .iter()
        .map(|&i| {
            section.b_cols[i]
                .iter()
                .map(|x| {
                    let v = T::lit(x.to_f64().expect("entry converts"));
                    v * v
                })
                .sum::<T>()
                .sqrt()
        })
        .collect();
    Ok(GeneralSectionBound { value, prefactor, factors, adjugate_norm: section.adj_p.op_norm(), column_norms })
}
