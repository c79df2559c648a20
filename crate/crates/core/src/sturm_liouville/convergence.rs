use crate::scalar::Real;

use super::{first_eigenvalue, SlProblem, SolverError};

/// First eigenvalue on a sequence of doubling meshes.
#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    pub elements: Vec<usize>,
    pub eigenvalues: Vec<T>,
    /// Errors against the closed form when one was supplied, else successive differences.
    pub errors: Vec<T>,
    /// Observed order between each consecutive pair of errors.
    pub orders: Vec<T>,
    pub estimated_order: T,
    pub extrapolated: T,
}

/// Observed order and Richardson-extrapolated first eigenvalue.
///
/// With `exact` given, errors are `λ(n) - exact`; otherwise the study is a
/// self-convergence one on successive differences `λ(n) - λ(2n)`. The kernel
/// mode is dropped automatically for pure-Neumann problems.
pub fn convergence_study<T: Real>(
    problem: &SlProblem<T>,
    elements: &[usize],
    exact: Option<T>,
) -> Result<ConvergenceReport<T>, SolverError> {
    if elements.len() < 3 {
        return Err(SolverError::Convergence(format!("need at least 3 meshes, got {}", elements.len())));
    }
    if elements.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(SolverError::Convergence("mesh sequence must double".into()));
    }
    let drop_kernel = problem.is_pure_neumann();
    let eigenvalues = elements
        .iter()
        .map(|&n| {
            let mesh = problem.mesh.with_elements(n)?;
            first_eigenvalue(&problem.with_mesh(mesh), drop_kernel)
        })
        .collect::<Result<Vec<T>, _>>()?;
    let errors: Vec<T> = match exact {
        Some(x) => eigenvalues.iter().map(|&l| l - x).collect(),
        None => eigenvalues.windows(2).map(|w| w[0] - w[1]).collect(),
    };
    // conforming elements converge from above: errors positive and shrinking
    if errors.iter().any(|&e| !(e > T::zero())) || errors.windows(2).any(|w| w[1] >= w[0]) {
        return Err(SolverError::Convergence(format!("inconclusive: non-monotone error sequence {errors:?}")));
    }
    let orders: Vec<T> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let estimated_order = *orders.last().expect("at least one order");
    let n = eigenvalues.len();
    let (fine, coarse) = (eigenvalues[n - 1], eigenvalues[n - 2]);
    let extrapolated = fine - (coarse - fine) / (T::lit(2.0).powf(estimated_order) - T::one());
    Ok(ConvergenceReport { elements: elements.to_vec(), eigenvalues, errors, orders, estimated_order, extrapolated })
}
