//! The reduced eigenproblems of a tube and the `C / R^2` scaling of its
//! first coexact eigenvalue.
//!
//! A torus-invariant 1-form `a1(r) dt + a3(r) dθ` splits the Rayleigh quotient
//! into two independent 1-D quotients: the `dt` part with weight `tanh r` and
//! a free constant, the `dθ` part with weight `coth r` and `a3(0) = 0`. The
//! `dr` component never lowers the quotient and is left out.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sturm_liouville::{first_eigenvalue, Boundary, MeshSpec, SlProblem, Weight};
use crate::tube_model::{invariance_threshold, orbit_length_bound, Tube, TubeError};

/// Selects the physical weights or the constant-weight control problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    Geometric,
    /// Every weight replaced by 1; eigenvalues have closed forms.
    Constant,
}

fn pick<T: Real>(mode: WeightMode, w: Weight<T>) -> Weight<T> {
    match mode {
        WeightMode::Geometric => w,
        WeightMode::Constant => Weight::Constant(T::one()),
    }
}

fn positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(TubeError::NonPositive { name, value: v.to_f64().unwrap_or(f64::NAN) }.into())
    }
}

/// `dt` component: `s = m = tanh` on `[0, R]`, Neumann at both ends, constant mode dropped.
pub fn t_form_problem<T: Real>(radius: T, mesh: MeshSpec, mode: WeightMode) -> Result<SlProblem<T>> {
    positive("R", radius)?;
    Ok(SlProblem::new(
        pick(mode, Weight::Tanh),
        pick(mode, Weight::Tanh),
        (T::zero(), radius),
        (Boundary::Neumann, Boundary::Neumann),
        mesh,
    )?)
}

/// `dθ` component: `s = m = coth` on `[0, R]`, Dirichlet at the core, Neumann at `R`.
pub fn theta_form_problem<T: Real>(radius: T, mesh: MeshSpec, mode: WeightMode) -> Result<SlProblem<T>> {
    positive("R", radius)?;
    Ok(SlProblem::new(
        pick(mode, Weight::Coth),
        pick(mode, Weight::Coth),
        (T::zero(), radius),
        (Boundary::Dirichlet, Boundary::Neumann),
        mesh,
    )?)
}

/// Torus-invariant Neumann problem for functions on the collar `[R_a, R]`,
/// weight `sinh r cosh r`.
pub fn collar_function_problem<T: Real>(
    inner: T,
    radius: T,
    mesh: MeshSpec,
    mode: WeightMode,
) -> Result<SlProblem<T>> {
    positive("R_a", inner)?;
    if !(inner < radius) {
        return Err(Error::InvalidInput(format!(
            "collar needs R_a < R, got R_a = {inner}, R = {radius}"
        )));
    }
    // normalized by 4 e^{-2R}; a constant factor leaves the spectrum unchanged
    let scale = T::lit(4.0) * (-(radius + radius)).exp();
    let w = Weight::custom(move |r: T| r.sinh() * r.cosh() * scale);
    Ok(SlProblem::new(
        pick(mode, w.clone()),
        pick(mode, w),
        (inner, radius),
        (Boundary::Neumann, Boundary::Neumann),
        mesh,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSpectrum<T> {
    pub radius: T,
    pub lambda_t: T,
    pub lambda_theta: T,
    pub mu1: T,
    /// Circle-orbit threshold `(2π / L)^2` for the tube.
    pub threshold: T,
    /// Whether `mu1` lies below the threshold, where invariant forms suffice.
    pub invariance_valid: bool,
}

impl<T: Real> TubeSpectrum<T> {
    pub fn normalized(&self) -> T {
        self.mu1 * self.radius * self.radius
    }
}

/// First coexact eigenvalue of the tube: the smaller of the two component problems.
pub fn tube_mu1<T: Real>(tube: &Tube<T>, mesh: MeshSpec, mode: WeightMode) -> Result<TubeSpectrum<T>> {
    let radius = tube.radius();
    let lambda_t = first_eigenvalue(&t_form_problem(radius, mesh, mode)?, true)?;
    let lambda_theta = first_eigenvalue(&theta_form_problem(radius, mesh, mode)?, false)?;
    let mu1 = lambda_t.min(lambda_theta);
    let threshold = invariance_threshold(orbit_length_bound(tube))?;
    Ok(TubeSpectrum { radius, lambda_t, lambda_theta, mu1, threshold, invariance_valid: mu1 < threshold })
}

/// First eigenvalue of the collar problem.
pub fn collar_lambda1<T: Real>(inner: T, radius: T, mesh: MeshSpec, mode: WeightMode) -> Result<T> {
    Ok(first_eigenvalue(&collar_function_problem(inner, radius, mesh, mode)?, true)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow<T> {
    pub radius: T,
    pub lambda_t: T,
    pub lambda_theta: T,
    pub t_normalized: T,
    pub theta_normalized: T,
    /// Normalized values deviate more than 20% from the largest radius.
    pub outlier: bool,
}

#[derive(Debug, Clone)]
pub struct ScalingTable<T> {
    pub rows: Vec<ScalingRow<T>>,
    /// `min λ_t R^2` over the sweep.
    pub c1_hat: T,
    /// `min λ_θ R^2` over the sweep.
    pub c2_hat: T,
}

const OUTLIER_DEVIATION: f64 = 0.2;

/// Empirical constants in `λ ≥ C / R^2` for both component problems.
pub fn scaling_constants<T: Real>(radii: &[T], mesh: MeshSpec, mode: WeightMode) -> Result<ScalingTable<T>> {
    if radii.len() < 3 {
        return Err(Error::InvalidInput(format!("scaling sweep needs at least 3 radii, got {}", radii.len())));
    }
    let mut rows = radii
        .par_iter()
        .map(|&radius| {
            let lambda_t = first_eigenvalue(&t_form_problem(radius, mesh, mode)?, true)?;
            let lambda_theta = first_eigenvalue(&theta_form_problem(radius, mesh, mode)?, false)?;
            let r2 = radius * radius;
            Ok(ScalingRow {
                radius,
                lambda_t,
                lambda_theta,
                t_normalized: lambda_t * r2,
                theta_normalized: lambda_theta * r2,
                outlier: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let reference = *rows
        .iter()
        .max_by(|a, b| a.radius.partial_cmp(&b.radius).expect("finite radii"))
        .expect("non-empty");
    let tol = T::lit(OUTLIER_DEVIATION);
    for row in rows.iter_mut() {
        let dt = (row.t_normalized / reference.t_normalized - T::one()).abs();
        let dth = (row.theta_normalized / reference.theta_normalized - T::one()).abs();
        row.outlier = dt > tol || dth > tol;
    }
    let c1_hat = rows.iter().map(|r| r.t_normalized).fold(T::infinity(), T::min);
    let c2_hat = rows.iter().map(|r| r.theta_normalized).fold(T::infinity(), T::min);
    Ok(ScalingTable { rows, c1_hat, c2_hat })
}
