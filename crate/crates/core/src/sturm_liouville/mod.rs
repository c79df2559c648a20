//! Weighted 1-D eigenproblems `-(1/m) (s u')' = λ u` on `[r0, R]`.
//!
//! Piecewise-linear conforming elements with 4-point Gauss quadrature give a
//! symmetric tridiagonal pencil `(K, M)`. Eigenvalues come from Sturm-sequence
//! bisection on `K - σM`, eigenvectors from inverse iteration. Weights are only
//! sampled at element-interior quadrature points, so a zero or pole at an
//! endpoint is harmless.

mod convergence;
mod mesh;
mod pencil;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::quadrature::gauss4_on;
use crate::scalar::Real;

pub use convergence::{convergence_study, ConvergenceReport};
pub use mesh::{Grading, MeshSpec, DEFAULT_GEOMETRIC_RATIO};
pub use pencil::{dot, inertia_below, norm2, solve_shifted, SymTridiag};

/// Iteration cap for both bisection and inverse iteration.
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid interval [{left}, {right}]")]
    InvalidInterval { left: f64, right: f64 },
    #[error("weight {which} is not positive and finite at r = {r} (value {value})")]
    WeightEvaluation { which: &'static str, r: f64, value: f64 },
    #[error("mass matrix is singular on the constrained space")]
    SingularMass,
    #[error("requested {requested} eigenvalues but only {available} degrees of freedom")]
    TooManyEigenvalues { requested: usize, available: usize },
    #[error("kernel drop requires Neumann conditions at both ends")]
    KernelDropNeedsNeumann,
    #[error("bisection for eigenvalue {index} did not converge; bracket [{lo}, {hi}]")]
    BisectionNotConverged { index: usize, lo: f64, hi: f64 },
    #[error("inverse iteration for eigenvalue {index} stalled at residual {residual}")]
    InverseIterationNotConverged { index: usize, residual: f64 },
    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("Rayleigh quotient denominator vanishes")]
    ZeroDenominator,
    #[error("convergence study: {0}")]
    Convergence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Radial weight function.
#[derive(Clone)]
pub enum Weight<T> {
    Constant(T),
    /// `tanh r`
    Tanh,
    /// `coth r`
    Coth,
    /// `sinh r cosh r`
    SinhCosh,
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> Weight<T> {
    pub fn custom<F: Fn(T) -> T + Send + Sync + 'static>(f: F) -> Self {
        Weight::Custom(Arc::new(f))
    }

    pub fn eval(&self, r: T) -> T {
        match self {
            Weight::Constant(c) => *c,
            Weight::Tanh => r.tanh(),
            Weight::Coth => r.tanh().recip(),
            Weight::SinhCosh => r.sinh() * r.cosh(),
            Weight::Custom(f) => f(r),
        }
    }

    /// The weight multiplied by a constant.
    pub fn scaled(&self, factor: T) -> Self {
        match self {
            Weight::Constant(c) => Weight::Constant(*c * factor),
            other => {
                let inner = other.clone();
                Weight::custom(move |r| inner.eval(r) * factor)
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Weight<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Constant(c) => write!(f, "Constant({c:?})"),
            Weight::Tanh => f.write_str("Tanh"),
            Weight::Coth => f.write_str("Coth"),
            Weight::SinhCosh => f.write_str("SinhCosh"),
            Weight::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A weighted Sturm–Liouville eigenproblem with its discretization.
#[derive(Debug, Clone)]
pub struct SlProblem<T> {
    pub stiffness: Weight<T>,
    pub mass: Weight<T>,
    pub left: T,
    pub right: T,
    pub bc_left: Boundary,
    pub bc_right: Boundary,
    pub mesh: MeshSpec,
}

impl<T: Real> SlProblem<T> {
    pub fn new(
        stiffness: Weight<T>,
        mass: Weight<T>,
        (left, right): (T, T),
        (bc_left, bc_right): (Boundary, Boundary),
        mesh: MeshSpec,
    ) -> Result<Self, SolverError> {
        if !(left < right) || !left.is_finite() || !right.is_finite() {
            return Err(SolverError::InvalidInterval {
                left: left.to_f64().unwrap_or(f64::NAN),
                right: right.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { stiffness, mass, left, right, bc_left, bc_right, mesh })
    }

    pub fn with_mesh(&self, mesh: MeshSpec) -> Self {
        Self { mesh, ..self.clone() }
    }

    pub fn with_weights(&self, stiffness: Weight<T>, mass: Weight<T>) -> Self {
        Self { stiffness, mass, ..self.clone() }
    }

    pub fn is_pure_neumann(&self) -> bool {
        self.bc_left == Boundary::Neumann && self.bc_right == Boundary::Neumann
    }
}

/// Assembled pencil on the unconstrained degrees of freedom.
#[derive(Debug, Clone)]
pub struct Pencil<T> {
    pub stiffness: SymTridiag<T>,
    pub mass: SymTridiag<T>,
    /// Mesh nodes, including constrained endpoints.
    pub nodes: Vec<T>,
    /// Node index of the first free degree of freedom.
    pub first_free: usize,
}

impl<T: Real> Pencil<T> {
    pub fn dof(&self) -> usize {
        self.stiffness.dim()
    }

    /// Expand a free-DoF vector to all nodes, zeros on Dirichlet nodes.
    pub fn to_nodal(&self, free: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.nodes.len()];
        out[self.first_free..self.first_free + free.len()].copy_from_slice(free);
        out
    }

    fn from_nodal(&self, nodal: &[T]) -> Result<Vec<T>, SolverError> {
        if nodal.len() != self.nodes.len() {
            return Err(SolverError::LengthMismatch { got: nodal.len(), expected: self.nodes.len() });
        }
        Ok(nodal[self.first_free..self.first_free + self.dof()].to_vec())
    }

    /// Remove the M-weighted mean: `u - (1ᵀ M u / 1ᵀ M 1) 1`.
    pub fn center(&self, u: &[T]) -> Vec<T> {
        let ones = vec![T::one(); u.len()];
        let c = self.mass.bilinear(&ones, u) / self.mass.quad_form(&ones);
        u.iter().map(|&x| x - c).collect()
    }

    /// `uᵀKu / uᵀMu` on free DoFs, optionally after mean-centering.
    pub fn rayleigh_quotient(&self, u: &[T], center: bool) -> Result<T, SolverError> {
        let raw_mass = self.mass.quad_form(u);
        let v = if center { self.center(u) } else { u.to_vec() };
        let den = self.mass.quad_form(&v);
        let floor = T::lit(64.0) * T::epsilon() * raw_mass;
        if !(den > floor) || !(den > T::zero()) {
            return Err(SolverError::ZeroDenominator);
        }
        Ok(self.stiffness.quad_form(&v) / den)
    }
}

pub fn assemble<T: Real>(problem: &SlProblem<T>) -> Result<Pencil<T>, SolverError> {
    let nodes = problem.mesh.nodes(problem.left, problem.right);
    let n_nodes = nodes.len();
    let mut k = SymTridiag::zeros(n_nodes);
    let mut m = SymTridiag::zeros(n_nodes);
    for e in 0..n_nodes - 1 {
        let (a, b) = (nodes[e], nodes[e + 1]);
        let h = b - a;
        let mut s_int = T::zero();
        let (mut m00, mut m01, mut m11) = (T::zero(), T::zero(), T::zero());
        for (x, w) in gauss4_on(a, b) {
            let s = checked_weight("stiffness", &problem.stiffness, x)?;
            let mv = checked_weight("mass", &problem.mass, x)?;
            s_int = s_int + w * s;
            let phi1 = (x - a) / h;
            let phi0 = T::one() - phi1;
            m00 = m00 + w * mv * phi0 * phi0;
            m01 = m01 + w * mv * phi0 * phi1;
            m11 = m11 + w * mv * phi1 * phi1;
        }
        let ke = s_int / (h * h);
        k.diag[e] = k.diag[e] + ke;
        k.diag[e + 1] = k.diag[e + 1] + ke;
        k.off[e] = k.off[e] - ke;
        m.diag[e] = m.diag[e] + m00;
        m.diag[e + 1] = m.diag[e + 1] + m11;
        m.off[e] = m.off[e] + m01;
    }
    let first_free = usize::from(problem.bc_left == Boundary::Dirichlet);
    let last_free = if problem.bc_right == Boundary::Dirichlet { n_nodes - 2 } else { n_nodes - 1 };
    let restrict = |a: &SymTridiag<T>| SymTridiag {
        diag: a.diag[first_free..=last_free].to_vec(),
        off: a.off[first_free..last_free].to_vec(),
    };
    let stiffness = restrict(&k);
    let mass = restrict(&m);
    if !mass.is_positive_definite() {
        return Err(SolverError::SingularMass);
    }
    Ok(Pencil { stiffness, mass, nodes, first_free })
}

fn checked_weight<T: Real>(which: &'static str, w: &Weight<T>, r: T) -> Result<T, SolverError> {
    let v = w.eval(r);
    if v > T::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(SolverError::WeightEvaluation {
            which,
            r: r.to_f64().unwrap_or(f64::NAN),
            value: v.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Lowest eigenpairs of a discretized problem.
#[derive(Debug, Clone)]
pub struct SpectrumResult<T> {
    pub eigenvalues: Vec<T>,
    /// Nodal values on every mesh node (zeros on Dirichlet nodes), M-normalized.
    pub eigenvectors: Vec<Vec<T>>,
    pub mesh_used: MeshSpec,
    /// Observed order of the first eigenvalue from the n/4, n/2, n meshes.
    pub estimated_order: Option<T>,
    pub residual_norms: Vec<T>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn first(&self) -> T {
        self.eigenvalues[0]
    }
}

/// The `count` smallest eigenvalues of the pencil, skipping the constant mode
/// when `drop_kernel` is set.
pub fn lowest_eigenvalues<T: Real>(
    problem: &SlProblem<T>,
    count: usize,
    drop_kernel: bool,
) -> Result<SpectrumResult<T>, SolverError> {
    let pencil = assemble(problem)?;
    check_request(&pencil, problem, count, drop_kernel)?;
    let (values, vectors, residuals) = solve_pencil(&pencil, count, drop_kernel)?;
    let estimated_order = observed_order(problem, drop_kernel, values[0]);
    Ok(SpectrumResult {
        eigenvalues: values,
        eigenvectors: vectors.iter().map(|v| pencil.to_nodal(v)).collect(),
        mesh_used: problem.mesh,
        estimated_order,
        residual_norms: residuals,
    })
}

/// Only the first retained eigenvalue, without eigenvectors or order estimate.
pub fn first_eigenvalue<T: Real>(problem: &SlProblem<T>, drop_kernel: bool) -> Result<T, SolverError> {
    let pencil = assemble(problem)?;
    check_request(&pencil, problem, 1, drop_kernel)?;
    let skip = usize::from(drop_kernel);
    bisect(&pencil, skip)
}

fn observed_order<T: Real>(problem: &SlProblem<T>, drop_kernel: bool, finest: T) -> Option<T> {
    let n = problem.mesh.elements();
    if n % 4 != 0 || n / 4 < MeshSpec::MIN_ELEMENTS {
        return None;
    }
    let coarse = first_eigenvalue(&problem.with_mesh(problem.mesh.with_elements(n / 4).ok()?), drop_kernel).ok()?;
    let mid = first_eigenvalue(&problem.with_mesh(problem.mesh.with_elements(n / 2).ok()?), drop_kernel).ok()?;
    let (d1, d2) = (coarse - mid, mid - finest);
    if d1 > T::zero() && d2 > T::zero() {
        Some((d1 / d2).log2())
    } else {
        None
    }
}

fn check_request<T: Real>(
    pencil: &Pencil<T>,
    problem: &SlProblem<T>,
    count: usize,
    drop_kernel: bool,
) -> Result<(), SolverError> {
    if drop_kernel && !problem.is_pure_neumann() {
        return Err(SolverError::KernelDropNeedsNeumann);
    }
    let skip = usize::from(drop_kernel);
    if count == 0 || count + skip > pencil.dof() {
        return Err(SolverError::TooManyEigenvalues { requested: count, available: pencil.dof() - skip });
    }
    Ok(())
}

type Eigenpairs<T> = (Vec<T>, Vec<Vec<T>>, Vec<T>);

fn solve_pencil<T: Real>(pencil: &Pencil<T>, count: usize, drop_kernel: bool) -> Result<Eigenpairs<T>, SolverError> {
    let n = pencil.dof();
    let skip = usize::from(drop_kernel);
    if count == 0 || count + skip > n {
        return Err(SolverError::TooManyEigenvalues { requested: count, available: n.saturating_sub(skip) });
    }
    // deflation basis, M-orthonormal: the constant mode first when dropped
    let mut basis: Vec<Vec<T>> = Vec::new();
    if drop_kernel {
        let ones = vec![T::one(); n];
        let nrm = pencil.mass.quad_form(&ones).sqrt();
        basis.push(ones.iter().map(|&x| x / nrm).collect());
    }
    let mut values = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for j in 0..count {
        let index = j + skip;
        let lambda = bisect(pencil, index)?;
        let (u, res) = inverse_iteration(pencil, lambda, &basis, index)?;
        values.push(lambda);
        residuals.push(res);
        basis.push(u.clone());
        vectors.push(u);
    }
    Ok((values, vectors, residuals))
}

/// Bisection for the eigenvalue with 0-based position `index` in the pencil.
fn bisect<T: Real>(pencil: &Pencil<T>, index: usize) -> Result<T, SolverError> {
    let (k, m) = (&pencil.stiffness, &pencil.mass);
    let mut hi = T::one();
    let mut doublings = 0;
    while inertia_below(k, m, hi) <= index {
        hi = hi + hi;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(SolverError::BisectionNotConverged { index, lo: 0.0, hi: f64::INFINITY });
        }
    }
    // the pencil is positive semidefinite; allow roundoff below zero
    let mut lo = -hi * T::lit(1e-12);
    while inertia_below(k, m, lo) > index {
        lo = lo + lo;
        if !lo.is_finite() {
            return Err(SolverError::BisectionNotConverged { index, lo: f64::NEG_INFINITY, hi: 0.0 });
        }
    }
    let rel = T::lit(T::BISECTION_REL_TOL);
    let abs = T::lit(T::BISECTION_ABS_TOL);
    for _ in 0..MAX_ITERATIONS {
        let mid = (lo + hi) * T::lit(0.5);
        if hi - lo <= (rel * mid.abs()).max(abs) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if inertia_below(k, m, mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(SolverError::BisectionNotConverged {
        index,
        lo: lo.to_f64().unwrap_or(f64::NAN),
        hi: hi.to_f64().unwrap_or(f64::NAN),
    })
}

fn m_orthogonalize<T: Real>(mass: &SymTridiag<T>, v: &mut [T], basis: &[Vec<T>]) {
    for b in basis {
        let c = mass.bilinear(b, v);
        for (x, &y) in v.iter_mut().zip(b) {
            *x = *x - c * y;
        }
    }
}

fn inverse_iteration<T: Real>(
    pencil: &Pencil<T>,
    lambda: T,
    basis: &[Vec<T>],
    index: usize,
) -> Result<(Vec<T>, T), SolverError> {
    let (k, m) = (&pencil.stiffness, &pencil.mass);
    let n = pencil.dof();
    let mut u: Vec<T> = (0..n)
        .map(|i| T::one() + T::lit(0.5) * (T::from_usize_lossy(i) * T::lit(0.618_033_988_749_895)).sin())
        .collect();
    let tol = T::lit(T::RESIDUAL_TOL);
    let mut residual = T::infinity();
    for _ in 0..MAX_ITERATIONS {
        m_orthogonalize(m, &mut u, basis);
        let nrm = m.quad_form(&u).sqrt();
        if !(nrm > T::zero()) {
            // rotate the start vector if it fell into the deflated span
            for (i, x) in u.iter_mut().enumerate() {
                *x = *x + T::lit(1e-3) * T::from_usize_lossy(i % 7);
            }
            continue;
        }
        for x in u.iter_mut() {
            *x = *x / nrm;
        }
        residual = residual_norm(k, m, lambda, &u);
        if residual <= tol {
            return Ok((u, residual));
        }
        let rhs = m.mul_vec(&u);
        u = solve_shifted(k, m, lambda, &rhs);
        if u.iter().any(|x| !x.is_finite()) {
            break;
        }
    }
    Err(SolverError::InverseIterationNotConverged { index, residual: residual.to_f64().unwrap_or(f64::NAN) })
}

fn residual_norm<T: Real>(k: &SymTridiag<T>, m: &SymTridiag<T>, lambda: T, u: &[T]) -> T {
    let ku = k.mul_vec(u);
    let mu = m.mul_vec(u);
    let r: Vec<T> = ku.iter().zip(&mu).map(|(&a, &b)| a - lambda * b).collect();
    norm2(&r) / norm2(u)
}

/// Rayleigh quotient of a nodal function; the problem is assembled on its own mesh.
pub fn rayleigh_quotient<T: Real>(problem: &SlProblem<T>, u: &[T], center: bool) -> Result<T, SolverError> {
    let pencil = assemble(problem)?;
    let free = pencil.from_nodal(u)?;
    pencil.rayleigh_quotient(&free, center)
}
