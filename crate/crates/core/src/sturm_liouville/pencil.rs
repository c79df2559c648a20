//! Symmetric tridiagonal pencils `(K, M)`: inertia counts and shifted solves.

use crate::scalar::Real;

/// Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> SymTridiag<T> {
    pub fn zeros(n: usize) -> Self {
        Self { diag: vec![T::zero(); n], off: vec![T::zero(); n.saturating_sub(1)] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc = acc + self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc = acc + self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    pub fn quad_form(&self, x: &[T]) -> T {
        dot(x, &self.mul_vec(x))
    }

    pub fn bilinear(&self, x: &[T], y: &[T]) -> T {
        dot(x, &self.mul_vec(y))
    }

    fn shifted(&self, other: &Self, sigma: T) -> Self {
        Self {
            diag: self.diag.iter().zip(&other.diag).map(|(&k, &m)| k - sigma * m).collect(),
            off: self.off.iter().zip(&other.off).map(|(&k, &m)| k - sigma * m).collect(),
        }
    }

    /// Whether every `LDL^T` pivot is positive.
    pub fn is_positive_definite(&self) -> bool {
        let mut q = T::zero();
        for i in 0..self.dim() {
            q = if i == 0 { self.diag[0] } else { self.diag[i] - self.off[i - 1] * self.off[i - 1] / q };
            if !(q > T::zero()) {
                return false;
            }
        }
        true
    }
}

pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

pub fn norm2<T: Real>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

/// Number of generalized eigenvalues of `(K, M)` strictly below `sigma`.
///
/// By Sylvester's law of inertia this is the number of negative pivots of
/// `K - sigma M = L D L^T`.
pub fn inertia_below<T: Real>(k: &SymTridiag<T>, m: &SymTridiag<T>, sigma: T) -> usize {
    let n = k.dim();
    let guard = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = T::zero();
    for i in 0..n {
        let d = k.diag[i] - sigma * m.diag[i];
        q = if i == 0 {
            d
        } else {
            let e = k.off[i - 1] - sigma * m.off[i - 1];
            let safe = if q.abs() < guard { guard.copysign(q) } else { q };
            d - e * e / safe
        };
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// Solve `(K - sigma M) x = b` by Gaussian elimination with partial pivoting.
///
/// Exact zero pivots are replaced by a tiny multiple of the matrix scale, which
/// is what inverse iteration wants at a converged shift.
pub fn solve_shifted<T: Real>(k: &SymTridiag<T>, m: &SymTridiag<T>, sigma: T, b: &[T]) -> Vec<T> {
    let a = k.shifted(m, sigma);
    let n = a.dim();
    if n == 1 {
        let p = if a.diag[0] == T::zero() { T::epsilon() } else { a.diag[0] };
        return vec![b[0] / p];
    }
    let scale = a.diag.iter().chain(&a.off).fold(T::zero(), |acc, &v| acc.max(v.abs()));
    let tiny = (scale * T::epsilon()).max(T::min_positive_value());
    // rows hold (lower, diag, upper, upper2) after elimination
    let mut dl: Vec<T> = a.off.clone();
    let mut d: Vec<T> = a.diag.clone();
    let mut du: Vec<T> = a.off.clone();
    let mut du2 = vec![T::zero(); n.saturating_sub(2)];
    let mut rhs = b.to_vec();
    let mut mult = vec![T::zero(); n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            let piv = if d[i] == T::zero() { tiny } else { d[i] };
            d[i] = piv;
            let l = dl[i] / piv;
            mult[i] = l;
            d[i + 1] = d[i + 1] - l * du[i];
            rhs[i + 1] = rhs[i + 1] - l * rhs[i];
            if i + 2 < n {
                du2[i] = T::zero();
            }
        } else {
            // swap rows i and i+1
            let l = d[i] / dl[i];
            mult[i] = l;
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - l * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -l * du[i + 1];
            }
            rhs.swap(i, i + 1);
            rhs[i + 1] = rhs[i + 1] - l * rhs[i];
        }
        dl[i] = T::zero();
    }
    if d[n - 1] == T::zero() {
        d[n - 1] = tiny;
    }
    let mut x = vec![T::zero(); n];
    x[n - 1] = rhs[n - 1] / d[n - 1];
    x[n - 2] = (rhs[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (rhs[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}
