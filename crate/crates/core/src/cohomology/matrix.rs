//! Dense integer matrices with exact fraction-free elimination.

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::scalar::Real;

use super::CohomologyError;

/// Exact integer scalar: `i64`, `i128`, `BigInt`, ...
pub trait IntScalar: Integer + Signed + Clone + Debug + ToPrimitive + FromPrimitive + Send + Sync {}

impl<I> IntScalar for I where I: Integer + Signed + Clone + Debug + ToPrimitive + FromPrimitive + Send + Sync {}

/// Row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix<I> {
    rows: usize,
    cols: usize,
    data: Vec<I>,
}

impl<I: IntScalar> IntegerMatrix<I> {
    pub fn new(rows: usize, cols: usize, data: Vec<I>) -> Result<Self, CohomologyError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(CohomologyError::Shape(format!("{rows}x{cols} with {} entries", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<I>]) -> Result<Self, CohomologyError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CohomologyError::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().cloned().collect())
    }

    pub fn from_columns(cols: &[Vec<I>]) -> Result<Self, CohomologyError> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(CohomologyError::Shape("columns of different lengths".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in cols {
                data.push(col[i].clone());
            }
        }
        Self::new(r, c, data)
    }

    /// Convenience for `i64` literals in any integer type.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, CohomologyError> {
        let rows: Vec<Vec<I>> =
            rows.iter().map(|r| r.iter().map(|&x| I::from_i64(x).expect("literal fits")).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = I::one();
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![I::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &I {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: I) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<I> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<I>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, CohomologyError> {
        if self.cols != rhs.rows {
            return Err(CohomologyError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = I::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &I) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    /// Columns `[self | extra]`.
    pub fn with_columns(&self, extra: &[Vec<I>]) -> Result<Self, CohomologyError> {
        let mut cols = self.columns();
        cols.extend(extra.iter().cloned());
        Self::from_columns(&cols)
    }

    fn require_square(&self) -> Result<(), CohomologyError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(CohomologyError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Exact determinant by Bareiss elimination.
    pub fn det(&self) -> Result<I, CohomologyError> {
        self.require_square()?;
        Ok(bareiss(self.rows, self.cols, self.data.clone()).det)
    }

    /// Rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        bareiss(self.rows, self.cols, self.data.clone()).rank
    }

    /// Transposed cofactor matrix: `M adj(M) = adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Result<Self, CohomologyError> {
        self.require_square()?;
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let d = bareiss(n - 1, n - 1, minor).det;
                let cof = if (i + j) % 2 == 0 { d } else { -d };
                out.set(j, i, cof);
            }
        }
        Ok(out)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Vec<I> {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                data.push(self.get(i, j).clone());
            }
        }
        data
    }

    pub fn to_real<T: Real>(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| T::lit(self.get(i, j).to_f64().expect("entry converts to f64"))).collect())
            .collect()
    }

    /// Spectral norm from power iteration on `MᵀM`.
    pub fn op_norm<T: Real>(&self) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let a = self.to_real::<T>();
        let apply = |v: &[T]| -> Vec<T> {
            let av: Vec<T> = a.iter().map(|row| row.iter().zip(v).map(|(&x, &y)| x * y).sum()).collect();
            (0..self.cols).map(|j| (0..self.rows).map(|i| a[i][j] * av[i]).sum()).collect()
        };
        let normalize = |v: &mut Vec<T>| -> T {
            let n = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            for x in v.iter_mut() {
                *x = *x / n;
            }
            n
        };
        let mut v = vec![T::one(); self.cols];
        if apply(&v).iter().all(|x| x.is_zero()) {
            // ones lies in the kernel; break the symmetry
            v = (0..self.cols).map(|j| T::one() + T::lit(0.1) * T::from_usize_lossy(j + 1).sqrt()).collect();
        }
        normalize(&mut v);
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
        let mut lambda = T::zero();
        for _ in 0..100_000 {
            let mut w = apply(&v);
            let next = w.iter().zip(&v).map(|(&x, &y)| x * y).sum::<T>();
            if next.is_zero() {
                break;
            }
            normalize(&mut w);
            v = w;
            if (next - lambda).abs() <= tol * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.max(T::zero()).sqrt()
    }
}

struct Elimination<I> {
    det: I,
    rank: usize,
}

/// Bareiss elimination with row pivoting. Every intermediate entry is a minor
/// of the input, so all divisions are exact.
fn bareiss<I: IntScalar>(rows: usize, cols: usize, mut a: Vec<I>) -> Elimination<I> {
    let idx = |i: usize, j: usize| i * cols + j;
    let mut prev = I::one();
    let mut sign_negative = false;
    let mut rank = 0;
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        let Some(p) = (pivot_row..rows).find(|&i| !a[idx(i, col)].is_zero()) else {
            continue;
        };
        if p != pivot_row {
            for j in 0..cols {
                a.swap(idx(p, j), idx(pivot_row, j));
            }
            sign_negative = !sign_negative;
        }
        let piv = a[idx(pivot_row, col)].clone();
        for i in pivot_row + 1..rows {
            let lead = a[idx(i, col)].clone();
            for j in col + 1..cols {
                let v = (piv.clone() * a[idx(i, j)].clone() - lead.clone() * a[idx(pivot_row, j)].clone()) / prev.clone();
                a[idx(i, j)] = v;
            }
            a[idx(i, col)] = I::zero();
        }
        // rows past the pivot in skipped columns are zero and stay consistent
        prev = piv;
        pivot_row += 1;
        rank += 1;
    }
    let det = if rows == cols && rank == rows {
        let d = a[idx(rows - 1, cols - 1)].clone();
        if sign_negative {
            -d
        } else {
            d
        }
    } else {
        I::zero()
    };
    Elimination { det, rank }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = IntegerMatrix<i64>;

    fn laplace_det(a: &[Vec<i64>]) -> i64 {
        let n = a.len();
        if n == 1 {
            return a[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    a[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * laplace_det(&minor)
            })
            .sum()
    }

    fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
        (0..n).map(|_| (0..n).map(|_| rng.gen_range(-10..=10)).collect()).collect()
    }

    #[test]
    fn det_basics() {
        assert_eq!(M::identity(4).det().unwrap(), 1);
        let m = M::from_i64_rows(&[&[1, 7], &[0, -3]]).unwrap();
        assert_eq!(m.det().unwrap(), -3);
        let sing = M::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(sing.det().unwrap(), 0);
        let needs_swap = M::from_i64_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]).unwrap();
        assert_eq!(needs_swap.det().unwrap(), -5);
        let rect = M::from_i64_rows(&[&[1, 2, 3]]).unwrap();
        assert!(matches!(rect.det(), Err(CohomologyError::NotSquare { .. })));
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let rows = random_rows(&mut rng, 5);
            let m = M::from_rows(&rows).unwrap();
            assert_eq!(m.det().unwrap(), laplace_det(&rows));
        }
    }

    #[test]
    fn adjugate_of_section_matrix() {
        let (a, b) = (3, 5);
        let m = M::from_i64_rows(&[&[1, a], &[0, b]]).unwrap();
        assert_eq!(m.adjugate().unwrap(), M::from_i64_rows(&[&[b, -a], &[0, 1]]).unwrap());
        assert_eq!(M::identity(3).adjugate().unwrap(), M::identity(3));
    }

    #[test]
    fn rank_examples() {
        let m = M::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        let col = M::from_i64_rows(&[&[0], &[0], &[3]]).unwrap();
        assert_eq!(col.rank(), 1);
        assert_eq!(M::zeros(3, 2).rank(), 0);
        let wide = M::from_i64_rows(&[&[0, 0, 1, 2], &[0, 0, 2, 4]]).unwrap();
        assert_eq!(wide.rank(), 1);
    }

    #[test]
    fn op_norm_simple() {
        assert!((M::identity(3).op_norm::<f64>() - 1.0).abs() < 1e-12);
        let d = M::from_i64_rows(&[&[3, 0], &[0, -4]]).unwrap();
        assert!((d.op_norm::<f64>() - 4.0).abs() < 1e-9);
        assert_eq!(M::zeros(2, 2).op_norm::<f64>(), 0.0);
        // ones in the kernel
        let k = M::from_i64_rows(&[&[1, -1], &[2, -2]]).unwrap();
        assert!((k.op_norm::<f64>() - 10f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn op_norm_matches_dense_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rows = random_rows(&mut rng, 3);
            let m = M::from_rows(&rows).unwrap();
            let dense = nalgebra::DMatrix::from_fn(3, 3, |i, j| rows[i][j] as f64);
            let sigma = dense.singular_values().max();
            let got = m.op_norm::<f64>();
            assert!((got - sigma).abs() <= 1e-8 * sigma.max(1.0), "{got} vs {sigma}");
        }
    }

    #[test]
    fn bigint_determinant_of_adjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..=6 {
            let rows = random_rows(&mut rng, n);
            let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let m = IntegerMatrix::<BigInt>::from_rows(&big).unwrap();
            let d = m.det().unwrap();
            let adj = m.adjugate().unwrap();
            assert_eq!(adj.det().unwrap(), num_traits::pow(d, n - 1));
        }
    }

    proptest! {
        #[test]
        fn adjugate_identity(n in 1usize..=6, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = M::from_rows(&random_rows(&mut rng, n)).unwrap();
            let d = m.det().unwrap();
            let adj = m.adjugate().unwrap();
            let target = M::identity(n).scale(&d);
            prop_assert_eq!(m.mul(&adj).unwrap(), target.clone());
            prop_assert_eq!(adj.mul(&m).unwrap(), target);
        }
    }
}
