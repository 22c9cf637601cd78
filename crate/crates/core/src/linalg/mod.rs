//! Small dense linear algebra: coordinate vectors, square maps between
//! tangent spaces, LU with partial pivoting and the Thomas algorithm.

mod vector;

use smallvec::SmallVec;

use crate::error::{GeomError, Result};
use crate::scalar::Real;

pub use vector::Vector;

/// Square linear map stored row-major. Used to cache parallel transport
/// between the tangent spaces of two points.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap<T> {
    dim: usize,
    data: SmallVec<[T; 9]>,
}

impl<T: Real> LinearMap<T> {
    pub fn identity(dim: usize) -> Self {
        let mut data = SmallVec::from_elem(T::zero(), dim * dim);
        for i in 0..dim {
            data[i * dim + i] = T::one();
        }
        Self { dim, data }
    }

    /// Builds the map whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vector<T>]) -> Self {
        let dim = cols.len();
        let mut data = SmallVec::from_elem(T::zero(), dim * dim);
        for (j, c) in cols.iter().enumerate() {
            debug_assert_eq!(c.len(), dim);
            for i in 0..dim {
                data[i * dim + j] = c[i];
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn apply(&self, v: &Vector<T>) -> Vector<T> {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        (0..d)
            .map(|i| {
                let row = &self.data[i * d..(i + 1) * d];
                row.iter()
                    .zip(v.iter())
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut data = SmallVec::from_elem(T::zero(), d * d);
        for i in 0..d {
            for j in 0..d {
                let mut s = T::zero();
                for k in 0..d {
                    s += self.get(i, k) * other.get(k, j);
                }
                data[i * d + j] = s;
            }
        }
        Self { dim: d, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

/// LU factorization with partial pivoting of a dense row-major matrix.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    cond: T,
}

impl<T: Real> Lu<T> {
    /// Factors the `n × n` matrix `a` (row-major). Fails when a pivot
    /// vanishes relative to the largest entry.
    pub fn factor(mut a: Vec<T>, n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(GeomError::DimensionMismatch {
                expected: n * n,
                found: a.len(),
            });
        }
        let scale = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        let mut perm: Vec<usize> = (0..n).collect();
        if scale == T::zero() {
            return Err(GeomError::Singular { cond: f64::INFINITY });
        }
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= scale * T::epsilon() * T::from_count(n) {
                return Err(GeomError::Singular { cond: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] / pivot;
                a[i * n + k] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= l * u;
                    }
                }
            }
        }
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for k in 0..n {
            let d = a[k * n + k].abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Ok(Self {
            n,
            lu: a,
            perm,
            cond: hi / lo,
        })
    }

    /// Crude condition estimate: ratio of extreme pivots.
    pub fn condition_estimate(&self) -> T {
        self.cond
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Solves the tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`
/// with the Thomas algorithm. `lower[0]` and `upper[last]` are ignored.
pub fn solve_tridiagonal<T: Real>(
    lower: &[T],
    diag: &[T],
    upper: &[T],
    rhs: &[T],
) -> Result<Vec<T>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let tiny = T::epsilon() * T::lit(1e3);
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut den = diag[0];
    if den.abs() <= tiny * (diag[0].abs() + upper[0].abs()) || den == T::zero() {
        return Err(GeomError::SingularTridiagonal { row: 0 });
    }
    c[0] = upper[0] / den;
    d[0] = rhs[0] / den;
    for i in 1..n {
        den = diag[i] - lower[i] * c[i - 1];
        let size = diag[i].abs() + lower[i].abs() + upper[i].abs();
        if den.abs() <= tiny * size || den == T::zero() {
            return Err(GeomError::SingularTridiagonal { row: i });
        }
        c[i] = if i + 1 < n { upper[i] / den } else { T::zero() };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}
