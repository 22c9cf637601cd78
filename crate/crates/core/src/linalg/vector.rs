use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use smallvec::SmallVec;

use crate::scalar::Real;

/// Small dense coordinate vector. Inline storage covers the 2- and
/// 3-dimensional models without touching the heap.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector<T>(SmallVec<[T; 3]>);

impl<T: Real> Vector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self(SmallVec::from_elem(T::zero(), dim))
    }

    pub fn from_slice(xs: &[T]) -> Self {
        Self(SmallVec::from_slice(xs))
    }

    /// Unit vector along axis `i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = T::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.0.iter()
    }

    /// Ambient (coordinate) dot product.
    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.len(), other.len());
        let (a, b) = (self.as_slice(), other.as_slice());
        let mut s = T::zero();
        for i in 0..a.len() {
            s += a[i] * b[i];
        }
        s
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn scaled(&self, s: T) -> Self {
        let mut out = self.clone();
        for a in out.0.iter_mut() {
            *a *= s;
        }
        out
    }

    /// `self += s * x`
    #[inline]
    pub fn axpy(&mut self, s: T, x: &Self) {
        debug_assert_eq!(self.len(), x.len());
        let b = x.as_slice();
        for (i, a) in self.0.iter_mut().enumerate() {
            *a += s * b[i];
        }
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
    }

    /// Cross product of two 3-vectors.
    pub fn cross(&self, other: &Self) -> Self {
        debug_assert!(self.len() == 3 && other.len() == 3);
        let (a, b) = (&self.0, &other.0);
        Self::from_slice(&[
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> FromIterator<T> for Vector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<T: Real> From<Vec<T>> for Vector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(SmallVec::from_vec(v))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<'a, 'b, T: Real> $tr<&'b Vector<T>> for &'a Vector<T> {
            type Output = Vector<T>;
            #[inline]
            fn $f(self, rhs: &'b Vector<T>) -> Vector<T> {
                debug_assert_eq!(self.len(), rhs.len());
                let mut out = self.clone();
                let b = rhs.as_slice();
                for (i, a) in out.0.iter_mut().enumerate() {
                    *a = *a $op b[i];
                }
                out
            }
        }
        impl<T: Real> $tr<Vector<T>> for Vector<T> {
            type Output = Vector<T>;
            #[inline]
            fn $f(mut self, rhs: Vector<T>) -> Vector<T> {
                let b = rhs.as_slice();
                for (i, a) in self.0.iter_mut().enumerate() {
                    *a = *a $op b[i];
                }
                self
            }
        }
        impl<'b, T: Real> $tr<&'b Vector<T>> for Vector<T> {
            type Output = Vector<T>;
            #[inline]
            fn $f(mut self, rhs: &'b Vector<T>) -> Vector<T> {
                let b = rhs.as_slice();
                for (i, a) in self.0.iter_mut().enumerate() {
                    *a = *a $op b[i];
                }
                self
            }
        }
        impl<'a, T: Real> $tr<Vector<T>> for &'a Vector<T> {
            type Output = Vector<T>;
            #[inline]
            fn $f(self, rhs: Vector<T>) -> Vector<T> {
                self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl<T: Real> Mul<T> for &Vector<T> {
    type Output = Vector<T>;
    #[inline]
    fn mul(self, s: T) -> Vector<T> {
        self.scaled(s)
    }
}

impl<T: Real> Mul<T> for Vector<T> {
    type Output = Vector<T>;
    #[inline]
    fn mul(mut self, s: T) -> Vector<T> {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl<T: Real> Neg for Vector<T> {
    type Output = Vector<T>;
    #[inline]
    fn neg(mut self) -> Vector<T> {
        for a in self.0.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl<T: Real> Neg for &Vector<T> {
    type Output = Vector<T>;
    #[inline]
    fn neg(self) -> Vector<T> {
        -self.clone()
    }
}

impl<T: Real> AddAssign<&Vector<T>> for Vector<T> {
    #[inline]
    fn add_assign(&mut self, rhs: &Vector<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Real> AddAssign<Vector<T>> for Vector<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Vector<T>) {
        self.axpy(T::one(), &rhs);
    }
}

impl<T: Real> SubAssign<&Vector<T>> for Vector<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: &Vector<T>) {
        self.axpy(-T::one(), rhs);
    }
}

impl<T: Real> SubAssign<Vector<T>> for Vector<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Vector<T>) {
        self.axpy(-T::one(), &rhs);
    }
}
