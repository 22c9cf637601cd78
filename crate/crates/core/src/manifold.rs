//! Constant-curvature base manifolds: flat space, the hyperbolic plane in
//! upper half-plane coordinates and the unit sphere embedded in ℝ³.
//!
//! The `*_raw` family works directly on coordinate vectors and is what the
//! inner loops use. The checked wrappers on [`ManifoldSpec`] operate on
//! [`Point`] and [`Tangent`] and validate base points.

use std::fmt;
use std::str::FromStr;

use crate::error::{GeomError, Result};
use crate::linalg::{LinearMap, Vector};
use crate::scalar::Real;

const SERIES_CUTOFF: f64 = 1e-6;
const COEFF_SERIES_CUTOFF: f64 = 0.1;

/// Which constant-curvature space the curves live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldSpec {
    Euclidean(usize),
    HyperbolicPlane,
    Sphere2,
}

impl ManifoldSpec {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::InvalidArgument(
                "euclidean dimension must be at least 1".into(),
            ));
        }
        Ok(Self::Euclidean(dim))
    }

    /// Sectional curvature K ∈ {−1, 0, +1}.
    pub fn curvature(&self) -> i32 {
        match self {
            Self::Euclidean(_) => 0,
            Self::HyperbolicPlane => -1,
            Self::Sphere2 => 1,
        }
    }

    /// Length of a coordinate row.
    pub fn coord_dim(&self) -> usize {
        match self {
            Self::Euclidean(d) => *d,
            Self::HyperbolicPlane => 2,
            Self::Sphere2 => 3,
        }
    }

    /// Dimension of each tangent space.
    pub fn intrinsic_dim(&self) -> usize {
        match self {
            Self::Euclidean(d) => *d,
            Self::HyperbolicPlane | Self::Sphere2 => 2,
        }
    }

    pub fn is_flat(&self) -> bool {
        self.curvature() == 0
    }

    // ---- raw coordinate operations -------------------------------------

    /// Checks a coordinate row, renormalizing sphere rows.
    pub fn validate_coords<T: Real>(&self, c: &Vector<T>) -> Result<Vector<T>> {
        if c.len() != self.coord_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.coord_dim(),
                found: c.len(),
            });
        }
        if !c.is_finite() {
            return Err(GeomError::InvalidPoint("non-finite coordinate".into()));
        }
        match self {
            Self::Euclidean(_) => Ok(c.clone()),
            Self::HyperbolicPlane => {
                if c[1] > T::zero() {
                    Ok(c.clone())
                } else {
                    Err(GeomError::InvalidPoint(format!(
                        "hyperbolic point needs y > 0, got y = {}",
                        c[1]
                    )))
                }
            }
            Self::Sphere2 => {
                let r = c.norm();
                if r == T::zero() {
                    return Err(GeomError::InvalidPoint("zero vector is not on the sphere".into()));
                }
                if (r - T::one()).abs() <= T::epsilon() * T::lit(4.0) {
                    return Ok(c.clone());
                }
                Ok(c.scaled(r.recip()))
            }
        }
    }

    /// Removes the normal component of an ambient vector (sphere only).
    #[inline]
    pub fn project_tangent<T: Real>(&self, x: &Vector<T>, v: &Vector<T>) -> Vector<T> {
        match self {
            Self::Sphere2 => {
                let mut w = v.clone();
                w.axpy(-x.dot(v), x);
                w
            }
            _ => v.clone(),
        }
    }

    #[inline]
    pub fn inner_raw<T: Real>(&self, x: &Vector<T>, u: &Vector<T>, v: &Vector<T>) -> T {
        match self {
            Self::HyperbolicPlane => u.dot(v) / (x[1] * x[1]),
            _ => u.dot(v),
        }
    }

    #[inline]
    pub fn norm_raw<T: Real>(&self, x: &Vector<T>, v: &Vector<T>) -> T {
        self.inner_raw(x, v, v).sqrt()
    }

    pub fn exp_raw<T: Real>(&self, x: &Vector<T>, v: &Vector<T>) -> Result<Vector<T>> {
        if v.max_abs() == T::zero() {
            return Ok(x.clone());
        }
        match self {
            Self::Euclidean(_) => Ok(x + v),
            Self::Sphere2 => {
                let r = v.norm();
                if r >= T::PI() {
                    return Err(GeomError::InjectivityRadius { norm: r.to_f64_lossy() });
                }
                let (c, s) = (r.cos(), sinc(r, 1));
                let mut y = x.scaled(c);
                y.axpy(s, v);
                let ny = y.norm();
                Ok(y.scaled(ny.recip()))
            }
            Self::HyperbolicPlane => {
                let hx = hyp::lift(x);
                let hv = hyp::push(x, v);
                let r = hyp::minkowski(&hv, &hv).max(T::zero()).sqrt();
                let mut y = hx.scaled(r.cosh());
                y.axpy(sinc(r, -1), &hv);
                let p = hyp::lower(&y);
                if !(p[1] > T::zero()) || !p.is_finite() {
                    return Err(GeomError::InvalidPoint(
                        "hyperbolic exponential overflowed".into(),
                    ));
                }
                Ok(p)
            }
        }
    }

    pub fn log_raw<T: Real>(&self, x: &Vector<T>, y: &Vector<T>) -> Result<Vector<T>> {
        match self {
            Self::Euclidean(_) => Ok(y - x),
            Self::Sphere2 => {
                let delta = y - x;
                let mut u = delta.clone();
                u.axpy(-x.dot(&delta), x);
                let nu = u.norm();
                let c = x.dot(y);
                let d = nu.atan2(c);
                if d > T::PI() - T::lit(1e-7) {
                    return Err(GeomError::Antipodal);
                }
                if nu == T::zero() {
                    return Ok(Vector::zeros(3));
                }
                Ok(u.scaled(d / nu))
            }
            Self::HyperbolicPlane => {
                let hx = hyp::lift(x);
                let delta = &hyp::lift(y) - &hx;
                let mut u = delta.clone();
                u.axpy(hyp::minkowski(&hx, &delta), &hx);
                let nu = hyp::minkowski(&u, &u).max(T::zero()).sqrt();
                if nu == T::zero() {
                    return Ok(Vector::zeros(2));
                }
                let d = hyp::distance(x, y);
                Ok(hyp::pull(x, &u.scaled(d / nu)))
            }
        }
    }

    pub fn distance_raw<T: Real>(&self, x: &Vector<T>, y: &Vector<T>) -> T {
        match self {
            Self::Euclidean(_) => (y - x).norm(),
            Self::Sphere2 => {
                let c = x.dot(y);
                let s = x.cross(y).norm();
                s.atan2(c)
            }
            Self::HyperbolicPlane => hyp::distance(x, y),
        }
    }

    /// Matrix of parallel transport from `T_x` to `T_y` along the connecting
    /// geodesic, expressed in model coordinates.
    pub fn transport_map<T: Real>(&self, x: &Vector<T>, y: &Vector<T>) -> Result<LinearMap<T>> {
        match self {
            Self::Euclidean(d) => Ok(LinearMap::identity(*d)),
            Self::Sphere2 => {
                let c = T::one() + x.dot(y);
                if c <= T::lit(1e-14) {
                    return Err(GeomError::Antipodal);
                }
                let s = &(x + y) * c.recip();
                let cols: Vec<Vector<T>> = (0..3)
                    .map(|j| {
                        let mut col = Vector::basis(3, j);
                        col.axpy(-y[j], &s);
                        col
                    })
                    .collect();
                Ok(LinearMap::from_columns(&cols))
            }
            Self::HyperbolicPlane => {
                let hx = hyp::lift(x);
                let hy = hyp::lift(y);
                let den = T::one() - hyp::minkowski(&hx, &hy);
                let sum = &hx + &hy;
                let cols: Vec<Vector<T>> = (0..2)
                    .map(|j| {
                        let v = hyp::push(x, &Vector::basis(2, j));
                        let mut pv = v.clone();
                        pv.axpy(hyp::minkowski(&hy, &v) / den, &sum);
                        hyp::pull(y, &pv)
                    })
                    .collect();
                Ok(LinearMap::from_columns(&cols))
            }
        }
    }

    pub fn transport_raw<T: Real>(
        &self,
        x: &Vector<T>,
        y: &Vector<T>,
        v: &Vector<T>,
    ) -> Result<Vector<T>> {
        match self {
            Self::Euclidean(_) => Ok(v.clone()),
            _ => Ok(self.transport_map(x, y)?.apply(v)),
        }
    }

    /// `R(X,Y)Z = K(⟨Y,Z⟩X − ⟨X,Z⟩Y)` at `x`.
    #[inline]
    pub fn curvature_raw<T: Real>(
        &self,
        x: &Vector<T>,
        a: &Vector<T>,
        b: &Vector<T>,
        z: &Vector<T>,
    ) -> Vector<T> {
        let k = self.curvature();
        if k == 0 {
            return Vector::zeros(a.len());
        }
        let k = T::from_i32(k).unwrap_or_else(T::zero);
        let mut out = a.scaled(k * self.inner_raw(x, b, z));
        out.axpy(-k * self.inner_raw(x, a, z), b);
        out
    }

    /// Orthonormal basis of `T_x` with respect to the Riemannian metric.
    pub fn tangent_basis<T: Real>(&self, x: &Vector<T>) -> Vec<Vector<T>> {
        match self {
            Self::Euclidean(d) => (0..*d).map(|i| Vector::basis(*d, i)).collect(),
            Self::HyperbolicPlane => (0..2).map(|i| Vector::basis(2, i).scaled(x[1])).collect(),
            Self::Sphere2 => {
                let i = (0..3)
                    .min_by(|&a, &b| x[a].abs().partial_cmp(&x[b].abs()).unwrap())
                    .unwrap_or(0);
                let mut e1 = Vector::basis(3, i);
                e1.axpy(-x[i], x);
                let e1 = e1.scaled(e1.norm().recip());
                let e2 = x.cross(&e1);
                vec![e1, e2]
            }
        }
    }

    // ---- checked operations on typed values ----------------------------

    pub fn point<T: Real>(&self, coords: &[T]) -> Result<Point<T>> {
        Ok(Point {
            coords: self.validate_coords(&Vector::from_slice(coords))?,
        })
    }

    pub fn tangent<T: Real>(&self, base: &Point<T>, vec: &[T]) -> Result<Tangent<T>> {
        if vec.len() != self.coord_dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.coord_dim(),
                found: vec.len(),
            });
        }
        Ok(Tangent {
            base: base.clone(),
            vec: self.project_tangent(&base.coords, &Vector::from_slice(vec)),
        })
    }

    pub fn riemannian_inner<T: Real>(
        &self,
        x: &Point<T>,
        u: &Tangent<T>,
        v: &Tangent<T>,
    ) -> Result<T> {
        check_base(x, u)?;
        check_base(x, v)?;
        Ok(self.inner_raw(&x.coords, &u.vec, &v.vec))
    }

    pub fn exp_point<T: Real>(&self, x: &Point<T>, v: &Tangent<T>) -> Result<Point<T>> {
        check_base(x, v)?;
        Ok(Point {
            coords: self.exp_raw(&x.coords, &v.vec)?,
        })
    }

    pub fn log_point<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> Result<Tangent<T>> {
        Ok(Tangent {
            base: x.clone(),
            vec: self.log_raw(&x.coords, &y.coords)?,
        })
    }

    pub fn distance<T: Real>(&self, x: &Point<T>, y: &Point<T>) -> T {
        self.distance_raw(&x.coords, &y.coords)
    }

    pub fn parallel_transport<T: Real>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        v: &Tangent<T>,
    ) -> Result<Tangent<T>> {
        check_base(x, v)?;
        Ok(Tangent {
            base: y.clone(),
            vec: self.transport_raw(&x.coords, &y.coords, &v.vec)?,
        })
    }

    pub fn curvature_op<T: Real>(
        &self,
        x: &Point<T>,
        a: &Tangent<T>,
        b: &Tangent<T>,
        z: &Tangent<T>,
    ) -> Result<Tangent<T>> {
        check_base(x, a)?;
        check_base(x, b)?;
        check_base(x, z)?;
        Ok(Tangent {
            base: x.clone(),
            vec: self.curvature_raw(&x.coords, &a.vec, &b.vec, &z.vec),
        })
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean(d) => write!(f, "euclidean:{d}"),
            Self::HyperbolicPlane => f.write_str("hyperbolic2"),
            Self::Sphere2 => f.write_str("sphere2"),
        }
    }
}

impl FromStr for ManifoldSpec {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "hyperbolic2" => Ok(Self::HyperbolicPlane),
            "sphere2" => Ok(Self::Sphere2),
            other => {
                let dim = other
                    .strip_prefix("euclidean:")
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| GeomError::InvalidArgument(format!("unknown manifold tag `{other}`")))?;
                Self::euclidean(dim)
            }
        }
    }
}

fn check_base<T: Real>(x: &Point<T>, v: &Tangent<T>) -> Result<()> {
    if v.base.coords == x.coords {
        Ok(())
    } else {
        Err(GeomError::BaseMismatch)
    }
}

/// A point of the base manifold in model coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T> {
    pub coords: Vector<T>,
}

/// A tangent vector together with its base point.
#[derive(Clone, Debug, PartialEq)]
pub struct Tangent<T> {
    pub base: Point<T>,
    pub vec: Vector<T>,
}

/// `sin r / r` (k = +1), `sinh r / r` (k = −1) or 1 (k = 0).
#[inline]
fn sinc<T: Real>(r: T, k: i32) -> T {
    if r.abs() < T::lit(SERIES_CUTOFF) {
        let r2 = r * r;
        return T::one() - T::from_i32(k).unwrap_or_else(T::zero) * r2 / T::lit(6.0);
    }
    match k {
        1 => r.sin() / r,
        -1 => r.sinh() / r,
        _ => T::one(),
    }
}

/// Time-dependent Jacobi coefficients along a geodesic of speed `norm_tau`.
///
/// Returns `(a, b, e)` with `a = cosh(rt)`, `b = sinh(rt)/r`, `e = sinh(rt)`
/// for K = −1, the trigonometric analogues (with `e = −sin(rt)`) for K = +1,
/// and `(1, t, 0)` when K = 0.
pub fn jacobi_coefficients<T: Real>(norm_tau: T, k: i32, t: T) -> (T, T, T) {
    let r = norm_tau;
    let rt = r * t;
    match k {
        0 => (T::one(), t, T::zero()),
        -1 => {
            let b = if r < T::lit(SERIES_CUTOFF) {
                t * (T::one() + rt * rt / T::lit(6.0))
            } else {
                rt.sinh() / r
            };
            (rt.cosh(), b, rt.sinh())
        }
        _ => {
            let b = if r < T::lit(SERIES_CUTOFF) {
                t * (T::one() - rt * rt / T::lit(6.0))
            } else {
                rt.sin() / r
            };
            (rt.cos(), b, -rt.sin())
        }
    }
}

/// Edge coefficients `a`, `b` and `c = K(1−a)/r²` as functions of the
/// edge length `r`, with their first and second derivatives in `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCoefficients<T> {
    pub a: T,
    pub da: T,
    pub dda: T,
    pub b: T,
    pub db: T,
    pub ddb: T,
    pub c: T,
    pub dc: T,
}

impl<T: Real> EdgeCoefficients<T> {
    pub fn new(r: T, k: i32) -> Self {
        if k == 0 {
            let (z, o) = (T::zero(), T::one());
            return Self { a: o, da: z, dda: z, b: o, db: z, ddb: z, c: z, dc: z };
        }
        let kk = T::from_i32(k).unwrap_or_else(T::zero);
        let (a, da) = if k > 0 { (r.cos(), -r.sin()) } else { (r.cosh(), r.sinh()) };
        let dda = -kk * a;
        if r < T::lit(COEFF_SERIES_CUTOFF) {
            // Power series in r with alternating signs governed by −K.
            let mk = -kk;
            let r2 = r * r;
            let (mut b, mut db, mut ddb, mut c, mut dc) =
                (T::one(), T::zero(), T::zero(), T::lit(0.5), T::zero());
            let mut sign = T::one();
            let mut r2j = T::one();
            for j in 1..8usize {
                sign *= mk;
                let jj = T::from_count(j);
                let two_j = jj + jj;
                let f_odd = factorial::<T>(2 * j + 1);
                let f_even = factorial::<T>(2 * j + 2);
                // r^{2j}
                let r2j_next = r2j * r2;
                b += sign * r2j_next / f_odd;
                db += sign * two_j * r2j * r / f_odd;
                ddb += sign * two_j * (two_j - T::one()) * r2j / f_odd;
                c += sign * r2j_next / f_even;
                dc += sign * two_j * r2j * r / f_even;
                r2j = r2j_next;
            }
            return Self { a, da, dda, b, db, ddb, c, dc };
        }
        let b = if k > 0 { r.sin() / r } else { r.sinh() / r };
        let db = (a - b) / r;
        let ddb = da / r - (db + db) / r;
        let c = kk * (T::one() - a) / (r * r);
        let dc = -kk * da / (r * r) - (c + c) / r;
        Self { a, da, dda, b, db, ddb, c, dc }
    }
}

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::from_count(i))
}

/// Hyperboloid model helpers for the half-plane chart.
mod hyp {
    use super::*;

    #[inline]
    pub fn minkowski<T: Real>(a: &Vector<T>, b: &Vector<T>) -> T {
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn lift<T: Real>(p: &Vector<T>) -> Vector<T> {
        let (u, y) = (p[0], p[1]);
        let two_y = y + y;
        let s = u * u + y * y;
        Vector::from_slice(&[(s + T::one()) / two_y, u / y, (s - T::one()) / two_y])
    }

    #[inline]
    pub fn lower<T: Real>(x: &Vector<T>) -> Vector<T> {
        let y = (x[0] - x[2]).recip();
        Vector::from_slice(&[x[1] * y, y])
    }

    /// Pushforward of a half-plane tangent vector to the hyperboloid.
    #[inline]
    pub fn push<T: Real>(p: &Vector<T>, v: &Vector<T>) -> Vector<T> {
        let (u, y) = (p[0], p[1]);
        let y2 = y * y;
        let two_y2 = y2 + y2;
        let (a, b) = (v[0], v[1]);
        let du = [u / y, y.recip(), u / y];
        let dy = [
            (y2 - u * u - T::one()) / two_y2,
            -u / y2,
            (y2 - u * u + T::one()) / two_y2,
        ];
        Vector::from_slice(&[
            a * du[0] + b * dy[0],
            a * du[1] + b * dy[1],
            a * du[2] + b * dy[2],
        ])
    }

    /// Inverse of [`push`] for vectors tangent to the hyperboloid at `lift(p)`.
    #[inline]
    pub fn pull<T: Real>(p: &Vector<T>, v: &Vector<T>) -> Vector<T> {
        let (u, y) = (p[0], p[1]);
        let b = -y * y * (v[0] - v[2]);
        let a = v[1] * y + (u / y) * b;
        Vector::from_slice(&[a, b])
    }

    pub fn distance<T: Real>(p: &Vector<T>, q: &Vector<T>) -> T {
        let du = p[0] - q[0];
        let dy = p[1] - q[1];
        let chord = (du * du + dy * dy).sqrt();
        let two = T::lit(2.0);
        two * (chord / (two * (p[1] * q[1]).sqrt())).asinh()
    }
}
