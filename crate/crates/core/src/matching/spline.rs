use crate::curve::DiscreteCurve;
use crate::error::Result;
use crate::linalg::{solve_tridiagonal, Vector};
use crate::manifold::ManifoldSpec;
use crate::scalar::Real;

/// Dense interpolant of a discrete curve: a natural cubic spline in model
/// coordinates through `x_k` at parameter `k/n`.
///
/// Sphere values are renormalized onto the unit sphere and hyperbolic
/// values are kept in the upper half-plane, so every query is a valid point.
#[derive(Clone, Debug)]
pub struct ShapeSpline<T> {
    manifold: ManifoldSpec,
    knots: Vec<Vector<T>>,
    second: Vec<Vector<T>>,
    floor: T,
}

impl<T: Real> ShapeSpline<T> {
    pub fn new(curve: &DiscreteCurve<T>) -> Result<Self> {
        let knots = curve.points().to_vec();
        let n = knots.len() - 1;
        let d = knots[0].len();
        let mut second = vec![Vector::zeros(d); n + 1];
        if n >= 2 {
            let h2 = T::from_count(n * n).recip();
            let six = T::lit(6.0);
            let inner = n - 1;
            let lower = vec![T::one(); inner];
            let diag = vec![T::lit(4.0); inner];
            let upper = vec![T::one(); inner];
            for c in 0..d {
                let rhs: Vec<T> = (1..n)
                    .map(|i| six / h2 * (knots[i + 1][c] - knots[i][c] - knots[i][c] + knots[i - 1][c]))
                    .collect();
                let sol = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
                for (i, s) in sol.into_iter().enumerate() {
                    second[i + 1][c] = s;
                }
            }
        }
        let floor = match curve.manifold() {
            ManifoldSpec::HyperbolicPlane => {
                knots.iter().fold(T::infinity(), |m, p| m.min(p[1])) * T::lit(1e-3)
            }
            _ => T::zero(),
        };
        Ok(Self {
            manifold: curve.manifold(),
            knots,
            second,
            floor,
        })
    }

    pub fn manifold(&self) -> ManifoldSpec {
        self.manifold
    }

    pub fn n(&self) -> usize {
        self.knots.len() - 1
    }

    /// Point at parameter `t ∈ [0, 1]`; `t` is clamped to the interval.
    pub fn eval(&self, t: T) -> Vector<T> {
        let n = self.n();
        let nn = T::from_count(n);
        let x = (t.max(T::zero()).min(T::one())) * nn;
        let i = x.floor().to_usize().unwrap_or(0).min(n - 1);
        let u = x - T::from_count(i);
        if u == T::zero() {
            return self.knots[i].clone();
        }
        if u == T::one() {
            return self.knots[i + 1].clone();
        }
        let w = T::one() - u;
        let h2 = (nn * nn).recip() / T::lit(6.0);
        let mut p = self.knots[i].scaled(w);
        p.axpy(u, &self.knots[i + 1]);
        p.axpy(h2 * (w * w * w - w), &self.second[i]);
        p.axpy(h2 * (u * u * u - u), &self.second[i + 1]);
        self.to_manifold(p)
    }

    fn to_manifold(&self, mut p: Vector<T>) -> Vector<T> {
        match self.manifold {
            ManifoldSpec::Sphere2 => {
                let r = p.norm();
                p.scaled(r.recip())
            }
            ManifoldSpec::HyperbolicPlane => {
                p[1] = p[1].max(self.floor);
                p
            }
            ManifoldSpec::Euclidean(_) => p,
        }
    }

    /// Discrete curve sampled at the given parameters.
    pub fn resample(&self, params: &[T]) -> Result<DiscreteCurve<T>> {
        DiscreteCurve::new(self.manifold, params.iter().map(|&t| self.eval(t)).collect())
    }
}

/// Uniform grid `k/n`, `k = 0..=n`.
pub fn uniform_grid<T: Real>(n: usize) -> Vec<T> {
    let nn = T::from_count(n);
    (0..=n).map(|k| T::from_count(k) / nn).collect()
}

/// Value at `t` of the piecewise-linear function through `(k/n, values[k])`.
pub fn interp_uniform<T: Real>(values: &[T], t: T) -> T {
    let n = values.len() - 1;
    let x = t.max(T::zero()).min(T::one()) * T::from_count(n);
    let i = x.floor().to_usize().unwrap_or(0).min(n - 1);
    let u = x - T::from_count(i);
    values[i] + (values[i + 1] - values[i]) * u
}

/// Inverse of a nondecreasing piecewise-linear map through `(k/n, values[k])`
/// evaluated at `y`.
pub fn invert_uniform<T: Real>(values: &[T], y: T) -> T {
    let n = values.len() - 1;
    let nn = T::from_count(n);
    if y <= values[0] {
        return T::zero();
    }
    if y >= values[n] {
        return T::one();
    }
    // first index with values[i+1] > y
    let i = values[1..].partition_point(|&v| v <= y).min(n - 1);
    let (a, b) = (values[i], values[i + 1]);
    let u = if b > a { (y - a) / (b - a) } else { T::zero() };
    (T::from_count(i) + u) / nn
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_interpolates_knots_and_reproduces_lines() {
        let c = crate::curve::discretize(ManifoldSpec::Euclidean(2), 6, |t: f64| vec![t, 2.0 * t - 1.0]).unwrap();
        let s = ShapeSpline::new(&c).unwrap();
        for (k, p) in c.points().iter().enumerate() {
            assert_eq!(&s.eval(k as f64 / 6.0), p);
        }
        let q = s.eval(0.37);
        assert!((q[0] - 0.37).abs() < 1e-14 && (q[1] + 0.26).abs() < 1e-14);
    }

    #[test]
    fn piecewise_linear_inverse() {
        let v = [0.0f64, 0.1, 0.5, 1.0];
        for &t in &[0.0, 0.2, 0.4, 0.77, 1.0] {
            let y = interp_uniform(&v, t);
            assert!((invert_uniform(&v, y) - t).abs() < 1e-14);
        }
    }
}
