//! Discrete curves `(x_0, …, x_n)` and tangent vectors to the space of
//! such curves.

mod frame;
mod path;
mod srv;

use crate::error::{GeomError, Result};
use crate::linalg::Vector;
use crate::manifold::{ManifoldSpec, Point};
use crate::scalar::Real;

pub use frame::{d_tau, metric_gn, metric_norm, Edge, EdgeFrame};
pub use path::{path_energy, path_length, speed_profile, CurvePath, PathKind};
pub use srv::{srv, srv_inverse, SrvRep};

/// How coinciding consecutive points are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Reject curves with a zero-length edge.
    #[default]
    Strict,
    /// Accept zero-length edges and set the matching SRV vector to zero.
    /// Only meaningful in flat space.
    Relaxed,
}

/// An ordered list of `n + 1` points of a constant-curvature manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve<T> {
    manifold: ManifoldSpec,
    points: Vec<Vector<T>>,
    policy: EdgePolicy,
}

impl<T: Real> DiscreteCurve<T> {
    /// Validates every point (sphere rows are renormalized) and every edge.
    pub fn new(manifold: ManifoldSpec, points: Vec<Vector<T>>) -> Result<Self> {
        Self::with_policy(manifold, points, EdgePolicy::Strict)
    }

    pub fn with_policy(
        manifold: ManifoldSpec,
        points: Vec<Vector<T>>,
        policy: EdgePolicy,
    ) -> Result<Self> {
        if points.len() < 2 {
            return Err(GeomError::TooFewSamples {
                needed: 2,
                found: points.len(),
            });
        }
        if policy == EdgePolicy::Relaxed && !manifold.is_flat() {
            return Err(GeomError::InvalidArgument(
                "relaxed edges are only supported in flat space".into(),
            ));
        }
        let points = points
            .iter()
            .map(|p| manifold.validate_coords(p))
            .collect::<Result<Vec<_>>>()?;
        let curve = Self {
            manifold,
            points,
            policy,
        };
        curve.check_edges()?;
        Ok(curve)
    }

    /// Builds a curve from coordinate rows.
    pub fn from_rows(manifold: ManifoldSpec, rows: &[Vec<T>]) -> Result<Self> {
        Self::new(
            manifold,
            rows.iter().map(|r| Vector::from_slice(r)).collect(),
        )
    }

    /// Wraps points already known to be valid (no renormalization).
    pub(crate) fn from_trusted(manifold: ManifoldSpec, points: Vec<Vector<T>>, policy: EdgePolicy) -> Self {
        Self {
            manifold,
            points,
            policy,
        }
    }

    fn check_edges(&self) -> Result<()> {
        for k in 0..self.n() {
            let (x, y) = (&self.points[k], &self.points[k + 1]);
            if x == y {
                if self.policy == EdgePolicy::Strict {
                    return Err(GeomError::DegenerateEdge { index: k });
                }
                continue;
            }
            if self.manifold == ManifoldSpec::Sphere2 && x.dot(y) <= T::lit(-1.0 + 1e-12) {
                return Err(GeomError::Antipodal);
            }
        }
        Ok(())
    }

    pub fn manifold(&self) -> ManifoldSpec {
        self.manifold
    }

    pub fn policy(&self) -> EdgePolicy {
        self.policy
    }

    /// Number of edges.
    pub fn n(&self) -> usize {
        self.points.len() - 1
    }

    pub fn points(&self) -> &[Vector<T>] {
        &self.points
    }

    pub fn point(&self, k: usize) -> Point<T> {
        Point {
            coords: self.points[k].clone(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.points.iter().map(|p| p.as_slice().to_vec()).collect()
    }

    pub fn edge_frame(&self) -> Result<EdgeFrame<T>> {
        EdgeFrame::new(self)
    }

    /// Pointwise L² logarithm: `k ↦ log_{x_k} y_k`.
    pub fn log_to(&self, other: &Self) -> Result<CurveTangent<T>> {
        self.check_compatible(other)?;
        let vecs = self
            .points
            .iter()
            .zip(other.points.iter())
            .map(|(x, y)| self.manifold.log_raw(x, y))
            .collect::<Result<Vec<_>>>()?;
        Ok(CurveTangent { vecs })
    }

    /// Pointwise exponential; the result is validated under this curve's policy.
    pub fn exp(&self, w: &CurveTangent<T>) -> Result<Self> {
        self.check_tangent(w)?;
        let points = self
            .points
            .iter()
            .zip(w.vecs.iter())
            .map(|(x, v)| self.manifold.exp_raw(x, v))
            .collect::<Result<Vec<_>>>()?;
        Self::with_policy(self.manifold, points, self.policy)
    }

    /// Largest pointwise geodesic distance to `other`.
    pub fn max_distance(&self, other: &Self) -> T {
        self.points
            .iter()
            .zip(other.points.iter())
            .fold(T::zero(), |m, (x, y)| m.max(self.manifold.distance_raw(x, y)))
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.manifold != other.manifold {
            return Err(GeomError::Incompatible(format!(
                "manifolds {} and {}",
                self.manifold, other.manifold
            )));
        }
        if self.n() != other.n() {
            return Err(GeomError::Incompatible(format!(
                "{} and {} edges",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    pub fn check_tangent(&self, w: &CurveTangent<T>) -> Result<()> {
        if w.vecs.len() != self.points.len() {
            return Err(GeomError::DimensionMismatch {
                expected: self.points.len(),
                found: w.vecs.len(),
            });
        }
        let d = self.manifold.coord_dim();
        if let Some(v) = w.vecs.iter().find(|v| v.len() != d) {
            return Err(GeomError::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Builds a tangent from raw vectors, projecting onto each tangent space.
    pub fn tangent(&self, vecs: Vec<Vector<T>>) -> Result<CurveTangent<T>> {
        let w = CurveTangent { vecs };
        self.check_tangent(&w)?;
        Ok(CurveTangent {
            vecs: w
                .vecs
                .iter()
                .zip(self.points.iter())
                .map(|(v, x)| self.manifold.project_tangent(x, v))
                .collect(),
        })
    }

    pub fn zero_tangent(&self) -> CurveTangent<T> {
        CurveTangent::zeros(self.points.len(), self.manifold.coord_dim())
    }
}

/// A tangent vector to the space of discrete curves: one vector per point,
/// each in the tangent space of the matching point of a base curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveTangent<T> {
    pub vecs: Vec<Vector<T>>,
}

impl<T: Real> CurveTangent<T> {
    pub fn zeros(len: usize, dim: usize) -> Self {
        Self {
            vecs: vec![Vector::zeros(dim); len],
        }
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            vecs: self.vecs.iter().map(|v| v.scaled(s)).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: T, other: &Self) {
        for (a, b) in self.vecs.iter_mut().zip(other.vecs.iter()) {
            a.axpy(s, b);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    /// Coordinate-wise max norm, mostly for diagnostics.
    pub fn max_abs(&self) -> T {
        self.vecs.iter().fold(T::zero(), |m, v| m.max(v.max_abs()))
    }

    /// Root-mean-square Riemannian norm over the points of `base`.
    pub fn l2_norm(&self, base: &DiscreteCurve<T>) -> T {
        let m = base.manifold();
        let s: T = self
            .vecs
            .iter()
            .zip(base.points().iter())
            .map(|(v, x)| m.inner_raw(x, v, v))
            .sum();
        (s / T::from_count(self.vecs.len())).sqrt()
    }
}

/// Samples `sampler` at `t = k/n` for `k = 0..=n`.
pub fn discretize<T: Real, F>(manifold: ManifoldSpec, n: usize, mut sampler: F) -> Result<DiscreteCurve<T>>
where
    F: FnMut(T) -> Vec<T>,
{
    if n == 0 {
        return Err(GeomError::InvalidArgument("n must be at least 1".into()));
    }
    let nn = T::from_count(n);
    let points = (0..=n)
        .map(|k| Vector::from(sampler(T::from_count(k) / nn)))
        .collect();
    DiscreteCurve::new(manifold, points)
}
