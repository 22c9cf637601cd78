use crate::error::{GeomError, Result};
use crate::manifold::ManifoldSpec;
use crate::scalar::Real;

use super::{CurveTangent, DiscreteCurve, EdgeFrame};

/// What produced a path. Jacobi fields are only defined along geodesics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathKind {
    Geodesic,
    Horizontal,
    Raw,
}

impl PathKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Geodesic => "geodesic",
            Self::Horizontal => "horizontal",
            Self::Raw => "raw",
        }
    }
}

/// A path `s ↦ α(s)` sampled at `s = j/m`, `j = 0..=m`.
#[derive(Clone, Debug)]
pub struct CurvePath<T> {
    pub manifold: ManifoldSpec,
    pub curves: Vec<DiscreteCurve<T>>,
    pub velocities: Option<Vec<CurveTangent<T>>>,
    pub kind: PathKind,
}

impl<T: Real> CurvePath<T> {
    pub fn new(
        curves: Vec<DiscreteCurve<T>>,
        velocities: Option<Vec<CurveTangent<T>>>,
        kind: PathKind,
    ) -> Result<Self> {
        let first = curves.first().ok_or(GeomError::TooFewSamples { needed: 1, found: 0 })?;
        for c in &curves[1..] {
            first.check_compatible(c)?;
        }
        if let Some(v) = &velocities {
            if v.len() != curves.len() {
                return Err(GeomError::DimensionMismatch {
                    expected: curves.len(),
                    found: v.len(),
                });
            }
            for (c, w) in curves.iter().zip(v.iter()) {
                c.check_tangent(w)?;
            }
        }
        Ok(Self {
            manifold: first.manifold(),
            curves,
            velocities,
            kind,
        })
    }

    /// Constant path at `curve`.
    pub fn constant(curve: DiscreteCurve<T>, steps: usize, kind: PathKind) -> Self {
        let zero = curve.zero_tangent();
        Self {
            manifold: curve.manifold(),
            velocities: Some(vec![zero; steps + 1]),
            curves: vec![curve; steps + 1],
            kind,
        }
    }

    pub fn steps(&self) -> usize {
        self.curves.len() - 1
    }

    pub fn n(&self) -> usize {
        self.curves[0].n()
    }

    pub fn start(&self) -> &DiscreteCurve<T> {
        &self.curves[0]
    }

    pub fn end(&self) -> &DiscreteCurve<T> {
        self.curves.last().expect("path has at least one curve")
    }

    /// Midpoint curve of step `j` and the finite-difference velocity there.
    pub fn midpoint_velocity(&self, j: usize) -> Result<(DiscreteCurve<T>, CurveTangent<T>)> {
        let m = self.manifold;
        let scale = T::from_count(self.steps());
        let half = T::lit(0.5);
        let (a, b) = (&self.curves[j], &self.curves[j + 1]);
        let mut pts = Vec::with_capacity(a.points().len());
        let mut vel = Vec::with_capacity(a.points().len());
        for (x, y) in a.points().iter().zip(b.points().iter()) {
            let l = m.log_raw(x, y)?;
            let mid = m.exp_raw(x, &l.scaled(half))?;
            let v = if m.is_flat() {
                l.scaled(scale)
            } else {
                m.transport_raw(x, &mid, &l)?.scaled(scale)
            };
            pts.push(mid);
            vel.push(v);
        }
        Ok((
            DiscreteCurve::from_trusted(m, pts, a.policy()),
            CurveTangent { vecs: vel },
        ))
    }

    /// Finite-difference midpoint velocities for every step.
    pub fn finite_difference_velocities(&self) -> Result<Vec<(DiscreteCurve<T>, CurveTangent<T>)>> {
        (0..self.steps()).map(|j| self.midpoint_velocity(j)).collect()
    }
}

fn squared_speed<T: Real>(curve: &DiscreteCurve<T>, w: &CurveTangent<T>) -> Result<T> {
    let frame = EdgeFrame::new(curve)?;
    frame.require_regular()?;
    Ok(frame.metric(&w.vecs, &w.vecs).max(T::zero()))
}

/// Discrete energy `½∫ G^n(α', α') ds`.
///
/// With stored velocities the integrand is sampled at the nodes and
/// integrated with the trapezoidal rule; otherwise velocities come from
/// log-map differences evaluated at step midpoints (midpoint rule).
pub fn path_energy<T: Real>(p: &CurvePath<T>) -> Result<T> {
    if p.curves.len() < 2 {
        return Err(GeomError::TooFewSamples {
            needed: 2,
            found: p.curves.len(),
        });
    }
    let m = T::from_count(p.steps());
    let half = T::lit(0.5);
    match &p.velocities {
        Some(vs) => {
            let g = p
                .curves
                .iter()
                .zip(vs.iter())
                .map(|(c, w)| squared_speed(c, w))
                .collect::<Result<Vec<_>>>()?;
            let inner: T = g[1..g.len() - 1].iter().copied().sum();
            let total = (g[0] + g[g.len() - 1]) * half + inner;
            Ok(half * total / m)
        }
        None => {
            let mut total = T::zero();
            for j in 0..p.steps() {
                let (c, w) = p.midpoint_velocity(j)?;
                total += squared_speed(&c, &w)?;
            }
            Ok(half * total / m)
        }
    }
}

/// `Σ_j ‖α(s_{j+1}) ⊖ α(s_j)‖_{G^n}` with the metric taken at step midpoints.
pub fn path_length<T: Real>(p: &CurvePath<T>) -> Result<T> {
    if p.curves.len() < 2 {
        return Ok(T::zero());
    }
    let m = T::from_count(p.steps());
    let mut total = T::zero();
    for j in 0..p.steps() {
        let (c, w) = p.midpoint_velocity(j)?;
        total += squared_speed(&c, &w)?.sqrt();
    }
    Ok(total / m)
}

/// `‖α'(s)‖_{G^n}` at each node when velocities are stored, else at each
/// step midpoint.
pub fn speed_profile<T: Real>(p: &CurvePath<T>) -> Result<Vec<T>> {
    match &p.velocities {
        Some(vs) => p
            .curves
            .iter()
            .zip(vs.iter())
            .map(|(c, w)| Ok(squared_speed(c, w)?.sqrt()))
            .collect(),
        None => (0..p.steps())
            .map(|j| {
                let (c, w) = p.midpoint_velocity(j)?;
                Ok(squared_speed(&c, &w)?.sqrt())
            })
            .collect(),
    }
}
