use crate::curve::{CurvePath, CurveTangent, DiscreteCurve, PathKind};
use crate::error::{GeomError, Result};
use crate::linalg::{LinearMap, Vector};
use crate::manifold::ManifoldSpec;
use crate::scalar::Real;

use super::kinematics::{EdgeSecond, Kinematics};

/// Time stepping scheme for the geodesic and Jacobi equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta with stages coupled by parallel
    /// transport from the base point of each step.
    #[default]
    Rk4,
    /// `x ← exp_x(h x')`, `x' ← P(x' + h ∇_s x')`.
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicOptions {
    pub steps: usize,
    pub integrator: Integrator,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            steps: 100,
            integrator: Integrator::Rk4,
        }
    }
}

/// Per-point transport matrices, `None` in flat space where they are all
/// the identity.
pub(crate) type Maps<T> = Option<Vec<LinearMap<T>>>;

#[inline]
pub(crate) fn carry<T: Real>(maps: &Maps<T>, k: usize, v: &Vector<T>) -> Vector<T> {
    match maps {
        Some(ms) => ms[k].apply(v),
        None => v.clone(),
    }
}

pub(crate) struct Stage<T> {
    pub kin: Kinematics<T>,
    pub second: Vec<EdgeSecond<T>>,
    /// Base point of the step to the stage point.
    pub to_stage: Maps<T>,
    /// Stage point back to the base point.
    pub to_base: Maps<T>,
}

/// Everything the Jacobi equation needs to replay one step.
pub(crate) struct StepTrace<T> {
    pub stages: Vec<Stage<T>>,
    /// Base curve of the step to the next curve.
    pub to_next: Maps<T>,
}

fn maps_between<T: Real>(m: ManifoldSpec, from: &[Vector<T>], to: &[Vector<T>]) -> Result<Maps<T>> {
    if m.is_flat() {
        return Ok(None);
    }
    from.iter()
        .zip(to.iter())
        .map(|(x, y)| m.transport_map(x, y))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn pointwise_exp<T: Real>(m: ManifoldSpec, x: &[Vector<T>], d: &[Vector<T>]) -> Result<Vec<Vector<T>>> {
    x.iter().zip(d.iter()).map(|(p, v)| m.exp_raw(p, v)).collect()
}

fn combo<T: Real>(terms: &[(T, &[Vector<T>])]) -> Vec<Vector<T>> {
    let len = terms[0].1.len();
    (0..len)
        .map(|k| {
            let mut out = terms[0].1[k].scaled(terms[0].0);
            for (s, vs) in &terms[1..] {
                out.axpy(*s, &vs[k]);
            }
            out
        })
        .collect()
}

struct StageEval<T> {
    stage: Stage<T>,
    /// Stage accelerations carried back to the base point.
    acc: Vec<Vector<T>>,
}

fn eval_stage<T: Real>(
    m: ManifoldSpec,
    x: &[Vector<T>],
    disp: &[Vector<T>],
    vel: &[Vector<T>],
    record: bool,
) -> Result<StageEval<T>> {
    let xs = pointwise_exp(m, x, disp)?;
    let to_stage = maps_between(m, x, &xs)?;
    let to_base = maps_between(m, &xs, x)?;
    let vs = vel
        .iter()
        .enumerate()
        .map(|(k, v)| m.project_tangent(&xs[k], &carry(&to_stage, k, v)))
        .collect();
    let kin = Kinematics::new(m, xs, vs)?;
    let acc = kin.acc.iter().enumerate().map(|(k, a)| carry(&to_base, k, a)).collect();
    let second = if record { kin.second_order() } else { Vec::new() };
    Ok(StageEval {
        stage: Stage {
            kin,
            second,
            to_stage,
            to_base,
        },
        acc,
    })
}

/// Integrates the geodesic equations from `(alpha0, w)`. With `record` set,
/// the stage data needed to integrate Jacobi fields is kept.
pub(crate) fn integrate<T: Real>(
    alpha0: &DiscreteCurve<T>,
    w: &CurveTangent<T>,
    opts: &GeodesicOptions,
    record: bool,
) -> Result<(CurvePath<T>, Vec<StepTrace<T>>)> {
    alpha0.check_tangent(w)?;
    if opts.steps == 0 {
        return Err(GeomError::InvalidArgument("steps must be at least 1".into()));
    }
    let m = alpha0.manifold();
    let h = T::from_count(opts.steps).recip();
    let half = T::lit(0.5);
    let sixth = h / T::lit(6.0);
    let (two, one) = (T::lit(2.0), T::one());

    let mut x = alpha0.points().to_vec();
    let mut v: Vec<Vector<T>> = x
        .iter()
        .zip(w.vecs.iter())
        .map(|(p, u)| m.project_tangent(p, u))
        .collect();
    let mut curves = vec![alpha0.clone()];
    let mut vels = vec![CurveTangent { vecs: v.clone() }];
    let mut traces = Vec::new();

    for step in 0..opts.steps {
        let wrap = |e: GeomError| GeomError::StepOutOfDomain {
            step,
            reason: e.to_string(),
        };
        let base = Kinematics::new(m, x.clone(), v.clone()).map_err(wrap)?;
        let (disp, dv, stages) = match opts.integrator {
            Integrator::Euler => {
                let disp: Vec<_> = v.iter().map(|u| u.scaled(h)).collect();
                let dv = combo(&[(one, &v), (h, &base.acc)]);
                let second = if record { base.second_order() } else { Vec::new() };
                let s1 = Stage {
                    kin: base,
                    second,
                    to_stage: None,
                    to_base: None,
                };
                (disp, dv, vec![s1])
            }
            Integrator::Rk4 => {
                let k1 = base.acc.clone();
                let v2 = combo(&[(one, &v), (h * half, &k1)]);
                let d2: Vec<_> = v.iter().map(|u| u.scaled(h * half)).collect();
                let s2 = eval_stage(m, &x, &d2, &v2, record).map_err(wrap)?;
                let v3 = combo(&[(one, &v), (h * half, &s2.acc)]);
                let d3: Vec<_> = v2.iter().map(|u| u.scaled(h * half)).collect();
                let s3 = eval_stage(m, &x, &d3, &v3, record).map_err(wrap)?;
                let v4 = combo(&[(one, &v), (h, &s3.acc)]);
                let d4: Vec<_> = v3.iter().map(|u| u.scaled(h)).collect();
                let s4 = eval_stage(m, &x, &d4, &v4, record).map_err(wrap)?;
                let disp = combo(&[(sixth, &v), (two * sixth, &v2), (two * sixth, &v3), (sixth, &v4)]);
                let dv = combo(&[
                    (one, &v),
                    (sixth, &k1),
                    (two * sixth, &s2.acc),
                    (two * sixth, &s3.acc),
                    (sixth, &s4.acc),
                ]);
                let second = if record { base.second_order() } else { Vec::new() };
                let s1 = Stage {
                    kin: base,
                    second,
                    to_stage: None,
                    to_base: None,
                };
                (disp, dv, vec![s1, s2.stage, s3.stage, s4.stage])
            }
        };
        let nx = pointwise_exp(m, &x, &disp).map_err(wrap)?;
        let curve = DiscreteCurve::with_policy(m, nx, alpha0.policy()).map_err(wrap)?;
        let to_next = maps_between(m, &x, curve.points()).map_err(wrap)?;
        x = curve.points().to_vec();
        v = dv
            .iter()
            .enumerate()
            .map(|(k, u)| m.project_tangent(&x[k], &carry(&to_next, k, u)))
            .collect();
        if record {
            traces.push(StepTrace { stages, to_next });
        }
        curves.push(curve);
        vels.push(CurveTangent { vecs: v.clone() });
    }
    let path = CurvePath {
        manifold: m,
        curves,
        velocities: Some(vels),
        kind: PathKind::Geodesic,
    };
    Ok((path, traces))
}

/// Discrete exponential map: the geodesic from `alpha0` with initial
/// velocity `w`, sampled at `steps + 1` times.
pub fn exp_map<T: Real>(alpha0: &DiscreteCurve<T>, w: &CurveTangent<T>, steps: usize) -> Result<CurvePath<T>> {
    exp_map_with(
        alpha0,
        w,
        &GeodesicOptions {
            steps,
            ..Default::default()
        },
    )
}

pub fn exp_map_with<T: Real>(
    alpha0: &DiscreteCurve<T>,
    w: &CurveTangent<T>,
    opts: &GeodesicOptions,
) -> Result<CurvePath<T>> {
    Ok(integrate(alpha0, w, opts, false)?.0)
}
