use log::debug;

use crate::curve::{CurvePath, CurveTangent, DiscreteCurve};
use crate::error::{GeomError, Result};
use crate::scalar::Real;

use super::exp::{integrate, GeodesicOptions};
use super::jacobi::{JacobiInverse, JacobiOperator};

/// When the Jacobi matrix is rebuilt during shooting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JacobianPolicy {
    /// Newton: a fresh matrix at every iterate.
    Every,
    /// Chord: keep the last factorization while the gap keeps shrinking
    /// fast enough.
    #[default]
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootOptions {
    pub geodesic: GeodesicOptions,
    /// Stop once the endpoint gap is below `tol · (1 + ‖log α0 α1‖)`.
    pub tol: f64,
    pub max_iter: usize,
    pub jacobian: JacobianPolicy,
    /// Chord iterations rebuild when the gap shrinks by less than this factor.
    pub rebuild_ratio: f64,
    /// Steps of the geodesic the Jacobi matrix is computed along. A coarser
    /// grid than the shot geodesic only perturbs the correction, not the
    /// converged result.
    pub jacobian_steps: Option<usize>,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            geodesic: GeodesicOptions::default(),
            tol: 1e-6,
            max_iter: 50,
            jacobian: JacobianPolicy::Adaptive,
            rebuild_ratio: 0.1,
            jacobian_steps: Some(10),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShootReport<T> {
    pub path: CurvePath<T>,
    /// Initial velocity of `path`.
    pub velocity: CurveTangent<T>,
    /// Velocity corrections applied.
    pub iterations: usize,
    /// Endpoint gap after each shot.
    pub gaps: Vec<f64>,
    pub tol: f64,
    pub converged: bool,
    pub jacobian_builds: usize,
}

struct Best<T> {
    gap: f64,
    w: CurveTangent<T>,
    dw: CurveTangent<T>,
    /// Endpoint residual `log_{end} α1` and the end it is based at.
    j: CurveTangent<T>,
    end: DiscreteCurve<T>,
    /// Whether `dw` came from a full-resolution matrix built at `w`.
    refined: bool,
}

fn op_inverse<T: Real>(alpha0: &DiscreteCurve<T>, w: &CurveTangent<T>, opts: &GeodesicOptions) -> Result<JacobiInverse<T>> {
    let (_, op) = JacobiOperator::from_initial(alpha0, w, opts)?;
    op.inverse()
}

fn carry_to<T: Real>(j: &CurveTangent<T>, from: &DiscreteCurve<T>, to: &DiscreteCurve<T>) -> Result<CurveTangent<T>> {
    let m = from.manifold();
    if m.is_flat() || from == to {
        return Ok(j.clone());
    }
    let vecs = j
        .vecs
        .iter()
        .zip(from.points().iter().zip(to.points()))
        .map(|(v, (x, y))| m.transport_raw(x, y, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTangent { vecs })
}

/// Geodesic from `alpha0` to `alpha1` by shooting: the initial velocity is
/// corrected with the inverse Jacobi map until the endpoint matches.
///
/// A run that stops at the iteration budget is returned with
/// `converged = false`. Three consecutive gap increases are reported as
/// [`GeomError::ShootingDiverged`].
pub fn geodesic_shoot<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    opts: &ShootOptions,
) -> Result<ShootReport<T>> {
    alpha0.check_compatible(alpha1)?;
    let chord = alpha0.log_to(alpha1)?;
    shoot_from(alpha0, alpha1, chord.clone(), &chord, opts)
}

/// Like [`geodesic_shoot`], starting from the initial velocity `start`
/// instead of the chord.
pub fn geodesic_shoot_from<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    start: &CurveTangent<T>,
    opts: &ShootOptions,
) -> Result<ShootReport<T>> {
    alpha0.check_compatible(alpha1)?;
    if start.vecs.len() != alpha0.points().len() {
        return Err(GeomError::DimensionMismatch {
            expected: alpha0.points().len(),
            found: start.vecs.len(),
        });
    }
    let chord = alpha0.log_to(alpha1)?;
    shoot_from(alpha0, alpha1, start.clone(), &chord, opts)
}

fn shoot_from<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    mut w: CurveTangent<T>,
    chord: &CurveTangent<T>,
    opts: &ShootOptions,
) -> Result<ShootReport<T>> {
    // tolerance scale stays tied to the chord so both entry points agree
    let tol = opts.tol * (1.0 + chord.l2_norm(alpha0).to_f64_lossy());
    let mut eta = T::one();
    let mut best: Option<Best<T>> = None;
    let mut inverse: Option<JacobiInverse<T>> = None;
    let mut stale = true;
    let mut increases = 0;
    let mut gaps = Vec::new();
    let mut builds = 0;
    let mut iterations = 0;
    let jac_opts = GeodesicOptions {
        steps: opts.jacobian_steps.unwrap_or(opts.geodesic.steps).min(opts.geodesic.steps),
        ..opts.geodesic
    };

    loop {
        let (path, _) = integrate(alpha0, &w, &opts.geodesic, false)?;
        let j = path.end().log_to(alpha1)?;
        let gap = j.l2_norm(path.end()).to_f64_lossy();
        gaps.push(gap);
        debug!("shooting iterate {iterations}: gap {gap:e} (tol {tol:e})");
        let done = gap < tol;
        if done || iterations >= opts.max_iter {
            return Ok(ShootReport {
                path,
                velocity: w,
                iterations,
                gaps,
                tol,
                converged: done,
                jacobian_builds: builds,
            });
        }
        iterations += 1;

        if let Some(b) = &mut best {
            if !(gap < b.gap) {
                if !b.refined {
                    // the step came from a reused or coarse matrix; redo it exactly
                    let fine = op_inverse(alpha0, &b.w, &opts.geodesic)?;
                    builds += 1;
                    b.dw = fine.solve(&carry_to(&b.j, &b.end, fine.end())?)?;
                    b.refined = true;
                    eta = T::one();
                    w = b.w.clone();
                    w.axpy(eta, &b.dw);
                    stale = true;
                    continue;
                }
                increases += 1;
                if increases >= 3 {
                    return Err(GeomError::ShootingDiverged { history: gaps });
                }
                eta = eta * T::lit(0.5);
                w = b.w.clone();
                w.axpy(eta, &b.dw);
                stale = true;
                continue;
            }
            if gap > opts.rebuild_ratio * b.gap {
                stale = true;
            }
        }
        increases = 0;
        eta = T::one();

        let fresh = stale || opts.jacobian == super::JacobianPolicy::Every || inverse.is_none();
        if fresh {
            inverse = Some(op_inverse(alpha0, &w, &jac_opts)?);
            builds += 1;
            stale = false;
        }
        let inv = inverse.as_ref().expect("factorization built above");
        let end = path.end().clone();
        let dw = inv.solve(&carry_to(&j, &end, inv.end())?)?;
        let next = {
            let mut v = w.clone();
            v.axpy(T::one(), &dw);
            v
        };
        best = Some(Best {
            gap,
            w: std::mem::replace(&mut w, next),
            dw,
            j,
            end,
            refined: fresh && jac_opts.steps == opts.geodesic.steps,
        });
    }
}
