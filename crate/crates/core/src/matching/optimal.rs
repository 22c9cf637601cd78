use log::{debug, warn};

use crate::curve::{path_length, CurvePath, CurveTangent, DiscreteCurve};
use crate::error::Result;
use crate::geodesic::{geodesic_shoot, geodesic_shoot_from, ShootOptions};
use crate::scalar::Real;

use super::horizontal::{horizontal_part_of_path, HorizontalOptions};
use super::spline::{interp_uniform, uniform_grid, ShapeSpline};
use super::vertical::verticality_ratio;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchOptions {
    pub shoot: ShootOptions,
    pub horizontal: HorizontalOptions,
    pub max_iter: usize,
    /// Stop once the target curve moves less than this (max pointwise
    /// geodesic distance) between iterations.
    pub move_tol: f64,
    /// Verticality ratio the final geodesic is expected to stay below.
    pub horizontality_tol: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            shoot: ShootOptions::default(),
            horizontal: HorizontalOptions::default(),
            max_iter: 20,
            move_tol: 1e-6,
            horizontality_tol: 0.05,
        }
    }
}

/// Why a matching run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The target moved less than the tolerance.
    TargetSettled,
    /// The next geodesic was not shorter; the previous one is kept.
    NoDecrease,
    /// Shooting failed on a later target; the previous result is kept.
    ShootingFailed,
    /// Iteration budget exhausted.
    Budget,
    /// Single pass method (dynamic programming).
    SinglePass,
}

/// Result of matching `α1` onto `α0`: `α1^opt_k = ᾱ1(φ(k/n))`.
#[derive(Clone, Debug)]
pub struct Matching<T> {
    /// `φ` on the grid `k/n`, nondecreasing with `φ(0) = 0`, `φ(1) = 1`.
    pub phi: Vec<T>,
    pub matched: DiscreteCurve<T>,
    /// Geodesics computed.
    pub iterations: usize,
    /// Length of each accepted geodesic.
    pub length_history: Vec<f64>,
    /// Length of the horizontal part of each accepted geodesic.
    pub horizontal_lengths: Vec<f64>,
    pub stop: StopReason,
    /// Largest verticality ratio along the returned geodesic.
    pub max_verticality: f64,
}

impl<T> Matching<T> {
    pub fn converged(&self) -> bool {
        matches!(self.stop, StopReason::TargetSettled | StopReason::NoDecrease)
    }

    pub fn final_length(&self) -> f64 {
        self.length_history.last().copied().unwrap_or(0.0)
    }
}

pub(crate) fn max_ratio<T: Real>(p: &CurvePath<T>) -> Result<f64> {
    Ok(verticality_ratio(p)?
        .into_iter()
        .fold(0.0, |m, r| m.max(r.to_f64_lossy())))
}

/// Optimal matching by alternating geodesic shooting and horizontal
/// projection. The target stays on the spline shape of `α1`.
///
/// Returns the last accepted geodesic and the matching it ends on.
pub fn optimal_match<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    opts: &MatchOptions,
) -> Result<(CurvePath<T>, Matching<T>)> {
    alpha0.check_compatible(alpha1)?;
    let n = alpha0.n();
    let spline = ShapeSpline::new(alpha1)?;
    let mut params = uniform_grid::<T>(n);
    let mut target = alpha1.clone();
    let mut history: Vec<f64> = Vec::new();
    let mut hor_lengths = Vec::new();
    let mut iterations = 0;
    let mut best: Option<(CurvePath<T>, Vec<T>, DiscreteCurve<T>)> = None;
    let mut velocity: Option<CurveTangent<T>> = None;
    let stop = loop {
        // the previous velocity is usually far closer than the chord
        let shot = match &velocity {
            Some(w) => geodesic_shoot_from(alpha0, &target, w, &opts.shoot)
                .or_else(|_| geodesic_shoot(alpha0, &target, &opts.shoot)),
            None => geodesic_shoot(alpha0, &target, &opts.shoot),
        };
        iterations += 1;
        let path = match (shot, &best) {
            (Ok(rep), _) => {
                velocity = Some(rep.velocity);
                rep.path
            }
            (Err(e), None) => return Err(e),
            (Err(e), Some(_)) => {
                warn!("optimal matching: shooting failed at iteration {iterations}: {e}");
                break StopReason::ShootingFailed;
            }
        };
        let len = path_length(&path)?.to_f64_lossy();
        debug!("optimal matching iterate {iterations}: length {len:.10e}");
        if let Some(&last) = history.last() {
            if len > last + 1e-8 {
                break StopReason::NoDecrease;
            }
        }
        history.push(len);
        let current = best.insert((path, params.clone(), target.clone()));
        if iterations >= opts.max_iter {
            break StopReason::Budget;
        }
        let hor = horizontal_part_of_path(&current.0, &opts.horizontal)?;
        hor_lengths.push(path_length(&hor.path)?.to_f64_lossy());
        let next: Vec<T> = hor.params.iter().map(|&u| interp_uniform(&params, u)).collect();
        let next_target = spline.resample(&next)?;
        let moved = target.max_distance(&next_target).to_f64_lossy();
        params = next;
        target = next_target;
        if moved < opts.move_tol {
            break StopReason::TargetSettled;
        }
    };
    let (path, phi, matched) = best.expect("first iterate accepted");
    let max_verticality = max_ratio(&path)?;
    if max_verticality >= opts.horizontality_tol {
        warn!(
            "optimal matching ended ({stop:?}) with verticality ratio {max_verticality:.3e} above {:.3e}",
            opts.horizontality_tol
        );
    }
    Ok((
        path,
        Matching {
            phi,
            matched,
            iterations,
            length_history: history,
            horizontal_lengths: hor_lengths,
            stop,
            max_verticality,
        },
    ))
}
