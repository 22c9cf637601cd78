use log::{debug, warn};

use crate::curve::{metric_norm, CurveTangent, DiscreteCurve};
use crate::error::{GeomError, Result};
use crate::geodesic::exp_map_with;
use crate::matching::{optimal_match, MatchOptions};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KarcherOptions {
    pub matching: MatchOptions,
    pub max_iter: usize,
    /// Stop once the mean velocity is below `tol · d̄`, where `d̄` is the
    /// mean distance from the first estimate to the sample.
    pub tol: f64,
    /// Allowed increase of the objective before the step is halved.
    pub slack: f64,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        Self {
            matching: MatchOptions::default(),
            max_iter: 30,
            tol: 1e-4,
            slack: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KarcherResult<T> {
    pub mean: DiscreteCurve<T>,
    pub iterations: usize,
    /// `‖(1/N) Σ w_i‖` at each estimate.
    pub gradient_norms: Vec<f64>,
    /// `Σ d(α̂, α_i)²` at each estimate.
    pub objective: Vec<f64>,
    pub converged: bool,
    /// Matched representative of each input curve.
    pub representatives: Vec<DiscreteCurve<T>>,
}

struct Evaluation<T> {
    velocity: CurveTangent<T>,
    objective: f64,
    distances: Vec<f64>,
}

fn evaluate<T: Real>(
    mean: &DiscreteCurve<T>,
    reps: &mut [DiscreteCurve<T>],
    opts: &MatchOptions,
) -> Result<Evaluation<T>> {
    let mut sum = mean.zero_tangent();
    let mut distances = Vec::with_capacity(reps.len());
    for rep in reps.iter_mut() {
        let (path, m) = optimal_match(mean, rep, opts)?;
        let w = path
            .velocities
            .as_ref()
            .map(|v| v[0].clone())
            .ok_or(GeomError::NotGeodesic(path.kind.as_str()))?;
        sum.axpy(T::one(), &w);
        distances.push(m.final_length());
        *rep = m.matched;
    }
    let velocity = sum.scaled(T::from_count(reps.len()).recip());
    let objective = distances.iter().map(|d| d * d).sum();
    Ok(Evaluation {
        velocity,
        objective,
        distances,
    })
}

/// Karcher mean of `curves` by the Karcher flow: match the current estimate
/// to every curve, average the initial velocities of the horizontal
/// geodesics and follow the exponential map along the average.
///
/// The step starts at 1 and is halved whenever the objective increases.
pub fn karcher_mean<T: Real>(curves: &[DiscreteCurve<T>], opts: &KarcherOptions) -> Result<KarcherResult<T>> {
    let first = curves.first().ok_or(GeomError::TooFewSamples { needed: 1, found: 0 })?;
    for c in &curves[1..] {
        first.check_compatible(c)?;
    }
    let geo = opts.matching.shoot.geodesic;
    let mut reps = curves.to_vec();
    let mut mean = first.clone();
    let mut eval = evaluate(&mean, &mut reps, &opts.matching)?;
    let scale = eval.distances.iter().sum::<f64>() / curves.len() as f64;
    let tol = opts.tol * scale;
    let mut gradient_norms = Vec::new();
    let mut objective = vec![eval.objective];
    let mut eta = T::one();
    let mut iterations = 1;
    let converged = loop {
        let grad = metric_norm(&mean, &eval.velocity)?.to_f64_lossy();
        gradient_norms.push(grad);
        debug!("karcher iterate {iterations}: objective {:.10e}, gradient {grad:.3e}", eval.objective);
        if grad <= tol {
            break true;
        }
        if iterations >= opts.max_iter {
            warn!("karcher mean stopped at the iteration budget with gradient {grad:.3e}");
            break false;
        }
        let candidate = loop {
            let step = exp_map_with(&mean, &eval.velocity.scaled(eta), &geo)?;
            let next = step.end().clone();
            let mut trial = reps.clone();
            let next_eval = evaluate(&next, &mut trial, &opts.matching)?;
            iterations += 1;
            if next_eval.objective <= eval.objective + opts.slack || iterations >= opts.max_iter {
                reps = trial;
                break (next, next_eval);
            }
            eta = eta * T::lit(0.5);
            debug!("karcher objective rose to {:.6e}; step halved", next_eval.objective);
        };
        mean = candidate.0;
        eval = candidate.1;
        objective.push(eval.objective);
        eta = T::one();
    };
    Ok(KarcherResult {
        mean,
        iterations,
        gradient_norms,
        objective,
        converged,
        representatives: reps,
    })
}
