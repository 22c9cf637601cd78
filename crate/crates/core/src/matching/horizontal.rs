use log::trace;

use crate::curve::{CurvePath, CurveTangent, DiscreteCurve, EdgeFrame, PathKind};
use crate::error::{GeomError, Result};
use crate::scalar::Real;

use super::spline::{interp_uniform, invert_uniform, uniform_grid, ShapeSpline};
use super::vertical::decompose_in_frame;

/// How `φ(s)^{-1}(k/n)` is read off the upsampled reparameterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Inversion {
    /// Exact inverse of the piecewise-linear `φ`.
    #[default]
    Linear,
    /// First upsampled parameter `ℓ/N` with `k/n ≤ ψ(ℓ/N) < (k+1)/n`.
    Bracket,
    /// Upsampled parameter whose `ψ` value is closest to `k/n`.
    Nearest,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizontalOptions {
    /// Upsampled grid size `N`; `None` means `10·n`.
    pub upsample: Option<usize>,
    pub inversion: Inversion,
    /// Smallest allowed increment of `φ` between grid points.
    pub min_increment: f64,
    /// Largest total mass the monotonicity repair may move before failing.
    pub max_repair: f64,
    /// Courant number for the transport of `φ`; larger steps are split.
    pub courant: f64,
}

impl Default for HorizontalOptions {
    fn default() -> Self {
        Self {
            upsample: None,
            inversion: Inversion::Linear,
            min_increment: 1e-9,
            max_repair: 0.01,
            courant: 0.9,
        }
    }
}

/// Horizontal part of a path together with the reparameterization that
/// produced it.
#[derive(Clone, Debug)]
pub struct HorizontalPath<T> {
    pub path: CurvePath<T>,
    /// `φ(1)` on the grid `k/n`.
    pub phi: Vec<T>,
    /// Parameters `φ(1)^{-1}(k/n)` at which the end curve samples the shape
    /// of `p(1)`.
    pub params: Vec<T>,
}

/// Curve and velocity used to advance `φ` across step `j`: the stored node
/// velocity, or the log difference at the step midpoint.
fn step_velocity<T: Real>(p: &CurvePath<T>, j: usize) -> Result<(DiscreteCurve<T>, CurveTangent<T>)> {
    match &p.velocities {
        Some(vs) => Ok((p.curves[j].clone(), vs[j].clone())),
        None => p.midpoint_velocity(j),
    }
}

/// Restores strict monotonicity of `φ` with fixed endpoints and returns the
/// total displacement this took.
fn repair<T: Real>(phi: &mut [T], min_inc: T) -> T {
    let n = phi.len() - 1;
    let mut moved = T::zero();
    for k in 1..n {
        let lo = phi[k - 1] + min_inc;
        if phi[k] < lo {
            moved += lo - phi[k];
            phi[k] = lo;
        }
    }
    for k in (1..n).rev() {
        let hi = phi[k + 1] - min_inc;
        if phi[k] > hi {
            moved += phi[k] - hi;
            phi[k] = hi;
        }
    }
    moved
}

fn inverse_params<T: Real>(phi: &[T], rule: Inversion, upsample: usize) -> Vec<T> {
    let n = phi.len() - 1;
    let grid = uniform_grid::<T>(n);
    match rule {
        Inversion::Linear => grid.iter().map(|&y| invert_uniform(phi, y)).collect(),
        Inversion::Bracket | Inversion::Nearest => {
            let big = T::from_count(upsample);
            let psi: Vec<T> = (0..=upsample)
                .map(|l| interp_uniform(phi, T::from_count(l) / big))
                .collect();
            let nearest = |y: T| {
                let mut best = 0;
                for (l, &v) in psi.iter().enumerate() {
                    if (v - y).abs() < (psi[best] - y).abs() {
                        best = l;
                    }
                }
                best
            };
            let step = T::from_count(n).recip();
            grid.iter()
                .map(|&y| {
                    let l = match rule {
                        Inversion::Bracket => psi
                            .iter()
                            .position(|&v| y <= v && v < y + step)
                            .unwrap_or_else(|| nearest(y)),
                        _ => nearest(y),
                    };
                    T::from_count(l) / big
                })
                .collect()
        }
    }
}

/// Horizontal part of the path `p`: the curves of `p` reparameterized along
/// the characteristics of `φ_s = m/|c_t| · φ_t` so that the vertical part of
/// the speed is removed.
pub fn horizontal_part_of_path<T: Real>(
    p: &CurvePath<T>,
    opts: &HorizontalOptions,
) -> Result<HorizontalPath<T>> {
    let n = p.n();
    let steps = p.steps();
    if n < 2 || steps < 1 {
        return Err(GeomError::TooFewSamples { needed: 3, found: n + 1 });
    }
    let upsample = opts.upsample.unwrap_or(10 * n).max(n);
    let nn = T::from_count(n);
    let ds = T::from_count(steps).recip();
    let min_inc = T::lit(opts.min_increment);
    let mut phi = uniform_grid::<T>(n);
    let mut repaired = T::zero();
    let mut curves = Vec::with_capacity(steps + 1);
    curves.push(p.start().clone());
    let mut params = uniform_grid::<T>(n);

    for j in 0..steps {
        let (base, w) = step_velocity(p, j)?;
        let frame = EdgeFrame::new(&base)?;
        let dec = decompose_in_frame(&frame, &w)?;
        // φ_s = m_k/|nτ_k| · φ_t; the rate below multiplies the upwind
        // difference quotient.
        let rate: Vec<T> = (0..=n)
            .map(|k| {
                if k == 0 || k == n {
                    T::zero()
                } else {
                    dec.m[k] / (nn * frame.edges[k].r)
                }
            })
            .collect();
        let fastest = rate.iter().fold(T::zero(), |a, r| a.max(r.abs()));
        let courant = fastest * nn * ds;
        let sub = (courant / T::lit(opts.courant)).ceil().to_usize().unwrap_or(1).max(1);
        let h = ds / T::from_count(sub);
        for _ in 0..sub {
            let old = phi.clone();
            for k in 1..n {
                let diff = if dec.m[k] >= T::zero() {
                    old[k + 1] - old[k]
                } else {
                    old[k] - old[k - 1]
                };
                phi[k] = old[k] + h * rate[k] * nn * diff;
            }
            repaired += repair(&mut phi, min_inc);
        }
        if repaired.to_f64_lossy() > opts.max_repair {
            return Err(GeomError::Monotonicity(format!(
                "repair moved {:.3e} of mass by step {}; use more path steps",
                repaired.to_f64_lossy(),
                j + 1
            )));
        }
        trace!("horizontal step {}: {} substeps, courant {:.3e}", j, sub, courant.to_f64_lossy());
        params = inverse_params(&phi, opts.inversion, upsample);
        let spline = ShapeSpline::new(&p.curves[j + 1])?;
        curves.push(spline.resample(&params)?);
    }
    let path = CurvePath::new(curves, None, PathKind::Horizontal)?;
    Ok(HorizontalPath { path, phi, params })
}

/// The curve `α` reparameterized as `α(φ(k/n))` through its shape spline.
pub fn reparameterize<T: Real>(curve: &DiscreteCurve<T>, phi: &[T]) -> Result<DiscreteCurve<T>> {
    ShapeSpline::new(curve)?.resample(phi)
}
