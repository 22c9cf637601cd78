use crate::curve::{path_length, CurvePath, DiscreteCurve, EdgeFrame};
use crate::error::{GeomError, Result};
use crate::geodesic::{geodesic_shoot, ShootOptions};
use crate::linalg::Vector;
use crate::scalar::Real;

use super::optimal::{max_ratio, Matching, StopReason};
use super::spline::ShapeSpline;

/// Dynamic-programming table over the grid of sample indices of both
/// curves. Cell `(i, j)` holds the cheapest cost of matching `α0[0..=i]`
/// onto `α1[0..=j]`.
#[derive(Clone, Debug)]
pub struct DpGrid<T> {
    /// Points per axis, `n + 1`.
    pub size: usize,
    /// Side of the lookback square.
    pub square: usize,
    pub cost: Vec<T>,
    pub back: Vec<Option<(usize, usize)>>,
}

impl<T: Real> DpGrid<T> {
    pub fn cost_at(&self, i: usize, j: usize) -> T {
        self.cost[i * self.size + j]
    }

    /// Optimal path from `(0, 0)` to `(n, n)`.
    pub fn path(&self) -> Vec<(usize, usize)> {
        let n = self.size - 1;
        let mut out = vec![(n, n)];
        let mut cur = (n, n);
        while let Some(prev) = self.back[cur.0 * self.size + cur.1] {
            out.push(prev);
            cur = prev;
        }
        out.reverse();
        out
    }

    /// `φ(k/n)` along the optimal path, linear between its vertices.
    pub fn phi(&self) -> Vec<T> {
        let path = self.path();
        let n = self.size - 1;
        let nn = T::from_count(n);
        let mut phi = Vec::with_capacity(n + 1);
        for w in path.windows(2) {
            let ((i0, j0), (i1, j1)) = (w[0], w[1]);
            let slope = T::from_count(j1 - j0) / T::from_count(i1 - i0);
            for k in i0..i1 {
                phi.push((T::from_count(j0) + T::from_count(k - i0) * slope) / nn);
            }
        }
        phi.push(T::one());
        phi
    }
}

/// SRV data of both curves, with the `α1` vectors carried to the base
/// points of `α0` in curved spaces.
struct SrvPair<T> {
    n: usize,
    q0: Vec<Vector<T>>,
    scale0: Vec<T>,
    /// `q1[b]` expressed at `α0`'s point `a`, indexed `a * n + b`.
    q1: Vec<Vector<T>>,
}

impl<T: Real> SrvPair<T> {
    fn new(alpha0: &DiscreteCurve<T>, alpha1: &DiscreteCurve<T>) -> Result<Self> {
        let (f0, f1) = (EdgeFrame::new(alpha0)?, EdgeFrame::new(alpha1)?);
        let n = alpha0.n();
        let m = alpha0.manifold();
        let mut q1 = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let q = &f1.edges[b].q;
                q1.push(if m.is_flat() {
                    q.clone()
                } else {
                    m.transport_raw(&alpha1.points()[b], &alpha0.points()[a], q)?
                });
            }
        }
        Ok(Self {
            n,
            q0: f0.edges.iter().map(|e| e.q.clone()).collect(),
            scale0: f0.edges.iter().map(|e| e.scale).collect(),
            q1,
        })
    }

    /// `∫ |q0(t) − √γ' q1(γ(t))|² dt` over `[i0/n, i1/n]` for the linear
    /// `γ` sending it onto `[j0/n, j1/n]`.
    fn segment(&self, i0: usize, j0: usize, i1: usize, j1: usize) -> T {
        let (di, dj) = (i1 - i0, j1 - j0);
        let root = (T::from_count(dj) / T::from_count(di)).sqrt();
        let scale = T::from_count(self.n).recip();
        // positions along the segment are measured in units of 1/(n·dj)
        let (mut a, mut b) = (i0, j0);
        let mut x = 0;
        let mut total = T::zero();
        while a < i1 {
            let end_a = (a + 1 - i0) * dj;
            let end_b = (b + 1 - j0) * di;
            let next = end_a.min(end_b);
            let mut diff = self.q0[a].clone();
            diff.axpy(-root, &self.q1[a * self.n + b]);
            total += self.scale0[a] * diff.norm_sq() * T::from_count(next - x) / T::from_count(dj);
            x = next;
            if end_a == next {
                a += 1;
            }
            if end_b == next {
                b += 1;
            }
        }
        total * scale
    }
}

/// Fills the dynamic-programming table. Each cell only looks back at
/// predecessors inside the `square × square` block at its lower left.
pub fn dp_grid<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    square: usize,
) -> Result<DpGrid<T>> {
    alpha0.check_compatible(alpha1)?;
    if square < 2 {
        return Err(GeomError::InvalidArgument("DP square side must be at least 2".into()));
    }
    let srv = SrvPair::new(alpha0, alpha1)?;
    let size = alpha0.n() + 1;
    let reach = square - 1;
    let mut cost = vec![T::infinity(); size * size];
    let mut back = vec![None; size * size];
    cost[0] = T::zero();
    for i in 1..size {
        for j in 1..size {
            let mut best = T::infinity();
            let mut arg = None;
            for pi in i.saturating_sub(reach)..i {
                for pj in j.saturating_sub(reach)..j {
                    let base = cost[pi * size + pj];
                    if !base.is_finite() {
                        continue;
                    }
                    let c = base + srv.segment(pi, pj, i, j);
                    if c < best {
                        best = c;
                        arg = Some((pi, pj));
                    }
                }
            }
            cost[i * size + j] = best;
            back[i * size + j] = arg;
        }
    }
    Ok(DpGrid {
        size,
        square,
        cost,
        back,
    })
}

/// Matching by dynamic programming over reparameterizations that are
/// piecewise linear on the sample grid, followed by the geodesic to the
/// resampled target.
pub fn dp_match<T: Real>(
    alpha0: &DiscreteCurve<T>,
    alpha1: &DiscreteCurve<T>,
    square: usize,
    shoot: &ShootOptions,
) -> Result<(CurvePath<T>, Matching<T>)> {
    let grid = dp_grid(alpha0, alpha1, square)?;
    let phi = grid.phi();
    let matched = ShapeSpline::new(alpha1)?.resample(&phi)?;
    let rep = geodesic_shoot(alpha0, &matched, shoot)?;
    let len = path_length(&rep.path)?.to_f64_lossy();
    let max_verticality = max_ratio(&rep.path)?;
    Ok((
        rep.path,
        Matching {
            phi,
            matched,
            iterations: 1,
            length_history: vec![len],
            horizontal_lengths: Vec::new(),
            stop: StopReason::SinglePass,
            max_verticality,
        },
    ))
}
