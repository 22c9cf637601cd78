use crate::curve::{CurvePath, CurveTangent, DiscreteCurve, EdgeFrame};
use crate::error::{GeomError, Result};
use crate::linalg::{solve_tridiagonal, Vector};
use crate::scalar::Real;

/// Splitting `w = m·v + (w − m·v)` of a tangent vector into its vertical
/// and horizontal parts.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalDecomposition<T> {
    /// Coefficients along the unit edge directions; `m_0 = m_n = 0`.
    pub m: Vec<T>,
    pub ver: CurveTangent<T>,
    pub hor: CurveTangent<T>,
    /// Max-norm residual of the tridiagonal system, relative to its data.
    pub residual: T,
}

/// Coefficients of the three-term recurrence `A_k m_{k+1} + B_k m_k +
/// C_k m_{k−1} = D_k` for the interior points `k = 1..n−1`.
pub(crate) struct Recurrence<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
    pub rhs: Vec<T>,
}

pub(crate) fn recurrence<T: Real>(frame: &EdgeFrame<T>, w: &[Vector<T>]) -> Recurrence<T> {
    let n = frame.n();
    let dw = frame.d_tau(w);
    let quarter = T::lit(0.25);
    let four = T::lit(4.0);
    let mut out = Recurrence {
        lower: Vec::with_capacity(n - 1),
        diag: Vec::with_capacity(n - 1),
        upper: Vec::with_capacity(n - 1),
        rhs: Vec::with_capacity(n - 1),
    };
    for k in 1..n {
        let (ep, ek) = (&frame.edges[k - 1], &frame.edges[k]);
        let rho = ek.r / ep.r;
        let lp = frame.lambdas[k - 1];
        let lk = if k + 1 < n { frame.lambdas[k] } else { T::zero() };
        let binv = ep.coeffs.b.recip();
        let binv2 = binv * binv;
        let vk_par = ep.prev(&ek.v);
        out.upper.push(lk);
        out.diag.push(-T::one() - four * rho * (binv2 + lp * lp * (quarter - binv2)));
        out.lower.push(rho * lp);
        let prev = binv * ep.inner(&dw[k - 1], &vk_par)
            + (quarter - binv) * lp * ep.inner(&dw[k - 1], &ep.v);
        out.rhs.push(ek.inner(&dw[k], &ek.v) - four * rho * prev);
    }
    out
}

fn residual<T: Real>(r: &Recurrence<T>, m: &[T]) -> T {
    let len = r.diag.len();
    let mut worst = T::zero();
    let mut size = T::zero();
    for i in 0..len {
        let mut lhs = r.diag[i] * m[i];
        if i > 0 {
            lhs += r.lower[i] * m[i - 1];
        }
        if i + 1 < len {
            lhs += r.upper[i] * m[i + 1];
        }
        worst = worst.max((lhs - r.rhs[i]).abs());
        size = size.max(r.rhs[i].abs()).max(r.diag[i].abs() * m[i].abs());
    }
    if size > T::zero() {
        worst / size
    } else {
        worst
    }
}

/// Unit edge directions `v_k`, with a zero vector at the last point.
fn directions<T: Real>(frame: &EdgeFrame<T>, dim: usize) -> Vec<Vector<T>> {
    let mut v: Vec<Vector<T>> = frame.edges.iter().map(|e| e.v.clone()).collect();
    v.push(Vector::zeros(dim));
    v
}

pub(crate) fn decompose_in_frame<T: Real>(
    frame: &EdgeFrame<T>,
    w: &CurveTangent<T>,
) -> Result<VerticalDecomposition<T>> {
    let n = frame.n();
    if n < 2 {
        return Err(GeomError::TooFewSamples { needed: 3, found: n + 1 });
    }
    frame.require_regular()?;
    let rec = recurrence(frame, &w.vecs);
    let inner = solve_tridiagonal(&rec.lower, &rec.diag, &rec.upper, &rec.rhs)?;
    let residual = residual(&rec, &inner);
    let mut m = Vec::with_capacity(n + 1);
    m.push(T::zero());
    m.extend(inner);
    m.push(T::zero());
    let dim = w.vecs[0].len();
    let v = directions(frame, dim);
    let ver = CurveTangent {
        vecs: v.iter().zip(&m).map(|(v, &mk)| v.scaled(mk)).collect(),
    };
    let hor = w.sub(&ver);
    Ok(VerticalDecomposition { m, ver, hor, residual })
}

/// Vertical/horizontal decomposition of `w ∈ T_α`.
pub fn decompose_tangent<T: Real>(
    curve: &DiscreteCurve<T>,
    w: &CurveTangent<T>,
) -> Result<VerticalDecomposition<T>> {
    curve.check_tangent(w)?;
    decompose_in_frame(&EdgeFrame::new(curve)?, w)
}

/// Ratio `‖α'^ver‖ / ‖α'^hor‖` along a path, at the nodes when velocities
/// are stored and at step midpoints otherwise. A vanishing horizontal part
/// gives `+∞`.
pub fn verticality_ratio<T: Real>(p: &CurvePath<T>) -> Result<Vec<T>> {
    let samples: Vec<(DiscreteCurve<T>, CurveTangent<T>)> = match &p.velocities {
        Some(vs) => p.curves.iter().cloned().zip(vs.iter().cloned()).collect(),
        None => p.finite_difference_velocities()?,
    };
    samples
        .iter()
        .map(|(c, w)| {
            let frame = EdgeFrame::new(c)?;
            let d = decompose_in_frame(&frame, w)?;
            let ver = frame.metric(&d.ver.vecs, &d.ver.vecs).max(T::zero()).sqrt();
            let hor = frame.metric(&d.hor.vecs, &d.hor.vecs).max(T::zero()).sqrt();
            let full = frame.metric(&w.vecs, &w.vecs).max(T::zero()).sqrt();
            Ok(if ver == T::zero() {
                T::zero()
            } else if hor <= T::epsilon().sqrt() * full {
                T::infinity()
            } else {
                ver / hor
            })
        })
        .collect()
}
