//! First and second covariant derivatives of the per-edge quantities along
//! a path of discrete curves, and the geodesic acceleration they imply.

use crate::curve::{Edge, EdgeFrame};
use crate::error::{GeomError, Result};
use crate::linalg::Vector;
use crate::manifold::ManifoldSpec;
use crate::scalar::Real;

/// `R(a,b)z = K(⟨b,z⟩a − ⟨a,z⟩b)` with the metric of `e`'s base point.
#[inline]
pub(crate) fn curv<T: Real>(k: T, e: &Edge<T>, a: &Vector<T>, b: &Vector<T>, z: &Vector<T>) -> Vector<T> {
    let mut out = a.scaled(k * e.inner(b, z));
    out.axpy(-k * e.inner(a, z), b);
    out
}

/// `⟨w,dv⟩v + ⟨w,v⟩dv`, the derivative of `w ↦ w^T` when `v` moves by `dv`.
#[inline]
pub(crate) fn tangent_rate<T: Real>(e: &Edge<T>, dv: &Vector<T>, w: &Vector<T>) -> Vector<T> {
    let mut out = e.v.scaled(e.inner(w, dv));
    out.axpy(e.inner(w, &e.v), dv);
    out
}

/// Quantities of one edge along a moving curve.
#[derive(Clone, Debug)]
pub struct EdgeKin<T> {
    pub e: Edge<T>,
    /// `∇_s τ_k = (D_τ α')_k`
    pub dtau: Vector<T>,
    pub dq: Vector<T>,
    pub dv: Vector<T>,
    /// `∂_s|τ_k|`
    pub dr: T,
    /// `∂_s|q_k|`
    pub dqn: T,
    /// `∂_s|q_k| / |q_k|`
    pub rho: T,
    pub da: T,
    pub db: T,
    pub dc: T,
    pub y: Vector<T>,
    pub ddq: Vector<T>,
    /// Suffix sum `T_{k+1}` transported back to `x_k` (zero on the last edge).
    pub tp: Vector<T>,
}

impl<T: Real> EdgeKin<T> {
    fn new(e: Edge<T>, xk: &Vector<T>, xk1: &Vector<T>, n: usize) -> Self {
        let dtau = e.d_tau(xk, xk1);
        let nn = T::from_count(n);
        let half = T::lit(0.5);
        let t = e.inner(&dtau, &e.v);
        let dr = t;
        let mut dv = dtau.clone();
        dv.axpy(-t, &e.v);
        let dv = dv.scaled(e.r.recip());
        let mut dq = dtau.clone();
        dq.axpy(-half * t, &e.v);
        let dq = dq.scaled((nn / e.r).sqrt());
        let dqn = e.inner(&dq, &e.q) / e.qn;
        let rho = dqn / e.qn;
        let c = &e.coeffs;
        let (da, db, dcoef) = (c.da * dr, c.db * dr, c.dc * dr);
        // Y = x'^T + b x'^N + ½∇τ^T + c∇τ^N
        let mut y = e.split(xk, T::one(), c.b);
        y += e.split(&dtau, half, c.c);
        let zero = Vector::zeros(xk.len());
        Self {
            e,
            dtau,
            dq,
            dv,
            dr,
            dqn,
            rho,
            da,
            db,
            dc: dcoef,
            y,
            ddq: zero.clone(),
            tp: zero,
        }
    }

    /// `∇_s f_k (w)`
    #[inline]
    pub fn df(&self, w: &Vector<T>) -> Vector<T> {
        if self.e.flat {
            return Vector::zeros(w.len());
        }
        let mut out = self.e.nor(w).scaled(self.da);
        out.axpy(T::one() - self.e.coeffs.a, &tangent_rate(&self.e, &self.dv, w));
        out
    }

    /// `∇_s g_k (w)`
    #[inline]
    pub fn dg(&self, w: &Vector<T>) -> Vector<T> {
        let e = &self.e;
        let mut out = e.g(w).scaled(self.rho);
        if self.db != T::zero() {
            out.axpy(e.qn * self.db, &e.nor(w));
        }
        out.axpy(e.qn * (T::lit(2.0) - e.coeffs.b), &tangent_rate(e, &self.dv, w));
        out
    }
}

/// Second-order quantities of one edge, needed for Jacobi fields.
#[derive(Clone, Debug)]
pub struct EdgeSecond<T> {
    pub ddv: Vector<T>,
    pub ddtau: Vector<T>,
    /// `∇_s Y_k`
    pub dy: Vector<T>,
    pub ddqn: T,
    pub drho: T,
    pub dda: T,
    pub ddb: T,
}

/// Kinematic state of a discrete curve moving with velocity `α'`.
#[derive(Clone, Debug)]
pub struct Kinematics<T> {
    pub manifold: ManifoldSpec,
    pub k: T,
    pub points: Vec<Vector<T>>,
    pub vel: Vec<Vector<T>>,
    /// `∇_s x_k'`
    pub acc: Vec<Vector<T>>,
    pub edges: Vec<EdgeKin<T>>,
    /// `R_k = R(q_k, ∇_s q_k) x_k'`
    pub curvature_terms: Vec<Vector<T>>,
}

impl<T: Real> Kinematics<T> {
    /// Builds the edge derivatives and solves the geodesic equations for
    /// the acceleration.
    pub fn new(manifold: ManifoldSpec, points: Vec<Vector<T>>, vel: Vec<Vector<T>>) -> Result<Self> {
        let n = points.len() - 1;
        let kk = T::from_i32(manifold.curvature()).unwrap_or_else(T::zero);
        let mut edges = Vec::with_capacity(n);
        for k in 0..n {
            let e = Edge::new(manifold, &points[k], &points[k + 1], n)?;
            if e.degenerate {
                return Err(GeomError::DegenerateEdge { index: k });
            }
            edges.push(EdgeKin::new(e, &vel[k], &vel[k + 1], n));
        }
        let mut kin = Self {
            manifold,
            k: kk,
            points,
            vel,
            acc: Vec::new(),
            edges,
            curvature_terms: Vec::new(),
        };
        kin.solve_acceleration();
        Ok(kin)
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    fn solve_acceleration(&mut self) {
        let n = self.n();
        let nn = T::from_count(n);
        let inv_n = nn.recip();
        let dim = self.points[0].len();
        let flat = self.manifold.is_flat();

        self.curvature_terms = if flat {
            vec![Vector::zeros(dim); n]
        } else {
            self.edges
                .iter()
                .zip(self.vel.iter())
                .map(|(ek, xd)| curv(self.k, &ek.e, &ek.e.q, &ek.dq, xd))
                .collect()
        };

        // Backward suffix sums T_k = R_k + f_k(T_{k+1}^∥).
        let mut t_next = Vector::zeros(dim);
        for k in (0..n).rev() {
            let ek = &mut self.edges[k];
            let tp = if k + 1 < n { ek.e.prev(&t_next) } else { Vector::zeros(dim) };
            ek.ddq = ek.e.g(&tp).scaled(-inv_n);
            let mut t = ek.e.f(&tp);
            t += &self.curvature_terms[k];
            ek.tp = tp;
            t_next = t;
        }

        let mut acc = Vec::with_capacity(n + 1);
        acc.push(t_next.scaled(-inv_n));
        for k in 0..n {
            let ek = &self.edges[k];
            let e = &ek.e;
            let mut a = ek.df(&self.vel[k]);
            a += e.f(&acc[k]);
            let mut h = ek.dg(&ek.dq);
            h += e.g(&ek.ddq);
            a.axpy(inv_n, &h);
            if !flat {
                let xp = e.prev(&self.vel[k + 1]);
                a += curv(self.k, e, &e.tau, &ek.y, &xp);
            }
            acc.push(e.next(&a));
        }
        self.acc = acc;
    }

    /// Second covariant derivatives of the edge quantities.
    pub fn second_order(&self) -> Vec<EdgeSecond<T>> {
        let n = self.n();
        let nn = T::from_count(n);
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        self.edges
            .iter()
            .enumerate()
            .map(|(k, ek)| {
                let e = &ek.e;
                let c = &e.coeffs;
                let ddqn = (e.inner(&ek.ddq, &e.q) + e.norm_sq(&ek.dq) - ek.dqn * ek.dqn) / e.qn;
                let ddr = two * (ek.dqn * ek.dqn + e.qn * ddqn) / nn;
                let dda = c.dda * ek.dr * ek.dr + c.da * ddr;
                let ddb = c.ddb * ek.dr * ek.dr + c.db * ddr;
                let drho = ddqn / e.qn - ek.rho * ek.rho;
                let mut ddtau = e.q.scaled(ddqn);
                ddtau.axpy(two * ek.dqn, &ek.dq);
                ddtau.axpy(e.qn, &ek.ddq);
                let ddtau = ddtau.scaled(nn.recip());
                let mut ddv = ek.ddq.clone();
                ddv.axpy(-ddqn, &e.v);
                ddv.axpy(-two * ek.dqn, &ek.dv);
                let ddv = ddv.scaled(e.qn.recip());

                let xd = &self.vel[k];
                let acc = &self.acc[k];
                let mut dy = e.split(acc, T::one(), c.b);
                dy.axpy(ek.db, &e.nor(xd));
                dy.axpy(T::one() - c.b, &tangent_rate(e, &ek.dv, xd));
                dy += e.split(&ddtau, half, c.c);
                dy.axpy(ek.dc, &e.nor(&ek.dtau));
                dy.axpy(half - c.c, &tangent_rate(e, &ek.dv, &ek.dtau));
                EdgeSecond {
                    ddv,
                    ddtau,
                    dy,
                    ddqn,
                    drho,
                    dda,
                    ddb,
                }
            })
            .collect()
    }
}

/// `R(q_k, ∇_s q_k) x_k'` for every edge of a curve moving with `velocity`.
pub fn curvature_terms<T: Real>(
    curve: &crate::curve::DiscreteCurve<T>,
    velocity: &crate::curve::CurveTangent<T>,
) -> Result<Vec<Vector<T>>> {
    curve.check_tangent(velocity)?;
    let frame = EdgeFrame::new(curve)?;
    frame.require_regular()?;
    Ok(Kinematics::new(curve.manifold(), curve.points().to_vec(), velocity.vecs.clone())?.curvature_terms)
}

/// Covariant acceleration `(∇_s x_k')_k` of the geodesic through `curve`
/// with initial velocity `velocity`.
pub fn geodesic_accel<T: Real>(
    curve: &crate::curve::DiscreteCurve<T>,
    velocity: &crate::curve::CurveTangent<T>,
) -> Result<crate::curve::CurveTangent<T>> {
    curve.check_tangent(velocity)?;
    let kin = Kinematics::new(curve.manifold(), curve.points().to_vec(), velocity.vecs.clone())?;
    Ok(crate::curve::CurveTangent { vecs: kin.acc })
}
