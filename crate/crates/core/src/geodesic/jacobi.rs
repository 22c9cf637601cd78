//! Jacobi fields along a discrete geodesic.
//!
//! A Jacobi field `J` is the variation of a one-parameter family of
//! geodesics. Its second covariant derivative `∇_s²J` at `x_0` comes from
//! varying the first geodesic equation, and at `x_{k+1}` from differentiating
//! twice the edge identity `J_{k+1}^∥ = f_k(J_k) + g_k(∇_a q_k)/n`.

use crate::curve::{CurvePath, CurveTangent, DiscreteCurve, PathKind};
use crate::error::{GeomError, Result};
use crate::linalg::{Lu, Vector};
use crate::manifold::ManifoldSpec;
use crate::scalar::Real;

use super::exp::{carry, integrate, GeodesicOptions, Integrator, Stage, StepTrace};
use super::kinematics::{curv, tangent_rate, EdgeKin, EdgeSecond, Kinematics};

/// `⟨w,ddv⟩v + 2⟨w,dv⟩dv + ⟨w,v⟩ddv`
#[inline]
fn tangent_rate2<T: Real>(ek: &EdgeKin<T>, ddv: &Vector<T>, w: &Vector<T>) -> Vector<T> {
    let e = &ek.e;
    let mut out = e.v.scaled(e.inner(w, ddv));
    out.axpy(T::lit(2.0) * e.inner(w, &ek.dv), &ek.dv);
    out.axpy(e.inner(w, &e.v), ddv);
    out
}

/// `∇_s² f_k (w)`
fn d2f<T: Real>(ek: &EdgeKin<T>, sec: &EdgeSecond<T>, w: &Vector<T>) -> Vector<T> {
    let e = &ek.e;
    let mut out = e.nor(w).scaled(sec.dda);
    out.axpy(-T::lit(2.0) * ek.da, &tangent_rate(e, &ek.dv, w));
    out.axpy(T::one() - e.coeffs.a, &tangent_rate2(ek, &sec.ddv, w));
    out
}

/// `∇_s² g_k (w)`
fn d2g<T: Real>(ek: &EdgeKin<T>, sec: &EdgeSecond<T>, w: &Vector<T>) -> Vector<T> {
    let e = &ek.e;
    let two = T::lit(2.0);
    let b = e.coeffs.b;
    let mut out = e.g(w).scaled(sec.drho);
    out.axpy(ek.rho, &ek.dg(w));
    out.axpy(ek.dqn * ek.db + e.qn * sec.ddb, &e.nor(w));
    out.axpy(e.qn * (two - b), &tangent_rate2(ek, &sec.ddv, w));
    out.axpy(ek.dqn * (two - b) - two * e.qn * ek.db, &tangent_rate(e, &ek.dv, w));
    out
}

/// Derivatives of the edge quantities in the direction of the variation.
struct Variation<T> {
    av: Vector<T>,
    aq: Vector<T>,
    arho: T,
    a_a: T,
    a_b: T,
    z: Vector<T>,
    /// `∇_s∇_a q_k`
    sa_q: Vector<T>,
    /// `∇_a R_k`
    a_r: Vector<T>,
    jp: Vector<T>,
    djp: Vector<T>,
}

impl<T: Real> Variation<T> {
    /// `∇_a f_k (w)`
    fn af(&self, ek: &EdgeKin<T>, w: &Vector<T>) -> Vector<T> {
        let e = &ek.e;
        let mut out = e.nor(w).scaled(self.a_a);
        out.axpy(T::one() - e.coeffs.a, &tangent_rate(e, &self.av, w));
        out
    }

    /// `∇_a g_k (w)`
    fn ag(&self, ek: &EdgeKin<T>, w: &Vector<T>) -> Vector<T> {
        let e = &ek.e;
        let mut out = e.g(w).scaled(self.arho);
        out.axpy(e.qn * self.a_b, &e.nor(w));
        out.axpy(e.qn * (T::lit(2.0) - e.coeffs.b), &tangent_rate(e, &self.av, w));
        out
    }
}

/// `∇_s² J` for the field `(J, ∇_s J)` along the curve described by `kin`.
pub(crate) fn jacobi_accel<T: Real>(
    kin: &Kinematics<T>,
    second: &[EdgeSecond<T>],
    j: &[Vector<T>],
    dj: &[Vector<T>],
) -> Vec<Vector<T>> {
    let n = kin.n();
    let nn = T::from_count(n);
    let inv_n = nn.recip();
    let (half, two) = (T::lit(0.5), T::lit(2.0));
    let kk = kin.k;
    let flat = kin.manifold.is_flat();
    let dim = j[0].len();
    let r = |ek: &EdgeKin<T>, a: &Vector<T>, b: &Vector<T>, z: &Vector<T>| curv(kk, &ek.e, a, b, z);

    let vars: Vec<Variation<T>> = kin
        .edges
        .iter()
        .enumerate()
        .map(|(k, ek)| {
            let e = &ek.e;
            let c = &e.coeffs;
            let atau = e.d_tau(&j[k], &j[k + 1]);
            let ar = e.inner(&atau, &e.v);
            let mut av = atau.clone();
            av.axpy(-ar, &e.v);
            let av = av.scaled(e.r.recip());
            let mut aq = atau.clone();
            aq.axpy(-half * ar, &e.v);
            let aq = aq.scaled((nn / e.r).sqrt());
            let arho = e.inner(&aq, &e.q) / (e.qn * e.qn);
            let jp = e.prev(&j[k + 1]);
            let djp = e.prev(&dj[k + 1]);

            let mut s = djp.clone();
            if !flat {
                s += r(ek, &ek.y, &e.tau, &jp);
            }
            s -= ek.df(&j[k]);
            s -= e.f(&dj[k]);
            let mut s = s.scaled(nn);
            s -= ek.dg(&aq);
            let sa_q = e.g_inv(&s);

            let (z, a_r) = if flat {
                (Vector::zeros(dim), Vector::zeros(dim))
            } else {
                let mut z = e.split(&j[k], T::one(), c.b);
                z += e.split(&atau, half, c.c);
                let xd = &kin.vel[k];
                let mut adq = sa_q.clone();
                adq += r(ek, &j[k], xd, &e.q);
                let mut a_r = r(ek, &aq, &ek.dq, xd);
                a_r += r(ek, &e.q, &adq, xd);
                a_r += r(ek, &e.q, &ek.dq, &dj[k]);
                (z, a_r)
            };
            Variation {
                av,
                aq,
                arho,
                a_a: c.da * ar,
                a_b: c.db * ar,
                z,
                sa_q,
                a_r,
                jp,
                djp,
            }
        })
        .collect();

    // Backward pass for ∇_a T_k and ∇_s²∇_a q_k.
    let mut ss_aq = vec![Vector::zeros(dim); n];
    let mut at_next = Vector::zeros(dim);
    if !flat {
        for k in (0..n).rev() {
            let ek = &kin.edges[k];
            let e = &ek.e;
            let va = &vars[k];
            let a_tp = if k + 1 < n {
                let mut t = e.prev(&at_next);
                t += r(ek, &va.z, &e.tau, &ek.tp);
                t
            } else {
                Vector::zeros(dim)
            };
            let mut at = va.a_r.clone();
            at += va.af(ek, &ek.tp);
            at += e.f(&a_tp);
            let mut ss = va.ag(ek, &ek.tp);
            ss += e.g(&a_tp);
            let mut ss = ss.scaled(-inv_n);
            let xd = &kin.vel[k];
            ss += r(ek, &kin.acc[k], &j[k], &e.q);
            ss += r(ek, xd, &dj[k], &e.q);
            ss.axpy(two, &r(ek, xd, &j[k], &ek.dq));
            ss_aq[k] = ss;
            at_next = at;
        }
    }

    let mut out = Vec::with_capacity(n + 1);
    let mut first = at_next.scaled(-inv_n);
    if !flat {
        first += r(&kin.edges[0], &kin.vel[0], &j[0], &kin.vel[0]);
    }
    out.push(first);
    for k in 0..n {
        let ek = &kin.edges[k];
        let e = &ek.e;
        let sec = &second[k];
        let va = &vars[k];
        let mut t = e.f(&out[k]);
        let mut h = e.g(&ss_aq[k]);
        h.axpy(two, &ek.dg(&va.sa_q));
        h += d2g(ek, sec, &va.aq);
        t.axpy(inv_n, &h);
        if !flat {
            t.axpy(two, &ek.df(&dj[k]));
            t += d2f(ek, sec, &j[k]);
            t.axpy(two, &r(ek, &e.tau, &ek.y, &va.djp));
            t += r(ek, &ek.dtau, &ek.y, &va.jp);
            t += r(ek, &e.tau, &sec.dy, &va.jp);
            let inner = r(ek, &ek.y, &e.tau, &va.jp);
            t -= r(ek, &ek.y, &e.tau, &inner);
        }
        out.push(e.next(&t));
    }
    out
}

fn stage_accel<T: Real>(stage: &Stage<T>, j: &[Vector<T>], dj: &[Vector<T>]) -> Vec<Vector<T>> {
    let m = stage.kin.manifold;
    let pts = &stage.kin.points;
    let js: Vec<_> = j
        .iter()
        .enumerate()
        .map(|(k, v)| m.project_tangent(&pts[k], &carry(&stage.to_stage, k, v)))
        .collect();
    let djs: Vec<_> = dj
        .iter()
        .enumerate()
        .map(|(k, v)| m.project_tangent(&pts[k], &carry(&stage.to_stage, k, v)))
        .collect();
    jacobi_accel(&stage.kin, &stage.second, &js, &djs)
        .iter()
        .enumerate()
        .map(|(k, a)| carry(&stage.to_base, k, a))
        .collect()
}

fn lincomb<T: Real>(terms: &[(T, &[Vector<T>])]) -> Vec<Vector<T>> {
    (0..terms[0].1.len())
        .map(|k| {
            let mut out = terms[0].1[k].scaled(terms[0].0);
            for (s, vs) in &terms[1..] {
                out.axpy(*s, &vs[k]);
            }
            out
        })
        .collect()
}

/// Linear map `(J(0), ∇_sJ(0)) ↦ (J(s), ∇_sJ(s))` along a recorded geodesic.
pub struct JacobiOperator<T> {
    manifold: ManifoldSpec,
    integrator: Integrator,
    steps: usize,
    traces: Vec<StepTrace<T>>,
    start: DiscreteCurve<T>,
    end: DiscreteCurve<T>,
}

impl<T: Real> JacobiOperator<T> {
    /// Integrates the geodesic from `(alpha0, w)` and records what the Jacobi
    /// equation needs along it.
    pub fn from_initial(
        alpha0: &DiscreteCurve<T>,
        w: &CurveTangent<T>,
        opts: &GeodesicOptions,
    ) -> Result<(CurvePath<T>, Self)> {
        let (path, traces) = integrate(alpha0, w, opts, true)?;
        let op = Self {
            manifold: alpha0.manifold(),
            integrator: opts.integrator,
            steps: opts.steps,
            traces,
            start: path.start().clone(),
            end: path.end().clone(),
        };
        Ok((path, op))
    }

    /// Rebuilds the operator for a geodesic path by integrating again from
    /// its first curve and velocity.
    pub fn new(geodesic: &CurvePath<T>, integrator: Integrator) -> Result<Self> {
        if geodesic.kind != PathKind::Geodesic {
            return Err(GeomError::NotGeodesic(geodesic.kind.as_str()));
        }
        let v0 = geodesic
            .velocities
            .as_ref()
            .map(|v| v[0].clone())
            .ok_or(GeomError::NotGeodesic("geodesic without velocities"))?;
        let opts = GeodesicOptions {
            steps: geodesic.steps(),
            integrator,
        };
        Ok(Self::from_initial(geodesic.start(), &v0, &opts)?.1)
    }

    pub fn start(&self) -> &DiscreteCurve<T> {
        &self.start
    }

    pub fn end(&self) -> &DiscreteCurve<T> {
        &self.end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn step(&self, tr: &StepTrace<T>, j: &[Vector<T>], dj: &[Vector<T>]) -> (Vec<Vector<T>>, Vec<Vector<T>>) {
        let h = T::from_count(self.steps).recip();
        let one = T::one();
        let a1 = stage_accel(&tr.stages[0], j, dj);
        let (jn, djn) = match self.integrator {
            Integrator::Euler => (lincomb(&[(one, j), (h, dj)]), lincomb(&[(one, dj), (h, &a1)])),
            Integrator::Rk4 => {
                let hh = h * T::lit(0.5);
                let sixth = h / T::lit(6.0);
                let third = sixth + sixth;
                let d2 = lincomb(&[(one, dj), (hh, &a1)]);
                let a2 = stage_accel(&tr.stages[1], &lincomb(&[(one, j), (hh, dj)]), &d2);
                let d3 = lincomb(&[(one, dj), (hh, &a2)]);
                let a3 = stage_accel(&tr.stages[2], &lincomb(&[(one, j), (hh, &d2)]), &d3);
                let d4 = lincomb(&[(one, dj), (h, &a3)]);
                let a4 = stage_accel(&tr.stages[3], &lincomb(&[(one, j), (h, &d3)]), &d4);
                (
                    lincomb(&[(one, j), (sixth, dj), (third, &d2), (third, &d3), (sixth, &d4)]),
                    lincomb(&[(one, dj), (sixth, &a1), (third, &a2), (third, &a3), (sixth, &a4)]),
                )
            }
        };
        (
            jn.iter().enumerate().map(|(k, v)| carry(&tr.to_next, k, v)).collect(),
            djn.iter().enumerate().map(|(k, v)| carry(&tr.to_next, k, v)).collect(),
        )
    }

    /// `J` at every sample `s_j`, plus `∇_sJ` at `s = 1`.
    pub fn propagate_samples(
        &self,
        j0: &CurveTangent<T>,
        dj0: &CurveTangent<T>,
    ) -> Result<(Vec<CurveTangent<T>>, CurveTangent<T>)> {
        self.start.check_tangent(j0)?;
        self.start.check_tangent(dj0)?;
        let m = self.manifold;
        let pts = self.start.points();
        let mut j: Vec<_> = j0.vecs.iter().zip(pts).map(|(v, x)| m.project_tangent(x, v)).collect();
        let mut dj: Vec<_> = dj0.vecs.iter().zip(pts).map(|(v, x)| m.project_tangent(x, v)).collect();
        let mut samples = vec![CurveTangent { vecs: j.clone() }];
        for tr in &self.traces {
            let (a, b) = self.step(tr, &j, &dj);
            j = a;
            dj = b;
            samples.push(CurveTangent { vecs: j.clone() });
        }
        Ok((samples, CurveTangent { vecs: dj }))
    }

    /// `(J(1), ∇_sJ(1))`
    pub fn propagate(&self, j0: &CurveTangent<T>, dj0: &CurveTangent<T>) -> Result<(CurveTangent<T>, CurveTangent<T>)> {
        let (mut samples, dj) = self.propagate_samples(j0, dj0)?;
        Ok((samples.pop().expect("at least the initial sample"), dj))
    }

    /// Factors the map `∇_sJ(0) ↦ J(1)` with `J(0) = 0` in orthonormal
    /// tangent bases.
    pub fn inverse(&self) -> Result<JacobiInverse<T>> {
        let m = self.manifold;
        let d = m.intrinsic_dim();
        let np = self.start.points().len();
        let size = np * d;
        let start_bases: Vec<Vec<Vector<T>>> = self.start.points().iter().map(|x| m.tangent_basis(x)).collect();
        let end_bases: Vec<Vec<Vector<T>>> = self.end.points().iter().map(|x| m.tangent_basis(x)).collect();
        let zero = self.start.zero_tangent();
        let mut a = vec![T::zero(); size * size];
        for k in 0..np {
            for (i, e) in start_bases[k].iter().enumerate() {
                let mut dj0 = zero.clone();
                dj0.vecs[k] = e.clone();
                let (j1, _) = self.propagate(&zero, &dj0)?;
                let col = k * d + i;
                for (l, x) in self.end.points().iter().enumerate() {
                    for (r, b) in end_bases[l].iter().enumerate() {
                        a[(l * d + r) * size + col] = m.inner_raw(x, &j1.vecs[l], b);
                    }
                }
            }
        }
        let lu = Lu::factor(a, size)?;
        let cond = lu.condition_estimate();
        if !(cond.to_f64_lossy() < 1e14) {
            return Err(GeomError::Singular {
                cond: cond.to_f64_lossy(),
            });
        }
        Ok(JacobiInverse {
            manifold: m,
            lu,
            start_bases,
            end: self.end.clone(),
            end_bases,
        })
    }
}

/// Factored inverse of `∇_sJ(0) ↦ J(1)`.
pub struct JacobiInverse<T> {
    manifold: ManifoldSpec,
    lu: Lu<T>,
    start_bases: Vec<Vec<Vector<T>>>,
    end: DiscreteCurve<T>,
    end_bases: Vec<Vec<Vector<T>>>,
}

impl<T: Real> JacobiInverse<T> {
    /// Curve at `s = 1` the targets are based on.
    pub fn end(&self) -> &DiscreteCurve<T> {
        &self.end
    }

    pub fn condition_estimate(&self) -> T {
        self.lu.condition_estimate()
    }

    /// Initial derivative `∇_sJ(0)` whose field reaches `target` at `s = 1`.
    pub fn solve(&self, target: &CurveTangent<T>) -> Result<CurveTangent<T>> {
        self.end.check_tangent(target)?;
        let m = self.manifold;
        let d = m.intrinsic_dim();
        let mut b = Vec::with_capacity(self.end_bases.len() * d);
        for (l, x) in self.end.points().iter().enumerate() {
            for e in &self.end_bases[l] {
                b.push(m.inner_raw(x, &target.vecs[l], e));
            }
        }
        let c = self.lu.solve(&b);
        let vecs = self
            .start_bases
            .iter()
            .enumerate()
            .map(|(k, basis)| {
                let mut v = Vector::zeros(m.coord_dim());
                for (i, e) in basis.iter().enumerate() {
                    v.axpy(c[k * d + i], e);
                }
                v
            })
            .collect();
        Ok(CurveTangent { vecs })
    }
}

/// `(J(1), ∇_sJ(1))` for the Jacobi field along `geodesic` with the given
/// initial conditions.
pub fn jacobi_propagate<T: Real>(
    geodesic: &CurvePath<T>,
    j0: &CurveTangent<T>,
    dj0: &CurveTangent<T>,
) -> Result<(CurveTangent<T>, CurveTangent<T>)> {
    JacobiOperator::new(geodesic, Integrator::default())?.propagate(j0, dj0)
}

/// `∇_sJ(0)` such that the Jacobi field with `J(0) = 0` ends at `target`.
pub fn jacobi_inverse<T: Real>(geodesic: &CurvePath<T>, target: &CurveTangent<T>) -> Result<CurveTangent<T>> {
    JacobiOperator::new(geodesic, Integrator::default())?.inverse()?.solve(target)
}
