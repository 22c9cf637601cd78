use crate::error::{GeomError, Result};
use crate::linalg::{LinearMap, Vector};
use crate::manifold::{EdgeCoefficients, ManifoldSpec};
use crate::scalar::Real;

use super::{CurveTangent, DiscreteCurve};

/// Cached geometry of the edge `x_k → x_{k+1}`.
#[derive(Clone, Debug)]
pub struct Edge<T> {
    /// `log_{x_k} x_{k+1}`
    pub tau: Vector<T>,
    /// `|τ_k|`
    pub r: T,
    pub v: Vector<T>,
    /// `√n τ_k / √|τ_k|`
    pub q: Vector<T>,
    /// `|q_k|`
    pub qn: T,
    pub coeffs: EdgeCoefficients<T>,
    /// Conformal factor of the metric at `x_k`.
    pub scale: T,
    /// Parallel transport `T_{x_{k+1}} → T_{x_k}`.
    pub to_prev: LinearMap<T>,
    /// Parallel transport `T_{x_k} → T_{x_{k+1}}`.
    pub to_next: LinearMap<T>,
    pub flat: bool,
    pub degenerate: bool,
}

impl<T: Real> Edge<T> {
    pub fn new(m: ManifoldSpec, x: &Vector<T>, y: &Vector<T>, n: usize) -> Result<Self> {
        let tau = m.log_raw(x, y)?;
        let scale = m.inner_raw(x, &Vector::basis(x.len(), 0), &Vector::basis(x.len(), 0));
        let r = (scale * tau.norm_sq()).sqrt();
        let flat = m.is_flat();
        let (to_prev, to_next) = if flat {
            (LinearMap::identity(x.len()), LinearMap::identity(x.len()))
        } else {
            (m.transport_map(y, x)?, m.transport_map(x, y)?)
        };
        let coeffs = EdgeCoefficients::new(r, m.curvature());
        if r == T::zero() {
            let z = Vector::zeros(x.len());
            return Ok(Self {
                tau,
                r,
                v: z.clone(),
                q: z,
                qn: T::zero(),
                coeffs,
                scale,
                to_prev,
                to_next,
                flat,
                degenerate: true,
            });
        }
        let nn = T::from_count(n);
        let v = tau.scaled(r.recip());
        let q = tau.scaled(nn.sqrt() / r.sqrt());
        let qn = (nn * r).sqrt();
        Ok(Self {
            tau,
            r,
            v,
            q,
            qn,
            coeffs,
            scale,
            to_prev,
            to_next,
            flat,
            degenerate: false,
        })
    }

    #[inline]
    pub fn inner(&self, u: &Vector<T>, w: &Vector<T>) -> T {
        self.scale * u.dot(w)
    }

    #[inline]
    pub fn norm_sq(&self, u: &Vector<T>) -> T {
        self.scale * u.norm_sq()
    }

    /// Tangential component `⟨w,v⟩v`.
    #[inline]
    pub fn tan(&self, w: &Vector<T>) -> Vector<T> {
        self.v.scaled(self.inner(w, &self.v))
    }

    /// Normal component `w − ⟨w,v⟩v`.
    #[inline]
    pub fn nor(&self, w: &Vector<T>) -> Vector<T> {
        let mut out = w.clone();
        out.axpy(-self.inner(w, &self.v), &self.v);
        out
    }

    /// `αw^T + βw^N`
    #[inline]
    pub fn split(&self, w: &Vector<T>, alpha: T, beta: T) -> Vector<T> {
        let c = self.inner(w, &self.v);
        let mut out = w.scaled(beta);
        out.axpy(c * (alpha - beta), &self.v);
        out
    }

    /// `f(w) = w^T + a w^N`
    #[inline]
    pub fn f(&self, w: &Vector<T>) -> Vector<T> {
        if self.flat {
            return w.clone();
        }
        self.split(w, T::one(), self.coeffs.a)
    }

    /// `g(w) = |q|(2w^T + b w^N)`
    #[inline]
    pub fn g(&self, w: &Vector<T>) -> Vector<T> {
        let two = T::lit(2.0);
        self.split(w, two * self.qn, self.qn * self.coeffs.b)
    }

    /// Inverse of [`Edge::g`].
    #[inline]
    pub fn g_inv(&self, w: &Vector<T>) -> Vector<T> {
        let h = T::lit(0.5);
        self.split(w, h / self.qn, (self.qn * self.coeffs.b).recip())
    }

    /// Transport from `x_{k+1}` back to `x_k`.
    #[inline]
    pub fn prev(&self, w: &Vector<T>) -> Vector<T> {
        if self.flat {
            w.clone()
        } else {
            self.to_prev.apply(w)
        }
    }

    /// Transport from `x_k` to `x_{k+1}`.
    #[inline]
    pub fn next(&self, w: &Vector<T>) -> Vector<T> {
        if self.flat {
            w.clone()
        } else {
            self.to_next.apply(w)
        }
    }

    /// `(D_τ w)_k` from `w_k` and `w_{k+1}`.
    #[inline]
    pub fn d_tau(&self, wk: &Vector<T>, wk1: &Vector<T>) -> Vector<T> {
        if self.flat {
            return wk1 - wk;
        }
        let wp = self.prev(wk1);
        let diff = &wp - wk;
        let mut lin = wp;
        lin.axpy(-self.coeffs.a, wk);
        let mut out = self.tan(&diff);
        out.axpy(self.coeffs.b.recip(), &self.nor(&lin));
        out
    }
}

/// Per-edge cache for one discrete curve.
#[derive(Clone, Debug)]
pub struct EdgeFrame<T> {
    pub manifold: ManifoldSpec,
    pub edges: Vec<Edge<T>>,
    /// Conformal factor of the metric at each point.
    pub scales: Vec<T>,
    /// `λ_k = ⟨v_{k+1}^∥, v_k⟩`, one per interior point.
    pub lambdas: Vec<T>,
}

impl<T: Real> EdgeFrame<T> {
    pub fn new(curve: &DiscreteCurve<T>) -> Result<Self> {
        let m = curve.manifold();
        let pts = curve.points();
        let n = curve.n();
        let edges = (0..n)
            .map(|k| Edge::new(m, &pts[k], &pts[k + 1], n))
            .collect::<Result<Vec<_>>>()?;
        let scales = pts
            .iter()
            .map(|x| m.inner_raw(x, &Vector::basis(x.len(), 0), &Vector::basis(x.len(), 0)))
            .collect();
        let lambdas = (0..n.saturating_sub(1))
            .map(|k| {
                let e = &edges[k];
                e.inner(&e.prev(&edges[k + 1].v), &e.v)
            })
            .collect();
        Ok(Self {
            manifold: m,
            edges,
            scales,
            lambdas,
        })
    }

    pub fn n(&self) -> usize {
        self.edges.len()
    }

    pub fn require_regular(&self) -> Result<()> {
        match self.edges.iter().position(|e| e.degenerate) {
            Some(index) => Err(GeomError::DegenerateEdge { index }),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn inner_at(&self, k: usize, u: &Vector<T>, w: &Vector<T>) -> T {
        self.scales[k] * u.dot(w)
    }

    /// `D_τ w`, padded with a zero vector at index `n`.
    pub fn d_tau(&self, w: &[Vector<T>]) -> Vec<Vector<T>> {
        let n = self.n();
        let mut out: Vec<Vector<T>> = (0..n).map(|k| self.edges[k].d_tau(&w[k], &w[k + 1])).collect();
        out.push(Vector::zeros(w[n].len()));
        out
    }

    /// Bilinear form `G^n(w, z)` from precomputed `D_τ` images.
    pub fn metric_from_dtau(
        &self,
        w0: &Vector<T>,
        z0: &Vector<T>,
        dw: &[Vector<T>],
        dz: &[Vector<T>],
    ) -> T {
        let quarter = T::lit(0.25);
        let mut total = self.inner_at(0, w0, z0);
        for (k, e) in self.edges.iter().enumerate() {
            let (tw, tz) = (e.inner(&dw[k], &e.v), e.inner(&dz[k], &e.v));
            let full = e.inner(&dw[k], &dz[k]);
            // ⟨Dw^N, Dz^N⟩ + ¼⟨Dw^T, Dz^T⟩
            total += (full - tw * tz + quarter * tw * tz) / e.r;
        }
        total
    }

    pub fn metric(&self, w: &[Vector<T>], z: &[Vector<T>]) -> T {
        let dw = self.d_tau(w);
        let dz = self.d_tau(z);
        self.metric_from_dtau(&w[0], &z[0], &dw, &dz)
    }
}

/// `D_τ w` on a curve. Entry `n` is zero.
pub fn d_tau<T: Real>(curve: &DiscreteCurve<T>, w: &CurveTangent<T>) -> Result<CurveTangent<T>> {
    curve.check_tangent(w)?;
    let frame = EdgeFrame::new(curve)?;
    frame.require_regular()?;
    Ok(CurveTangent {
        vecs: frame.d_tau(&w.vecs),
    })
}

/// The discrete elastic metric `G^n_α(w, z)`.
pub fn metric_gn<T: Real>(
    curve: &DiscreteCurve<T>,
    w: &CurveTangent<T>,
    z: &CurveTangent<T>,
) -> Result<T> {
    curve.check_tangent(w)?;
    curve.check_tangent(z)?;
    let frame = EdgeFrame::new(curve)?;
    frame.require_regular()?;
    Ok(frame.metric(&w.vecs, &z.vecs))
}

/// `‖w‖_{G^n}`
pub fn metric_norm<T: Real>(curve: &DiscreteCurve<T>, w: &CurveTangent<T>) -> Result<T> {
    Ok(metric_gn(curve, w, w)?.max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    fn v(xs: &[f64]) -> Vector<f64> {
        Vector::from_slice(xs)
    }

    fn seg() -> DiscreteCurve<f64> {
        DiscreteCurve::new(ManifoldSpec::Euclidean(2), vec![v(&[0.0, 0.0]), v(&[1.0, 0.0])]).unwrap()
    }

    #[test]
    fn edge_frame_examples() {
        let f = seg().edge_frame().unwrap();
        let e = &f.edges[0];
        assert_eq!(e.tau.as_slice(), &[1.0, 0.0]);
        assert_eq!(e.v.as_slice(), &[1.0, 0.0]);
        assert_eq!(e.q.as_slice(), &[1.0, 0.0]);
        assert_eq!((e.coeffs.a, e.coeffs.b), (1.0, 1.0));

        let s = DiscreteCurve::new(ManifoldSpec::Sphere2, vec![v(&[0.0, 0.0, 1.0]), v(&[1.0, 0.0, 0.0])]).unwrap();
        let e = &s.edge_frame().unwrap().edges[0];
        assert!((e.r - FRAC_PI_2).abs() < 1e-15);
        assert!(e.coeffs.a.abs() < 1e-15);
        assert!((e.coeffs.b - 2.0 / std::f64::consts::PI).abs() < 1e-15);

        let h = DiscreteCurve::new(ManifoldSpec::HyperbolicPlane, vec![v(&[0.0, 1.0]), v(&[0.0, E])]).unwrap();
        let e = &h.edge_frame().unwrap().edges[0];
        assert!((e.r - 1.0).abs() < 1e-14);
        assert!((&e.tau - &v(&[0.0, 1.0])).norm() < 1e-14);
        assert!((e.coeffs.a - 1.0f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn metric_examples() {
        let a = seg();
        let t = |r: [[f64; 2]; 2]| CurveTangent { vecs: vec![v(&r[0]), v(&r[1])] };
        let w = t([[0.0, 0.0], [0.0, 1.0]]);
        assert_eq!(d_tau(&a, &w).unwrap().vecs[0].as_slice(), &[0.0, 1.0]);
        assert_eq!(metric_gn(&a, &w, &w).unwrap(), 1.0);
        let w = t([[1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(metric_gn(&a, &w, &w).unwrap(), 1.0);
        let w = t([[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(metric_gn(&a, &w, &w).unwrap(), 0.25);
        let z = a.zero_tangent();
        assert_eq!(d_tau(&a, &z).unwrap(), z);
    }

    #[test]
    fn transport_maps_are_mutually_inverse() {
        let s = DiscreteCurve::new(
            ManifoldSpec::Sphere2,
            vec![v(&[0.0, 0.0, 1.0]), v(&[0.3, 0.1, 0.9]), v(&[0.5, -0.2, 0.8])],
        )
        .unwrap();
        let f = s.edge_frame().unwrap();
        for (k, e) in f.edges.iter().enumerate() {
            let x = &s.points()[k];
            for b in s.manifold().tangent_basis(x) {
                let back = e.prev(&e.next(&b));
                assert!((&back - &b).norm() < 1e-10);
            }
            assert!((e.qn * e.qn - 2.0 * e.r).abs() < 1e-10);
            assert!((e.norm_sq(&e.v) - 1.0).abs() < 1e-10);
        }
    }
}
