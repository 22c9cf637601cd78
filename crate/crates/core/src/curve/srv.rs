use crate::error::Result;
use crate::linalg::Vector;
use crate::scalar::Real;

use super::{DiscreteCurve, EdgeFrame, EdgePolicy};
use crate::manifold::ManifoldSpec;

/// Square-root-velocity coordinates `(x_0, q_0, …, q_{n−1})`. Each `q_k`
/// lives in the tangent space at `x_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SrvRep<T> {
    pub manifold: ManifoldSpec,
    pub x0: Vector<T>,
    pub qs: Vec<Vector<T>>,
}

pub fn srv<T: Real>(curve: &DiscreteCurve<T>) -> Result<SrvRep<T>> {
    let frame = EdgeFrame::new(curve)?;
    Ok(SrvRep {
        manifold: curve.manifold(),
        x0: curve.points()[0].clone(),
        qs: frame.edges.into_iter().map(|e| e.q).collect(),
    })
}

/// Rebuilds the curve through `x_{k+1} = exp_{x_k}(|q_k| q_k / n)`.
pub fn srv_inverse<T: Real>(rep: &SrvRep<T>) -> Result<DiscreteCurve<T>> {
    let m = rep.manifold;
    let n = rep.qs.len();
    let nn = T::from_count(n);
    let mut points = Vec::with_capacity(n + 1);
    points.push(m.validate_coords(&rep.x0)?);
    let mut relaxed = false;
    for q in &rep.qs {
        let x = points.last().expect("at least one point");
        let qn = m.norm_raw(x, q);
        relaxed |= qn == T::zero();
        let next = m.exp_raw(x, &q.scaled(qn / nn))?;
        points.push(next);
    }
    let policy = if relaxed && m.is_flat() {
        EdgePolicy::Relaxed
    } else {
        EdgePolicy::Strict
    };
    DiscreteCurve::with_policy(m, points, policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_segment() {
        let c = DiscreteCurve::from_rows(ManifoldSpec::Euclidean(2), &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let r = srv(&c).unwrap();
        assert_eq!(r.x0.as_slice(), &[0.0, 0.0]);
        assert_eq!(r.qs[0].as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn scaling_by_four_doubles_q() {
        let rows = vec![vec![0.0, 0.0], vec![0.3, 0.4], vec![1.0, 0.2], vec![1.1, -0.5]];
        let c = DiscreteCurve::from_rows(ManifoldSpec::Euclidean(2), &rows).unwrap();
        let big: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| 4.0 * x).collect()).collect();
        let c4 = DiscreteCurve::from_rows(ManifoldSpec::Euclidean(2), &big).unwrap();
        let (a, b) = (srv(&c).unwrap(), srv(&c4).unwrap());
        for (q, q4) in a.qs.iter().zip(b.qs.iter()) {
            assert!((&q.scaled(2.0) - q4).norm() < 1e-14);
        }
    }

    #[test]
    fn roundtrip_on_sphere_and_plane() {
        let s = DiscreteCurve::from_rows(
            ManifoldSpec::Sphere2,
            &[vec![0.0, 0.0, 1.0], vec![0.2, 0.1, 0.97], vec![0.5, -0.1, 0.86], vec![0.6, 0.3, 0.74]],
        )
        .unwrap();
        let h = DiscreteCurve::from_rows(
            ManifoldSpec::HyperbolicPlane,
            &[vec![0.0, 1.0], vec![0.4, 1.3], vec![1.0, 0.7], vec![1.2, 2.0]],
        )
        .unwrap();
        for c in [s, h] {
            let back = srv_inverse(&srv(&c).unwrap()).unwrap();
            assert!(c.max_distance(&back) < 1e-9);
        }
    }
}
