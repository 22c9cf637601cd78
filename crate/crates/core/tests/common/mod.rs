#![allow(dead_code)]

use geomatch::curve::{CurveTangent, DiscreteCurve};
use geomatch::linalg::Vector;
use geomatch::ManifoldSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random smooth-ish curve: a random walk whose steps turn slowly.
pub fn random_curve(m: ManifoldSpec, n: usize, step: f64, rng: &mut ChaCha8Rng) -> DiscreteCurve<f64> {
    let start = match m {
        ManifoldSpec::Euclidean(d) => Vector::zeros(d),
        ManifoldSpec::HyperbolicPlane => Vector::from_slice(&[0.0, 1.0]),
        ManifoldSpec::Sphere2 => Vector::from_slice(&[0.0, 0.0, 1.0]),
    };
    let mut x = start;
    let mut heading: Vec<f64> = (0..m.coord_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut pts = vec![x.clone()];
    for _ in 0..n {
        for h in heading.iter_mut() {
            *h += rng.gen_range(-0.6..0.6);
        }
        let dir = m.project_tangent(&x, &Vector::from_slice(&heading));
        let len = m.norm_raw(&x, &dir);
        let scale = step * rng.gen_range(0.6..1.4) / len;
        x = m.exp_raw(&x, &dir.scaled(scale)).unwrap();
        pts.push(x.clone());
    }
    DiscreteCurve::new(m, pts).unwrap()
}

/// Random tangent with Riemannian norm about `size` at every point.
pub fn random_tangent(c: &DiscreteCurve<f64>, size: f64, rng: &mut ChaCha8Rng) -> CurveTangent<f64> {
    let m = c.manifold();
    let vecs = c
        .points()
        .iter()
        .map(|x| {
            let mut v = Vector::zeros(m.coord_dim());
            for b in m.tangent_basis(x) {
                v.axpy(size * rng.gen_range(-1.0..1.0), &b);
            }
            v
        })
        .collect();
    CurveTangent { vecs }
}

/// Smooth tangent field: low-frequency ambient coefficients projected onto
/// each tangent space and scaled to Riemannian size about `size`.
pub fn smooth_tangent(c: &DiscreteCurve<f64>, size: f64, rng: &mut ChaCha8Rng) -> CurveTangent<f64> {
    let m = c.manifold();
    let d = m.coord_dim();
    let coeffs: Vec<[f64; 3]> = (0..d)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let n = c.n() as f64;
    let vecs = c
        .points()
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let t = k as f64 / n;
            let raw: Vec<f64> = coeffs
                .iter()
                .map(|[a0, a1, a2]| size * (a0 + a1 * (3.0 * t).sin() + a2 * (2.0 * t).cos()))
                .collect();
            let v = m.project_tangent(x, &Vector::from(raw));
            match m {
                ManifoldSpec::HyperbolicPlane => v.scaled(x[1]),
                _ => v,
            }
        })
        .collect();
    CurveTangent { vecs }
}

/// Largest Riemannian norm of the pointwise difference, relative to the
/// largest norm of `reference`.
pub fn rel_diff(c: &DiscreteCurve<f64>, a: &CurveTangent<f64>, reference: &CurveTangent<f64>) -> f64 {
    let m = c.manifold();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (k, x) in c.points().iter().enumerate() {
        num = num.max(m.norm_raw(x, &(&a.vecs[k] - &reference.vecs[k])));
        den = den.max(m.norm_raw(x, &reference.vecs[k]));
    }
    num / den
}

/// Smooth random curve: a few low-frequency modes drawn in a chart of the
/// manifold, sampled uniformly in the parameter. `warp` bends the
/// parameterization.
pub fn smooth_curve(m: ManifoldSpec, n: usize, warp: f64, rng: &mut ChaCha8Rng) -> DiscreteCurve<f64> {
    let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let gamma = move |t: f64| t + warp * (std::f64::consts::PI * t).sin() / std::f64::consts::PI;
    let plane = move |t: f64| {
        let t = gamma(t);
        [
            t + 0.1 * c[0] * (3.0 * t).sin() + c[4],
            c[1] * (2.0 * t).sin() + c[2] * (5.0 * t).cos() + c[3],
            c[5] * (4.0 * t).sin() + c[6] * t,
        ]
    };
    geomatch::curve::discretize(m, n, move |t: f64| {
        let [x, y, z] = plane(t);
        match m {
            ManifoldSpec::Euclidean(2) => vec![x, y],
            ManifoldSpec::Euclidean(_) => vec![x, y, z],
            ManifoldSpec::HyperbolicPlane => vec![x, 1.5 + y],
            ManifoldSpec::Sphere2 => {
                let (u, v) = (0.8 * (x - 0.5), 0.8 * y);
                let r = (1.0 + u * u + v * v).sqrt();
                vec![u / r, v / r, 1.0 / r]
            }
        }
    })
    .unwrap()
}

/// Pointwise geodesic interpolation `s ↦ exp_{a_k}(s log_{a_k} b_k)`.
pub fn interpolation_path(a: &DiscreteCurve<f64>, b: &DiscreteCurve<f64>, steps: usize) -> geomatch::curve::CurvePath<f64> {
    let w = a.log_to(b).unwrap();
    let curves = (0..=steps).map(|j| a.exp(&w.scaled(j as f64 / steps as f64)).unwrap()).collect();
    geomatch::curve::CurvePath::new(curves, None, geomatch::curve::PathKind::Raw).unwrap()
}
