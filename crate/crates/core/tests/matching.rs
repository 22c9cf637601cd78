mod common;

use common::{interpolation_path, random_curve, random_tangent, rng, smooth_curve};
use geomatch::curve::{discretize, metric_gn, metric_norm, path_length, CurvePath, CurveTangent, DiscreteCurve, PathKind};
use geomatch::geodesic::{geodesic_shoot, ShootOptions};
use geomatch::linalg::{Lu, Vector};
use geomatch::matching::{
    decompose_tangent, dp_grid, dp_match, horizontal_part_of_path, optimal_match, verticality_ratio,
    HorizontalOptions, MatchOptions, ShapeSpline,
};
use geomatch::ManifoldSpec;
use rand::Rng;

const MANIFOLDS: [ManifoldSpec; 4] = [
    ManifoldSpec::Euclidean(2),
    ManifoldSpec::Euclidean(3),
    ManifoldSpec::Sphere2,
    ManifoldSpec::HyperbolicPlane,
];

/// Unit edge directions with `v_n = 0`, scaled by `z`.
fn vertical(c: &DiscreteCurve<f64>, z: &[f64]) -> CurveTangent<f64> {
    let m = c.manifold();
    let pts = c.points();
    let mut vecs = Vec::new();
    for k in 0..pts.len() {
        if k + 1 == pts.len() {
            vecs.push(Vector::zeros(m.coord_dim()));
            continue;
        }
        let tau = m.log_raw(&pts[k], &pts[k + 1]).unwrap();
        let r = m.norm_raw(&pts[k], &tau);
        vecs.push(tau.scaled(z[k] / r));
    }
    CurveTangent { vecs }
}

fn random_vertical(c: &DiscreteCurve<f64>, r: &mut impl Rng) -> CurveTangent<f64> {
    let n = c.n();
    let z: Vec<f64> = (0..=n)
        .map(|k| if k == 0 || k == n { 0.0 } else { r.gen_range(-1.0..1.0) })
        .collect();
    vertical(c, &z)
}

#[test]
fn decomposition_is_orthogonal_on_every_manifold() {
    let mut r = rng(11);
    for m in MANIFOLDS {
        for _ in 0..100 {
            let n = r.gen_range(3..12);
            let c = random_curve(m, n, 0.2, &mut r);
            let w = random_tangent(&c, 0.5, &mut r);
            let d = decompose_tangent(&c, &w).unwrap();
            assert_eq!((d.m[0], d.m[n]), (0.0, 0.0));
            assert!(d.residual < 1e-10, "{m}: residual {}", d.residual);
            let nh = metric_norm(&c, &d.hor).unwrap();
            let nv = metric_norm(&c, &d.ver).unwrap();
            let g = metric_gn(&c, &d.hor, &d.ver).unwrap();
            assert!(g.abs() < 1e-8 * nh * nv.max(1e-300), "{m}: {g:e}");
            for _ in 0..10 {
                let z = random_vertical(&c, &mut r);
                let nz = metric_norm(&c, &z).unwrap();
                let g = metric_gn(&c, &d.hor, &z).unwrap();
                assert!(g.abs() < 1e-8 * nh * nz, "{m}: {g:e}");
            }
        }
    }
}

#[test]
fn decomposition_matches_gram_projection() {
    // Least-squares projection onto span{e_k v}, solved densely.
    let mut r = rng(12);
    let c = discretize(ManifoldSpec::Euclidean(2), 4, |t: f64| vec![t, 0.0]).unwrap();
    for case in 0..20 {
        let c = if case == 0 { c.clone() } else { random_curve(ManifoldSpec::Euclidean(3), 6, 0.3, &mut r) };
        let n = c.n();
        let w = random_tangent(&c, 1.0, &mut r);
        let basis: Vec<CurveTangent<f64>> = (1..n)
            .map(|i| {
                let mut z = vec![0.0; n + 1];
                z[i] = 1.0;
                vertical(&c, &z)
            })
            .collect();
        let dim = n - 1;
        let mut gram = vec![0.0; dim * dim];
        let mut rhs = vec![0.0; dim];
        for i in 0..dim {
            rhs[i] = metric_gn(&c, &w, &basis[i]).unwrap();
            for j in 0..dim {
                gram[i * dim + j] = metric_gn(&c, &basis[i], &basis[j]).unwrap();
            }
        }
        let m = Lu::factor(gram, dim).unwrap().solve(&rhs);
        let d = decompose_tangent(&c, &w).unwrap();
        for i in 0..dim {
            assert!((d.m[i + 1] - m[i]).abs() < 1e-10 * (1.0 + m[i].abs()), "{} vs {}", d.m[i + 1], m[i]);
        }
        assert!(metric_gn(&c, &d.hor, &d.ver).unwrap().abs() < 1e-10);
    }
}

#[test]
fn horizontal_and_vertical_vectors_are_fixed_points() {
    let mut r = rng(13);
    for m in MANIFOLDS {
        let c = random_curve(m, 8, 0.2, &mut r);
        let w = random_tangent(&c, 0.5, &mut r);
        let hor = decompose_tangent(&c, &w).unwrap().hor;
        let again = decompose_tangent(&c, &hor).unwrap();
        assert!(again.m.iter().all(|x| x.abs() < 1e-10), "{m}: {:?}", again.m);

        let z = random_vertical(&c, &mut r);
        let d = decompose_tangent(&c, &z).unwrap();
        assert!(metric_norm(&c, &d.hor).unwrap() < 1e-8, "{m}");
    }
}

fn translation_path(c: &DiscreteCurve<f64>, u: &[f64], steps: usize) -> CurvePath<f64> {
    let curves = (0..=steps)
        .map(|j| {
            let s = j as f64 / steps as f64;
            let pts = c.points().iter().map(|p| p + &Vector::from_slice(u).scaled(s)).collect();
            DiscreteCurve::new(c.manifold(), pts).unwrap()
        })
        .collect();
    let vel = CurveTangent { vecs: vec![Vector::from_slice(u); c.n() + 1] };
    CurvePath::new(curves, Some(vec![vel; steps + 1]), PathKind::Geodesic).unwrap()
}

fn wave(n: usize) -> DiscreteCurve<f64> {
    discretize(ManifoldSpec::Euclidean(2), n, |t: f64| vec![t, 0.3 * (3.0 * t).sin()]).unwrap()
}

#[test]
fn horizontal_paths_are_left_alone() {
    let c = wave(12);
    let p = translation_path(&c, &[0.4, -0.2], 20);
    let h = horizontal_part_of_path(&p, &HorizontalOptions::default()).unwrap();
    for (a, b) in h.path.curves.iter().zip(&p.curves) {
        assert!(a.max_distance(b) < 1e-8);
    }
    assert!(verticality_ratio(&p).unwrap().iter().all(|&r| r < 1e-6));
}

#[test]
fn sliding_along_a_line_is_vertical() {
    // Points slide along the segment [0,1]×{0}; the shape never changes.
    let (n, steps) = (10, 40);
    let slide = |s: f64, t: f64| t + 0.4 * s * t * (1.0 - t);
    let curves: Vec<_> = (0..=steps)
        .map(|j| {
            let s = j as f64 / steps as f64;
            discretize(ManifoldSpec::Euclidean(2), n, |t: f64| vec![slide(s, t), 0.0]).unwrap()
        })
        .collect();
    let vels: Vec<_> = (0..=steps)
        .map(|_| CurveTangent {
            vecs: (0..=n)
                .map(|k| {
                    let t = k as f64 / n as f64;
                    Vector::from_slice(&[0.4 * t * (1.0 - t), 0.0])
                })
                .collect(),
        })
        .collect();
    let p = CurvePath::new(curves.clone(), None, PathKind::Raw).unwrap();
    let with_vel = CurvePath::new(curves, Some(vels), PathKind::Raw).unwrap();
    let ratios = verticality_ratio(&with_vel).unwrap();
    assert!(ratios.iter().skip(1).all(|r| r.is_infinite()), "{ratios:?}");

    let h = horizontal_part_of_path(&p, &HorizontalOptions::default()).unwrap();
    let (lp, lh) = (path_length(&p).unwrap(), path_length(&h.path).unwrap());
    assert!(lh < 0.05 * lp, "{lh} vs {lp}");
}

#[test]
fn horizontal_part_is_never_longer() {
    let mut r = rng(14);
    for m in MANIFOLDS {
        for _ in 0..10 {
            let a = smooth_curve(m, 24, 0.0, &mut r);
            let b = smooth_curve(m, 24, r.gen_range(-0.6..0.6), &mut r);
            let p = interpolation_path(&a, &b, 30);
            let h = horizontal_part_of_path(&p, &HorizontalOptions::default()).unwrap();
            let (lp, lh) = (path_length(&p).unwrap(), path_length(&h.path).unwrap());
            assert!(lh <= lp + 1e-6, "{m}: {lh} > {lp}");
            assert_eq!((h.phi[0], h.phi[24]), (0.0, 1.0));
            assert!(h.phi.windows(2).all(|w| w[1] >= w[0]));
            assert!(h.path.end().max_distance(&h.path.curves[0]) > 0.0);
        }
    }
}

#[test]
fn matching_identical_curves_is_trivial() {
    let c = wave(12);
    let (path, m) = optimal_match(&c, &c, &MatchOptions::default()).unwrap();
    assert_eq!(m.iterations, 1);
    assert_eq!(m.final_length(), 0.0);
    assert_eq!(path_length(&path).unwrap(), 0.0);
    let n = c.n() as f64;
    assert!(m.phi.iter().enumerate().all(|(k, &p)| (p - k as f64 / n).abs() < 1e-12));

    let grid = dp_grid(&c, &c, 7).unwrap();
    assert!(grid.path().iter().all(|&(i, j)| i == j));
}

#[test]
fn translated_copy_matches_to_identity() {
    let c = wave(16);
    let u = [0.5, 0.25];
    let b = DiscreteCurve::new(c.manifold(), c.points().iter().map(|p| p + &Vector::from_slice(&u)).collect()).unwrap();
    let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let (_, m) = optimal_match(&c, &b, &MatchOptions::default()).unwrap();
    assert!((m.final_length() - norm).abs() < 1e-6, "{}", m.final_length());
    assert!(m.phi.iter().enumerate().all(|(k, &p)| (p - k as f64 / 16.0).abs() < 1e-6));
    let (_, d) = dp_match(&c, &b, 7, &ShootOptions::default()).unwrap();
    assert!((d.final_length() - norm).abs() < 1e-6);
    assert!(d.phi.iter().enumerate().all(|(k, &p)| (p - k as f64 / 16.0).abs() < 1e-12));
}

/// `c(t)` and `c(γ(t)) + u` for a nonuniform `γ`.
fn reparameterized_pair(n: usize, u: [f64; 2], bend: f64) -> (DiscreteCurve<f64>, DiscreteCurve<f64>) {
    let shape = |t: f64| vec![t, 0.3 * (3.0 * t).sin()];
    let gamma = |t: f64| t + bend * (std::f64::consts::PI * t).sin() / std::f64::consts::PI;
    let a = discretize(ManifoldSpec::Euclidean(2), n, shape).unwrap();
    let b = discretize(ManifoldSpec::Euclidean(2), n, |t: f64| {
        let p = shape(gamma(t));
        vec![p[0] + u[0], p[1] + u[1]]
    })
    .unwrap();
    (a, b)
}

#[test]
fn optimal_matching_removes_parameterization_excess() {
    let u = [0.3, 0.4];
    let (a, b) = reparameterized_pair(24, u, 0.5);
    let raw = geodesic_shoot(&a, &b, &ShootOptions::default()).unwrap();
    let raw_len = path_length(&raw.path).unwrap();
    let raw_ratio = verticality_ratio(&raw.path).unwrap().into_iter().fold(0.0, f64::max);
    let (path, m) = optimal_match(&a, &b, &MatchOptions::default()).unwrap();
    let len = path_length(&path).unwrap();
    assert!(raw_len > 1.1 * 0.5, "raw length {raw_len}");
    assert!((len - 0.5).abs() < 0.05 * 0.5, "{len} (history {:?})", m.length_history);
    assert!(m.length_history.windows(2).all(|w| w[1] <= w[0] + 1e-8));
    assert!(m.max_verticality < 0.05 && m.max_verticality < raw_ratio, "{} vs {raw_ratio}", m.max_verticality);
    assert_eq!(m.phi[0], 0.0);
    assert_eq!(m.phi[24], 1.0);
    assert!(m.matched.points()[0] == b.points()[0] && m.matched.points()[24] == b.points()[24]);
    let spline = ShapeSpline::new(&b).unwrap();
    for (k, &p) in m.phi.iter().enumerate() {
        assert!((&spline.eval(p) - &m.matched.points()[k]).norm() < 1e-12);
    }
}

#[test]
fn optimal_matching_agrees_with_dynamic_programming() {
    let mut r = rng(15);
    for _ in 0..3 {
        let a = smooth_curve(ManifoldSpec::Euclidean(2), 30, 0.0, &mut r);
        let b = smooth_curve(ManifoldSpec::Euclidean(2), 30, 0.5, &mut r);
        let (_, om) = optimal_match(&a, &b, &MatchOptions::default()).unwrap();
        let (_, dp) = dp_match(&a, &b, 7, &ShootOptions::default()).unwrap();
        let raw = path_length(&geodesic_shoot(&a, &b, &ShootOptions::default()).unwrap().path).unwrap();
        let (lo, ld) = (om.final_length(), dp.final_length());
        assert!((lo - ld).abs() / ld < 0.01, "OM {lo} DP {ld} raw {raw}");
        assert!(lo < raw && ld < raw);
        assert!(dp.phi.windows(2).all(|w| w[1] >= w[0]));
    }
}
