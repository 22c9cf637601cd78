use geomatch::linalg::Vector;
use geomatch::{jacobi_coefficients, ManifoldSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CURVED: [ManifoldSpec; 2] = [ManifoldSpec::Sphere2, ManifoldSpec::HyperbolicPlane];
const ALL: [ManifoldSpec; 3] = [ManifoldSpec::Euclidean(3), ManifoldSpec::Sphere2, ManifoldSpec::HyperbolicPlane];

fn point(m: ManifoldSpec, raw: [f64; 3]) -> Option<Vector<f64>> {
    match m {
        ManifoldSpec::Euclidean(d) => Some(Vector::from_slice(&raw[..d])),
        ManifoldSpec::HyperbolicPlane => Some(Vector::from_slice(&[raw[0], 0.2 + raw[1].abs()])),
        ManifoldSpec::Sphere2 => {
            let v = Vector::from_slice(&raw);
            let r = v.norm();
            (r > 0.1).then(|| v.scaled(r.recip()))
        }
    }
}

/// Tangent at `x` with Riemannian norm `len` in direction `raw`.
fn tangent(m: ManifoldSpec, x: &Vector<f64>, raw: [f64; 3], len: f64) -> Option<Vector<f64>> {
    let v = m.project_tangent(x, &Vector::from_slice(&raw[..m.coord_dim()]));
    let r = m.norm_raw(x, &v);
    (r > 1e-3).then(|| v.scaled(len / r))
}

fn coords() -> impl Strategy<Value = [f64; 3]> {
    [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn exp_log_roundtrip(p in coords(), d in coords(), len in 0.0..3.0f64) {
        for m in ALL {
            let Some(x) = point(m, p) else { continue };
            let Some(v) = tangent(m, &x, d, len) else { continue };
            let y = m.exp_raw(&x, &v).unwrap();
            let back = m.log_raw(&x, &y).unwrap();
            let err = m.norm_raw(&x, &(&back - &v));
            prop_assert!(err < 1e-8, "{}: {:e}", m, err);
        }
    }

    #[test]
    fn transport_is_an_isometry(p in coords(), d in coords(), a in coords(), b in coords(), len in 0.0..3.0f64) {
        for m in ALL {
            let Some(x) = point(m, p) else { continue };
            let Some(v) = tangent(m, &x, d, len) else { continue };
            let (Some(u), Some(w)) = (tangent(m, &x, a, 1.0), tangent(m, &x, b, 0.7)) else { continue };
            let y = m.exp_raw(&x, &v).unwrap();
            let (pu, pw) = (m.transport_raw(&x, &y, &u).unwrap(), m.transport_raw(&x, &y, &w).unwrap());
            let err = (m.inner_raw(&y, &pu, &pw) - m.inner_raw(&x, &u, &w)).abs();
            prop_assert!(err < 1e-10, "{}: {:e}", m, err);
        }
    }

    #[test]
    fn curvature_is_antisymmetric(p in coords(), a in coords(), b in coords(), c in coords()) {
        for m in ALL {
            let Some(x) = point(m, p) else { continue };
            let (Some(u), Some(v), Some(z)) = (tangent(m, &x, a, 1.0), tangent(m, &x, b, 1.3), tangent(m, &x, c, 0.4)) else { continue };
            prop_assert_eq!(m.curvature_raw(&x, &u, &v, &z), -m.curvature_raw(&x, &v, &u, &z));
        }
    }

    #[test]
    fn small_length_coefficients_are_continuous(r in 0.0..1e-3f64, t in 0.0..1.0f64) {
        for k in [-1, 0, 1] {
            let (_, b, _) = jacobi_coefficients(r, k, t);
            prop_assert!((b - t).abs() <= r * r * t * t * t);
        }
    }
}

/// Components `⟨R(E_j, γ')γ', E_i⟩` in the transported frame at `γ(t)`.
fn frame_curvature(m: ManifoldSpec, x: &Vector<f64>, v: &Vector<f64>, frame: &[Vector<f64>], t: f64) -> Vec<f64> {
    let y = m.exp_raw(x, &v.scaled(t)).unwrap();
    let e: Vec<Vector<f64>> = frame.iter().map(|f| m.transport_raw(x, &y, f).unwrap()).collect();
    let vel = m.transport_raw(x, &y, v).unwrap();
    let d = e.len();
    let mut out = vec![0.0; d * d];
    for j in 0..d {
        let r = m.curvature_raw(&y, &e[j], &vel, &vel);
        for i in 0..d {
            out[i * d + j] = m.inner_raw(&y, &r, &e[i]);
        }
    }
    out
}

/// RK4 for `j'' = −M(t) j` in a parallel orthonormal frame along
/// `t ↦ exp_x(t v)`, `t ∈ [0, 1]`.
fn integrate_jacobi(m: ManifoldSpec, x: &Vector<f64>, v: &Vector<f64>, j0: &[f64], dj0: &[f64], steps: usize) -> Vec<f64> {
    let frame = m.tangent_basis(x);
    let d = frame.len();
    let h = 1.0 / steps as f64;
    let accel = |t: f64, j: &[f64]| -> Vec<f64> {
        let k = frame_curvature(m, x, v, &frame, t);
        (0..d).map(|i| -(0..d).map(|c| k[i * d + c] * j[c]).sum::<f64>()).collect()
    };
    let (mut j, mut dj) = (j0.to_vec(), dj0.to_vec());
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + s * y).collect() };
    for step in 0..steps {
        let t = step as f64 * h;
        let (k1j, k1v) = (dj.clone(), accel(t, &j));
        let (k2j, k2v) = (axpy(&dj, h / 2.0, &k1v), accel(t + h / 2.0, &axpy(&j, h / 2.0, &k1j)));
        let (k3j, k3v) = (axpy(&dj, h / 2.0, &k2v), accel(t + h / 2.0, &axpy(&j, h / 2.0, &k2j)));
        let (k4j, k4v) = (axpy(&dj, h, &k3v), accel(t + h, &axpy(&j, h, &k3j)));
        for i in 0..d {
            j[i] += h / 6.0 * (k1j[i] + 2.0 * k2j[i] + 2.0 * k3j[i] + k4j[i]);
            dj[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
        }
    }
    j
}

#[test]
fn closed_form_jacobi_fields_match_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cases = 0;
    for m in CURVED.into_iter().chain([ManifoldSpec::Euclidean(2)]) {
        let mut done = 0;
        while done < 1000 {
            let raw = |r: &mut ChaCha8Rng| [r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)];
            let Some(x) = point(m, raw(&mut rng)) else { continue };
            let len = rng.gen_range(0.0..2.5);
            let Some(v) = tangent(m, &x, raw(&mut rng), len) else { continue };
            let frame = m.tangent_basis(&x);
            let d = frame.len();
            let j0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dj0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let numeric = integrate_jacobi(m, &x, &v, &j0, &dj0, 1000);

            // closed form: P(w^T + u^T + a w^N + b u^N) with unit-time coefficients
            let r = m.norm_raw(&x, &v);
            let (a, b, _) = jacobi_coefficients(r, m.curvature(), 1.0);
            let dir: Vec<f64> = if r > 0.0 {
                frame.iter().map(|e| m.inner_raw(&x, e, &v) / r).collect()
            } else {
                vec![0.0; d]
            };
            let split = |c: &[f64], alpha: f64, beta: f64| -> Vec<f64> {
                let p: f64 = c.iter().zip(&dir).map(|(a, b)| a * b).sum();
                (0..d).map(|i| beta * c[i] + (alpha - beta) * p * dir[i]).collect()
            };
            let closed: Vec<f64> = split(&j0, 1.0, a).iter().zip(split(&dj0, 1.0, b)).map(|(p, q)| p + q).collect();
            let err = numeric.iter().zip(&closed).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(err < 1e-6, "{m}: |v| = {len}, error {err:e}");
            done += 1;
        }
        cases += done;
    }
    assert_eq!(cases, 3000);
}
