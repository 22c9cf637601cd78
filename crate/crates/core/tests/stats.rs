mod common;

use common::{rng, smooth_curve};
use geomatch::curve::{discretize, DiscreteCurve};
use geomatch::linalg::Vector;
use geomatch::matching::MatchOptions;
use geomatch::stats::{cluster, distance_matrix, karcher_mean, shape_distance, Cut, DistanceMatrix, KarcherOptions, Linkage};
use geomatch::{Curve, ManifoldSpec};
use rand::Rng;

fn shift(c: &Curve, u: &[f64]) -> Curve {
    DiscreteCurve::new(c.manifold(), c.points().iter().map(|p| p + &Vector::from_slice(u)).collect()).unwrap()
}

fn arc(n: usize) -> Curve {
    discretize(ManifoldSpec::Euclidean(2), n, |t: f64| vec![t.cos(), t.sin() + 0.2 * t * t]).unwrap()
}

#[test]
fn distance_to_self_and_to_a_translate() {
    let c = arc(16);
    let opts = MatchOptions::default();
    assert_eq!(shape_distance(&c, &c, &opts).unwrap(), 0.0);
    let d = shape_distance(&c, &shift(&c, &[0.3, 0.4]), &opts).unwrap();
    assert!((d - 0.5).abs() < 1e-6, "{d}");
}

#[test]
fn distance_is_nearly_symmetric() {
    let mut r = rng(21);
    let opts = MatchOptions::default();
    for _ in 0..3 {
        let a = smooth_curve(ManifoldSpec::Euclidean(2), 20, 0.0, &mut r);
        let b = smooth_curve(ManifoldSpec::Euclidean(2), 20, r.gen_range(-0.5..0.5), &mut r);
        let (ab, ba) = (shape_distance(&a, &b, &opts).unwrap(), shape_distance(&b, &a, &opts).unwrap());
        assert!((ab - ba).abs() < 0.02 * ab.max(ba), "{ab} vs {ba}");
    }
}

#[test]
fn karcher_mean_of_opposite_translates_is_the_center() {
    let c = arc(16);
    let u = [0.25, -0.1];
    let copies = [shift(&c, &u), shift(&c, &[-u[0], -u[1]])];
    let res = karcher_mean(&copies, &KarcherOptions::default()).unwrap();
    assert!(res.converged);
    assert!(res.mean.max_distance(&c) < 1e-4, "{}", res.mean.max_distance(&c));
    assert!(res.objective.windows(2).all(|w| w[1] <= w[0] + 1e-6));

    let swapped = [copies[1].clone(), copies[0].clone()];
    let other = karcher_mean(&swapped, &KarcherOptions::default()).unwrap();
    assert!(other.mean.max_distance(&res.mean) < 1e-4);
}

#[test]
fn karcher_mean_of_one_curve_is_itself() {
    let c = arc(10);
    let res = karcher_mean(std::slice::from_ref(&c), &KarcherOptions::default()).unwrap();
    assert_eq!(res.mean, c);
    assert_eq!(res.iterations, 1);
}

#[test]
fn identical_curves_form_one_cluster_at_height_zero() {
    let c = arc(10);
    let m = distance_matrix(&[c.clone(), c], vec!["a".into(), "b".into()], &MatchOptions::default()).unwrap();
    assert_eq!(m.get(0, 1), 0.0);
    let cl = cluster(&m, Linkage::Average, Cut::Height(0.0)).unwrap();
    assert_eq!(cl.assignment, vec![0, 0]);
    assert_eq!(cl.dendrogram.merges[0].height, 0.0);
}

#[test]
fn clustering_recovers_two_bundles() {
    let mut r = rng(22);
    let base = arc(12);
    let mut curves = Vec::new();
    for group in 0..2 {
        for _ in 0..5 {
            let u = [2.0 * group as f64 + r.gen_range(-0.05..0.05), r.gen_range(-0.05..0.05)];
            curves.push(shift(&base, &u));
        }
    }
    let labels = (0..10).map(|i| format!("c{i}")).collect();
    let m = distance_matrix(&curves, labels, &MatchOptions::default()).unwrap();
    for i in 0..10 {
        assert_eq!(m.get(i, i), 0.0);
        for j in 0..10 {
            assert_eq!(m.get(i, j), m.get(j, i));
        }
    }
    let intra = (0..10).flat_map(|i| (0..10).map(move |j| (i, j))).filter(|(i, j)| i / 5 == j / 5).map(|(i, j)| m.get(i, j)).fold(0.0, f64::max);
    let inter = (0..5).flat_map(|i| (5..10).map(move |j| (i, j))).map(|(i, j)| m.get(i, j)).fold(f64::INFINITY, f64::min);
    assert!(inter > 3.0 * intra);
    let expected = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
    for linkage in [Linkage::Single, Linkage::Complete, Linkage::Average] {
        let cl = cluster(&m, linkage, Cut::Clusters(2)).unwrap();
        assert_eq!(cl.assignment, expected, "{linkage:?}");
        assert!(cl.dendrogram.merges.windows(2).all(|w| w[1].height >= w[0].height));
    }
}

#[test]
fn ties_merge_the_lowest_indices_first() {
    let labels: Vec<String> = (0..4).map(|i| i.to_string()).collect();
    let raw = vec![0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0];
    let m = DistanceMatrix::from_raw(labels, &raw).unwrap();
    let cl = cluster(&m, Linkage::Single, Cut::Clusters(3)).unwrap();
    assert_eq!((cl.dendrogram.merges[0].a, cl.dendrogram.merges[0].b), (0, 1));
    assert_eq!(cl.assignment, vec![0, 0, 1, 2]);
}
