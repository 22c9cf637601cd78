//! Synthetic curve sets.

use std::f64::consts::PI;

use clap::ValueEnum;
use geomatch::curve::discretize;
use geomatch::ManifoldSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::io::{CurveSet, NamedCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Half circle and a straight segment in the plane.
    CircleSegment,
    /// A planar curve and a translated, reparameterized copy.
    Translated,
    /// Space curves before and after a turn.
    Turn3d,
    /// Vertical and horizontal segments of the hyperbolic plane.
    H2Segments,
    /// Two groups of five perturbed planar arcs far apart.
    TwoBundles,
}

impl Generator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CircleSegment => "circle-segment",
            Self::Translated => "translated",
            Self::Turn3d => "turn3d",
            Self::H2Segments => "h2-segments",
            Self::TwoBundles => "two-bundles",
        }
    }

    pub fn default_n(&self) -> usize {
        match self {
            Self::Translated => 24,
            Self::H2Segments => 20,
            Self::TwoBundles => 12,
            _ => 30,
        }
    }
}

/// Offset of the translated copy.
pub const TRANSLATION: [f64; 2] = [0.3, 0.4];

fn named(name: &str, m: ManifoldSpec, n: usize, f: impl FnMut(f64) -> Vec<f64>) -> CliResult<NamedCurve> {
    Ok(NamedCurve {
        name: name.to_string(),
        curve: discretize(m, n, f)?,
    })
}

/// Warp of `[0, 1]` fixing the endpoints; increasing for `|bend| < 1`.
fn warp(t: f64, bend: f64) -> f64 {
    t + bend * (PI * t).sin() / PI
}

pub fn generate(kind: Generator, n: Option<usize>, seed: u64) -> CliResult<CurveSet> {
    let n = n.unwrap_or_else(|| kind.default_n());
    if n < 2 {
        return Err(CliError::Invalid("generated curves need n ≥ 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plane = ManifoldSpec::Euclidean(2);
    let curves = match kind {
        Generator::CircleSegment => vec![
            named("circle", plane, n, |t| vec![(PI * t).cos(), (PI * t).sin()])?,
            named("segment", plane, n, |t| vec![1.0 - 2.0 * t, -0.3])?,
        ],
        Generator::Translated => {
            let shape = |t: f64| vec![t, 0.3 * (3.0 * t).sin()];
            vec![
                named("source", plane, n, shape)?,
                named("target", plane, n, |t| {
                    let p = shape(warp(t, 0.5));
                    vec![p[0] + TRANSLATION[0], p[1] + TRANSLATION[1]]
                })?,
            ]
        }
        Generator::Turn3d => {
            let space = ManifoldSpec::Euclidean(3);
            let wobble: [f64; 3] = [rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02), rng.gen_range(-0.02..0.02)];
            vec![
                named("before", space, n, |t| {
                    vec![1.5 * t, 0.2 * (PI * t).sin() + wobble[0] * (3.0 * PI * t).sin(), 0.3 * t]
                })?,
                named("after", space, n, |t| {
                    let a = 0.5 * PI * warp(t, 0.3);
                    vec![1.2 * a.sin(), 1.2 * (1.0 - a.cos()) + wobble[1] * (2.0 * PI * t).sin(), 0.3 * t + wobble[2] * t * t]
                })?,
            ]
        }
        Generator::H2Segments => vec![
            named("vertical", ManifoldSpec::HyperbolicPlane, n, |t| vec![0.0, 1.0 + 2.0 * t])?,
            named("horizontal", ManifoldSpec::HyperbolicPlane, n, |t| vec![-1.0 + 2.0 * t, 1.0])?,
        ],
        Generator::TwoBundles => {
            let mut out = Vec::with_capacity(10);
            for (group, tag) in ["a", "b"].into_iter().enumerate() {
                for i in 0..5 {
                    let dx = 2.0 * group as f64 + rng.gen_range(-0.05..0.05);
                    let dy = rng.gen_range(-0.05..0.05);
                    let bump = rng.gen_range(-0.02..0.02);
                    out.push(named(&format!("{tag}{i}"), plane, n, |t| {
                        vec![t.cos() + dx, t.sin() + 0.2 * t * t + dy + bump * (PI * t).sin()]
                    })?);
                }
            }
            out
        }
    };
    let manifold = curves[0].curve.manifold();
    CurveSet::new(manifold, curves)
}
