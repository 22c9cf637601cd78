//! Energy of smooth analytic paths under refinement of the curve grid.

use clap::ValueEnum;
use geomatch::curve::{path_energy, CurvePath, CurveTangent, DiscreteCurve, PathKind};
use geomatch::linalg::Vector;
use geomatch::ManifoldSpec;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// A spherical arc rotating about the polar axis.
    SphereArc,
    /// A planar sinusoid translated rigidly.
    FlatTranslation,
    /// An arc of the hyperbolic plane sliding horizontally.
    H2Slide,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::SphereArc => "sphere-arc",
            Self::FlatTranslation => "flat-translation",
            Self::H2Slide => "h2-slide",
        }
    }

    pub fn manifold(&self) -> ManifoldSpec {
        match self {
            Self::SphereArc => ManifoldSpec::Sphere2,
            Self::FlatTranslation => ManifoldSpec::Euclidean(2),
            Self::H2Slide => ManifoldSpec::HyperbolicPlane,
        }
    }

    /// Point and path velocity `(c(s, t), ∂_s c(s, t))`.
    fn sample(&self, s: f64, t: f64) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::SphereArc => {
                const OMEGA: f64 = 0.8;
                let polar = 0.6 + 0.5 * t + 0.2 * t * t;
                let azimuth = 1.2 * t + 0.3 * (2.0 * t).sin() + OMEGA * s;
                let (sp, cp) = polar.sin_cos();
                let (sa, ca) = azimuth.sin_cos();
                (vec![sp * ca, sp * sa, cp], vec![-OMEGA * sp * sa, OMEGA * sp * ca, 0.0])
            }
            Self::FlatTranslation => {
                let u = [0.6, -0.3];
                (vec![t + u[0] * s, 0.3 * (3.0 * t).sin() + u[1] * s], u.to_vec())
            }
            Self::H2Slide => {
                let shift = 0.7;
                let angle = 0.3 + 2.0 * t;
                (vec![0.8 * angle.cos() + shift * s, 1.0 + 0.8 * angle.sin()], vec![shift, 0.0])
            }
        }
    }

    /// The path sampled at `n + 1` curve points and `steps + 1` times, with
    /// exact velocities.
    pub fn path(&self, n: usize, steps: usize) -> CliResult<CurvePath<f64>> {
        if n == 0 || steps == 0 {
            return Err(CliError::Invalid("grid sizes must be positive".into()));
        }
        let m = self.manifold();
        let mut curves = Vec::with_capacity(steps + 1);
        let mut velocities = Vec::with_capacity(steps + 1);
        for j in 0..=steps {
            let s = j as f64 / steps as f64;
            let (pts, vel): (Vec<_>, Vec<_>) = (0..=n)
                .map(|k| {
                    let (p, v) = self.sample(s, k as f64 / n as f64);
                    (Vector::from(p), Vector::from(v))
                })
                .unzip();
            curves.push(DiscreteCurve::new(m, pts)?);
            velocities.push(CurveTangent { vecs: vel });
        }
        Ok(CurvePath::new(curves, Some(velocities), PathKind::Raw)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub energy: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub family: Family,
    pub steps: usize,
    pub reference_n: usize,
    pub reference: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log n`; `None` when some
    /// error vanishes.
    pub slope: Option<f64>,
}

impl ConvergenceStudy {
    /// Whether doubling `n` never grew the error by more than `factor`.
    pub fn errors_settle(&self, factor: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].error <= factor * w[0].error + 1e-14)
    }
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Energies at every `n` of `ns` against the energy at `4·max(ns)`.
pub fn convergence_study(family: Family, ns: &[usize], steps: usize) -> CliResult<ConvergenceStudy> {
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Invalid("grid sizes must be strictly ascending".into()));
    }
    let reference_n = 4 * ns[ns.len() - 1];
    let reference = path_energy(&family.path(reference_n, steps)?)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let energy = path_energy(&family.path(n, steps)?)?;
            Ok(ConvergenceRow {
                n,
                energy,
                error: (energy - reference).abs(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let slope = (rows.len() >= 2 && rows.iter().all(|r| r.error > 0.0)).then(|| {
        let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
        fit_slope(&xs, &ys)
    });
    Ok(ConvergenceStudy {
        family,
        steps,
        reference_n,
        reference,
        rows,
        slope,
    })
}
