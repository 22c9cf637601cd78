use clap::Args;
use geomatch::curve::EdgePolicy;
use geomatch::geodesic::{GeodesicOptions, ShootOptions};
use geomatch::matching::{HorizontalOptions, MatchOptions};
use geomatch::stats::KarcherOptions;
use geomatch::ManifoldSpec;

use crate::error::{CliError, CliResult};
use crate::io::LoadOptions;

/// Numerical settings shared by every subcommand.
#[derive(Args, Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Time steps of every geodesic.
    #[arg(long, global = true, default_value_t = 100)]
    pub steps: usize,
    /// Relative endpoint tolerance of geodesic shooting.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Velocity corrections allowed per shooting run.
    #[arg(long, global = true, default_value_t = 50)]
    pub max_iter: usize,
    /// Geodesics computed per optimal matching.
    #[arg(long, global = true, default_value_t = 20)]
    pub match_iter: usize,
    /// Iterations of the Karcher flow.
    #[arg(long, global = true, default_value_t = 30)]
    pub mean_iter: usize,
    /// Verticality ratio a matched geodesic should stay below.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub hor_tol: f64,
    /// Side of the dynamic-programming lookback square.
    #[arg(long, global = true, default_value_t = 7)]
    pub square: usize,
    /// Upsampled grid size for inverting reparameterizations (default 10n).
    #[arg(long, global = true)]
    pub upsample: Option<usize>,
    /// Accept zero-length edges in flat space.
    #[arg(long, global = true)]
    pub relaxed_edges: bool,
    /// Seed of the synthetic generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Manifold of bare CSV inputs, e.g. `sphere2` or `euclidean:3`.
    #[arg(long, global = true)]
    pub manifold: Option<ManifoldSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            steps: 100,
            tol: 1e-6,
            max_iter: 50,
            match_iter: 20,
            mean_iter: 30,
            hor_tol: 0.05,
            square: 7,
            upsample: None,
            relaxed_edges: false,
            seed: 0,
            manifold: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        let counts = [
            ("steps", self.steps),
            ("max-iter", self.max_iter),
            ("match-iter", self.match_iter),
            ("mean-iter", self.mean_iter),
        ];
        if let Some((flag, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Invalid(format!("--{flag} must be positive")));
        }
        if !(self.tol > 0.0 && self.hor_tol > 0.0) {
            return Err(CliError::Invalid("tolerances must be positive".into()));
        }
        if self.square < 2 {
            return Err(CliError::Invalid("--square must be at least 2".into()));
        }
        if self.upsample == Some(0) {
            return Err(CliError::Invalid("--upsample must be positive".into()));
        }
        Ok(())
    }

    pub fn shoot(&self) -> ShootOptions {
        ShootOptions {
            geodesic: GeodesicOptions {
                steps: self.steps,
                ..GeodesicOptions::default()
            },
            tol: self.tol,
            max_iter: self.max_iter,
            ..ShootOptions::default()
        }
    }

    pub fn matching(&self) -> MatchOptions {
        MatchOptions {
            shoot: self.shoot(),
            horizontal: HorizontalOptions {
                upsample: self.upsample,
                ..HorizontalOptions::default()
            },
            max_iter: self.match_iter,
            horizontality_tol: self.hor_tol,
            ..MatchOptions::default()
        }
    }

    pub fn karcher(&self) -> KarcherOptions {
        KarcherOptions {
            matching: self.matching(),
            max_iter: self.mean_iter,
            ..KarcherOptions::default()
        }
    }

    pub fn load(&self) -> LoadOptions {
        LoadOptions {
            policy: if self.relaxed_edges {
                EdgePolicy::Relaxed
            } else {
                EdgePolicy::Strict
            },
            manifold: self.manifold,
        }
    }
}
