//! Elastic shape analysis of discrete curves in constant-curvature spaces.
//!
//! Curves are polylines `(x_0, …, x_n)` in flat space, the hyperbolic
//! plane or the 2-sphere, compared under a discrete square-root-velocity
//! metric. The crate provides geodesic shooting, optimal reparameterization
//! matching, Karcher means and hierarchical clustering.

pub mod curve;
pub mod error;
pub mod geodesic;
pub mod linalg;
pub mod manifold;
pub mod matching;
pub mod scalar;
pub mod stats;

pub use error::{GeomError, Result};
pub use manifold::{jacobi_coefficients, EdgeCoefficients, ManifoldSpec, Point, Tangent};
pub use scalar::Real;

/// Curve with `f64` coordinates.
pub type Curve = curve::DiscreteCurve<f64>;
/// Tangent vector to the space of `f64` curves.
pub type CurveVector = curve::CurveTangent<f64>;
/// Path of `f64` curves.
pub type Path = curve::CurvePath<f64>;
pub type ShapeMatch = matching::Matching<f64>;
pub type KarcherMean = stats::KarcherResult<f64>;
