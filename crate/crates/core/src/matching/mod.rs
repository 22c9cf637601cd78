//! Reparameterization quotient: vertical and horizontal parts of tangent
//! vectors and paths, optimal matching and the dynamic-programming
//! baseline.

mod dp;
mod horizontal;
mod optimal;
mod spline;
mod vertical;

pub use dp::{dp_grid, dp_match, DpGrid};
pub use horizontal::{horizontal_part_of_path, reparameterize, HorizontalOptions, HorizontalPath, Inversion};
pub use optimal::{optimal_match, MatchOptions, Matching, StopReason};
pub use spline::{interp_uniform, invert_uniform, uniform_grid, ShapeSpline};
pub use vertical::{decompose_tangent, verticality_ratio, VerticalDecomposition};
