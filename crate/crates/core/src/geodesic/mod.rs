//! Geodesics of the discrete metric: the exponential map, Jacobi fields
//! along a geodesic and geodesic shooting between two curves.

mod exp;
mod jacobi;
mod kinematics;
mod shoot;

pub use exp::{exp_map, exp_map_with, GeodesicOptions, Integrator};
pub use jacobi::{jacobi_inverse, jacobi_propagate, JacobiInverse, JacobiOperator};
pub use kinematics::{curvature_terms, geodesic_accel, EdgeKin, EdgeSecond, Kinematics};
pub use shoot::{geodesic_shoot, geodesic_shoot_from, JacobianPolicy, ShootOptions, ShootReport};
