//! Surfaces of revolution `dr² + m(r)² dθ²`: profiles, geodesics, two-point
//! connection and asymptotic invariants.

mod asymptotics;
mod geodesic;
mod profile;
mod shoot;
mod sweep;

pub use asymptotics::{
    asymptotic_profile, ball_area, compact_extents, is_ray, ray_measure, AsymptoticProfile, CompactExtents,
    RayMeasure, RayProbe,
};
pub use geodesic::{
    integrate_geodesic, tangent_angle, GeodesicPath, GeodesicState, PathSample, SurfacePoint, Velocity,
};
pub use profile::{make_surface, Family, ProfileSurface};
pub use shoot::{connect, ConnectOptions, Connection};

pub(crate) use geodesic::ode_tolerance;
pub(crate) use sweep::Sweep;
