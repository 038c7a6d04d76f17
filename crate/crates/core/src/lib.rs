//! Certified and heuristic linear-homotopy continuation for square systems of
//! homogeneous complex polynomials, with tools for comparing start systems.

pub mod error;
pub mod harness;
pub mod homotopy;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod projective;
pub mod rng;
pub mod selftest;
pub mod start;

pub use error::{Error, Result};
pub use homotopy::{
    track_certified, track_heuristic, CertifiedOptions, GeodesicHomotopy, HeuristicSettings,
    TrackResult, TrackStatus,
};
pub use poly::{DegreeVector, HomoPoly, MultiIndex, PolySystem, C64};
pub use projective::{condition_mu, mu_system, riemann_distance, ProjectivePoint};
