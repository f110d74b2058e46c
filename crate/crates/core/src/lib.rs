//! Diastasis geometry on complex hyperbolic space, polydiscs and the matrix
//! ball `Omega_1[m, m]`, with diastatic barycentres and entropy probes.
//!
//! All tangent data use one real chart; see [`numerics`].

pub mod ball;
pub mod barycentre;
pub mod domains;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Geometry, GeometryPoint};
