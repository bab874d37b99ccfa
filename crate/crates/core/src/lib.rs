//! Potential theory on the unit sphere.
//!
//! The crate covers the fundamental solution of the Beltrami operator and the
//! Green functions of spherical caps, surface and curve potentials,
//! Dirichlet/Neumann solvers, gradient inversion, Helmholtz and Hardy–Hodge
//! decompositions, and the method of fundamental solutions, plus three
//! synthetic geoscience applications.

pub mod apps;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod cli;
pub mod harmonics;
pub mod io;
pub mod kernels;
pub mod layers;
pub mod mfs;
pub mod quadrature;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{SphericalCap, UnitVector, Vec3};
