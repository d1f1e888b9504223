//! Morse and Maslov indices for matrix Schrödinger operators
//! `-Δ + t²V(tx)` on a lattice cell.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`]: cells, dual bases, quadrature grids.
//! * [`potential`]: matrix potentials, their rescalings and transforms.
//! * [`spectral`]: Galerkin operators in exact Laplacian eigenbases.
//! * [`symplectic`]: Lagrangian frames, the Souriau map and Maslov indices.
//! * [`shooting`]: the one-dimensional boundary-trace Lagrangian path.
//! * [`verifier`]: conjugate-point scans, rectangle walks, index identities.

pub mod error;
pub mod exec;
pub mod lattice;
pub mod linalg;
pub mod potential;
pub mod shooting;
pub mod spectral;
pub mod symplectic;
pub mod verifier;

mod transform;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lattice::{CellGrid, FaceGrid, Lattice, QuadRule};
pub use potential::PotentialSpec;
pub use spectral::{BasisSpec, BoundaryCondition, Field};
