//! Galerkin discretisation in exact Laplacian eigenbases.

pub mod assemble;
pub mod basis;
pub mod eigen;
pub mod flow;

pub use assemble::{assemble, assemble_derivative, assemble_scaled, GalerkinOperator, Matrix};
pub use basis::{BasisSpec, BoundaryCondition, Field};
pub use eigen::{eigendecompose, eigenvalues, kernel_tolerance, SpectralResult, Vectors};
pub use flow::{eigen_flow, EigenFlow};
