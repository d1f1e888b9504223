//! Conjugate-point scans, the four-segment walk and the index identities.

pub mod config;
pub mod identity;
pub mod report;
pub mod scan;
pub mod walk;

pub use config::ExperimentConfig;
pub use identity::{
    choose_tau, evaluate, prepare, verify_all, verify_identity, Identity, IdentityCheck, Prepared, RouteAgreement,
    VerificationReport, SCHEMA_VERSION,
};
pub use scan::{boundary_form, scan_conjugate_points, Crossing, CrossingReport, Endpoint, ScanSettings};
pub use walk::{rectangle_walk, rectangle_walk_checked, WalkReport};
