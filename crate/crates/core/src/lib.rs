//! Exact bound-state spectra of planar charged particles in two magnetic
//! backgrounds whose radial equations reduce to polynomial Heun solutions.
//!
//! The pipeline runs from three-term Heun recurrences ([`heun`]) through the
//! determinant polynomial and its roots ([`spectral`]) to model blocks,
//! energies and wavefunctions ([`models`]). [`oracle`] is an independent
//! finite-volume eigensolver used to cross-check the analytic energies.

pub mod cli;
pub mod error;
pub mod heun;
pub mod models;
pub mod oracle;
pub mod precision;
pub mod quad;
pub mod report;
pub mod spectral;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
