//! Optimal rank-r pure quaternion approximation of pure quaternion matrices
//! (for example RGB images), by alternating projections between the
//! fixed-rank quaternion matrices and the matrices with zero real part.

pub mod altproj;
pub mod baselines;
mod bidiag;
mod columns;
pub mod drsm;
pub mod error;
pub mod experiment;
pub mod files;
pub mod generate;
pub mod image;
pub mod matrix;
pub mod projections;
pub mod qsvd;
pub mod quaternion;
pub mod realrep;

pub use error::{Error, Result};
pub use matrix::{PartialConj, QuatMatrix};
pub use quaternion::{hamilton_mul, Quaternion};
