//! Quantitative tools for extremality, stationarity and transversality of finite
//! collections of closed sets in R^d.
//!
//! The crate covers distances between n sets, primal translation constructions, finite
//! Ekeland variational principles, dual certificate search and independent oracles used to
//! verify every computed claim.

pub mod distance;
pub mod cli;
pub mod ekeland;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod perturbation;
pub mod stationarity;
pub mod tol;
pub mod translation;

pub use error::{Error, Result};
pub use geometry::{ConeRep, DistanceReport, Norm, NormalKind, SetRep};
