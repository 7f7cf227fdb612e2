//! Geodesic optimal transport regression.
//!
//! Regression for metric-space-valued responses and predictors: each
//! predictor contributes a transport from its Fréchet mean to the observed
//! value, and the response is modeled by applying a coefficient-scaled chain
//! of those transports to the response mean. The crate provides
//!
//! - the space contract and four backends (Euclidean vectors, 1-D
//!   distributions under the Wasserstein metric, the weighted Hilbert sphere
//!   for density roots, and SPD matrices in the log-Cholesky chart),
//! - the transport algebra (scaling, inversion, composition chains),
//! - the fitter (greedy order selection plus joint coefficient refit),
//! - a kernel-mean baseline, a simulation and evaluation harness, and
//! - dataset ingestion and emission for the command-line tool.

pub mod data;
pub mod error;
pub mod harness;
pub mod isotonic;
pub mod nadaraya;
pub mod optim;
pub mod regression;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
pub use space::{SpaceDescriptor, SpaceKind, SpacePoint};

/// Version string embedded in model documents and reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
