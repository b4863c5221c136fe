//! Routing and wavelength assignment with dedicated path protection.
//!
//! The crate models requests with candidate working and protection
//! lightpaths, derives the pairwise and grouped conflict structure, chooses
//! objective and penalty weights that keep the integer and quadratic models
//! exact, and solves them with an annealer, a greedy heuristic and exact
//! oracles.

pub mod anneal;
pub mod conflicts;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod heuristic;
pub mod instance;
pub mod io;
pub mod ip;
pub mod oracle;
pub mod qubo;
pub mod reduce;
pub mod report;
mod rng;
pub mod weights;

pub use error::{Error, Result};
pub use instance::{Instance, Kind, Solution};
pub use report::{Method, SolveReport, SolveStatus};
pub use weights::Weights;
