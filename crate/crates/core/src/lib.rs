//! Minimal right inverses of Lévy processes.
//!
//! The crate simulates paths of a small catalog of Lévy models, extracts the
//! ascending ladder process and the excursions away from the supremum, builds
//! the minimal (partial) right inverse `K` of a path by two independent
//! constructions (dyadic hitting chains and thinned ladder restarts), and
//! evaluates the analytic Laplace exponent of `K` from the ladder
//! characteristics and the resolvent density of the model.
//!
//! Everything here is pure computation over owned inputs. File formats, the
//! experiment runner and parallel fan-out live in the `levy-rinv` crate.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod check;
pub mod error;
pub mod exponent;
pub mod fluctuation;
pub mod inverse;
pub mod math;
pub mod measure;
pub mod model;
pub mod resolvent;
pub mod rng;
pub mod sim;
pub mod stats;

pub use check::CheckReport;
pub use error::{Error, Result};
pub use model::{Existence, JumpLaw, JumpSpec, LevyModel, LongRun};
pub use sim::{HittingResult, SamplePath, SimConfig};
