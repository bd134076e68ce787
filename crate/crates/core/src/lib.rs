//! Exact vertex connectivity through common-neighborhood clustering,
//! isolating cuts and minimum non-neighbor cuts inside clusters.
//!
//! The crate is organised bottom-up: [`graph`] holds the graph and cut types,
//! [`oracle`] the slow reference answers, [`matching`] the s-t vertex
//! connectivity engine, and the remaining modules build the single-sink and
//! global solvers on top of them. [`embedding`] and [`comm`] provide the
//! algebraic oracle and the two-party communication simulation.

pub mod clustering;
pub mod comm;
pub mod config;
pub mod embedding;
pub mod error;
pub mod field;
pub mod framework;
pub mod graph;
pub mod isolating;
pub mod matching;
pub mod minnncc;
pub mod oracle;
pub mod rng;
pub mod sketch;

pub use error::{Error, Result};
pub use graph::{Graph, VertexCut};
