//! Bicriteria approximation for the minimum-cost k-edge-connected spanning
//! subgraph problem.
//!
//! [`bicriteria::run_algorithm1`] returns a subgraph of cost at most the
//! Cut-LP optimum whose global min cut is at least `k - 4`;
//! [`bicriteria::run_algorithm2`] trades cost `3/2 · LP` for connectivity
//! `k - 2`. All LP work is exact over [`Rational`].

pub mod bicriteria;
pub mod driver;
pub mod ecsm;
pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod lp;
pub mod mincut;
pub mod rational;
pub mod state;
pub mod verify;

pub use error::{GraphError, LpError, OracleError, ParseError, SolveError, VerifyError};
pub use graph::{ContractionForest, Cut, Edge, EdgeId, MultiGraph, NodeId};
pub use rational::Rational;
pub use state::{SolverState, Variant};
