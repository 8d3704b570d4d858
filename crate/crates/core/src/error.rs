use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{EdgeId, NodeId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("self-loop at {0}")]
    SelfLoop(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("negative edge cost {0}")]
    NegativeCost(Rational),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
}

/// Node ids as they appear in instance files.
fn one_based(nodes: &BTreeSet<NodeId>) -> String {
    nodes
        .iter()
        .map(|v| (v.0 + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("row references variable {var} but the program has {count} variables")]
    BadRow { var: usize, count: usize },
    #[error("pivot limit of {0} reached")]
    PivotLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    /// Some cut of the input cannot reach the demand even with every edge
    /// taken. `witness` is that cut, in original node ids.
    #[error(
        "instance infeasible: cut {{{}}} has capacity {capacity} < {demand}",
        one_based(witness)
    )]
    Infeasible {
        witness: BTreeSet<NodeId>,
        capacity: Rational,
        demand: i64,
    },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("iteration cap of {0} reached")]
    IterationCap(usize),
    #[error("separation did not converge within {0} rounds")]
    SeparationCap(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("no feasible solution")]
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("solution does not match instance: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
