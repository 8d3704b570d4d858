//! The evolving solver state: current contracted graph, integral edges `I`,
//! ghost edges `H`, relaxed nodes `U`, and the residual cut requirement `f`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::graph::{ContractionForest, Cut, EdgeId, MultiGraph, NodeId};
use crate::rational::Rational;

/// Which bicriteria algorithm drives the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Cost at most the Cut-LP value, connectivity at least `k - 4`.
    Bicriteria1,
    /// Cost at most 3/2 of the Cut-LP value, connectivity at least `k - 2`.
    Bicriteria2,
}

impl Variant {
    /// Capacity of a ghost edge in cut constraints.
    pub fn ghost_weight(self) -> i64 {
        match self {
            Variant::Bicriteria1 => 2,
            Variant::Bicriteria2 => 1,
        }
    }

    /// Extra relaxation of a singleton cut `{u}` with `u ∈ U`.
    pub fn singleton_relief(self) -> i64 {
        match self {
            Variant::Bicriteria1 => 2,
            Variant::Bicriteria2 => 1,
        }
    }

    /// Minimum number of parallel integral edges that back a ghost edge:
    /// `⌈(k-3)/2⌉` or `⌈(k-1)/2⌉`.
    pub fn mu(self, k: i64) -> i64 {
        let num = match self {
            Variant::Bicriteria1 => k - 3,
            Variant::Bicriteria2 => k - 1,
        };
        num.div_euclid(2) + i64::from(num.rem_euclid(2) != 0)
    }

    /// Edges with `x_e` at or above this value are rounded into `I`.
    pub fn rounding_threshold(self) -> Rational {
        match self {
            Variant::Bicriteria1 => Rational::one(),
            Variant::Bicriteria2 => Rational::new(2, 3),
        }
    }

    /// Guaranteed connectivity `k - 4` or `k - 2`, floored at zero.
    pub fn connectivity_bound(self, k: i64) -> i64 {
        let loss = match self {
            Variant::Bicriteria1 => 4,
            Variant::Bicriteria2 => 2,
        };
        (k - loss).max(0)
    }

    /// Cost factor against the initial LP value.
    pub fn cost_factor(self) -> Rational {
        match self {
            Variant::Bicriteria1 => Rational::one(),
            Variant::Bicriteria2 => Rational::new(3, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Bicriteria1 => "bicriteria1",
            Variant::Bicriteria2 => "bicriteria2",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bicriteria1" => Ok(Variant::Bicriteria1),
            "bicriteria2" => Ok(Variant::Bicriteria2),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhostEdge {
    pub u: NodeId,
    pub v: NodeId,
    /// The integral `uv`-edges present when the ghost edge was created.
    pub witness: BTreeSet<EdgeId>,
    pub iteration: usize,
}

impl GhostEdge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn crosses(&self, side: &BTreeSet<NodeId>) -> bool {
        side.contains(&self.u) != side.contains(&self.v)
    }

    pub fn joins(&self, a: NodeId, b: NodeId) -> bool {
        (self.u == a && self.v == b) || (self.u == b && self.v == a)
    }
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub graph: MultiGraph,
    /// `E`: edges still carrying an LP variable.
    pub frac: BTreeSet<EdgeId>,
    /// `I`: edges fixed into the solution.
    pub integral: BTreeSet<EdgeId>,
    /// Edges removed with `x_e = 0`, or swallowed by a contraction.
    pub dropped: BTreeSet<EdgeId>,
    /// `H`
    pub ghosts: Vec<GhostEdge>,
    /// `U`
    pub relaxed: BTreeSet<NodeId>,
    pub forest: ContractionForest,
    pub k: i64,
    pub mu: i64,
    pub variant: Variant,
    pub iteration: usize,
}

impl SolverState {
    pub fn new(graph: MultiGraph, k: i64, variant: Variant) -> Self {
        let frac = graph.all_edges().iter().map(|e| e.id).collect();
        SolverState {
            graph,
            frac,
            integral: BTreeSet::new(),
            dropped: BTreeSet::new(),
            ghosts: Vec::new(),
            relaxed: BTreeSet::new(),
            forest: ContractionForest::new(),
            k,
            mu: variant.mu(k),
            variant,
            iteration: 0,
        }
    }

    /// `d_H(S)` over non-loop ghost edges.
    pub fn ghost_degree(&self, side: &BTreeSet<NodeId>) -> usize {
        self.ghosts
            .iter()
            .filter(|h| !h.is_loop() && h.crosses(side))
            .count()
    }

    pub fn ghost_pair_degree(&self, u: NodeId, v: NodeId) -> usize {
        self.ghosts
            .iter()
            .filter(|h| !h.is_loop() && h.joins(u, v))
            .count()
    }

    pub fn integral_degree(&self, s: &Cut) -> usize {
        self.graph.cut_degree(&self.integral, s)
    }

    pub fn frac_degree(&self, s: &Cut) -> usize {
        self.graph.cut_degree(&self.frac, s)
    }

    /// True iff `s` or its complement is `{u}` for some `u ∈ U`.
    pub fn is_relaxed_singleton(&self, s: &Cut) -> bool {
        if let Some(u) = s.singleton() {
            if self.relaxed.contains(&u) {
                return true;
            }
        }
        if s.len() + 1 == self.graph.node_count() {
            if let Some(u) = self.graph.nodes().find(|v| !s.contains(*v)) {
                return self.relaxed.contains(&u);
            }
        }
        false
    }

    /// The residual requirement of `s`.
    pub fn eval_f(&self, s: &Cut) -> i64 {
        let base = self.k
            - self.integral_degree(s) as i64
            - self.variant.ghost_weight() * self.ghost_degree(s.members()) as i64;
        if self.is_relaxed_singleton(s) {
            base - self.variant.singleton_relief()
        } else {
            base
        }
    }

    /// `x(δ_E(S))`.
    pub fn frac_load(&self, x: &BTreeMap<EdgeId, Rational>, s: &Cut) -> Rational {
        self.frac
            .iter()
            .filter(|e| self.graph.edge(**e).crosses(s.members()))
            .map(|e| x.get(e).cloned().unwrap_or_default())
            .sum()
    }

    pub fn integral_cost(&self) -> Rational {
        self.integral
            .iter()
            .map(|e| &self.graph.edge(*e).cost)
            .sum()
    }
}

/// Free-function form of [`SolverState::eval_f`].
pub fn eval_f(state: &SolverState, s: &Cut) -> i64 {
    state.eval_f(s)
}
