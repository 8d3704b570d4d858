//! Exact max-flow/min-cut, the cut separation oracle, x-core search and
//! global minimum cuts.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::{Add, Sub};

use num_traits::Zero;

use crate::error::GraphError;
use crate::graph::{Cut, EdgeId, MultiGraph, NodeId};
use crate::rational::Rational;
use crate::state::SolverState;

/// Anything that can serve as an edge capacity in an augmenting-path flow.
pub trait Capacity: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl<T: Clone + Ord + Zero + Add<Output = T> + Sub<Output = T>> Capacity for T {}

/// Undirected network on dense node indices with a symmetric capacity matrix.
#[derive(Clone, Debug)]
pub struct FlowNetwork<C> {
    cap: Vec<Vec<C>>,
}

impl<C: Capacity> FlowNetwork<C> {
    pub fn new(n: usize) -> Self {
        FlowNetwork {
            cap: vec![vec![C::zero(); n]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.cap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cap.is_empty()
    }

    pub fn add_undirected(&mut self, u: usize, v: usize, c: C) {
        debug_assert_ne!(u, v);
        let new = self.cap[u][v].clone() + c;
        self.cap[u][v] = new.clone();
        self.cap[v][u] = new;
    }

    pub fn capacity(&self, u: usize, v: usize) -> &C {
        &self.cap[u][v]
    }

    /// Total capacity of edges leaving `side`.
    pub fn cut_value(&self, side: &[bool]) -> C {
        let n = self.len();
        let mut total = C::zero();
        for u in 0..n {
            if !side[u] {
                continue;
            }
            for (v, inside) in side.iter().enumerate().take(n) {
                if !inside && !self.cap[u][v].is_zero() {
                    total = total + self.cap[u][v].clone();
                }
            }
        }
        total
    }

    /// Edmonds–Karp from the merged `sources` to the merged `sinks`. Returns the
    /// flow value and the nodes reachable from the sources in the final
    /// residual network, which is the inclusion-minimal minimum cut.
    pub fn max_flow(&self, sources: &[usize], sinks: &[usize]) -> (C, Vec<bool>) {
        let n = self.len();
        let mut residual = self.cap.clone();
        let mut is_sink = vec![false; n];
        for &t in sinks {
            is_sink[t] = true;
        }
        debug_assert!(sources.iter().all(|s| !is_sink[*s]));
        let mut value = C::zero();
        loop {
            let mut parent = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            let mut queue = VecDeque::new();
            for &s in sources {
                seen[s] = true;
                queue.push_back(s);
            }
            let mut reached = None;
            'bfs: while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if !seen[v] && !residual[u][v].is_zero() {
                        seen[v] = true;
                        parent[v] = u;
                        if is_sink[v] {
                            reached = Some(v);
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            let Some(t) = reached else {
                return (value, seen);
            };
            let mut bottleneck: Option<C> = None;
            let mut v = t;
            while parent[v] != usize::MAX {
                let u = parent[v];
                let r = residual[u][v].clone();
                bottleneck = Some(match bottleneck {
                    Some(b) if b < r => b,
                    _ => r,
                });
                v = u;
            }
            let b = bottleneck.expect("path has an edge");
            let mut v = t;
            while parent[v] != usize::MAX {
                let u = parent[v];
                residual[u][v] = residual[u][v].clone() - b.clone();
                residual[v][u] = residual[v][u].clone() + b.clone();
                v = u;
            }
            value = value + b;
        }
    }
}

/// Per-edge capacities derived from a solver state and an LP point:
/// `x_e` on `E`, 1 on `I`, and the variant's ghost weight on `H`.
#[derive(Clone, Debug)]
pub struct CapacityAssignment {
    nodes: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    network: FlowNetwork<Rational>,
    ghost_weight: i64,
}

impl CapacityAssignment {
    pub fn from_state(state: &SolverState, x: &BTreeMap<EdgeId, Rational>) -> Self {
        let nodes: Vec<NodeId> = state.graph.nodes().collect();
        let index: BTreeMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut network = FlowNetwork::new(nodes.len());
        let g = &state.graph;
        for e in &state.frac {
            let edge = g.edge(*e);
            if g.is_live(*e) {
                let w = x.get(e).cloned().unwrap_or_default();
                if !w.is_zero() {
                    network.add_undirected(index[&edge.u], index[&edge.v], w);
                }
            }
        }
        for e in &state.integral {
            let edge = g.edge(*e);
            if g.is_live(*e) {
                network.add_undirected(index[&edge.u], index[&edge.v], Rational::one());
            }
        }
        let gw = state.variant.ghost_weight();
        for h in state.ghosts.iter().filter(|h| !h.is_loop()) {
            network.add_undirected(index[&h.u], index[&h.v], Rational::from_int(gw));
        }
        CapacityAssignment {
            nodes,
            index,
            network,
            ghost_weight: gw,
        }
    }

    pub fn ghost_weight(&self) -> i64 {
        self.ghost_weight
    }

    pub fn network(&self) -> &FlowNetwork<Rational> {
        &self.network
    }

    pub fn index_of(&self, v: NodeId) -> usize {
        self.index[&v]
    }

    pub fn node_at(&self, i: usize) -> NodeId {
        self.nodes[i]
    }

    fn side_to_set(&self, side: &[bool]) -> BTreeSet<NodeId> {
        side.iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(i, _)| self.nodes[i])
            .collect()
    }

    pub fn capacity_of(&self, s: &Cut) -> Rational {
        let side: Vec<bool> = self.nodes.iter().map(|v| s.contains(*v)).collect();
        self.network.cut_value(&side)
    }
}

/// `max_flow(g, caps, s, t)`: exact flow value and the minimal source-side cut.
pub fn max_flow(
    g: &MultiGraph,
    caps: &CapacityAssignment,
    s: NodeId,
    t: NodeId,
) -> (Rational, Cut) {
    assert!(s != t && g.has_node(s) && g.has_node(t));
    let (value, side) = caps
        .network
        .max_flow(&[caps.index_of(s)], &[caps.index_of(t)]);
    (value, Cut::from_set(caps.side_to_set(&side)))
}

/// Min-cut queries restricted to cuts where neither side is a single node of
/// `U`.
struct RestrictedCuts<'a> {
    caps: &'a CapacityAssignment,
    relaxed: Vec<bool>,
}

impl<'a> RestrictedCuts<'a> {
    fn new(state: &SolverState, caps: &'a CapacityAssignment) -> Self {
        let relaxed = caps
            .nodes
            .iter()
            .map(|v| state.relaxed.contains(v))
            .collect();
        RestrictedCuts { caps, relaxed }
    }

    fn excluded(&self, side: &[bool]) -> bool {
        let inside = side.iter().filter(|s| **s).count();
        let n = side.len();
        if inside == 1 {
            let u = side.iter().position(|s| *s).unwrap();
            if self.relaxed[u] {
                return true;
            }
        }
        if inside + 1 == n {
            let u = side.iter().position(|s| !*s).unwrap();
            if self.relaxed[u] {
                return true;
            }
        }
        false
    }

    fn plain(&self, s: usize, t: usize) -> (Rational, Vec<bool>) {
        self.caps.network.max_flow(&[s], &[t])
    }

    /// Minimal minimum cuts over every way of giving a relaxed endpoint a
    /// partner on its own side. Together they cover every non-excluded
    /// `st`-cut.
    fn forced(&self, s: usize, t: usize) -> Vec<(Rational, Vec<bool>)> {
        let n = self.relaxed.len();
        let others: Vec<usize> = (0..n).filter(|v| *v != s && *v != t).collect();
        let src_partners: Vec<Option<usize>> = if self.relaxed[s] {
            others.iter().map(|a| Some(*a)).collect()
        } else {
            vec![None]
        };
        let sink_partners: Vec<Option<usize>> = if self.relaxed[t] {
            others.iter().map(|b| Some(*b)).collect()
        } else {
            vec![None]
        };
        let mut out = Vec::new();
        for a in &src_partners {
            for b in &sink_partners {
                if a.is_some() && a == b {
                    continue;
                }
                let mut sources = vec![s];
                sources.extend(a);
                let mut sinks = vec![t];
                sinks.extend(b);
                let (val, side) = self.caps.network.max_flow(&sources, &sinks);
                debug_assert!(!self.excluded(&side));
                out.push((val, side));
            }
        }
        out
    }
}

fn verified_violation(state: &SolverState, x: &BTreeMap<EdgeId, Rational>, cut: &Cut) -> bool {
    state.frac_load(x, cut) < Rational::from_int(state.eval_f(cut))
}

/// Every violated cut the oracle encounters in one pass, canonicalized and
/// deduplicated. Empty iff `x` satisfies every cut constraint.
pub fn violated_cuts(state: &SolverState, x: &BTreeMap<EdgeId, Rational>) -> Vec<Cut> {
    let g = &state.graph;
    let n = g.node_count();
    if n < 2 {
        return Vec::new();
    }
    let mut found: Vec<Cut> = Vec::new();
    let mut seen: BTreeSet<Cut> = BTreeSet::new();
    let mut push = |cut: Cut, found: &mut Vec<Cut>| {
        let cut = cut.canonical(g);
        if seen.insert(cut.clone()) {
            found.push(cut);
        }
    };

    for v in g.nodes() {
        let cut = Cut::from_set(BTreeSet::from([v]));
        if verified_violation(state, x, &cut) {
            push(cut, &mut found);
        }
    }

    let caps = CapacityAssignment::from_state(state, x);
    let rc = RestrictedCuts::new(state, &caps);
    let k = Rational::from_int(state.k);
    let root = (0..n).find(|i| !rc.relaxed[*i]).unwrap_or(0);
    for t in (0..n).filter(|t| *t != root) {
        let (val, side) = rc.plain(root, t);
        if val >= k {
            continue;
        }
        let candidate = if !rc.excluded(&side) {
            Some(side)
        } else {
            rc.forced(root, t)
                .into_iter()
                .find(|(v, _)| *v < k)
                .map(|(_, s)| s)
        };
        if let Some(side) = candidate {
            let cut = Cut::from_set(caps.side_to_set(&side));
            debug_assert!(verified_violation(state, x, &cut));
            if verified_violation(state, x, &cut) {
                push(cut, &mut found);
            }
        }
    }
    found
}

/// Some cut with `x(δ_E(S)) < f(S)`, or `None` when `x` is feasible.
pub fn separate(state: &SolverState, x: &BTreeMap<EdgeId, Rational>) -> Option<Cut> {
    violated_cuts(state, x).into_iter().next()
}

/// An inclusion-minimal f-positive x-tight set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreCandidate {
    pub members: Cut,
    /// `w(δ(C))` under the state's capacity assignment.
    pub capacity: Rational,
    /// `d_E(C)`
    pub frac_degree: usize,
    pub f_value: i64,
    /// `x(δ_E(C))`
    pub frac_load: Rational,
}

/// All x-cores, in discovery order: the minimal capacity-`k` cuts of ordered
/// pairs `(s, t)` for `st ∈ E` by ascending edge id. Sets where either side
/// is a single relaxed node are never reported.
pub fn find_cores(state: &SolverState, x: &BTreeMap<EdgeId, Rational>) -> Vec<CoreCandidate> {
    let g = &state.graph;
    if g.node_count() < 2 {
        return Vec::new();
    }
    let caps = CapacityAssignment::from_state(state, x);
    let rc = RestrictedCuts::new(state, &caps);
    let k = Rational::from_int(state.k);

    let mut candidates: Vec<BTreeSet<NodeId>> = Vec::new();
    let mut seen: BTreeSet<BTreeSet<NodeId>> = BTreeSet::new();
    let mut add = |set: BTreeSet<NodeId>, candidates: &mut Vec<BTreeSet<NodeId>>| {
        if seen.insert(set.clone()) {
            candidates.push(set);
        }
    };

    let mut pairs_done: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in &state.frac {
        if !g.is_live(*e) {
            continue;
        }
        let edge = g.edge(*e);
        let (iu, iv) = (caps.index_of(edge.u), caps.index_of(edge.v));
        for (s, t) in [(iu, iv), (iv, iu)] {
            if !pairs_done.insert((s, t)) {
                continue;
            }
            let (val, side) = rc.plain(s, t);
            if val > k {
                continue;
            }
            if val == k && !rc.excluded(&side) {
                add(caps.side_to_set(&side), &mut candidates);
                continue;
            }
            for (v2, side2) in rc.forced(s, t) {
                if v2 == k {
                    add(caps.side_to_set(&side2), &mut candidates);
                }
            }
        }
    }

    // re-verify f-positivity and tightness directly, then keep the minimal ones
    let verified: Vec<CoreCandidate> = candidates
        .into_iter()
        .filter_map(|set| {
            let cut = Cut::from_set(set);
            let f_value = state.eval_f(&cut);
            let frac_load = state.frac_load(x, &cut);
            if f_value <= 0 || frac_load != Rational::from_int(f_value) {
                return None;
            }
            Some(CoreCandidate {
                capacity: caps.capacity_of(&cut),
                frac_degree: state.frac_degree(&cut),
                members: cut,
                f_value,
                frac_load,
            })
        })
        .collect();
    verified
        .iter()
        .filter(|c| {
            !verified.iter().any(|d| {
                d.members.len() < c.members.len()
                    && d.members.members().is_subset(c.members.members())
            })
        })
        .cloned()
        .collect()
}

/// Global minimum cut of a graph on dense nodes `0..n` with integer weights,
/// by `n - 1` max-flows from node 0. Returns the value and the side not
/// containing node 0.
pub fn global_min_cut_dense(
    n: usize,
    edges: &[(usize, usize, i64)],
) -> Result<(i64, Vec<usize>), GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidCut(
            "global min cut needs two nodes".into(),
        ));
    }
    let mut net: FlowNetwork<i64> = FlowNetwork::new(n);
    for &(u, v, w) in edges {
        if u != v && w != 0 {
            net.add_undirected(u, v, w);
        }
    }
    let mut best: Option<(i64, Vec<usize>)> = None;
    for t in 1..n {
        let (val, side) = net.max_flow(&[0], &[t]);
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            let sink_side = (0..n).filter(|i| !side[*i]).collect();
            best = Some((val, sink_side));
        }
    }
    Ok(best.unwrap())
}

/// Global minimum cut of `g` where edge `e` counts `weights[e]` times.
/// Edges absent from `weights` count zero.
pub fn global_min_cut(
    g: &MultiGraph,
    weights: &BTreeMap<EdgeId, i64>,
) -> Result<(i64, Cut), GraphError> {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let edges: Vec<(usize, usize, i64)> = weights
        .iter()
        .filter(|(e, _)| g.is_live(**e))
        .map(|(e, w)| {
            let edge = g.edge(*e);
            (index[&edge.u], index[&edge.v], *w)
        })
        .collect();
    let (val, side) = global_min_cut_dense(nodes.len(), &edges)?;
    Ok((
        val,
        Cut::from_set(side.into_iter().map(|i| nodes[i]).collect()),
    ))
}
