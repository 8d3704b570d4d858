//! Multigraph with contraction, cut-degree queries and the laminar
//! contraction forest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::GraphError;
use crate::rational::Rational;

/// A node of the current graph. Original nodes are `0..n0`; every contraction
/// mints a fresh id that is never reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// An original edge. The id is the edge's position in the input and survives
/// every contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0 + 1)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0 + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub cost: Rational,
}

impl Edge {
    pub fn other(&self, w: NodeId) -> NodeId {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn crosses(&self, side: &BTreeSet<NodeId>) -> bool {
        side.contains(&self.u) != side.contains(&self.v)
    }
}

/// A nonempty proper subset of the current nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cut {
    members: BTreeSet<NodeId>,
}

impl Cut {
    /// Validates `members` against `g`.
    pub fn new(
        g: &MultiGraph,
        members: impl IntoIterator<Item = NodeId>,
    ) -> Result<Cut, GraphError> {
        let members: BTreeSet<NodeId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(GraphError::InvalidCut("empty".into()));
        }
        if let Some(dead) = members.iter().find(|v| !g.has_node(**v)) {
            return Err(GraphError::InvalidCut(format!("{dead} is not a live node")));
        }
        if members.len() == g.node_count() {
            return Err(GraphError::InvalidCut("contains every node".into()));
        }
        Ok(Cut { members })
    }

    /// No validation. Callers guarantee `∅ ≠ members ⊂ V`.
    pub(crate) fn from_set(members: BTreeSet<NodeId>) -> Cut {
        debug_assert!(!members.is_empty());
        Cut { members }
    }

    pub fn members(&self) -> &BTreeSet<NodeId> {
        &self.members
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn singleton(&self) -> Option<NodeId> {
        if self.members.len() == 1 {
            self.members.iter().next().copied()
        } else {
            None
        }
    }

    pub fn complement(&self, g: &MultiGraph) -> Cut {
        Cut {
            members: g.nodes().filter(|v| !self.members.contains(v)).collect(),
        }
    }

    /// The side of `{S, V∖S}` that contains the smallest live node. Both sides
    /// carry the same cut constraint, so this is the dedup key.
    pub fn canonical(&self, g: &MultiGraph) -> Cut {
        match g.nodes().next() {
            Some(first) if !self.members.contains(&first) => self.complement(g),
            _ => self.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ForestEntry {
    /// Original nodes merged into `node`.
    pub members: BTreeSet<NodeId>,
    pub node: NodeId,
    pub iteration: usize,
}

/// The laminar family of original-node sets contracted so far.
#[derive(Clone, Debug, Default)]
pub struct ContractionForest {
    entries: Vec<ForestEntry>,
}

fn laminar_pair(a: &BTreeSet<NodeId>, b: &BTreeSet<NodeId>) -> bool {
    a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a)
}

impl ContractionForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[ForestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_laminar(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, a)| {
            self.entries[i + 1..]
                .iter()
                .all(|b| laminar_pair(&a.members, &b.members))
        })
    }

    /// True iff the forest together with `s` (a set of original nodes) is laminar.
    pub fn restrict_laminar_check(&self, s: &BTreeSet<NodeId>) -> bool {
        self.entries.iter().all(|e| laminar_pair(&e.members, s))
    }

    fn push(&mut self, entry: ForestEntry) {
        self.entries.push(entry);
    }
}

/// Free function form of [`ContractionForest::restrict_laminar_check`].
pub fn restrict_laminar_check(forest: &ContractionForest, s: &BTreeSet<NodeId>) -> bool {
    forest.restrict_laminar_check(s)
}

/// Undirected multigraph over rational edge costs. Holds every original edge;
/// edges whose ends have been merged by a contraction are kept in the
/// internalized ledger instead of being dropped.
#[derive(Clone, Debug)]
pub struct MultiGraph {
    nodes: BTreeSet<NodeId>,
    edges: Vec<Edge>,
    internalized: Vec<EdgeId>,
    is_internal: Vec<bool>,
    preimage: BTreeMap<NodeId, BTreeSet<NodeId>>,
    next_id: u32,
    original_nodes: usize,
}

impl MultiGraph {
    /// A graph on original nodes `0..n`.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let nodes: BTreeSet<NodeId> = (0..n as u32).map(NodeId).collect();
        let preimage = nodes.iter().map(|&v| (v, BTreeSet::from([v]))).collect();
        Ok(MultiGraph {
            nodes,
            edges: Vec::new(),
            internalized: Vec::new(),
            is_internal: Vec::new(),
            preimage,
            next_id: n as u32,
            original_nodes: n,
        })
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, cost: Rational) -> Result<EdgeId, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.has_node(w) {
                return Err(GraphError::UnknownNode(w));
            }
        }
        if cost.is_negative() {
            return Err(GraphError::NegativeCost(cost));
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { id, u, v, cost });
        self.is_internal.push(false);
        Ok(id)
    }

    pub fn original_node_count(&self) -> usize {
        self.original_nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn node_set(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn has_node(&self, v: NodeId) -> bool {
        self.nodes.contains(&v)
    }

    /// Every original edge, live or internalized, indexed by id.
    pub fn all_edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0 as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges that still have two distinct ends.
    pub fn live_edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges
            .iter()
            .filter(|e| !self.is_internal[e.id.0 as usize])
    }

    pub fn is_live(&self, e: EdgeId) -> bool {
        !self.is_internal[e.0 as usize]
    }

    pub fn internalized(&self) -> &[EdgeId] {
        &self.internalized
    }

    /// Original nodes represented by `v`.
    pub fn preimage(&self, v: NodeId) -> &BTreeSet<NodeId> {
        &self.preimage[&v]
    }

    pub fn preimage_of(&self, s: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
        s.iter()
            .flat_map(|v| self.preimage[v].iter().copied())
            .collect()
    }

    pub fn total_cost(&self) -> Rational {
        self.edges.iter().map(|e| &e.cost).sum()
    }

    /// `d_F(S)`: edges of `edge_subset` with exactly one end in `s`.
    pub fn cut_degree<'a>(
        &self,
        edge_subset: impl IntoIterator<Item = &'a EdgeId>,
        s: &Cut,
    ) -> usize {
        edge_subset
            .into_iter()
            .filter(|e| self.is_live(**e) && self.edge(**e).crosses(&s.members))
            .count()
    }

    /// `d_F(u, v)`: edges of `edge_subset` joining `u` and `v`.
    pub fn pair_degree<'a>(
        &self,
        edge_subset: impl IntoIterator<Item = &'a EdgeId>,
        u: NodeId,
        v: NodeId,
    ) -> usize {
        edge_subset
            .into_iter()
            .filter(|e| {
                let e = self.edge(**e);
                self.is_live(e.id) && ((e.u == u && e.v == v) || (e.u == v && e.v == u))
            })
            .count()
    }

    /// Identify the nodes of `c_set` into one fresh node. Edges with one end in
    /// the set are re-attached to it; edges with both ends inside become
    /// internalized. The original-node preimage is appended to `forest`.
    pub fn contract(
        &mut self,
        c_set: &Cut,
        forest: &mut ContractionForest,
        iteration: usize,
    ) -> Result<NodeId, GraphError> {
        let members = c_set.members();
        if members.is_empty() || members.len() >= self.nodes.len() {
            return Err(GraphError::InvalidCut("not a proper subset".into()));
        }
        if let Some(dead) = members.iter().find(|v| !self.has_node(**v)) {
            return Err(GraphError::InvalidCut(format!("{dead} is not a live node")));
        }
        let fresh = NodeId(self.next_id);
        self.next_id += 1;

        let mut image = BTreeSet::new();
        for v in members {
            self.nodes.remove(v);
            image.extend(self.preimage.remove(v).expect("live node has a preimage"));
        }
        self.nodes.insert(fresh);
        self.preimage.insert(fresh, image.clone());

        for (idx, e) in self.edges.iter_mut().enumerate() {
            if self.is_internal[idx] {
                continue;
            }
            let iu = members.contains(&e.u);
            let iv = members.contains(&e.v);
            if iu {
                e.u = fresh;
            }
            if iv {
                e.v = fresh;
            }
            if iu && iv {
                self.is_internal[idx] = true;
                self.internalized.push(e.id);
            }
        }

        forest.push(ForestEntry {
            members: image,
            node: fresh,
            iteration,
        });
        debug_assert!(forest.is_laminar());
        Ok(fresh)
    }

    /// Connected components over live edges drawn from `edge_subset`.
    pub fn is_connected_by<'a>(&self, edge_subset: impl IntoIterator<Item = &'a EdgeId>) -> bool {
        let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for e in edge_subset {
            if !self.is_live(*e) {
                continue;
            }
            let e = self.edge(*e);
            adj.entry(e.u).or_default().push(e.v);
            adj.entry(e.v).or_default().push(e.u);
        }
        let Some(start) = self.nodes().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in adj.get(&v).into_iter().flatten() {
                if seen.insert(*w) {
                    stack.push(*w);
                }
            }
        }
        seen.len() == self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n(i: u32) -> NodeId {
        NodeId(i)
    }

    fn triangle() -> MultiGraph {
        let mut g = MultiGraph::new(3).unwrap();
        g.add_edge(n(0), n(1), 1.into()).unwrap(); // ab
        g.add_edge(n(1), n(2), 1.into()).unwrap(); // bc
        g.add_edge(n(2), n(0), 1.into()).unwrap(); // ca
        g
    }

    fn random_graph(seed: u64, nodes: usize, edges: usize) -> MultiGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = MultiGraph::new(nodes).unwrap();
        while g.edge_count() < edges {
            let u = rng.gen_range(0..nodes as u32);
            let v = rng.gen_range(0..nodes as u32);
            if u != v {
                g.add_edge(n(u), n(v), Rational::from_int(rng.gen_range(0..10)))
                    .unwrap();
            }
        }
        g
    }

    fn all_ids(g: &MultiGraph) -> Vec<EdgeId> {
        g.all_edges().iter().map(|e| e.id).collect()
    }

    #[test]
    fn singleton_contraction_is_a_relabeling() {
        let mut g = triangle();
        let mut forest = ContractionForest::new();
        let cut = Cut::new(&g, [n(0)]).unwrap();
        let fresh = g.contract(&cut, &mut forest, 0).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.live_edges().count(), 3);
        assert!(g.internalized().is_empty());
        assert_eq!(g.edge(EdgeId(0)).u, fresh);
        assert_eq!(g.edge(EdgeId(2)).v, fresh);
        assert_eq!(forest.entries()[0].members, BTreeSet::from([n(0)]));
    }

    #[test]
    fn contracting_an_edge_of_a_triangle() {
        let mut g = triangle();
        let mut forest = ContractionForest::new();
        let cut = Cut::new(&g, [n(0), n(1)]).unwrap();
        let vc = g.contract(&cut, &mut forest, 0).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.internalized(), &[EdgeId(0)]);
        let ids = all_ids(&g);
        assert_eq!(g.pair_degree(&ids, vc, n(2)), 2);
        assert_eq!(g.live_edges().count(), 2);
    }

    #[test]
    fn chained_contractions_stay_laminar() {
        let mut g = random_graph(3, 5, 9);
        let mut forest = ContractionForest::new();
        let a = g
            .contract(&Cut::new(&g, [n(0), n(1)]).unwrap(), &mut forest, 0)
            .unwrap();
        g.contract(&Cut::new(&g, [a, n(3)]).unwrap(), &mut forest, 1)
            .unwrap();
        assert_eq!(forest.len(), 2);
        // pairwise intersection oracle
        let e = forest.entries();
        let (x, y) = (&e[0].members, &e[1].members);
        let inter: BTreeSet<_> = x.intersection(y).collect();
        assert!(inter.is_empty() || inter.len() == x.len() || inter.len() == y.len());
        assert!(forest.is_laminar());
        assert_eq!(*y, BTreeSet::from([n(0), n(1), n(3)]));
    }

    #[test]
    fn invalid_cuts_are_rejected() {
        let g = triangle();
        assert!(Cut::new(&g, []).is_err());
        assert!(Cut::new(&g, [n(0), n(1), n(2)]).is_err());
        assert!(Cut::new(&g, [n(9)]).is_err());
        let mut g2 = triangle();
        let mut forest = ContractionForest::new();
        g2.contract(&Cut::new(&g2, [n(0), n(1)]).unwrap(), &mut forest, 0)
            .unwrap();
        // n(0) is dead now
        assert!(Cut::new(&g2, [n(0)]).is_err());
        let stale = Cut::from_set(BTreeSet::from([n(0)]));
        assert!(g2.contract(&stale, &mut forest, 1).is_err());
    }

    #[test]
    fn self_loops_and_negative_costs_are_rejected() {
        let mut g = MultiGraph::new(2).unwrap();
        assert!(matches!(
            g.add_edge(n(1), n(1), 1.into()),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(g.add_edge(n(0), n(1), Rational::from_int(-1)).is_err());
        assert!(MultiGraph::new(0).is_err());
    }

    #[test]
    fn four_cycle_adjacent_pair_has_degree_two() {
        let mut g = MultiGraph::new(4).unwrap();
        for i in 0..4 {
            g.add_edge(n(i), n((i + 1) % 4), 1.into()).unwrap();
        }
        let ids = all_ids(&g);
        let s = Cut::new(&g, [n(0), n(1)]).unwrap();
        assert_eq!(g.cut_degree(&ids, &s), 2);
        assert_eq!(g.cut_degree(&[], &s), 0);
    }

    #[test]
    fn parallel_and_nonadjacent_pair_degree() {
        let mut g = MultiGraph::new(3).unwrap();
        for _ in 0..3 {
            g.add_edge(n(0), n(1), 1.into()).unwrap();
        }
        let ids = all_ids(&g);
        assert_eq!(g.pair_degree(&ids, n(0), n(1)), 3);
        assert_eq!(g.pair_degree(&ids, n(1), n(0)), 3);
        assert_eq!(g.pair_degree(&ids, n(0), n(2)), 0);
    }

    #[test]
    fn pair_degree_follows_remapped_endpoints() {
        let mut g = random_graph(11, 6, 14);
        let before: Vec<Edge> = g.all_edges().to_vec();
        let mut forest = ContractionForest::new();
        let c = BTreeSet::from([n(0), n(2)]);
        let vc = g
            .contract(&Cut::new(&g, c.iter().copied()).unwrap(), &mut forest, 0)
            .unwrap();
        let ids = all_ids(&g);
        let map = |w: NodeId| if c.contains(&w) { vc } else { w };
        for other in [n(1), n(3), n(4), n(5)] {
            let expected = before
                .iter()
                .filter(|e| {
                    let (a, b) = (map(e.u), map(e.v));
                    a != b && ((a == vc && b == other) || (a == other && b == vc))
                })
                .count();
            assert_eq!(g.pair_degree(&ids, vc, other), expected);
        }
    }

    #[test]
    fn laminar_check_examples() {
        let forest = ContractionForest::new();
        assert!(forest.restrict_laminar_check(&BTreeSet::from([n(1), n(2)])));
        let mut g = MultiGraph::new(4).unwrap();
        g.add_edge(n(1), n(2), 1.into()).unwrap();
        let mut forest = ContractionForest::new();
        g.contract(&Cut::new(&g, [n(1), n(2)]).unwrap(), &mut forest, 0)
            .unwrap();
        assert!(!restrict_laminar_check(
            &forest,
            &BTreeSet::from([n(2), n(3)])
        ));
        assert!(restrict_laminar_check(
            &forest,
            &BTreeSet::from([n(1), n(2), n(3)])
        ));
        assert!(restrict_laminar_check(&forest, &BTreeSet::from([n(0)])));
    }

    proptest! {
        #[test]
        fn cut_degree_matches_scan_and_is_symmetric(seed in 0u64..500, mask in 1u32..255) {
            let g = random_graph(seed, 8, 20);
            let members: Vec<NodeId> = (0..8).filter(|i| mask & (1 << i) != 0).map(n).collect();
            let s = Cut::new(&g, members.clone()).unwrap();
            let ids = all_ids(&g);
            let brute = g.all_edges().iter()
                .filter(|e| members.contains(&e.u) != members.contains(&e.v))
                .count();
            prop_assert_eq!(g.cut_degree(&ids, &s), brute);
            prop_assert_eq!(g.cut_degree(&ids, &s.complement(&g)), brute);
        }

        #[test]
        fn contraction_partitions_edges_and_keeps_forest_laminar(seed in 0u64..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = random_graph(seed, 9, 18);
            let total = g.total_cost();
            let mut forest = ContractionForest::new();
            for it in 0..6 {
                if g.node_count() < 2 {
                    break;
                }
                let nodes: Vec<NodeId> = g.nodes().collect();
                let size = rng.gen_range(1..nodes.len());
                let mut pick = nodes.clone();
                for i in (1..pick.len()).rev() {
                    pick.swap(i, rng.gen_range(0..=i));
                }
                pick.truncate(size);
                g.contract(&Cut::new(&g, pick).unwrap(), &mut forest, it).unwrap();
                prop_assert!(forest.is_laminar());
                prop_assert!(forest.len() < 2 * g.original_node_count());
                let live: Rational = g.live_edges().map(|e| &e.cost).sum();
                let inner: Rational = g.internalized().iter().map(|e| &g.edge(*e).cost).sum();
                prop_assert_eq!(&live + &inner, total.clone());
                prop_assert!(g.live_edges().all(|e| e.u != e.v && g.has_node(e.u) && g.has_node(e.v)));
            }
        }
    }
}
