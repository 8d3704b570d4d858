//! Independent checking: the invariant ledger, certificates, exhaustive
//! optimum search and the fully enumerated Cut-LP.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{LpError, OracleError};
use crate::format::instance_digest;
use crate::graph::{EdgeId, MultiGraph};
use crate::lp::simplex::{LinearProgram, Row, Tableau};
use crate::mincut::global_min_cut_dense;
use crate::rational::Rational;
use crate::state::Variant;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub name: String,
    pub iteration: usize,
    pub pass: bool,
    pub detail: String,
}

/// Append-only record of every invariant check made during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger::default()
    }

    pub fn record(&mut self, name: &str, iteration: usize, pass: bool, detail: impl Into<String>) {
        self.entries.push(LedgerEntry {
            name: name.to_string(),
            iteration,
            pass,
            detail: detail.into(),
        });
    }

    pub fn pass(&mut self, name: &str, iteration: usize) {
        self.record(name, iteration, true, "");
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn count(&self, name: &str) -> usize {
        self.entries.iter().filter(|e| e.name == name).count()
    }

    pub fn extend(&mut self, other: Ledger) {
        self.entries.extend(other.entries);
    }
}

/// What produced a solution, and so which guarantees it must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Bicriteria(Variant),
    Ecsm,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bicriteria(v) => v.name(),
            Algorithm::Ecsm => "ecsm",
        }
    }

    /// Connectivity the output must reach.
    pub fn connectivity_bound(self, k: i64) -> i64 {
        match self {
            Algorithm::Bicriteria(v) => v.connectivity_bound(k),
            Algorithm::Ecsm => k,
        }
    }

    /// Multiplier on the LP value bounding the cost.
    pub fn cost_factor(self) -> Rational {
        match self {
            Algorithm::Bicriteria(v) => v.cost_factor(),
            Algorithm::Ecsm => Rational::one(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ecsm" => Ok(Algorithm::Ecsm),
            other => other.parse().map(Algorithm::Bicriteria),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub instance_digest: String,
    pub algorithm: Algorithm,
    pub k: i64,
    pub n: usize,
    pub m: usize,
    pub solution_cost: Rational,
    /// For `ecsm`, the LP of the replicated `k + 4` instance.
    pub lp0: Rational,
    pub cost_bound: Rational,
    /// `None` when the graph has a single node and so no cuts.
    pub mincut: Option<i64>,
    pub connectivity_bound: i64,
    pub iterations: usize,
    pub ledger: Ledger,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn cost_ok(&self) -> bool {
        self.solution_cost <= self.cost_bound
    }

    pub fn connectivity_ok(&self) -> bool {
        self.mincut.is_none_or(|c| c >= self.connectivity_bound)
    }

    pub fn is_valid(&self) -> bool {
        self.ledger.all_pass() && self.cost_ok() && self.connectivity_ok()
    }

    /// `key=value` lines, then the ledger block.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| writeln!(out, "{k}={v}").unwrap();
        kv("instance_digest", &self.instance_digest);
        kv("algorithm", &self.algorithm);
        kv("k", &self.k);
        kv("n", &self.n);
        kv("m", &self.m);
        kv("solution_cost", &self.solution_cost);
        kv("lp0", &self.lp0);
        kv("cost_bound", &self.cost_bound);
        match self.mincut {
            Some(c) => kv("mincut", &c),
            None => kv("mincut", &"none"),
        }
        kv("connectivity_bound", &self.connectivity_bound);
        kv("iterations", &self.iterations);
        kv("status", &if self.is_valid() { "VALID" } else { "INVALID" });
        for note in &self.notes {
            kv("note", note);
        }
        out.push_str("ledger:\n");
        for e in self.ledger.entries() {
            if e.pass {
                writeln!(out, "{} {} pass", e.name, e.iteration).unwrap();
            } else {
                writeln!(out, "{} {} fail {}", e.name, e.iteration, e.detail).unwrap();
            }
        }
        out.push_str("end\n");
        out
    }
}

/// Global min cut of `g` with edge `e` taken `mult[e]` times.
pub fn multiset_min_cut(g: &MultiGraph, mult: &BTreeMap<EdgeId, i64>) -> Option<i64> {
    let n = g.node_count();
    if n < 2 {
        return None;
    }
    let edges: Vec<(usize, usize, i64)> = mult
        .iter()
        .map(|(e, w)| {
            let edge = g.edge(*e);
            (edge.u.0 as usize, edge.v.0 as usize, *w)
        })
        .collect();
    Some(global_min_cut_dense(n, &edges).expect("two nodes").0)
}

/// Re-derive cost and connectivity of `chosen` on the original graph and
/// assemble a certificate. `ledger` holds the solver's own checks; failures
/// found here are appended to it.
pub fn certify(
    g0: &MultiGraph,
    k: i64,
    algorithm: Algorithm,
    chosen: &BTreeMap<EdgeId, i64>,
    lp0: &Rational,
    mut ledger: Ledger,
    iterations: usize,
) -> Certificate {
    let known = chosen.keys().all(|e| (e.0 as usize) < g0.edge_count());
    ledger.record(
        "solution_edges_in_instance",
        iterations,
        known,
        "unknown edge id",
    );
    let positive = chosen.values().all(|m| *m >= 1);
    ledger.record(
        "positive_multiplicity",
        iterations,
        positive,
        "multiplicity below one",
    );
    let single = matches!(algorithm, Algorithm::Bicriteria(_));
    if single {
        let ok = chosen.values().all(|m| *m == 1);
        ledger.record("edges_used_once", iterations, ok, "edge repeated");
    }
    let valid: BTreeMap<EdgeId, i64> = chosen
        .iter()
        .filter(|(e, _)| (e.0 as usize) < g0.edge_count())
        .map(|(e, m)| (*e, *m))
        .collect();
    let cost: Rational = valid
        .iter()
        .map(|(e, m)| &g0.edge(*e).cost * &Rational::from_int(*m))
        .sum();
    Certificate {
        instance_digest: instance_digest(g0, k),
        algorithm,
        k,
        n: g0.node_count(),
        m: g0.edge_count(),
        solution_cost: cost,
        lp0: lp0.clone(),
        cost_bound: &algorithm.cost_factor() * lp0,
        mincut: multiset_min_cut(g0, &valid),
        connectivity_bound: algorithm.connectivity_bound(k),
        iterations,
        ledger,
        notes: Vec::new(),
    }
}

pub const BRUTE_FORCE_MAX_EDGES: usize = 20;
pub const ENUMERATION_MAX_NODES: usize = 12;

/// Minimum-cost edge subset whose global min cut is at least `k`, by
/// branch and bound over include/exclude decisions.
pub fn brute_force_opt(
    g0: &MultiGraph,
    k: i64,
) -> Result<(BTreeSet<EdgeId>, Rational), OracleError> {
    let m = g0.edge_count();
    if m > BRUTE_FORCE_MAX_EDGES {
        return Err(OracleError::TooLarge(format!(
            "{m} edges > {BRUTE_FORCE_MAX_EDGES}"
        )));
    }
    let n = g0.node_count();
    if n < 2 || k <= 0 {
        return Ok((BTreeSet::new(), Rational::zero()));
    }
    // expensive edges first, so exclusion decisions prune early
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| {
        g0.all_edges()[*b]
            .cost
            .cmp(&g0.all_edges()[*a].cost)
            .then(a.cmp(b))
    });
    let ends: Vec<(usize, usize)> = g0
        .all_edges()
        .iter()
        .map(|e| (e.u.0 as usize, e.v.0 as usize))
        .collect();

    struct Search<'a> {
        n: usize,
        k: i64,
        g0: &'a MultiGraph,
        order: Vec<usize>,
        ends: Vec<(usize, usize)>,
        excluded: Vec<bool>,
        best: Option<(Vec<bool>, Rational)>,
    }

    impl Search<'_> {
        fn feasible(&self) -> bool {
            let edges: Vec<(usize, usize, i64)> = (0..self.ends.len())
                .filter(|e| !self.excluded[*e])
                .map(|e| (self.ends[e].0, self.ends[e].1, 1))
                .collect();
            global_min_cut_dense(self.n, &edges).unwrap().0 >= self.k
        }

        fn go(&mut self, depth: usize, cost: Rational) {
            if let Some((_, b)) = &self.best {
                if cost >= *b {
                    return;
                }
            }
            if depth == self.order.len() {
                self.best = Some((self.excluded.iter().map(|x| !x).collect(), cost));
                return;
            }
            let e = self.order[depth];
            self.excluded[e] = true;
            if self.feasible() {
                self.go(depth + 1, cost.clone());
            }
            self.excluded[e] = false;
            let c = &cost + &self.g0.all_edges()[e].cost;
            self.go(depth + 1, c);
        }
    }

    let mut s = Search {
        n,
        k,
        g0,
        order,
        ends,
        excluded: vec![false; m],
        best: None,
    };
    if !s.feasible() {
        return Err(OracleError::Infeasible);
    }
    s.go(0, Rational::zero());
    let (mask, cost) = s.best.expect("the full edge set is feasible");
    let chosen = (0..m)
        .filter(|e| mask[*e])
        .map(|e| EdgeId(e as u32))
        .collect();
    Ok((chosen, cost))
}

/// Optimum of the Cut-LP with every cut row written out.
///
/// Solved through its dual `max k·Σy_S - Σz_e` subject to
/// `Σ_{S: e ∈ δ(S)} y_S - z_e ≤ c_e`, which starts feasible at zero and is
/// unbounded exactly when the primal is infeasible.
pub fn lp_by_enumeration(g0: &MultiGraph, k: i64) -> Result<Rational, OracleError> {
    let n = g0.node_count();
    if n > ENUMERATION_MAX_NODES {
        return Err(OracleError::TooLarge(format!(
            "{n} nodes > {ENUMERATION_MAX_NODES}"
        )));
    }
    if n < 2 || k <= 0 {
        return Ok(Rational::zero());
    }
    let m = g0.edge_count();
    // cuts are the subsets of 0..n-1 not containing node n-1
    let cuts: Vec<u32> = (1u32..(1 << (n - 1))).collect();
    let ny = cuts.len();
    let mut objective: Vec<Rational> = vec![Rational::from_int(-k); ny];
    objective.extend(std::iter::repeat_n(Rational::one(), m));
    let mut lp = LinearProgram {
        upper: vec![None; ny + m],
        objective,
        rows: Vec::new(),
    };
    for (j, e) in g0.all_edges().iter().enumerate() {
        let (u, v) = (e.u.0, e.v.0);
        let mut coeffs: Vec<(usize, Rational)> = cuts
            .iter()
            .enumerate()
            .filter(|(_, s)| ((**s >> u) & 1) != ((**s >> v) & 1))
            .map(|(i, _)| (i, Rational::one()))
            .collect();
        coeffs.push((ny + j, Rational::from_int(-1)));
        lp.rows.push(Row::le(coeffs, e.cost.clone()));
    }
    match Tableau::solve(&lp) {
        Ok(t) => Ok(-t.solution().objective),
        Err(LpError::Unbounded) => Err(OracleError::Infeasible),
        Err(other) => panic!("dual of the cut LP starts feasible: {other}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichReport {
    /// `OPT(k - 4)`, present when `k ≥ 5`.
    pub lower: Option<Rational>,
    /// `OPT(k)`, absent when the instance has no `k`-connected subgraph.
    pub upper: Option<Rational>,
    pub cost: Rational,
    pub holds: bool,
}

/// Check `OPT(k - 4) ≤ c(J) ≤ OPT(k)` for a solution of cost `cost`.
pub fn sandwich_check(
    g0: &MultiGraph,
    k: i64,
    cost: &Rational,
) -> Result<SandwichReport, OracleError> {
    let upper = match brute_force_opt(g0, k) {
        Ok((_, c)) => Some(c),
        Err(OracleError::Infeasible) => None,
        Err(e) => return Err(e),
    };
    let lower = if k >= 5 {
        Some(brute_force_opt(g0, k - 4)?.1)
    } else {
        None
    };
    let holds = upper.is_some()
        && lower.as_ref().is_none_or(|l| l <= cost)
        && upper.as_ref().is_none_or(|u| cost <= u);
    Ok(SandwichReport {
        lower,
        upper,
        cost: cost.clone(),
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use crate::lp::cutting_plane::{cutting_plane_extreme_point, CutPool};
    use crate::state::SolverState;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64) -> Rational {
        Rational::from_int(a)
    }

    fn graph(n: usize, edges: &[(u32, u32, i64)]) -> MultiGraph {
        let mut g = MultiGraph::new(n).unwrap();
        for &(u, v, c) in edges {
            g.add_edge(NodeId(u), NodeId(v), c.into()).unwrap();
        }
        g
    }

    fn cycle(n: u32) -> MultiGraph {
        graph(
            n as usize,
            &(0..n).map(|i| (i, (i + 1) % n, 1)).collect::<Vec<_>>(),
        )
    }

    fn k4() -> MultiGraph {
        graph(
            4,
            &[
                (0, 1, 1),
                (0, 2, 1),
                (0, 3, 1),
                (1, 2, 1),
                (1, 3, 1),
                (2, 3, 1),
            ],
        )
    }

    #[test]
    fn brute_force_examples() {
        let par = graph(2, &[(0, 1, 1), (0, 1, 1), (0, 1, 1)]);
        assert_eq!(brute_force_opt(&par, 2).unwrap().1, q(2));
        let (edges, cost) = brute_force_opt(&k4(), 2).unwrap();
        assert_eq!(cost, q(4));
        assert_eq!(edges.len(), 4);
        assert_eq!(brute_force_opt(&cycle(5), 3), Err(OracleError::Infeasible));
        assert!(matches!(
            brute_force_opt(&graph(2, &[(0, 1, 1); 21]), 1),
            Err(OracleError::TooLarge(_))
        ));
    }

    #[test]
    fn enumeration_lp_examples() {
        assert_eq!(lp_by_enumeration(&cycle(4), 2).unwrap(), q(4));
        assert_eq!(
            lp_by_enumeration(&graph(2, &[(0, 1, 1); 5]), 3).unwrap(),
            q(3)
        );
        assert_eq!(
            lp_by_enumeration(&cycle(4), 3),
            Err(OracleError::Infeasible)
        );
        // K4 with k = 3 needs every edge
        assert_eq!(lp_by_enumeration(&k4(), 3).unwrap(), q(6));
        // K4 with k = 2: x = 2/3 everywhere is optimal
        assert_eq!(lp_by_enumeration(&k4(), 2).unwrap(), q(4));
    }

    #[test]
    fn certificate_examples() {
        let g = cycle(4);
        let all: BTreeMap<EdgeId, i64> = (0..4).map(|e| (EdgeId(e), 1)).collect();
        let alg = Algorithm::Bicriteria(Variant::Bicriteria1);
        let cert = certify(&g, 2, alg, &all, &q(4), Ledger::new(), 1);
        assert!(cert.is_valid());
        assert_eq!(cert.mincut, Some(2));
        let mut broken = all.clone();
        broken.remove(&EdgeId(0));
        // k = 6 leaves k - 4 = 2 connectivity required; a path fails it
        let cert = certify(&g, 6, alg, &broken, &q(4), Ledger::new(), 1);
        assert_eq!(cert.mincut, Some(1));
        assert!(!cert.is_valid());
        assert!(cert.emit().contains("status=INVALID\n"));
        let empty = certify(&g, 0, alg, &BTreeMap::new(), &q(0), Ledger::new(), 0);
        assert!(empty.is_valid());
    }

    #[test]
    fn sandwich_examples() {
        let par = graph(2, &[(0, 1, 1); 8]);
        let r = sandwich_check(&par, 6, &q(6)).unwrap();
        assert_eq!((r.lower, r.upper, r.holds), (Some(q(2)), Some(q(6)), true));
        let r = sandwich_check(&k4(), 5, &q(6)).unwrap();
        assert_eq!(r.upper, None);
        assert!(!r.holds);
        let r = sandwich_check(&cycle(4), 2, &q(4)).unwrap();
        assert_eq!(r.lower, None);
        assert!(r.holds);
    }

    fn random_graph(seed: u64) -> (MultiGraph, i64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6u32);
        let mut g = MultiGraph::new(n as usize).unwrap();
        for _ in 0..rng.gen_range(1..14) {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                g.add_edge(NodeId(u), NodeId(v), rng.gen_range(0..6i64).into())
                    .unwrap();
            }
        }
        (g, rng.gen_range(1..4))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn enumeration_matches_cutting_plane(seed in any::<u64>()) {
            let (g, k) = random_graph(seed);
            let st = SolverState::new(g.clone(), k, Variant::Bicriteria1);
            let cp = cutting_plane_extreme_point(&st, &mut CutPool::new(), 10_000).map(|r| r.0.objective);
            match lp_by_enumeration(&g, k) {
                Ok(v) => prop_assert_eq!(cp.unwrap(), v),
                Err(OracleError::Infeasible) => prop_assert!(cp.is_err()),
                Err(e) => panic!("{e}"),
            }
        }

        #[test]
        fn brute_force_is_monotone_in_k(seed in any::<u64>()) {
            let (g, _) = random_graph(seed);
            let mut prev = q(0);
            for k in 1..4 {
                match brute_force_opt(&g, k) {
                    Ok((edges, c)) => {
                        prop_assert!(c >= prev);
                        let mult = edges.iter().map(|e| (*e, 1)).collect();
                        prop_assert!(multiset_min_cut(&g, &mult).unwrap() >= k);
                        prev = c;
                    }
                    Err(_) => break,
                }
            }
        }
    }
}
