//! k-ECSM (edges usable with any multiplicity) via the `(1, k-4)` algorithm
//! run on a replicated instance with target `k + 4`.

use std::collections::BTreeMap;

use crate::bicriteria::{run, SolveOptions};
use crate::error::{OracleError, SolveError};
use crate::graph::{EdgeId, MultiGraph};
use crate::rational::Rational;
use crate::state::Variant;
use crate::verify::{certify, multiset_min_cut, Algorithm, Certificate};

/// Copies of each edge in the replicated instance, beyond `k`.
pub const EXTRA_COPIES: i64 = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct MultiSolution {
    pub multiplicity: BTreeMap<EdgeId, i64>,
    pub cost: Rational,
    /// Per-iteration log of the run on the replicated instance.
    pub trace: Vec<String>,
}

impl MultiSolution {
    fn new(g0: &MultiGraph, multiplicity: BTreeMap<EdgeId, i64>) -> Self {
        let cost = multiplicity
            .iter()
            .map(|(e, m)| &g0.edge(*e).cost * &Rational::from_int(*m))
            .sum();
        MultiSolution {
            multiplicity,
            cost,
            trace: Vec::new(),
        }
    }
}

/// `g0` with every edge repeated `copies` times, and the original id of each
/// copy.
pub fn replicate(g0: &MultiGraph, copies: i64) -> (MultiGraph, Vec<EdgeId>) {
    let mut g = MultiGraph::new(g0.node_count()).expect("same node count");
    let mut origin = Vec::new();
    for e in g0.all_edges() {
        for _ in 0..copies {
            g.add_edge(e.u, e.v, e.cost.clone())
                .expect("copied edge is valid");
            origin.push(e.id);
        }
    }
    (g, origin)
}

/// The certificate's `lp0` is the Cut-LP value for `k + 4` on the replicated
/// graph, which bounds the returned cost.
pub fn solve_ecsm(
    g0: &MultiGraph,
    k: i64,
    opts: &SolveOptions,
) -> Result<(MultiSolution, Certificate), SolveError> {
    let k_rep = k + EXTRA_COPIES;
    let (rep, origin) = replicate(g0, k_rep.max(1));
    let (sol, rep_cert) = run(&rep, k_rep, Variant::Bicriteria1, opts)?;
    let mut multiplicity = BTreeMap::new();
    for e in &sol.edges {
        *multiplicity.entry(origin[e.0 as usize]).or_insert(0) += 1;
    }
    let mut out = MultiSolution::new(g0, multiplicity);
    let mut cert = certify(
        g0,
        k,
        Algorithm::Ecsm,
        &out.multiplicity,
        &sol.lp0,
        rep_cert.ledger,
        sol.iterations,
    );
    cert.notes.push(format!(
        "replicated {k_rep} copies per edge, target {k_rep}"
    ));
    out.trace = sol.trace;
    Ok((out, cert))
}

pub const ECSM_MAX_NODES: usize = 4;
pub const ECSM_MAX_EDGES: usize = 4;
pub const ECSM_MAX_K: i64 = 4;

/// Cheapest multiset with min cut at least `k`, searching every multiplicity
/// vector in `[0, max_mult]^E`. `max_mult` defaults to `k`.
pub fn brute_force_ecsm(
    g0: &MultiGraph,
    k: i64,
    max_mult: Option<i64>,
) -> Result<MultiSolution, OracleError> {
    let (n, m) = (g0.node_count(), g0.edge_count());
    if n > ECSM_MAX_NODES || m > ECSM_MAX_EDGES || k > ECSM_MAX_K {
        return Err(OracleError::TooLarge(format!(
            "n={n} m={m} k={k}; limits are {ECSM_MAX_NODES}, {ECSM_MAX_EDGES}, {ECSM_MAX_K}"
        )));
    }
    let max_mult = max_mult.unwrap_or(k).max(0);
    if max_mult < k {
        return Err(OracleError::TooLarge(format!(
            "max_mult {max_mult} < k = {k}"
        )));
    }
    if n < 2 || k <= 0 {
        return Ok(MultiSolution::new(g0, BTreeMap::new()));
    }
    let mut best: Option<MultiSolution> = None;
    let mut mult = vec![0i64; m];
    loop {
        let chosen: BTreeMap<EdgeId, i64> = mult
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (EdgeId(i as u32), *c))
            .collect();
        if multiset_min_cut(g0, &chosen).is_some_and(|c| c >= k) {
            let cand = MultiSolution::new(g0, chosen);
            if best.as_ref().is_none_or(|b| cand.cost < b.cost) {
                best = Some(cand);
            }
        }
        // odometer step
        let Some(i) = mult.iter().position(|c| *c < max_mult) else {
            break;
        };
        mult[i] += 1;
        mult[..i].iter_mut().for_each(|c| *c = 0);
    }
    best.ok_or(OracleError::Infeasible)
}
