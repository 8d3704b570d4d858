//! Brute-force cut enumeration and solver-state capture shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kecss::bicriteria::{run_observed, SolveOptions};
use kecss::generate::{generate, Family};
use kecss::{EdgeId, NodeId, Rational, SolverState, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type X = BTreeMap<EdgeId, Rational>;

pub fn subsets(state: &SolverState) -> Vec<BTreeSet<NodeId>> {
    let nodes: Vec<NodeId> = state.graph.nodes().collect();
    let full = (1u32 << nodes.len()) - 1;
    (1..full)
        .map(|mask| {
            (0..nodes.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| nodes[i])
                .collect()
        })
        .collect()
}

pub fn crossing<'a>(
    state: &SolverState,
    edges: impl IntoIterator<Item = &'a EdgeId>,
    s: &BTreeSet<NodeId>,
) -> Vec<EdgeId> {
    edges
        .into_iter()
        .filter(|e| {
            let e = state.graph.edge(**e);
            s.contains(&e.u) != s.contains(&e.v)
        })
        .copied()
        .collect()
}

pub fn relaxed_side(state: &SolverState, s: &BTreeSet<NodeId>) -> bool {
    let n = state.graph.node_count();
    let single = |len: usize, pick: Option<NodeId>| {
        len == 1 && pick.is_some_and(|v| state.relaxed.contains(&v))
    };
    let inside = s.iter().next().copied();
    let outside = state.graph.nodes().find(|v| !s.contains(v));
    single(s.len(), inside) || single(n - s.len(), outside)
}

pub struct Brute {
    ghost_weight: i64,
    relief: i64,
}

impl Brute {
    pub fn new(variant: Variant) -> Self {
        match variant {
            Variant::Bicriteria1 => Brute {
                ghost_weight: 2,
                relief: 2,
            },
            Variant::Bicriteria2 => Brute {
                ghost_weight: 1,
                relief: 1,
            },
        }
    }

    pub fn ghost_degree(&self, state: &SolverState, s: &BTreeSet<NodeId>) -> i64 {
        state
            .ghosts
            .iter()
            .filter(|g| s.contains(&g.u) != s.contains(&g.v))
            .count() as i64
    }

    pub fn f(&self, state: &SolverState, s: &BTreeSet<NodeId>) -> i64 {
        let d_i = crossing(state, &state.integral, s).len() as i64;
        let mut f = state.k - d_i - self.ghost_weight * self.ghost_degree(state, s);
        if relaxed_side(state, s) {
            f -= self.relief;
        }
        f
    }

    pub fn load(&self, state: &SolverState, x: &X, s: &BTreeSet<NodeId>) -> Rational {
        crossing(state, &state.frac, s)
            .iter()
            .fold(Rational::zero(), |acc, e| {
                acc + x.get(e).cloned().unwrap_or_else(Rational::zero)
            })
    }

    pub fn capacity(&self, state: &SolverState, x: &X, s: &BTreeSet<NodeId>) -> Rational {
        let d_i = crossing(state, &state.integral, s).len() as i64;
        self.load(state, x, s)
            + Rational::from_int(d_i + self.ghost_weight * self.ghost_degree(state, s))
    }

    pub fn violated(&self, state: &SolverState, x: &X) -> Vec<BTreeSet<NodeId>> {
        subsets(state)
            .into_iter()
            .filter(|s| self.load(state, x, s) < Rational::from_int(self.f(state, s)))
            .collect()
    }

    /// Inclusion-minimal sets of capacity exactly `k` with a fractional edge
    /// on the boundary, ignoring sets with a single relaxed node on a side.
    pub fn cores(&self, state: &SolverState, x: &X) -> BTreeSet<BTreeSet<NodeId>> {
        let k = Rational::from_int(state.k);
        let tight: Vec<BTreeSet<NodeId>> = subsets(state)
            .into_iter()
            .filter(|s| !relaxed_side(state, s))
            .filter(|s| !crossing(state, &state.frac, s).is_empty())
            .filter(|s| self.capacity(state, x, s) == k)
            .collect();
        tight
            .iter()
            .filter(|s| !tight.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
            .cloned()
            .collect()
    }
}

/// Drop zero entries and report whether the remaining point is strictly below
/// the rounding threshold, i.e. the state a core search would see.
pub fn fractional_view(state: &SolverState, x: &X) -> Option<(SolverState, X)> {
    let threshold = state.variant.rounding_threshold();
    let mut s = state.clone();
    let mut kept = X::new();
    for e in state.frac.iter() {
        let v = x[e].clone();
        if v.is_zero() {
            s.frac.remove(e);
            s.dropped.insert(*e);
        } else if v >= threshold {
            return None;
        } else {
            kept.insert(*e, v);
        }
    }
    (!s.frac.is_empty()).then_some((s, kept))
}

pub fn snapshots(limit: usize) -> Vec<(SolverState, X)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < limit && seed < 2000 {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let family = match seed % 3 {
            0 => Family::Gnp {
                n: rng.gen_range(4..=9),
                p: 0.7,
            },
            1 => Family::MultiCycle {
                n: rng.gen_range(4..=8),
                dup: rng.gen_range(2..=4),
            },
            _ => Family::Theta {
                paths: rng.gen_range(3..=5),
                len: 2,
                mult: rng.gen_range(1..=3),
            },
        };
        let variant = if seed.is_multiple_of(2) {
            Variant::Bicriteria1
        } else {
            Variant::Bicriteria2
        };
        let Ok(generated) = generate(&family, 1, 20, seed) else {
            continue;
        };
        let Some(lambda) = generated.min_cut() else {
            continue;
        };
        if lambda < 2 {
            continue;
        }
        let k = rng.gen_range(2..=lambda.min(8));
        let mut observe = |state: &SolverState, x: &kecss::lp::FracSolution| {
            if state.graph.node_count() <= 10 {
                if let Some(view) = fractional_view(state, &x.values) {
                    out.push(view);
                }
            }
        };
        let _ = run_observed(
            &generated.graph,
            k,
            variant,
            &SolveOptions::default(),
            &mut observe,
        );
    }
    out
}
