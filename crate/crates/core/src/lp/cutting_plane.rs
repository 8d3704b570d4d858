//! Row generation for the residual cut LP: solve over a subset of cut rows,
//! ask the separation oracle for violated cuts, add them, re-optimize.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{GraphError, LpError, SolveError};
use crate::graph::{Cut, EdgeId, NodeId};
use crate::lp::simplex::{is_vertex, LinearProgram, Row, Tableau};
use crate::mincut::violated_cuts;
use crate::rational::Rational;
use crate::state::SolverState;

/// Cuts found by earlier solves, kept as sets of original nodes so they
/// survive contractions.
#[derive(Clone, Debug, Default)]
pub struct CutPool {
    sets: BTreeSet<BTreeSet<NodeId>>,
}

impl CutPool {
    pub fn new() -> Self {
        CutPool::default()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn insert(&mut self, state: &SolverState, cut: &Cut) {
        self.sets.insert(state.graph.preimage_of(cut.members()));
    }

    /// Pool members that are unions of current nodes, as current cuts.
    fn current_cuts(&self, state: &SolverState) -> Vec<Cut> {
        let g = &state.graph;
        self.sets
            .iter()
            .filter_map(|orig| {
                let mut side = BTreeSet::new();
                for v in g.nodes() {
                    let pre = g.preimage(v);
                    if pre.is_subset(orig) {
                        side.insert(v);
                    } else if !pre.is_disjoint(orig) {
                        return None;
                    }
                }
                Some(Cut::from_set(side))
            })
            .collect()
    }
}

/// An optimal extreme point of the residual LP over every cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracSolution {
    pub values: BTreeMap<EdgeId, Rational>,
    pub objective: Rational,
    /// Cuts whose rows are tight and nonbasic in the final basis.
    pub defining_cuts: Vec<Cut>,
    /// Edges held at 0 or 1 by the final basis.
    pub at_bound: Vec<EdgeId>,
    /// The defining rows and bounds have full rank.
    pub vertex: bool,
}

impl FracSolution {
    pub fn value(&self, e: EdgeId) -> Option<&Rational> {
        self.values.get(&e)
    }

    pub fn fractional_count(&self) -> usize {
        self.values.values().filter(|v| !v.is_integer()).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LpStats {
    pub rounds: usize,
    pub rows: usize,
    pub pivots: usize,
}

/// `x_e ≥ threshold`, exactly.
pub fn is_integral_at(
    x: &FracSolution,
    e: EdgeId,
    threshold: &Rational,
) -> Result<bool, GraphError> {
    x.value(e)
        .map(|v| v >= threshold)
        .ok_or(GraphError::UnknownEdge(e))
}

fn cut_row(state: &SolverState, index: &BTreeMap<EdgeId, usize>, cut: &Cut, f: i64) -> Row {
    let coeffs = state
        .frac
        .iter()
        .filter(|e| state.graph.edge(**e).crosses(cut.members()))
        .map(|e| (index[e], Rational::one()))
        .collect();
    Row::ge(coeffs, f)
}

/// Solve the residual LP of `state` to an optimal extreme point. Rows are
/// seeded from singleton cuts and `pool`; every violated cut found along the
/// way is added to `pool`. Errors with `Lp(Infeasible)` when no point
/// satisfies all cuts.
pub fn cutting_plane_extreme_point(
    state: &SolverState,
    pool: &mut CutPool,
    max_rounds: usize,
) -> Result<(FracSolution, LpStats), SolveError> {
    let g = &state.graph;
    let vars: Vec<EdgeId> = state.frac.iter().copied().collect();
    let index: BTreeMap<EdgeId, usize> = vars.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let objective: Vec<Rational> = vars.iter().map(|e| g.edge(*e).cost.clone()).collect();

    let mut row_cuts: Vec<Cut> = Vec::new();
    let mut have: BTreeSet<Cut> = BTreeSet::new();
    let mut rows = Vec::new();
    let mut seed: Vec<Cut> = g
        .nodes()
        .map(|v| Cut::from_set(BTreeSet::from([v])))
        .collect();
    if g.node_count() >= 2 {
        seed.extend(pool.current_cuts(state));
    } else {
        seed.clear();
    }
    for cut in seed {
        let cut = cut.canonical(g);
        let f = state.eval_f(&cut);
        if f > 0 && have.insert(cut.clone()) {
            rows.push(cut_row(state, &index, &cut, f));
            row_cuts.push(cut);
        }
    }

    let mut lp = LinearProgram::unit_box(objective);
    lp.rows = rows;
    let mut tableau = Tableau::solve(&lp)?;
    let mut stats = LpStats::default();
    loop {
        let sol = tableau.solution();
        let x: BTreeMap<EdgeId, Rational> = vars
            .iter()
            .copied()
            .zip(sol.values.iter().cloned())
            .collect();
        let violated = violated_cuts(state, &x);
        if violated.is_empty() {
            lp.rows = tableau.rows().to_vec();
            let vertex = is_vertex(&lp, &sol);
            stats.rows = lp.rows.len();
            stats.pivots = tableau.pivot_count();
            let frac = FracSolution {
                objective: sol.objective.clone(),
                defining_cuts: sol
                    .defining_rows
                    .iter()
                    .map(|i| row_cuts[*i].clone())
                    .collect(),
                at_bound: sol.at_bound.iter().map(|j| vars[*j]).collect(),
                values: x,
                vertex,
            };
            return Ok((frac, stats));
        }
        stats.rounds += 1;
        if stats.rounds > max_rounds {
            return Err(SolveError::SeparationCap(max_rounds));
        }
        let mut new_rows = Vec::new();
        for cut in violated {
            pool.insert(state, &cut);
            let f = state.eval_f(&cut);
            debug_assert!(f > 0);
            if have.insert(cut.clone()) {
                new_rows.push(cut_row(state, &index, &cut, f));
                row_cuts.push(cut);
            }
        }
        if new_rows.is_empty() {
            return Err(SolveError::InvariantViolation(
                "separation repeated a cut already in the LP".into(),
            ));
        }
        tableau.add_rows(new_rows).map_err(|e| match e {
            LpError::Infeasible => SolveError::Lp(LpError::Infeasible),
            other => other.into(),
        })?;
    }
}
