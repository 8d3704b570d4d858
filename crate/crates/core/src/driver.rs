//! One entry point per algorithm name, shared by the command line and the
//! browser demo, plus independent re-certification of a solution file.

use crate::bicriteria::{run, SolveOptions};
use crate::ecsm::{replicate, solve_ecsm, EXTRA_COPIES};
use crate::error::{LpError, SolveError, VerifyError};
use crate::format::SolutionFile;
use crate::graph::MultiGraph;
use crate::lp::cutting_plane::{cutting_plane_extreme_point, CutPool};
use crate::rational::Rational;
use crate::state::{SolverState, Variant};
use crate::verify::{certify, Algorithm, Certificate, Ledger};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub solution: SolutionFile,
    pub certificate: Certificate,
    pub trace: Vec<String>,
}

pub fn solve(
    g: &MultiGraph,
    k: i64,
    algorithm: Algorithm,
    opts: &SolveOptions,
) -> Result<Outcome, SolveError> {
    match algorithm {
        Algorithm::Bicriteria(variant) => {
            let (sol, certificate) = run(g, k, variant, opts)?;
            Ok(Outcome {
                solution: SolutionFile {
                    algorithm: algorithm.name().to_string(),
                    k,
                    lp0: sol.lp0.clone(),
                    edges: sol.multiplicities(),
                    cost: sol.cost,
                },
                certificate,
                trace: sol.trace,
            })
        }
        Algorithm::Ecsm => {
            let (sol, certificate) = solve_ecsm(g, k, opts)?;
            Ok(Outcome {
                solution: SolutionFile {
                    algorithm: algorithm.name().to_string(),
                    k,
                    lp0: certificate.lp0.clone(),
                    edges: sol.multiplicity,
                    cost: sol.cost,
                },
                certificate,
                trace: sol.trace,
            })
        }
    }
}

/// The LP value an algorithm's cost bound refers to, from a fresh cutting
/// plane solve. For k-ECSM this is the `k + 4` LP on the replicated graph.
pub fn reference_lp(
    g: &MultiGraph,
    k: i64,
    algorithm: Algorithm,
    max_rounds: usize,
) -> Result<Rational, SolveError> {
    let (graph, target) = match algorithm {
        Algorithm::Bicriteria(_) => (g.clone(), k),
        Algorithm::Ecsm => (replicate(g, (k + EXTRA_COPIES).max(1)).0, k + EXTRA_COPIES),
    };
    if graph.node_count() < 2 || target <= 0 {
        return Ok(Rational::zero());
    }
    let state = SolverState::new(graph, target, Variant::Bicriteria1);
    match cutting_plane_extreme_point(&state, &mut CutPool::new(), max_rounds) {
        Ok((x, _)) => Ok(x.objective),
        Err(SolveError::Lp(LpError::Infeasible)) => Err(SolveError::Infeasible {
            witness: Default::default(),
            capacity: Rational::zero(),
            demand: target,
        }),
        Err(e) => Err(e),
    }
}

/// Certify a solution file against its instance without trusting anything
/// in the file beyond the edge list. The file's header must agree with what
/// is recomputed here.
pub fn recertify(
    g: &MultiGraph,
    k: i64,
    algorithm: Algorithm,
    file: &SolutionFile,
) -> Result<Certificate, VerifyError> {
    if file.algorithm != algorithm.name() {
        return Err(VerifyError::Mismatch(format!(
            "solution is for {}, not {algorithm}",
            file.algorithm
        )));
    }
    if file.k != k {
        return Err(VerifyError::Mismatch(format!(
            "solution is for k = {}, instance has k = {k}",
            file.k
        )));
    }
    let cost: Rational = file
        .edges
        .iter()
        .map(|(e, m)| &g.edge(*e).cost * &Rational::from_int(*m))
        .sum();
    if cost != file.cost {
        return Err(VerifyError::Mismatch(format!(
            "listed edges cost {cost}, file claims {}",
            file.cost
        )));
    }
    let lp0 = reference_lp(
        g,
        k,
        algorithm,
        SolveOptions::default().max_separation_rounds,
    )?;
    if lp0 != file.lp0 {
        return Err(VerifyError::Mismatch(format!(
            "recomputed LP value {lp0}, file claims {}",
            file.lp0
        )));
    }
    Ok(certify(
        g,
        k,
        algorithm,
        &file.edges,
        &lp0,
        Ledger::new(),
        0,
    ))
}
