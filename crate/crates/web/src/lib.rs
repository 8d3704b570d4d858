//! wasm-bindgen bindings for the browser demo in `www/`. Every export takes
//! plain values and returns a JSON string, so the page needs no glue beyond
//! `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use kecss::bicriteria::SolveOptions;
use kecss::driver::solve as run_solver;
use kecss::format::parse_instance;
use kecss::generate::{generate, Family};
use kecss::lp::cutting_plane::{cutting_plane_extreme_point, CutPool};
use kecss::verify::Algorithm;
use kecss::{MultiGraph, SolverState, Variant};

#[derive(Serialize)]
struct EdgeJson {
    id: u32,
    u: u32,
    v: u32,
    cost: String,
}

fn edges(g: &MultiGraph) -> Vec<EdgeJson> {
    g.all_edges()
        .iter()
        .map(|e| EdgeJson {
            id: e.id.0 + 1,
            u: e.u.0 + 1,
            v: e.v.0 + 1,
            cost: e.cost.to_string(),
        })
        .collect()
}

#[derive(Serialize)]
struct GeneratedJson {
    text: String,
    nodes: usize,
    k: i64,
    edges: Vec<EdgeJson>,
    mincut: Option<i64>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct ErrorJson {
    error: String,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn error(msg: impl ToString) -> String {
    to_json(&ErrorJson {
        error: msg.to_string(),
    })
}

/// `size` is the node count for gnp, multi-cycle and clique, and the number
/// of hub-to-hub paths for theta.
#[wasm_bindgen]
pub fn generate_instance(family: &str, size: usize, k: i64, c_max: i64, seed: u64) -> String {
    let mut family: Family = match family.parse() {
        Ok(f) => f,
        Err(e) => return error(e),
    };
    match &mut family {
        Family::Gnp { n, .. } | Family::MultiCycle { n, .. } | Family::Clique { n } => {
            *n = size.clamp(2, 40)
        }
        Family::Theta { paths, .. } => *paths = size.clamp(1, 20),
    }
    match generate(&family, k, c_max, seed) {
        Ok(gen) => to_json(&GeneratedJson {
            text: gen.to_text(),
            nodes: gen.graph.node_count(),
            k,
            edges: edges(&gen.graph),
            mincut: gen.min_cut(),
            warnings: gen.warnings.clone(),
        }),
        Err(e) => error(e),
    }
}

#[derive(Serialize)]
struct SolveJson {
    algorithm: String,
    cost: String,
    lp0: String,
    cost_bound: String,
    mincut: Option<i64>,
    connectivity_bound: i64,
    valid: bool,
    /// `[edge id, multiplicity]`, ids 1-based.
    chosen: Vec<(u32, i64)>,
    trace: Vec<String>,
    certificate: String,
}

/// Solve an instance given in the text format with `bicriteria1`,
/// `bicriteria2` or `ecsm`.
#[wasm_bindgen]
pub fn solve(instance: &str, algorithm: &str) -> String {
    let inst = match parse_instance(instance) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    let algorithm: Algorithm = match algorithm.parse() {
        Ok(a) => a,
        Err(e) => return error(e),
    };
    match run_solver(&inst.graph, inst.k, algorithm, &SolveOptions::default()) {
        Ok(out) => {
            let cert = &out.certificate;
            to_json(&SolveJson {
                algorithm: algorithm.to_string(),
                cost: cert.solution_cost.to_string(),
                lp0: cert.lp0.to_string(),
                cost_bound: cert.cost_bound.to_string(),
                mincut: cert.mincut,
                connectivity_bound: cert.connectivity_bound,
                valid: cert.is_valid(),
                chosen: out
                    .solution
                    .edges
                    .iter()
                    .map(|(e, m)| (e.0 + 1, *m))
                    .collect(),
                trace: out.trace.clone(),
                certificate: cert.emit(),
            })
        }
        Err(e) => error(e),
    }
}

#[derive(Serialize)]
struct LpJson {
    objective: String,
    /// `[edge id, value as p/q, value as float]`.
    values: Vec<(u32, String, f64)>,
    cuts: usize,
    rounds: usize,
}

/// Optimal extreme point of the cut LP, found by cutting planes.
#[wasm_bindgen]
pub fn lp_relaxation(instance: &str) -> String {
    let inst = match parse_instance(instance) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    if inst.graph.node_count() < 2 {
        return error("a single node has no cuts");
    }
    let state = SolverState::new(inst.graph, inst.k, Variant::Bicriteria1);
    match cutting_plane_extreme_point(
        &state,
        &mut CutPool::new(),
        SolveOptions::default().max_separation_rounds,
    ) {
        Ok((x, stats)) => to_json(&LpJson {
            objective: x.objective.to_string(),
            values: x
                .values
                .iter()
                .map(|(e, v)| (e.0 + 1, v.to_string(), v.to_f64()))
                .collect(),
            cuts: stats.rows,
            rounds: stats.rounds,
        }),
        Err(e) => error(e),
    }
}
