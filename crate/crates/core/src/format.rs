//! Text formats: instances, solutions and certificates.
//!
//! Instance grammar (nodes are 1-based):
//!
//! ```text
//! # comment
//! p kecss <n> <m> <k>
//! e <u> <v> <cost>
//! ```
//!
//! Costs are nonnegative integers or exact fractions `p/q`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::ParseError;
use crate::graph::{EdgeId, MultiGraph, NodeId};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: MultiGraph,
    pub k: i64,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && emit_instance(&self.graph, self.k) == emit_instance(&other.graph, other.k)
    }
}

fn parse_field<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| ParseError::new(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| ParseError::new(line, format!("bad {what} {tok:?}")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, i64)> = None;
    let mut graph: Option<MultiGraph> = None;
    let mut last_line = 0;
    for (ln, line) in content_lines(text) {
        last_line = ln;
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(ParseError::new(ln, "duplicate header"));
                }
                if toks.next() != Some("kecss") {
                    return Err(ParseError::new(
                        ln,
                        "header must read `p kecss <n> <m> <k>`",
                    ));
                }
                let n: usize = parse_field(toks.next(), ln, "node count")?;
                let m: usize = parse_field(toks.next(), ln, "edge count")?;
                let k: i64 = parse_field(toks.next(), ln, "k")?;
                if toks.next().is_some() {
                    return Err(ParseError::new(ln, "trailing tokens in header"));
                }
                if n == 0 {
                    return Err(ParseError::new(ln, "node count must be positive"));
                }
                if k < 0 {
                    return Err(ParseError::new(ln, "k must be nonnegative"));
                }
                header = Some((n, m, k));
                graph = Some(MultiGraph::new(n).map_err(|e| ParseError::new(ln, e.to_string()))?);
            }
            Some("e") => {
                let (n, m, _) = header.ok_or_else(|| ParseError::new(ln, "edge before header"))?;
                let g = graph
                    .as_mut()
                    .expect("graph exists once the header is read");
                if g.edge_count() == m {
                    return Err(ParseError::new(ln, format!("more than {m} edges")));
                }
                let u: usize = parse_field(toks.next(), ln, "endpoint")?;
                let v: usize = parse_field(toks.next(), ln, "endpoint")?;
                let cost: Rational = parse_field(toks.next(), ln, "cost")?;
                if toks.next().is_some() {
                    return Err(ParseError::new(ln, "trailing tokens in edge"));
                }
                for w in [u, v] {
                    if w == 0 || w > n {
                        return Err(ParseError::new(
                            ln,
                            format!("node {w} out of range 1..={n}"),
                        ));
                    }
                }
                if u == v {
                    return Err(ParseError::new(ln, format!("self-loop at node {u}")));
                }
                g.add_edge(NodeId(u as u32 - 1), NodeId(v as u32 - 1), cost)
                    .map_err(|e| ParseError::new(ln, e.to_string()))?;
            }
            Some(other) => return Err(ParseError::new(ln, format!("unknown record {other:?}"))),
            None => unreachable!(),
        }
    }
    let (_, m, k) = header.ok_or_else(|| ParseError::new(last_line.max(1), "missing header"))?;
    let graph = graph.unwrap();
    if graph.edge_count() != m {
        return Err(ParseError::new(
            last_line.max(1),
            format!("expected {m} edges, found {}", graph.edge_count()),
        ));
    }
    Ok(Instance { graph, k })
}

/// 1-based endpoints; only meaningful before any contraction.
fn endpoints(g: &MultiGraph, e: EdgeId) -> (u32, u32) {
    let edge = g.edge(e);
    (edge.u.0 + 1, edge.v.0 + 1)
}

/// Serialize an uncontracted graph.
pub fn emit_instance(g: &MultiGraph, k: i64) -> String {
    let mut out = String::new();
    writeln!(out, "p kecss {} {} {}", g.node_count(), g.edge_count(), k).unwrap();
    for e in g.all_edges() {
        let (u, v) = endpoints(g, e.id);
        writeln!(out, "e {u} {v} {}", e.cost).unwrap();
    }
    out
}

/// Hex SHA-256 of the canonical instance text.
pub fn instance_digest(g: &MultiGraph, k: i64) -> String {
    let hash = Sha256::digest(emit_instance(g, k).as_bytes());
    hash.iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// A chosen edge multiset in instance edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionFile {
    pub algorithm: String,
    pub k: i64,
    pub lp0: Rational,
    /// Multiplicity per edge; 1 for the bicriteria algorithms.
    pub edges: BTreeMap<EdgeId, i64>,
    pub cost: Rational,
}

/// One `e <id> <u> <v> <cost>` line per chosen edge (`m ... <mult>` for
/// multisets), ids and nodes 1-based.
pub fn emit_solution(g: &MultiGraph, sol: &SolutionFile) -> String {
    let multiset = sol.algorithm == "ecsm";
    let mut out = String::new();
    writeln!(out, "algorithm {}", sol.algorithm).unwrap();
    writeln!(out, "k {}", sol.k).unwrap();
    writeln!(out, "lp0 {}", sol.lp0).unwrap();
    for (e, mult) in &sol.edges {
        let (u, v) = endpoints(g, *e);
        let cost = &g.edge(*e).cost;
        if multiset {
            writeln!(out, "m {} {u} {v} {cost} {mult}", e.0 + 1).unwrap();
        } else {
            writeln!(out, "e {} {u} {v} {cost}", e.0 + 1).unwrap();
        }
    }
    writeln!(out, "edges {}", sol.edges.values().sum::<i64>()).unwrap();
    writeln!(out, "cost {}", sol.cost).unwrap();
    out
}

/// Parse a solution and check it against the instance it claims to solve.
pub fn parse_solution(text: &str, g: &MultiGraph) -> Result<SolutionFile, ParseError> {
    let mut algorithm = None;
    let mut k = None;
    let mut lp0 = None;
    let mut cost = None;
    let mut count = None;
    let mut edges: BTreeMap<EdgeId, i64> = BTreeMap::new();
    let mut last = 1;
    for (ln, line) in content_lines(text) {
        last = ln;
        let mut toks = line.split_whitespace();
        let tag = toks.next().unwrap();
        match tag {
            "algorithm" => algorithm = Some(parse_field::<String>(toks.next(), ln, "algorithm")?),
            "k" => k = Some(parse_field::<i64>(toks.next(), ln, "k")?),
            "lp0" => lp0 = Some(parse_field::<Rational>(toks.next(), ln, "lp0")?),
            "cost" => cost = Some(parse_field::<Rational>(toks.next(), ln, "cost")?),
            "edges" => count = Some(parse_field::<i64>(toks.next(), ln, "edge total")?),
            "e" | "m" => {
                let id: usize = parse_field(toks.next(), ln, "edge id")?;
                let u: u32 = parse_field(toks.next(), ln, "endpoint")?;
                let v: u32 = parse_field(toks.next(), ln, "endpoint")?;
                let c: Rational = parse_field(toks.next(), ln, "cost")?;
                let mult: i64 = if tag == "m" {
                    parse_field(toks.next(), ln, "multiplicity")?
                } else {
                    1
                };
                if id == 0 || id > g.edge_count() {
                    return Err(ParseError::new(ln, format!("edge {id} not in instance")));
                }
                let e = EdgeId(id as u32 - 1);
                let (iu, iv) = endpoints(g, e);
                if (iu, iv) != (u, v) && (iu, iv) != (v, u) {
                    return Err(ParseError::new(
                        ln,
                        format!("edge {id} joins {iu} and {iv}, not {u} and {v}"),
                    ));
                }
                if g.edge(e).cost != c {
                    return Err(ParseError::new(
                        ln,
                        format!("edge {id} costs {}, not {c}", g.edge(e).cost),
                    ));
                }
                if mult < 1 {
                    return Err(ParseError::new(ln, "multiplicity must be positive"));
                }
                if edges.insert(e, mult).is_some() {
                    return Err(ParseError::new(ln, format!("edge {id} listed twice")));
                }
            }
            other => return Err(ParseError::new(ln, format!("unknown record {other:?}"))),
        }
    }
    let missing = |what: &str| ParseError::new(last, format!("missing `{what}` line"));
    let sol = SolutionFile {
        algorithm: algorithm.ok_or_else(|| missing("algorithm"))?,
        k: k.ok_or_else(|| missing("k"))?,
        lp0: lp0.ok_or_else(|| missing("lp0"))?,
        cost: cost.ok_or_else(|| missing("cost"))?,
        edges,
    };
    if let Some(c) = count {
        if c != sol.edges.values().sum::<i64>() {
            return Err(ParseError::new(
                last,
                "edge total does not match the listed edges",
            ));
        }
    }
    Ok(sol)
}
