//! Seeded random instance families.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::emit_instance;
use crate::graph::{MultiGraph, NodeId};
use crate::verify::multiset_min_cut;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// Erdős–Rényi `G(n, p)`.
    Gnp {
        n: usize,
        p: f64,
    },
    /// A Hamiltonian cycle with every edge repeated `dup` times.
    MultiCycle {
        n: usize,
        dup: usize,
    },
    /// Two hubs joined by `paths` internally disjoint paths of `len` edges,
    /// every path edge repeated `mult` times.
    Theta {
        paths: usize,
        len: usize,
        mult: usize,
    },
    Clique {
        n: usize,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gnp { .. } => "gnp",
            Family::MultiCycle { .. } => "multi-cycle",
            Family::Theta { .. } => "theta",
            Family::Clique { .. } => "clique",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            Family::Gnp { n, .. } | Family::MultiCycle { n, .. } | Family::Clique { n } => n,
            Family::Theta { paths, len, .. } => 2 + paths * (len - 1),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Family names accepted on the command line.
pub const FAMILIES: [&str; 4] = ["gnp", "multi-cycle", "theta", "clique"];

impl FromStr for Family {
    type Err = String;
    /// Name with default parameters; callers override fields afterwards.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gnp" => Ok(Family::Gnp { n: 8, p: 0.5 }),
            "multi-cycle" => Ok(Family::MultiCycle { n: 6, dup: 3 }),
            "theta" => Ok(Family::Theta {
                paths: 4,
                len: 2,
                mult: 2,
            }),
            "clique" => Ok(Family::Clique { n: 5 }),
            other => Err(format!(
                "unknown family {other:?}; expected one of {}",
                FAMILIES.join(", ")
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: MultiGraph,
    pub k: i64,
    pub family: Family,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl Generated {
    /// Instance text, headed by comments giving the family, seed and any warnings.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {} seed={}\n", describe(&self.family), self.seed);
        for w in &self.warnings {
            out += &format!("# warning: {w}\n");
        }
        out + &emit_instance(&self.graph, self.k)
    }

    pub fn min_cut(&self) -> Option<i64> {
        let all: BTreeMap<_, _> = self.graph.all_edges().iter().map(|e| (e.id, 1)).collect();
        multiset_min_cut(&self.graph, &all)
    }
}

fn describe(f: &Family) -> String {
    match f {
        Family::Gnp { n, p } => format!("gnp n={n} p={p}"),
        Family::MultiCycle { n, dup } => format!("multi-cycle n={n} dup={dup}"),
        Family::Theta { paths, len, mult } => format!("theta paths={paths} len={len} mult={mult}"),
        Family::Clique { n } => format!("clique n={n}"),
    }
}

/// Deterministic in `(family, k, c_max, seed)`. Costs are uniform integers in
/// `1..=c_max`.
pub fn generate(family: &Family, k: i64, c_max: i64, seed: u64) -> Result<Generated, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c_max = c_max.max(1);
    let n = family.node_count();
    if n == 0 {
        return Err("instance needs at least one node".into());
    }
    let mut g = MultiGraph::new(n).map_err(|e| e.to_string())?;
    let add = |g: &mut MultiGraph, rng: &mut ChaCha8Rng, u: usize, v: usize| {
        let cost = rng.gen_range(1..=c_max);
        g.add_edge(NodeId(u as u32), NodeId(v as u32), cost.into())
            .unwrap();
    };
    match *family {
        Family::Gnp { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("edge probability {p} outside [0, 1]"));
            }
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        add(&mut g, &mut rng, u, v);
                    }
                }
            }
        }
        Family::MultiCycle { n, dup } => {
            if n < 2 {
                return Err("a cycle needs two nodes".into());
            }
            let m = if n == 2 { 1 } else { n };
            for i in 0..m {
                for _ in 0..dup {
                    add(&mut g, &mut rng, i, (i + 1) % n);
                }
            }
        }
        Family::Theta { paths, len, mult } => {
            if len == 0 {
                return Err("paths need at least one edge".into());
            }
            // hubs are 0 and 1; path i uses nodes 2 + i(len-1) ..
            for i in 0..paths {
                let inner: Vec<usize> = (0..len - 1).map(|j| 2 + i * (len - 1) + j).collect();
                let mut stops = vec![0];
                stops.extend(inner);
                stops.push(1);
                for w in stops.windows(2) {
                    for _ in 0..mult {
                        add(&mut g, &mut rng, w[0], w[1]);
                    }
                }
            }
        }
        Family::Clique { n } => {
            for u in 0..n {
                for v in u + 1..n {
                    add(&mut g, &mut rng, u, v);
                }
            }
        }
    }
    let mut out = Generated {
        graph: g,
        k,
        family: family.clone(),
        seed,
        warnings: Vec::new(),
    };
    if let Some(lambda) = out.min_cut() {
        if lambda < k {
            out.warnings.push(format!(
                "edge connectivity {lambda} < k = {k}; the instance is infeasible"
            ));
        }
    }
    Ok(out)
}
