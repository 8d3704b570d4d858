//! End-to-end acceptance suite. Prints one line per criterion and fails if
//! any criterion has a failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::{snapshots, Brute};
use kecss::bicriteria::{run_observed, Solution, SolveOptions};
use kecss::ecsm::{brute_force_ecsm, solve_ecsm};
use kecss::format::{emit_solution, SolutionFile};
use kecss::generate::{generate, Family, Generated};
use kecss::lp::FracSolution;
use kecss::mincut::{find_cores, separate};
use kecss::verify::{lp_by_enumeration, multiset_min_cut, sandwich_check, Certificate};
use kecss::{MultiGraph, NodeId, Rational, SolverState, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE_SIZE: usize = 210;

struct Case {
    gen: Generated,
    k: i64,
}

fn suite() -> Vec<Case> {
    let mut cases = Vec::new();
    let mut seed = 0u64;
    while cases.len() < SUITE_SIZE {
        seed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // every fifth case is small enough for the exact oracles
        let small = cases.len() % 5 == 0;
        let family = match (seed % 3, small) {
            (0, false) => Family::Gnp {
                n: rng.gen_range(4..=16),
                p: rng.gen_range(0.35..0.9),
            },
            (0, true) => Family::Gnp {
                n: rng.gen_range(4..=6),
                p: rng.gen_range(0.7..1.0),
            },
            (1, false) => Family::MultiCycle {
                n: rng.gen_range(4..=15),
                dup: rng.gen_range(2..=4),
            },
            (1, true) => Family::MultiCycle {
                n: rng.gen_range(4..=7),
                dup: 2,
            },
            (_, false) => Family::Theta {
                paths: rng.gen_range(3..=6),
                len: rng.gen_range(2..=3),
                mult: rng.gen_range(2..=3),
            },
            (_, true) => Family::Theta {
                paths: 3,
                len: 2,
                mult: 2,
            },
        };
        let c_max = if seed.is_multiple_of(4) { 1 } else { 100 };
        let Ok(gen) = generate(&family, 0, c_max, seed) else {
            continue;
        };
        let (n, m) = (gen.graph.node_count(), gen.graph.edge_count());
        if !(4..=16).contains(&n) || m > 60 || (small && m > 14) {
            continue;
        }
        let Some(lambda) = gen.min_cut() else {
            continue;
        };
        if lambda < 3 {
            continue;
        }
        let k_max = lambda.min(if small { 6 } else { 10 });
        let k = rng.gen_range(3..=k_max);
        cases.push(Case { gen, k });
    }
    cases
}

/// Failures for one criterion, reported as a single line.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn line(&self, id: usize, title: &str) -> String {
        let status = if self.failures.is_empty() && self.checked > 0 {
            "PASS"
        } else {
            "FAIL"
        };
        let mut line = format!(
            "criterion {id} [{status}] {title}: {} checks, {} failures",
            self.checked,
            self.failures.len()
        );
        for f in self.failures.iter().take(5) {
            line += &format!("\n    {f}");
        }
        line
    }
}

struct Run {
    solution: Solution,
    cert: Certificate,
    max_fractional_excess: Option<String>,
    relaxed_degree: Vec<String>,
    relaxed_degree_lower: Vec<String>,
}

fn solve(g: &MultiGraph, k: i64, variant: Variant) -> Result<Run, String> {
    let mut excess = None;
    let mut relaxed_degree = Vec::new();
    let mut relaxed_degree_lower = Vec::new();
    let mut observe = |state: &SolverState, x: &FracSolution| {
        let n = state.graph.node_count();
        let frac = x.values.values().filter(|v| !v.is_integer()).count();
        if frac > 2 * n - 1 && excess.is_none() {
            excess = Some(format!(
                "iteration {}: {frac} fractional on {n} nodes",
                state.iteration
            ));
        }
        for u in &state.relaxed {
            let side = BTreeSet::from([*u]);
            let d_i = state
                .integral
                .iter()
                .filter(|e| state.graph.edge(**e).crosses(&side))
                .count() as i64;
            let d_h = state.ghost_degree(&side) as i64;
            let at = || {
                format!(
                    "iteration {} node {u}: d_I={d_i} d_H={d_h} k={k}",
                    state.iteration
                )
            };
            match variant {
                Variant::Bicriteria1 => {
                    if d_h > 1 || d_i + 2 * d_h < k - 2 {
                        relaxed_degree.push(at());
                    }
                }
                Variant::Bicriteria2 => {
                    if d_h > 1 || d_i + d_h != k - 1 {
                        relaxed_degree.push(at());
                    }
                    if d_h > 1 || d_i + d_h < k - 1 {
                        relaxed_degree_lower.push(at());
                    }
                }
            }
        }
    };
    let (solution, cert) = run_observed(g, k, variant, &SolveOptions::default(), &mut observe)
        .map_err(|e| e.to_string())?;
    Ok(Run {
        solution,
        cert,
        max_fractional_excess: excess,
        relaxed_degree,
        relaxed_degree_lower,
    })
}

fn solution_text(g: &MultiGraph, k: i64, variant: Variant, sol: &Solution) -> String {
    emit_solution(
        g,
        &SolutionFile {
            algorithm: variant.name().to_string(),
            k,
            lp0: sol.lp0.clone(),
            edges: sol.multiplicities(),
            cost: sol.cost.clone(),
        },
    )
}

fn ecsm_cases() -> Vec<(MultiGraph, i64)> {
    let mut out = Vec::new();
    let mut single = MultiGraph::new(2).unwrap();
    single.add_edge(NodeId(0), NodeId(1), 1.into()).unwrap();
    out.push((single, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    while out.len() < 60 {
        let n = rng.gen_range(2..=4usize);
        let m = rng.gen_range(n - 1..=4);
        let mut g = MultiGraph::new(n).unwrap();
        // a random spanning tree first keeps the instance connected
        for v in 1..n {
            let u = rng.gen_range(0..v);
            g.add_edge(
                NodeId(u as u32),
                NodeId(v as u32),
                rng.gen_range(1..=5i64).into(),
            )
            .unwrap();
        }
        while g.edge_count() < m {
            let u = rng.gen_range(0..n as u32);
            let v = rng.gen_range(0..n as u32);
            if u != v {
                g.add_edge(NodeId(u), NodeId(v), rng.gen_range(1..=5i64).into())
                    .unwrap();
            }
        }
        out.push((g, rng.gen_range(1..=4)));
    }
    out
}

const INVARIANTS: [&str; 6] = [
    "relaxed_ghost_degree",
    "relaxed_integral_degree",
    "relaxed_integral_lower_bound",
    "ghost_witnesses_disjoint",
    "core_degrees",
    "branch_available",
];

#[test]
fn acceptance() {
    let cases = suite();
    let mut c1 = Tally::default();
    let mut c2 = Tally::default();
    let mut c3 = Tally::default();
    let mut c4 = Tally::default();
    let mut c6 = Tally::default();
    let mut c7 = Tally::default();
    let mut c9 = Tally::default();
    let mut slowest = Duration::ZERO;
    let started = Instant::now();

    for (idx, case) in cases.iter().enumerate() {
        let g = &case.gen.graph;
        let k = case.k;
        let (n, m) = (g.node_count(), g.edge_count());
        let label = format!(
            "#{idx} {} n={n} m={m} k={k} seed={}",
            case.gen.family, case.gen.seed
        );

        for variant in [Variant::Bicriteria1, Variant::Bicriteria2] {
            let t0 = Instant::now();
            let outcome = solve(g, k, variant);
            slowest = slowest.max(t0.elapsed());
            let tally = if variant == Variant::Bicriteria1 {
                &mut c1
            } else {
                &mut c2
            };
            let run = match outcome {
                Ok(run) => run,
                Err(e) => {
                    tally.check(false, || format!("{label}: {e}"));
                    c7.check(false, || format!("{label} {variant}: {e}"));
                    continue;
                }
            };
            let sol = &run.solution;
            // recomputed here rather than read off the certificate
            let mincut = multiset_min_cut(g, &sol.multiplicities()).unwrap_or(i64::MAX);
            let cost: Rational = sol.edges.iter().map(|e| g.edge(*e).cost.clone()).sum();
            let bound = &variant.cost_factor() * &sol.lp0;
            tally.check(
                mincut >= variant.connectivity_bound(k) && cost <= bound && cost == sol.cost,
                || format!("{label}: mincut={mincut} cost={cost} bound={bound}"),
            );

            if variant == Variant::Bicriteria1 {
                let cap = 3 * (2 * n - 1);
                c6.check(sol.iterations <= cap, || {
                    format!("{label}: {} iterations > {cap}", sol.iterations)
                });
                c6.check(run.max_fractional_excess.is_none(), || {
                    format!(
                        "{label}: {}",
                        run.max_fractional_excess.clone().unwrap_or_default()
                    )
                });
                if m <= 14 && k <= 6 {
                    match sandwich_check(g, k, &cost) {
                        Ok(report) => c3.check(report.holds, || {
                            format!(
                                "{label}: lower={:?} cost={} upper={:?}",
                                report.lower, report.cost, report.upper
                            )
                        }),
                        Err(e) => c3.check(false, || format!("{label}: {e}")),
                    }
                }
                if n <= 10 {
                    match lp_by_enumeration(g, k) {
                        Ok(lp) => c4.check(lp == sol.lp0, || {
                            format!("{label}: enumeration {lp} vs cutting plane {}", sol.lp0)
                        }),
                        Err(e) => c4.check(false, || format!("{label}: {e}")),
                    }
                }
            }

            for name in INVARIANTS {
                let bad: Vec<_> = run
                    .cert
                    .ledger
                    .entries()
                    .iter()
                    .filter(|e| e.name == name && !e.pass)
                    .collect();
                c7.check(bad.is_empty(), || {
                    format!(
                        "{label} {variant}: {name} failed {} times, first: {}",
                        bad.len(),
                        bad[0].detail
                    )
                });
            }
            c7.check(run.relaxed_degree.is_empty(), || {
                format!(
                    "{label} {variant}: relaxed node degree equality off in {} states, first: {}",
                    run.relaxed_degree.len(),
                    run.relaxed_degree[0]
                )
            });
            c7.check(run.relaxed_degree_lower.is_empty(), || {
                format!(
                    "{label} {variant}: relaxed node degree lower bound off: {}",
                    run.relaxed_degree_lower[0]
                )
            });

            if idx % 7 == 0 {
                let again = solve(g, k, variant).expect("second run");
                c9.check(
                    solution_text(g, k, variant, sol)
                        == solution_text(g, k, variant, &again.solution)
                        && run.cert.emit() == again.cert.emit(),
                    || format!("{label} {variant}: output differs between runs"),
                );
            }
        }
    }

    let mut c5 = Tally::default();
    for (i, (g, k)) in ecsm_cases().iter().enumerate() {
        let label = format!("ecsm #{i} n={} m={} k={k}", g.node_count(), g.edge_count());
        let (sol, cert) = match solve_ecsm(g, *k, &SolveOptions::default()) {
            Ok(out) => out,
            Err(e) => {
                c5.check(false, || format!("{label}: {e}"));
                continue;
            }
        };
        let opt = brute_force_ecsm(g, *k, None).expect("tiny instance");
        let ratio = Rational::one() + Rational::new(4, *k);
        let mincut = multiset_min_cut(g, &sol.multiplicity).unwrap_or(i64::MAX);
        c5.check(mincut >= *k && sol.cost <= &ratio * &opt.cost, || {
            format!(
                "{label}: cost={} opt={} mincut={mincut}",
                sol.cost, opt.cost
            )
        });
        if i == 0 {
            c5.check(
                sol.cost == Rational::from_int(6) && opt.cost == Rational::from_int(2),
                || {
                    format!(
                        "{label}: single edge gave cost {} vs optimum {}",
                        sol.cost, opt.cost
                    )
                },
            );
        }
        if i % 10 == 0 {
            let (again, again_cert) = solve_ecsm(g, *k, &SolveOptions::default()).unwrap();
            c9.check(again == sol && again_cert.emit() == cert.emit(), || {
                format!("{label}: output differs between runs")
            });
        }
    }

    let mut c8 = Tally::default();
    for (state, x) in snapshots(50) {
        let brute = Brute::new(state.variant);
        let label = format!(
            "iteration {} k={} {}",
            state.iteration, state.k, state.variant
        );
        let violated = brute.violated(&state, &x);
        c8.check(
            separate(&state, &x).is_some() == !violated.is_empty(),
            || format!("{label}: separation disagrees"),
        );
        let found: BTreeSet<BTreeSet<NodeId>> = find_cores(&state, &x)
            .into_iter()
            .map(|c| c.members.members().clone())
            .collect();
        c8.check(found == brute.cores(&state, &x), || {
            format!("{label}: cores disagree")
        });
    }

    let lines = [
        c1.line(
            1,
            "k-4 connectivity and cost within LP for the (1, k-4) algorithm",
        ),
        c2.line(
            2,
            "k-2 connectivity and cost within 3/2 LP for the (3/2, k-2) algorithm",
        ),
        c3.line(3, "OPT(k-4) <= cost <= OPT(k) on small instances"),
        c4.line(4, "cutting-plane LP equals full enumeration for n <= 10"),
        c5.line(5, "k-ECSM cost within (1 + 4/k) OPT"),
        c6.line(
            6,
            "iteration cap 3(2n-1) and at most 2n-1 fractional entries",
        ),
        c7.line(7, "solver invariant ledger clean"),
        c8.line(8, "separation and core finding match enumeration"),
        c9.line(9, "byte-identical output on repeated runs"),
    ];
    for line in &lines {
        println!("{line}");
    }
    println!(
        "suite: {} instances, slowest solve {:.1} ms, total {:.1} s",
        cases.len(),
        slowest.as_secs_f64() * 1e3,
        started.elapsed().as_secs_f64()
    );
    let failing: Vec<usize> = [&c1, &c2, &c3, &c4, &c5, &c6, &c7, &c8, &c9]
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.failures.is_empty() || t.checked == 0)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failing.is_empty(), "failing criteria: {failing:?}");
}
