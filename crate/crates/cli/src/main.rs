use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use kecss::bicriteria::SolveOptions;
use kecss::driver::{recertify, solve};
use kecss::format::{emit_solution, parse_instance, parse_solution, Instance};
use kecss::generate::{generate, Family, Generated, FAMILIES};
use kecss::verify::{multiset_min_cut, Algorithm, Certificate};
use kecss::{SolveError, Variant, VerifyError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const EXIT_INPUT: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kecss",
    version,
    about = "k-edge-connected spanning subgraphs by iterative LP rounding"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and certify the result.
    Solve(SolveArgs),
    /// Re-certify a solution file against its instance.
    Verify(VerifyArgs),
    /// Solve generated instances with both bicriteria algorithms; CSV on stdout.
    Bench(BenchArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// bicriteria1, bicriteria2 or ecsm
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long)]
    input: PathBuf,
    /// Solution file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Print the per-iteration log and ledger to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    algorithm: Algorithm,
    /// Write the recomputed certificate here.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated family names.
    #[arg(long, value_delimiter = ',', default_value = "gnp,multi-cycle,theta")]
    families: Vec<String>,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    kmax: i64,
    /// Largest node count drawn.
    #[arg(long, default_value_t = 12)]
    nmax: usize,
    #[arg(long, default_value_t = 100)]
    cmax: i64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 2)]
    k: i64,
    #[arg(long, default_value_t = 10)]
    cmax: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability for gnp.
    #[arg(long)]
    p: Option<f64>,
    /// Copies of each cycle edge for multi-cycle.
    #[arg(long)]
    dup: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    len: Option<usize>,
    #[arg(long)]
    mult: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("kecss: {msg}");
            ExitCode::from(code)
        }
    }
}

type CmdResult = Result<u8, (u8, String)>;

fn input_err(msg: impl std::fmt::Display) -> (u8, String) {
    (EXIT_INPUT, msg.to_string())
}

fn read(path: &Path) -> Result<String, (u8, String)> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write_or_stdout(path: Option<&Path>, text: &str) -> Result<(), (u8, String)> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| input_err(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(input_err),
    }
}

fn load_instance(path: &Path) -> Result<Instance, (u8, String)> {
    parse_instance(&read(path)?).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn solve_options() -> Result<SolveOptions, (u8, String)> {
    let mut opts = SolveOptions::default();
    if let Ok(v) = std::env::var("ECSS_MAX_ITERS") {
        let cap = v
            .trim()
            .parse()
            .map_err(|_| input_err(format!("ECSS_MAX_ITERS={v:?} is not a count")))?;
        opts.max_iters = Some(cap);
    }
    Ok(opts)
}

fn solve_error(e: SolveError) -> (u8, String) {
    match e {
        SolveError::Infeasible { .. } => (EXIT_INFEASIBLE, e.to_string()),
        other => (EXIT_INVALID, other.to_string()),
    }
}

fn status(cert: &Certificate) -> u8 {
    if cert.is_valid() {
        0
    } else {
        EXIT_INVALID
    }
}

fn print_trace(trace: &[String], cert: &Certificate) {
    for (i, line) in trace.iter().enumerate() {
        eprintln!("{line}");
        let entries = cert
            .ledger
            .entries()
            .iter()
            .filter(|e| e.iteration == i + 1);
        for e in entries {
            if e.pass {
                eprintln!("  {} pass", e.name);
            } else {
                eprintln!("  {} FAIL {}", e.name, e.detail);
            }
        }
    }
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let opts = solve_options()?;
    let out = solve(&inst.graph, inst.k, a.algorithm, &opts).map_err(solve_error)?;
    if a.trace {
        print_trace(&out.trace, &out.certificate);
    }
    write_or_stdout(a.out.as_deref(), &emit_solution(&inst.graph, &out.solution))?;
    if let Some(p) = &a.certificate {
        write_or_stdout(Some(p), &out.certificate.emit())?;
    }
    let code = status(&out.certificate);
    if code != 0 {
        for e in out.certificate.ledger.failures() {
            eprintln!(
                "kecss: ledger {} at iteration {} failed: {}",
                e.name, e.iteration, e.detail
            );
        }
        eprintln!("kecss: certificate INVALID");
    }
    Ok(code)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let text = read(&a.solution)?;
    let file = parse_solution(&text, &inst.graph)
        .map_err(|e| input_err(format!("{}: {e}", a.solution.display())))?;
    let cert = recertify(&inst.graph, inst.k, a.algorithm, &file).map_err(|e| match e {
        VerifyError::Mismatch(_) => input_err(e),
        VerifyError::Solve(s) => solve_error(s),
    })?;
    match &a.certificate {
        Some(p) => write_or_stdout(Some(p), &cert.emit())?,
        None => {
            let verdict = if cert.is_valid() { "VALID" } else { "INVALID" };
            println!(
                "{verdict} cost={} bound={} mincut={}",
                cert.solution_cost,
                cert.cost_bound,
                fmt_mincut(cert.mincut)
            );
        }
    }
    Ok(status(&cert))
}

fn fmt_mincut(c: Option<i64>) -> String {
    c.map_or_else(|| "none".to_string(), |c| c.to_string())
}

/// Draw parameters for instance `index` until its connectivity is at least 1.
fn bench_instance(family: &str, index: usize, a: &BenchArgs) -> Result<(Generated, i64), String> {
    let nmax = a.nmax.max(4);
    for attempt in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ ((index as u64) << 20) ^ attempt);
        let family = match family {
            "gnp" => Family::Gnp {
                n: rng.gen_range(4..=nmax),
                p: rng.gen_range(0.4..0.9),
            },
            "multi-cycle" => Family::MultiCycle {
                n: rng.gen_range(4..=nmax),
                dup: rng.gen_range(2..=4),
            },
            "theta" => {
                let len = rng.gen_range(2..=3);
                let paths = rng.gen_range(3..=((nmax - 2) / (len - 1)).clamp(3, 6));
                Family::Theta {
                    paths,
                    len,
                    mult: rng.gen_range(2..=3),
                }
            }
            "clique" => Family::Clique {
                n: rng.gen_range(4..=nmax.min(8)),
            },
            other => {
                return Err(format!(
                    "unknown family {other:?}; expected one of {}",
                    FAMILIES.join(", ")
                ))
            }
        };
        let gen = generate(&family, 0, a.cmax, rng.gen())?;
        let Some(lambda) = gen.min_cut() else {
            continue;
        };
        if lambda < 1 {
            continue;
        }
        let hi = a.kmax.min(lambda).max(1);
        let k = rng.gen_range(3.min(hi)..=hi);
        return Ok((gen, k));
    }
    unreachable!()
}

fn bench_row(
    gen: &Generated,
    k: i64,
    variant: Variant,
    opts: &SolveOptions,
) -> (Vec<String>, bool) {
    let g = &gen.graph;
    let t0 = Instant::now();
    let result = kecss::bicriteria::run(g, k, variant, opts);
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    let mut row = vec![
        gen.family.name().to_string(),
        g.node_count().to_string(),
        g.edge_count().to_string(),
        k.to_string(),
        variant.name().to_string(),
    ];
    let ok = match result {
        Ok((sol, cert)) => {
            let mincut = multiset_min_cut(g, &sol.multiplicities());
            let cost_slack = &(&variant.cost_factor() * &sol.lp0) - &sol.cost;
            let conn_slack = mincut.map_or_else(
                || "none".to_string(),
                |c| (c - variant.connectivity_bound(k)).to_string(),
            );
            row.extend([
                sol.cost.to_string(),
                sol.lp0.to_string(),
                fmt_mincut(mincut),
                cost_slack.to_string(),
                conn_slack,
                sol.iterations.to_string(),
            ]);
            cert.is_valid()
        }
        Err(e) => {
            eprintln!(
                "kecss: {} seed={} k={k} {variant}: {e}",
                gen.family, gen.seed
            );
            row.extend(std::iter::repeat_n("error".to_string(), 6));
            false
        }
    };
    row.push(format!("{ms:.3}"));
    (row, ok)
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let opts = solve_options()?;
    let families: Vec<String> = a
        .families
        .iter()
        .map(|f| f.trim().to_string())
        .filter(|f| !f.is_empty())
        .collect();
    if families.is_empty() && a.count > 0 {
        return Err(input_err("no families given"));
    }
    let instances: Vec<(Generated, i64)> = (0..a.count)
        .map(|i| bench_instance(&families[i % families.len()], i, &a))
        .collect::<Result<_, _>>()
        .map_err(input_err)?;
    let rows: Vec<(Vec<String>, bool)> = instances
        .par_iter()
        .flat_map_iter(|(gen, k)| {
            [Variant::Bicriteria1, Variant::Bicriteria2]
                .into_iter()
                .map(|v| bench_row(gen, *k, v, &opts))
        })
        .collect();

    let mut w = csv::Writer::from_writer(io::stdout());
    let header = [
        "family",
        "n",
        "m",
        "k",
        "algorithm",
        "cost",
        "lp0",
        "mincut",
        "cost_slack",
        "conn_slack",
        "iterations",
        "time_ms",
    ];
    w.write_record(header).map_err(input_err)?;
    for (row, _) in &rows {
        w.write_record(row).map_err(input_err)?;
    }
    w.flush().map_err(input_err)?;
    let all_ok = rows.iter().all(|(_, ok)| *ok);
    Ok(if all_ok { 0 } else { EXIT_INVALID })
}

fn cmd_generate(a: GenerateArgs) -> CmdResult {
    let mut family: Family = a.family.parse().map_err(input_err)?;
    match &mut family {
        Family::Gnp { n, p } => {
            *n = a.n.unwrap_or(*n);
            *p = a.p.unwrap_or(*p);
        }
        Family::MultiCycle { n, dup } => {
            *n = a.n.unwrap_or(*n);
            *dup = a.dup.unwrap_or(*dup);
        }
        Family::Theta { paths, len, mult } => {
            *paths = a.paths.unwrap_or(*paths);
            *len = a.len.unwrap_or(*len);
            *mult = a.mult.unwrap_or(*mult);
        }
        Family::Clique { n } => *n = a.n.unwrap_or(*n),
    }
    let gen = generate(&family, a.k, a.cmax, a.seed).map_err(input_err)?;
    for w in &gen.warnings {
        eprintln!("kecss: warning: {w}");
    }
    write_or_stdout(a.out.as_deref(), &gen.to_text())?;
    Ok(0)
}
