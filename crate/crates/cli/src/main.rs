//! Command-line front end. Verbs cover generation, the exact solver, the
//! absorption pipeline, and the measurement utilities; `--json` switches
//! every verb to machine-readable output.
//!
//! Exit codes: 0 cycle found / verified, 2 sound negative outcome or stage
//! failure, 3 input or config error, 4 budget exhausted.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tightcycle::absorb::find_v_absorbers;
use tightcycle::connect::{connectable_pairs, RobustFamily};
use tightcycle::constructions::{extremal_example, random_hypergraph, ExtremalKind};
use tightcycle::io::{parse_g2, parse_h3, parse_seq, write_h3, write_seq};
use tightcycle::oracle::{
    count_paths, count_walks, find_tight_ham_cycle, longest_path, max_matching_size, HamOutcome,
};
use tightcycle::pipeline::{certificate_check, run_pipeline, PipelineConfig, PipelineOutcome};
use tightcycle::robust::check_robust;
use tightcycle::{Graph, Hypergraph3};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "tightcycle", version, about = "Tight Hamilton cycles in 3-uniform hypergraphs")]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Write a generated instance to a .h3 file
    Gen(GenArgs),
    /// Exhaustive bitmask search for a tight Hamilton cycle
    SolveExact(SolveExactArgs),
    /// Absorption pipeline search for a tight Hamilton cycle
    SolveAbsorb(SolveAbsorbArgs),
    /// Per-vertex robust subgraph statistics
    Robust(RobustArgs),
    /// List v-absorber tuples for one vertex
    Absorbers(AbsorbersArgs),
    /// Count simple paths (or walks) between two graph vertices
    CountPaths(CountPathsArgs),
    /// Maximum set of pairwise disjoint hyperedges
    Matching(InputOnly),
    /// Longest simple path in a .g2 graph
    LongestPath(InputOnly),
    /// Validate a cycle file against an instance
    Verify(VerifyArgs),
    /// Run the pipeline and print the full stage report
    Report(SolveAbsorbArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance kind: i, ii, iii, random, complete
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Edge probability for --kind random
    #[arg(long, default_value_t = 0.85)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveExactArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// DP state budget before giving up
    #[arg(long, default_value_t = 200_000_000)]
    budget: u64,
    /// Write the found cycle here, one line of space-separated vertices
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveAbsorbArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Enforce the strict constant hierarchy and fixed-size connections
    #[arg(long)]
    faithful: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RobustArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Also measure walk-count robustness of one vertex's subgraph
    #[arg(long)]
    vertex: Option<usize>,
    #[arg(long, default_value_t = 0.02)]
    beta: f64,
    #[arg(long, default_value_t = 3)]
    ell: usize,
    #[arg(long, default_value_t = 0.25)]
    zeta: f64,
}

#[derive(Args)]
struct AbsorbersArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    vertex: usize,
    #[arg(long, default_value_t = 10)]
    limit: usize,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 0.25)]
    zeta: f64,
}

#[derive(Args)]
struct CountPathsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    from: usize,
    #[arg(long)]
    to: usize,
    #[arg(long)]
    len: usize,
    /// Count walks (vertices may repeat) instead of simple paths
    #[arg(long)]
    walks: bool,
}

#[derive(Args)]
struct InputOnly {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    cycle: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("TIGHTCYCLE_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: TIGHTCYCLE_THREADS must be a positive integer");
                return ExitCode::from(EXIT_INPUT);
            }
        }
    }
    let code = match run(&cli) {
        Ok(code) => code,
        Err(msg) => {
            if cli.json {
                println!("{}", json!({ "error": msg }));
            } else {
                eprintln!("error: {msg}");
            }
            EXIT_INPUT
        }
    };
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.verb {
        Verb::Gen(a) => gen(a, cli.json),
        Verb::SolveExact(a) => solve_exact(a, cli.json),
        Verb::SolveAbsorb(a) => solve_absorb(a, cli.json, false),
        Verb::Robust(a) => robust(a, cli.json),
        Verb::Absorbers(a) => absorbers(a, cli.json),
        Verb::CountPaths(a) => count(a, cli.json),
        Verb::Matching(a) => matching(a, cli.json),
        Verb::LongestPath(a) => longest(a, cli.json),
        Verb::Verify(a) => verify(a, cli.json),
        Verb::Report(a) => solve_absorb(a, cli.json, true),
    }
}

fn load_h3(path: &Path) -> Result<Hypergraph3, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_h3(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_g2(path: &Path) -> Result<Graph, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_g2(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn save(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn gen(a: &GenArgs, json: bool) -> Result<u8, String> {
    let h = match a.kind.as_str() {
        "random" => random_hypergraph(a.n, a.p, a.seed),
        "complete" => Hypergraph3::complete(a.n),
        kind => {
            let kind: ExtremalKind = kind.parse()?;
            extremal_example(kind, a.n).map_err(|e| e.to_string())?
        }
    };
    save(&a.out, &write_h3(&h))?;
    if json {
        println!(
            "{}",
            json!({ "n": h.n(), "edges": h.edge_count(), "file": a.out.display().to_string() })
        );
    } else {
        println!("wrote {} (n={}, {} edges)", a.out.display(), h.n(), h.edge_count());
    }
    Ok(EXIT_OK)
}

fn emit_cycle(
    seq: &[usize],
    out: Option<&PathBuf>,
    json: bool,
    extra: serde_json::Value,
) -> Result<(), String> {
    if let Some(path) = out {
        save(path, &write_seq(seq))?;
    }
    if json {
        let mut obj = json!({ "outcome": "cycle", "cycle": seq });
        merge(&mut obj, extra);
        println!("{obj}");
    } else {
        println!("cycle: {}", write_seq(seq).trim_end());
    }
    Ok(())
}

fn merge(into: &mut serde_json::Value, from: serde_json::Value) {
    if let (Some(a), Some(b)) = (into.as_object_mut(), from.as_object()) {
        for (k, v) in b {
            a.insert(k.clone(), v.clone());
        }
    }
}

fn solve_exact(a: &SolveExactArgs, json: bool) -> Result<u8, String> {
    let h = load_h3(&a.input)?;
    match find_tight_ham_cycle(&h, a.budget) {
        HamOutcome::Cycle(c) => {
            emit_cycle(c.seq(), a.out.as_ref(), json, json!({}))?;
            Ok(EXIT_OK)
        }
        HamOutcome::NoCycle => {
            if json {
                println!("{}", json!({ "outcome": "no-cycle" }));
            } else {
                println!("no tight Hamilton cycle (exhaustive)");
            }
            Ok(EXIT_NEGATIVE)
        }
        HamOutcome::Budget { states_explored } => {
            if json {
                println!("{}", json!({ "outcome": "budget", "states": states_explored }));
            } else {
                println!("budget exhausted after {states_explored} states; nothing claimed");
            }
            Ok(EXIT_BUDGET)
        }
    }
}

fn solve_absorb(a: &SolveAbsorbArgs, json: bool, full_report: bool) -> Result<u8, String> {
    let h = load_h3(&a.input)?;
    let cfg = PipelineConfig { seed: a.seed, faithful: a.faithful, ..PipelineConfig::default() };
    let result = run_pipeline(&h, &cfg);
    if full_report {
        println!("{}", serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?);
        if let PipelineOutcome::Cycle(c) = &result.outcome {
            if let Some(path) = &a.out {
                save(path, &write_seq(c.seq()))?;
            }
        }
        return Ok(match &result.outcome {
            PipelineOutcome::Cycle(_) => EXIT_OK,
            PipelineOutcome::StageFailure { stage: "config", .. } => EXIT_INPUT,
            PipelineOutcome::StageFailure { .. } => EXIT_NEGATIVE,
        });
    }
    match &result.outcome {
        PipelineOutcome::Cycle(c) => {
            emit_cycle(
                c.seq(),
                a.out.as_ref(),
                json,
                json!({ "certificate": result.certificate }),
            )?;
            Ok(EXIT_OK)
        }
        PipelineOutcome::StageFailure { stage, diagnosis } => {
            if json {
                println!(
                    "{}",
                    json!({ "outcome": "stage-failure", "stage": stage, "diagnosis": diagnosis })
                );
            } else {
                println!("stage failure at {stage}: {diagnosis}");
            }
            Ok(if *stage == "config" { EXIT_INPUT } else { EXIT_NEGATIVE })
        }
    }
}

fn robust(a: &RobustArgs, json: bool) -> Result<u8, String> {
    let h = load_h3(&a.input)?;
    let fam = RobustFamily::build(&h, a.alpha);
    let n = h.n();
    let rows: Vec<(usize, usize, usize)> =
        (0..n).map(|v| (v, fam.r(v).vertex_count(), fam.r(v).edge_count())).collect();
    let pairs = connectable_pairs(&fam, a.zeta).len();
    let vertex_report = match a.vertex {
        Some(v) if v >= n => return Err(format!("vertex {v} out of range (n={n})")),
        Some(v) => Some(check_robust(fam.r(v), a.beta, a.ell, 2000).map_err(|e| e.to_string())?),
        None => None,
    };
    if json {
        println!(
            "{}",
            json!({
                "alpha": a.alpha,
                "vertices": rows.iter().map(|(v, k, e)| json!({ "v": v, "size": k, "edges": e })).collect::<Vec<_>>(),
                "connectable_pairs": pairs,
                "zeta": a.zeta,
                "vertex_report": vertex_report,
            })
        );
    } else {
        for (v, k, e) in &rows {
            println!("v={v:3}  |V(R)|={k:3}  e(R)={e}");
        }
        println!("{pairs} connectable pairs at zeta={}", a.zeta);
        if let Some(r) = &vertex_report {
            println!(
                "vertex {}: beta_observed={:.6} (>= {}: {}){}",
                a.vertex.unwrap(),
                r.beta_observed,
                a.beta,
                r.meets_beta,
                if r.partial { ", sampled" } else { "" }
            );
        }
    }
    Ok(EXIT_OK)
}

fn absorbers(a: &AbsorbersArgs, json: bool) -> Result<u8, String> {
    let h = load_h3(&a.input)?;
    if a.vertex >= h.n() {
        return Err(format!("vertex {} out of range (n={})", a.vertex, h.n()));
    }
    let fam = RobustFamily::build(&h, a.alpha);
    let tuples = find_v_absorbers(&h, &fam, a.vertex, a.zeta, a.limit);
    if json {
        println!("{}", json!({ "vertex": a.vertex, "absorbers": tuples }));
    } else {
        for t in &tuples {
            println!("{}", write_seq(&t.vertices()).trim_end());
        }
        println!("{} absorbers for vertex {}", tuples.len(), a.vertex);
    }
    Ok(EXIT_OK)
}

fn count(a: &CountPathsArgs, json: bool) -> Result<u8, String> {
    let g = load_g2(&a.input)?;
    let n = g.ambient_n();
    if a.from >= n || a.to >= n {
        return Err(format!("endpoint out of range (n={n})"));
    }
    let value: String = if a.walks {
        count_walks(&g, a.from, a.to, a.len).to_string()
    } else {
        match count_paths(&g, a.from, a.to, a.len) {
            Ok(c) => c.to_string(),
            Err(e) => return Err(e.to_string()),
        }
    };
    if json {
        let kind = if a.walks { "walks" } else { "paths" };
        println!(
            "{}",
            json!({ "kind": kind, "from": a.from, "to": a.to, "len": a.len, "count": value })
        );
    } else {
        println!("{value}");
    }
    Ok(EXIT_OK)
}

fn matching(a: &InputOnly, json: bool) -> Result<u8, String> {
    let h = load_h3(&a.input)?;
    let m = max_matching_size(&h);
    if json {
        println!("{}", json!({ "size": m.size, "exact": m.exact }));
    } else {
        println!("{}{}", m.size, if m.exact { "" } else { " (lower bound)" });
    }
    Ok(EXIT_OK)
}

fn longest(a: &InputOnly, json: bool) -> Result<u8, String> {
    let g = load_g2(&a.input)?;
    let len = longest_path(&g).map_err(|e| e.to_string())?;
    if json {
        println!("{}", json!({ "longest_path_vertices": len }));
    } else {
        println!("{len}");
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, json: bool) -> Result<u8, String> {
    let h = load_h3(&a.input)?;
    let text = fs::read_to_string(&a.cycle)
        .map_err(|e| format!("cannot read {}: {e}", a.cycle.display()))?;
    let seq = parse_seq(&text).map_err(|e| format!("{}: {e}", a.cycle.display()))?;
    match certificate_check(&h, &seq) {
        Ok(()) => {
            if json {
                println!("{}", json!({ "verdict": "valid", "vertices": seq.len() }));
            } else {
                println!("valid tight Hamilton cycle ({} vertices)", seq.len());
            }
            Ok(EXIT_OK)
        }
        Err(why) => {
            if json {
                println!("{}", json!({ "verdict": "invalid", "reason": why }));
            } else {
                println!("invalid: {why}");
            }
            Ok(EXIT_NEGATIVE)
        }
    }
}
