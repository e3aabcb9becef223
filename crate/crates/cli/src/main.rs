//! `elimdist` command-line front end. Every command prints one JSON object
//! on standard output.
//!
//! Exit codes: 0 on a computed answer, 1 when `decide --mode both` sees the
//! two routes disagree or an internal check fails, 2 on bad input, 3 when a
//! resource guard is hit.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use elimdist::generator::{generate_decorated_grid, Base, DecorationSpec, Hub};
use elimdist::grid_minor::{validate_model, NoModel, RepairingProvider};
use elimdist::io;
use elimdist::oracle::{elim_distance_exact, member_exact, treedepth, OracleConfig};
use elimdist::orders::{check_elimination_to_degree, TreeOrder};
use elimdist::pipeline::{solve_with, Decision, SolverConfig};
use elimdist::sequences::{satisfies, PortedComponent};
use elimdist::{Error, Graph};

#[derive(Parser)]
#[command(name = "elimdist", version, about = "Elimination distance to bounded degree")]
struct Cli {
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the graph has elimination distance at most k to degree d.
    Decide(DecideArgs),
    /// Exact elimination distance to degree d.
    Oracle(OracleArgs),
    /// Exact treedepth.
    Treedepth(TreedepthArgs),
    /// Whether a ported component satisfies a sequence.
    Label(LabelArgs),
    /// Check an elimination order to degree d.
    ValidateOrder(ValidateOrderArgs),
    /// Check a grid minor model.
    ValidateModel(ValidateModelArgs),
    /// Generate a decorated grid or wall with a known grid minor model.
    GenGrid(GenGridArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Auto,
    Oracle,
    Pipeline,
    Both,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Auto => "auto",
            Mode::Oracle => "oracle",
            Mode::Pipeline => "pipeline",
            Mode::Both => "both",
        }
    }
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    /// Largest instance the oracle accepts; also the auto-mode threshold.
    #[arg(long, default_value_t = 12)]
    guard: usize,
    /// Grid minor model used by the small-degree route.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Search nodes allowed per exact sub-search.
    #[arg(long)]
    work_limit: Option<u64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 16)]
    guard: usize,
}

#[derive(Args)]
struct TreedepthArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 16)]
    guard: usize,
}

#[derive(Args)]
struct LabelArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ports: PathBuf,
    #[arg(long)]
    sequence: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Largest residual decided by exact search.
    #[arg(long, default_value_t = 16)]
    guard: usize,
}

#[derive(Args)]
struct ValidateOrderArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    order: PathBuf,
    /// Also require depth at most k.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct ValidateModelArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct GenGridArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value = "grid")]
    base: String,
    /// A hub as `row,col,degree` (0-based face). Repeatable.
    #[arg(long, value_parser = parse_hub)]
    hubs: Vec<Hub>,
    #[arg(long, default_value_t = 0)]
    subdivide: usize,
    #[arg(long, default_value_t = 0)]
    pendants: usize,
    #[arg(long, default_value_t = 1)]
    pendant_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write `<out>.graph` and `<out>.model` as well.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_hub(s: &str) -> Result<Hub, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [i, j, deg] = parts.as_slice() else {
        return Err(format!("expected row,col,degree, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number {t:?}"));
    Ok(Hub {
        face: (num(i)?, num(j)?),
        degree: num(deg)?,
    })
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Resource(String),
    Disagreement(Value),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            Failure::Resource(e.to_string())
        } else if matches!(e, Error::Internal(_)) {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Disagreement(_) | Failure::Internal(_) => 1,
            Failure::Input(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Input(msg) => json!({"error": msg, "kind": "input"}),
            Failure::Resource(msg) => json!({"error": msg, "kind": "resource"}),
            Failure::Internal(msg) => json!({"error": msg, "kind": "internal"}),
            Failure::Disagreement(v) => {
                let mut v = v.clone();
                v["error"] = json!("oracle and pipeline disagree");
                v["kind"] = json!("disagreement");
                v
            }
        }
    }
}

type Outcome = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    io::parse_graph(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: elimdist::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn order_json(o: &TreeOrder) -> Value {
    o.pairs().into_iter().map(|(v, p)| json!([v, p])).collect()
}

fn decision_json(dec: &Decision) -> Value {
    json!({
        "member": dec.member,
        "k": dec.k,
        "d": dec.d,
        "stage": dec.stage,
        "trace": dec.trace,
        "witness": dec.witness.as_ref().map(order_json),
    })
}

fn decide(a: &DecideArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let n = g.num_vertices();
    let mut cfg = SolverConfig::default();
    if let Some(w) = a.work_limit {
        cfg.work_limit = w;
    }
    let ocfg = OracleConfig {
        work_limit: cfg.work_limit,
        ..OracleConfig::with_max_vertices(a.guard)
    };
    let run_pipeline = |g: &Graph| -> Result<Decision, Failure> {
        Ok(match &a.model {
            Some(p) => {
                let mm = with_path(p, io::parse_model(&read(p)?))?;
                solve_with(g, a.k, a.d, &mut RepairingProvider::new(mm), &cfg)?
            }
            None => solve_with(g, a.k, a.d, &mut NoModel, &cfg)?,
        })
    };
    let mode = match a.mode {
        Mode::Auto if n <= a.guard => Mode::Oracle,
        Mode::Auto => Mode::Pipeline,
        m => m,
    };
    let mut out = match mode {
        Mode::Oracle => json!({
            "member": member_exact(&g, a.k, a.d, &ocfg)?,
            "k": a.k,
            "d": a.d,
        }),
        Mode::Pipeline => decision_json(&run_pipeline(&g)?),
        Mode::Both => {
            let exact = member_exact(&g, a.k, a.d, &ocfg)?;
            let dec = run_pipeline(&g)?;
            let mut v = decision_json(&dec);
            v["oracle"] = json!(exact);
            v["pipeline"] = json!(dec.member);
            v["agree"] = json!(exact == dec.member);
            if exact != dec.member {
                v["mode"] = json!("both");
                v["vertices"] = json!(n);
                return Err(Failure::Disagreement(v));
            }
            v
        }
        Mode::Auto => unreachable!("auto is resolved above"),
    };
    out["mode"] = json!(a.mode.name());
    out["route"] = json!(mode.name());
    out["vertices"] = json!(n);
    Ok(out)
}

fn oracle(a: &OracleArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let ed = elim_distance_exact(&g, a.d, &OracleConfig::with_max_vertices(a.guard))?;
    Ok(json!({"ed": ed, "d": a.d, "vertices": g.num_vertices()}))
}

fn treedepth_cmd(a: &TreedepthArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let td = treedepth(&g, &OracleConfig::with_max_vertices(a.guard))?;
    Ok(json!({"td": td, "vertices": g.num_vertices()}))
}

fn label(a: &LabelArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let ports = with_path(&a.ports, io::parse_ports(&read(&a.ports)?))?;
    let seq = with_path(&a.sequence, io::parse_sequence(&read(&a.sequence)?))?;
    let mm = match &a.model {
        Some(p) => Some(with_path(p, io::parse_model(&read(p)?))?),
        None => None,
    };
    let pc = PortedComponent::new(g, ports)?;
    let cfg = OracleConfig::with_max_vertices(a.guard);
    let r = satisfies(&pc, mm.as_ref(), &seq, a.k, a.d, &cfg)?;
    Ok(json!({
        "satisfies": r.satisfied,
        "decided_by": r.decided_by,
        "deleted": r.deleted,
        "residual_vertices": r.residual_vertices,
    }))
}

fn validate_order(a: &ValidateOrderArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let o = with_path(&a.order, io::parse_order(&read(&a.order)?))?;
    let report = check_elimination_to_degree(&g, &o, a.d)?;
    let depth_ok = a.k.map_or(true, |k| report.depth <= k);
    let mut v = serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    v["valid"] = json!(report.valid && depth_ok);
    v["depth_ok"] = json!(depth_ok);
    Ok(v)
}

fn validate_model_cmd(a: &ValidateModelArgs) -> Outcome {
    let g = read_graph(&a.input)?;
    let mm = with_path(&a.model, io::parse_model(&read(&a.model)?))?;
    let report = validate_model(&g, &mm);
    let mut v = serde_json::to_value(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    v["m"] = json!(mm.m);
    Ok(v)
}

fn gen_grid(a: &GenGridArgs) -> Outcome {
    let base: Base = a.base.parse()?;
    let spec = DecorationSpec {
        base,
        hubs: a.hubs.clone(),
        subdivisions: a.subdivide,
        pendant_trees: a.pendants,
        pendant_tree_size: a.pendant_size,
    };
    let inst = generate_decorated_grid(a.m, a.k, a.d, &spec, a.seed)?;
    if let Some(prefix) = &a.out {
        let write = |ext: &str, text: String| {
            let p = prefix.with_extension(ext);
            fs::write(&p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        };
        write("graph", io::write_graph(&inst.graph))?;
        write("model", io::write_model(&inst.model))?;
    }
    let edges: Vec<[usize; 2]> = inst.graph.edges().map(|(u, v)| [u, v]).collect();
    let cells: Vec<[usize; 3]> = inst.model.cell.iter().map(|(&v, &(r, c))| [v, r, c]).collect();
    Ok(json!({
        "n": inst.graph.capacity(),
        "edges": edges,
        "model": {"m": inst.model.m, "cells": cells},
        "expected": inst.expected,
        "spec": spec,
        "seed": a.seed,
    }))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Command::Decide(a) => decide(a),
        Command::Oracle(a) => oracle(a),
        Command::Treedepth(a) => treedepth_cmd(a),
        Command::Label(a) => label(a),
        Command::ValidateOrder(a) => validate_order(a),
        Command::ValidateModel(a) => validate_model_cmd(a),
        Command::GenGrid(a) => gen_grid(a),
    }
}

fn emit(v: &Value, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(v)
    } else {
        serde_json::to_string(v)
    };
    // A closed pipe is not worth a panic.
    let _ = writeln!(std::io::stdout(), "{}", text.expect("JSON values always serialize"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            emit(&v, cli.json);
            ExitCode::SUCCESS
        }
        Err(f) => {
            emit(&f.to_json(), cli.json);
            ExitCode::from(f.code())
        }
    }
}
