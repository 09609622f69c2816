//! `carrier`: batch front end for the junta polytopes and the quantum
//! strategy optimizer.
//!
//! Exit codes: 0 success (or member), 1 negative verdict, 2 usage or data
//! error, 3 resource budget exceeded. Errors go to stderr as one JSON object.

mod scan;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carrier_core::exact::{format_rational, to_f64};
use carrier_core::interference_lp::{solve_second_order_lp, symmetric_profile, theorem2_delta};
use carrier_core::juntas::{count_k_juntas, enumerate_k_juntas, DEFAULT_JUNTA_BUDGET};
use carrier_core::membership::membership_c;
use carrier_core::polytope::{facet_enumeration, vertices_of_c, PolytopeBudget};
use carrier_core::quantum::{lemma3_check, optimize_violation, theorem1_delta, Backend, OptimizeOptions};
use carrier_core::{Error, Exec, RationalBehavior};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const ENV_JUNTA_BUDGET: &str = "CARRIER_JUNTA_BUDGET";
pub const ENV_MAX_VERTICES: &str = "CARRIER_MAX_VERTICES";
pub const ENV_MAX_AFFINE_DIM: &str = "CARRIER_MAX_AFFINE_DIM";

#[derive(Parser)]
#[command(name = "carrier", version, about = "Junta polytopes and single-particle quantum strategies")]
struct Cli {
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count or list the K-juntas on N inputs.
    Junta {
        action: JuntaAction,
        n: usize,
        k: usize,
        #[command(flatten)]
        budget: JuntaBudget,
        /// Write the enumeration here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Geometry of the junta polytope C(N,K).
    Polytope {
        action: PolytopeAction,
        n: usize,
        k: usize,
        #[command(flatten)]
        budget: JuntaBudget,
        /// Largest vertex count accepted by facet enumeration.
        #[arg(long)]
        budget_vertices: Option<usize>,
        /// Largest affine dimension accepted by facet enumeration.
        #[arg(long)]
        budget_dim: Option<usize>,
    },
    /// Decide membership of a behavior file in C(N,K).
    Membership {
        behavior_file: PathBuf,
        n: usize,
        k: usize,
        #[command(flatten)]
        budget: JuntaBudget,
    },
    /// Maximize the fingerprinting violation over strategies of internal dimension d.
    Optimize {
        n: usize,
        d: usize,
        /// Share one encoded state between all sites.
        #[arg(long)]
        sym_u: bool,
        /// Fix the input weights to be uniform.
        #[arg(long)]
        sym_p: bool,
        #[command(flatten)]
        run: RunArgs,
        /// Write the per-restart JSON-lines log here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Compare best violations at d = N+1 and d = N+2.
    DimensionCheck {
        n: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Produce the violation table described by a TOML config.
    Scan {
        config: PathBuf,
        #[command(flatten)]
        overrides: scan::Overrides,
    },
    /// Exact optimum of the second-order interference program (N > 3).
    Theorem2 { n: usize },
}

#[derive(Clone, Copy, ValueEnum)]
enum JuntaAction {
    Count,
    Enumerate,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolytopeAction {
    Facets,
    Fvector,
    Dim,
}

#[derive(Args)]
struct JuntaBudget {
    /// Largest enumeration cost 2^(2^K) C(N,K) accepted.
    #[arg(long)]
    budget_juntas: Option<u128>,
}

#[derive(Args, Clone)]
pub struct RunArgs {
    #[arg(long, default_value_t = carrier_core::quantum::optimize::DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = BackendArg::Hybrid)]
    backend: BackendArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Hybrid,
    NelderMead,
    Bfgs,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Hybrid => Backend::Hybrid,
            BackendArg::NelderMead => Backend::NelderMead,
            BackendArg::Bfgs => Backend::Bfgs,
        }
    }
}

/// What went wrong, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Data(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Data(m) => ("data", m),
            Failure::Budget(m) => ("budget", m),
        };
        json!({ "error": kind, "message": message })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } => Failure::Budget(e.to_string()),
            Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn env_override<T: std::str::FromStr>(var: &str) -> Result<Option<T>, Failure> {
    match std::env::var(var) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure::Usage(format!("{var}={v} is not a valid number"))),
        Err(_) => Ok(None),
    }
}

fn junta_budget(b: &JuntaBudget) -> Result<u128, Failure> {
    Ok(b.budget_juntas.or(env_override(ENV_JUNTA_BUDGET)?).unwrap_or(DEFAULT_JUNTA_BUDGET))
}

/// Writes to stdout; a closed pipe downstream is not an error worth reporting.
pub fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn print_json(v: &Value) {
    emit(&(serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"));
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn cmd_junta(action: JuntaAction, n: usize, k: usize, budget: &JuntaBudget, output: Option<&Path>, exec: Exec) -> CmdResult {
    if k > n {
        return Err(Failure::Usage(format!("K = {k} exceeds N = {n}")));
    }
    match action {
        JuntaAction::Count => emit(&format!("{}\n", count_k_juntas(n, k))),
        JuntaAction::Enumerate => {
            let list = enumerate_k_juntas(n, k, junta_budget(budget)?, exec)?;
            let v = json!({
                "n_inputs": n,
                "k": k,
                "count": list.len(),
                "truth_tables_hex": list.iter().map(|f| f.to_hex()).collect::<Vec<_>>(),
            });
            write_or_print(output, &(serde_json::to_string_pretty(&v).expect("serializable") + "\n"))?;
        }
    }
    Ok(0)
}

fn cmd_polytope(action: PolytopeAction, n: usize, k: usize, budget: &JuntaBudget, vertices: Option<usize>, dim: Option<usize>, exec: Exec) -> CmdResult {
    if k > n {
        return Err(Failure::Usage(format!("K = {k} exceeds N = {n}")));
    }
    let p = vertices_of_c(n, k, junta_budget(budget)?, exec)?;
    if let PolytopeAction::Dim = action {
        print_json(&json!({ "n_inputs": n, "k": k, "vertices": p.vertices().len(), "affine_dim": p.affine_dim() }));
        return Ok(0);
    }
    let defaults = PolytopeBudget::default();
    let poly_budget = PolytopeBudget {
        max_vertices: vertices.or(env_override(ENV_MAX_VERTICES)?).unwrap_or(defaults.max_vertices),
        max_affine_dim: dim.or(env_override(ENV_MAX_AFFINE_DIM)?).unwrap_or(defaults.max_affine_dim),
    };
    let p = facet_enumeration(p, poly_budget)?;
    let mut report = p.report()?;
    report["n_inputs"] = json!(n);
    report["k"] = json!(k);
    if let PolytopeAction::Fvector = action {
        report = json!({ "n_inputs": n, "k": k, "affine_dim": p.affine_dim(), "f_vector": report["f_vector"] });
    }
    print_json(&report);
    Ok(0)
}

fn cmd_membership(file: &Path, n: usize, k: usize, budget: &JuntaBudget, exec: Exec) -> CmdResult {
    let text = fs::read_to_string(file).map_err(|e| Failure::Data(format!("cannot read {}: {e}", file.display())))?;
    let beh = RationalBehavior::from_json_str(&text).map_err(|e| Failure::Data(e.to_string()))?;
    if beh.n_inputs() != n {
        return Err(Failure::Data(format!("behavior file has {} inputs, expected {n}", beh.n_inputs())));
    }
    if k > n {
        return Err(Failure::Usage(format!("K = {k} exceeds N = {n}")));
    }
    let cert = membership_c(&beh, k, junta_budget(budget)?, exec)?;
    print_json(&cert.to_json());
    Ok(if cert.is_member() { 0 } else { 1 })
}

pub fn run_options(run: &RunArgs, sym_u: bool, sym_p: bool, exec: Exec) -> OptimizeOptions {
    OptimizeOptions {
        symmetric_unitaries: sym_u,
        symmetric_weights: sym_p,
        restarts: run.restarts,
        seed: run.seed,
        backend: run.backend.into(),
        exec,
        ..OptimizeOptions::default()
    }
}

fn cmd_optimize(n: usize, d: usize, sym_u: bool, sym_p: bool, run: &RunArgs, log: Option<&Path>, exec: Exec) -> CmdResult {
    let opts = run_options(run, sym_u, sym_p, exec);
    let out = optimize_violation(n, d, &opts)?;
    if let Some(path) = log {
        write_or_print(Some(path), &out.restart_log())?;
    }
    print_json(&json!({
        "n_inputs": n,
        "internal_dim": d,
        "symmetric_unitaries": sym_u,
        "symmetric_weights": sym_p,
        "restarts": run.restarts,
        "seed": run.seed,
        "delta": out.delta,
        "symmetric_optimum": theorem1_delta(n),
        "best_restart": out.best_restart,
        "strategy": out.strategy.to_json(),
    }));
    Ok(0)
}

fn cmd_dimension_check(n: usize, tol: f64, run: &RunArgs, exec: Exec) -> CmdResult {
    let report = lemma3_check(n, tol, &run_options(run, false, false, exec))?;
    print_json(&serde_json::to_value(&report).expect("serializable"));
    Ok(if report.holds { 0 } else { 1 })
}

fn cmd_theorem2(n: usize) -> CmdResult {
    let delta = theorem2_delta(n)?;
    let report = solve_second_order_lp(n)?;
    if report.delta != delta {
        return Err(Failure::Data(format!("program optimum {} disagrees with the closed form {}", report.delta, delta)));
    }
    let profile = symmetric_profile(&report.z);
    let one = carrier_core::exact::int(1);
    let mut v = report.to_json();
    v["delta_decimal"] = json!(to_f64(&delta));
    v["p0_all_zero_input"] = json!(format_rational(&(&one - &profile[0])));
    v["behavior_by_weight"] = profile
        .iter()
        .enumerate()
        .map(|(h, p)| json!({ "h": h, "p1": format_rational(p), "p0": format_rational(&(&one - p)) }))
        .collect();
    print_json(&v);
    Ok(0)
}

fn run(cli: Cli) -> CmdResult {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Junta { action, n, k, budget, output } => cmd_junta(action, n, k, &budget, output.as_deref(), exec),
        Command::Polytope { action, n, k, budget, budget_vertices, budget_dim } => cmd_polytope(action, n, k, &budget, budget_vertices, budget_dim, exec),
        Command::Membership { behavior_file, n, k, budget } => cmd_membership(&behavior_file, n, k, &budget, exec),
        Command::Optimize { n, d, sym_u, sym_p, run, log } => cmd_optimize(n, d, sym_u, sym_p, &run, log.as_deref(), exec),
        Command::DimensionCheck { n, tol, run } => cmd_dimension_check(n, tol, &run, exec),
        Command::Scan { config, overrides } => scan::cmd_scan(&config, &overrides, exec),
        Command::Theorem2 { n } => cmd_theorem2(n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let failure = Failure::Usage(e.to_string().trim().to_string());
            eprintln!("{}", failure.to_json());
            return ExitCode::from(failure.code());
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.code())
        }
    }
}
