//! Violation tables over a range of N and a list of strategy families.
//!
//! Families are written `d<dim>-sym` (one shared encoded state, uniform
//! weights), `d<dim>-asym` (free encoded states, uniform weights),
//! `d<dim>-free` (everything free), `theorem1` (the closed-form optimum of the
//! symmetric qubit family) and `theorem2` (the exact optimum over second-order
//! interference behaviors). Every entry of `d_list` adds a `d<dim>-free` row.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use carrier_core::exact::{format_rational, to_f64, Rational};
use carrier_core::interference_lp::{solve_second_order_lp, theorem2_delta};
use carrier_core::quantum::{optimize_violation, theorem1_delta_exact, OptimizeOptions};
use carrier_core::Exec;
use clap::Args;
use serde::Deserialize;

use crate::{CmdResult, Failure};

pub const HEADER: &str = "N,mode,delta,delta_exact,source,seed,restarts";
pub const MAX_SCAN_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Shared encoded state, uniform weights.
    Sym,
    /// Site-dependent encoded states, uniform weights.
    Asym,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Numeric { d: usize, family: Family },
    Theorem1,
    Theorem2,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "theorem1" => return Ok(Mode::Theorem1),
            "theorem2" => return Ok(Mode::Theorem2),
            _ => {}
        }
        let bad = || format!("unknown mode {s:?}; expected d<dim>-sym, d<dim>-asym, d<dim>-free, theorem1 or theorem2");
        let (dim, family) = s.strip_prefix('d').and_then(|rest| rest.split_once('-')).ok_or_else(bad)?;
        let d: usize = dim.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        let family = match family {
            "sym" => Family::Sym,
            "asym" => Family::Asym,
            "free" => Family::Free,
            _ => return Err(bad()),
        };
        Ok(Mode::Numeric { d, family })
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Theorem1 => f.write_str("theorem1"),
            Mode::Theorem2 => f.write_str("theorem2"),
            Mode::Numeric { d, family } => {
                let tag = match family {
                    Family::Sym => "sym",
                    Family::Asym => "asym",
                    Family::Free => "free",
                };
                write!(f, "d{d}-{tag}")
            }
        }
    }
}

/// Contents of the TOML file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n_range: Option<[usize; 2]>,
    d_list: Option<Vec<usize>>,
    modes: Option<Vec<String>>,
    restarts: Option<usize>,
    seed: Option<u64>,
    output_path: Option<PathBuf>,
}

/// Command-line values; they take precedence over the file.
#[derive(Args, Debug, Default)]
pub struct Overrides {
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Comma-separated list of extra free-optimization dimensions.
    #[arg(long, value_delimiter = ',')]
    d_list: Option<Vec<usize>>,
    /// Comma-separated list of modes.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<String>>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; `-` writes to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub modes: Vec<Mode>,
    pub restarts: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

const DEFAULT_MODES: [&str; 6] = ["d1-sym", "d1-asym", "d2-sym", "d2-free", "theorem1", "theorem2"];

impl ScanConfig {
    fn resolve(file: FileConfig, cli: &Overrides) -> Result<Self, Failure> {
        let [file_min, file_max] = file.n_range.unwrap_or([2, 6]);
        let n_min = cli.n_min.unwrap_or(file_min);
        let n_max = cli.n_max.unwrap_or(file_max);
        if n_min < 2 || n_max > MAX_SCAN_N || n_min > n_max {
            return Err(Failure::Usage(format!("N range [{n_min}, {n_max}] must lie within [2, {MAX_SCAN_N}]")));
        }
        let names = cli.modes.clone().or(file.modes).unwrap_or_else(|| DEFAULT_MODES.iter().map(|s| s.to_string()).collect());
        let mut modes = names.iter().map(|s| s.trim().parse::<Mode>()).collect::<Result<Vec<_>, _>>().map_err(Failure::Usage)?;
        for d in cli.d_list.clone().or(file.d_list).unwrap_or_default() {
            if d == 0 {
                return Err(Failure::Usage("d_list entries must be at least 1".into()));
            }
            let mode = Mode::Numeric { d, family: Family::Free };
            if !modes.contains(&mode) {
                modes.push(mode);
            }
        }
        let restarts = cli.restarts.or(file.restarts).unwrap_or(carrier_core::quantum::optimize::DEFAULT_RESTARTS);
        if restarts == 0 {
            return Err(Failure::Usage("restarts must be at least 1".into()));
        }
        let output_path = cli.output.clone().or(file.output_path).filter(|p| p.as_os_str() != "-");
        Ok(Self { n_min, n_max, modes, restarts, seed: cli.seed.or(file.seed).unwrap_or(0), output_path })
    }

    pub fn load(path: &Path, cli: &Overrides) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
        let file: FileConfig = toml::from_str(&text).map_err(|e| Failure::Data(format!("invalid config {}: {e}", path.display())))?;
        Self::resolve(file, cli)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub mode: Mode,
    pub delta: f64,
    pub delta_exact: Option<Rational>,
    pub source: &'static str,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
}

/// Decimal with 15 significant digits.
pub fn decimal15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (14 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn exact_row(n: usize, mode: Mode, value: Rational, source: &'static str) -> Row {
    Row { n, mode, delta: to_f64(&value), delta_exact: Some(value), source, seed: None, restarts: None }
}

pub fn compute_row(n: usize, mode: Mode, cfg: &ScanConfig) -> Result<Row, Failure> {
    Ok(match mode {
        Mode::Theorem1 => exact_row(n, mode, theorem1_delta_exact(n), "closed-form"),
        Mode::Theorem2 if n > 3 => exact_row(n, mode, theorem2_delta(n)?, "closed-form"),
        // The closed form needs N > 3; below that the exact program still applies.
        Mode::Theorem2 => exact_row(n, mode, solve_second_order_lp(n)?.delta, "exact-lp"),
        Mode::Numeric { d, family } => {
            let opts = OptimizeOptions {
                symmetric_unitaries: family == Family::Sym,
                symmetric_weights: family != Family::Free,
                restarts: cfg.restarts,
                seed: cfg.seed,
                exec: Exec::Sequential,
                ..OptimizeOptions::default()
            };
            let out = optimize_violation(n, d, &opts)?;
            Row { n, mode, delta: out.delta, delta_exact: None, source: "numeric", seed: Some(cfg.seed), restarts: Some(cfg.restarts) }
        }
    })
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            r.mode,
            decimal15(r.delta),
            r.delta_exact.as_ref().map(format_rational).unwrap_or_default(),
            r.source,
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.restarts.map(|s| s.to_string()).unwrap_or_default(),
        );
    }
    out
}

pub fn run_scan(cfg: &ScanConfig, exec: Exec) -> Result<Vec<Row>, Failure> {
    let jobs: Vec<(usize, Mode)> = (cfg.n_min..=cfg.n_max).flat_map(|n| cfg.modes.iter().map(move |m| (n, *m))).collect();
    exec.map(jobs, |(n, mode)| compute_row(n, mode, cfg)).into_iter().collect()
}

pub fn cmd_scan(path: &Path, overrides: &Overrides, exec: Exec) -> CmdResult {
    let cfg = ScanConfig::load(path, overrides)?;
    let csv = render_csv(&run_scan(&cfg, exec)?);
    match &cfg.output_path {
        Some(p) => fs::write(p, csv).map_err(|e| Failure::Data(format!("cannot write {}: {e}", p.display())))?,
        None => crate::emit(&csv),
    }
    Ok(0)
}
