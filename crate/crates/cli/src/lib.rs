//! Command-line front end: kernel expression parsing, run configuration
//! (flags plus an optional key=value config file, flags winning), and the
//! `solve` / `converge` / `verify` / `repro` commands with CSV artifacts.
//!
//! CSV conventions: comma-separated, `.` decimal point, scientific
//! notation with 13 significant digits, metadata confined to `#` comment
//! lines so identical configurations produce byte-identical files.

pub mod expr;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use volterra_core::analysis::{
    convergence_sweep_with, exact_example1, exact_example2, ConvergenceReport, OrderEstimate,
};
use volterra_core::oracles::{
    check_bracketing, gronwall_bound, iteration_lower_bound, recurrence_bound,
    simulate_recurrence, zeta_averaged_series, zeta_open_interval, BracketDirection,
};
use volterra_core::quad::epsilon_max;
use volterra_core::solver::{solve, SolverConfig};
use volterra_core::{Grid, Kernel, ProblemSpec};

/// Evaluation point and step-ladder depths shared by `converge` and `repro`.
const EVAL_POINT_DEFAULT: f64 = 0.001;
const LADDER_DEPTHS: std::ops::RangeInclusive<u32> = 1..=12;

#[derive(Debug, Parser)]
#[command(name = "volterra", version, about = "Solver for y^{m+1} = \u{222b}\u{2080}\u{02e3} K(x,t) y(t) dt")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem instance and write the grid solution as CSV.
    Solve(SolveArgs),
    /// Run a step-halving convergence sweep for a reference example.
    Converge(ConvergeArgs),
    /// Run the verification oracle suites and print a pass/fail table.
    Verify(VerifyArgs),
    /// Reproduce the benchmark order tables for the reference examples.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Kernel: builtin constant or an expression over x and t.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Nonlinearity exponent m > 0.
    #[arg(long)]
    pub m: Option<f64>,
    /// Right end of the interval [0, X].
    #[arg(long = "X")]
    pub x_end: Option<f64>,
    /// Number of grid panels (even).
    #[arg(long = "N")]
    pub panels: Option<usize>,
    /// Richardson-extrapolate the starting value.
    #[arg(long)]
    pub richardson: bool,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value configuration file; flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Reference example: 1 (constant kernel) or 2 (kernel e^{x-t}).
    #[arg(long)]
    pub example: Option<u8>,
    /// Nonlinearity exponent m > 0.
    #[arg(long)]
    pub m: Option<f64>,
    /// Point where the error is measured (final grid node).
    #[arg(long = "eval-point")]
    pub eval_point: Option<f64>,
    /// Richardson-extrapolate the starting value.
    #[arg(long)]
    pub richardson: bool,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value configuration file; flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name (zeta, recurrence, comparison, lower-bound, bracketing)
    /// or "all".
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Also write the pass/fail table to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Reproduce one example's table only (1 or 2); default both.
    #[arg(long)]
    pub example: Option<u8>,
    /// Richardson-extrapolate the starting value.
    #[arg(long)]
    pub richardson: bool,
    /// Output directory for table CSV files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Entry point used by the binary; returns an error on any solver failure
/// or oracle violation so the process exits nonzero.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Converge(args) => run_converge(args),
        Command::Verify(args) => run_verify(args),
        Command::Repro(args) => run_repro(args),
    }
}

// ---------------------------------------------------------------------------
// configuration file

fn load_config(path: Option<&Path>) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    let Some(path) = path else {
        return Ok(map);
    };
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), idx + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag value if present, else the config-file value, else `None`.
fn merged<T: FromStr>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| anyhow!("config key {key}={raw}: {e}")),
        None => Ok(None),
    }
}

fn merged_flag(flag: bool, cfg: &HashMap<String, String>, key: &str) -> Result<bool> {
    if flag {
        return Ok(true);
    }
    Ok(merged::<bool>(None, cfg, key)?.unwrap_or(false))
}

fn require<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing required parameter: {what} (flag or config file)"))
}

// ---------------------------------------------------------------------------
// number formatting

fn sci(v: f64) -> String {
    format!("{v:.12e}")
}

// ---------------------------------------------------------------------------
// solve

fn run_solve(args: SolveArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let kernel_src = require(merged(args.kernel, &cfg, "kernel")?, "--kernel")?;
    let m = require(merged(args.m, &cfg, "m")?, "--m")?;
    let x_end = require(merged(args.x_end, &cfg, "X")?, "--X")?;
    let panels = require(merged(args.panels, &cfg, "N")?, "--N")?;
    let richardson = merged_flag(args.richardson, &cfg, "richardson")?;
    let out = merged(args.out, &cfg, "out")?.unwrap_or_else(|| PathBuf::from("solution.csv"));

    let kernel = expr::parse_kernel(&kernel_src).map_err(|e| anyhow!("--kernel: {e}"))?;
    let spec = ProblemSpec::new(m, kernel, x_end)?;
    let grid = Grid::new(x_end, panels)?;
    let sol = solve(&SolverConfig::new(spec, grid).with_richardson(richardson))?;

    let mut csv = String::new();
    writeln!(csv, "# kernel={kernel_src}")?;
    writeln!(csv, "# m={}", sci(m))?;
    writeln!(csv, "# X={}", sci(x_end))?;
    writeln!(csv, "# N={panels}")?;
    writeln!(csv, "# start={}", sol.meta.start_rule.label())?;
    writeln!(csv, "n,x,y,u")?;
    for (n, u_n) in sol.to_original_form().iter().enumerate() {
        writeln!(csv, "{n},{},{},{}", sci(grid.node(n)), sci(sol.values[n]), sci(*u_n))?;
    }
    fs::write(&out, csv).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// converge

type ExactFn = Box<dyn Fn(f64) -> f64>;

/// Reference problem selected by `--example`: its kernel and exact solution.
fn example_problem(example: u8, m: f64) -> Result<(Kernel, ExactFn)> {
    match example {
        1 => Ok((Kernel::Constant(1.0), Box::new(move |x| exact_example1(m, x)))),
        2 => Ok((Kernel::ExpConvolution, Box::new(move |x| exact_example2(m, x)))),
        other => bail!("--example must be 1 or 2, got {other}"),
    }
}

fn sweep_example(example: u8, m: f64, x_star: f64, richardson: bool) -> Result<ConvergenceReport> {
    let (kernel, exact) = example_problem(example, m)?;
    let spec = ProblemSpec::new(m, kernel, x_star)?;
    let depths: Vec<u32> = LADDER_DEPTHS.collect();
    Ok(convergence_sweep_with(&spec, x_star, &depths, &exact, richardson)?)
}

fn run_converge(args: ConvergeArgs) -> Result<()> {
    let cfg = load_config(args.config.as_deref())?;
    let example = require(merged(args.example, &cfg, "example")?, "--example")?;
    let m = require(merged(args.m, &cfg, "m")?, "--m")?;
    let x_star = merged(args.eval_point, &cfg, "eval_point")?.unwrap_or(EVAL_POINT_DEFAULT);
    let richardson = merged_flag(args.richardson, &cfg, "richardson")?;
    let out = merged(args.out, &cfg, "out")?.unwrap_or_else(|| PathBuf::from("convergence.csv"));

    let report = sweep_example(example, m, x_star, richardson)?;
    let mut csv = String::new();
    writeln!(csv, "# example={example}")?;
    writeln!(csv, "# m={}", sci(m))?;
    writeln!(csv, "# eval_point={}", sci(x_star))?;
    csv.push_str(&report.to_csv());

    if let Some(reason) = &report.aborted {
        let partial = partial_path(&out);
        fs::write(&partial, csv).with_context(|| format!("writing {}", partial.display()))?;
        bail!("sweep aborted ({reason}); partial results in {}", partial.display());
    }
    fs::write(&out, csv).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn partial_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".partial");
    PathBuf::from(name)
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    name: &'static str,
    outcome: std::result::Result<(), String>,
}

impl Check {
    fn of(name: &'static str, result: std::result::Result<(), String>) -> Self {
        Check { name, outcome: result }
    }
}

fn suite_zeta() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let z = zeta_open_interval(0.5)?;
    checks.push(Check::of(
        "zeta: value at s=0.5",
        if (z - -1.4603545088).abs() <= 1e-8 {
            Ok(())
        } else {
            Err(format!("zeta(0.5) = {z}"))
        },
    ));

    let mut worst = 0.0f64;
    for i in 1..=20 {
        let s = i as f64 / 21.0;
        worst = worst.max((zeta_open_interval(s)? - zeta_averaged_series(s)?).abs());
    }
    checks.push(Check::of(
        "zeta: two independent evaluators agree",
        if worst <= 1e-9 {
            Ok(())
        } else {
            Err(format!("worst disagreement {worst:e}"))
        },
    ));

    let bracket_ok = (1..=20).try_for_each(|i| {
        let a = i as f64 / 21.0;
        let v = a * zeta_open_interval(1.0 - a)?;
        if -1.0 < v && v < 0.0 {
            Ok(())
        } else {
            Err(anyhow!("A = {a}: A\u{b7}zeta(1-A) = {v}"))
        }
    });
    checks.push(Check::of(
        "zeta: -1 < A\u{b7}zeta(1-A) < 0 on (0,1)",
        bracket_ok.map_err(|e| e.to_string()),
    ));
    Ok(checks)
}

fn suite_recurrence() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for a in [0.25, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0] {
        let bound = recurrence_bound(a, 1.0, 1.0)?;
        let seq = simulate_recurrence(a, 1.0, 1.0, 100_000)?;
        let worst = seq
            .iter()
            .enumerate()
            .map(|(i, e)| e * ((i + 1) as f64).powf(bound.exponent) / bound.m_const)
            .fold(0.0f64, f64::max);
        checks.push(Check::of(
            "recurrence: extremal sequence within decay bound",
            if worst <= 1.0 + 1e-12 {
                Ok(())
            } else {
                Err(format!("A = {a}: scaled max {worst}"))
            },
        ));
    }
    Ok(checks)
}

fn suite_comparison() -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for m in [1.0, 1.5, 2.0, 10.0, 100.0] {
        for x in [1e-6, 1e-3, 0.1, 1.0] {
            let g = gronwall_bound(1.0, 0.0, 0.0, m, x)?;
            let e = exact_example1(m, x);
            worst = worst.max((g - e).abs() / e);
        }
    }
    checks.push(Check::of(
        "comparison: power-kernel bound equals constant-kernel solution",
        if worst <= 1e-14 {
            Ok(())
        } else {
            Err(format!("worst relative gap {worst:e}"))
        },
    ));

    let dominated = [1.0, 2.0, 10.0].iter().try_for_each(|&m| {
        for i in 1..=10 {
            let x = 1e-4 * i as f64;
            if exact_example2(m, x) < gronwall_bound(1.0, 0.0, 0.0, m, x)? {
                bail!("m = {m}, x = {x}");
            }
        }
        Ok(())
    });
    checks.push(Check::of(
        "comparison: convolution solution dominates constant-kernel bound",
        dominated.map_err(|e| e.to_string()),
    ));

    let mut worst = 0.0f64;
    for m in [1.0, 2.0, 10.0] {
        let x = 1e-6f64;
        let ratio = exact_example2(m, x) / ((m / (m + 1.0)).powf(1.0 / m) * x.powf(1.0 / m));
        worst = worst.max((ratio - 1.0).abs());
    }
    checks.push(Check::of(
        "comparison: small-x asymptotic law",
        if worst <= 1e-3 {
            Ok(())
        } else {
            Err(format!("worst ratio deviation {worst:e}"))
        },
    ));
    Ok(checks)
}

fn suite_lower_bound() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m in [1.0, 2.0, 10.0] {
        for n_panels in [100usize, 1000] {
            let h = 1.0 / n_panels as f64;
            let spec = ProblemSpec::new(m, Kernel::Constant(1.0), 1.0)?;
            let grid = Grid::new(1.0, n_panels)?;
            let sol = solve(&SolverConfig::new(spec, grid))?;
            let eps = epsilon_max(h, m, n_panels)?;
            let scaled = eps * h.powf(-(m + 1.0) / m);
            if scaled > 0.6 {
                checks.push(Check::of(
                    "lower bound: consistency prefactor hypothesis",
                    Err(format!("m = {m}, h = {h}: eps\u{b7}h^(-(m+1)/m) = {scaled}")),
                ));
                continue;
            }
            let violated = (1..=n_panels).find_map(|n| {
                let lb = iteration_lower_bound(1.0, m, h, eps, n).ok()?;
                (sol.values[n] < lb.value).then(|| (n, lb.value - sol.values[n]))
            });
            checks.push(Check::of(
                "lower bound: iterates dominate the closed-form bound",
                match violated {
                    None => Ok(()),
                    Some((n, gap)) => Err(format!("m = {m}, h = {h}, node {n}: short by {gap:e}")),
                },
            ));
        }
    }
    Ok(checks)
}

fn suite_bracketing() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for m in [1.0, 2.0, 10.0] {
        let spec = ProblemSpec::new(m, Kernel::Constant(1.0), 1.0)?;
        let grid = Grid::new(1.0, 4096)?;
        let sol = solve(&SolverConfig::new(spec, grid))?;
        let rep = check_bracketing(&sol, &|x| exact_example1(m, x), BracketDirection::Above);
        checks.push(Check::of(
            "bracketing: iterates stay above the exact solution",
            if rep.worst_violation <= 1e-13 {
                Ok(())
            } else {
                Err(format!(
                    "m = {m}: violation {:e} at node {}",
                    rep.worst_violation, rep.worst_node
                ))
            },
        ));
    }
    Ok(checks)
}

type Suite = fn() -> Result<Vec<Check>>;

fn run_verify(args: VerifyArgs) -> Result<()> {
    let suites: Vec<(&str, Suite)> = vec![
        ("zeta", suite_zeta),
        ("recurrence", suite_recurrence),
        ("comparison", suite_comparison),
        ("lower-bound", suite_lower_bound),
        ("bracketing", suite_bracketing),
    ];
    let selected: Vec<_> = if args.suite == "all" {
        suites
    } else {
        let filtered: Vec<_> = suites.into_iter().filter(|(n, _)| *n == args.suite).collect();
        if filtered.is_empty() {
            bail!(
                "unknown suite {:?}; available: zeta, recurrence, comparison, lower-bound, bracketing, all",
                args.suite
            );
        }
        filtered
    };

    let mut table = String::new();
    let mut failures = 0usize;
    for (suite_name, suite_fn) in selected {
        for check in suite_fn()? {
            match &check.outcome {
                Ok(()) => writeln!(table, "PASS [{suite_name}] {}", check.name)?,
                Err(detail) => {
                    failures += 1;
                    writeln!(table, "FAIL [{suite_name}] {}: {detail}", check.name)?;
                }
            }
        }
    }
    print!("{table}");
    if let Some(out) = &args.out {
        fs::write(out, &table).with_context(|| format!("writing {}", out.display()))?;
    }
    if failures > 0 {
        bail!("{failures} verification check(s) failed");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// repro

fn order_cell(estimate: &OrderEstimate) -> String {
    match estimate {
        OrderEstimate::Fitted { slope, .. } => format!("{slope:.3}"),
        OrderEstimate::ExactIntegration => "exact".to_string(),
    }
}

fn est_order_cell(theoretical: f64) -> String {
    if theoretical <= 0.0 {
        "--".to_string()
    } else {
        format!("{theoretical:.3}")
    }
}

/// Builds one benchmark table: fitted ("Order") and a-priori ("Est. order")
/// convergence orders per m at x* = 0.001 over the h_j = x*/2^j ladder.
fn repro_table(example: u8, m_values: &[f64], richardson: bool) -> Result<String> {
    let mut orders = Vec::new();
    let mut est_orders = Vec::new();
    for &m in m_values {
        let report = sweep_example(example, m, EVAL_POINT_DEFAULT, richardson)?;
        if let Some(reason) = &report.aborted {
            bail!("example {example}, m = {m}: sweep aborted ({reason})");
        }
        orders.push(order_cell(&report.fitted));
        est_orders.push(est_order_cell(report.theoretical_order));
    }
    let mut csv = String::new();
    writeln!(csv, "# example={example}")?;
    writeln!(csv, "# eval_point={}", sci(EVAL_POINT_DEFAULT))?;
    writeln!(csv, "# ladder=h_j=eval_point/2^j for j=1..12")?;
    writeln!(csv, "# richardson={richardson}")?;
    writeln!(
        csv,
        "m,{}",
        m_values.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
    )?;
    writeln!(csv, "Order,{}", orders.join(","))?;
    writeln!(csv, "Est. order,{}", est_orders.join(","))?;
    Ok(csv)
}

fn run_repro(args: ReproArgs) -> Result<()> {
    let out_dir = args.out.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let examples: Vec<u8> = match args.example {
        Some(e) if e == 1 || e == 2 => vec![e],
        Some(e) => bail!("--example must be 1 or 2, got {e}"),
        None => vec![1, 2],
    };
    for example in examples {
        let m_values: &[f64] = if example == 1 {
            &[1.0, 1.5, 2.0, 10.0, 100.0, 1000.0]
        } else {
            &[1.0, 2.0, 10.0]
        };
        let out = out_dir.join(format!("table{example}.csv"));
        match repro_table(example, m_values, args.richardson) {
            Ok(csv) => {
                fs::write(&out, csv).with_context(|| format!("writing {}", out.display()))?;
                println!("wrote {}", out.display());
            }
            Err(e) => {
                let partial = partial_path(&out);
                fs::write(&partial, format!("# aborted: {e}\n"))
                    .with_context(|| format!("writing {}", partial.display()))?;
                return Err(e.context(format!("partial marker in {}", partial.display())));
            }
        }
    }
    Ok(())
}
