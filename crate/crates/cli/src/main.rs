//! `fogran`: plans one scenario, runs parameter sweeps, or checks the planner
//! against exhaustive search.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use fogran::experiment::{compare_oracle, run_single, run_sweep, write_sweep_csv, SweepParam, SweepSpec};
use fogran::latency::check_feasibility;
use fogran::oracle::{enumerate_optimal, DEFAULT_ENUMERATION_CAP};
use fogran::phy::scenario_rates;
use fogran::scenario::{generate_scenario, load_scenario, save_scenario, UniformRange};
use fogran::{Scenario, ScenarioSpec, Scheme, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "fogran", version, about = "Task offloading planner for three-tier fog C-RAN")]
struct Args {
    /// Scenario file to plan (TOML).
    #[arg(long, conflicts_with_all = ["seed", "sweep"])]
    scenario: Option<PathBuf>,

    /// Seed for a generated scenario; base seed for sweeps and oracle checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// fog, cloud, cloud-du, cloud-ru or all.
    #[arg(long, default_value = "all")]
    scheme: String,

    /// Sweep `<name>=<start>:<stop>:<steps>` with name one of fl, fh, bl, bh, k.
    #[arg(long)]
    sweep: Option<String>,

    /// Realizations per sweep point, or instances for --oracle-check.
    #[arg(long, default_value_t = 1)]
    realizations: usize,

    /// Users per realization. Required for sweeps.
    #[arg(long)]
    users: Option<usize>,

    #[arg(long, default_value_t = 4)]
    dus: usize,

    #[arg(long, default_value_t = 10)]
    rus: usize,

    /// Pin or redraw a capacity: `<name>=<value>` or `<name>=<lo>:<hi>`, name one of fl, fh, bl, bh. Repeatable.
    #[arg(long = "fix", value_name = "NAME=VALUE")]
    fixes: Vec<String>,

    /// Sweep CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Compare the planner with exhaustive search.
    #[arg(long)]
    oracle_check: bool,

    /// Write the generated scenario to this path.
    #[arg(long, conflicts_with = "sweep")]
    save_scenario: Option<PathBuf>,

    #[arg(long, default_value_t = SolverConfig::default().epsilon)]
    epsilon: f64,

    #[arg(long, default_value_t = SolverConfig::default().max_iters)]
    max_iters: usize,
}

fn schemes(text: &str) -> Result<Vec<Scheme>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(Scheme::ALL.to_vec());
    }
    Ok(vec![text.parse::<Scheme>()?])
}

fn apply_fix(spec: &mut ScenarioSpec, text: &str) -> Result<()> {
    let (name, value) = text.split_once('=').with_context(|| format!("--fix `{text}`: expected NAME=VALUE"))?;
    let param: SweepParam = name.parse()?;
    let number = |s: &str| s.trim().parse::<f64>().with_context(|| format!("--fix `{text}`: bad number `{s}`"));
    let range = match value.split_once(':') {
        Some((lo, hi)) => UniformRange::new(number(lo)?, number(hi)?),
        None => UniformRange::fixed(number(value)?),
    };
    match param {
        SweepParam::MeclCapacity => spec.mecl_capacity_hz = range,
        SweepParam::MechCapacity => spec.mech_capacity_hz = range,
        SweepParam::FronthaulCapacity => spec.fronthaul_capacity_hz = range,
        SweepParam::MidhaulCapacity => spec.midhaul_capacity_hz = range,
        SweepParam::Users => bail!("--fix: set the user count with --users"),
    }
    Ok(())
}

fn base_spec(args: &Args, default_users: usize) -> Result<ScenarioSpec> {
    let mut spec = ScenarioSpec {
        num_dus: args.dus,
        num_rus: args.rus,
        num_users: args.users.unwrap_or(default_users),
        seed: args.seed,
        ..Default::default()
    };
    for fix in &args.fixes {
        apply_fix(&mut spec, fix)?;
    }
    Ok(spec)
}

fn sweep(args: &Args, range: &str, config: &SolverConfig, out: &mut dyn Write) -> Result<()> {
    let Some(users) = args.users else { bail!("--users is required with --sweep") };
    let (param, start, stop, steps) = SweepSpec::parse_range(range)?;
    let spec = SweepSpec {
        param,
        start,
        stop,
        steps,
        base: base_spec(args, users)?,
        realizations: args.realizations,
        base_seed: args.seed,
    };
    let rows = run_sweep(&spec, &schemes(&args.scheme)?, config)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut file = BufWriter::new(file);
            write_sweep_csv(&rows, &mut file)?;
            file.flush()?;
            writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
        }
        None => write_sweep_csv(&rows, out)?,
    }
    Ok(())
}

fn oracle_stats(args: &Args, config: &SolverConfig, out: &mut dyn Write) -> Result<()> {
    let base = ScenarioSpec { num_dus: args.dus.min(2), num_rus: args.rus.min(2), ..base_spec(args, 4)? };
    writeln!(out, "{:>8} {:>12} {:>12} {:>12} {:>12}", "scheme", "instances", "median_gap", "p95_gap", "max_gap")?;
    for scheme in schemes(&args.scheme)? {
        let stats = compare_oracle(&base, args.realizations, scheme, config, DEFAULT_ENUMERATION_CAP)?;
        writeln!(
            out,
            "{:>8} {:>12} {:>12.4e} {:>12.4e} {:>12.4e}",
            scheme.label(),
            stats.gaps.len(),
            stats.median,
            stats.p95,
            stats.max
        )?;
    }
    Ok(())
}

fn single(args: &Args, config: &SolverConfig, out: &mut dyn Write) -> Result<()> {
    let scenario: Scenario = match &args.scenario {
        Some(path) => load_scenario(path)?,
        None => generate_scenario(&base_spec(args, 20)?)?,
    };
    if let Some(path) = &args.save_scenario {
        save_scenario(path, &scenario)?;
    }
    let rates = scenario_rates(&scenario)?;
    for (i, scheme) in schemes(&args.scheme)?.into_iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        let report = run_single(&scenario, scheme, config)?;
        let violations = check_feasibility(&scenario.topology, &scenario.tasks, &report.decision, &report.allocation);
        if !violations.is_empty() {
            bail!("{scheme} plan violates capacity: {violations:?}");
        }
        writeln!(out, "{report}")?;
        if args.oracle_check {
            let exact =
                enumerate_optimal(&scenario.topology, &scenario.tasks, &rates, scheme, DEFAULT_ENUMERATION_CAP)?;
            let gap = if exact.total_delay_s > 0.0 {
                (report.total_delay_s - exact.total_delay_s) / exact.total_delay_s
            } else {
                0.0
            };
            writeln!(out, "oracle_total_delay_s: {} (gap {gap:.4e})", exact.total_delay_s)?;
        }
    }
    Ok(())
}

fn run(args: &Args) -> Result<()> {
    if !(args.epsilon > 0.0) {
        bail!("--epsilon must be positive");
    }
    if args.max_iters == 0 {
        bail!("--max-iters must be at least 1");
    }
    let config = SolverConfig { epsilon: args.epsilon, max_iters: args.max_iters, ..Default::default() };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &args.sweep {
        Some(range) => sweep(args, range, &config, &mut out),
        None if args.oracle_check && args.scenario.is_none() && args.realizations > 1 => {
            oracle_stats(args, &config, &mut out)
        }
        None => single(args, &config, &mut out),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
