//! Parameter sweeps, single-scenario reports and oracle gap statistics.
//!
//! Sweep realizations use common random numbers: realization `r` draws its
//! scenario with seed `base_seed ^ r` at every sweep point, so only the swept
//! parameter changes along a curve.

use std::fmt::{self, Write as _};
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::latency::{check_feasibility, delay_breakdowns, Allocation, Decision, DelayBreakdown, Tier};
use crate::oracle::enumerate_optimal;
use crate::phy::scenario_rates;
use crate::scenario::{generate_scenario, Scenario, ScenarioSpec, Scheme, UniformRange};
use crate::solver::{solve, DualState, SolverConfig};

/// Header of the sweep CSV. Column order is part of the output contract.
pub const SWEEP_CSV_HEADER: &str = "sweep_param,value,scheme,mean_total_delay_s,stderr,realizations,infeasible_count";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    /// MEC-L capacity per RU (Hz).
    MeclCapacity,
    /// MEC-H capacity per DU (Hz).
    MechCapacity,
    /// Fronthaul bandwidth per RU (Hz).
    FronthaulCapacity,
    /// Midhaul bandwidth per DU (Hz).
    MidhaulCapacity,
    /// Number of users.
    Users,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::MeclCapacity => "fl",
            SweepParam::MechCapacity => "fh",
            SweepParam::FronthaulCapacity => "bl",
            SweepParam::MidhaulCapacity => "bh",
            SweepParam::Users => "k",
        }
    }

    /// `spec` with this parameter pinned to `value`.
    pub fn apply(self, spec: &ScenarioSpec, value: f64) -> ScenarioSpec {
        let mut out = spec.clone();
        match self {
            SweepParam::MeclCapacity => out.mecl_capacity_hz = UniformRange::fixed(value),
            SweepParam::MechCapacity => out.mech_capacity_hz = UniformRange::fixed(value),
            SweepParam::FronthaulCapacity => out.fronthaul_capacity_hz = UniformRange::fixed(value),
            SweepParam::MidhaulCapacity => out.midhaul_capacity_hz = UniformRange::fixed(value),
            SweepParam::Users => out.num_users = value.round() as usize,
        }
        out
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fl" | "f^l" | "mecl" => Ok(SweepParam::MeclCapacity),
            "fh" | "f^h" | "mech" => Ok(SweepParam::MechCapacity),
            "bl" | "b^l" | "fronthaul" => Ok(SweepParam::FronthaulCapacity),
            "bh" | "b^h" | "midhaul" => Ok(SweepParam::MidhaulCapacity),
            "k" | "users" => Ok(SweepParam::Users),
            other => Err(Error::Sweep(format!("unknown sweep parameter `{other}` (expected fl, fh, bl, bh or k)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Scenario distribution with all fixed-parameter overrides applied.
    pub base: ScenarioSpec,
    pub realizations: usize,
    pub base_seed: u64,
}

impl SweepSpec {
    /// Parses `name=start:stop:steps`.
    pub fn parse_range(text: &str) -> Result<(SweepParam, f64, f64, usize)> {
        let (name, range) = text
            .split_once('=')
            .ok_or_else(|| Error::Sweep(format!("expected name=start:stop:steps, got `{text}`")))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, steps] = parts[..] else {
            return Err(Error::Sweep(format!("expected start:stop:steps, got `{range}`")));
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Sweep(format!("bad number `{s}`: {e}")));
        let steps =
            steps.trim().parse::<usize>().map_err(|e| Error::Sweep(format!("bad step count `{steps}`: {e}")))?;
        Ok((name.trim().parse()?, num(start)?, num(stop)?, steps))
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Sweep(format!("steps must be at least 2, got {}", self.steps)));
        }
        if self.realizations == 0 {
            return Err(Error::Sweep("realizations must be at least 1".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start > 0.0 && self.stop > 0.0) {
            return Err(Error::Sweep(format!("range {}..{} must be finite and positive", self.start, self.stop)));
        }
        Ok(())
    }

    /// Evenly spaced sweep values, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| {
                let v = self.start + span * i as f64 / (self.steps - 1) as f64;
                if self.param == SweepParam::Users {
                    v.round()
                } else {
                    v
                }
            })
            .collect()
    }
}

/// One CSV row: a (sweep point, scheme) mean over realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_param: SweepParam,
    pub value: f64,
    pub scheme: Scheme,
    pub mean_total_delay_s: f64,
    pub stderr: f64,
    /// Realizations that entered the mean.
    pub realizations: usize,
    pub infeasible_count: usize,
}

/// Total delay per scheme for one scenario, `None` when some user has no
/// usable uplink rate.
fn evaluate_realization(scenario: &Scenario, schemes: &[Scheme], config: &SolverConfig) -> Result<Vec<Option<f64>>> {
    let rates = scenario_rates(scenario)?;
    if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Ok(vec![None; schemes.len()]);
    }
    schemes
        .iter()
        .map(|&scheme| {
            let out = solve(&scenario.topology, &scenario.tasks, &rates, scheme, config)?;
            let violations = check_feasibility(&scenario.topology, &scenario.tasks, &out.decision, &out.allocation);
            if !violations.is_empty() {
                return Err(Error::Sweep(format!("{scheme} plan violates capacity: {violations:?}")));
            }
            Ok(out.total_delay_s.is_finite().then_some(out.total_delay_s))
        })
        .collect()
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs every (point, realization, scheme) combination and averages per (point, scheme).
/// Rows come out ordered by point, then by the order of `schemes`.
pub fn run_sweep(spec: &SweepSpec, schemes: &[Scheme], config: &SolverConfig) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = spec.points();
    let jobs: Vec<(usize, usize)> =
        (0..points.len()).flat_map(|p| (0..spec.realizations).map(move |r| (p, r))).collect();
    let results: Vec<Vec<Option<f64>>> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let mut scenario_spec = spec.param.apply(&spec.base, points[p]);
            scenario_spec.seed = spec.base_seed ^ r as u64;
            let scenario = generate_scenario(&scenario_spec)?;
            evaluate_realization(&scenario, schemes, config)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(points.len() * schemes.len());
    for (p, &value) in points.iter().enumerate() {
        let block = &results[p * spec.realizations..(p + 1) * spec.realizations];
        for (s, &scheme) in schemes.iter().enumerate() {
            let feasible: Vec<f64> = block.iter().filter_map(|r| r[s]).collect();
            let (mean, stderr) = mean_and_stderr(&feasible);
            rows.push(SweepRow {
                sweep_param: spec.param,
                value,
                scheme,
                mean_total_delay_s: mean,
                stderr,
                realizations: feasible.len(),
                infeasible_count: block.len() - feasible.len(),
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.sweep_param, r.value, r.scheme, r.mean_total_delay_s, r.stderr, r.realizations, r.infeasible_count
        )?;
    }
    Ok(())
}

/// Everything `run_single` prints for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleReport {
    pub scheme: Scheme,
    pub decision: Decision,
    pub allocation: Allocation,
    pub breakdowns: Vec<DelayBreakdown>,
    pub total_delay_s: f64,
    pub duals: DualState,
    pub iterations: usize,
    pub converged: bool,
}

pub fn run_single(scenario: &Scenario, scheme: Scheme, config: &SolverConfig) -> Result<SingleReport> {
    let rates = scenario_rates(scenario)?;
    let out = solve(&scenario.topology, &scenario.tasks, &rates, scheme, config)?;
    let breakdowns = delay_breakdowns(&scenario.topology, &scenario.tasks, &out.decision, &out.allocation, &rates)?;
    Ok(SingleReport {
        scheme,
        total_delay_s: out.total_delay_s,
        decision: out.decision,
        allocation: out.allocation,
        breakdowns,
        duals: out.duals,
        iterations: out.iterations,
        converged: out.converged,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

impl fmt::Display for SingleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme: {}", self.scheme)?;
        writeln!(
            f,
            "{:>5} {:>4} {:>13} {:>13} {:>13} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "task",
            "tier",
            "speed_hz",
            "fronthaul_hz",
            "midhaul_hz",
            "access_s",
            "fronthaul_s",
            "midhaul_s",
            "compute_s",
            "total_s"
        )?;
        for (k, ((tier, alloc), d)) in
            self.decision.tiers().iter().zip(self.allocation.tasks()).zip(&self.breakdowns).enumerate()
        {
            writeln!(
                f,
                "{:>5} {:>4} {:>13} {:>13} {:>13} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e}",
                k,
                tier,
                opt(alloc.speed(*tier)),
                opt(alloc.fronthaul_bw),
                opt(alloc.midhaul_bw),
                d.access_s,
                d.fronthaul_s,
                d.midhaul_s,
                d.compute_s,
                d.total_s
            )?;
        }
        let count = |t: Tier| self.decision.tiers().iter().filter(|&&x| x == t).count();
        writeln!(
            f,
            "tasks: {} (L {}, H {}, C {})",
            self.decision.len(),
            count(Tier::Local),
            count(Tier::High),
            count(Tier::Cloud)
        )?;
        writeln!(f, "total_delay_s: {}", self.total_delay_s)?;
        writeln!(f, "iterations: {} (converged: {})", self.iterations, self.converged)?;
        let list = |v: &[f64]| {
            v.iter().fold(String::new(), |mut s, x| {
                let _ = write!(s, "{}{x:.6e}", if s.is_empty() { "" } else { " " });
                s
            })
        };
        writeln!(f, "duals mu: [{}]", list(&self.duals.mu))?;
        writeln!(f, "duals lambda: [{}]", list(&self.duals.lambda))?;
        writeln!(f, "duals rho: {:.6e}", self.duals.rho)?;
        writeln!(f, "duals nu: [{}]", list(&self.duals.nu))?;
        write!(f, "duals xi: [{}]", list(&self.duals.xi))
    }
}

/// Relative gaps of the dual planner against the enumeration oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct GapStats {
    /// One gap `(solver - oracle) / oracle` per realization, in seed order.
    pub gaps: Vec<f64>,
    pub median: f64,
    pub p95: f64,
    pub max: f64,
}

impl GapStats {
    pub fn from_gaps(gaps: Vec<f64>) -> Self {
        let mut sorted = gaps.clone();
        sorted.sort_by(f64::total_cmp);
        let rank = |q: f64| -> f64 {
            if sorted.is_empty() {
                return f64::NAN;
            }
            let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
            sorted[idx]
        };
        let median = if sorted.is_empty() {
            f64::NAN
        } else if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        Self { median, p95: rank(0.95), max: sorted.last().copied().unwrap_or(f64::NAN), gaps }
    }
}

/// Runs solver and oracle on `realizations` scenarios seeded `base.seed ^ r`.
pub fn compare_oracle(
    base: &ScenarioSpec,
    realizations: usize,
    scheme: Scheme,
    config: &SolverConfig,
    cap: u128,
) -> Result<GapStats> {
    let gaps = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let scenario = generate_scenario(&ScenarioSpec { seed: base.seed ^ r as u64, ..base.clone() })?;
            let rates = scenario_rates(&scenario)?;
            let heuristic = solve(&scenario.topology, &scenario.tasks, &rates, scheme, config)?;
            let exact = enumerate_optimal(&scenario.topology, &scenario.tasks, &rates, scheme, cap)?;
            Ok((heuristic.total_delay_s - exact.total_delay_s) / exact.total_delay_s)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(GapStats::from_gaps(gaps))
}
