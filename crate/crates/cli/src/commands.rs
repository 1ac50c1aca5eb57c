use std::f64::consts::TAU;
use std::io::Write;

use cvclone::chain::{
    self, ChainConfig, Crossing, CrossingMetric, CrossingSearch, ScanPoint, SourceModel, SweepRow,
};
use cvclone::metrics::{self, GFactor};
use cvclone::nf::{self, NfRow};
use cvclone::sampler::{self, Estimate, SampleConfig};
use cvclone::GaussianState;

use crate::config::{ConfigMap, Params};
use crate::csv::{fmt_flag, fmt_num, Sink, Table};
use crate::error::CliError;
use crate::{
    ChainArgs, CloneSweepArgs, FindCrossingArgs, GridArgs, MetricArg, NfArgs, PhaseScanArgs,
    SampleCheckArgs, Scenario,
};

/// Significance threshold of the Monte-Carlo check, in standard errors.
pub const SAMPLE_CHECK_SIGMAS: f64 = 5.0;

pub const NF_HEADER: &[&str] = &[
    "gain",
    "nf_ideal",
    "nf_detector",
    "nf_simulated",
    "nf_ideal_db",
    "nf_detector_db",
];
pub const CLONE_SWEEP_HEADER: &[&str] =
    &["gain", "I", "g_insep", "E12", "E21", "inseparable", "epr"];
pub const PHASE_SCAN_HEADER: &[&str] = &["theta", "var_minus_db", "var_plus_db"];
pub const SAMPLE_CHECK_HEADER: &[&str] =
    &["metric", "analytic", "empirical", "stderr", "z", "pass"];

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(CliError::Invalid("grid bounds must be finite".into()));
    }
    if min > max {
        return Err(CliError::Invalid(format!(
            "grid min {min} exceeds max {max}"
        )));
    }
    match steps {
        0 => Err(CliError::Invalid("grid needs at least one step".into())),
        1 => Ok(vec![min]),
        n => Ok((0..n)
            .map(|k| {
                if k == n - 1 {
                    max
                } else {
                    min + (max - min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

fn resolve_grid(p: &mut Params, grid: &GridArgs, max_default: f64) -> Result<Vec<f64>, CliError> {
    let min = p.get("gain-min", grid.gain_min, 1.0)?;
    let max = p.get("gain-max", grid.gain_max, max_default)?;
    let steps = p.get("steps", grid.steps, 41)?;
    linear_grid(min, max, steps)
}

/// Chain configuration from flags; losses default to ideal.
fn resolve_chain(p: &mut Params, args: &ChainArgs) -> Result<ChainConfig, CliError> {
    let squeezing_db = p.get("squeezing-db", args.squeezing_db, 4.3)?;
    let antisqueezing_db = p.optional("antisqueezing-db", args.antisqueezing_db)?;
    let source = SourceModel::from_db(squeezing_db, antisqueezing_db)?;
    let cfg = ChainConfig {
        detector_eta: p.get("eta", args.eta, 1.0)?,
        window_t: p.get("window-t", args.window_t, 1.0)?,
        windows_per_beam: p.get("windows", args.windows, 2)?,
        polarizer_t: p.get("polarizer-t", args.polarizer_t, 1.0)?,
        ..ChainConfig::ideal(source)
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn nf_table(rows: &[NfRow]) -> Result<String, CliError> {
    let mut t = Table::new(NF_HEADER);
    for r in rows {
        t.row(&[
            fmt_num(r.gain),
            fmt_num(r.nf_ideal),
            fmt_num(r.nf_detector),
            fmt_num(r.nf_simulated),
            fmt_num(metrics::db(r.nf_ideal)?),
            fmt_num(metrics::db(r.nf_detector)?),
        ]);
    }
    Ok(t.into_string())
}

pub fn clone_sweep_table(rows: &[SweepRow]) -> String {
    let mut t = Table::new(CLONE_SWEEP_HEADER);
    for r in rows {
        t.row(&[
            fmt_num(r.gain),
            fmt_num(r.inseparability),
            fmt_num(r.g_insep),
            fmt_num(r.e12),
            fmt_num(r.e21),
            fmt_flag(r.inseparable).to_string(),
            fmt_flag(r.epr).to_string(),
        ]);
    }
    t.into_string()
}

pub fn phase_scan_table(points: &[ScanPoint]) -> Result<String, CliError> {
    let mut t = Table::new(PHASE_SCAN_HEADER);
    for p in points {
        t.row(&[
            fmt_num(p.theta),
            fmt_num(metrics::db(p.var_minus)?),
            fmt_num(metrics::db(p.var_plus)?),
        ]);
    }
    Ok(t.into_string())
}

pub fn nf(
    args: &NfArgs,
    file: &ConfigMap,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut p = Params::new(file);
    let gains = resolve_grid(&mut p, &args.grid, 5.0)?;
    let eta = p.get("eta", args.eta, 1.0)?;
    let out = p.optional("out", args.out.clone())?;
    stderr.write_all(p.echo().as_bytes())?;

    let rows = nf::nf_sweep(&gains, eta)?;
    Sink::resolve(out.as_deref(), "nf.csv").write(&nf_table(&rows)?, stdout)
}

pub fn clone_sweep(
    args: &CloneSweepArgs,
    file: &ConfigMap,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut p = Params::new(file);
    let cfg = resolve_chain(&mut p, &args.chain)?;
    let gains = resolve_grid(&mut p, &args.grid, 3.0)?;
    let out = p.optional("out", args.out.clone())?;
    stderr.write_all(p.echo().as_bytes())?;

    let rows = chain::clone_sweep(&cfg, &gains)?;
    Sink::resolve(out.as_deref(), "clone_sweep.csv").write(&clone_sweep_table(&rows), stdout)
}

pub fn phase_scan(
    args: &PhaseScanArgs,
    file: &ConfigMap,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut p = Params::new(file);
    let base = resolve_chain(&mut p, &args.chain)?;
    let gain = p.get("gain", args.gain, 1.0)?;
    let transmission = p.optional("transmission", args.transmission)?;
    let g = GFactor::new(p.get("g", args.g, 1.0)?)?;
    let points = p.get("points", args.points, 360)?;
    let out = p.optional("out", args.out.clone())?;
    stderr.write_all(p.echo().as_bytes())?;

    if points == 0 {
        return Err(CliError::Invalid(
            "phase scan needs at least one point".into(),
        ));
    }
    let cfg = ChainConfig {
        transmission,
        ..base.at_gain(gain)
    };
    let thetas: Vec<f64> = (0..points)
        .map(|k| TAU * k as f64 / points as f64)
        .collect();
    let scan = chain::phase_scan(&cfg, g, &thetas)?;
    Sink::resolve(out.as_deref(), "phase_scan.csv").write(&phase_scan_table(&scan)?, stdout)
}

/// One-line summary as printed by `find-crossing`.
pub fn describe_crossing(metric: CrossingMetric, crossing: &Crossing) -> String {
    match crossing {
        Crossing::At(g) => format!("G* = {g:.6}"),
        Crossing::NoCrossing { limit, value } => {
            format!(
                "no crossing ({} = {} at G = {})",
                metric.name(),
                fmt_num(*value),
                fmt_num(*limit)
            )
        }
        Crossing::AboveAtUnity(value) => {
            format!(
                "no crossing: not entangled at G = 1 ({} = {})",
                metric.name(),
                fmt_num(*value)
            )
        }
    }
}

pub fn find_crossing(
    args: &FindCrossingArgs,
    file: &ConfigMap,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut p = Params::new(file);
    let cfg = resolve_chain(&mut p, &args.chain)?;
    let metric = p.get("metric", args.metric, MetricArg::Epr12)?;
    let defaults = CrossingSearch::default();
    let search = CrossingSearch {
        g_hi: p.get("g-hi", args.g_hi, defaults.g_hi)?,
        g_limit: p.get("g-limit", args.g_limit, defaults.g_limit)?,
        ..defaults
    };
    stderr.write_all(p.echo().as_bytes())?;

    if !(search.g_hi > 1.0 && search.g_limit >= search.g_hi) {
        return Err(CliError::Invalid("need 1 < g-hi <= g-limit".into()));
    }
    let metric = match metric {
        MetricArg::Insep => CrossingMetric::Inseparability,
        MetricArg::Epr12 => CrossingMetric::Epr12,
    };
    let crossing = chain::find_crossing_with(&cfg, metric, &search)?;
    writeln!(stdout, "{}", describe_crossing(metric, &crossing))?;
    Ok(())
}

/// Analytic versus Monte-Carlo value of one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub metric: &'static str,
    pub analytic: f64,
    pub empirical: Estimate,
}

impl CheckLine {
    pub fn z(&self) -> f64 {
        self.empirical.z_score(self.analytic)
    }

    pub fn passed(&self) -> bool {
        self.z() < SAMPLE_CHECK_SIGMAS
    }
}

pub fn scenario_state(
    scenario: Scenario,
    squeezing_db: f64,
    gain: f64,
) -> Result<GaussianState, CliError> {
    let source = SourceModel::from_db(squeezing_db, None)?;
    Ok(match scenario {
        Scenario::Vacuum => GaussianState::vacuum(2)?,
        Scenario::Tmsv => chain::build_source(&source)?,
        Scenario::Chain => chain::run_chain(&ChainConfig::ideal(source).at_gain(gain))?,
    })
}

/// I, E12 and E21 of the probe/conjugate pair, analytic and sampled.
pub fn run_sample_check(
    state: &GaussianState,
    cfg: &SampleConfig,
) -> Result<Vec<CheckLine>, CliError> {
    type Metric = fn(&GaussianState) -> cvclone::Result<f64>;
    let checks: [(&'static str, Metric); 3] = [
        ("I", |s| Ok(metrics::inseparability(s, 0, 1)?.0)),
        ("E12", |s| Ok(metrics::epr(s, 0, 1)?.0)),
        ("E21", |s| Ok(metrics::epr(s, 0, 1)?.1)),
    ];
    checks
        .iter()
        .map(|&(metric, f)| {
            Ok(CheckLine {
                metric,
                analytic: f(state)?,
                empirical: sampler::metric_estimate(state, cfg, f)?,
            })
        })
        .collect()
}

pub fn sample_check_table(lines: &[CheckLine]) -> String {
    let mut t = Table::new(SAMPLE_CHECK_HEADER);
    for l in lines {
        t.row(&[
            l.metric.to_string(),
            fmt_num(l.analytic),
            fmt_num(l.empirical.value),
            fmt_num(l.empirical.stderr),
            fmt_num(l.z()),
            if l.passed() { "PASS" } else { "FAIL" }.to_string(),
        ]);
    }
    t.into_string()
}

pub fn sample_check(
    args: &SampleCheckArgs,
    file: &ConfigMap,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut p = Params::new(file);
    let scenario = p.get("scenario", args.scenario, Scenario::Tmsv)?;
    let seed = p.get("seed", args.seed, 42)?;
    let shots = p.get("shots", args.shots, 1_000_000)?;
    let block_size = p.get("block-size", args.block_size, sampler::DEFAULT_BLOCK_SIZE)?;
    let squeezing_db = p.get("squeezing-db", args.squeezing_db, 4.3)?;
    let gain = p.get("gain", args.gain, 2.0)?;
    let out = p.optional("out", args.out.clone())?;
    stderr.write_all(p.echo().as_bytes())?;

    let cfg = SampleConfig::new(seed, shots, block_size)?;
    let state = scenario_state(scenario, squeezing_db, gain)?;
    let lines = run_sample_check(&state, &cfg)?;

    match out.as_deref() {
        Some(o) => {
            Sink::resolve(Some(o), "sample_check.csv").write(&sample_check_table(&lines), stdout)?
        }
        None => {
            for l in &lines {
                writeln!(
                    stdout,
                    "{:<4} analytic {}  empirical {} ± {}  z = {}  {}",
                    l.metric,
                    fmt_num(l.analytic),
                    fmt_num(l.empirical.value),
                    fmt_num(l.empirical.stderr),
                    fmt_num(l.z()),
                    if l.passed() { "PASS" } else { "FAIL" }
                )?;
            }
        }
    }
    let failed: Vec<&str> = lines
        .iter()
        .filter(|l| !l.passed())
        .map(|l| l.metric)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed.join(", ")))
    }
}
