//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cvclone::chain::{self, ChainConfig, Crossing, CrossingMetric, SourceModel};
use cvclone::metrics::{self, GFactor};
use cvclone::nf::{self, SignalModel};
use cvclone::sampler::{self, SampleConfig};
use cvclone::GaussianState;
use cvclone_cli::config;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const NF_GRID: [f64; 7] = [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pure_ideal(squeezing_db: f64) -> Result<ChainConfig, String> {
    Ok(ChainConfig::ideal(
        SourceModel::from_db(squeezing_db, None).map_err(err)?,
    ))
}

fn calibration_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/lossy_chain.conf")
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut errs) = (Vec::new(), Vec::new());
    let argv = std::iter::once("cvclone").chain(args.iter().copied());
    let code = cvclone_cli::main_with_args(argv, &mut out, &mut errs);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(errs).unwrap(),
    )
}

fn crossing_from_stdout(stdout: &str) -> Result<f64, String> {
    stdout
        .trim()
        .strip_prefix("G* = ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("unexpected find-crossing output `{}`", stdout.trim()))
}

fn nf_formula() -> Outcome {
    let signal = SignalModel::default();
    let mut worst = 0.0f64;
    for g in NF_GRID {
        let sim = nf::nf_simulated(g, &signal).map_err(err)?;
        worst = worst.max((sim - g / (2.0 * g - 1.0)).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;

    let db: Vec<f64> = NF_GRID
        .iter()
        .map(|&g| metrics::db(nf::nf_simulated(g, &signal)?))
        .collect::<cvclone::Result<_>>()
        .map_err(err)?;
    ensure(db.windows(2).all(|w| w[1] < w[0]), || {
        format!("dB curve not decreasing: {db:?}")
    })?;

    let asymptote = metrics::db(nf::nf_simulated(1e6, &signal).map_err(err)?).map_err(err)?;
    let limit = -10.0 * 2f64.log10();
    ensure((asymptote - limit).abs() < 1e-3, || {
        format!("NF(1e6) = {asymptote} dB")
    })?;
    Ok(format!(
        "max |Δ| = {worst:.1e}, NF(1e6) = {asymptote:.5} dB"
    ))
}

fn detector_rescaling() -> Outcome {
    let eta = 0.95;
    let signal = SignalModel::new(100.0, eta).map_err(err)?;
    let mut worst = 0.0f64;
    for g in NF_GRID {
        let sim = nf::nf_simulated(g, &signal).map_err(err)?;
        worst = worst.max((sim - g / (2.0 * eta * g - 2.0 * eta + 1.0)).abs());
        if g > 1.0 {
            let ideal = nf::nf_ideal(g).map_err(err)?;
            ensure(sim > ideal, || {
                format!("G = {g}: {sim} not above ideal {ideal}")
            })?;
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max |Δ| = {worst:.1e}"))
}

fn pure_epr_crossing() -> Outcome {
    let mut found = Vec::new();
    for db in [4.3, 3.0, 6.0] {
        match chain::find_crossing(&pure_ideal(db)?, CrossingMetric::Epr12).map_err(err)? {
            Crossing::At(g) => {
                ensure((g - 2.0).abs() <= 1e-6, || {
                    format!("{db} dB source: G* = {g}")
                })?;
                found.push(format!("{db} dB → {g:.9}"));
            }
            other => return Err(format!("{db} dB source: {other:?}")),
        }
    }
    Ok(found.join(", "))
}

fn pure_insep_bound() -> Outcome {
    let cfg = pure_ideal(4.3)?;
    for k in 0..=990 {
        let g = 1.0 + 0.1 * k as f64;
        let i = chain::evaluate(&cfg.at_gain(g))
            .map_err(err)?
            .inseparability;
        ensure(i < 2.0, || format!("I({g}) = {i}"))?;
    }
    let i100 = chain::evaluate(&cfg.at_gain(100.0))
        .map_err(err)?
        .inseparability;
    ensure((i100 - 1.9931).abs() <= 1e-3, || format!("I(100) = {i100}"))?;

    let (code, stdout, stderr) = cli(&[
        "find-crossing",
        "--metric",
        "insep",
        "--squeezing-db",
        "4.3",
    ]);
    ensure(code == 0 && stdout.starts_with("no crossing"), || {
        format!("find-crossing exit {code}: {stdout}{stderr}")
    })?;
    Ok(format!("I(100) = {i100:.5}; {}", stdout.trim()))
}

fn unity_anchors() -> Outcome {
    let row = chain::evaluate(&pure_ideal(4.3)?).map_err(err)?;
    ensure((row.inseparability - 0.74309).abs() <= 1e-4, || {
        format!("I = {}", row.inseparability)
    })?;
    ensure((row.e12 - 0.42633).abs() <= 1e-4, || {
        format!("E12 = {}", row.e12)
    })?;
    ensure((row.e21 - 0.42633).abs() <= 1e-4, || {
        format!("E21 = {}", row.e21)
    })?;
    Ok(format!(
        "I = {:.6}, E12 = {:.6}, E21 = {:.6}",
        row.inseparability, row.e12, row.e21
    ))
}

fn calibrated_crossings() -> Outcome {
    let path = calibration_path();
    let file = config::load_config(&path).map_err(err)?;
    let value = |k: &str| -> Result<f64, String> {
        file.get(k)
            .ok_or(format!("{k} missing"))?
            .parse::<f64>()
            .map_err(err)
    };
    ensure((value("squeezing-db")? - 4.3).abs() <= 0.2, || {
        "squeezing outside 4.3 ± 0.2 dB".into()
    })?;
    ensure(value("eta")? == 0.95, || "eta must be 0.95".into())?;
    ensure(value("window-t")? == 0.98, || {
        "window-t must be 0.98".into()
    })?;
    ensure(value("polarizer-t")? == 0.99, || {
        "polarizer-t must be 0.99".into()
    })?;

    let path = path.to_str().ok_or("non-UTF-8 path")?;
    let crossing = |metric: &str| -> Result<f64, String> {
        let (code, stdout, stderr) = cli(&["find-crossing", "--config", path, "--metric", metric]);
        ensure(code == 0, || format!("exit {code}: {stderr}"))?;
        crossing_from_stdout(&stdout)
    };
    let insep = crossing("insep")?;
    let epr = crossing("epr12")?;
    ensure((2.4..=3.2).contains(&insep), || {
        format!("insep crossing {insep}")
    })?;
    ensure((1.05..=1.35).contains(&epr), || {
        format!("epr12 crossing {epr}")
    })?;
    Ok(format!("insep G* = {insep:.4}, epr12 G* = {epr:.4}"))
}

fn monte_carlo() -> Outcome {
    let state = chain::run_chain(&pure_ideal(4.3)?.at_gain(2.0)).map_err(err)?;
    let cfg = SampleConfig::new(42, 1_000_000, sampler::DEFAULT_BLOCK_SIZE).map_err(err)?;
    let lines = cvclone_cli::commands::run_sample_check(&state, &cfg).map_err(err)?;
    let mut summary = Vec::new();
    for l in lines.iter().filter(|l| l.metric != "E21") {
        ensure(l.passed(), || {
            format!(
                "{}: analytic {} empirical {} ± {}",
                l.metric, l.analytic, l.empirical.value, l.empirical.stderr
            )
        })?;
        summary.push(format!("{} z = {:.2}", l.metric, l.z()));
    }

    let dir = tempfile::tempdir().map_err(err)?;
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let out = out.to_str().ok_or("non-UTF-8 path")?;
        let (code, _, stderr) = cli(&[
            "sample-check",
            "--scenario",
            "chain",
            "--gain",
            "2",
            "--seed",
            "7",
            "--out",
            out,
        ]);
        ensure(code == 0, || format!("sample-check exit {code}: {stderr}"))?;
        outputs.push(std::fs::read(out).map_err(err)?);
    }
    ensure(outputs[0] == outputs[1], || {
        "CSV output differs between identical seeds".into()
    })?;
    summary.push("CSV byte-identical".into());
    Ok(summary.join(", "))
}

/// One random operation; returns the new state.
fn random_op(rng: &mut impl Rng, s: &GaussianState) -> cvclone::Result<GaussianState> {
    const MAX_MODES: usize = 5;
    let n = s.n_modes();
    let a = rng.random_range(0..n);
    match rng.random_range(0..9) {
        0 => s.displace(a, rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
        1 if n > 1 => {
            let b = (a + rng.random_range(1..n)) % n;
            s.two_mode_squeeze(a, b, rng.random_range(-1.5..1.5))
        }
        2 => s.amplify(
            a,
            rng.random_range(1.0..20.0),
            n < MAX_MODES && rng.random_bool(0.3),
        ),
        3 => s.attenuate(a, rng.random_range(0.0..=1.0)),
        4 if n < MAX_MODES => s.beamsplit(a, rng.random_range(0.0..=1.0)),
        5 => s.rotate_phase(a, rng.random_range(-TAU..TAU)),
        6 if n > 1 => s.trace_out(a),
        7 if n < MAX_MODES => Ok(s.tensor(&GaussianState::thermal(&[rng.random_range(1.0..4.0)])?)),
        _ => s
            .rotate_phase(a, rng.random_range(-TAU..TAU))?
            .attenuate(a, rng.random_range(0.5..1.0)),
    }
}

/// Largest covariance condition number at which a float64 covariance can
/// resolve the symplectic spectrum to the physicality tolerance.
const MAX_CONDITION: f64 = 1e6;

fn condition_number(s: &GaussianState) -> f64 {
    let eig = s.cov().clone().symmetric_eigenvalues();
    eig.max() / eig.min()
}

fn physicality_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut ops, mut redrawn) = (0usize, 0usize);
    let mut lowest = f64::INFINITY;
    for seq in 0..1000 {
        let n = rng.random_range(1..=3);
        let variances: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
        let mut s = GaussianState::thermal(&variances).map_err(err)?;
        let len = rng.random_range(5..=20);
        let mut step = 0;
        while step < len {
            let next =
                random_op(&mut rng, &s).map_err(|e| format!("sequence {seq}, op {step}: {e}"))?;
            if condition_number(&next) > MAX_CONDITION {
                redrawn += 1;
                continue;
            }
            s = next;
            let nu = s.min_symplectic_eigenvalue();
            lowest = lowest.min(nu);
            ensure(nu >= 1.0 - 1e-9, || {
                format!("sequence {seq}, op {step}: ν_min = {nu}")
            })?;
            ops += 1;
            step += 1;
        }
    }
    Ok(format!(
        "{ops} ops, lowest ν_min = {lowest:.12} ({redrawn} ops redrawn for condition number > {MAX_CONDITION:e})"
    ))
}

fn phase_insensitivity() -> Outcome {
    let (gain, t) = (1.8, 0.56);
    let source =
        chain::build_source(&SourceModel::from_db(4.3, None).map_err(err)?).map_err(err)?;
    let amp = |s: &GaussianState| s.amplify(1, gain, false)?.attenuate(1, t);
    let reference = amp(&source).map_err(err)?;
    let g = metrics::inseparability(&reference, 0, 1).map_err(err)?.1;
    let joint = |s: &GaussianState| -> cvclone::Result<(f64, f64)> {
        Ok((
            metrics::joint_variance_minus(s, 0, 1, g)?,
            metrics::joint_variance_plus(s, 0, 1, g)?,
        ))
    };
    let (ref_minus, ref_plus) = joint(&reference).map_err(err)?;
    let mut worst = 0.0f64;
    for k in 0..24 {
        let theta = TAU * k as f64 / 24.0;
        let rotated_in = source
            .rotate_phase(0, theta)
            .and_then(|s| s.rotate_phase(1, theta))
            .map_err(err)?;
        let out = amp(&rotated_in)
            .and_then(|s| s.rotate_phase(0, -theta))
            .and_then(|s| s.rotate_phase(1, -theta))
            .map_err(err)?;
        let (m, p) = joint(&out).map_err(err)?;
        worst = worst.max((m - ref_minus).abs()).max((p - ref_plus).abs());
    }
    ensure(worst <= 1e-12, || {
        format!("joint variances move by {worst:e} under rotation")
    })?;

    let cfg = ChainConfig {
        transmission: Some(t),
        ..pure_ideal(4.3)?.at_gain(gain)
    };
    let thetas: Vec<f64> = (0..3600).map(|k| TAU * k as f64 / 3600.0).collect();
    let mut gap = 0.0f64;
    for g in [GFactor::ONE, g] {
        let scan = chain::phase_scan(&cfg, g, &thetas).map_err(err)?;
        let min_minus = scan
            .iter()
            .map(|p| p.var_minus)
            .fold(f64::INFINITY, f64::min);
        let min_plus = scan
            .iter()
            .map(|p| p.var_plus)
            .fold(f64::INFINITY, f64::min);
        gap = gap.max((min_minus - min_plus).abs());
    }
    ensure(gap <= 1e-9, || format!("scan minima differ by {gap:e}"))?;
    Ok(format!(
        "rotation Δ = {worst:.1e}, scan minima Δ = {gap:.1e}"
    ))
}

fn e21_dominance() -> Outcome {
    let file = config::load_config(&calibration_path()).map_err(err)?;
    let lossy_source = SourceModel::from_db(
        file["squeezing-db"].parse().map_err(err)?,
        Some(file["antisqueezing-db"].parse().map_err(err)?),
    )
    .map_err(err)?;
    let configs = [
        pure_ideal(4.3)?,
        pure_ideal(3.0)?,
        ChainConfig::lossy(lossy_source),
    ];
    let gains: Vec<f64> = (0..=180).map(|k| 1.0 + 0.05 * k as f64).collect();
    let mut rows = 0;
    for cfg in &configs {
        for r in chain::clone_sweep(cfg, &gains)
            .map_err(err)?
            .iter()
            .filter(|r| r.gain > 1.0)
        {
            ensure(r.e21 >= r.e12, || {
                format!("G = {}: E21 {} < E12 {}", r.gain, r.e21, r.e12)
            })?;
            rows += 1;
        }
    }
    Ok(format!("{rows} rows"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("NF formula reproduction", nf_formula),
        ("detector rescaling", detector_rescaling),
        ("pure-source EPR crossing", pure_epr_crossing),
        ("pure-source inseparability bound", pure_insep_bound),
        ("G = 1 anchors", unity_anchors),
        ("calibrated crossings", calibrated_crossings),
        ("Monte-Carlo oracle equivalence", monte_carlo),
        ("physicality fuzzing", physicality_fuzz),
        ("phase insensitivity", phase_insensitivity),
        ("E21 dominance", e21_dominance),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} ({elapsed:.2}s)",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} ({elapsed:.2}s)",
                    i + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
