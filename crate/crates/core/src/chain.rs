//! The cloning experiment: a two-mode squeezed source, a phase-insensitive
//! amplifier on the conjugate followed by an attenuator, loss channels and
//! homodyne detection.
//!
//! Mode layout of every chain state: probe = 0, conjugate = 1 and, when the
//! amplifier ancilla is kept, ancilla = 2.
//!
//! Loss placement: cell windows and the polarizer act on both beams before
//! amplification, the detectors act last on probe and conjugate. The
//! ancilla is never detected. The local oscillators see the same
//! gain-loss product as the conjugate, so the homodyne gain is constant and
//! no extra scaling appears here.

use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;
use crate::metrics::{self, EntanglementReport, GFactor};
use crate::optimize::bisect_increasing;

pub const PROBE: usize = 0;
pub const CONJUGATE: usize = 1;
pub const ANCILLA: usize = 2;

/// Two-mode squeezed source in standard form, described by its squeezed and
/// antisqueezed joint-quadrature variances (vacuum = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    pub v_sq: f64,
    pub v_as: f64,
}

impl SourceModel {
    pub fn new(v_sq: f64, v_as: f64) -> Result<Self> {
        if !(v_sq > 0.0 && v_sq.is_finite() && v_as > 0.0 && v_as.is_finite()) {
            return Err(invalid(format!(
                "source variances must be positive and finite, got v_sq={v_sq}, v_as={v_as}"
            )));
        }
        let product = v_sq * v_as;
        if product < 1.0 - crate::gaussian::PHYSICALITY_TOL {
            return Err(Error::UnphysicalSource { product });
        }
        Ok(Self { v_sq, v_as })
    }

    /// Minimum-uncertainty source, `v_as = 1/v_sq`.
    pub fn pure(v_sq: f64) -> Result<Self> {
        Self::new(v_sq, 1.0 / v_sq)
    }

    /// From noise reduction and antisqueezing in dB (both given as positive
    /// numbers). Without antisqueezing the source is pure.
    pub fn from_db(squeezing_db: f64, antisqueezing_db: Option<f64>) -> Result<Self> {
        let v_sq = metrics::from_db(-squeezing_db);
        match antisqueezing_db {
            Some(db) => Self::new(v_sq, metrics::from_db(db)),
            None => Self::pure(v_sq),
        }
    }

    /// Single-mode quadrature variance of either beam.
    pub fn single_mode_variance(&self) -> f64 {
        0.5 * (self.v_sq + self.v_as)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub source: SourceModel,
    pub gain: f64,
    /// Attenuator transmission; `None` keeps the gain-loss product at one.
    pub transmission: Option<f64>,
    pub window_t: f64,
    pub windows_per_beam: u32,
    pub polarizer_t: f64,
    pub detector_eta: f64,
    pub keep_ancilla: bool,
}

impl ChainConfig {
    /// Lossless chain at unity gain.
    pub fn ideal(source: SourceModel) -> Self {
        Self {
            source,
            gain: 1.0,
            transmission: None,
            window_t: 1.0,
            windows_per_beam: 0,
            polarizer_t: 1.0,
            detector_eta: 1.0,
            keep_ancilla: false,
        }
    }

    /// The as-built loss budget: 2 % per window, two windows per beam, 1 %
    /// at the polarizer and 95 % detectors.
    pub fn lossy(source: SourceModel) -> Self {
        Self {
            window_t: 0.98,
            windows_per_beam: 2,
            polarizer_t: 0.99,
            detector_eta: 0.95,
            ..Self::ideal(source)
        }
    }

    /// Same configuration at another gain with unity gain-loss product.
    pub fn at_gain(&self, gain: f64) -> Self {
        Self {
            gain,
            transmission: None,
            ..*self
        }
    }

    pub fn effective_transmission(&self) -> f64 {
        self.transmission.unwrap_or(1.0 / self.gain)
    }

    pub fn validate(&self) -> Result<()> {
        SourceModel::new(self.source.v_sq, self.source.v_as)?;
        if !(self.gain >= 1.0 && self.gain.is_finite()) {
            return Err(invalid(format!("gain must be >= 1, got {}", self.gain)));
        }
        for (what, t) in [
            ("transmission", self.effective_transmission()),
            ("window transmission", self.window_t),
            ("polarizer transmission", self.polarizer_t),
            ("detector efficiency", self.detector_eta),
        ] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(invalid(format!("{what} must lie in (0, 1], got {t}")));
            }
        }
        Ok(())
    }
}

/// One gain point of a cloning sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub gain: f64,
    pub transmission: f64,
    pub inseparability: f64,
    pub g_insep: f64,
    pub e12: f64,
    pub e21: f64,
    pub var_x_minus: f64,
    pub var_y_plus: f64,
    pub inseparable: bool,
    pub epr: bool,
}

impl SweepRow {
    fn from_report(cfg: &ChainConfig, report: &EntanglementReport) -> Self {
        Self {
            gain: cfg.gain,
            transmission: cfg.effective_transmission(),
            inseparability: report.inseparability,
            g_insep: report.g_insep.value(),
            e12: report.epr_12,
            e21: report.epr_21,
            var_x_minus: report.squeezed_var_x_minus,
            var_y_plus: report.squeezed_var_y_plus,
            inseparable: report.is_inseparable(),
            epr: report.is_epr_12(),
        }
    }
}

/// Standard-form two-mode state: both beams thermal with variance
/// `(v_sq + v_as)/2`, x correlated and y anticorrelated by `(v_as − v_sq)/2`.
pub fn build_source(source: &SourceModel) -> Result<GaussianState> {
    let source = SourceModel::new(source.v_sq, source.v_as)?;
    let a = source.single_mode_variance();
    let c = 0.5 * (source.v_as - source.v_sq);
    #[rustfmt::skip]
    let cov = nalgebra::DMatrix::from_row_slice(4, 4, &[
        a,   0.0, c,   0.0,
        0.0, a,   0.0, -c,
        c,   0.0, a,   0.0,
        0.0, -c,  0.0, a,
    ]);
    GaussianState::new(nalgebra::DVector::zeros(4), cov)
}

fn pre_amplifier_losses(state: GaussianState, cfg: &ChainConfig) -> Result<GaussianState> {
    let mut state = state;
    for mode in [PROBE, CONJUGATE] {
        for _ in 0..cfg.windows_per_beam {
            state = state.attenuate(mode, cfg.window_t)?;
        }
        state = state.attenuate(mode, cfg.polarizer_t)?;
    }
    Ok(state)
}

/// Propagates the source through the whole chain, returning every stage:
/// source, after pre-amplifier losses, after the amplifier, after the
/// attenuator, after detection.
pub fn run_chain_stages(cfg: &ChainConfig) -> Result<Vec<GaussianState>> {
    cfg.validate()?;
    let source = build_source(&cfg.source)?;
    let lossy = pre_amplifier_losses(source.clone(), cfg)?;
    let amplified = lossy.amplify(CONJUGATE, cfg.gain, cfg.keep_ancilla)?;
    let cloned = amplified.attenuate(CONJUGATE, cfg.effective_transmission())?;
    let detected = cloned
        .attenuate(PROBE, cfg.detector_eta)?
        .attenuate(CONJUGATE, cfg.detector_eta)?;
    Ok(vec![source, lossy, amplified, cloned, detected])
}

/// Final detected state of the chain.
pub fn run_chain(cfg: &ChainConfig) -> Result<GaussianState> {
    let mut stages = run_chain_stages(cfg)?;
    Ok(stages.pop().expect("chain has stages"))
}

/// Probe/conjugate metrics of one configuration.
pub fn evaluate(cfg: &ChainConfig) -> Result<SweepRow> {
    let state = run_chain(cfg)?;
    let report = EntanglementReport::compute(&state, PROBE, CONJUGATE)?;
    Ok(SweepRow::from_report(cfg, &report))
}

/// Metrics versus gain at unity gain-loss product.
pub fn clone_sweep(base: &ChainConfig, gains: &[f64]) -> Result<Vec<SweepRow>> {
    gains
        .iter()
        .enumerate()
        .map(|(index, &g)| {
            evaluate(&base.at_gain(g)).map_err(|e| Error::SweepPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingMetric {
    /// `I` reaching 2.
    Inseparability,
    /// `E₁₂` reaching 1.
    Epr12,
}

impl CrossingMetric {
    pub fn threshold(self) -> f64 {
        match self {
            CrossingMetric::Inseparability => 2.0,
            CrossingMetric::Epr12 => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CrossingMetric::Inseparability => "insep",
            CrossingMetric::Epr12 => "epr12",
        }
    }

    pub fn value(self, cfg: &ChainConfig) -> Result<f64> {
        let state = run_chain(cfg)?;
        match self {
            CrossingMetric::Inseparability => {
                Ok(metrics::inseparability(&state, PROBE, CONJUGATE)?.0)
            }
            CrossingMetric::Epr12 => Ok(metrics::epr(&state, PROBE, CONJUGATE)?.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// The metric reaches its threshold at this gain.
    At(f64),
    /// Still below threshold at the search limit.
    NoCrossing { limit: f64, value: f64 },
    /// Already at or above threshold without amplification.
    AboveAtUnity(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSearch {
    /// Initial upper end of the gain bracket.
    pub g_hi: f64,
    /// The bracket is doubled up to this gain.
    pub g_limit: f64,
    /// Target accuracy on `|metric − threshold|`.
    pub ftol: f64,
    /// Number of log-spaced gains used to confirm monotonicity.
    pub monotone_samples: usize,
}

impl Default for CrossingSearch {
    fn default() -> Self {
        Self {
            g_hi: 50.0,
            g_limit: 1e4,
            ftol: 1e-9,
            monotone_samples: 64,
        }
    }
}

pub fn find_crossing(base: &ChainConfig, metric: CrossingMetric) -> Result<Crossing> {
    find_crossing_with(base, metric, &CrossingSearch::default())
}

/// Smallest gain (with unity gain-loss product) at which `metric` reaches
/// its entanglement threshold, by bisection.
///
/// The metric is sampled on the final bracket first; a decrease between
/// neighbouring samples aborts the search instead of bisecting a
/// non-monotone function.
pub fn find_crossing_with(
    base: &ChainConfig,
    metric: CrossingMetric,
    search: &CrossingSearch,
) -> Result<Crossing> {
    let threshold = metric.threshold();
    let eval = |g: f64| metric.value(&base.at_gain(g));

    let at_unity = eval(1.0)?;
    if at_unity >= threshold {
        return Ok(Crossing::AboveAtUnity(at_unity));
    }
    let mut hi = search.g_hi;
    let mut at_hi = eval(hi)?;
    while at_hi < threshold && hi < search.g_limit {
        hi = (2.0 * hi).min(search.g_limit);
        at_hi = eval(hi)?;
    }

    let n = search.monotone_samples.max(2);
    let grid: Vec<f64> = (0..n).map(|k| hi.powf(k as f64 / (n - 1) as f64)).collect();
    let values = grid.iter().map(|&g| eval(g)).collect::<Result<Vec<_>>>()?;
    for (k, w) in values.windows(2).enumerate() {
        if w[1] < w[0] - 1e-12 * w[0].abs().max(1.0) {
            return Err(Error::NonMonotone {
                metric: metric.name(),
                g_lo: grid[k],
                v_lo: w[0],
                g_hi: grid[k + 1],
                v_hi: w[1],
            });
        }
    }

    if at_hi < threshold {
        return Ok(Crossing::NoCrossing {
            limit: hi,
            value: at_hi,
        });
    }
    // Tighten the bracket with the monotonicity samples before bisecting.
    let k = values
        .iter()
        .position(|&v| v >= threshold)
        .expect("bracketed");
    let (lo, hi) = (grid[k - 1], grid[k]);
    // The closure cannot propagate errors; every gain in [lo, hi] is valid
    // because both ends evaluated successfully.
    let f = |g: f64| eval(g).unwrap_or(f64::NAN);
    Ok(Crossing::At(bisect_increasing(
        f,
        threshold,
        lo,
        hi,
        search.ftol,
    )))
}

/// One homodyne phase setting of a squeezing trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub theta: f64,
    /// `Var(X₋)` normalized to its shot-noise level.
    pub var_minus: f64,
    /// `Var(Y₊)` normalized to its shot-noise level.
    pub var_plus: f64,
}

/// Joint-quadrature noise as both homodyne phases are scanned together.
pub fn phase_scan(cfg: &ChainConfig, g: GFactor, thetas: &[f64]) -> Result<Vec<ScanPoint>> {
    let state = run_chain(cfg)?;
    let sql = (1.0 + g.value() * g.value()) / 2.0;
    thetas
        .iter()
        .map(|&theta| {
            let rotated = state
                .rotate_phase(PROBE, theta)?
                .rotate_phase(CONJUGATE, theta)?;
            Ok(ScanPoint {
                theta,
                var_minus: metrics::joint_variance_minus(&rotated, PROBE, CONJUGATE, g)? / sql,
                var_plus: metrics::joint_variance_plus(&rotated, PROBE, CONJUGATE, g)? / sql,
            })
        })
        .collect()
}

/// Entanglement of the amplifier ancilla with each detected beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaReport {
    pub probe: EntanglementReport,
    pub conjugate: EntanglementReport,
}

pub fn ancilla_report(cfg: &ChainConfig) -> Result<AncillaReport> {
    if !cfg.keep_ancilla {
        return Err(invalid("ancilla report needs keep_ancilla = true"));
    }
    let state = run_chain(cfg)?;
    Ok(AncillaReport {
        probe: EntanglementReport::compute(&state, PROBE, ANCILLA)?,
        conjugate: EntanglementReport::compute(&state, CONJUGATE, ANCILLA)?,
    })
}
