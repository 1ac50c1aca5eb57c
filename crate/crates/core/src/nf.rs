//! Noise figure of the phase-insensitive amplifier, `NF = SNR_out / SNR_in`.
//!
//! The modulated coherent input is a displaced vacuum whose squared mean is
//! the signal power in shot-noise units. The input SNR is taken on the
//! bypass path (detector only); the output SNR after the amplifier and the
//! same detector.

use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalModel {
    /// Modulation power in shot-noise units (100 ≙ 20 dB above the noise).
    pub signal_power: f64,
    pub detector_efficiency: f64,
    /// Extra transmission between amplifier and detector (e.g. absorption).
    pub pre_detection_transmission: f64,
}

impl SignalModel {
    pub fn new(signal_power: f64, detector_efficiency: f64) -> Result<Self> {
        let model = Self {
            signal_power,
            detector_efficiency,
            pre_detection_transmission: 1.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_pre_detection_transmission(mut self, t: f64) -> Result<Self> {
        self.pre_detection_transmission = t;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_power > 0.0 && self.signal_power.is_finite()) {
            return Err(invalid(format!(
                "signal power must be > 0, got {}",
                self.signal_power
            )));
        }
        check_efficiency(self.detector_efficiency)?;
        check_transmission(
            "pre-detection transmission",
            self.pre_detection_transmission,
        )
    }
}

impl Default for SignalModel {
    fn default() -> Self {
        Self {
            signal_power: 100.0,
            detector_efficiency: 1.0,
            pre_detection_transmission: 1.0,
        }
    }
}

/// One row of a noise-figure sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NfRow {
    pub gain: f64,
    pub nf_ideal: f64,
    pub nf_detector: f64,
    pub nf_simulated: f64,
}

fn check_gain(gain: f64) -> Result<()> {
    if gain >= 1.0 && gain.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("gain must be >= 1, got {gain}")))
    }
}

fn check_efficiency(eta: f64) -> Result<()> {
    check_transmission("detector efficiency", eta)
}

fn check_transmission(what: &str, t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{what} must lie in (0, 1], got {t}")))
    }
}

pub fn snr(signal_power: f64, noise_variance: f64) -> Result<f64> {
    if !(noise_variance > 0.0) {
        return Err(invalid(format!(
            "noise variance must be > 0, got {noise_variance}"
        )));
    }
    Ok(signal_power / noise_variance)
}

/// Quantum-limited noise figure `G/(2G − 1)`.
pub fn nf_ideal(gain: f64) -> Result<f64> {
    check_gain(gain)?;
    Ok(gain / (2.0 * gain - 1.0))
}

/// Noise figure of an ideal amplifier seen through a detector of
/// efficiency `eta`: `G/(2ηG − 2η + 1)`.
pub fn nf_with_detector(gain: f64, eta: f64) -> Result<f64> {
    check_gain(gain)?;
    check_efficiency(eta)?;
    Ok(gain / (2.0 * eta * gain - 2.0 * eta + 1.0))
}

/// Signal power and the noise variance along the signal direction.
fn detected_snr(state: &GaussianState, mode: usize) -> Result<f64> {
    let (mx, my) = (state.mean()[2 * mode], state.mean()[2 * mode + 1]);
    let power = mx * mx + my * my;
    if !(power > 0.0) {
        return Err(invalid("noise figure needs a displaced input"));
    }
    let (ux, uy) = (mx / power.sqrt(), my / power.sqrt());
    let c = state.cov();
    let (i, j) = (2 * mode, 2 * mode + 1);
    let noise = ux * ux * c[(i, i)] + 2.0 * ux * uy * c[(i, j)] + uy * uy * c[(j, j)];
    snr(power, noise)
}

/// Noise figure obtained by propagating `input` through both measurement
/// paths: bypass → detector, and amplifier → extra loss → detector.
pub fn nf_for_input(
    input: &GaussianState,
    mode: usize,
    gain: f64,
    signal: &SignalModel,
) -> Result<f64> {
    check_gain(gain)?;
    signal.validate()?;
    let eta = signal.detector_efficiency;
    let bypass = input.attenuate(mode, eta)?;
    let amplified = input
        .amplify(mode, gain, false)?
        .attenuate(mode, signal.pre_detection_transmission)?
        .attenuate(mode, eta)?;
    Ok(detected_snr(&amplified, mode)? / detected_snr(&bypass, mode)?)
}

/// [`nf_for_input`] on a single-mode coherent input carrying the signal in
/// its amplitude quadrature.
pub fn nf_simulated(gain: f64, signal: &SignalModel) -> Result<f64> {
    signal.validate()?;
    let input = GaussianState::vacuum(1)?.displace(0, signal.signal_power.sqrt(), 0.0)?;
    nf_for_input(&input, 0, gain, signal)
}

/// Ideal, detector-rescaled and simulated noise figure on each gain.
pub fn nf_sweep(gains: &[f64], eta: f64) -> Result<Vec<NfRow>> {
    let signal = SignalModel::new(100.0, eta)?;
    gains
        .iter()
        .enumerate()
        .map(|(index, &gain)| {
            let row = || -> Result<NfRow> {
                Ok(NfRow {
                    gain,
                    nf_ideal: nf_ideal(gain)?,
                    nf_detector: nf_with_detector(gain, eta)?,
                    nf_simulated: nf_simulated(gain, &signal)?,
                })
            };
            row().map_err(|e| Error::SweepPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}
