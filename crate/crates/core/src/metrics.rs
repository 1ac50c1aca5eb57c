//! Quadrature statistics and the two entanglement witnesses used on the
//! probe/conjugate pair: the normalized inseparability sum `I` and the EPR
//! product of conditional variances `E_ij`.
//!
//! Joint quadratures follow the fixed sign convention of the two-mode
//! squeezer in [`crate::gaussian`]: `X₋ = (X₁ − g X₂)/√2` and
//! `Y₊ = (Y₁ + g Y₂)/√2`, with the electronic gain `g ≥ 0`.

use crate::error::{invalid, Error, Result};
use crate::gaussian::{GaussianState, Quadrature};
use crate::optimize::golden_section;

/// Upper end of the bracket used for numeric searches over `g`.
pub const G_SEARCH_MAX: f64 = 1e3;

/// Relative tolerance of the golden-section cross-check.
pub const G_SEARCH_TOL: f64 = 1e-10;

/// Electronic gain applied to the second homodyne signal. Non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct GFactor(f64);

impl GFactor {
    pub const ONE: GFactor = GFactor(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(invalid(format!("g must be finite and >= 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Metrics for one ordered pair of modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    /// Normalized inseparability `I`; entangled when `< 2`.
    pub inseparability: f64,
    pub g_insep: GFactor,
    /// `E₁₂`: mode 2 used to infer mode 1.
    pub epr_12: f64,
    /// `E₂₁`: mode 1 used to infer mode 2.
    pub epr_21: f64,
    /// Optimal `g` for `V_{X1|X2}`.
    pub g_min_x: GFactor,
    /// Optimal `g` for `V_{Y1|Y2}`.
    pub g_min_y: GFactor,
    /// `Var(X₋)` at `g_insep`, normalized to its shot-noise level `(1+g²)/2`.
    pub squeezed_var_x_minus: f64,
    /// `Var(Y₊)` at `g_insep`, normalized likewise.
    pub squeezed_var_y_plus: f64,
}

impl EntanglementReport {
    pub fn compute(state: &GaussianState, m1: usize, m2: usize) -> Result<Self> {
        let (inseparability, g_insep) = inseparability(state, m1, m2)?;
        let (vx12, g_min_x) = conditional_variance(state, m1, m2, Quadrature::X)?;
        let (vy12, g_min_y) = conditional_variance(state, m1, m2, Quadrature::Y)?;
        let (_, epr_21) = epr(state, m1, m2)?;
        let sql = shot_noise_joint(g_insep);
        Ok(Self {
            inseparability,
            g_insep,
            epr_12: vx12 * vy12,
            epr_21,
            g_min_x,
            g_min_y,
            squeezed_var_x_minus: joint_variance_minus(state, m1, m2, g_insep)? / sql,
            squeezed_var_y_plus: joint_variance_plus(state, m1, m2, g_insep)? / sql,
        })
    }

    pub fn is_inseparable(&self) -> bool {
        self.inseparability < 2.0
    }

    pub fn is_epr_12(&self) -> bool {
        self.epr_12 < 1.0
    }
}

pub fn quad_variance(state: &GaussianState, mode: usize, quad: Quadrature) -> Result<f64> {
    state.check_mode(mode)?;
    let i = quad.index(mode);
    Ok(state.cov()[(i, i)])
}

pub fn quad_covariance(
    state: &GaussianState,
    mode_a: usize,
    quad_a: Quadrature,
    mode_b: usize,
    quad_b: Quadrature,
) -> Result<f64> {
    state.check_mode(mode_a)?;
    state.check_mode(mode_b)?;
    Ok(state.cov()[(quad_a.index(mode_a), quad_b.index(mode_b))])
}

/// Second moments of one quadrature across a pair: `(V₁, V₂, C₁₂)`.
fn pair_moments(
    state: &GaussianState,
    m1: usize,
    m2: usize,
    quad: Quadrature,
) -> Result<(f64, f64, f64)> {
    Ok((
        quad_variance(state, m1, quad)?,
        quad_variance(state, m2, quad)?,
        quad_covariance(state, m1, quad, m2, quad)?,
    ))
}

fn check_pair(state: &GaussianState, m1: usize, m2: usize) -> Result<()> {
    if state.n_modes() < 2 {
        return Err(invalid("two-mode metric on a single-mode state"));
    }
    state.check_mode(m1)?;
    state.check_mode(m2)?;
    if m1 == m2 {
        return Err(invalid("two-mode metric needs distinct modes"));
    }
    Ok(())
}

/// Shot-noise level of a joint quadrature `(A ± gB)/√2`.
fn shot_noise_joint(g: GFactor) -> f64 {
    (1.0 + g.0 * g.0) / 2.0
}

/// `Var[(X₁ − g X₂)/√2]`.
pub fn joint_variance_minus(
    state: &GaussianState,
    m1: usize,
    m2: usize,
    g: GFactor,
) -> Result<f64> {
    let (v1, v2, c) = pair_moments(state, m1, m2, Quadrature::X)?;
    let g = g.0;
    Ok((v1 + g * g * v2 - 2.0 * g * c) / 2.0)
}

/// `Var[(Y₁ + g Y₂)/√2]`.
pub fn joint_variance_plus(state: &GaussianState, m1: usize, m2: usize, g: GFactor) -> Result<f64> {
    let (v1, v2, c) = pair_moments(state, m1, m2, Quadrature::Y)?;
    let g = g.0;
    Ok((v1 + g * g * v2 + 2.0 * g * c) / 2.0)
}

/// Coefficients of `I(g) = (A − 2Cg + Bg²)/(1 + g²)`.
fn insep_coefficients(state: &GaussianState, m1: usize, m2: usize) -> Result<(f64, f64, f64)> {
    check_pair(state, m1, m2)?;
    let (v1x, v2x, cx) = pair_moments(state, m1, m2, Quadrature::X)?;
    let (v1y, v2y, cy) = pair_moments(state, m1, m2, Quadrature::Y)?;
    Ok((v1x + v1y, v2x + v2y, cx - cy))
}

/// `I` at a fixed `g`: the joint variances each normalized to their
/// shot-noise level. Two independent vacua give exactly 2 for every `g`.
pub fn inseparability_at(state: &GaussianState, m1: usize, m2: usize, g: GFactor) -> Result<f64> {
    let (a, b, c) = insep_coefficients(state, m1, m2)?;
    let g = g.0;
    Ok((a - 2.0 * c * g + b * g * g) / (1.0 + g * g))
}

/// Minimum of `I(g)` over `g ≥ 0` and the minimizing `g`.
///
/// `I(g)` is the Rayleigh quotient of `[[A, −C], [−C, B]]` at `(1, g)`, so
/// for `C > 0` the minimum is the smaller eigenvalue, attained at the
/// positive root of `C g² + (B − A) g − C = 0`. For `C ≤ 0` there is no
/// interior minimum on `g ≥ 0`: the infimum is `min(A, B)`, at `g = 0` or
/// approached as `g → ∞`, in which case `G_SEARCH_MAX` is reported as `g`.
pub fn inseparability(state: &GaussianState, m1: usize, m2: usize) -> Result<(f64, GFactor)> {
    let (a, b, c) = insep_coefficients(state, m1, m2)?;
    if c <= 0.0 {
        return Ok(if b < a {
            (b, GFactor(G_SEARCH_MAX))
        } else {
            (a, GFactor(0.0))
        });
    }
    let disc = (a - b).hypot(2.0 * c);
    // Pick the cancellation-free form of the positive root.
    let g = if b >= a {
        2.0 * c / ((b - a) + disc)
    } else {
        ((a - b) + disc) / (2.0 * c)
    };
    Ok((0.5 * ((a + b) - disc), GFactor(g)))
}

/// Golden-section minimization of `I(g)` on `[0, G_SEARCH_MAX]`; an
/// independent route to [`inseparability`].
pub fn inseparability_numeric(
    state: &GaussianState,
    m1: usize,
    m2: usize,
) -> Result<(f64, GFactor)> {
    let (a, b, c) = insep_coefficients(state, m1, m2)?;
    let (g, v) = golden_section(
        |g| (a - 2.0 * c * g + b * g * g) / (1.0 + g * g),
        0.0,
        G_SEARCH_MAX,
        G_SEARCH_TOL,
    );
    Ok((v, GFactor(g)))
}

/// Conditional variance `V_{Q_target | Q_meter}` with its optimal `g ≥ 0`.
///
/// For `X` this minimizes `Var(X_t − g X_m)`, for `Y` it minimizes
/// `Var(Y_t + g Y_m)`. The result is in units of the target's shot noise.
pub fn conditional_variance(
    state: &GaussianState,
    target: usize,
    meter: usize,
    quad: Quadrature,
) -> Result<(f64, GFactor)> {
    check_pair(state, target, meter)?;
    let (vt, vm, c) = pair_moments(state, target, meter, quad)?;
    if !(vm > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "meter variance {vm} is not positive"
        )));
    }
    let c = match quad {
        Quadrature::X => c,
        Quadrature::Y => -c,
    };
    if c <= 0.0 {
        return Ok((vt, GFactor(0.0)));
    }
    Ok((vt - c * c / vm, GFactor(c / vm)))
}

/// `(E₁₂, E₂₁)`, each the product of the x and y conditional variances with
/// their own optimal `g`.
pub fn epr(state: &GaussianState, m1: usize, m2: usize) -> Result<(f64, f64)> {
    let (x12, _) = conditional_variance(state, m1, m2, Quadrature::X)?;
    let (y12, _) = conditional_variance(state, m1, m2, Quadrature::Y)?;
    let (x21, _) = conditional_variance(state, m2, m1, Quadrature::X)?;
    let (y21, _) = conditional_variance(state, m2, m1, Quadrature::Y)?;
    Ok((x12 * y12, x21 * y21))
}

pub fn db(ratio: f64) -> Result<f64> {
    if ratio > 0.0 && ratio.is_finite() {
        Ok(10.0 * ratio.log10())
    } else {
        Err(invalid(format!("dB of non-positive ratio {ratio}")))
    }
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
