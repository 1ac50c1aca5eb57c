//! Gaussian states of `n` optical modes and the maps that act on them.
//!
//! Quadratures are stored mode-major as `(x₁, y₁, x₂, y₂, …)` and scaled so
//! that vacuum has unit variance in every quadrature (the shot-noise level).
//! With that scaling the canonical commutator is `[x, y] = 2i` and a state is
//! physical iff every symplectic eigenvalue of its covariance is at least 1.
//!
//! States are immutable: every operation returns a new state.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Maximum allowed `|cov - covᵀ|` entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Slack on the uncertainty bound `ν_min ≥ 1`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Amplitude (`X`) or phase (`Y`) quadrature of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    X,
    Y,
}

impl Quadrature {
    /// Position of this quadrature inside its mode's `(x, y)` pair.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::Y => 1,
        }
    }

    /// Index of this quadrature of `mode` in the mean vector.
    pub fn index(self, mode: usize) -> usize {
        2 * mode + self.offset()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from first and second moments, rejecting anything that
    /// is asymmetric, non-finite or violates the uncertainty principle.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::from_estimate(mean, cov)?;
        state.check_physical()?;
        Ok(state)
    }

    /// Builds a state from estimated moments (e.g. a sample covariance).
    ///
    /// Only shape, finiteness and symmetry are checked: sampled covariances
    /// of near-pure states routinely fall a little below the uncertainty
    /// bound. Use [`GaussianState::new`] for anything that must be physical.
    pub fn from_estimate(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(invalid(format!(
                "mean length must be a positive even number, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(invalid(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL * cov.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self::from_parts(mean, cov))
    }

    /// Symmetrizes on the way in; every map funnels through here.
    fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        let cov = (&cov + cov.transpose()) * 0.5;
        Self { mean, cov }
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("vacuum needs at least one mode"));
        }
        let dim = 2 * n_modes;
        Ok(Self {
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim),
        })
    }

    /// Product of thermal modes with the given quadrature variances (each ≥ 1).
    pub fn thermal(variances: &[f64]) -> Result<Self> {
        if variances.is_empty() {
            return Err(invalid("thermal state needs at least one mode"));
        }
        if let Some(v) = variances.iter().find(|v| !(**v >= 1.0)) {
            return Err(invalid(format!("thermal variance {v} below vacuum level")));
        }
        let diag =
            DVector::from_iterator(2 * variances.len(), variances.iter().flat_map(|&v| [v, v]));
        Ok(Self {
            mean: DVector::zeros(diag.len()),
            cov: DMatrix::from_diagonal(&diag),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode < self.n_modes() {
            Ok(())
        } else {
            Err(Error::InvalidMode {
                mode,
                n_modes: self.n_modes(),
            })
        }
    }

    /// Symplectic spectrum in ascending order, one value per mode.
    ///
    /// Returns `None` if the covariance is not positive definite, in which
    /// case the state is unphysical anyway.
    pub fn symplectic_eigenvalues(&self) -> Option<Vec<f64>> {
        let l = Cholesky::new(self.cov.clone())?.unpack();
        // With σ = L Lᵀ, the antisymmetric Lᵀ Ω L has singular values ν, each
        // twice. This avoids squaring the condition number of σ.
        let a = l.transpose() * symplectic_form(self.n_modes()) * &l;
        let mut nu: Vec<f64> = a.singular_values().iter().copied().collect();
        nu.sort_by(f64::total_cmp);
        Some(nu.into_iter().step_by(2).collect())
    }

    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues().map_or(0.0, |nu| nu[0])
    }

    pub fn is_physical(&self) -> bool {
        self.min_symplectic_eigenvalue() >= 1.0 - PHYSICALITY_TOL
    }

    pub fn check_physical(&self) -> Result<()> {
        let nu = self.min_symplectic_eigenvalue();
        if nu >= 1.0 - PHYSICALITY_TOL {
            Ok(())
        } else {
            Err(Error::Unphysical(nu))
        }
    }

    /// Shifts the mean of one mode; the covariance is untouched.
    pub fn displace(&self, mode: usize, dx: f64, dy: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !dx.is_finite() || !dy.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut mean = self.mean.clone();
        mean[2 * mode] += dx;
        mean[2 * mode + 1] += dy;
        Ok(Self {
            mean,
            cov: self.cov.clone(),
        })
    }

    /// Two-mode squeezer with x-quadratures correlated and y-quadratures
    /// anticorrelated, so that `(x_a - x_b)/√2` and `(y_a + y_b)/√2` are
    /// squeezed to `e^{-2r}`.
    pub fn two_mode_squeeze(&self, mode_a: usize, mode_b: usize, r: f64) -> Result<Self> {
        self.check_mode(mode_a)?;
        self.check_mode(mode_b)?;
        if mode_a == mode_b {
            return Err(invalid("two-mode squeezing needs two distinct modes"));
        }
        if !r.is_finite() {
            return Err(Error::NonFinite);
        }
        let (c, s) = (r.cosh(), r.sinh());
        #[rustfmt::skip]
        let block = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, s,   0.0,
            0.0, c,   0.0, -s,
            s,   0.0, c,   0.0,
            0.0, -s,  0.0, c,
        ]);
        Ok(self.apply_symplectic(&[mode_a, mode_b], &block))
    }

    /// Quantum-limited phase-insensitive amplifier of intensity gain `gain`.
    ///
    /// Dilated as a two-mode squeezer with a fresh vacuum ancilla at
    /// `r = arccosh(√gain)`. With `keep_ancilla` the ancilla (idler) stays
    /// as the last mode; otherwise it is traced out, leaving the added noise
    /// `(gain - 1)` per quadrature.
    pub fn amplify(&self, mode: usize, gain: f64, keep_ancilla: bool) -> Result<Self> {
        self.check_mode(mode)?;
        if !(gain >= 1.0) || !gain.is_finite() {
            return Err(invalid(format!("amplifier gain must be >= 1, got {gain}")));
        }
        let ancilla = self.n_modes();
        let dilated =
            self.tensor(&Self::vacuum(1)?)
                .two_mode_squeeze(mode, ancilla, gain.sqrt().acosh())?;
        if keep_ancilla {
            Ok(dilated)
        } else {
            dilated.trace_out(ancilla)
        }
    }

    /// Pure-loss channel: beamsplitter of transmission `t` against vacuum,
    /// reflected port discarded.
    pub fn attenuate(&self, mode: usize, t: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(t > 0.0 && t <= 1.0) {
            return Err(invalid(format!("transmission must lie in (0, 1], got {t}")));
        }
        let k = t.sqrt();
        let mut mean = self.mean.clone();
        let mut cov = self.cov.clone();
        for q in [2 * mode, 2 * mode + 1] {
            mean[q] *= k;
            cov.row_mut(q).scale_mut(k);
            cov.column_mut(q).scale_mut(k);
            cov[(q, q)] += 1.0 - t;
        }
        Ok(Self::from_parts(mean, cov))
    }

    /// Beamsplitter of transmission `t` mixing `mode` with a new vacuum mode
    /// appended at the end. Both output ports are kept; the transmitted port
    /// stays at `mode`.
    pub fn beamsplit(&self, mode: usize, t: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(t > 0.0 && t < 1.0) {
            return Err(invalid(format!(
                "beamsplitter transmission must lie in (0, 1), got {t}"
            )));
        }
        let (a, b) = (t.sqrt(), (1.0 - t).sqrt());
        #[rustfmt::skip]
        let block = DMatrix::from_row_slice(4, 4, &[
            a,   0.0, b,   0.0,
            0.0, a,   0.0, b,
            -b,  0.0, a,   0.0,
            0.0, -b,  0.0, a,
        ]);
        let new_mode = self.n_modes();
        Ok(self
            .tensor(&Self::vacuum(1)?)
            .apply_symplectic(&[mode, new_mode], &block))
    }

    /// Rotates the quadrature pair of `mode`: `x → x cosθ + y sinθ`,
    /// `y → -x sinθ + y cosθ`.
    pub fn rotate_phase(&self, mode: usize, theta: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !theta.is_finite() {
            return Err(Error::NonFinite);
        }
        let (s, c) = theta.sin_cos();
        let block = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        Ok(self.apply_symplectic(&[mode], &block))
    }

    /// Partial trace over one mode. Tracing the last remaining mode is an
    /// error since a state needs at least one mode.
    pub fn trace_out(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if self.n_modes() == 1 {
            return Err(invalid("cannot trace out the only mode"));
        }
        let keep: Vec<usize> = (0..self.mean.len()).filter(|&i| i / 2 != mode).collect();
        let mean = DVector::from_iterator(keep.len(), keep.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.cov[(keep[i], keep[j])]);
        Ok(Self { mean, cov })
    }

    /// Product state; modes of `other` follow the modes of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(da + db);
        mean.rows_mut(0, da).copy_from(&self.mean);
        mean.rows_mut(da, db).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        Self { mean, cov }
    }

    /// Applies a linear map given on the quadratures of `modes` (in that
    /// order), identity elsewhere.
    fn apply_symplectic(&self, modes: &[usize], block: &DMatrix<f64>) -> Self {
        let dim = self.mean.len();
        let global = |local: usize| 2 * modes[local / 2] + local % 2;
        let mut full = DMatrix::identity(dim, dim);
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                full[(global(i), global(j))] = block[(i, j)];
            }
        }
        let mean = &full * &self.mean;
        let cov = &full * &self.cov * full.transpose();
        Self::from_parts(mean, cov)
    }
}

/// `Ω = ⊕ [[0, 1], [-1, 0]]` for `n` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}
