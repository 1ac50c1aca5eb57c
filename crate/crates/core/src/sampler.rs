//! Seeded Monte-Carlo homodyne sampling of Gaussian states.
//!
//! Draws are `mean + L z` with `L` the lower Cholesky factor of the
//! covariance and `z` standard normals taken in quadrature order
//! `(x₁, y₁, x₂, …)`. Shots are generated in blocks of `block_size`; block
//! `b` uses its own ChaCha20 stream (`seed_from_u64(seed)`, stream `b`) and
//! `rand_distr::StandardNormal`. Blocks may be produced in parallel, but they
//! are always consumed in block order, so results are bit-identical for a
//! given `(state, seed, shots, block_size)` whatever the thread count.
//!
//! Block statistics stand in for a spectrum analyzer's resolution/video
//! bandwidth averaging: a variance is estimated per block and the spread of
//! block estimates gives the standard error.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{GaussianState, Quadrature};

pub const DEFAULT_BLOCK_SIZE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub shots: usize,
    pub block_size: usize,
}

impl SampleConfig {
    pub fn new(seed: u64, shots: usize, block_size: usize) -> Result<Self> {
        let cfg = Self {
            seed,
            shots,
            block_size,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size < 2 || self.shots < self.block_size {
            return Err(invalid(format!(
                "need shots >= block_size >= 2, got shots={}, block_size={}",
                self.shots, self.block_size
            )));
        }
        Ok(())
    }

    /// Number of complete blocks; a trailing partial block only contributes
    /// to [`sample_quadratures`].
    pub fn full_blocks(&self) -> usize {
        self.shots / self.block_size
    }

    fn block_len(&self, block: usize) -> usize {
        self.block_size.min(self.shots - block * self.block_size)
    }

    fn total_blocks(&self) -> usize {
        self.shots.div_ceil(self.block_size)
    }
}

/// A value with its one-sigma standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `|value − expected|` in units of the standard error.
    pub fn z_score(&self, expected: f64) -> f64 {
        (self.value - expected).abs() / self.stderr
    }
}

struct Sampler<'a> {
    mean: &'a DVector<f64>,
    chol: DMatrix<f64>,
    cfg: SampleConfig,
}

impl<'a> Sampler<'a> {
    fn new(state: &'a GaussianState, cfg: SampleConfig) -> Result<Self> {
        cfg.validate()?;
        state.check_physical()?;
        let chol = state
            .cov()
            .clone()
            .cholesky()
            .ok_or(Error::Factorization)?
            .l();
        Ok(Self {
            mean: state.mean(),
            chol,
            cfg,
        })
    }

    /// Samples of one block, one shot per row.
    fn block(&self, block: usize) -> DMatrix<f64> {
        let dim = self.mean.len();
        let rows = self.cfg.block_len(block);
        let mut rng = ChaCha20Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(block as u64);
        let mut out = DMatrix::zeros(rows, dim);
        let mut z = DVector::zeros(dim);
        for row in 0..rows {
            for zi in z.iter_mut() {
                *zi = rng.sample(StandardNormal);
            }
            let x = self.mean + &self.chol * &z;
            out.row_mut(row).copy_from(&x.transpose());
        }
        out
    }
}

/// `shots × 2n` matrix of homodyne outcomes.
pub fn sample_quadratures(state: &GaussianState, cfg: &SampleConfig) -> Result<DMatrix<f64>> {
    let sampler = Sampler::new(state, *cfg)?;
    let blocks: Vec<DMatrix<f64>> = (0..cfg.total_blocks())
        .into_par_iter()
        .map(|b| sampler.block(b))
        .collect();
    let dim = state.mean().len();
    let mut out = DMatrix::zeros(cfg.shots, dim);
    let mut row = 0;
    for b in blocks {
        out.rows_mut(row, b.nrows()).copy_from(&b);
        row += b.nrows();
    }
    Ok(out)
}

/// Count, mean and centered scatter matrix of a batch of samples.
#[derive(Debug, Clone)]
struct Moments {
    n: usize,
    mean: DVector<f64>,
    scatter: DMatrix<f64>,
}

impl Moments {
    fn of(samples: &DMatrix<f64>) -> Self {
        let n = samples.nrows();
        let mean = samples.row_mean().transpose();
        let mut centered = samples.clone();
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }
        let scatter = centered.transpose() * &centered;
        Self { n, mean, scatter }
    }

    /// Pairwise combination of two disjoint batches.
    fn merge(self, other: &Self) -> Self {
        let n = self.n + other.n;
        let delta = &other.mean - &self.mean;
        let w = (self.n * other.n) as f64 / n as f64;
        let mean = &self.mean + &delta * (other.n as f64 / n as f64);
        let scatter = self.scatter + &other.scatter + &delta * delta.transpose() * w;
        Self { n, mean, scatter }
    }

    fn covariance(&self) -> DMatrix<f64> {
        &self.scatter / (self.n as f64 - 1.0)
    }

    fn state(&self) -> Result<GaussianState> {
        GaussianState::from_estimate(self.mean.clone(), self.covariance())
    }
}

/// Sample mean and unbiased (`N − 1`) sample covariance.
pub fn empirical_covariance(samples: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if samples.nrows() < 2 {
        return Err(invalid("empirical covariance needs at least two samples"));
    }
    let m = Moments::of(samples);
    let cov = m.covariance();
    Ok((m.mean, cov))
}

/// Per-block moments of the complete blocks, in block order.
fn block_moments(state: &GaussianState, cfg: &SampleConfig) -> Result<Vec<Moments>> {
    let sampler = Sampler::new(state, *cfg)?;
    if cfg.full_blocks() < 2 {
        return Err(invalid(format!(
            "need at least two full blocks, got {}",
            cfg.full_blocks()
        )));
    }
    Ok((0..cfg.full_blocks())
        .into_par_iter()
        .map(|b| Moments::of(&sampler.block(b)))
        .collect())
}

/// Estimates `f` on the sampled state.
///
/// The value is `f` of the empirical state pooled over all complete blocks;
/// the standard error is the batch-means estimate
/// `std(f(block states)) / √num_blocks`.
pub fn metric_estimate<F>(state: &GaussianState, cfg: &SampleConfig, f: F) -> Result<Estimate>
where
    F: Fn(&GaussianState) -> Result<f64>,
{
    let blocks = block_moments(state, cfg)?;
    let per_block = blocks
        .iter()
        .map(|m| f(&m.state()?))
        .collect::<Result<Vec<f64>>>()?;
    let pooled = blocks[1..]
        .iter()
        .fold(blocks[0].clone(), |acc, m| acc.merge(m));
    Ok(Estimate {
        value: f(&pooled.state()?)?,
        stderr: std_error(&per_block),
    })
}

/// Empirical state pooled over all complete blocks.
pub fn empirical_state(state: &GaussianState, cfg: &SampleConfig) -> Result<GaussianState> {
    let blocks = block_moments(state, cfg)?;
    blocks[1..]
        .iter()
        .fold(blocks[0].clone(), |acc, m| acc.merge(m))
        .state()
}

fn std_error(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// A linear combination `Σ cₖ Q_{mₖ}` of homodyne quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct JointQuadrature {
    pub terms: Vec<(usize, Quadrature, f64)>,
}

impl JointQuadrature {
    pub fn single(mode: usize, quad: Quadrature) -> Self {
        Self {
            terms: vec![(mode, quad, 1.0)],
        }
    }

    /// `(X₁ − g X₂)/√2`.
    pub fn x_minus(m1: usize, m2: usize, g: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            terms: vec![(m1, Quadrature::X, s), (m2, Quadrature::X, -g * s)],
        }
    }

    /// `(Y₁ + g Y₂)/√2`.
    pub fn y_plus(m1: usize, m2: usize, g: f64) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            terms: vec![(m1, Quadrature::Y, s), (m2, Quadrature::Y, g * s)],
        }
    }

    /// Exact variance from the covariance matrix.
    pub fn variance(&self, state: &GaussianState) -> Result<f64> {
        let w = self.weights(state)?;
        Ok((w.transpose() * state.cov() * &w)[(0, 0)])
    }

    fn weights(&self, state: &GaussianState) -> Result<DVector<f64>> {
        let mut w = DVector::zeros(state.mean().len());
        for &(mode, quad, c) in &self.terms {
            state.check_mode(mode)?;
            w[quad.index(mode)] += c;
        }
        Ok(w)
    }
}

/// Block-averaged variance of a joint quadrature with its standard error.
pub fn variance_trace(
    state: &GaussianState,
    joint: &JointQuadrature,
    cfg: &SampleConfig,
) -> Result<Estimate> {
    let w = joint.weights(state)?;
    let variances: Vec<f64> = block_moments(state, cfg)?
        .iter()
        .map(|m| (w.transpose() * m.covariance() * &w)[(0, 0)])
        .collect();
    let n = variances.len() as f64;
    Ok(Estimate {
        value: variances.iter().sum::<f64>() / n,
        stderr: std_error(&variances),
    })
}
