//! Gaussian continuous-variable simulation of a quantum-limited
//! phase-insensitive amplifier and its use to clone one beam of a two-mode
//! squeezed state.
//!
//! - [`gaussian`]: states and the symplectic / loss / gain maps acting on them.
//! - [`metrics`]: joint quadratures, the inseparability sum and EPR products.
//! - [`nf`]: noise figure of the amplifier with and without detector losses.
//! - [`chain`]: the source → amplifier → attenuator → detector experiment,
//!   gain sweeps, crossing search and homodyne phase scans.
//! - [`sampler`]: seeded Monte-Carlo homodyne sampling used as an
//!   independent check of the analytic results.
//!
//! All quadratures are in shot-noise units: vacuum variance is 1.

pub mod chain;
pub mod error;
pub mod gaussian;
pub mod metrics;
pub mod nf;
pub mod optimize;
pub mod sampler;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, Quadrature};
pub use metrics::{EntanglementReport, GFactor};
