#![allow(dead_code)]

use cvclone::GaussianState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random physical state: thermal modes scrambled by squeezers, rotations,
/// gains, losses and displacements.
pub fn random_state(rng: &mut impl Rng, n_modes: usize) -> GaussianState {
    let variances: Vec<f64> = (0..n_modes).map(|_| rng.random_range(1.0..3.0)).collect();
    let mut s = GaussianState::thermal(&variances).unwrap();
    for _ in 0..6 {
        let a = rng.random_range(0..n_modes);
        match rng.random_range(0..5) {
            0 if n_modes > 1 => {
                let b = (a + rng.random_range(1..n_modes)) % n_modes;
                s = s
                    .two_mode_squeeze(a, b, rng.random_range(-0.8..0.8))
                    .unwrap();
            }
            1 => {
                s = s
                    .rotate_phase(a, rng.random_range(0.0..std::f64::consts::TAU))
                    .unwrap()
            }
            2 => s = s.amplify(a, rng.random_range(1.0..3.0), false).unwrap(),
            3 => s = s.attenuate(a, rng.random_range(0.2..1.0)).unwrap(),
            _ => {
                s = s
                    .displace(a, rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
                    .unwrap()
            }
        }
    }
    s
}

/// Random two-mode state with x correlated and y anticorrelated (the
/// convention of the source), plus random local noise.
pub fn random_epr_state(rng: &mut impl Rng) -> GaussianState {
    let th =
        GaussianState::thermal(&[rng.random_range(1.0..2.0), rng.random_range(1.0..2.0)]).unwrap();
    th.two_mode_squeeze(0, 1, rng.random_range(0.05..1.2))
        .unwrap()
        .amplify(1, rng.random_range(1.0..4.0), false)
        .unwrap()
        .attenuate(0, rng.random_range(0.3..1.0))
        .unwrap()
        .attenuate(1, rng.random_range(0.3..1.0))
        .unwrap()
}
