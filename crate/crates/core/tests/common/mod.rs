//! Seeded random fixtures shared by the integration suites.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use torusflow::{Frequency, FourierState};

/// State with at most `max_modes` distinct frequencies in the box
/// `|k|_inf <= box_radius` and complex Gaussian amplitudes.
pub fn random_state(
    rng: &mut ChaCha8Rng,
    d: usize,
    max_modes: usize,
    box_radius: i64,
) -> FourierState {
    let n_modes = rng.gen_range(1..=max_modes);
    let mut modes: Vec<(Frequency, Complex64)> = Vec::new();
    while modes.len() < n_modes {
        let coords: Vec<i64> = (0..d).map(|_| rng.gen_range(-box_radius..=box_radius)).collect();
        let k = Frequency::new(coords).unwrap();
        if modes.iter().any(|(existing, _)| existing == &k) {
            continue;
        }
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        modes.push((k, Complex64::new(re, im)));
    }
    FourierState::new(d, modes).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
