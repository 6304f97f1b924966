#![allow(dead_code)]

use hybrid_optics::gates::LogicalEncoding;
use hybrid_optics::PhotonicState;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Normalized vector with Gaussian-ish components.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    v
}

pub fn random_encoded_state<R: Rng>(rng: &mut R, enc: &LogicalEncoding) -> PhotonicState {
    let v = random_vector(rng, enc.dim());
    enc.encode_amplitudes(&v).unwrap()
}
