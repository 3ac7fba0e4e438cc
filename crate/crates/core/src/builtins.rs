//! Builtin test functions and the deterministic random generators behind
//! `--seed`.
//!
//! Every run draws from a single SplitMix64 stream, so the same seed always
//! produces the same coefficients, homeomorphisms and therefore the same
//! output bytes.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;
use crate::experiments::LacunaryWitness;
use crate::fourier::{FourierSeries, GridFunction};
use crate::homeo::CircleHomeomorphism;

/// SplitMix64: the 64-bit mixing generator of Steele, Lea and Flood.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// `e^{ikt}` as a coefficient vector.
pub fn single_harmonic(k: i64) -> FourierSeries {
    FourierSeries::harmonic(k, Complex64::new(1.0, 0.0))
}

/// The lacunary witness with the given number of terms.
pub fn lacunary(terms: usize) -> LacunaryWitness {
    LacunaryWitness::new(terms)
}

/// Samples of `2 + cos t`.
pub fn cos_plus_2(n: usize) -> Result<GridFunction> {
    GridFunction::from_real_fn(n, |t| 2.0 + t.cos())
}

/// Samples of `exp(a cos t)`.
pub fn exp_cos(a: f64, n: usize) -> Result<GridFunction> {
    GridFunction::from_real_fn(n, |t| (a * t.cos()).exp())
}

/// Complex trigonometric polynomial with coefficients uniform in the unit
/// square, over the band `|k| <= degree`.
pub fn random_trig(degree: usize, rng: &mut SplitMix64) -> FourierSeries {
    FourierSeries::new(
        (0..2 * degree + 1)
            .map(|_| Complex64::new(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0)))
            .collect(),
    )
}

/// Real-valued random trigonometric polynomial (conjugate-symmetric band).
pub fn random_real_trig(degree: usize, rng: &mut SplitMix64) -> FourierSeries {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
    coeffs[degree] = Complex64::new(rng.next_in(-1.0, 1.0), 0.0);
    for k in 1..=degree {
        let c = Complex64::new(rng.next_in(-1.0, 1.0), rng.next_in(-1.0, 1.0));
        coeffs[degree + k] = c;
        coeffs[degree - k] = c.conj();
    }
    FourierSeries::new(coeffs)
}

/// Smooth random circle homeomorphism `t + sum_j a_j sin(jt + phase_j)`,
/// sampled into a knot table.
///
/// The amplitudes are normalized so that `sum_j j |a_j| = 0.9`, which keeps
/// the derivative above `0.1` and the sampled map strictly increasing at any
/// knot density.
pub fn random_homeomorphism(
    rng: &mut SplitMix64,
    harmonics: usize,
    knots: usize,
) -> CircleHomeomorphism {
    assert!(harmonics >= 1 && knots >= 8);
    let raw: Vec<(f64, f64)> = (0..harmonics)
        .map(|_| (rng.next_in(-1.0, 1.0), rng.next_in(0.0, TAU)))
        .collect();
    let weight: f64 = raw
        .iter()
        .enumerate()
        .map(|(j, (a, _))| (j + 1) as f64 * a.abs())
        .sum();
    let scale = if weight > 0.0 { 0.9 / weight } else { 0.0 };
    let eval = |t: f64| -> f64 {
        t + raw
            .iter()
            .enumerate()
            .map(|(j, &(a, phase))| scale * a * ((j + 1) as f64 * t + phase).sin())
            .sum::<f64>()
    };
    let knots_in: Vec<f64> = (0..knots).map(|i| TAU * i as f64 / knots as f64).collect();
    let knots_out: Vec<f64> = knots_in.iter().map(|&t| eval(t)).collect();
    CircleHomeomorphism::from_knots(knots_in, knots_out)
        .expect("normalized amplitudes keep the map monotone")
}
