//! Periodic grid functions and their Fourier analysis.
//!
//! Functions live on the uniform grid `t_j = 2*pi*j/N` with `N` a power of
//! two. Coefficients follow the convention `c(k) = (1/2pi) \int f(t) e^{-ikt} dt`,
//! so `analyze` divides the forward FFT by `N` and `synthesize` is the plain
//! unnormalized inverse transform. The truncation keeps `k = -N/2+1 .. N/2-1`
//! and drops the Nyquist bin.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// The `j`-th node of the size-`n` grid.
pub fn grid_point(n: usize, j: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}

/// Complex-valued samples on a uniform periodic grid.
///
/// Immutable after construction; the grid size is a power of two, at least 8,
/// and every sample is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(samples: Vec<Complex64>) -> Result<Self> {
        let n = samples.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGridSize(n));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteSamples);
        }
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::from_samples((0..n).map(|j| f(grid_point(n, j))).collect())
    }

    pub fn from_real_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(n, |t| Complex64::new(f(t), 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Pointwise modulus, as a real-valued grid function.
    pub fn modulus(&self) -> GridFunction {
        GridFunction {
            samples: self
                .samples
                .iter()
                .map(|z| Complex64::new(z.norm(), 0.0))
                .collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary magnitude over the grid.
    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Total variation of the sample polygon, with wraparound.
    pub fn total_variation(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| (self.samples[(j + 1) % n] - self.samples[j]).norm())
            .sum()
    }
}

/// Finite Fourier series with coefficients for `k = -K ..= K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    /// Builds a series from coefficients listed from `-K` up to `K`.
    ///
    /// The length must be odd; index `i` holds frequency `i - K`.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(
            coeffs.len() % 2 == 1,
            "coefficient vector must have odd length, got {}",
            coeffs.len()
        );
        Self { coeffs }
    }

    pub fn zero(max_freq: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); 2 * max_freq + 1])
    }

    /// The single harmonic `amplitude * e^{ikt}`.
    pub fn harmonic(k: i64, amplitude: Complex64) -> Self {
        let k_max = k.unsigned_abs() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
        coeffs[(k + k_max as i64) as usize] = amplitude;
        Self::new(coeffs)
    }

    pub fn max_freq(&self) -> usize {
        self.coeffs.len() / 2
    }

    /// Coefficient at frequency `k`; zero outside the stored band.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let k_max = self.max_freq() as i64;
        if k < -k_max || k > k_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + k_max) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Iterates `(k, c(k))` over the stored band.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k_max = self.max_freq() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - k_max, c))
    }

    /// Applies a frequency-dependent multiplier to every coefficient.
    pub fn map(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        Self::new(self.iter().map(|(k, c)| f(k, c)).collect())
    }

    /// Coefficients of the complex conjugate function: `c(k) -> conj(c(-k))`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.coeffs.iter().rev().map(|c| c.conj()).collect())
    }

    /// Shrinks the band to the largest frequency whose coefficient exceeds
    /// `rel_floor` times the peak modulus. Transform round trips leave
    /// rounding-level dust in every bin; dropping it keeps pointwise
    /// evaluation proportional to the actual content.
    pub fn truncated(&self, rel_floor: f64) -> Self {
        let cut = rel_floor * self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let k_top = self
            .iter()
            .filter(|(_, v)| v.norm() > cut)
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0) as i64;
        Self::new((-k_top..=k_top).map(|k| self.coeff(k)).collect())
    }

    /// Sum of squared coefficient moduli.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Index window of the coefficients that are not exactly zero.
    fn support(&self) -> Option<(usize, usize)> {
        let lo = self.coeffs.iter().position(|c| c.norm_sqr() != 0.0)?;
        let hi = self.coeffs.iter().rposition(|c| c.norm_sqr() != 0.0)?;
        Some((lo, hi))
    }

    /// Evaluates the trigonometric polynomial at an arbitrary point.
    pub fn eval_at(&self, t: f64) -> Complex64 {
        self.eval_windowed(t, self.support())
    }

    /// Evaluates at many points.
    pub fn eval_many(&self, points: &[f64]) -> Vec<Complex64> {
        let window = self.support();
        points.iter().map(|&t| self.eval_windowed(t, window)).collect()
    }

    /// Evaluation restricted to coefficients above `floor * max|c|`.
    ///
    /// Distorts the value by at most `len * floor * max|c|`; used by iterative
    /// solvers where the spectrum decays fast and full-band Horner is waste.
    pub fn eval_many_above(&self, floor: f64, points: &[f64]) -> Vec<Complex64> {
        let cut = floor * self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let lo = self.coeffs.iter().position(|c| c.norm() > cut);
        let hi = self.coeffs.iter().rposition(|c| c.norm() > cut);
        let window = match (lo, hi) {
            (Some(l), Some(h)) => Some((l, h)),
            _ => None,
        };
        points
            .iter()
            .map(|&t| self.eval_windowed(t, window))
            .collect()
    }

    fn eval_windowed(&self, t: f64, window: Option<(usize, usize)>) -> Complex64 {
        let (lo, hi) = match window {
            Some(w) => w,
            None => return Complex64::new(0.0, 0.0),
        };
        let k_min = lo as i64 - self.max_freq() as i64;
        let z = Complex64::from_polar(1.0, t);
        let mut acc = self.coeffs[hi];
        for i in (lo..hi).rev() {
            acc = acc * z + self.coeffs[i];
        }
        acc * Complex64::from_polar(1.0, k_min as f64 * t)
    }
}

/// Discrete Fourier analysis normalized to the `(1/2pi) \int` convention.
///
/// Returns coefficients for `k = -N/2+1 ..= N/2-1`; exact on band-limited
/// input, so `analyze` then `synthesize` is the identity there.
pub fn analyze(f: &GridFunction) -> FourierSeries {
    let n = f.len();
    let mut buf = f.samples().to_vec();
    plan_forward(n).process(&mut buf);
    let k_max = (n / 2 - 1) as i64;
    let scale = 1.0 / n as f64;
    FourierSeries::new(
        (-k_max..=k_max)
            .map(|k| buf[k.rem_euclid(n as i64) as usize] * scale)
            .collect(),
    )
}

/// Evaluates `sum_k c(k) e^{ik t_j}` on the size-`n` grid.
pub fn synthesize(c: &FourierSeries, n: usize) -> Result<GridFunction> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::InvalidGridSize(n));
    }
    let band = 2 * c.max_freq() + 1;
    if band > n {
        return Err(Error::BandExceedsGrid { band, grid: n });
    }
    GridFunction::from_samples(synthesize_any(c, n))
}

/// Synthesis onto a grid of arbitrary size (internal: quadrature nodes need
/// not be a power of two). The band must fit.
pub(crate) fn synthesize_any(c: &FourierSeries, n: usize) -> Vec<Complex64> {
    assert!(2 * c.max_freq() < n, "band does not fit the grid");
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in c.iter() {
        buf[k.rem_euclid(n as i64) as usize] = v;
    }
    plan_inverse(n).process(&mut buf);
    buf
}

/// Triangular coefficient damping of order `m`: `c(k) (1 - |k|/m)` for
/// `|k| <= m-1`, zero beyond.
pub fn fejer_sum(c: &FourierSeries, order: usize) -> FourierSeries {
    assert!(order >= 1, "order must be at least 1");
    let k_out = (order - 1).min(c.max_freq()) as i64;
    FourierSeries::new(
        (-k_out..=k_out)
            .map(|k| c.coeff(k) * (1.0 - k.unsigned_abs() as f64 / order as f64))
            .collect(),
    )
}
