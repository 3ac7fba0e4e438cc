//! Quantitative scans over translation and convolution families.
//!
//! The pieces here turn the abstract family arguments into finite tables:
//! lacunary witnesses with exactly unit seminorm summands, the mollification
//! scan `S(delta, N) = sum_{n<=N} |c_n|^2 (sin(n delta)/(n delta))^2 n` and
//! its small-width limit, the translation-average identity between a
//! theta-quadrature and a spectral sum, and the search for the spectral
//! window over which `e^{ikh}` accumulates weighted mass `|k|/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::sinc;
use crate::fourier::{analyze, grid_point, synthesize, FourierSeries, GridFunction};
use crate::homeo::{exp_ik_h, CircleHomeomorphism};

/// Lacunary series with coefficients `2^{-n/2}` at frequencies `2^n`.
///
/// Each weighted summand `|c(2^n)|^2 * 2^n` equals one exactly, so the
/// squared seminorm after `M` terms is exactly `M` while the function itself
/// stays Holder-1/2 smooth.
#[derive(Debug, Clone, Copy)]
pub struct LacunaryWitness {
    terms: usize,
}

impl LacunaryWitness {
    pub fn new(terms: usize) -> Self {
        assert!(terms >= 1, "witness needs at least one term");
        Self { terms }
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Highest frequency carrying a coefficient.
    pub fn max_freq(&self) -> usize {
        1 << (self.terms - 1)
    }

    pub fn series(&self) -> FourierSeries {
        let k_max = self.max_freq();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
        for n in 0..self.terms {
            coeffs[k_max + (1 << n)] = Complex64::new(2f64.powi(-(n as i32)).sqrt(), 0.0);
        }
        FourierSeries::new(coeffs)
    }

    pub fn grid(&self, n: usize) -> Result<GridFunction> {
        if 2 * self.max_freq() >= n {
            return Err(Error::BandExceedsGrid {
                band: 2 * self.max_freq() + 1,
                grid: n,
            });
        }
        synthesize(&self.series(), n)
    }
}

/// Samples of the `terms`-term lacunary witness on a size-`n` grid.
pub fn lacunary_witness(terms: usize, n: usize) -> Result<GridFunction> {
    LacunaryWitness::new(terms).grid(n)
}

/// Largest ratio `omega(f, delta) / sqrt(delta)` over dyadic `delta`.
///
/// The modulus of continuity is measured on the sample grid: for each lag the
/// largest sample difference, accumulated so that `omega` is nondecreasing,
/// read off at the dyadic lags `N/2, N/4, ..., 1`.
pub fn holder_half_ratio(f: &GridFunction) -> f64 {
    let n = f.len();
    let samples = f.samples();
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut modulus = vec![0.0f64; n / 2 + 1];
    for lag in 1..=n / 2 {
        let mut worst = modulus[lag - 1];
        for j in 0..n {
            let d = (samples[(j + lag) % n] - samples[j]).norm();
            if d > worst {
                worst = d;
            }
        }
        modulus[lag] = worst;
    }
    let mut ratio = 0.0f64;
    let mut lag = n / 2;
    while lag >= 1 {
        let delta = lag as f64 * step;
        ratio = ratio.max(modulus[lag] / delta.sqrt());
        lag /= 2;
    }
    ratio
}

/// The weighted mollification sum `S(delta, N)` for one width.
pub fn mollified_weighted_sum(c: &FourierSeries, delta: f64, cutoff: usize) -> f64 {
    assert!(
        delta > 0.0 && delta <= std::f64::consts::PI,
        "width {delta} outside (0, pi]"
    );
    let top = cutoff.min(c.max_freq()) as i64;
    (1..=top)
        .map(|n| {
            let m = sinc(n as f64 * delta);
            c.coeff(n).norm_sqr() * m * m * n as f64
        })
        .sum()
}

/// Table of `S(delta, N)` over a width grid, with the `delta -> 0` limit.
#[derive(Debug, Clone)]
pub struct MollificationScan {
    pub deltas: Vec<f64>,
    pub cutoff: usize,
    pub values: Vec<f64>,
    /// `sum_{n <= N} |c_n|^2 n`, the value the scan recovers as the width
    /// shrinks.
    pub zero_width_limit: f64,
}

pub fn mollification_scan(c: &FourierSeries, deltas: &[f64], cutoff: usize) -> MollificationScan {
    let values = deltas
        .iter()
        .map(|&d| mollified_weighted_sum(c, d, cutoff))
        .collect();
    let top = cutoff.min(c.max_freq()) as i64;
    let zero_width_limit = (1..=top)
        .map(|n| c.coeff(n).norm_sqr() * n as f64)
        .sum();
    MollificationScan {
        deltas: deltas.to_vec(),
        cutoff,
        values,
        zero_width_limit,
    }
}

// Single Fourier coefficient of a sample vector, normalized like `analyze`.
fn dft_coefficient(samples: &[Complex64], nu: i64) -> Complex64 {
    let n = samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &s) in samples.iter().enumerate() {
        acc += s * Complex64::from_polar(1.0, -(nu as f64) * grid_point(n, j));
    }
    acc / n as f64
}

/// Both sides of the translation-average identity at one frequency.
///
/// Left: the theta-average `(1/2pi) \int |(x_theta . phi)^(nu)|^2 d theta`
/// by uniform quadrature with `theta_nodes` nodes, the inner function built
/// pointwise from `x` evaluated at `phi(t) + theta`. Right: the spectral sum
/// `sum_k |x(k)|^2 |(e^{ik phi})^(nu)|^2`. The integrand is a trigonometric
/// polynomial in theta for band-limited `x`, so the quadrature is exact once
/// the node count clears twice the band.
pub fn translation_average_identity(
    x: &GridFunction,
    phi: impl Fn(f64) -> f64,
    nu: i64,
    theta_nodes: usize,
) -> (f64, f64) {
    assert!(theta_nodes >= 64, "need at least 64 quadrature nodes");
    let n = x.len();
    let cx = analyze(x).truncated(1e-14);
    let phi_points: Vec<f64> = (0..n).map(|j| phi(grid_point(n, j))).collect();

    // left side: pointwise evaluation, one low-frequency DFT bin per node
    let lhs = (0..theta_nodes)
        .map(|q| {
            let theta = grid_point(theta_nodes, q);
            let shifted: Vec<f64> = phi_points.iter().map(|&p| p + theta).collect();
            let samples = cx.eval_many(&shifted);
            dft_coefficient(&samples, nu).norm_sqr()
        })
        .sum::<f64>()
        / theta_nodes as f64;

    // right side: spectral weights of the exponentials e^{ik phi}
    let rhs = cx
        .iter()
        .filter(|(_, v)| v.norm_sqr() > 0.0)
        .map(|(k, v)| {
            let e: Vec<Complex64> = phi_points
                .iter()
                .map(|&p| Complex64::from_polar(1.0, k as f64 * p))
                .collect();
            v.norm_sqr() * dft_coefficient(&e, nu).norm_sqr()
        })
        .sum();

    (lhs, rhs)
}

/// Smallest window `m` with `sum_{|nu| <= m} |(e^{ikh})^(nu)|^2 |nu| >= |k|/2`.
///
/// Fails with `NotReachedAtTruncation` when the partial sums plateau below
/// the target inside the grid band, which signals a grid too coarse for the
/// requested frequency.
pub fn tail_mass_search(h: &CircleHomeomorphism, k: i64, grid: usize) -> Result<usize> {
    assert!(k != 0, "frequency must be nonzero");
    let c = analyze(&exp_ik_h(h, k, grid)?);
    let target = k.unsigned_abs() as f64 / 2.0;
    let mut acc = 0.0;
    for m in 1..=c.max_freq() as i64 {
        acc += (c.coeff(m).norm_sqr() + c.coeff(-m).norm_sqr()) * m as f64;
        if acc >= target {
            return Ok(m as usize);
        }
    }
    Err(Error::NotReachedAtTruncation { k, target })
}

/// `m(k)` for `k = 1..=n` together with the running maximum `M(n)`.
///
/// Opposite frequencies share the same window because `e^{-ikh}` is the
/// conjugate of `e^{ikh}`, so only positive `k` are listed.
pub fn tail_mass_table(
    h: &CircleHomeomorphism,
    n: i64,
    grid: usize,
) -> Result<(Vec<(i64, usize)>, usize)> {
    assert!(n >= 1);
    let mut rows = Vec::with_capacity(n as usize);
    let mut max = 0usize;
    for k in 1..=n {
        let m = tail_mass_search(h, k, grid)?;
        max = max.max(m);
        rows.push((k, m));
    }
    Ok((rows, max))
}

/// Both sides of the averaged tail-mass inequality.
///
/// Left: `(1/2pi) \int sum_{|nu| <= m_cap} |(F_theta . h)^(nu)|^2 |nu| d theta`
/// by uniform quadrature. Right: the same weighted mass redistributed through
/// the spectral identity and truncated to `|k| <= band`, which can only drop
/// nonnegative terms, so left >= right up to quadrature error.
pub fn averaged_tail_mass_inequality(
    f: &FourierSeries,
    h: &CircleHomeomorphism,
    band: i64,
    theta_nodes: usize,
    m_cap: usize,
    grid: usize,
) -> (f64, f64) {
    let f = f.truncated(1e-14);
    let points: Vec<f64> = (0..grid).map(|j| h.eval(grid_point(grid, j))).collect();
    let m_cap = m_cap.min(grid / 2 - 1);

    let weighted_mass = |c: &FourierSeries| -> f64 {
        (1..=m_cap as i64)
            .map(|nu| (c.coeff(nu).norm_sqr() + c.coeff(-nu).norm_sqr()) * nu as f64)
            .sum()
    };

    let lhs = (0..theta_nodes)
        .map(|q| {
            let theta = grid_point(theta_nodes, q);
            let shifted: Vec<f64> = points.iter().map(|&p| p + theta).collect();
            let samples = f.eval_many(&shifted);
            let c = analyze(&GridFunction::from_samples(samples).expect("finite samples"));
            weighted_mass(&c)
        })
        .sum::<f64>()
        / theta_nodes as f64;

    let rhs = f
        .iter()
        .filter(|&(k, v)| k.abs() <= band && v.norm_sqr() > 0.0)
        .map(|(k, v)| {
            let e = GridFunction::from_samples(
                points
                    .iter()
                    .map(|&p| Complex64::from_polar(1.0, k as f64 * p))
                    .collect(),
            )
            .expect("finite samples");
            v.norm_sqr() * weighted_mass(&analyze(&e))
        })
        .sum();

    (lhs, rhs)
}
