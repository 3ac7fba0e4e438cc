//! Half-order Sobolev seminorms on the circle.
//!
//! Two routes to the same smoothness scale: the spectral form
//! `(sum_k |c(k)|^2 |k|)^{1/2}` with its running partial sums, and the
//! double-integral form `(\int\int |f(x)-f(y)|^2 / |x-y|^2 dx dy)^{1/2}`
//! taken literally over the square `[0, 2pi]^2` with the non-periodic
//! distance. The two are equivalent up to constants which this module
//! reports empirically but never assumes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{analyze, synthesize_any, FourierSeries, GridFunction};
use crate::threads::block_sum;

/// Spectral seminorm value together with its truncation profile.
///
/// `partials[m-1]` is the weighted mass `sum_{|k| <= m} |c(k)|^2 |k|`, so the
/// sequence is nondecreasing and `value^2` equals the last entry.
#[derive(Debug, Clone)]
pub struct SeminormReport {
    pub value: f64,
    pub max_freq: usize,
    pub partials: Vec<f64>,
}

/// Weighted-`l2` seminorm of a coefficient vector, with partial sums.
pub fn seminorm_fourier(c: &FourierSeries) -> SeminormReport {
    let k_max = c.max_freq();
    let mut partials = Vec::with_capacity(k_max);
    let mut acc = 0.0;
    for m in 1..=k_max as i64 {
        acc += (c.coeff(m).norm_sqr() + c.coeff(-m).norm_sqr()) * m as f64;
        partials.push(acc);
    }
    SeminormReport {
        value: partials.last().copied().unwrap_or(0.0).sqrt(),
        max_freq: k_max,
        partials,
    }
}

/// Norm with the weight `|k| + 1`, which also controls the mean.
pub fn banach_norm(c: &FourierSeries) -> f64 {
    c.iter()
        .map(|(k, v)| v.norm_sqr() * (k.unsigned_abs() as f64 + 1.0))
        .sum::<f64>()
        .sqrt()
}

/// Growth of the partial sums per frequency octave, over `(hi/2, hi]`.
///
/// A flat profile has slope near zero; linearly divergent partial sums keep a
/// positive slope through every octave. `hi` must lie within the report band.
pub fn dyadic_slope(report: &SeminormReport, hi: usize) -> f64 {
    assert!(hi >= 2 && hi <= report.max_freq, "octave end {hi} out of range");
    let lo = hi / 2;
    let p = |m: usize| if m == 0 { 0.0 } else { report.partials[m - 1] };
    (p(hi) - p(lo)) / (hi as f64 / lo as f64).log2()
}

/// Midpoint values of the band-limited interpolant on `q` cells.
fn midpoint_values(f: &GridFunction, resolution: usize) -> Result<Vec<Complex64>> {
    if resolution < f.len() {
        return Err(Error::ResolutionTooLow {
            resolution,
            grid: f.len(),
        });
    }
    let c = analyze(f);
    // half-cell phase shift puts the synthesis nodes at cell midpoints
    let shifted = c.map(|k, v| v * Complex64::from_polar(1.0, k as f64 * PI / resolution as f64));
    Ok(synthesize_any(&shifted, resolution))
}

/// Squared double-integral form on the midpoint grid, diagonal cells omitted.
fn pair_energy(values: &[Complex64], q: usize) -> f64 {
    let h = 2.0 * PI / q as f64;
    let blocks = q.min(64);
    let rows_per_block = q.div_ceil(blocks);
    let total = block_sum(blocks, |b| {
        let lo = b * rows_per_block;
        let hi = ((b + 1) * rows_per_block).min(q);
        let mut acc = 0.0;
        for i in lo..hi {
            let vi = values[i];
            for (j, vj) in values.iter().enumerate().skip(i + 1) {
                let d = vi - vj;
                let dx = (j - i) as f64 * h;
                acc += d.norm_sqr() / (dx * dx);
            }
        }
        acc
    });
    // unordered pairs counted once above; restore both orderings and the
    // cell area
    2.0 * total * h * h
}

/// Midpoint quadrature of the double-integral seminorm on a `q x q` grid.
///
/// The distance `|x - y|` is the plain Euclidean one on `[0, 2pi]^2`; cells
/// on the diagonal are excluded, which converges since the integrand stays
/// bounded near the diagonal for Lipschitz integrands.
pub fn seminorm_double_integral(f: &GridFunction, resolution: usize) -> Result<f64> {
    let values = midpoint_values(f, resolution)?;
    Ok(pair_energy(&values, resolution).sqrt())
}

/// Double-integral seminorms of `|f|` and of `f`, in that order.
///
/// Both quadratures share one set of midpoint evaluations and the modulus is
/// taken pointwise there, so the contraction `first <= second` holds exactly,
/// term by term.
pub fn abs_contraction_check(f: &GridFunction, resolution: usize) -> Result<(f64, f64)> {
    let values = midpoint_values(f, resolution)?;
    let moduli: Vec<Complex64> = values
        .iter()
        .map(|z| Complex64::new(z.norm(), 0.0))
        .collect();
    Ok((
        pair_energy(&moduli, resolution).sqrt(),
        pair_energy(&values, resolution).sqrt(),
    ))
}
