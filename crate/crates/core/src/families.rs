//! Translations, atomic measures, convolution and moving averages.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `translate(F, theta)` produces the coefficients of `F(. + theta)`,
//!   i.e. `c(k) -> c(k) e^{ik theta}`.
//! * `measure_fourier` uses the transform `m(k) = sum_i w_i e^{-ik theta_i}`.
//! * `convolve(F, m)` multiplies `F(k)` by `\int e^{iks} dm(s) = m(-k)`, the
//!   orientation under which convolving with the unit mass at `theta` equals
//!   `translate(F, theta)` exactly.
//! * the moving average of half-width `delta` acts as the multiplier
//!   `sin(k delta) / (k delta)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

const PROBABILITY_TOL: f64 = 1e-12;

/// A finite atomic measure: positions in `[0, 2pi)` with real weights.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
    probability: bool,
}

impl DiscreteMeasure {
    /// A probability measure: nonnegative weights summing to one.
    pub fn probability(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|&(p, w)| !p.is_finite() || !w.is_finite()) {
            return Err(Error::NotProbability("non-finite atom".into()));
        }
        if let Some(&(_, w)) = atoms.iter().find(|&&(_, w)| w < 0.0) {
            return Err(Error::NotProbability(format!("negative weight {w}")));
        }
        let total: f64 = atoms.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::NotProbability(format!("weights sum to {total}")));
        }
        Ok(Self {
            atoms: reduce_positions(atoms),
            probability: true,
        })
    }

    /// A signed measure; the total-variation norm is `sum |w_i|`.
    pub fn signed(atoms: Vec<(f64, f64)>) -> Self {
        Self {
            atoms: reduce_positions(atoms),
            probability: false,
        }
    }

    /// The unit mass at `theta`.
    pub fn dirac(theta: f64) -> Self {
        Self::probability(vec![(theta, 1.0)]).expect("unit mass is a probability measure")
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w.abs()).sum()
    }

    /// `m(k) = sum_i w_i e^{-ik theta_i}`.
    pub fn fourier_at(&self, k: i64) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(p, w)| Complex64::from_polar(w, -(k as f64) * p))
            .sum()
    }
}

fn reduce_positions(atoms: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    use std::f64::consts::TAU;
    atoms
        .into_iter()
        .map(|(p, w)| (p - TAU * (p / TAU).floor(), w))
        .collect()
}

/// Transform of a measure on the band `|k| <= k_max`.
pub fn measure_fourier(m: &DiscreteMeasure, k_max: usize) -> FourierSeries {
    FourierSeries::new(
        (-(k_max as i64)..=k_max as i64)
            .map(|k| m.fourier_at(k))
            .collect(),
    )
}

/// Coefficients of `F(. + theta)`.
pub fn translate(c: &FourierSeries, theta: f64) -> FourierSeries {
    c.map(|k, v| v * Complex64::from_polar(1.0, k as f64 * theta))
}

/// Coefficients of the convolution of `F` with an atomic measure.
///
/// For a probability measure the multiplier has modulus at most one, so every
/// coefficient shrinks or stays put.
pub fn convolve(c: &FourierSeries, m: &DiscreteMeasure) -> FourierSeries {
    c.map(|k, v| v * m.fourier_at(-k))
}

/// Moving-average multiplier of half-width `delta`.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    delta: f64,
}

impl Mollifier {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= std::f64::consts::PI) {
            return Err(Error::InvalidHalfWidth(delta));
        }
        Ok(Self { delta })
    }

    pub fn half_width(&self) -> f64 {
        self.delta
    }

    /// `sin(k delta)/(k delta)`, with value one at `k = 0`.
    pub fn multiplier(&self, k: i64) -> f64 {
        sinc(k as f64 * self.delta)
    }
}

pub(crate) fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Coefficients of the moving average `(1/2 delta) \int_{-delta}^{delta} F(t + s) ds`.
pub fn mollify(c: &FourierSeries, m: &Mollifier) -> FourierSeries {
    c.map(|k, v| v * m.multiplier(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{analyze, grid_point, synthesize, GridFunction};
    use std::f64::consts::PI;

    #[test]
    fn probability_validation() {
        assert!(DiscreteMeasure::probability(vec![(0.0, 0.5), (1.0, 0.5)]).is_ok());
        assert!(matches!(
            DiscreteMeasure::probability(vec![(0.0, 0.7), (1.0, 0.7)]),
            Err(Error::NotProbability(_))
        ));
        assert!(matches!(
            DiscreteMeasure::probability(vec![(0.0, 1.5), (1.0, -0.5)]),
            Err(Error::NotProbability(_))
        ));
    }

    #[test]
    fn signed_measure_total_variation() {
        let m = DiscreteMeasure::signed(vec![(0.0, 2.0), (1.0, -3.0)]);
        assert_eq!(m.total_variation(), 5.0);
        assert!(!m.is_probability());
    }

    #[test]
    fn unit_mass_at_zero_has_flat_transform() {
        let m = DiscreteMeasure::dirac(0.0);
        let c = measure_fourier(&m, 5);
        for (_, v) in c.iter() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn unit_mass_transform_is_a_phase() {
        let theta = 1.234;
        let m = DiscreteMeasure::dirac(theta);
        for k in -4i64..=4 {
            let expect = Complex64::from_polar(1.0, -(k as f64) * theta);
            assert!((m.fourier_at(k) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn two_even_atoms_alternate() {
        let m = DiscreteMeasure::probability(vec![(0.0, 0.5), (PI, 0.5)]).unwrap();
        for k in -6i64..=6 {
            let expect = if k % 2 == 0 { 1.0 } else { 0.0 };
            assert!((m.fourier_at(k).re - expect).abs() < 1e-12);
            assert!(m.fourier_at(k).im.abs() < 1e-12);
        }
    }

    #[test]
    fn translate_by_zero_is_identity() {
        let c = FourierSeries::new(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-1.0, 1.0),
        ]);
        let t = translate(&c, 0.0);
        for (k, v) in t.iter() {
            assert_eq!(v, c.coeff(k));
        }
    }

    #[test]
    fn translate_preserves_moduli() {
        let c = FourierSeries::new(vec![
            Complex64::new(1.0, -2.0),
            Complex64::new(0.3, 0.4),
            Complex64::new(2.0, 1.0),
        ]);
        let t = translate(&c, 2.1);
        for (k, v) in t.iter() {
            assert!((v.norm() - c.coeff(k).norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn translate_harmonic_quarter_turn() {
        let c = FourierSeries::harmonic(1, Complex64::new(1.0, 0.0));
        let t = translate(&c, PI / 2.0);
        assert!((t.coeff(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    // convolving with the unit mass at theta IS translation by theta
    #[test]
    fn convolve_with_dirac_equals_translate() {
        let c = FourierSeries::new(vec![
            Complex64::new(0.2, 0.5),
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.3, 0.8),
        ]);
        let theta = 0.97;
        let via_measure = convolve(&c, &DiscreteMeasure::dirac(theta));
        let via_translate = translate(&c, theta);
        for (k, v) in via_measure.iter() {
            assert!((v - via_translate.coeff(k)).norm() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn convolve_with_dirac_at_zero_is_identity() {
        let c = FourierSeries::harmonic(3, Complex64::new(0.5, 0.5));
        let out = convolve(&c, &DiscreteMeasure::dirac(0.0));
        for (k, v) in out.iter() {
            assert!((v - c.coeff(k)).norm() < 1e-15);
        }
    }

    #[test]
    fn probability_convolution_contracts_every_coefficient() {
        let c = FourierSeries::new(
            (-8i64..=8)
                .map(|k| Complex64::new(1.0 / (1.0 + k.abs() as f64), 0.2 * k as f64))
                .collect(),
        );
        let m = DiscreteMeasure::probability(vec![(0.3, 0.25), (2.0, 0.5), (5.5, 0.25)]).unwrap();
        let out = convolve(&c, &m);
        for (k, v) in out.iter() {
            assert!(v.norm() <= c.coeff(k).norm() + 1e-15, "k = {k}");
        }
    }

    #[test]
    fn mollifier_rejects_bad_widths() {
        assert!(Mollifier::new(0.0).is_err());
        assert!(Mollifier::new(-1.0).is_err());
        assert!(Mollifier::new(PI + 0.1).is_err());
        assert!(Mollifier::new(PI).is_ok());
    }

    #[test]
    fn mollifier_multiplier_shape() {
        let m = Mollifier::new(0.5).unwrap();
        assert_eq!(m.multiplier(0), 1.0);
        for k in 1..40 {
            assert!(m.multiplier(k).abs() <= 1.0);
            assert!((m.multiplier(k) - m.multiplier(-k)).abs() < 1e-15);
        }
        // single harmonic picks up exactly sin(k delta)/(k delta)
        let c = FourierSeries::harmonic(7, Complex64::new(1.0, 0.0));
        let out = mollify(&c, &m);
        assert!((out.coeff(7).re - (3.5f64).sin() / 3.5).abs() < 1e-15);
    }

    #[test]
    fn tiny_width_leaves_low_band_nearly_unchanged() {
        let m = Mollifier::new(1e-4).unwrap();
        for k in 1i64..=32 {
            let rel = (1.0 - m.multiplier(k)).abs();
            // Taylor: 0 <= 1 - sinc(x) <= x^2/6
            let x = k as f64 * 1e-4;
            assert!(rel <= x * x / 6.0 + 1e-15, "k = {k}: {rel}");
        }
        assert!((1.0 - m.multiplier(32)).abs() <= 2e-6);
    }

    // the multiplier route against direct quadrature of the moving average
    #[test]
    fn mollify_matches_windowed_average_quadrature() {
        let n = 256;
        let f = GridFunction::from_fn(n, |t| {
            Complex64::new((3.0 * t).cos(), 0.5 * (5.0 * t).sin())
        })
        .unwrap();
        let c = analyze(&f);
        let delta = 0.3;
        let spectral = mollify(&c, &Mollifier::new(delta).unwrap());

        // composite Simpson over the window, evaluated through the series
        let quad_points = 512;
        let averaged: Vec<Complex64> = (0..n)
            .map(|j| {
                let t = grid_point(n, j);
                let h = 2.0 * delta / quad_points as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..=quad_points {
                    let w = if q == 0 || q == quad_points {
                        1.0
                    } else if q % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    acc += c.eval_at(t - delta + q as f64 * h) * w;
                }
                acc * h / 3.0 / (2.0 * delta)
            })
            .collect();
        let direct = analyze(&GridFunction::from_samples(averaged).unwrap());
        for (k, v) in spectral.iter() {
            assert!((v - direct.coeff(k)).norm() < 1e-8, "k = {k}");
        }
    }

    #[test]
    fn mollified_function_has_grid_bounded_variation() {
        // total variation of the averaged interpolant stays under
        // sup|F| * 2pi/delta (with a small grid cushion)
        let n = 512;
        let f = GridFunction::from_fn(n, |t| {
            Complex64::new((9.0 * t).cos() + 0.4 * (17.0 * t).sin(), (4.0 * t).cos())
        })
        .unwrap();
        let c = analyze(&f);
        for delta in [0.05, 0.2, 1.0] {
            let smoothed = synthesize(&mollify(&c, &Mollifier::new(delta).unwrap()), n).unwrap();
            let bound = f.sup_norm() * std::f64::consts::TAU / delta * 1.1;
            assert!(
                smoothed.total_variation() <= bound,
                "delta = {delta}: {} > {bound}",
                smoothed.total_variation()
            );
        }
    }

    #[test]
    fn translation_and_convolution_commute() {
        let c = FourierSeries::new(
            (-5i64..=5)
                .map(|k| Complex64::new(0.1 * k as f64, 1.0 / (1.0 + k.abs() as f64)))
                .collect(),
        );
        let m = DiscreteMeasure::probability(vec![(1.0, 0.3), (4.0, 0.7)]).unwrap();
        let theta = 2.7;
        let a = translate(&convolve(&c, &m), theta);
        let b = convolve(&translate(&c, theta), &m);
        for (k, v) in a.iter() {
            assert!((v - b.coeff(k)).norm() < 1e-12);
        }
    }

    mod properties {
        use super::*;
        use crate::sobolev::seminorm_fourier;
        use proptest::prelude::*;

        proptest! {
            // averaging against any probability measure can only shrink the
            // weighted seminorm
            #[test]
            fn probability_convolution_contracts_the_seminorm(
                positions in prop::collection::vec(0.0f64..std::f64::consts::TAU, 4),
                raw in prop::collection::vec(0.05f64..1.0, 4),
                res in prop::collection::vec(-1.0f64..1.0, 9),
                ims in prop::collection::vec(-1.0f64..1.0, 9),
            ) {
                let total: f64 = raw.iter().sum();
                let atoms: Vec<(f64, f64)> = positions
                    .iter()
                    .zip(&raw)
                    .map(|(&p, &w)| (p, w / total))
                    .collect();
                let lambda = DiscreteMeasure::probability(atoms).unwrap();
                let coeffs: Vec<Complex64> = res
                    .iter()
                    .zip(&ims)
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect();
                let c = FourierSeries::new(coeffs);
                let before = seminorm_fourier(&c).value;
                let after = seminorm_fourier(&convolve(&c, &lambda)).value;
                prop_assert!(after <= before + 1e-12);
            }

            // moduli survive translation exactly
            #[test]
            fn translation_preserves_coefficient_moduli(
                res in prop::collection::vec(-1.0f64..1.0, 7),
                ims in prop::collection::vec(-1.0f64..1.0, 7),
                theta in 0.0f64..std::f64::consts::TAU,
            ) {
                let coeffs: Vec<Complex64> = res
                    .iter()
                    .zip(&ims)
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect();
                let c = FourierSeries::new(coeffs);
                let t = translate(&c, theta);
                for (k, v) in t.iter() {
                    prop_assert!((v.norm() - c.coeff(k).norm()).abs() < 1e-14);
                }
            }
        }
    }
}
