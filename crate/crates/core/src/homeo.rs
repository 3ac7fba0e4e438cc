//! Orientation-preserving self-homeomorphisms of the circle.
//!
//! A map is stored as a strictly increasing piecewise-linear knot table
//! `(t_i, h(t_i))` with `t_i` in `[0, 2pi)` and the degree-one lift
//! `h(t + 2pi) = h(t) + 2pi` built into evaluation. Composition with grid
//! functions goes through trigonometric interpolation so that spectral
//! quantities computed afterwards keep their accuracy.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{analyze, grid_point, GridFunction};
use crate::sobolev::{seminorm_fourier, SeminormReport};

#[derive(Debug, Clone)]
pub struct CircleHomeomorphism {
    knots_in: Vec<f64>,
    knots_out: Vec<f64>,
}

impl CircleHomeomorphism {
    /// Builds a map from its knot table.
    ///
    /// Requires at least two knots, inputs strictly increasing within
    /// `[0, 2pi)`, outputs strictly increasing, and the wraparound segment
    /// (from the last knot back to the first plus a full turn) increasing as
    /// well.
    pub fn from_knots(knots_in: Vec<f64>, knots_out: Vec<f64>) -> Result<Self> {
        if knots_in.len() != knots_out.len() || knots_in.len() < 2 {
            return Err(Error::NotMonotone);
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&knots_in) || !finite(&knots_out) {
            return Err(Error::NotMonotone);
        }
        if knots_in[0] < 0.0 || *knots_in.last().unwrap() >= TAU {
            return Err(Error::NotMonotone);
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&knots_in) || !increasing(&knots_out) {
            return Err(Error::NotMonotone);
        }
        if knots_out[0] + TAU <= *knots_out.last().unwrap() {
            return Err(Error::NotMonotone);
        }
        Ok(Self { knots_in, knots_out })
    }

    pub fn identity() -> Self {
        Self::from_knots(vec![0.0, std::f64::consts::PI], vec![0.0, std::f64::consts::PI])
            .expect("identity knots are valid")
    }

    /// The rigid rotation `t -> t + gamma`.
    pub fn rotation(gamma: f64) -> Self {
        Self::identity().rotate(gamma)
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.knots_in.iter().copied().zip(self.knots_out.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.knots_in.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smallest output gap between consecutive knots, wraparound included.
    pub fn min_gap(&self) -> f64 {
        let m = self.knots_out.len();
        let wrap = self.knots_out[0] + TAU - self.knots_out[m - 1];
        self.knots_out
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(wrap, f64::min)
    }

    /// Evaluates the lift at an arbitrary real argument.
    pub fn eval(&self, t: f64) -> f64 {
        let turns = (t / TAU).floor();
        let u = t - TAU * turns;
        self.eval_principal(u) + TAU * turns
    }

    // u in [0, 2pi)
    fn eval_principal(&self, u: f64) -> f64 {
        let m = self.knots_in.len();
        // segment index: last knot <= u, or the wraparound segment when u
        // precedes the first knot
        if u < self.knots_in[0] {
            let (x0, y0) = (self.knots_in[m - 1] - TAU, self.knots_out[m - 1] - TAU);
            let (x1, y1) = (self.knots_in[0], self.knots_out[0]);
            return lerp(u, x0, y0, x1, y1);
        }
        let i = self.knots_in.partition_point(|&x| x <= u) - 1;
        if i + 1 == m {
            let (x0, y0) = (self.knots_in[m - 1], self.knots_out[m - 1]);
            let (x1, y1) = (self.knots_in[0] + TAU, self.knots_out[0] + TAU);
            lerp(u, x0, y0, x1, y1)
        } else {
            lerp(
                u,
                self.knots_in[i],
                self.knots_out[i],
                self.knots_in[i + 1],
                self.knots_out[i + 1],
            )
        }
    }

    pub fn eval_many(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&t| self.eval(t)).collect()
    }

    /// Post-rotation: every output shifted by `gamma`.
    pub fn rotate(&self, gamma: f64) -> Self {
        Self {
            knots_in: self.knots_in.clone(),
            knots_out: self.knots_out.iter().map(|y| y + gamma).collect(),
        }
    }

    /// The inverse map, with knot roles swapped and outputs renormalized into
    /// the principal window.
    pub fn invert(&self) -> Self {
        let m = self.knots_in.len();
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(m);
        for i in 0..m {
            let (reduced, turns) = reduce_angle(self.knots_out[i]);
            pairs.push((reduced, self.knots_in[i] - TAU * turns));
        }
        // outputs span less than a full turn, so reduction leaves at most two
        // increasing runs; rotate the run holding the smallest value to the
        // front
        let split = pairs
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        pairs.rotate_left(split);
        // angle reduction can fuse knots separated by less than its own
        // rounding noise; keep the first of any fused cluster
        let mut knots_in: Vec<f64> = Vec::with_capacity(m);
        let mut knots_out: Vec<f64> = Vec::with_capacity(m);
        for (y, x) in pairs {
            let keep = match (knots_in.last(), knots_out.last()) {
                (Some(&py), Some(&px)) => y > py && x > px,
                _ => true,
            };
            if keep {
                knots_in.push(y);
                knots_out.push(x);
            }
        }
        Self::from_knots(knots_in, knots_out).expect("inverse of a valid map is valid")
    }

    /// Exact piecewise-linear composition `self(inner(t))`.
    ///
    /// Breakpoints are the inner knots together with the inner preimages of
    /// the outer knots, so no kink is lost.
    pub fn compose_with(&self, inner: &Self) -> Self {
        let inner_inv = inner.invert();
        let mut breaks: Vec<f64> = inner.knots_in.clone();
        for &s in &self.knots_in {
            breaks.push(reduce_angle(inner_inv.eval(s)).0);
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        // near-degenerate segments can collapse under rounding; keep the
        // first knot of any tied cluster
        let mut knots_in: Vec<f64> = Vec::with_capacity(breaks.len());
        let mut knots_out: Vec<f64> = Vec::with_capacity(breaks.len());
        for &t in &breaks {
            let y = self.eval(inner.eval(t));
            let keep = match (knots_in.last(), knots_out.last()) {
                (Some(&pt), Some(&py)) => t > pt && y > py,
                _ => true,
            };
            if keep {
                knots_in.push(t);
                knots_out.push(y);
            }
        }
        // the wraparound segment must stay increasing as well
        while knots_out.len() > 2 && *knots_out.last().unwrap() >= knots_out[0] + TAU {
            knots_out.pop();
            knots_in.pop();
        }
        Self::from_knots(knots_in, knots_out).expect("composition of valid maps is valid")
    }
}

fn lerp(x: f64, x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

// Reduction into [0, 2pi) that survives rounding at the seam; returns the
// reduced angle and the whole turns removed.
fn reduce_angle(t: f64) -> (f64, f64) {
    let mut turns = (t / TAU).floor();
    let mut r = t - TAU * turns;
    if r < 0.0 {
        r += TAU;
        turns -= 1.0;
    }
    if r >= TAU {
        r -= TAU;
        turns += 1.0;
    }
    (r, turns)
}

/// Samples `f(h(t_j))`, evaluating `f` by trigonometric interpolation.
pub fn compose(f: &GridFunction, h: &CircleHomeomorphism) -> GridFunction {
    let n = f.len();
    // rounding dust in empty bins would force a full-band evaluation
    let c = analyze(f).truncated(1e-15);
    let points: Vec<f64> = (0..n).map(|j| h.eval(grid_point(n, j))).collect();
    GridFunction::from_samples(c.eval_many(&points))
        .expect("composition preserves grid size and finiteness")
}

/// Samples of `e^{ik h(t)}` on a grid of the given size.
pub fn exp_ik_h(h: &CircleHomeomorphism, k: i64, n: usize) -> Result<GridFunction> {
    GridFunction::from_fn(n, |t| Complex64::from_polar(1.0, k as f64 * h.eval(t)))
}

/// Spectral seminorm report of `e^{ikh}` together with the reference `|k|`.
///
/// For any homeomorphism the squared value is at least `|k|` in exact
/// arithmetic; on a finite grid the first component can fall short only by
/// the spectral tail lost to truncation.
pub fn exp_lower_bound_check(
    h: &CircleHomeomorphism,
    k: i64,
    n: usize,
) -> Result<(f64, f64)> {
    assert!(k != 0, "frequency must be nonzero");
    let report = exp_lower_bound_report(h, k, n)?;
    Ok((report.value * report.value, k.unsigned_abs() as f64))
}

/// Full partial-sum profile behind [`exp_lower_bound_check`].
pub fn exp_lower_bound_report(
    h: &CircleHomeomorphism,
    k: i64,
    n: usize,
) -> Result<SeminormReport> {
    let e = exp_ik_h(h, k, n)?;
    Ok(seminorm_fourier(&analyze(&e)))
}

/// Winding number of `e^{ih}` from the argument-increment sum over the grid.
pub fn winding_number(h: &CircleHomeomorphism, n: usize) -> f64 {
    let samples: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, h.eval(grid_point(n, j))))
        .collect();
    let total: f64 = (0..n)
        .map(|j| (samples[(j + 1) % n] / samples[j]).arg())
        .sum();
    total / TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_map() -> CircleHomeomorphism {
        // three-knot map with uneven slopes
        CircleHomeomorphism::from_knots(vec![0.0, 2.0, 4.5], vec![0.3, 2.9, 4.8]).unwrap()
    }

    #[test]
    fn rejects_non_monotone_knots() {
        assert!(matches!(
            CircleHomeomorphism::from_knots(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 2.0]),
            Err(Error::NotMonotone)
        ));
        assert!(matches!(
            CircleHomeomorphism::from_knots(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0]),
            Err(Error::NotMonotone)
        ));
        // outputs spanning a full turn leave no room for the wrap segment
        assert!(matches!(
            CircleHomeomorphism::from_knots(vec![0.0, 3.0], vec![0.0, TAU]),
            Err(Error::NotMonotone)
        ));
    }

    #[test]
    fn identity_fixes_grid_points() {
        let id = CircleHomeomorphism::identity();
        for j in 0..64 {
            let t = grid_point(64, j);
            assert!((id.eval(t) - t).abs() < 1e-15);
        }
    }

    #[test]
    fn lift_shifts_by_full_turns() {
        let h = sample_map();
        for &t in &[0.3, 1.9, 5.1] {
            assert!((h.eval(t + TAU) - (h.eval(t) + TAU)).abs() < 1e-12);
            assert!((h.eval(t - 2.0 * TAU) - (h.eval(t) - 2.0 * TAU)).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let f = GridFunction::from_fn(64, |t| {
            Complex64::new((3.0 * t).cos(), (2.0 * t).sin())
        })
        .unwrap();
        let g = compose(&f, &CircleHomeomorphism::identity());
        for (a, b) in g.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn compose_with_rotation_shifts_the_harmonic() {
        let theta = 0.77;
        let f = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, t)).unwrap();
        let g = compose(&f, &CircleHomeomorphism::rotation(theta));
        let phase = Complex64::from_polar(1.0, theta);
        for (j, v) in g.samples().iter().enumerate() {
            let expect = phase * Complex64::from_polar(1.0, grid_point(64, j));
            assert!((v - expect).norm() < 1e-12);
        }
    }

    // two-knot piecewise-linear map against a direct pointwise evaluation
    #[test]
    fn compose_matches_direct_evaluation_on_kinked_map() {
        let h = CircleHomeomorphism::from_knots(vec![0.0, PI], vec![0.0, PI / 2.0]).unwrap();
        let n = 512;
        let f = GridFunction::from_real_fn(n, |t| t.cos()).unwrap();
        let composed = compose(&f, &h);
        // direct formula for the same piecewise-linear map
        let direct = |t: f64| -> f64 {
            let ht = if t < PI {
                t * 0.5
            } else {
                PI / 2.0 + (t - PI) * 1.5
            };
            ht.cos()
        };
        for (j, v) in composed.samples().iter().enumerate() {
            let t = grid_point(n, j);
            assert!((v.re - direct(t)).abs() < 1e-10, "j = {j}");
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn rotate_by_zero_is_identical() {
        let h = sample_map();
        let r = h.rotate(0.0);
        for ((a, b), (c, d)) in h.knots().zip(r.knots()) {
            assert_eq!(a, c);
            assert_eq!(b, d);
        }
    }

    #[test]
    fn rotate_round_trip_cancels() {
        let h = sample_map();
        let r = h.rotate(1.3).rotate(-1.3);
        for ((_, b), (_, d)) in h.knots().zip(r.knots()) {
            assert!((b - d).abs() < 1e-15);
        }
    }

    #[test]
    fn rotated_identity_translates_functions() {
        let n = 64;
        let f = GridFunction::from_fn(n, |t| Complex64::from_polar(1.0, 2.0 * t)).unwrap();
        let h = CircleHomeomorphism::identity().rotate(PI);
        let g = compose(&f, &h);
        for (j, v) in g.samples().iter().enumerate() {
            let expect = Complex64::from_polar(1.0, 2.0 * (grid_point(n, j) + PI));
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn invert_identity_and_rotation() {
        let id = CircleHomeomorphism::identity();
        for &t in &[0.0, 1.0, 5.5] {
            assert!((id.invert().eval(t) - t).abs() < 1e-15);
        }
        let gamma = 0.9;
        let inv = CircleHomeomorphism::rotation(gamma).invert();
        for &t in &[0.2, 3.0, 6.0] {
            assert!((inv.eval(t) - (t - gamma)).abs() < 1e-12);
        }
    }

    #[test]
    fn invert_is_pointwise_inverse() {
        let h = sample_map();
        let inv = h.invert();
        for j in 0..257 {
            let t = TAU * j as f64 / 257.0;
            assert!((inv.eval(h.eval(t)) - t).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn composition_of_maps_is_exact_piecewise_linear() {
        let h1 = sample_map();
        let h2 = CircleHomeomorphism::from_knots(vec![0.5, 3.0, 5.0], vec![0.6, 3.4, 5.2]).unwrap();
        let comp = h1.compose_with(&h2);
        for j in 0..512 {
            let t = TAU * j as f64 / 512.0;
            assert!((comp.eval(t) - h1.eval(h2.eval(t))).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn winding_of_any_homeomorphism_is_one() {
        assert!((winding_number(&CircleHomeomorphism::identity(), 256) - 1.0).abs() < 1e-9);
        assert!((winding_number(&sample_map(), 1024) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exp_lower_bound_is_exact_for_identity_and_rotation() {
        for k in [1i64, 2, 7, -5] {
            let (sq, target) = exp_lower_bound_check(&CircleHomeomorphism::identity(), k, 256)
                .unwrap();
            assert!((sq - target).abs() < 1e-10, "k = {k}: {sq}");
        }
        let (sq, target) =
            exp_lower_bound_check(&CircleHomeomorphism::rotation(1.1), 1, 256).unwrap();
        assert!((sq - target).abs() < 1e-10);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn knot_map(in_raw: &[f64], out_raw: &[f64], offset: f64) -> CircleHomeomorphism {
            let build = |raw: &[f64]| -> Vec<f64> {
                let total: f64 = raw.iter().sum();
                let mut acc = 0.0;
                raw.iter()
                    .map(|&r| {
                        let knot = acc;
                        acc += r / total * TAU;
                        knot
                    })
                    .collect()
            };
            let knots_in = build(in_raw);
            let knots_out: Vec<f64> = build(out_raw).iter().map(|&y| y + offset).collect();
            CircleHomeomorphism::from_knots(knots_in, knots_out).unwrap()
        }

        proptest! {
            // any knot map winds exactly once
            #[test]
            fn winding_number_is_one(
                in_raw in prop::collection::vec(0.05f64..1.0, 12),
                out_raw in prop::collection::vec(0.05f64..1.0, 12),
                offset in -10.0f64..10.0,
            ) {
                let h = knot_map(&in_raw, &out_raw, offset);
                prop_assert!((winding_number(&h, 512) - 1.0).abs() < 1e-9);
            }

            // inversion undoes evaluation pointwise
            #[test]
            fn invert_is_a_two_sided_inverse(
                in_raw in prop::collection::vec(0.05f64..1.0, 8),
                out_raw in prop::collection::vec(0.05f64..1.0, 8),
                offset in -10.0f64..10.0,
                t in 0.0f64..TAU,
            ) {
                let h = knot_map(&in_raw, &out_raw, offset);
                let inv = h.invert();
                prop_assert!((inv.eval(h.eval(t)) - t).abs() < 1e-9);
                prop_assert!((h.eval(inv.eval(t)) - t).abs() < 1e-9);
            }
        }
    }
}
