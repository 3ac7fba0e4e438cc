//! Constructive change of variable through a conformal boundary map.
//!
//! A strictly positive radius profile `rho` spans the star-shaped curve
//! `gamma(t) = rho(t) e^{it}`. The boundary values of the conformal map of
//! the unit disc onto the interior of that curve are `g(t) = rho(h(t)) e^{ih(t)}`
//! for some circle homeomorphism `h`, and `log(g(t)/e^{it})` must be of
//! analytic type. Writing `u = log rho . h`, this pins `h` as the fixed
//! point of `h(t) = t + conj(u)(t)` with `conj` the spectral conjugation
//! operator — the classical boundary-correspondence integral equation, here
//! iterated with damped updates and optional moving-average warm-up stages
//! for rough profiles.
//!
//! The payoff: `sum_{n>=1} n |g(n)|^2 * pi` is the enclosed area, so `g` has
//! a finite weighted seminorm however rough `rho` is, and `rho . h = |g|`
//! inherits it through the modulus contraction.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{mollify, Mollifier};
use crate::fourier::{analyze, grid_point, synthesize, FourierSeries, GridFunction};
use crate::homeo::{compose, CircleHomeomorphism};
use crate::sobolev::{abs_contraction_check, seminorm_fourier, SeminormReport};

/// A star-shaped closed curve `rho(t) e^{it}` with `rho > 0` real.
#[derive(Debug, Clone)]
pub struct StarCurve {
    rho: GridFunction,
}

impl StarCurve {
    pub fn new(rho: GridFunction) -> Result<Self> {
        let scale = rho.sup_norm().max(1.0);
        if rho.max_imag() > 1e-12 * scale {
            return Err(Error::NotRealValued);
        }
        if rho.samples().iter().any(|z| z.re <= 0.0) {
            return Err(Error::NonPositiveRadius);
        }
        Ok(Self { rho })
    }

    pub fn radius(&self) -> &GridFunction {
        &self.rho
    }

    /// Curve sample `rho(t_j) e^{i t_j}`.
    pub fn point(&self, j: usize) -> Complex64 {
        let t = grid_point(self.rho.len(), j);
        Complex64::from_polar(self.rho.samples()[j].re, t)
    }

    /// Shoelace area of the sample polygon.
    pub fn polygon_area(&self) -> f64 {
        let n = self.rho.len();
        let twice: f64 = (0..n)
            .map(|j| {
                let a = self.point(j);
                let b = self.point((j + 1) % n);
                (a.conj() * b).im
            })
            .sum();
        twice.abs() / 2.0
    }
}

/// Shifts a real-valued function up so its minimum is at least one.
///
/// Returns the shifted function and the offset `c = max(0, 1 - min f)`; only
/// the mean coefficient changes, so every seminorm is preserved.
pub fn positivize(f: &GridFunction) -> Result<(GridFunction, f64)> {
    let scale = f.sup_norm().max(1.0);
    if f.max_imag() > 1e-12 * scale {
        return Err(Error::NotRealValued);
    }
    let min = f
        .samples()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let offset = (1.0 - min).max(0.0);
    let shifted = GridFunction::from_samples(
        f.samples()
            .iter()
            .map(|z| Complex64::new(z.re + offset, 0.0))
            .collect(),
    )?;
    Ok((shifted, offset))
}

/// Options for the boundary-correspondence iteration.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Sup-norm fixed-point residual at which the iteration stops.
    pub tol: f64,
    /// Iteration budget across all stages.
    pub max_iter: usize,
    /// Initial update damping; adapted downward when a step would break
    /// monotonicity or progress stalls.
    pub damping: f64,
    /// Moving-average half-width of the surface actually solved; `None`
    /// solves the raw profile. Rough profiles need a positive width.
    pub mollify: Option<f64>,
    /// Warm-up widths solved first (in order) to carry the iterate into the
    /// basin of the final stage.
    pub warmup: Vec<f64>,
    /// Amplitude ladder applied to the final surface before full strength:
    /// each entry `p` in `(0, 1)` runs a warm-up stage on the radius profile
    /// raised to the power `p`. Spiky profiles are reached much more reliably
    /// along this axis than along the width axis alone.
    pub power_ladder: Vec<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 2000,
            damping: 0.5,
            mollify: None,
            warmup: Vec::new(),
            power_ladder: Vec::new(),
        }
    }
}

/// Converged boundary correspondence of the disc map onto the curve interior.
#[derive(Debug, Clone)]
pub struct BoundaryCorrespondence {
    /// The boundary parameter map, as a knot table on the solver grid.
    pub h: CircleHomeomorphism,
    /// Coefficients of `g(t) = rho(h(t)) e^{ih(t)}` for the solved surface.
    pub g: FourierSeries,
    /// Negative-frequency energy fraction of `g`.
    pub analytic_residual: f64,
    /// Iterations spent across every stage.
    pub iterations: usize,
    /// Last fixed-point residual.
    pub final_update: f64,
    /// Width of the surface of record (`None` when the raw profile was solved).
    pub surface_width: Option<f64>,
}

// Spectral conjugation of real samples: multiplier -i*sgn(k), DC and Nyquist
// bins dropped.
fn conjugate_samples(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let f = GridFunction::from_samples(u.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .expect("solver grids are valid");
    let c = analyze(&f);
    let v = c.map(|k, z| match k.cmp(&0) {
        std::cmp::Ordering::Greater => z * Complex64::new(0.0, -1.0),
        std::cmp::Ordering::Less => z * Complex64::new(0.0, 1.0),
        std::cmp::Ordering::Equal => Complex64::new(0.0, 0.0),
    });
    crate::fourier::synthesize_any(&v, n).iter().map(|z| z.re).collect()
}

fn recentre(phi: &mut [f64], grid: &[f64]) {
    let mean: f64 =
        phi.iter().zip(grid).map(|(p, t)| p - t).sum::<f64>() / phi.len() as f64;
    for p in phi.iter_mut() {
        *p -= mean;
    }
}

// Projection onto strictly increasing parameterizations: knot gaps are
// clipped from below and renormalized so one turn of the parameter still
// covers one turn of the boundary. A no-op whenever the iterate is already
// monotone. Folding targets get flattened instead of freezing the iteration,
// which is what near-vanishing boundary derivatives demand.
fn project_monotone(phi: &mut [f64], grid: &[f64]) {
    let n = phi.len();
    let tau = std::f64::consts::TAU;
    // deep enough for heavily crowded correspondences, while keeping knot
    // gaps comfortably above the noise of angle reduction
    let floor = 1e-9 * tau / n as f64;
    let gap = |phi: &[f64], j: usize| {
        if j + 1 < n {
            phi[j + 1] - phi[j]
        } else {
            phi[0] + tau - phi[n - 1]
        }
    };
    if (0..n).all(|j| gap(phi, j) >= floor) {
        recentre(phi, grid);
        return;
    }
    let gaps: Vec<f64> = (0..n).map(|j| gap(phi, j).max(floor)).collect();
    let scale = tau / gaps.iter().sum::<f64>();
    for j in 1..n {
        phi[j] = phi[j - 1] + gaps[j - 1] * scale;
    }
    recentre(phi, grid);
}

// Periodic moving-point evaluation of the stage surface. The inner loop hits
// this once per grid node per iteration, so the trigonometric polynomial is
// tabulated on an eightfold-oversampled grid and read back through cubic
// interpolation; the table error (fourth order in the oversampled spacing)
// sits far below the solver tolerances. Boundary values of record are still
// produced by full trigonometric evaluation after convergence.
struct SurfaceTable {
    values: Vec<f64>,
    step: f64,
}

impl SurfaceTable {
    fn new(series: &FourierSeries, n: usize) -> Self {
        let fine = 8 * n;
        let values = crate::fourier::synthesize_any(series, fine)
            .iter()
            .map(|z| z.re)
            .collect();
        Self {
            values,
            step: std::f64::consts::TAU / fine as f64,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let m = self.values.len();
        let s = t / self.step;
        let base = s.floor();
        let f = s - base;
        let i = (base as i64).rem_euclid(m as i64) as usize;
        let at = |off: i64| self.values[(i as i64 + off).rem_euclid(m as i64) as usize];
        let (y0, y1, y2, y3) = (at(-1), at(0), at(1), at(2));
        // Catmull-Rom
        0.5 * (2.0 * y1
            + (y2 - y0) * f
            + (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3) * f * f
            + (3.0 * y1 - y0 - 3.0 * y2 + y3) * f * f * f)
    }
}

struct Stage<'a> {
    surface: SurfaceTable,
    tol: f64,
    phi: &'a mut Vec<f64>,
    /// Warm-up stages hand over at a residual plateau instead of failing;
    /// the stage of record must actually reach its tolerance.
    allow_plateau: bool,
}

// One damped, monotonicity-projected fixed-point stage.
//
// The iterate of smallest residual is kept as a snapshot; whenever no new
// best arrives within the stall window the snapshot is restored and the
// damping halves, so the stage walks itself down into the stable step range
// of its surface. Returns (iterations used, final residual, final damping)
// so a continuation can start the next stage at the step size this one
// found workable.
fn run_stage(
    stage: Stage<'_>,
    grid: &[f64],
    damping0: f64,
    budget: usize,
) -> Result<(usize, f64, f64)> {
    const STALL_WINDOW: usize = 150;
    const MIN_DAMPING: f64 = 1e-5;
    let n = grid.len();
    let mut damping = damping0;
    let mut best = f64::INFINITY;
    let mut best_iter = 0usize;
    let mut best_phi = stage.phi.clone();
    for iter in 1..=budget {
        let u: Vec<f64> = stage.phi.iter().map(|&p| stage.surface.eval(p)).collect();
        let v = conjugate_samples(&u);
        let update: Vec<f64> = (0..n).map(|j| grid[j] + v[j] - stage.phi[j]).collect();
        let sup = update.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !sup.is_finite() {
            return Err(Error::StarConditionViolated);
        }
        if sup < stage.tol {
            return Ok((iter, sup, damping));
        }
        if sup < best {
            best = sup;
            best_iter = iter;
            best_phi.copy_from_slice(stage.phi);
        } else if iter - best_iter >= STALL_WINDOW {
            stage.phi.copy_from_slice(&best_phi);
            if stage.allow_plateau {
                // residual has stopped improving; good enough for a warm start
                return Ok((iter, best, damping));
            }
            damping *= 0.5;
            best_iter = iter;
            if damping < MIN_DAMPING {
                return Err(Error::NoConvergence(iter, best));
            }
            // the update in hand belongs to the abandoned iterate
            continue;
        }
        for (p, du) in stage.phi.iter_mut().zip(&update) {
            *p += damping * du;
        }
        project_monotone(stage.phi, grid);
    }
    stage.phi.copy_from_slice(&best_phi);
    if stage.allow_plateau {
        return Ok((budget, best, damping));
    }
    Err(Error::NoConvergence(budget, best))
}

fn log_radius_series(rho: &GridFunction) -> Result<FourierSeries> {
    let logs: Vec<Complex64> = rho
        .samples()
        .iter()
        .map(|z| Complex64::new(z.re.ln(), 0.0))
        .collect();
    if logs.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::NonPositiveRadius);
    }
    Ok(analyze(&GridFunction::from_samples(logs)?))
}

fn mollified_radius(rho: &GridFunction, width: f64) -> Result<GridFunction> {
    let m = Mollifier::new(width)?;
    let smoothed = synthesize(&mollify(&analyze(rho), &m), rho.len())?;
    // a moving average of a positive function stays positive
    if smoothed.samples().iter().any(|z| z.re <= 0.0) {
        return Err(Error::NonPositiveRadius);
    }
    Ok(smoothed)
}

/// Solves for the boundary correspondence of the conformal disc map.
///
/// Normalization: the map fixes the origin and has positive real derivative
/// there, enforced by keeping `h - t` of zero mean; `g(1)` then comes out
/// real and positive up to the solver tolerance.
pub fn solve_correspondence(
    curve: &StarCurve,
    opts: &SolveOptions,
) -> Result<BoundaryCorrespondence> {
    let n = curve.radius().len();
    let grid: Vec<f64> = (0..n).map(|j| grid_point(n, j)).collect();
    let mut phi = grid.clone();
    let mut iterations = 0usize;

    let warmup_tol = opts.tol.max(1e-7);
    let mut damping = opts.damping;
    for &width in &opts.warmup {
        let surface = mollified_radius(curve.radius(), width)?;
        let log_rho = log_radius_series(&surface)?;
        let (used, _, found) = run_stage(
            Stage {
                surface: SurfaceTable::new(&log_rho, n),
                tol: warmup_tol,
                phi: &mut phi,
                allow_plateau: true,
            },
            &grid,
            damping,
            opts.max_iter.saturating_sub(iterations).max(1),
        )?;
        iterations += used;
        damping = found;
    }

    let surface = match opts.mollify {
        Some(width) => mollified_radius(curve.radius(), width)?,
        None => curve.radius().clone(),
    };
    let log_rho = log_radius_series(&surface)?;

    for &power in &opts.power_ladder {
        // the radius raised to a power scales the log-radius linearly
        let scaled = log_rho.map(|_, z| z * power);
        let (used, _, found) = run_stage(
            Stage {
                surface: SurfaceTable::new(&scaled, n),
                tol: warmup_tol,
                phi: &mut phi,
                allow_plateau: true,
            },
            &grid,
            damping,
            opts.max_iter.saturating_sub(iterations).max(1),
        )?;
        iterations += used;
        damping = found;
    }

    let (used, final_update, _) = run_stage(
        Stage {
            surface: SurfaceTable::new(&log_rho, n),
            tol: opts.tol,
            phi: &mut phi,
            allow_plateau: false,
        },
        &grid,
        damping,
        opts.max_iter.saturating_sub(iterations).max(1),
    )?;
    iterations += used;

    // boundary values of the solved surface at the converged parameterization
    let u: Vec<f64> = log_rho
        .eval_many_above(1e-15, &phi)
        .iter()
        .map(|z| z.re)
        .collect();
    let samples: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(u[j].exp(), phi[j]))
        .collect();
    let g = analyze(&GridFunction::from_samples(samples)?);
    let total = g.energy();
    let negative: f64 = g
        .iter()
        .filter(|&(k, _)| k < 0)
        .map(|(_, v)| v.norm_sqr())
        .sum();
    let analytic_residual = if total > 0.0 { negative / total } else { 0.0 };

    let h = CircleHomeomorphism::from_knots(grid, phi)?;
    Ok(BoundaryCorrespondence {
        h,
        g,
        analytic_residual,
        iterations,
        final_update,
        surface_width: opts.mollify,
    })
}

/// `(pi * sum_{n>=1} n |g(n)|^2, shoelace area of the curve polygon)`.
pub fn area_identity_check(bc: &BoundaryCorrespondence, curve: &StarCurve) -> (f64, f64) {
    let spectral: f64 = bc
        .g
        .iter()
        .filter(|&(k, _)| k >= 1)
        .map(|(k, v)| k as f64 * v.norm_sqr())
        .sum::<f64>()
        * std::f64::consts::PI;
    (spectral, curve.polygon_area())
}

/// Options for the staged improvement driver built on top of the
/// single-curve solver.
#[derive(Debug, Clone)]
pub struct CascadeOptions {
    /// Per-stage solver settings.
    pub stage: SolveOptions,
    /// Stage budget.
    pub max_stages: usize,
    /// Stop once the top-octave slope of the composed profile falls to this
    /// fraction of the input slope.
    pub slope_goal: f64,
    /// Each stage mollifies its profile just enough to keep the logarithmic
    /// derivative under this cap, which keeps the stage solver in its
    /// reliable range.
    pub eps_cap: f64,
    /// Smallest stage width considered.
    pub min_width: f64,
    /// Width the first stage starts shrinking from.
    pub initial_width: f64,
}

impl Default for CascadeOptions {
    fn default() -> Self {
        Self {
            stage: SolveOptions {
                tol: 1e-8,
                max_iter: 8000,
                damping: 0.4,
                ..SolveOptions::default()
            },
            max_stages: 16,
            slope_goal: 0.05,
            eps_cap: 3.5,
            min_width: 5e-3,
            initial_width: 0.5,
        }
    }
}

/// One accepted cascade stage.
#[derive(Debug, Clone)]
pub struct CascadeStage {
    /// Moving-average width of the stage surface (`None` for a raw solve).
    pub width: Option<f64>,
    pub iterations: usize,
    pub analytic_residual: f64,
    /// Top-octave slope of the composed profile after this stage.
    pub octave_slope: f64,
}

/// Composed change of variable produced by the cascade.
#[derive(Debug, Clone)]
pub struct CascadeResult {
    /// Composition of every accepted stage correspondence, best prefix by
    /// octave slope.
    pub h: CircleHomeomorphism,
    /// Correspondence of the last stage inside the best prefix; its `g` is
    /// the boundary series of record.
    pub correspondence: BoundaryCorrespondence,
    /// The surface that correspondence solved (the stage profile after its
    /// moving average).
    pub surface: StarCurve,
    pub stages: Vec<CascadeStage>,
    pub slope_before: f64,
    pub slope_after: f64,
    /// Offset applied to make the input positive.
    pub shift: f64,
}

// sup |(log rho_w)'| on a dense grid; `width` of `None` reads the raw profile.
fn log_derivative_sup(profile: &GridFunction, width: Option<f64>) -> Result<f64> {
    let c = analyze(profile);
    let smooth = match width {
        Some(w) => mollify(&c, &Mollifier::new(w)?),
        None => c,
    };
    let fine = 8 * profile.len();
    let values = crate::fourier::synthesize_any(&smooth, fine);
    let deriv =
        crate::fourier::synthesize_any(&smooth.map(|k, z| z * Complex64::new(0.0, k as f64)), fine);
    if values.iter().any(|z| z.re <= 0.0) {
        return Err(Error::NonPositiveRadius);
    }
    Ok(values
        .iter()
        .zip(&deriv)
        .map(|(v, d)| (d.re / v.re).abs())
        .fold(0.0, f64::max))
}

// largest frequency carrying visible coefficient mass
fn effective_band_top(c: &FourierSeries) -> usize {
    let peak = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
    (1..=c.max_freq() as i64)
        .filter(|&k| c.coeff(k).norm() > 1e-12 * peak || c.coeff(-k).norm() > 1e-12 * peak)
        .max()
        .unwrap_or(0) as usize
}

fn octave_slope_of(profile: &GridFunction, band_top: usize) -> f64 {
    if band_top < 2 {
        return 0.0;
    }
    let report = seminorm_fourier(&analyze(profile));
    crate::sobolev::dyadic_slope(&report, band_top)
}

/// Flattens the seminorm profile of a rough function by composing
/// correspondences of progressively finer mollified curves.
///
/// A single conformal solve handles smooth profiles but stalls on strongly
/// oscillating ones. Composing instead ratchets: every stage's change of
/// variable slows the parameter down across the wild regions of its curve,
/// so the pulled-back profile that the next stage sees is tamer, and the
/// stage widths can shrink. The driver keeps the best prefix of stages as
/// measured by the top-octave slope of the composed profile and stops once
/// the requested contrast is reached.
pub fn improvement_cascade(f: &GridFunction, opts: &CascadeOptions) -> Result<CascadeResult> {
    let (f_plus, shift) = positivize(f)?;
    let band_top = effective_band_top(&analyze(&f_plus));
    let slope_before = octave_slope_of(&f_plus, band_top);
    let goal = opts.slope_goal * slope_before;

    let mut stages: Vec<CascadeStage> = Vec::new();
    let mut h_total: Option<CircleHomeomorphism> = None;
    let mut current = f_plus.clone();
    let mut width = opts.initial_width;
    // failed stages raise this floor so the width search cannot walk back
    // into a regime the stage solver already rejected
    let mut width_floor = opts.min_width;
    type Best = (CircleHomeomorphism, BoundaryCorrespondence, StarCurve, f64, usize);
    let mut best: Option<Best> = None;
    let mut first_error: Option<Error> = None;

    for _ in 0..opts.max_stages {
        // a profile that is already tame gets one exact solve and we are done
        let raw_eps = log_derivative_sup(&current, None)?;
        let stage_width = if raw_eps <= opts.eps_cap && width_floor <= opts.min_width {
            None
        } else {
            let mut w = width.min(opts.initial_width).max(width_floor);
            while w * 0.6 >= width_floor
                && log_derivative_sup(&current, Some(w * 0.6))? <= opts.eps_cap
            {
                w *= 0.6;
            }
            Some(w)
        };
        let stage_opts = SolveOptions {
            mollify: stage_width,
            ..opts.stage.clone()
        };
        let curve = StarCurve::new(current.clone())?;
        let bc = match solve_correspondence(&curve, &stage_opts) {
            Ok(bc) => bc,
            Err(e) => {
                // widen and try again with the next stage slot
                first_error.get_or_insert(e);
                width_floor = (stage_width.unwrap_or(width_floor) * 1.5).min(1.0);
                width = width.max(width_floor);
                continue;
            }
        };
        let surface = StarCurve::new(match stage_width {
            Some(w) => mollified_radius(curve.radius(), w)?,
            None => curve.radius().clone(),
        })?;
        let h_new = match &h_total {
            None => bc.h.clone(),
            Some(h) => h.compose_with(&bc.h),
        };
        // recompose from the original profile so stage errors do not stack
        let composed = compose(&f_plus, &h_new);
        current = GridFunction::from_samples(
            composed
                .samples()
                .iter()
                .map(|z| Complex64::new(z.re, 0.0))
                .collect(),
        )?;
        let slope = octave_slope_of(&current, band_top);
        stages.push(CascadeStage {
            width: stage_width,
            iterations: bc.iterations,
            analytic_residual: bc.analytic_residual,
            octave_slope: slope,
        });
        let better = best
            .as_ref()
            .map(|&(_, _, _, s, _)| slope < s)
            .unwrap_or(true);
        if better {
            best = Some((h_new.clone(), bc, surface, slope, stages.len()));
        }
        h_total = Some(h_new);
        if let Some(w) = stage_width {
            width = w;
        }
        if slope <= goal || stage_width.is_none() {
            break;
        }
    }

    match best {
        Some((h, correspondence, surface, slope_after, kept)) => {
            stages.truncate(kept);
            Ok(CascadeResult {
                h,
                correspondence,
                surface,
                stages,
                slope_before,
                slope_after,
                shift,
            })
        }
        None => Err(first_error.unwrap_or(Error::NoConvergence(0, f64::INFINITY))),
    }
}

/// How the change of variable reshapes the seminorm profile of `f`.
#[derive(Debug, Clone)]
pub struct ImprovementReport {
    /// Offset used to make the profile positive.
    pub shift: f64,
    /// Sup over the grid of `|f+(h(t)) - |g(t)||`.
    pub max_pointwise_diff: f64,
    /// Spectral seminorm profile of the shifted input.
    pub before: SeminormReport,
    /// Spectral seminorm profile of the composed function `f+ . h`.
    pub after: SeminormReport,
    /// Double-integral seminorms `(of |g|, of g)`; the first never exceeds
    /// the second.
    pub modulus_pair: (f64, f64),
    /// Partial-sum growth per octave at the top of the input band, before
    /// and after composition.
    pub slope_before: f64,
    pub slope_after: f64,
}

/// Composes the (positivized) input with the solved change of variable and
/// reports the seminorm profiles next to the boundary-modulus identity.
pub fn verify_improvement(
    f: &GridFunction,
    bc: &BoundaryCorrespondence,
) -> Result<ImprovementReport> {
    let n = f.len();
    let (f_plus, shift) = positivize(f)?;
    let composed = compose(&f_plus, &bc.h);
    let g_grid = synthesize(&bc.g, n)?;

    let max_pointwise_diff = composed
        .samples()
        .iter()
        .zip(g_grid.samples())
        .map(|(a, b)| (a - Complex64::new(b.norm(), 0.0)).norm())
        .fold(0.0, f64::max);

    let before = seminorm_fourier(&analyze(&f_plus));
    let after = seminorm_fourier(&analyze(&composed));

    let band_top = effective_band_top(&analyze(&f_plus));

    let (slope_before, slope_after) = if band_top >= 2 {
        (
            crate::sobolev::dyadic_slope(&before, band_top),
            crate::sobolev::dyadic_slope(&after, band_top),
        )
    } else {
        (0.0, 0.0)
    };

    let modulus_pair = abs_contraction_check(&g_grid, n)?;

    Ok(ImprovementReport {
        shift,
        max_pointwise_diff,
        before,
        after,
        modulus_pair,
        slope_before,
        slope_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn curve_from(n: usize, f: impl Fn(f64) -> f64) -> StarCurve {
        StarCurve::new(GridFunction::from_real_fn(n, f).unwrap()).unwrap()
    }

    #[test]
    fn star_curve_rejects_bad_profiles() {
        let complex = GridFunction::from_fn(16, |t| Complex64::new(2.0, t.sin())).unwrap();
        assert!(matches!(StarCurve::new(complex), Err(Error::NotRealValued)));
        let vanishing = GridFunction::from_real_fn(16, |t| t.cos()).unwrap();
        assert!(matches!(StarCurve::new(vanishing), Err(Error::NonPositiveRadius)));
    }

    #[test]
    fn positivize_leaves_positive_profiles_alone() {
        let f = GridFunction::from_real_fn(32, |t| 2.0 + t.cos()).unwrap();
        let (g, offset) = positivize(&f).unwrap();
        assert_eq!(offset, 0.0);
        assert_eq!(g.samples(), f.samples());
    }

    #[test]
    fn positivize_shifts_cosine_by_two() {
        let f = GridFunction::from_real_fn(64, |t| t.cos()).unwrap();
        let (g, offset) = positivize(&f).unwrap();
        assert!((offset - 2.0).abs() < 1e-12);
        let min = g.samples().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        assert!((min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn positivize_preserves_the_seminorm() {
        let f = GridFunction::from_real_fn(64, |t| (3.0 * t).sin() - 0.7).unwrap();
        let (g, _) = positivize(&f).unwrap();
        let a = seminorm_fourier(&analyze(&f)).value;
        let b = seminorm_fourier(&analyze(&g)).value;
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn positivize_rejects_complex_input() {
        let f = GridFunction::from_fn(16, |t| Complex64::new(0.0, t.sin())).unwrap();
        assert!(matches!(positivize(&f), Err(Error::NotRealValued)));
    }

    #[test]
    fn constant_radius_maps_through_scaling() {
        let r = 1.7;
        let curve = curve_from(1024, |_| r);
        let bc = solve_correspondence(&curve, &SolveOptions::default()).unwrap();
        // h is the identity and g has the single coefficient r at k = 1
        for (t, ht) in bc.h.knots() {
            assert!((ht - t).abs() < 1e-12);
        }
        assert!((bc.g.coeff(1) - Complex64::new(r, 0.0)).norm() < 1e-12);
        let rest: f64 = bc
            .g
            .iter()
            .filter(|&(k, _)| k != 1)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        assert!(rest < 1e-20);
        let (spectral, polygon) = area_identity_check(&bc, &curve);
        assert!((spectral - PI * r * r).abs() < 1e-10);
        assert!((polygon - PI * r * r).abs() / (PI * r * r) < 1e-4);
    }

    #[test]
    fn eccentric_profile_converges_with_small_residual() {
        let curve = curve_from(1024, |t| 2.0 + t.cos());
        let bc = solve_correspondence(&curve, &SolveOptions::default()).unwrap();
        assert!(bc.analytic_residual <= 1e-8, "residual {}", bc.analytic_residual);
        assert!(bc.h.min_gap() > 0.0);
        // gauge: leading coefficient real and positive
        assert!(bc.g.coeff(1).re > 0.0);
        assert!(bc.g.coeff(1).im.abs() < 1e-8);
    }

    #[test]
    fn exponential_cosine_profile_converges_quickly() {
        let curve = curve_from(2048, |t| (0.3 * t.cos()).exp());
        let bc = solve_correspondence(&curve, &SolveOptions::default()).unwrap();
        assert!(bc.iterations < 200, "took {} iterations", bc.iterations);
        assert!(bc.analytic_residual <= 1e-10);
    }

    #[test]
    fn identity_improvement_for_constant_input() {
        let f = GridFunction::from_real_fn(256, |_| 1.0).unwrap();
        let curve = StarCurve::new(positivize(&f).unwrap().0).unwrap();
        let bc = solve_correspondence(&curve, &SolveOptions::default()).unwrap();
        let report = verify_improvement(&f, &bc).unwrap();
        assert!(report.max_pointwise_diff < 1e-12);
        assert!(report.after.value < 1e-12);
    }

    #[test]
    fn staged_options_land_on_the_same_correspondence() {
        let curve = curve_from(512, |t| 2.0 + t.cos());
        let direct = solve_correspondence(&curve, &SolveOptions::default()).unwrap();
        let staged = solve_correspondence(
            &curve,
            &SolveOptions {
                warmup: vec![0.5, 0.1],
                power_ladder: vec![0.5],
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let worst = direct
            .h
            .knots()
            .zip(staged.h.knots())
            .map(|((_, a), (_, b))| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "staged and direct differ by {worst:.3e}");
    }

    #[test]
    fn cascade_degenerates_to_one_exact_stage_on_smooth_input() {
        let f = GridFunction::from_real_fn(512, |t| t.cos()).unwrap();
        let result = improvement_cascade(&f, &CascadeOptions::default()).unwrap();
        assert_eq!(result.stages.len(), 1);
        assert!(result.stages[0].width.is_none());
        assert!(result.correspondence.analytic_residual < 1e-10);
        assert!((result.shift - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cascade_flattens_a_rough_profile() {
        use crate::experiments::lacunary_witness;
        let n = 1024;
        let w = lacunary_witness(6, n).unwrap();
        let f = GridFunction::from_samples(
            w.samples()
                .iter()
                .map(|z| Complex64::new(z.re, 0.0))
                .collect(),
        )
        .unwrap();
        let result = improvement_cascade(&f, &CascadeOptions::default()).unwrap();
        assert!(result.slope_before > 0.4, "before {}", result.slope_before);
        assert!(
            result.slope_after < 0.1 * result.slope_before,
            "slope {} -> {}",
            result.slope_before,
            result.slope_after
        );
        assert!(result.h.min_gap() > 0.0);
    }

    #[test]
    fn cosine_improvement_respects_the_area_bound() {
        let n = 1024;
        let f = GridFunction::from_real_fn(n, |t| t.cos()).unwrap();
        let (f_plus, _) = positivize(&f).unwrap();
        let curve = StarCurve::new(f_plus).unwrap();
        let bc = solve_correspondence(&curve, &SolveOptions::default()).unwrap();
        let report = verify_improvement(&f, &bc).unwrap();
        // composed seminorm squared is dominated by the curve area over pi
        let bound = seminorm_fourier(&bc.g).value.powi(2);
        let after_sq = report.after.value.powi(2);
        assert!(
            after_sq <= bound + 1e-6,
            "composed {after_sq} vs boundary mass {bound}"
        );
        assert!((bound - 4.5).abs() < 1e-3, "area/pi should be 4.5, got {bound}");
        assert!(report.max_pointwise_diff < 1e-10);
        // modulus contraction on the boundary values
        assert!(report.modulus_pair.0 <= report.modulus_pair.1 + 1e-12);
    }
}
