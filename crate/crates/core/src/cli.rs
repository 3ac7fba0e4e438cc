//! Command-line front end.
//!
//! One subcommand per pipeline: `seminorm`, `verify-lemmas`, `scan-mollify`,
//! `scan-translations`, `tail-mass`, `witness-lacunary`, `bohrpal`. Outputs
//! are UTF-8 CSV or JSON with a fixed field order and twelve-significant-digit
//! floats, so a run is byte-reproducible given the same flags and seed.
//!
//! Exit codes: 0 success, 1 computation failure (including audits that
//! exceed their tolerances), 2 invalid configuration.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bohr_pal::{
    area_identity_check, improvement_cascade, positivize, solve_correspondence,
    verify_improvement, CascadeOptions, SolveOptions, StarCurve,
};
use crate::builtins::{
    cos_plus_2, exp_cos, lacunary, random_homeomorphism, random_trig, single_harmonic, SplitMix64,
};
use crate::error::Error;
use crate::experiments::{
    holder_half_ratio, translation_average_identity, mollification_scan, mollified_weighted_sum,
    tail_mass_table, averaged_tail_mass_inequality,
};
use crate::families::{convolve, measure_fourier, mollify, translate, DiscreteMeasure, Mollifier};
use crate::fourier::{analyze, fejer_sum, grid_point, synthesize, FourierSeries, GridFunction};
use crate::homeo::{compose, exp_lower_bound_check, CircleHomeomorphism};
use crate::io::{
    format_float, read_coefficients, read_grid_function, read_homeomorphism, read_measure,
    write_coefficients, write_grid_function, write_homeomorphism,
};
use crate::sobolev::{
    abs_contraction_check, banach_norm, seminorm_double_integral, seminorm_fourier,
};
use crate::stieltjes::{
    invariance_check, pairing, pairing_bound_check, pairing_spectral, BVFunction,
};

#[derive(Parser, Debug)]
#[command(name = "circle-sobolev", version, about = "Seminorms, pairings and changes of variable on the circle")]
pub struct Cli {
    /// Seed for the run's single PRNG stream (SplitMix64).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral seminorm report as JSON {value, K, partials}
    Seminorm(SeminormArgs),
    /// Seeded residual audits of the pairing, translation-average and
    /// lower-bound identities; exits nonzero if any residual is out of
    /// tolerance
    VerifyLemmas(VerifyLemmasArgs),
    /// CSV table of the weighted moving-average sum over a width grid
    ScanMollify(ScanMollifyArgs),
    /// CSV table of weighted spectral mass of translates composed with a
    /// change of variable
    ScanTranslations(ScanTranslationsArgs),
    /// CSV table of the smallest spectral window holding half the frequency
    TailMass(TailMassArgs),
    /// Lacunary witness report as JSON
    WitnessLacunary(WitnessLacunaryArgs),
    /// Conformal change of variable: homeomorphism knots plus a JSON report
    Bohrpal(BohrpalArgs),
}

/// Where the working function comes from: a builtin, a coefficient file, or
/// a sampled grid file.
#[derive(Args, Debug)]
pub struct SourceArgs {
    /// One of: lacunary, single-harmonic, cos-plus-2, exp-cos, random-trig
    #[arg(long)]
    pub builtin: Option<String>,
    /// Coefficient CSV (columns k,re,im)
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Grid-function CSV (N=<n> line, then j,re,im)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Terms for the lacunary builtin
    #[arg(long, default_value_t = 8)]
    pub terms: usize,
    /// Frequency for the single-harmonic builtin
    #[arg(long, default_value_t = 1)]
    pub harmonic: i64,
    /// Amplitude for the exp-cos builtin
    #[arg(long, default_value_t = 0.3)]
    pub exp_a: f64,
    /// Degree for the random-trig builtin
    #[arg(long, default_value_t = 16)]
    pub degree: usize,
    /// Grid size for sampled builtins, synthesis and analysis
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct HomeoArgs {
    /// Knot CSV of the change of variable (columns t,h)
    #[arg(long)]
    pub homeo: Option<PathBuf>,
    /// Draw a smooth random homeomorphism from the run seed instead
    #[arg(long, default_value_t = false)]
    pub random_homeo: bool,
    /// Harmonics in the random homeomorphism
    #[arg(long, default_value_t = 4)]
    pub homeo_harmonics: usize,
    /// Knots sampled into the random homeomorphism
    #[arg(long, default_value_t = 1024)]
    pub homeo_knots: usize,
}

#[derive(Args, Debug)]
pub struct SeminormArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Apply triangular coefficient damping of this order first
    #[arg(long)]
    pub fejer: Option<usize>,
    /// Also report the double-integral seminorm at this quadrature resolution
    #[arg(long)]
    pub double_integral: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyLemmasArgs {
    /// Random pairs in the pairing audit
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
    /// Grid size for the audits
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    /// Polynomial degree in the pairing audit
    #[arg(long, default_value_t = 32)]
    pub degree: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanMollifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Largest width in the scan
    #[arg(long, default_value_t = 0.1)]
    pub delta_max: f64,
    /// Smallest width in the scan
    #[arg(long, default_value_t = 1e-5)]
    pub delta_min: f64,
    /// Number of log-spaced widths, descending
    #[arg(long, default_value_t = 17)]
    pub delta_count: usize,
    /// Frequency cutoff of the weighted sum
    #[arg(long, default_value_t = 256)]
    pub cutoff: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanTranslationsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub homeo: HomeoArgs,
    /// Convolve with this measure (CSV theta,w) before scanning
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Translation quadrature nodes
    #[arg(long, default_value_t = 64)]
    pub theta_count: usize,
    /// Spectral window cap of the reported mass
    #[arg(long, default_value_t = 64)]
    pub m_cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TailMassArgs {
    #[command(flatten)]
    pub homeo: HomeoArgs,
    /// Largest frequency scanned
    #[arg(long, default_value_t = 16)]
    pub k_max: i64,
    /// Grid size for the spectral analysis
    #[arg(long, default_value_t = 8192)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WitnessLacunaryArgs {
    /// Lacunary terms
    #[arg(long, default_value_t = 8)]
    pub terms: usize,
    /// Grid size for the sampled witness
    #[arg(long, default_value_t = 1024)]
    pub n: usize,
    /// Also dump the witness coefficients to this CSV
    #[arg(long)]
    pub coeffs_out: Option<PathBuf>,
    /// Also dump the sampled witness to this grid CSV
    #[arg(long)]
    pub grid_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BohrpalArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Fixed-point residual at which the solver stops
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Iteration budget across all stages
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    /// Initial update damping
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    /// Moving-average half-width of the surface solved (raw profile when
    /// omitted; rough profiles need one)
    #[arg(long)]
    pub mollify: Option<f64>,
    /// Comma-separated warm-up widths solved first
    #[arg(long)]
    pub warmup: Option<String>,
    /// Comma-separated amplitude ladder in (0,1) for spiky profiles
    #[arg(long)]
    pub power_ladder: Option<String>,
    /// Flatten rough profiles by composing correspondences of progressively
    /// finer mollified curves instead of a single solve
    #[arg(long, default_value_t = false)]
    pub cascade: bool,
    /// Stage budget of the cascade
    #[arg(long, default_value_t = 16)]
    pub max_stages: usize,
    /// Homeomorphism knot CSV output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report output (stdout when omitted)
    #[arg(long)]
    pub report: Option<PathBuf>,
}

enum RunError {
    Config(String),
    Failed(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Failed(e.to_string())
    }
}

type RunResult<T> = std::result::Result<T, RunError>;

fn config_err<T>(msg: impl Into<String>) -> RunResult<T> {
    Err(RunError::Config(msg.into()))
}

/// Executes one subcommand and maps failures onto exit codes.
pub fn run(cli: Cli) -> u8 {
    let mut rng = SplitMix64::new(cli.seed);
    let outcome = match cli.command {
        Command::Seminorm(args) => run_seminorm(args, &mut rng),
        Command::VerifyLemmas(args) => run_verify_lemmas(args, &mut rng),
        Command::ScanMollify(args) => run_scan_mollify(args, &mut rng),
        Command::ScanTranslations(args) => run_scan_translations(args, &mut rng),
        Command::TailMass(args) => run_tail_mass(args, &mut rng),
        Command::WitnessLacunary(args) => run_witness_lacunary(args),
        Command::Bohrpal(args) => run_bohrpal(args, &mut rng),
    };
    match outcome {
        Ok(()) => 0,
        Err(RunError::Failed(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(RunError::Config(msg)) => {
            eprintln!("config error: {msg}");
            2
        }
    }
}

fn validate_grid_size(n: usize) -> RunResult<()> {
    if n < 8 || !n.is_power_of_two() {
        return config_err(format!("grid size {n} must be a power of two and at least 8"));
    }
    Ok(())
}

fn source_count(args: &SourceArgs) -> usize {
    args.builtin.is_some() as usize + args.coeffs.is_some() as usize + args.input.is_some() as usize
}

fn resolve_series(args: &SourceArgs, rng: &mut SplitMix64) -> RunResult<FourierSeries> {
    if source_count(args) != 1 {
        return config_err("exactly one of --builtin, --coeffs, --input is required");
    }
    if let Some(name) = &args.builtin {
        validate_grid_size(args.n)?;
        if args.terms < 1 {
            return config_err("--terms must be at least 1");
        }
        return match name.as_str() {
            "lacunary" => Ok(lacunary(args.terms).series()),
            "single-harmonic" => Ok(single_harmonic(args.harmonic)),
            "cos-plus-2" => Ok(analyze(&cos_plus_2(args.n)?)),
            "exp-cos" => Ok(analyze(&exp_cos(args.exp_a, args.n)?)),
            "random-trig" => Ok(random_trig(args.degree, rng)),
            other => config_err(format!("unknown builtin {other:?}")),
        };
    }
    if let Some(path) = &args.coeffs {
        return Ok(read_coefficients(path)?);
    }
    Ok(analyze(&read_grid_function(args.input.as_ref().unwrap())?))
}

fn resolve_grid(args: &SourceArgs, rng: &mut SplitMix64) -> RunResult<GridFunction> {
    if source_count(args) != 1 {
        return config_err("exactly one of --builtin, --coeffs, --input is required");
    }
    if let Some(path) = &args.input {
        return Ok(read_grid_function(path)?);
    }
    validate_grid_size(args.n)?;
    if let Some(path) = &args.coeffs {
        return Ok(synthesize(&read_coefficients(path)?, args.n)?);
    }
    match args.builtin.as_deref().unwrap() {
        "lacunary" => Ok(lacunary(args.terms).grid(args.n)?),
        "single-harmonic" => Ok(synthesize(&single_harmonic(args.harmonic), args.n)?),
        "cos-plus-2" => Ok(cos_plus_2(args.n)?),
        "exp-cos" => Ok(exp_cos(args.exp_a, args.n)?),
        "random-trig" => Ok(synthesize(&random_trig(args.degree, rng), args.n)?),
        other => config_err(format!("unknown builtin {other:?}")),
    }
}

fn resolve_homeo(args: &HomeoArgs, rng: &mut SplitMix64) -> RunResult<CircleHomeomorphism> {
    if args.homeo.is_some() && args.random_homeo {
        return config_err("--homeo and --random-homeo are mutually exclusive");
    }
    if let Some(path) = &args.homeo {
        return Ok(read_homeomorphism(path)?);
    }
    if args.random_homeo {
        if args.homeo_harmonics < 1 || args.homeo_knots < 8 {
            return config_err("random homeomorphism needs at least 1 harmonic and 8 knots");
        }
        return Ok(random_homeomorphism(rng, args.homeo_harmonics, args.homeo_knots));
    }
    Ok(CircleHomeomorphism::identity())
}

fn emit(out: &Option<PathBuf>, text: &str) -> RunResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(Error::Io)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json_array(values: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format_float(*v));
    }
    s.push(']');
    s
}

fn run_seminorm(args: SeminormArgs, rng: &mut SplitMix64) -> RunResult<()> {
    let mut series = resolve_series(&args.source, rng)?;
    if let Some(order) = args.fejer {
        if order < 1 {
            return config_err("--fejer order must be at least 1");
        }
        series = fejer_sum(&series, order);
    }
    let report = seminorm_fourier(&series);
    let mut json = String::from("{");
    write!(
        json,
        "\"value\":{},\"K\":{},\"partials\":{}",
        format_float(report.value),
        report.max_freq,
        json_array(&report.partials)
    )
    .unwrap();
    if let Some(resolution) = args.double_integral {
        let grid = synthesize(&series, args.source.n.max(2 * series.max_freq() + 2).next_power_of_two())?;
        let value = seminorm_double_integral(&grid, resolution)?;
        let (modulus, _) = abs_contraction_check(&grid, resolution)?;
        write!(
            json,
            ",\"double_integral\":{},\"double_integral_modulus\":{}",
            format_float(value),
            format_float(modulus)
        )
        .unwrap();
    }
    json.push_str("}\n");
    emit(&args.out, &json)
}

// Residual tolerances for the audit subcommand.
const PAIRING_IDENTITY_TOL: f64 = 1e-6;
const TRANSLATION_AVERAGE_TOL: f64 = 1e-6;
const LOWER_BOUND_FLOOR: f64 = 0.999;
const INVARIANCE_TOL: f64 = 1e-4;
const IDENTITY_TOL: f64 = 1e-10;
const AVERAGE_MARGIN: f64 = 1e-4;
const ROUNDTRIP_TOL: f64 = 1e-8;

fn run_verify_lemmas(args: VerifyLemmasArgs, rng: &mut SplitMix64) -> RunResult<()> {
    validate_grid_size(args.n)?;
    if args.pairs < 1 || args.degree < 1 {
        return config_err("--pairs and --degree must be at least 1");
    }
    let n = args.n;

    // pairing identity and bound on random polynomial pairs
    let mut pairing_identity_max = 0.0f64;
    let mut bound_violations = 0usize;
    for _ in 0..args.pairs {
        let cx = random_trig(args.degree, rng);
        let cy = random_trig(args.degree, rng);
        let x = synthesize(&cx, n)?;
        let y = BVFunction::new(synthesize(&cy, n)?);
        let grid_side = pairing(&x, &y)?;
        let spectral_side = pairing_spectral(&cx, &cy);
        pairing_identity_max = pairing_identity_max.max((grid_side - spectral_side).norm());
        let (value, bound) = pairing_bound_check(&cx, &cy);
        if value > bound * (1.0 + 1e-12) + 1e-12 {
            bound_violations += 1;
        }
    }

    // translation-average identity
    let mut translation_average_max = 0.0f64;
    for _ in 0..3 {
        let h = random_homeomorphism(rng, 4, 1024);
        let x = synthesize(&random_trig(8, rng), n)?;
        for nu in [0i64, 1, -1, 5, -5] {
            let (lhs, rhs) = translation_average_identity(&x, |t| h.eval(t), nu, 512);
            translation_average_max = translation_average_max.max((lhs - rhs).abs());
        }
    }

    // exponential lower bound, exact for the identity
    let mut identity_max = 0.0f64;
    for k in 1..=8i64 {
        let (sq, target) = exp_lower_bound_check(&CircleHomeomorphism::identity(), k, n)?;
        identity_max = identity_max.max((sq - target).abs());
    }
    let mut lower_bound_min_ratio = f64::INFINITY;
    for _ in 0..3 {
        let h = random_homeomorphism(rng, 4, 2048);
        for k in [1i64, 2, 5, 8] {
            let (sq, target) = exp_lower_bound_check(&h, k, n)?;
            lower_bound_min_ratio = lower_bound_min_ratio.min(sq / target);
        }
    }

    // pairing invariance under rotation and a random change of variable
    let x = GridFunction::from_real_fn(n, |t| t.cos())?;
    let y = BVFunction::new(GridFunction::from_real_fn(n, |t| t.sin())?);
    let mut invariance_max = 0.0f64;
    for h in [
        CircleHomeomorphism::identity().rotate(1.1),
        random_homeomorphism(rng, 4, 2048),
    ] {
        let (lhs, rhs) = invariance_check(&x, &y, &h)?;
        invariance_max = invariance_max.max((lhs - rhs).norm());
    }

    // inversion round trip through the composition machinery; the knot
    // density sets the kink floor of the intermediate interpolation
    let f = synthesize(&single_harmonic(1), n)?;
    let h = random_homeomorphism(rng, 3, 65536);
    let back = compose(&compose(&f, &h), &h.invert());
    let roundtrip_max = back
        .samples()
        .iter()
        .zip(f.samples())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    // convolution: unit-mass identity, multiplier bound, seminorm contraction
    let c = random_trig(12, rng);
    let theta = rng.next_in(0.0, 2.0 * PI);
    let via_measure = convolve(&c, &DiscreteMeasure::dirac(theta));
    let via_translate = translate(&c, theta);
    let mut dirac_translate_max = 0.0f64;
    for (k, v) in via_measure.iter() {
        dirac_translate_max = dirac_translate_max.max((v - via_translate.coeff(k)).norm());
    }
    let atoms: Vec<(f64, f64)> = {
        let raw: Vec<f64> = (0..4).map(|_| rng.next_in(0.1, 1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter()
            .map(|w| (rng.next_in(0.0, 2.0 * PI), w / total))
            .collect()
    };
    let lambda = DiscreteMeasure::probability(atoms)?;
    let transform = measure_fourier(&lambda, 12);
    let multiplier_excess = transform
        .iter()
        .map(|(_, v)| (v.norm() - 1.0).max(0.0))
        .fold(0.0, f64::max);
    let contraction_excess = (seminorm_fourier(&convolve(&c, &lambda)).value
        - seminorm_fourier(&c).value)
        .max(0.0);

    // norm identity: banach^2 = seminorm^2 + energy
    let b = banach_norm(&c);
    let s = seminorm_fourier(&c).value;
    let norm_identity_residual = (b * b - (s * s + c.energy())).abs();

    // moving average: multiplier route vs the direct weighted sum
    let witness = lacunary(6).series();
    let width = 0.01;
    let scan_value = mollified_weighted_sum(&witness, width, 64);
    let smoothed = mollify(&witness, &Mollifier::new(width)?);
    let report = seminorm_fourier(&smoothed);
    let via_seminorm = report.partials.get(63).copied().unwrap_or(report.value * report.value);
    let mollify_residual = (scan_value - via_seminorm).abs();

    // averaged tail-mass inequality on a small witness
    let h_avg = random_homeomorphism(rng, 4, 2048);
    let (lhs, rhs) = averaged_tail_mass_inequality(&lacunary(4).series(), &h_avg, 8, 64, 512, n);
    let average_margin = lhs - rhs * (1.0 - AVERAGE_MARGIN);

    let pass = pairing_identity_max <= PAIRING_IDENTITY_TOL
        && bound_violations == 0
        && translation_average_max <= TRANSLATION_AVERAGE_TOL
        && identity_max <= IDENTITY_TOL
        && lower_bound_min_ratio >= LOWER_BOUND_FLOOR
        && invariance_max <= INVARIANCE_TOL
        && roundtrip_max <= ROUNDTRIP_TOL
        && dirac_translate_max <= 1e-12
        && multiplier_excess <= 1e-12
        && contraction_excess <= 1e-12
        && norm_identity_residual <= 1e-10
        && mollify_residual <= 1e-12
        && average_margin >= 0.0;

    let mut json = String::from("{");
    writeln!(
        json,
        "\"pairing_identity_max\":{},\"pairing_bound_violations\":{},\
         \"translation_average_max\":{},\"identity_lower_bound_max\":{},\
         \"lower_bound_min_ratio\":{},\"pairing_invariance_max\":{},\
         \"invert_roundtrip_max\":{},\"dirac_translate_max\":{},\
         \"measure_multiplier_excess\":{},\"convolution_contraction_excess\":{},\
         \"norm_identity_residual\":{},\"mollify_route_residual\":{},\
         \"average_inequality_margin\":{},\"pass\":{}}}",
        format_float(pairing_identity_max),
        bound_violations,
        format_float(translation_average_max),
        format_float(identity_max),
        format_float(lower_bound_min_ratio),
        format_float(invariance_max),
        format_float(roundtrip_max),
        format_float(dirac_translate_max),
        format_float(multiplier_excess),
        format_float(contraction_excess),
        format_float(norm_identity_residual),
        format_float(mollify_residual),
        format_float(average_margin),
        pass
    )
    .unwrap();
    emit(&args.out, &json)?;
    if pass {
        Ok(())
    } else {
        Err(RunError::Failed("one or more audits exceeded tolerance".into()))
    }
}

fn run_scan_mollify(args: ScanMollifyArgs, rng: &mut SplitMix64) -> RunResult<()> {
    if !(args.delta_min > 0.0 && args.delta_min <= args.delta_max && args.delta_max <= PI) {
        return config_err("widths must satisfy 0 < delta_min <= delta_max <= pi");
    }
    if args.delta_count < 1 || args.cutoff < 1 {
        return config_err("--delta-count and --cutoff must be at least 1");
    }
    let series = resolve_series(&args.source, rng)?;
    let deltas: Vec<f64> = if args.delta_count == 1 {
        vec![args.delta_max]
    } else {
        let ratio = (args.delta_min / args.delta_max).powf(1.0 / (args.delta_count - 1) as f64);
        (0..args.delta_count)
            .map(|i| args.delta_max * ratio.powi(i as i32))
            .collect()
    };
    let scan = mollification_scan(&series, &deltas, args.cutoff);
    let mut out = String::from("delta,s\n");
    for (d, v) in scan.deltas.iter().zip(&scan.values) {
        out.push_str(&format!("{},{}\n", format_float(*d), format_float(*v)));
    }
    emit(&args.out, &out)
}

fn run_scan_translations(args: ScanTranslationsArgs, rng: &mut SplitMix64) -> RunResult<()> {
    if args.theta_count < 1 || args.m_cap < 1 {
        return config_err("--theta-count and --m-cap must be at least 1");
    }
    let mut series = resolve_series(&args.source, rng)?;
    if let Some(path) = &args.measure {
        series = convolve(&series, &read_measure(path)?);
    }
    let h = resolve_homeo(&args.homeo, rng)?;
    validate_grid_size(args.source.n)?;
    let n = args.source.n;
    if 2 * series.max_freq() + 1 > n {
        return config_err(format!(
            "band {} does not fit grid {n}; raise --n",
            2 * series.max_freq() + 1
        ));
    }
    let points: Vec<f64> = (0..n).map(|j| h.eval(grid_point(n, j))).collect();
    let m_cap = args.m_cap.min(n / 2 - 1) as i64;
    let mut out = String::from("theta,mass\n");
    for q in 0..args.theta_count {
        let theta = grid_point(args.theta_count, q);
        let translated = translate(&series, theta);
        let samples = translated.eval_many_above(1e-15, &points);
        let c = analyze(&GridFunction::from_samples(samples)?);
        let mass: f64 = (1..=m_cap)
            .map(|nu| (c.coeff(nu).norm_sqr() + c.coeff(-nu).norm_sqr()) * nu as f64)
            .sum();
        out.push_str(&format!("{},{}\n", format_float(theta), format_float(mass)));
    }
    emit(&args.out, &out)
}

fn run_tail_mass(args: TailMassArgs, rng: &mut SplitMix64) -> RunResult<()> {
    validate_grid_size(args.n)?;
    if args.k_max < 1 {
        return config_err("--k-max must be at least 1");
    }
    let h = resolve_homeo(&args.homeo, rng)?;
    let (rows, _max) = tail_mass_table(&h, args.k_max, args.n)?;
    let mut out = String::from("k,m\n");
    for (k, m) in rows {
        out.push_str(&format!("{k},{m}\n"));
    }
    emit(&args.out, &out)
}

fn run_witness_lacunary(args: WitnessLacunaryArgs) -> RunResult<()> {
    if args.terms < 1 {
        return config_err("--terms must be at least 1");
    }
    validate_grid_size(args.n)?;
    let witness = lacunary(args.terms);
    let series = witness.series();
    let grid = witness.grid(args.n)?;
    if let Some(path) = &args.coeffs_out {
        write_coefficients(path, &series)?;
    }
    if let Some(path) = &args.grid_out {
        write_grid_function(path, &grid)?;
    }
    let report = seminorm_fourier(&series);
    let ratio = holder_half_ratio(&grid);
    let mut json = String::from("{");
    writeln!(
        json,
        "\"terms\":{},\"seminorm_sq\":{},\"holder_ratio\":{},\"partials\":{}}}",
        args.terms,
        format_float(report.value * report.value),
        format_float(ratio),
        json_array(&report.partials)
    )
    .unwrap();
    emit(&args.out, &json)
}

fn run_bohrpal(args: BohrpalArgs, rng: &mut SplitMix64) -> RunResult<()> {
    if args.tol <= 0.0 || args.damping <= 0.0 || args.damping > 1.0 {
        return config_err("--tol must be positive and --damping in (0, 1]");
    }
    let warmup: Vec<f64> = match &args.warmup {
        None => Vec::new(),
        Some(text) => {
            let mut widths = Vec::new();
            for part in text.split(',') {
                let w: f64 = part
                    .trim()
                    .parse()
                    .map_err(|_| RunError::Config(format!("bad warm-up width {part:?}")))?;
                if !(w > 0.0 && w <= PI) {
                    return config_err(format!("warm-up width {w} outside (0, pi]"));
                }
                widths.push(w);
            }
            widths
        }
    };
    let power_ladder: Vec<f64> = match &args.power_ladder {
        None => Vec::new(),
        Some(text) => {
            let mut powers = Vec::new();
            for part in text.split(',') {
                let p: f64 = part
                    .trim()
                    .parse()
                    .map_err(|_| RunError::Config(format!("bad ladder power {part:?}")))?;
                if !(p > 0.0 && p < 1.0) {
                    return config_err(format!("ladder power {p} outside (0, 1)"));
                }
                powers.push(p);
            }
            powers
        }
    };
    if let Some(w) = args.mollify {
        if !(w > 0.0 && w <= PI) {
            return config_err(format!("--mollify width {w} outside (0, pi]"));
        }
    }
    let f = resolve_grid(&args.source, rng)?;
    if args.cascade {
        let opts = CascadeOptions {
            stage: SolveOptions {
                tol: args.tol,
                max_iter: args.max_iter,
                damping: args.damping,
                ..SolveOptions::default()
            },
            max_stages: args.max_stages,
            ..CascadeOptions::default()
        };
        let result = improvement_cascade(&f, &opts)?;
        if let Some(path) = &args.out {
            write_homeomorphism(path, &result.h)?;
        }
        let (area_spectral, area_shoelace) =
            area_identity_check(&result.correspondence, &result.surface);
        let (f_plus, _) = positivize(&f)?;
        let before = seminorm_fourier(&analyze(&f_plus));
        let after = seminorm_fourier(&analyze(&compose(&f_plus, &result.h)));
        let mut json = String::from("{");
        writeln!(
            json,
            "\"area_spectral\":{},\"area_shoelace\":{},\"analytic_residual\":{},\
             \"seminorm_before_partials\":{},\"seminorm_after_partials\":{}}}",
            format_float(area_spectral),
            format_float(area_shoelace),
            format_float(result.correspondence.analytic_residual),
            json_array(&before.partials),
            json_array(&after.partials)
        )
        .unwrap();
        return emit(&args.report, &json);
    }
    let (f_plus, _) = positivize(&f)?;
    let curve = StarCurve::new(f_plus)?;
    let opts = SolveOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        damping: args.damping,
        mollify: args.mollify,
        warmup,
        power_ladder,
    };
    let bc = solve_correspondence(&curve, &opts)?;
    let (area_spectral, area_shoelace) = area_identity_check(&bc, &curve);
    let report = verify_improvement(&f, &bc)?;
    if let Some(path) = &args.out {
        write_homeomorphism(path, &bc.h)?;
    }
    let mut json = String::from("{");
    writeln!(
        json,
        "\"area_spectral\":{},\"area_shoelace\":{},\"analytic_residual\":{},\
         \"seminorm_before_partials\":{},\"seminorm_after_partials\":{}}}",
        format_float(area_spectral),
        format_float(area_shoelace),
        format_float(bc.analytic_residual),
        json_array(&report.before.partials),
        json_array(&report.after.partials)
    )
    .unwrap();
    emit(&args.report, &json)
}
