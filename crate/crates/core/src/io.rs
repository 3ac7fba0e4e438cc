//! CSV file formats.
//!
//! * coefficients: header `k,re,im`, one row per frequency
//! * grid functions: first line `N=<n>`, then header `j,re,im`
//! * homeomorphisms: header `t,h`, knots validated as strictly monotone on load
//! * measures: header `theta,w`
//!
//! All floats are written with twelve significant digits so identical runs
//! produce identical bytes.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::DiscreteMeasure;
use crate::fourier::{FourierSeries, GridFunction};
use crate::homeo::CircleHomeomorphism;

/// Canonical float formatting: twelve significant digits, `-0` normalized.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

fn parse_field(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Parse {
        path: path.display().to_string(),
        message: format!("line {line_no}: cannot parse number from {field:?}"),
    })
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

pub fn write_coefficients(path: &Path, c: &FourierSeries) -> Result<()> {
    let mut out = String::from("k,re,im\n");
    for (k, v) in c.iter() {
        out.push_str(&format!("{k},{},{}\n", format_float(v.re), format_float(v.im)));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_coefficients(path: &Path) -> Result<FourierSeries> {
    let text = fs::read_to_string(path)?;
    let mut entries: Vec<(i64, Complex64)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("k,") {
            continue;
        }
        let mut parts = line.split(',');
        let (k, re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(parse_error(path, format!("line {}: expected k,re,im", i + 1))),
        };
        let k: i64 = k.trim().parse().map_err(|_| {
            parse_error(path, format!("line {}: bad frequency {k:?}", i + 1))
        })?;
        let re = parse_field(path, i + 1, re)?;
        let im = parse_field(path, i + 1, im)?;
        entries.push((k, Complex64::new(re, im)));
    }
    if entries.is_empty() {
        return Err(parse_error(path, "no coefficient rows"));
    }
    let k_max = entries.iter().map(|&(k, _)| k.unsigned_abs()).max().unwrap() as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
    for (k, v) in entries {
        coeffs[(k + k_max as i64) as usize] = v;
    }
    Ok(FourierSeries::new(coeffs))
}

pub fn write_grid_function(path: &Path, f: &GridFunction) -> Result<()> {
    let mut out = format!("N={}\nj,re,im\n", f.len());
    for (j, v) in f.samples().iter().enumerate() {
        out.push_str(&format!("{j},{},{}\n", format_float(v.re), format_float(v.im)));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let n: usize = match lines.next() {
        Some((_, first)) if first.trim().starts_with("N=") => first.trim()[2..]
            .parse()
            .map_err(|_| parse_error(path, format!("bad grid size line {first:?}")))?,
        _ => return Err(parse_error(path, "first line must be N=<n>")),
    };
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    let mut seen = 0usize;
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with("j,") {
            continue;
        }
        let mut parts = line.split(',');
        let (j, re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(parse_error(path, format!("line {}: expected j,re,im", i + 1))),
        };
        let j: usize = j.trim().parse().map_err(|_| {
            parse_error(path, format!("line {}: bad index {j:?}", i + 1))
        })?;
        if j >= n {
            return Err(parse_error(path, format!("line {}: index {j} out of range", i + 1)));
        }
        samples[j] = Complex64::new(parse_field(path, i + 1, re)?, parse_field(path, i + 1, im)?);
        seen += 1;
    }
    if seen != n {
        return Err(parse_error(path, format!("expected {n} sample rows, found {seen}")));
    }
    GridFunction::from_samples(samples)
}

pub fn write_homeomorphism(path: &Path, h: &CircleHomeomorphism) -> Result<()> {
    let mut out = String::from("t,h\n");
    for (t, ht) in h.knots() {
        out.push_str(&format!("{},{}\n", format_float(t), format_float(ht)));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_homeomorphism(path: &Path) -> Result<CircleHomeomorphism> {
    let text = fs::read_to_string(path)?;
    let mut knots_in = Vec::new();
    let mut knots_out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("t,") {
            continue;
        }
        let mut parts = line.split(',');
        let (t, ht) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(parse_error(path, format!("line {}: expected t,h", i + 1))),
        };
        knots_in.push(parse_field(path, i + 1, t)?);
        knots_out.push(parse_field(path, i + 1, ht)?);
    }
    CircleHomeomorphism::from_knots(knots_in, knots_out)
}

pub fn write_measure(path: &Path, m: &DiscreteMeasure) -> Result<()> {
    let mut out = String::from("theta,w\n");
    for &(p, w) in m.atoms() {
        out.push_str(&format!("{},{}\n", format_float(p), format_float(w)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a measure file; atoms that form a probability measure are tagged as
/// such, anything else comes back signed.
pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    let text = fs::read_to_string(path)?;
    let mut atoms = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("theta,") {
            continue;
        }
        let mut parts = line.split(',');
        let (p, w) = match (parts.next(), parts.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(parse_error(path, format!("line {}: expected theta,w", i + 1))),
        };
        atoms.push((parse_field(path, i + 1, p)?, parse_field(path, i + 1, w)?));
    }
    match DiscreteMeasure::probability(atoms.clone()) {
        Ok(m) => Ok(m),
        Err(_) => Ok(DiscreteMeasure::signed(atoms)),
    }
}
