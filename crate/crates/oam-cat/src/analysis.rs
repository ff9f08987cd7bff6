//! Spiral spectra, Bloch-sphere interference, and MUB state tomography.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::ops::RangeInclusive;

use crate::cat::{cat_field, CatSpec};
use crate::density::{project_to_density, DensityMatrix};
use crate::error::{Error, Result};
use crate::grid::{inner_product, ComplexField, Grid2D};
use crate::modes::{lg_mode_unchecked, WaistPolicy};

/// Normalized power distribution over OAM indices.
#[derive(Debug, Clone)]
pub struct SpiralSpectrum {
    pub l_values: Vec<i32>,
    /// Powers normalized over the analyzed window.
    pub powers: Vec<f64>,
    /// Raw projected power before normalization; close to the field power
    /// when the field lies inside the window.
    pub captured_power: f64,
}

impl SpiralSpectrum {
    /// Total-variation distance against a reference distribution on the same
    /// window.
    pub fn tv_distance(&self, reference: &[f64]) -> f64 {
        0.5 * self
            .powers
            .iter()
            .zip(reference.iter())
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
    }
}

/// Project a field onto p = 0 modes built under the same waist policy as the
/// generation and return the normalized power per OAM index.
pub fn spiral_spectrum(
    f: &ComplexField,
    w0: f64,
    policy: WaistPolicy,
    l_range: RangeInclusive<i32>,
) -> Result<SpiralSpectrum> {
    if !(w0 > 0.0) {
        return Err(Error::InvalidParameter {
            field: "waist",
            message: format!("must be positive, got {w0}"),
        });
    }
    let mut l_values = Vec::new();
    let mut raw = Vec::new();
    for l in l_range {
        let mode = lg_mode_unchecked(l, policy.waist_for(l, w0), &f.grid);
        let c = inner_product(&mode, f)?;
        l_values.push(l);
        raw.push(c.norm_sqr());
    }
    let captured_power: f64 = raw.iter().sum();
    if captured_power <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let powers = raw.iter().map(|p| p / captured_power).collect();
    Ok(SpiralSpectrum {
        l_values,
        powers,
        captured_power,
    })
}

/// Fringe visibility (max - min) / (max + min).
pub fn visibility(powers: &[f64]) -> Result<f64> {
    let max = powers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = powers.iter().copied().fold(f64::INFINITY, f64::min);
    if powers.is_empty() || max <= 0.0 {
        return Err(Error::InvalidParameter {
            field: "powers",
            message: "need at least one positive power".into(),
        });
    }
    Ok((max - min) / (max + min))
}

/// Projection of a rotated cat onto the input cat, evaluated on the grid.
///
/// The input cat must be even or odd (theta in {0, pi}); the scan rotates the
/// relative phase of the second state through `thetas`.
pub fn bloch_scan(cat: &CatSpec, thetas: &[f64], grid: &Grid2D) -> Result<Vec<f64>> {
    let pi = std::f64::consts::PI;
    if cat.theta.min((cat.theta - pi).abs()) > 1e-12 && (cat.theta - TAU).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            field: "theta",
            message: format!("bloch_scan needs an even or odd input cat, got theta = {}", cat.theta),
        });
    }
    let input = cat_field(cat, grid)?.normalized()?;
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let rotated_spec = CatSpec::new(
            cat.alpha,
            theta,
            cat.waist,
            cat.waist_policy,
            cat.l_max,
            cat.wavelength,
        )?;
        let rotated = cat_field(&rotated_spec, grid)?.normalized()?;
        let ip = inner_product(&rotated, &input)?;
        out.push(ip.norm_sqr());
    }
    Ok(out)
}

/// Closed-form scan: for an even input, P = (1+cos t)(1+s) / (2 (1 + s cos t))
/// with s = exp(-2|a|^2); for an odd input the mirrored expression.
pub fn bloch_closed_form(theta_in: f64, alpha_mag: f64, theta: f64) -> Result<f64> {
    let s = (-2.0 * alpha_mag * alpha_mag).exp();
    let pi = std::f64::consts::PI;
    if theta_in.abs() < 1e-12 || (theta_in - TAU).abs() < 1e-12 {
        Ok((1.0 + theta.cos()) * (1.0 + s) / (2.0 * (1.0 + s * theta.cos())))
    } else if (theta_in - pi).abs() < 1e-12 {
        Ok((1.0 - theta.cos()) * (1.0 - s) / (2.0 * (1.0 + s * theta.cos())))
    } else {
        Err(Error::InvalidParameter {
            field: "theta_in",
            message: format!("closed form defined for theta_in in {{0, pi}}, got {theta_in}"),
        })
    }
}

fn is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// The d+1 mutually unbiased bases of a prime dimension, as matrices whose
/// columns are the basis vectors. Index 0 is the computational basis; basis
/// b >= 1 has vectors `(1/sqrt d) sum_k w^{(b-1) k^2 + m k} |k>` with
/// `w = exp(2 pi i / d)` (Wootters-Fields quadratic phases). d = 2 uses the
/// familiar Z, X, Y triple.
pub fn mub_bases(d: usize) -> Result<Vec<DMatrix<Complex64>>> {
    if !is_prime(d) {
        return Err(Error::NonPrimeDimension(d));
    }
    let mut bases = Vec::with_capacity(d + 1);
    bases.push(DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }));
    let inv_sqrt = 1.0 / (d as f64).sqrt();
    if d == 2 {
        // X then Y
        let x = DMatrix::from_fn(2, 2, |k, m| {
            let sign = if k == 1 && m == 1 { -1.0 } else { 1.0 };
            Complex64::new(sign * inv_sqrt, 0.0)
        });
        let y = DMatrix::from_fn(2, 2, |k, m| {
            if k == 0 {
                Complex64::new(inv_sqrt, 0.0)
            } else if m == 0 {
                Complex64::new(0.0, inv_sqrt)
            } else {
                Complex64::new(0.0, -inv_sqrt)
            }
        });
        bases.push(x);
        bases.push(y);
        return Ok(bases);
    }
    for b in 0..d {
        let basis = DMatrix::from_fn(d, d, |k, m| {
            let exponent = (b * k * k + m * k) % d;
            Complex64::from_polar(inv_sqrt, TAU * exponent as f64 / d as f64)
        });
        bases.push(basis);
    }
    Ok(bases)
}

/// Measurement probabilities |<m_b|psi>|^2, one row per basis.
pub fn mub_probabilities(
    state: &[Complex64],
    bases: &[DMatrix<Complex64>],
) -> Result<Vec<Vec<f64>>> {
    let d = state.len();
    let mut rows = Vec::with_capacity(bases.len());
    for basis in bases {
        if basis.nrows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: basis.nrows(),
            });
        }
        let mut row = Vec::with_capacity(d);
        for m in 0..d {
            let mut amp = Complex64::new(0.0, 0.0);
            for k in 0..d {
                amp += basis[(k, m)].conj() * state[k];
            }
            row.push(amp.norm_sqr());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Linear-inversion tomography `rho = sum p(b,m) |m_b><m_b| - I`, followed by
/// the PSD projection (eigenvalue clipping and trace renormalization).
///
/// Every probability row must sum to 1 within 1e-6.
pub fn reconstruct_density(
    probabilities: &[Vec<f64>],
    bases: &[DMatrix<Complex64>],
) -> Result<DensityMatrix> {
    if probabilities.len() != bases.len() {
        return Err(Error::DimensionMismatch {
            expected: bases.len(),
            got: probabilities.len(),
        });
    }
    let d = bases
        .first()
        .map(|b| b.nrows())
        .ok_or(Error::DimensionMismatch { expected: 1, got: 0 })?;
    for (r, row) in probabilities.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: row.len(),
            });
        }
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InconsistentProbabilities { row: r, sum });
        }
    }
    let mut raw = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for (basis, row) in bases.iter().zip(probabilities.iter()) {
        for m in 0..d {
            let p = Complex64::new(row[m], 0.0);
            for i in 0..d {
                for j in 0..d {
                    raw[(i, j)] += p * basis[(i, m)] * basis[(j, m)].conj();
                }
            }
        }
    }
    for i in 0..d {
        raw[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    project_to_density(&raw)
}

/// Truncate a coefficient ladder to the first `d` entries and renormalize;
/// this is the embedding used for d-dimensional tomography.
pub fn truncate_and_renormalize(coeffs: &[Complex64], d: usize) -> Result<Vec<Complex64>> {
    if d == 0 || d > coeffs.len() {
        return Err(Error::DimensionMismatch {
            expected: coeffs.len(),
            got: d,
        });
    }
    let head = &coeffs[..d];
    let norm: f64 = head.iter().map(|c| c.norm_sqr()).sum();
    if norm <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let scale = 1.0 / norm.sqrt();
    Ok(head.iter().map(|c| c * scale).collect())
}
