//! Analogous coherent and cat states in the OAM basis.
//!
//! An analogous coherent state weights the mode ladder with Poisson
//! amplitudes, `c_L = exp(-|a|^2/2) a^L / sqrt(L!)`, and the cat is the
//! normalized superposition of the `+a` and `-a` states with relative phase
//! `theta`. With a constant waist the whole mode sum collapses to a displaced
//! Gaussian lobe, which is what makes the two-lobe intensity picture exact:
//! in the scaled coordinate `u = sqrt(2) (x + i y) / w`,
//!
//! ```text
//! psi_a(u) = sqrt(2/pi) (1/w) exp(-|a|^2/2) exp(-|u|^2/2) exp(a u)
//! ```
//!
//! whose intensity is a unit-mass Gaussian centered at `u = conj(a)`.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D, RealMap};
use crate::modes::{lg_mode_unchecked, WaistPolicy};

/// Complex displacement a = |a| e^{i phase} of the coherent-state ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaParam {
    magnitude: f64,
    phase: f64,
}

impl AlphaParam {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() {
            return Err(Error::InvalidParameter {
                field: "alpha.magnitude",
                message: format!("must be finite and non-negative, got {magnitude}"),
            });
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter {
                field: "alpha.phase",
                message: format!("must be finite, got {phase}"),
            });
        }
        Ok(Self {
            magnitude,
            phase: phase.rem_euclid(TAU),
        })
    }

    /// Displacement with |a|^2 = `alpha_sq` and zero phase.
    pub fn from_alpha_sq(alpha_sq: f64) -> Result<Self> {
        if !(alpha_sq >= 0.0) || !alpha_sq.is_finite() {
            return Err(Error::InvalidParameter {
                field: "alpha_sq",
                message: format!("must be finite and non-negative, got {alpha_sq}"),
            });
        }
        Self::new(alpha_sq.sqrt(), 0.0)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn alpha_sq(&self) -> f64 {
        self.magnitude * self.magnitude
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    /// The opposite-amplitude displacement -a.
    pub fn negated(&self) -> Self {
        Self {
            magnitude: self.magnitude,
            phase: (self.phase + std::f64::consts::PI).rem_euclid(TAU),
        }
    }
}

/// Full specification of an analogous cat state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    pub alpha: AlphaParam,
    /// Relative phase between the two branches, in [0, 2pi).
    pub theta: f64,
    /// Input Gaussian waist w0 (meters).
    pub waist: f64,
    pub waist_policy: WaistPolicy,
    /// Mode ladder truncation; coefficients run over L = 0..=l_max.
    pub l_max: usize,
    pub wavelength: f64,
}

impl CatSpec {
    pub fn new(
        alpha: AlphaParam,
        theta: f64,
        waist: f64,
        waist_policy: WaistPolicy,
        l_max: usize,
        wavelength: f64,
    ) -> Result<Self> {
        if !(waist > 0.0) || !waist.is_finite() {
            return Err(Error::InvalidParameter {
                field: "waist",
                message: format!("must be positive, got {waist}"),
            });
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::InvalidParameter {
                field: "wavelength",
                message: format!("must be positive, got {wavelength}"),
            });
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParameter {
                field: "theta",
                message: format!("must be finite, got {theta}"),
            });
        }
        let min = Self::min_l_max(&alpha);
        if l_max < min {
            return Err(Error::InvalidParameter {
                field: "l_max",
                message: format!(
                    "{l_max} is below the truncation floor {min} for |alpha|^2 = {:.3}",
                    alpha.alpha_sq()
                ),
            });
        }
        Ok(Self {
            alpha,
            theta: theta.rem_euclid(TAU),
            waist,
            waist_policy,
            l_max,
            wavelength,
        })
    }

    /// Convenience constructor with the defaults used throughout: constant
    /// waist policy and l_max = 50 (raised when the floor demands more).
    pub fn with_defaults(alpha_sq: f64, theta: f64, waist: f64, wavelength: f64) -> Result<Self> {
        let alpha = AlphaParam::from_alpha_sq(alpha_sq)?;
        let l_max = 50usize.max(Self::min_l_max(&alpha));
        Self::new(alpha, theta, waist, WaistPolicy::Constant, l_max, wavelength)
    }

    /// Truncation floor ceil(|a|^2 + 6 |a|).
    pub fn min_l_max(alpha: &AlphaParam) -> usize {
        (alpha.alpha_sq() + 6.0 * alpha.magnitude()).ceil() as usize
    }

    /// Branch overlap <a|-a> = exp(-2 |a|^2).
    pub fn branch_overlap(&self) -> f64 {
        (-2.0 * self.alpha.alpha_sq()).exp()
    }

    /// Normalization N = 1 / sqrt(2 (1 + cos(theta) exp(-2|a|^2))).
    ///
    /// Errors for the null combination |a| = 0, theta = pi.
    pub fn normalization(&self) -> Result<f64> {
        let denom = 2.0 * (1.0 + self.theta.cos() * self.branch_overlap());
        if denom < 1e-12 {
            return Err(Error::DegenerateCat);
        }
        Ok(1.0 / denom.sqrt())
    }
}

/// Coherent-state ladder coefficients c_L = exp(-|a|^2/2) a^L / sqrt(L!) for
/// L = 0..=l_max.
///
/// The truncated tail mass must stay below 1e-8; otherwise a
/// truncation-insufficient error is returned.
pub fn acst_coefficients(alpha: &AlphaParam, l_max: usize) -> Result<Vec<Complex64>> {
    let a = alpha.magnitude();
    let mut coeffs = Vec::with_capacity(l_max + 1);
    if a == 0.0 {
        coeffs.push(Complex64::new(1.0, 0.0));
        coeffs.resize(l_max + 1, Complex64::new(0.0, 0.0));
        return Ok(coeffs);
    }
    // log-space magnitude keeps a^L / sqrt(L!) finite for any L
    let ln_a = a.ln();
    let mut half_ln_fact = 0.0;
    let mut captured = 0.0;
    for l in 0..=l_max {
        if l > 0 {
            half_ln_fact += 0.5 * (l as f64).ln();
        }
        let magnitude = (-0.5 * a * a + l as f64 * ln_a - half_ln_fact).exp();
        let c = Complex64::from_polar(magnitude, alpha.phase() * l as f64);
        captured += c.norm_sqr();
        coeffs.push(c);
    }
    let tail = (1.0 - captured).max(0.0);
    if tail > 1e-8 {
        return Err(Error::TruncationInsufficient { tail, l_max });
    }
    Ok(coeffs)
}

/// Normalized cat coefficients b_L = N (c_L(a) + e^{i theta} c_L(-a)).
pub fn cat_coefficients(spec: &CatSpec) -> Result<Vec<Complex64>> {
    let n = spec.normalization()?;
    let plus = acst_coefficients(&spec.alpha, spec.l_max)?;
    let phase = Complex64::from_polar(1.0, spec.theta);
    // c_L(-a) = (-1)^L c_L(a)
    Ok(plus
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            n * (c + phase * sign * c)
        })
        .collect())
}

/// Sum coefficient-weighted modes on the grid, with a loose a-posteriori
/// power guard against inadequate grids.
fn synthesize(
    coeffs: &[Complex64],
    waist: f64,
    policy: WaistPolicy,
    grid: &Grid2D,
    expected_power: f64,
) -> Result<ComplexField> {
    let mut field = ComplexField::zeros(*grid);
    for (l, &c) in coeffs.iter().enumerate() {
        if c.norm_sqr() < 1e-30 {
            continue;
        }
        let w_l = policy.waist_for(l as i32, waist);
        let mode = lg_mode_unchecked(l as i32, w_l, grid);
        field
            .samples
            .zip_mut_with(&mode.samples, |acc, m| *acc += c * m);
    }
    let power = field.power();
    if (power - expected_power).abs() > 1e-4 {
        return Err(Error::GridTooSmall(format!(
            "superposition power {power:.6} deviates from {expected_power:.6}; enlarge the grid"
        )));
    }
    Ok(field)
}

/// Analogous coherent-state field: the Poisson-weighted mode sum.
pub fn acst_field(
    alpha: &AlphaParam,
    waist: f64,
    policy: WaistPolicy,
    l_max: usize,
    grid: &Grid2D,
) -> Result<ComplexField> {
    if !(waist > 0.0) {
        return Err(Error::InvalidParameter {
            field: "waist",
            message: format!("must be positive, got {waist}"),
        });
    }
    let coeffs = acst_coefficients(alpha, l_max)?;
    synthesize(&coeffs, waist, policy, grid, 1.0)
}

/// Cat-state field, normalized before discretization.
pub fn cat_field(spec: &CatSpec, grid: &Grid2D) -> Result<ComplexField> {
    let coeffs = cat_coefficients(spec)?;
    let expected: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    synthesize(&coeffs, spec.waist, spec.waist_policy, grid, expected)
}

/// Closed-form constant-waist coherent-state field
/// `sqrt(2/pi) (1/w) exp(-|a|^2/2) exp(-rho^2/2) exp(a u)` with
/// `u = sqrt(2)(x + i y)/w`. Equals the mode sum exactly up to truncation.
pub fn acst_closed_form(alpha: &AlphaParam, waist: f64, grid: &Grid2D) -> ComplexField {
    let a = alpha.as_complex();
    let scale = (2.0 / std::f64::consts::PI).sqrt() / waist;
    let half_a2 = 0.5 * alpha.alpha_sq();
    ComplexField::from_fn(*grid, |x, y| {
        let u = Complex64::new(x, y) * (2f64.sqrt() / waist);
        let exponent = a * u - 0.5 * u.norm_sqr() - half_a2;
        scale * exponent.exp()
    })
}

/// Closed-form cat intensity (constant waist): the two displaced Gaussian
/// lobes plus the central interference term,
/// `I = N^2 (2/(pi w^2)) [exp(-|u - b|^2) + exp(-|u + b|^2)
///      + 2 exp(-|u|^2 - |a|^2) cos(2 |a| Im(u e^{i phi_a}) - theta)]`
/// with `b = conj(a)`. Integrates to 1 and matches |cat_field|^2 pointwise.
pub fn cat_intensity_analytic(
    alpha: &AlphaParam,
    theta: f64,
    waist: f64,
    grid: &Grid2D,
) -> Result<RealMap> {
    let a_mag = alpha.magnitude();
    let overlap = (-2.0 * alpha.alpha_sq()).exp();
    let denom = 2.0 * (1.0 + theta.cos() * overlap);
    if denom < 1e-12 {
        return Err(Error::DegenerateCat);
    }
    let n_sq = 1.0 / denom;
    let scale = n_sq * 2.0 / (std::f64::consts::PI * waist * waist);
    let lobe = alpha.as_complex().conj();
    let rot = Complex64::from_polar(1.0, alpha.phase());
    let a2 = alpha.alpha_sq();
    Ok(RealMap::from_fn(*grid, |x, y| {
        let u = Complex64::new(x, y) * (2f64.sqrt() / waist);
        let plus = -(u - lobe).norm_sqr();
        let minus = -(u + lobe).norm_sqr();
        let fringe = 2.0 * a_mag * (u * rot).im;
        let cross = 2.0 * (-(u.norm_sqr()) - a2).exp() * (fringe - theta).cos();
        scale * (plus.exp() + minus.exp() + cross)
    }))
}

/// Parity of the mode occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
            Parity::Neither => write!(f, "neither"),
        }
    }
}

/// Classify the cat by its coefficient support: even when every odd-L
/// coefficient vanishes (threshold 1e-12), odd symmetrically, else neither.
pub fn parity_class(spec: &CatSpec) -> Result<Parity> {
    let coeffs = cat_coefficients(spec)?;
    let mut max_even = 0.0f64;
    let mut max_odd = 0.0f64;
    for (l, c) in coeffs.iter().enumerate() {
        let m = c.norm();
        if l % 2 == 0 {
            max_even = max_even.max(m);
        } else {
            max_odd = max_odd.max(m);
        }
    }
    if max_odd < 1e-12 {
        Ok(Parity::Even)
    } else if max_even < 1e-12 {
        Ok(Parity::Odd)
    } else {
        Ok(Parity::Neither)
    }
}

/// The size criterion M = sqrt(2) |a| / 2.
pub fn macroscopicity(alpha: &AlphaParam) -> f64 {
    2f64.sqrt() * alpha.magnitude() / 2.0
}
