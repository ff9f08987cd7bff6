//! Laguerre-Gaussian modes (radial index p = 0) and the waist-matching rule.
//!
//! The unit-power mode with topological charge `L` and waist `w` at its focal
//! plane is
//!
//! ```text
//! u_L(r, phi) = sqrt(2 / (pi |L|!)) (1/w) (sqrt(2) r / w)^{|L|}
//!               exp(-r^2 / w^2) exp(i L phi)
//! ```
//!
//! The radial factor is evaluated in log space so charges up to the default
//! truncation (50) stay finite everywhere on the grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D};

/// Specification of a single p = 0 Laguerre-Gaussian mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LGModeSpec {
    pub l: i32,
    /// Beam waist at z = 0 (meters).
    pub waist: f64,
    /// Vacuum wavelength (meters); irrelevant at the waist plane but carried
    /// for propagation.
    pub wavelength: f64,
}

impl LGModeSpec {
    pub fn new(l: i32, waist: f64, wavelength: f64) -> Result<Self> {
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
        Ok(Self { l, waist, wavelength })
    }
}

/// Waist assignment for the modes of a superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaistPolicy {
    /// Every mode uses the input waist w0.
    Constant,
    /// Mode L uses the matched waist w0 * 2^{-|L|} (2|L|+1)!! / |L|!.
    Eq5,
}

impl WaistPolicy {
    pub fn waist_for(&self, l: i32, w0: f64) -> f64 {
        match self {
            WaistPolicy::Constant => w0,
            WaistPolicy::Eq5 => matched_waist(l, w0),
        }
    }
}

impl std::fmt::Display for WaistPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaistPolicy::Constant => write!(f, "constant"),
            WaistPolicy::Eq5 => write!(f, "eq5"),
        }
    }
}

/// Matched waist w_L = w0 * 2^{-|L|} (2|L|+1)!! / |L|!.
///
/// Evaluated through the ratio recurrence w_{L+1}/w_L = (2L+3)/(2L+2), which
/// stays finite far beyond the overflow point of the factorial quotient.
pub fn matched_waist(l: i32, w0: f64) -> f64 {
    let n = l.unsigned_abs() as u64;
    let mut ratio = 1.0_f64;
    for k in 0..n {
        let k = k as f64;
        ratio *= (2.0 * k + 3.0) / (2.0 * k + 2.0);
    }
    w0 * ratio
}

/// rms radius of the intensity of the p = 0 mode: sqrt((|L| + 1) / 2) * w.
///
/// This is the exact second moment of r^{2|L|} exp(-2 r^2 / w^2); see the
/// quadrature check in the tests.
pub fn lg_rms_radius(l: i32, waist: f64) -> f64 {
    ((l.unsigned_abs() as f64 + 1.0) / 2.0).sqrt() * waist
}

/// Radius of peak intensity, w * sqrt(|L|/2).
pub fn lg_peak_radius(l: i32, waist: f64) -> f64 {
    (l.unsigned_abs() as f64 / 2.0).sqrt() * waist
}

/// 0.5 * ln(|l|!) computed as a cumulative sum; exact enough for amplitudes.
fn half_ln_factorial(l: u32) -> f64 {
    let mut s = 0.0;
    for k in 2..=l as u64 {
        s += (k as f64).ln();
    }
    0.5 * s
}

/// Evaluate the mode without grid-adequacy checks. Used internally where a
/// superposition is validated as a whole.
pub(crate) fn lg_mode_unchecked(l: i32, waist: f64, grid: &Grid2D) -> ComplexField {
    let la = l.unsigned_abs();
    let prefactor = (2.0 / std::f64::consts::PI).sqrt() / waist;
    let half_lnf = half_ln_factorial(la);
    ComplexField::from_fn(*grid, |x, y| {
        let r2 = x * x + y * y;
        let t2 = 2.0 * r2 / (waist * waist);
        let radial = if la == 0 {
            prefactor * (-0.5 * t2).exp()
        } else if r2 == 0.0 {
            0.0
        } else {
            prefactor * (0.5 * la as f64 * t2.ln() - 0.5 * t2 - half_lnf).exp()
        };
        if radial == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let phi = y.atan2(x);
            Complex64::from_polar(radial, l as f64 * phi)
        }
    })
}

/// Unit-power p = 0 Laguerre-Gaussian mode at z = 0.
///
/// The grid must span at least six times the mode rms radius, and the
/// discretized power must come out within 1e-6 of unity; otherwise a
/// grid-too-small error is returned.
pub fn lg_mode(spec: &LGModeSpec, grid: &Grid2D) -> Result<ComplexField> {
    let rms = lg_rms_radius(spec.l, spec.waist);
    if grid.min_extent() < 6.0 * rms {
        return Err(Error::GridTooSmall(format!(
            "extent {:.3e} m < 6 x rms radius {:.3e} m for L = {}",
            grid.min_extent(),
            rms,
            spec.l
        )));
    }
    let field = lg_mode_unchecked(spec.l, spec.waist, grid);
    let power = field.power();
    if (power - 1.0).abs() > 1e-6 {
        return Err(Error::GridTooSmall(format!(
            "discrete power {power:.9} deviates from 1 by more than 1e-6 for L = {}",
            spec.l
        )));
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inner_product;

    const LAMBDA: f64 = 780e-9;
    const W0: f64 = 200e-6;

    fn grid(extent_waists: f64) -> Grid2D {
        Grid2D::square(512, extent_waists * W0).unwrap()
    }

    /// Simpson quadrature of integral g(r) dr on [0, rmax].
    fn simpson(g: impl Fn(f64) -> f64, rmax: f64, n: usize) -> f64 {
        let h = rmax / n as f64;
        let mut s = g(0.0) + g(rmax);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(k as f64 * h);
        }
        s * h / 3.0
    }

    /// Independent oracle: rms radius of r^{2L} exp(-2r^2/w^2) by quadrature.
    fn rms_by_quadrature(l: u32, w: f64) -> f64 {
        let intensity = |r: f64| {
            if r == 0.0 {
                if l == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (2.0 * l as f64 * (r / w).ln() - 2.0 * r * r / (w * w)).exp()
            }
        };
        let rmax = 8.0 * w * (l as f64 + 1.0).sqrt();
        let num = simpson(|r| r * r * intensity(r) * r, rmax, 4000);
        let den = simpson(|r| intensity(r) * r, rmax, 4000);
        (num / den).sqrt()
    }

    #[test]
    fn rms_closed_form_matches_quadrature_oracle() {
        for l in [0u32, 1, 4, 9, 20] {
            let oracle = rms_by_quadrature(l, W0);
            let closed = lg_rms_radius(l as i32, W0);
            assert!(
                (oracle - closed).abs() / closed < 1e-6,
                "L={l}: quadrature {oracle:.7e} vs closed form {closed:.7e}"
            );
        }
    }

    #[test]
    fn matched_waist_small_l_values() {
        assert_eq!(matched_waist(0, W0), W0);
        assert!((matched_waist(1, W0) - 1.5 * W0).abs() < 1e-18);
        assert!((matched_waist(2, W0) - 1.875 * W0).abs() < 1e-18);
        assert_eq!(matched_waist(-2, W0), matched_waist(2, W0));
    }

    #[test]
    fn matched_waist_recurrence_to_l50() {
        let mut w = matched_waist(0, 1.0);
        for l in 0..50 {
            let next = matched_waist(l + 1, 1.0);
            let ratio = (2.0 * l as f64 + 3.0) / (2.0 * l as f64 + 2.0);
            assert!((next / w - ratio).abs() < 1e-12, "L={l}");
            assert!(next.is_finite());
            w = next;
        }
    }

    #[test]
    fn fundamental_mode_is_unit_power_gaussian() {
        let spec = LGModeSpec::new(0, W0, LAMBDA).unwrap();
        let f = lg_mode(&spec, &grid(12.0)).unwrap();
        assert!((f.power() - 1.0).abs() < 1e-6);
        // peak at the origin
        let peak = f.max_abs();
        let center = f.samples[[256, 256]].norm();
        assert!((peak - center).abs() < 1e-12);
    }

    #[test]
    fn ring_peak_radius_matches_analytic() {
        let spec = LGModeSpec::new(3, W0, LAMBDA).unwrap();
        let g = grid(12.0);
        let f = lg_mode(&spec, &g).unwrap();
        // scan intensity along +x
        let j0 = g.ny() / 2;
        let mut best = (0usize, 0.0f64);
        for i in g.nx() / 2..g.nx() {
            let v = f.samples[[j0, i]].norm_sqr();
            if v > best.1 {
                best = (i, v);
            }
        }
        let r_peak = g.x(best.0);
        let expected = W0 * (1.5f64).sqrt(); // 244.9 um
        assert!(
            (r_peak - expected).abs() <= g.dx(),
            "peak at {r_peak:.6e}, expected {expected:.6e}"
        );
    }

    #[test]
    fn modes_have_unit_power_up_to_l20() {
        let g = grid(40.0);
        for l in [1, 2, 5, 10, 20] {
            let f = lg_mode(&LGModeSpec::new(l, W0, LAMBDA).unwrap(), &g).unwrap();
            assert!((f.power() - 1.0).abs() < 1e-6, "L={l}");
        }
    }

    #[test]
    fn azimuthal_orthogonality_same_waist() {
        let g = grid(12.0);
        let f1 = lg_mode(&LGModeSpec::new(1, W0, LAMBDA).unwrap(), &g).unwrap();
        let f2 = lg_mode(&LGModeSpec::new(2, W0, LAMBDA).unwrap(), &g).unwrap();
        assert!(inner_product(&f1, &f2).unwrap().norm() < 1e-8);
    }

    #[test]
    fn orthogonality_survives_unequal_waists() {
        let g = grid(40.0);
        let f2 = lg_mode(
            &LGModeSpec::new(2, matched_waist(2, W0), LAMBDA).unwrap(),
            &g,
        )
        .unwrap();
        let f5 = lg_mode(
            &LGModeSpec::new(5, matched_waist(5, W0), LAMBDA).unwrap(),
            &g,
        )
        .unwrap();
        assert!(inner_product(&f2, &f5).unwrap().norm() < 1e-8);
    }

    #[test]
    fn cross_orthogonality_matrix_up_to_l8() {
        let g = grid(40.0);
        let modes: Vec<_> = (0..=8)
            .map(|l| lg_mode(&LGModeSpec::new(l, W0, LAMBDA).unwrap(), &g).unwrap())
            .collect();
        for a in 0..modes.len() {
            for b in 0..a {
                let ip = inner_product(&modes[a], &modes[b]).unwrap().norm();
                assert!(ip < 1e-8, "L={a} vs L={b}: {ip:.3e}");
            }
        }
    }

    #[test]
    fn rms_radius_discrete_matches_closed_form() {
        let g = grid(40.0);
        for l in [0, 1, 4, 12, 20] {
            let f = lg_mode(&LGModeSpec::new(l, W0, LAMBDA).unwrap(), &g).unwrap();
            let measured = f.rms_radius().unwrap();
            let expected = lg_rms_radius(l, W0);
            assert!(
                (measured - expected).abs() / expected < 5e-3,
                "L={l}: {measured:.6e} vs {expected:.6e}"
            );
        }
    }

    #[test]
    fn gaussian_rms_is_waist_over_sqrt2() {
        let g = grid(12.0);
        let f = lg_mode(&LGModeSpec::new(0, W0, LAMBDA).unwrap(), &g).unwrap();
        let expected = W0 / 2f64.sqrt();
        assert!((f.rms_radius().unwrap() - expected).abs() / expected < 1e-4);
    }

    #[test]
    fn shifted_gaussian_overlap_matches_analytic() {
        let g = grid(12.0);
        let f0 = lg_mode(&LGModeSpec::new(0, W0, LAMBDA).unwrap(), &g).unwrap();
        let norm = (2.0 / std::f64::consts::PI).sqrt() / W0;
        for d in [0.5 * W0, W0, 2.0 * W0] {
            let shifted = ComplexField::from_fn(g, |x, y| {
                Complex64::new(
                    norm * (-((x - d).powi(2) + y * y) / (W0 * W0)).exp(),
                    0.0,
                )
            });
            let ip = inner_product(&f0, &shifted).unwrap();
            let expected = (-d * d / (2.0 * W0 * W0)).exp();
            assert!(
                (ip.re - expected).abs() < 1e-8 && ip.im.abs() < 1e-12,
                "d={d}: {ip} vs {expected}"
            );
        }
    }

    #[test]
    fn too_small_grid_is_rejected() {
        let tiny = Grid2D::square(64, 2.0 * W0).unwrap();
        let r = lg_mode(&LGModeSpec::new(4, W0, LAMBDA).unwrap(), &tiny);
        assert!(matches!(r, Err(Error::GridTooSmall(_))));
    }
}
