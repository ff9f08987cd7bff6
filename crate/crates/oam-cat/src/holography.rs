//! Amplitude-encoded phase holograms and the simulated reconstruction loop.
//!
//! The encoding writes `H = M * mod(Arg(E) + pi (1 - M) + 2 pi x / T, 2 pi)`
//! on the modulator, where the bound map `M` solves
//! `sinc(pi (M - 1)) = |E| / max|E|`. The first grating order of
//! `exp(i M mod(psi, 2 pi))` carries `sinc(pi (M - 1)) exp(i pi (M - 1))`
//! per period; the `pi (1 - M)` term inside the sawtooth cancels that
//! residual phase, so filtering the first order reproduces the target
//! amplitude and phase simultaneously.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::fft::{fft2_centered, freq_centered, ifft2_centered};
use crate::grid::{ComplexField, Grid2D};
use ndarray::Array2;

/// Phase hologram with its encoding bound map.
#[derive(Debug, Clone)]
pub struct Hologram {
    pub grid: Grid2D,
    /// Phase to imprint, wrapped to [0, 2 pi).
    pub phase: Array2<f64>,
    /// Blazed-grating period along x (meters).
    pub grating_period: f64,
    /// Normalized amplitude bound M in [0, 1] per pixel.
    pub bound: Array2<f64>,
    /// Spectral radius holding 99.9% of the target power (cycles/m);
    /// used for the order-overlap check during reconstruction.
    pub target_bandwidth: f64,
}

impl Hologram {
    /// Hologram with a uniform bound and no target phase: a plain blazed
    /// grating scaled by `m`. Useful for calibrating the first-order
    /// diffraction amplitude.
    pub fn uniform(grid: Grid2D, m: f64, grating_period: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::InvalidParameter {
                field: "bound",
                message: format!("M must lie in [0, 1], got {m}"),
            });
        }
        check_period(grating_period)?;
        let phase = Array2::from_shape_fn((grid.ny(), grid.nx()), |(_, i)| {
            m * (TAU * grid.x(i) / grating_period).rem_euclid(TAU)
        });
        let bound = Array2::from_elem((grid.ny(), grid.nx()), m);
        Ok(Self {
            grid,
            phase,
            grating_period,
            bound,
            target_bandwidth: 0.0,
        })
    }
}

fn check_period(period: f64) -> Result<()> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::InvalidParameter {
            field: "grating_period",
            message: format!("must be positive, got {period}"),
        });
    }
    Ok(())
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Solve sinc(pi (M - 1)) = A for M in [0, 1] by bisection to 1e-10.
///
/// sinc is monotone increasing on that interval, from 0 at M = 0 to 1 at
/// M = 1, so the root is unique.
pub fn inverse_sinc(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !a.is_finite() {
        return Err(Error::InvalidParameter {
            field: "amplitude",
            message: format!("must lie in [0, 1], got {a}"),
        });
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    if a == 1.0 {
        return Ok(1.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if sinc(PI * (mid - 1.0)) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Spectral radius containing the requested fraction of the field power.
fn spectral_radius(field: &ComplexField, fraction: f64) -> f64 {
    let spectrum = fft2_centered(&field.samples);
    let grid = field.grid;
    let mut by_radius: Vec<(f64, f64)> = spectrum
        .indexed_iter()
        .map(|((j, i), v)| {
            let fx = freq_centered(i, grid.nx(), grid.dx());
            let fy = freq_centered(j, grid.ny(), grid.dy());
            ((fx * fx + fy * fy).sqrt(), v.norm_sqr())
        })
        .collect();
    by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = by_radius.iter().map(|(_, p)| p).sum();
    let mut acc = 0.0;
    for (r, p) in by_radius {
        acc += p;
        if acc >= fraction * total {
            return r;
        }
    }
    0.0
}

/// Encode the target field as an amplitude-bounded phase hologram:
/// per pixel `A = |E| / max|E|`, `M = inverse_sinc(A)`, and
/// `H = M * mod(Arg(E) + pi (1 - M) + 2 pi x / T, 2 pi)`.
pub fn synthesize_hologram(target: &ComplexField, grating_period: f64) -> Result<Hologram> {
    check_period(grating_period)?;
    let max_amp = target.max_abs();
    if max_amp <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let grid = target.grid;
    let mut phase = Array2::zeros((grid.ny(), grid.nx()));
    let mut bound = Array2::zeros((grid.ny(), grid.nx()));
    for ((j, i), v) in target.samples.indexed_iter() {
        let a = v.norm() / max_amp;
        let m = inverse_sinc(a.min(1.0))?;
        let blaze = TAU * grid.x(i) / grating_period;
        let compensation = PI * (1.0 - m);
        phase[[j, i]] = m * (v.arg() + compensation + blaze).rem_euclid(TAU);
        bound[[j, i]] = m;
    }
    Ok(Hologram {
        grid,
        phase,
        grating_period,
        bound,
        target_bandwidth: spectral_radius(target, 0.999),
    })
}

/// Illuminate the hologram with a unit-power Gaussian, isolate the first
/// diffraction order with a circular filter of radius `0.45 / T`, and return
/// the demodulated reconstructed field.
///
/// Errors when the recorded target bandwidth reaches the edge of the
/// first-order passband (the orders would overlap).
pub fn simulate_reconstruction(holo: &Hologram, input_waist: f64) -> Result<ComplexField> {
    if !(input_waist > 0.0) {
        return Err(Error::InvalidParameter {
            field: "input_waist",
            message: format!("must be positive, got {input_waist}"),
        });
    }
    let grid = holo.grid;
    let carrier = 1.0 / holo.grating_period;
    let limit = 0.55 * carrier;
    if holo.target_bandwidth >= limit {
        return Err(Error::OrderOverlap {
            bandwidth: holo.target_bandwidth,
            limit,
            period: holo.grating_period,
        });
    }
    // Gaussian illumination, normalized to unit power on the grid so the
    // reconstructed power reads off the first-order efficiency directly
    let w2 = input_waist * input_waist;
    let mut ill_power = 0.0;
    let mut modulated = Array2::zeros((grid.ny(), grid.nx()));
    for ((j, i), out) in modulated.indexed_iter_mut() {
        let x = grid.x(i);
        let y = grid.y(j);
        let amp = (-(x * x + y * y) / w2).exp();
        ill_power += amp * amp;
        // illumination, phase screen, and demodulation to baseband in one pass
        let ph = holo.phase[[j, i]] - TAU * x * carrier;
        *out = Complex64::from_polar(amp, ph);
    }
    let scale = 1.0 / (ill_power * grid.cell_area()).sqrt();
    modulated.mapv_inplace(|v| v * scale);
    let mut spectrum = fft2_centered(&modulated);
    let r_filter = 0.45 * carrier;
    for ((j, i), v) in spectrum.indexed_iter_mut() {
        let fx = freq_centered(i, grid.nx(), grid.dx());
        let fy = freq_centered(j, grid.ny(), grid.dy());
        if fx * fx + fy * fy > r_filter * r_filter {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    Ok(ComplexField {
        grid,
        samples: ifft2_centered(&spectrum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::{cat_field, CatSpec};
    use crate::grid::overlap_power;
    use crate::modes::{lg_mode, LGModeSpec, WaistPolicy};
    use crate::propagation::winding_number;
    use proptest::prelude::*;

    const LAMBDA: f64 = 780e-9;
    const W0: f64 = 200e-6;

    fn grid() -> Grid2D {
        Grid2D::square(512, 12.0 * W0).unwrap()
    }

    fn default_period(g: &Grid2D) -> f64 {
        8.0 * g.dx()
    }

    #[test]
    fn inverse_sinc_endpoints_and_midpoint() {
        assert_eq!(inverse_sinc(0.0).unwrap(), 0.0);
        assert_eq!(inverse_sinc(1.0).unwrap(), 1.0);
        // bisection oracle: sin(x)/x = 0.5 at x = 1.89549, so M = 1 - x/pi
        let m = inverse_sinc(0.5).unwrap();
        assert!((m - (1.0 - 1.8954942670339809 / PI)).abs() < 1e-9);
        assert!((m - 0.3966).abs() < 1e-4);
        assert!(inverse_sinc(-0.1).is_err());
        assert!(inverse_sinc(1.1).is_err());
    }

    #[test]
    fn inverse_sinc_inverts_the_forward_map() {
        for a in [0.01, 0.2, 0.41, 0.77, 0.93] {
            let m = inverse_sinc(a).unwrap();
            assert!((sinc(PI * (m - 1.0)) - a).abs() < 1e-9, "A = {a}");
        }
    }

    proptest! {
        #[test]
        fn inverse_sinc_is_monotone(a1 in 0.0f64..1.0, a2 in 0.0f64..1.0) {
            prop_assume!(a1 < a2);
            let m1 = inverse_sinc(a1).unwrap();
            let m2 = inverse_sinc(a2).unwrap();
            prop_assert!(m1 < m2 + 1e-10);
        }
    }

    #[test]
    fn plane_wave_target_gives_a_pure_blazed_grating() {
        let g = grid();
        let flat = ComplexField::from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        let holo = synthesize_hologram(&flat, default_period(&g)).unwrap();
        assert!(holo.bound.iter().all(|&m| (m - 1.0).abs() < 1e-9));
        // phase is the bare grating ramp
        for ((_, i), &p) in holo.phase.indexed_iter().take(2000) {
            let expected = (TAU * g.x(i) / default_period(&g)).rem_euclid(TAU);
            assert!((p - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_target_is_rejected() {
        let g = grid();
        let zero = ComplexField::zeros(g);
        assert!(matches!(
            synthesize_hologram(&zero, default_period(&g)),
            Err(Error::ZeroPower)
        ));
    }

    #[test]
    fn synthesis_is_deterministic() {
        let g = grid();
        let f = lg_mode(&LGModeSpec::new(1, W0, LAMBDA).unwrap(), &g).unwrap();
        let h1 = synthesize_hologram(&f, default_period(&g)).unwrap();
        let h2 = synthesize_hologram(&f, default_period(&g)).unwrap();
        assert_eq!(h1.phase, h2.phase);
        assert_eq!(h1.bound, h2.bound);
    }

    #[test]
    fn uniform_bound_diffraction_matches_sinc_within_two_percent() {
        let g = grid();
        for m in [0.25, 0.5, 0.75, 1.0] {
            let holo = Hologram::uniform(g, m, default_period(&g)).unwrap();
            // smooth contained illumination: no truncation sidelobes leak
            // past the order filter
            let recon = simulate_reconstruction(&holo, 0.25 * g.extent_x()).unwrap();
            // recon ~ c1 * illumination with unit-power illumination
            let amplitude = recon.power().sqrt();
            let expected = sinc(PI * (m - 1.0));
            assert!(
                (amplitude - expected).abs() / expected < 0.02,
                "M = {m}: {amplitude:.5} vs {expected:.5}"
            );
        }
    }

    #[test]
    fn gaussian_reconstruction_fidelity_above_99_percent() {
        let g = grid();
        let target = lg_mode(&LGModeSpec::new(0, W0, LAMBDA).unwrap(), &g).unwrap();
        let holo = synthesize_hologram(&target, default_period(&g)).unwrap();
        let recon = simulate_reconstruction(&holo, g.extent_x()).unwrap();
        let fidelity = overlap_power(&recon, &target).unwrap();
        assert!(fidelity > 0.99, "fidelity {fidelity:.4}");
    }

    #[test]
    fn lg1_reconstruction_fidelity_above_95_percent() {
        let g = grid();
        let target = lg_mode(&LGModeSpec::new(1, W0, LAMBDA).unwrap(), &g).unwrap();
        let holo = synthesize_hologram(&target, default_period(&g)).unwrap();
        let recon = simulate_reconstruction(&holo, g.extent_x()).unwrap();
        let fidelity = overlap_power(&recon, &target).unwrap();
        assert!(fidelity > 0.95, "fidelity {fidelity:.4}");
    }

    #[test]
    fn reconstruction_preserves_winding_up_to_l10() {
        let g = Grid2D::square(512, 20.0 * W0).unwrap();
        for l in [3, 10] {
            let target = lg_mode(&LGModeSpec::new(l, W0, LAMBDA).unwrap(), &g).unwrap();
            let holo = synthesize_hologram(&target, 8.0 * g.dx()).unwrap();
            let recon = simulate_reconstruction(&holo, g.extent_x()).unwrap();
            let radius = W0 * (l as f64 / 2.0).sqrt();
            assert_eq!(winding_number(&recon, (0.0, 0.0), radius).unwrap(), l);
        }
    }

    #[test]
    fn eq5_cat_reconstruction_fidelity_above_90_percent() {
        let g = Grid2D::square(1024, 40.0 * W0).unwrap();
        let spec = CatSpec::new(
            crate::cat::AlphaParam::from_alpha_sq(3.5).unwrap(),
            0.0,
            W0,
            WaistPolicy::Eq5,
            50,
            LAMBDA,
        )
        .unwrap();
        let target = cat_field(&spec, &g).unwrap();
        let holo = synthesize_hologram(&target, 8.0 * g.dx()).unwrap();
        let recon = simulate_reconstruction(&holo, g.extent_x()).unwrap();
        let fidelity = overlap_power(&recon, &target).unwrap();
        assert!(fidelity > 0.90, "fidelity {fidelity:.4}");
    }

    #[test]
    fn overlapping_orders_are_rejected() {
        let g = grid();
        let target = lg_mode(&LGModeSpec::new(1, W0, LAMBDA).unwrap(), &g).unwrap();
        // absurdly long grating period: carrier sits inside the target band
        let holo = synthesize_hologram(&target, g.extent_x()).unwrap();
        assert!(matches!(
            simulate_reconstruction(&holo, g.extent_x()),
            Err(Error::OrderOverlap { .. })
        ));
    }
}
