//! Kolmogorov turbulence: phase-screen synthesis, split-step channels, OAM
//! crosstalk, and cat-state fidelity decay.
//!
//! Screens are synthesized spectrally: unit complex Gaussian noise filtered
//! by the square root of the phase power spectrum
//! `Phi(f) = 0.023 r0^{-5/3} f^{-11/3}` (f in cycles per meter), inverse
//! transformed, real part taken, piston removed. The steep spectrum carries
//! a large share of its structure below the frequency resolution of the
//! grid, so four levels of 3x3 subharmonic cells (cell-averaged power,
//! explicit plane waves) are added by default; without them the structure
//! function falls 25-50% short of 6.88 (r/r0)^{5/3} over the inertial range.
//! Every screen is keyed by a single u64 seed; channels derive per-screen
//! seeds from (master seed, realization index, screen index), so
//! realizations are reproducible independent of execution order.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::cat::{cat_coefficients, cat_field, CatSpec};
use crate::density::{fidelity_pure, project_to_density, DensityMatrix};
use crate::error::{Error, Result};
use crate::fft::ifft2_centered;
use crate::grid::{inner_product, ComplexField, Grid2D};
use crate::modes::lg_mode_unchecked;
use crate::propagation::angular_spectrum_propagate;
use crate::analysis::truncate_and_renormalize;

/// One random phase realization of a turbulence segment.
#[derive(Debug, Clone)]
pub struct PhaseScreen {
    pub grid: Grid2D,
    /// Phase samples in radians, zero mean over the grid.
    pub phase: Array2<f64>,
    /// Fried parameter (meters); infinity means no turbulence.
    pub r0: f64,
    pub seed: u64,
}

impl PhaseScreen {
    pub fn variance(&self) -> f64 {
        let n = self.phase.len() as f64;
        self.phase.iter().map(|p| p * p).sum::<f64>() / n
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-screen seed for (master seed, realization, screen slot).
pub fn derive_screen_seed(master: u64, realization: u64, screen: u64) -> u64 {
    splitmix(master ^ splitmix(realization ^ splitmix(screen ^ 0x6f61_6d5f_6361_7421)))
}

fn phase_psd(r0: f64, f_sq: f64) -> f64 {
    // 0.023 goes with frequencies in cycles per meter
    0.023 * r0.powf(-5.0 / 3.0) * f_sq.powf(-11.0 / 6.0)
}

/// Mean of the PSD over a square frequency cell, by 9x9 midpoint sampling.
/// The spectrum is steep enough that center evaluation badly underestimates
/// the innermost cells.
fn cell_averaged_psd(r0: f64, fx: f64, fy: f64, width: f64) -> f64 {
    const N: usize = 9;
    let mut sum = 0.0;
    let mut count = 0usize;
    for a in 0..N {
        let ox = ((a as f64 + 0.5) / N as f64 - 0.5) * width;
        for b in 0..N {
            let oy = ((b as f64 + 0.5) / N as f64 - 0.5) * width;
            let f_sq = (fx + ox).powi(2) + (fy + oy).powi(2);
            if f_sq > 0.0 {
                sum += phase_psd(r0, f_sq);
                count += 1;
            }
        }
    }
    sum / count as f64
}

/// Spectrally synthesized Kolmogorov phase screen with four subharmonic
/// levels, deterministic in `seed`.
pub fn kolmogorov_screen(grid: &Grid2D, r0: f64, seed: u64) -> Result<PhaseScreen> {
    kolmogorov_screen_with_levels(grid, r0, seed, 4)
}

/// Screen synthesis with an explicit subharmonic level count (0 = plain FFT
/// screen; each level adds a 3x3 ring of cells one third the size).
pub fn kolmogorov_screen_with_levels(
    grid: &Grid2D,
    r0: f64,
    seed: u64,
    subharmonic_levels: usize,
) -> Result<PhaseScreen> {
    if !(r0 > 0.0) {
        return Err(Error::InvalidParameter {
            field: "r0",
            message: format!("Fried parameter must be positive, got {r0}"),
        });
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let dfx = 1.0 / grid.extent_x();
    let dfy = 1.0 / grid.extent_y();
    let cell_area = dfx * dfy;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut spectrum = Array2::from_elem((ny, nx), Complex64::new(0.0, 0.0));
    for ((j, i), v) in spectrum.indexed_iter_mut() {
        // two draws per cell in fixed row-major order, DC discarded after
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        let fx = crate::fft::freq_centered(i, nx, grid.dx());
        let fy = crate::fft::freq_centered(j, ny, grid.dy());
        let f2 = fx * fx + fy * fy;
        if f2 == 0.0 {
            continue;
        }
        let sigma = (phase_psd(r0, f2) * cell_area).sqrt();
        *v = Complex64::new(g1 * sigma, g2 * sigma);
    }
    let field = ifft2_centered(&spectrum);
    let scale = (nx * ny) as f64;
    let mut phase = field.mapv(|v| v.re * scale);

    // subharmonic plane waves fill in the sub-resolution frequencies
    if subharmonic_levels > 0 {
        let square = dfx.max(dfy);
        let xs: Vec<f64> = (0..nx).map(|i| grid.x(i)).collect();
        let ys: Vec<f64> = (0..ny).map(|j| grid.y(j)).collect();
        for level in 1..=subharmonic_levels {
            let df_p = square / 3f64.powi(level as i32);
            for kx in -1i32..=1 {
                for ky in -1i32..=1 {
                    let g1: f64 = rng.sample(StandardNormal);
                    let g2: f64 = rng.sample(StandardNormal);
                    if kx == 0 && ky == 0 {
                        continue;
                    }
                    let fx = kx as f64 * df_p;
                    let fy = ky as f64 * df_p;
                    let sigma = (cell_averaged_psd(r0, fx, fy, df_p) * df_p * df_p).sqrt();
                    let amp = Complex64::new(g1 * sigma, g2 * sigma);
                    let ex: Vec<Complex64> = xs
                        .iter()
                        .map(|&x| Complex64::from_polar(1.0, std::f64::consts::TAU * fx * x))
                        .collect();
                    let ey: Vec<Complex64> = ys
                        .iter()
                        .map(|&y| Complex64::from_polar(1.0, std::f64::consts::TAU * fy * y))
                        .collect();
                    for ((j, i), p) in phase.indexed_iter_mut() {
                        *p += (amp * ey[j] * ex[i]).re;
                    }
                }
            }
        }
    }

    let mean = phase.iter().sum::<f64>() / phase.len() as f64;
    phase.mapv_inplace(|p| p - mean);
    Ok(PhaseScreen {
        grid: *grid,
        phase,
        r0,
        seed,
    })
}

/// Multi-screen channel geometry: `n_screens` segments of `segment_length`
/// each, one screen at the head of each segment.
#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub grid: Grid2D,
    pub n_screens: usize,
    pub segment_length: f64,
    pub r0_per_screen: Vec<f64>,
    pub wavelength: f64,
    pub master_seed: u64,
}

impl ChannelSpec {
    /// Channel with the same Fried parameter on every screen.
    pub fn uniform(
        grid: Grid2D,
        n_screens: usize,
        segment_length: f64,
        r0: f64,
        wavelength: f64,
        master_seed: u64,
    ) -> Result<Self> {
        if n_screens == 0 {
            return Err(Error::InvalidParameter {
                field: "n_screens",
                message: "need at least one screen".into(),
            });
        }
        if !(segment_length > 0.0) {
            return Err(Error::InvalidParameter {
                field: "segment_length",
                message: format!("must be positive, got {segment_length}"),
            });
        }
        if !(r0 > 0.0) {
            return Err(Error::InvalidParameter {
                field: "r0",
                message: format!("must be positive, got {r0}"),
            });
        }
        Ok(Self {
            grid,
            n_screens,
            segment_length,
            r0_per_screen: vec![r0; n_screens],
            wavelength,
            master_seed,
        })
    }

    /// Same geometry with a different uniform Fried parameter.
    pub fn with_r0(&self, r0: f64) -> Self {
        Self {
            r0_per_screen: vec![r0; self.n_screens],
            ..self.clone()
        }
    }

    fn screens_for(&self, realization: u64) -> Result<Vec<PhaseScreen>> {
        (0..self.n_screens)
            .map(|s| {
                kolmogorov_screen(
                    &self.grid,
                    self.r0_per_screen[s],
                    derive_screen_seed(self.master_seed, realization, s as u64),
                )
            })
            .collect()
    }
}

/// Supergaussian edge absorber: unity over the central region, rolling off
/// hard near the grid boundary so scattered light is absorbed instead of
/// wrapping around.
fn edge_mask(grid: &Grid2D) -> Array2<f64> {
    let r_abs = 0.46 * grid.min_extent();
    Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| {
        let r = (grid.x(i).powi(2) + grid.y(j).powi(2)).sqrt();
        (-(r / r_abs).powi(20)).exp()
    })
}

fn apply_screens(
    f: &ComplexField,
    screens: &[PhaseScreen],
    segment_length: f64,
    wavelength: f64,
    mask: &Array2<f64>,
) -> Result<ComplexField> {
    let mut field = f.clone();
    for screen in screens {
        field
            .samples
            .zip_mut_with(&screen.phase, |v, &p| *v *= Complex64::from_polar(1.0, p));
        field = angular_spectrum_propagate(&field, segment_length, wavelength)?;
        field.samples.zip_mut_with(mask, |v, &m| *v *= m);
    }
    Ok(field)
}

/// Split-step propagation through one channel realization: alternate screen
/// phase and free-space segment, with an absorbing edge after each segment.
pub fn propagate_channel(
    f: &ComplexField,
    chan: &ChannelSpec,
    realization: u64,
) -> Result<ComplexField> {
    if f.grid != chan.grid {
        return Err(Error::GridMismatch);
    }
    let screens = chan.screens_for(realization)?;
    let mask = edge_mask(&chan.grid);
    apply_screens(f, &screens, chan.segment_length, chan.wavelength, &mask)
}

/// Ensemble-mean crosstalk powers |C^{dL}|^2 around a probe charge.
#[derive(Debug, Clone)]
pub struct CrosstalkRow {
    pub l0: i32,
    pub delta_l: Vec<i32>,
    pub mean_power: Vec<f64>,
}

/// Propagate the `l0` eigenmode through `n_realizations` channel draws and
/// average the projected power onto charges `l0 + dL` for `|dL| <= window`.
pub fn crosstalk_row(
    l0: i32,
    waist: f64,
    chan: &ChannelSpec,
    n_realizations: usize,
    window: i32,
) -> Result<CrosstalkRow> {
    if n_realizations == 0 {
        return Err(Error::InvalidParameter {
            field: "n_realizations",
            message: "need at least one realization".into(),
        });
    }
    let input = lg_mode_unchecked(l0, waist, &chan.grid);
    let delta_l: Vec<i32> = (-window..=window).collect();
    let probes: Vec<ComplexField> = delta_l
        .iter()
        .map(|d| lg_mode_unchecked(l0 + d, waist, &chan.grid))
        .collect();
    let mask = edge_mask(&chan.grid);
    let per_realization: Vec<Result<Vec<f64>>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|r| {
            let screens = chan.screens_for(r)?;
            let out = apply_screens(&input, &screens, chan.segment_length, chan.wavelength, &mask)?;
            probes
                .iter()
                .map(|p| inner_product(p, &out).map(|c| c.norm_sqr()))
                .collect()
        })
        .collect();
    let mut mean = vec![0.0; delta_l.len()];
    for row in per_realization {
        let row = row?;
        for (acc, v) in mean.iter_mut().zip(row.iter()) {
            *acc += v;
        }
    }
    for v in mean.iter_mut() {
        *v /= n_realizations as f64;
    }
    Ok(CrosstalkRow {
        l0,
        delta_l,
        mean_power: mean,
    })
}

/// Sweep configuration: subspace dimension, draws per point, probe charges.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub dim: usize,
    pub n_realizations: usize,
    pub probes: Vec<i32>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            dim: 17,
            n_realizations: 10,
            probes: vec![0, 10, 20],
        }
    }
}

/// Per-realization bookkeeping at one strength point.
#[derive(Debug, Clone)]
pub struct RealizationRecord {
    pub index: usize,
    /// Seed of the realization's first screen.
    pub seed: u64,
    /// Power captured in the projected subspace.
    pub captured_power: f64,
    /// Pure-state fidelity of this single realization.
    pub fidelity_pure: f64,
}

/// One point of the fidelity curve.
#[derive(Debug, Clone)]
pub struct StrengthPoint {
    /// Turbulence strength w0 / r0.
    pub strength: f64,
    pub r0: f64,
    /// Fidelity of the ensemble-averaged density matrix (default reading).
    pub fidelity_ensemble: f64,
    /// Mean of per-realization pure-state fidelities (alternate reading).
    pub fidelity_pure_mean: f64,
    pub realizations: Vec<RealizationRecord>,
}

/// Survival probabilities |<L0|out>|^2 per strength for one probe charge.
#[derive(Debug, Clone)]
pub struct SurvivalCurve {
    pub l0: i32,
    pub survival: Vec<f64>,
}

/// Full sweep output.
#[derive(Debug, Clone)]
pub struct TurbulenceSweep {
    pub strengths: Vec<f64>,
    pub points: Vec<StrengthPoint>,
    pub survival: Vec<SurvivalCurve>,
}

/// Fidelity decay of a cat state against turbulence strength `w0 / r0`.
///
/// Per point: propagate the cat through `n_realizations` channel draws,
/// project every output onto the first `dim` charges, average the projectors
/// (normalized by captured power) into a simulated density matrix, and
/// evaluate the fidelity against the ideal truncated cat. Probe eigenmodes
/// ride through the same screens and report their survival probability.
pub fn cat_fidelity_vs_strength(
    cat: &CatSpec,
    strengths: &[f64],
    chan_template: &ChannelSpec,
    cfg: &SweepConfig,
) -> Result<TurbulenceSweep> {
    if strengths.is_empty() {
        return Err(Error::InvalidParameter {
            field: "strengths",
            message: "need at least one strength".into(),
        });
    }
    if !strengths.iter().all(|s| s.is_finite() && *s >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "strengths",
            message: "strengths must be finite and non-negative".into(),
        });
    }
    if cfg.dim == 0 || cfg.dim > cat.l_max + 1 {
        return Err(Error::DimensionMismatch {
            expected: cat.l_max + 1,
            got: cfg.dim,
        });
    }
    let grid = chan_template.grid;
    let input = cat_field(cat, &grid)?;
    let target = truncate_and_renormalize(&cat_coefficients(cat)?, cfg.dim)?;
    let basis: Vec<ComplexField> = (0..cfg.dim)
        .map(|l| {
            lg_mode_unchecked(
                l as i32,
                cat.waist_policy.waist_for(l as i32, cat.waist),
                &grid,
            )
        })
        .collect();
    let probe_fields: Vec<ComplexField> = cfg
        .probes
        .iter()
        .map(|&l| lg_mode_unchecked(l, cat.waist, &grid))
        .collect();
    let mask = edge_mask(&grid);

    let mut points = Vec::with_capacity(strengths.len());
    let mut survival: Vec<SurvivalCurve> = cfg
        .probes
        .iter()
        .map(|&l0| SurvivalCurve {
            l0,
            survival: Vec::with_capacity(strengths.len()),
        })
        .collect();

    for &strength in strengths {
        let r0 = if strength == 0.0 {
            f64::INFINITY
        } else {
            cat.waist / strength
        };
        let chan = chan_template.with_r0(r0);

        struct RealizationOut {
            coeffs: Vec<Complex64>,
            captured: f64,
            fid_pure: f64,
            probe_survival: Vec<f64>,
        }
        let results: Vec<Result<RealizationOut>> = (0..cfg.n_realizations as u64)
            .into_par_iter()
            .map(|r| {
                let screens = chan.screens_for(r)?;
                let out = apply_screens(&input, &screens, chan.segment_length, chan.wavelength, &mask)?;
                let coeffs: Vec<Complex64> = basis
                    .iter()
                    .map(|b| inner_product(b, &out))
                    .collect::<Result<_>>()?;
                let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
                let fid_pure = if captured > 0.0 {
                    let mut amp = Complex64::new(0.0, 0.0);
                    for (t, c) in target.iter().zip(coeffs.iter()) {
                        amp += t.conj() * c;
                    }
                    amp.norm_sqr() / captured
                } else {
                    0.0
                };
                let mut probe_survival = Vec::with_capacity(probe_fields.len());
                for probe in &probe_fields {
                    let out_p =
                        apply_screens(probe, &screens, chan.segment_length, chan.wavelength, &mask)?;
                    probe_survival.push(inner_product(probe, &out_p)?.norm_sqr());
                }
                Ok(RealizationOut {
                    coeffs,
                    captured,
                    fid_pure,
                    probe_survival,
                })
            })
            .collect();

        // deterministic reduction in realization order
        let mut accumulated = nalgebra::DMatrix::from_element(
            cfg.dim,
            cfg.dim,
            Complex64::new(0.0, 0.0),
        );
        let mut records = Vec::with_capacity(cfg.n_realizations);
        let mut fid_pure_sum = 0.0;
        let mut probe_sums = vec![0.0; cfg.probes.len()];
        for (r, result) in results.into_iter().enumerate() {
            let out = result?;
            for i in 0..cfg.dim {
                for j in 0..cfg.dim {
                    accumulated[(i, j)] += out.coeffs[i] * out.coeffs[j].conj();
                }
            }
            fid_pure_sum += out.fid_pure;
            for (acc, s) in probe_sums.iter_mut().zip(out.probe_survival.iter()) {
                *acc += s;
            }
            records.push(RealizationRecord {
                index: r,
                seed: derive_screen_seed(chan.master_seed, r as u64, 0),
                captured_power: out.captured,
                fidelity_pure: out.fid_pure,
            });
        }
        let trace: f64 = (0..cfg.dim).map(|i| accumulated[(i, i)].re).sum();
        if trace <= 0.0 {
            return Err(Error::ZeroPower);
        }
        let rho_sim: DensityMatrix = project_to_density(&accumulated.map(|v| v / trace))?;
        let fidelity_ensemble = fidelity_pure(&target, &rho_sim)?;
        points.push(StrengthPoint {
            strength,
            r0,
            fidelity_ensemble,
            fidelity_pure_mean: fid_pure_sum / cfg.n_realizations as f64,
            realizations: records,
        });
        for (curve, sum) in survival.iter_mut().zip(probe_sums.iter()) {
            curve.survival.push(sum / cfg.n_realizations as f64);
        }
    }
    Ok(TurbulenceSweep {
        strengths: strengths.to_vec(),
        points,
        survival,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::WaistPolicy;

    const LAMBDA: f64 = 780e-9;
    const W0: f64 = 0.0735;

    fn grid256() -> Grid2D {
        Grid2D::square(256, 2.0).unwrap()
    }

    fn channel(r0: f64, seed: u64) -> ChannelSpec {
        ChannelSpec::uniform(grid256(), 5, 2.0, r0, LAMBDA, seed).unwrap()
    }

    #[test]
    fn screens_are_deterministic_in_the_seed() {
        let g = grid256();
        let a = kolmogorov_screen(&g, 0.1, 42).unwrap();
        let b = kolmogorov_screen(&g, 0.1, 42).unwrap();
        assert_eq!(a.phase, b.phase);
        let c = kolmogorov_screen(&g, 0.1, 43).unwrap();
        assert!(a.phase != c.phase);
    }

    #[test]
    fn screens_have_zero_mean() {
        let g = grid256();
        let s = kolmogorov_screen(&g, 0.05, 7).unwrap();
        let mean = s.phase.iter().sum::<f64>() / s.phase.len() as f64;
        // relative to the rms phase, which is large at this strength
        assert!(mean.abs() < 1e-9 * s.variance().sqrt().max(1.0));
    }

    #[test]
    fn infinite_r0_gives_a_quiet_screen() {
        let g = grid256();
        let s = kolmogorov_screen(&g, 1e6 * g.extent_x(), 3).unwrap();
        assert!(s.variance() < 1e-6, "variance {:.3e}", s.variance());
    }

    #[test]
    fn negative_r0_is_rejected() {
        let g = grid256();
        assert!(kolmogorov_screen(&g, 0.0, 1).is_err());
        assert!(kolmogorov_screen(&g, -1.0, 1).is_err());
    }

    #[test]
    fn structure_function_tracks_kolmogorov() {
        // moderate ensemble here; the acceptance suite runs the full check
        let g = grid256();
        let r0 = 0.02;
        let n_screens = 60;
        let lags: Vec<usize> = vec![4, 8, 16, 24, 32];
        let mut d_est = vec![0.0f64; lags.len()];
        let mut counts = vec![0usize; lags.len()];
        for s in 0..n_screens {
            let screen = kolmogorov_screen(&g, r0, 1000 + s).unwrap();
            for (li, &lag) in lags.iter().enumerate() {
                for j in 0..g.ny() {
                    for i in 0..g.nx() - lag {
                        let d = screen.phase[[j, i + lag]] - screen.phase[[j, i]];
                        d_est[li] += d * d;
                        counts[li] += 1;
                    }
                }
            }
        }
        for (li, &lag) in lags.iter().enumerate() {
            let measured = d_est[li] / counts[li] as f64;
            let r = lag as f64 * g.dx();
            let expected = 6.88 * (r / r0).powf(5.0 / 3.0);
            let rel = (measured - expected).abs() / expected;
            assert!(
                rel < 0.20,
                "lag {lag}: D = {measured:.1} vs {expected:.1} ({:.1}%)",
                100.0 * rel
            );
        }
    }

    #[test]
    fn quiet_channel_equals_free_space() {
        let g = grid256();
        let chan = channel(f64::INFINITY, 5);
        let input = lg_mode_unchecked(0, W0, &g);
        let out = propagate_channel(&input, &chan, 0).unwrap();
        let free = angular_spectrum_propagate(&input, 10.0, LAMBDA).unwrap();
        let peak = free.max_abs();
        // split-step phases round differently from the one-shot transfer
        // function (k z ~ 1e7 rad), so agreement bottoms out near 1e-9
        for (a, b) in out.samples.iter().zip(free.samples.iter()) {
            assert!((a - b).norm() < 5e-8 * peak);
        }
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let chan = channel(0.1, 5);
        let other = Grid2D::square(128, 2.0).unwrap();
        let input = lg_mode_unchecked(0, W0, &other);
        assert!(matches!(
            propagate_channel(&input, &chan, 0),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn strong_turbulence_loses_little_power_to_the_edges() {
        let chan = channel(W0 / 2.0, 11);
        let input = lg_mode_unchecked(0, W0, &grid256());
        let out = propagate_channel(&input, &chan, 0).unwrap();
        let loss = input.power() - out.power();
        assert!(loss >= 0.0);
        assert!(loss / input.power() < 0.02, "edge loss {:.3}%", 100.0 * loss);
    }

    #[test]
    fn crosstalk_without_turbulence_is_a_delta() {
        let chan = channel(f64::INFINITY, 9);
        let row = crosstalk_row(4, W0, &chan, 1, 5).unwrap();
        for (d, p) in row.delta_l.iter().zip(row.mean_power.iter()) {
            if *d == 0 {
                assert!((p - 1.0).abs() < 1e-6, "C0 = {p}");
            } else {
                assert!(*p < 1e-8, "dL={d}: {p:.3e}");
            }
        }
    }

    #[test]
    fn crosstalk_is_symmetric_and_bounded() {
        // gentle turbulence: most power stays in low |dL|, some leaks to
        // radial modes outside the p = 0 window. L0 = 0 so the +/- dL
        // symmetry is exact (mirror symmetry of the screen ensemble).
        let chan = channel(W0 / 0.06, 13);
        let narrow = crosstalk_row(0, W0, &chan, 40, 1).unwrap();
        let mid = crosstalk_row(0, W0, &chan, 40, 3).unwrap();
        let wide = crosstalk_row(0, W0, &chan, 40, 8).unwrap();
        let t = |row: &CrosstalkRow| row.mean_power.iter().sum::<f64>();
        let (t1, t3, t8) = (t(&narrow), t(&mid), t(&wide));
        assert!(t8 <= 1.0 + 1e-9, "total {t8}");
        assert!(t1 < t3 && t3 <= t8, "window growth: {t1} {t3} {t8}");
        assert!(t8 > 0.6, "window capture {t8}");
        // isotropic screens: mean |C^{+d}|^2 ~ mean |C^{-d}|^2
        for d in 1..=3i32 {
            let plus = wide.mean_power[(8 + d) as usize];
            let minus = wide.mean_power[(8 - d) as usize];
            let scale = plus.max(minus);
            assert!(
                (plus - minus).abs() < 0.35 * scale + 1e-4,
                "dL={d}: {plus:.4e} vs {minus:.4e}"
            );
        }
    }

    fn small_sweep_cat() -> CatSpec {
        CatSpec::new(
            crate::cat::AlphaParam::from_alpha_sq(3.5).unwrap(),
            0.0,
            W0,
            WaistPolicy::Constant,
            50,
            LAMBDA,
        )
        .unwrap()
    }

    #[test]
    fn sweep_is_deterministic_and_decays() {
        let cat = small_sweep_cat();
        // coarser grid keeps the spec-sized sweep (10 points x 10 draws) fast
        let grid = Grid2D::square(128, 2.0).unwrap();
        let chan = ChannelSpec::uniform(grid, 5, 2.0, 1.0, LAMBDA, 42).unwrap();
        let strengths: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
        let cfg = SweepConfig {
            dim: 17,
            n_realizations: 10,
            probes: vec![0, 10],
        };
        let a = cat_fidelity_vs_strength(&cat, &strengths, &chan, &cfg).unwrap();
        let b = cat_fidelity_vs_strength(&cat, &strengths, &chan, &cfg).unwrap();
        for (pa, pb) in a.points.iter().zip(b.points.iter()) {
            assert_eq!(pa.fidelity_ensemble.to_bits(), pb.fidelity_ensemble.to_bits());
            assert_eq!(pa.fidelity_pure_mean.to_bits(), pb.fidelity_pure_mean.to_bits());
        }
        // decay across the sweep; the exact s -> 0 limit is covered by
        // zero_strength_gives_unit_fidelity
        assert!(
            a.points[0].fidelity_ensemble > a.points.last().unwrap().fidelity_ensemble,
            "no decay across the sweep"
        );
        // monotone trend within isotonic residual 0.05
        let fids: Vec<f64> = a.points.iter().map(|p| p.fidelity_ensemble).collect();
        let iso = isotonic_decreasing(&fids);
        for (f, i) in fids.iter().zip(iso.iter()) {
            assert!((f - i).abs() < 0.05, "residual {}", (f - i).abs());
        }
        // survival present for both probes at each strength
        assert_eq!(a.survival.len(), 2);
        assert_eq!(a.survival[0].survival.len(), strengths.len());
    }

    /// Pool-adjacent-violators fit of a non-increasing sequence.
    fn isotonic_decreasing(y: &[f64]) -> Vec<f64> {
        let mut blocks: Vec<(f64, usize)> = Vec::new();
        for &v in y {
            blocks.push((v, 1));
            while blocks.len() > 1 {
                let n = blocks.len();
                let (a, na) = blocks[n - 2];
                let (b, nb) = blocks[n - 1];
                if b > a {
                    let merged = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
                    blocks.truncate(n - 2);
                    blocks.push(merged);
                } else {
                    break;
                }
            }
        }
        let mut out = Vec::with_capacity(y.len());
        for (v, n) in blocks {
            out.extend(std::iter::repeat(v).take(n));
        }
        out
    }

    #[test]
    fn zero_strength_gives_unit_fidelity() {
        let cat = small_sweep_cat();
        let chan = channel(1.0, 7);
        let cfg = SweepConfig {
            dim: 17,
            n_realizations: 2,
            probes: vec![],
        };
        let sweep = cat_fidelity_vs_strength(&cat, &[0.0], &chan, &cfg).unwrap();
        assert!(
            sweep.points[0].fidelity_ensemble > 1.0 - 1e-6,
            "{}",
            sweep.points[0].fidelity_ensemble
        );
    }

    #[test]
    fn empty_strengths_rejected() {
        let cat = small_sweep_cat();
        let chan = channel(1.0, 7);
        let cfg = SweepConfig::default();
        assert!(cat_fidelity_vs_strength(&cat, &[], &chan, &cfg).is_err());
    }
}
