//! Lobe geometry of two-lobe intensity maps.
//!
//! The split axis is the principal axis of the intensity covariance, so
//! rotated cats are handled without a preferred direction. The separation is
//! read off the covariance eigenvalues: for a symmetric mixture of two equal
//! isotropic blobs at +/- m e1 with per-axis variance s^2, the covariance
//! eigenvalues are (m^2 + s^2, s^2), so 2 sqrt(l1 - l2) recovers the center
//! distance exactly, at any overlap. The central interference term of a cat
//! intensity cancels in l1 - l2 as well (equal mass enters both eigenvalues),
//! which keeps the estimator exact for overlapping kittens where half-plane
//! centroids are biased by several percent.

use crate::error::{Error, Result};
use crate::grid::RealMap;

/// Geometry report for a two-lobe intensity map.
#[derive(Debug, Clone)]
pub struct LobeMetrics {
    /// Distance between the lobe centers (meters).
    pub separation: f64,
    /// Overlap of the two unit-mass fitted Gaussians, in [0, 1].
    pub overlap: f64,
    /// Mass centroid of the half plane on the +principal-axis side.
    pub centroid_plus: (f64, f64),
    /// Mass centroid of the other half plane.
    pub centroid_minus: (f64, f64),
    /// Unit vector of the covariance principal axis.
    pub principal_axis: (f64, f64),
    /// Fitted per-lobe Gaussian sigma (meters).
    pub lobe_sigma: f64,
}

/// Eigendecomposition of a symmetric 2x2 matrix; returns
/// (l_major, l_minor, major axis unit vector).
fn eig2(cxx: f64, cxy: f64, cyy: f64) -> (f64, f64, (f64, f64)) {
    let tr = cxx + cyy;
    let diff = cxx - cyy;
    let disc = (diff * diff + 4.0 * cxy * cxy).sqrt();
    let l1 = 0.5 * (tr + disc);
    let l2 = 0.5 * (tr - disc);
    let axis = if cxy.abs() > 1e-300 {
        let v = (l1 - cyy, cxy);
        let n = (v.0 * v.0 + v.1 * v.1).sqrt();
        (v.0 / n, v.1 / n)
    } else if cxx >= cyy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    (l1, l2, axis)
}

/// erf via the Abramowitz-Stegun 7.1.26 rational approximation (|err| < 1.5e-7).
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / 2f64.sqrt()))
}

/// Coordinates and weights of the pixels that carry mass, rotated into the
/// (axis, perpendicular) frame about the centroid.
struct FitData {
    s: Vec<f64>,
    t: Vec<f64>,
    w: Vec<f64>,
}

/// Least-squares fit of
/// `A [exp(-((s-m)^2+t^2)/(2 sig^2)) + exp(-((s+m)^2+t^2)/(2 sig^2))]`
/// by damped Gauss-Newton on (A, m, sig). Returns (m, sig).
fn fit_two_gaussians(data: &FitData, a0: f64, m0: f64, sig0: f64) -> (f64, f64) {
    let mut a = a0;
    let mut m = m0.max(0.0);
    let mut sig = sig0;
    for _ in 0..60 {
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for k in 0..data.s.len() {
            let (s, t, y) = (data.s[k], data.t[k], data.w[k]);
            let e1 = (-((s - m).powi(2) + t * t) / (2.0 * sig * sig)).exp();
            let e2 = (-((s + m).powi(2) + t * t) / (2.0 * sig * sig)).exp();
            let r = y - a * (e1 + e2);
            let d_a = e1 + e2;
            let d_m = a * (e1 * (s - m) - e2 * (s + m)) / (sig * sig);
            let d_sig = a * (e1 * ((s - m).powi(2) + t * t) + e2 * ((s + m).powi(2) + t * t))
                / (sig * sig * sig);
            let j = [d_a, d_m, d_sig];
            for p in 0..3 {
                jtr[p] += j[p] * r;
                for q in 0..3 {
                    jtj[p][q] += j[p] * j[q];
                }
            }
        }
        for p in 0..3 {
            jtj[p][p] *= 1.0 + 1e-9;
            jtj[p][p] += 1e-300;
        }
        let step = solve3(&jtj, &jtr);
        let (da, dm, dsig) = (step[0], step[1], step[2]);
        if !da.is_finite() || !dm.is_finite() || !dsig.is_finite() {
            break;
        }
        a = (a + da).max(1e-300);
        m = (m + dm).max(0.0);
        sig = (sig + dsig).max(1e-12 * sig0.max(1e-300));
        if dm.abs() < 1e-12 * sig0 && dsig.abs() < 1e-12 * sig0 {
            break;
        }
    }
    (m, sig)
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> [f64; 3] {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 {
        return [0.0; 3];
    }
    let mut out = [0.0; 3];
    for col in 0..3 {
        let mut m = *a;
        for row in 0..3 {
            m[row][col] = b[row];
        }
        out[col] = det(&m) / d;
    }
    out
}

/// Split-plane and covariance analysis of a (possibly overlapping) two-lobe
/// intensity map. Degenerate single-lobe inputs give separation 0, overlap 1.
pub fn lobe_metrics(intensity: &RealMap) -> Result<LobeMetrics> {
    let mass_total: f64 = intensity.values.iter().filter(|v| **v > 0.0).sum();
    if !(mass_total > 0.0) {
        return Err(Error::ZeroPower);
    }
    let (cx, cy) = intensity.centroid()?;
    let (cxx, cxy, cyy) = intensity.covariance()?;
    let (l1, l2, axis) = eig2(cxx, cxy, cyy);
    let separation = 2.0 * (l1 - l2).max(0.0).sqrt();

    // half-plane centroids on either side of the split plane through the
    // centroid, perpendicular to the principal axis
    let mut mp = 0.0;
    let mut mm = 0.0;
    let mut cp = (0.0, 0.0);
    let mut cm = (0.0, 0.0);
    let grid = intensity.grid;
    for ((j, i), &v) in intensity.values.indexed_iter() {
        if v <= 0.0 {
            continue;
        }
        let x = grid.x(i);
        let y = grid.y(j);
        let s = (x - cx) * axis.0 + (y - cy) * axis.1;
        if s >= 0.0 {
            mp += v;
            cp.0 += v * x;
            cp.1 += v * y;
        } else {
            mm += v;
            cm.0 += v * x;
            cm.1 += v * y;
        }
    }
    let centroid_plus = if mp > 0.0 {
        (cp.0 / mp, cp.1 / mp)
    } else {
        (cx, cy)
    };
    let centroid_minus = if mm > 0.0 {
        (cm.0 / mm, cm.1 / mm)
    } else {
        (cx, cy)
    };

    // two-Gaussian least-squares fit in the principal frame, seeded by moments
    let peak = intensity.max();
    let keep = 1e-8 * peak;
    let mut data = FitData {
        s: Vec::new(),
        t: Vec::new(),
        w: Vec::new(),
    };
    for ((j, i), &v) in intensity.values.indexed_iter() {
        if v > keep {
            let x = grid.x(i) - cx;
            let y = grid.y(j) - cy;
            data.s.push(x * axis.0 + y * axis.1);
            data.t.push(-x * axis.1 + y * axis.0);
            data.w.push(v);
        }
    }
    let sig0 = l2.max(1e-300).sqrt();
    let m0 = separation / 2.0;
    let a0 = peak / (1.0 + (-2.0 * (m0 / sig0).powi(2)).exp());
    let (m_fit, sig_fit) = fit_two_gaussians(&data, a0, m0, sig0);
    // overlap of the two unit-mass fitted components: the min integral of two
    // equal isotropic Gaussians a distance 2m apart is 2 Phi(-m / sigma)
    let overlap = (2.0 * normal_cdf(-m_fit / sig_fit)).clamp(0.0, 1.0);

    Ok(LobeMetrics {
        separation,
        overlap,
        centroid_plus,
        centroid_minus,
        principal_axis: axis,
        lobe_sigma: sig_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat::{cat_intensity_analytic, AlphaParam};
    use crate::grid::Grid2D;

    const W0: f64 = 200e-6;

    fn grid() -> Grid2D {
        Grid2D::square(512, 12.0 * W0).unwrap()
    }

    fn cat_map(alpha_sq: f64, phase: f64, theta: f64) -> RealMap {
        let alpha = AlphaParam::new(alpha_sq.sqrt(), phase).unwrap();
        cat_intensity_analytic(&alpha, theta, W0, &grid()).unwrap()
    }

    #[test]
    fn separation_matches_sqrt2_alpha_w() {
        for alpha_sq in [0.5, 1.5, 3.5] {
            let m = lobe_metrics(&cat_map(alpha_sq, 0.0, 0.0)).unwrap();
            let expected = 2f64.sqrt() * alpha_sq.sqrt() * W0;
            assert!(
                (m.separation - expected).abs() / expected < 5e-3,
                "alpha_sq={alpha_sq}: {:.6e} vs {expected:.6e}",
                m.separation
            );
        }
    }

    #[test]
    fn cat_at_3p5_separates_by_529_microns() {
        let m = lobe_metrics(&cat_map(3.5, 0.0, 0.0)).unwrap();
        assert!(
            (m.separation - 529.15e-6).abs() < 2e-6,
            "{:.6e}",
            m.separation
        );
    }

    #[test]
    fn ratios_match_square_root_law() {
        let s: Vec<f64> = [0.5, 1.5, 3.5]
            .iter()
            .map(|&a| lobe_metrics(&cat_map(a, 0.0, 0.0)).unwrap().separation)
            .collect();
        let r1 = s[1] / s[0];
        let r2 = s[2] / s[0];
        assert!((r1 - 3f64.sqrt()).abs() / 3f64.sqrt() < 0.02, "r1 = {r1}");
        assert!((r2 - 7f64.sqrt()).abs() / 7f64.sqrt() < 0.02, "r2 = {r2}");
    }

    #[test]
    fn separation_is_rotation_invariant() {
        let a = lobe_metrics(&cat_map(3.5, 0.0, 0.0)).unwrap();
        let b = lobe_metrics(&cat_map(3.5, std::f64::consts::FRAC_PI_3, 0.0)).unwrap();
        assert!((a.separation - b.separation).abs() <= grid().dx());
    }

    #[test]
    fn half_plane_centroids_straddle_the_axis() {
        let m = lobe_metrics(&cat_map(3.5, 0.0, 0.0)).unwrap();
        // alpha real: lobes on the x axis
        assert!(m.principal_axis.0.abs() > 0.99);
        let expected = 3.5f64.sqrt() * W0 / 2f64.sqrt();
        assert!((m.centroid_plus.0.abs() - expected).abs() / expected < 0.02);
        assert!((m.centroid_minus.0.abs() - expected).abs() / expected < 0.02);
        assert!(m.centroid_plus.0 * m.centroid_minus.0 < 0.0);
    }

    #[test]
    fn overlap_collapses_at_the_cat_boundary() {
        let kitten = lobe_metrics(&cat_map(0.5, 0.0, 0.0)).unwrap();
        let mid = lobe_metrics(&cat_map(1.5, 0.0, 0.0)).unwrap();
        let cat = lobe_metrics(&cat_map(3.5, 0.0, 0.0)).unwrap();
        assert!(kitten.overlap > 0.15, "kitten overlap {}", kitten.overlap);
        assert!(cat.overlap < 0.01, "cat overlap {}", cat.overlap);
        assert!(kitten.overlap > mid.overlap && mid.overlap > cat.overlap);
    }

    #[test]
    fn single_lobe_degenerates_cleanly() {
        let m = lobe_metrics(&cat_map(0.0, 0.0, 0.0)).unwrap();
        assert!(m.separation < 1e-9, "separation {:.3e}", m.separation);
        assert!(m.overlap > 0.999, "overlap {}", m.overlap);
    }

    #[test]
    fn zero_map_is_rejected() {
        let z = RealMap::from_fn(grid(), |_, _| 0.0);
        assert!(matches!(lobe_metrics(&z), Err(Error::ZeroPower)));
    }
}
