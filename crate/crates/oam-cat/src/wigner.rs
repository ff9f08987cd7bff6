//! Wigner function of the quantum cat state, for side-by-side comparison
//! with the two-lobe intensity pictures.
//!
//! The map evaluated here is
//!
//! ```text
//! W = N^2 [ W0(x - x0, p) + W0(x + x0, p) + 2 cos(4 x0 p + phi) W0(x, p) ]
//! N^2 = 1 / (2 (1 + cos(theta_cat) exp(-2 x0^2)))
//! ```
//!
//! with the single-packet Gaussian `W0(x, p) = (2/pi) exp(-2 x^2 - 2 p^2)`.
//! That packet width is the one choice consistent with the fringe frequency
//! `4 x0` and the `exp(-2 x0^2)` branch overlap: the cross term then
//! integrates to exactly `cos(phi) exp(-2 x0^2)`, so the map has unit mass
//! whenever the fringe phase and the normalization phase agree. `phi` and
//! `theta_cat` are exposed separately; physical cats set them equal.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Symmetric phase-space sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    nx: usize,
    np: usize,
    x_half: f64,
    p_half: f64,
}

impl PhaseSpaceGrid {
    pub fn new(nx: usize, np: usize, x_half: f64, p_half: f64) -> Result<Self> {
        if nx < 16 || np < 16 || nx % 2 != 0 || np % 2 != 0 {
            return Err(Error::InvalidParameter {
                field: "phase_space_grid",
                message: format!("sample counts must be even and >= 16, got {nx}x{np}"),
            });
        }
        if !(x_half > 0.0) || !(p_half > 0.0) {
            return Err(Error::InvalidParameter {
                field: "phase_space_grid",
                message: "half ranges must be positive".into(),
            });
        }
        Ok(Self { nx, np, x_half, p_half })
    }

    /// Square grid with half range `half` on both quadratures.
    pub fn square(n: usize, half: f64) -> Result<Self> {
        Self::new(n, n, half, half)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_half / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.p_half / self.np as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        (j as f64 - (self.np / 2) as f64) * self.dp()
    }

    pub fn x_half(&self) -> f64 {
        self.x_half
    }

    pub fn p_half(&self) -> f64 {
        self.p_half
    }
}

/// Wigner map on a phase-space grid; rows index p, columns index x.
#[derive(Debug, Clone)]
pub struct WignerMap {
    pub grid: PhaseSpaceGrid,
    pub values: Array2<f64>,
}

impl WignerMap {
    /// Discrete integral of the map.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dp()
    }

    /// Marginal position density, integral W dp per column.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = self.grid.dp();
        (0..self.grid.nx())
            .map(|i| self.values.column(i).sum() * dp)
            .collect()
    }
}

fn w0(x: f64, p: f64) -> f64 {
    2.0 / std::f64::consts::PI * (-2.0 * (x * x + p * p)).exp()
}

/// Cat-state Wigner map: two displaced packets plus the oscillating cross term.
///
/// Requires both half ranges to reach `3 + 2 x0`, and checks the discrete
/// normalization afterwards; either failure reports a grid-range error.
pub fn wigner_qcs(
    x0: f64,
    phi: f64,
    theta_cat: f64,
    grid: &PhaseSpaceGrid,
) -> Result<WignerMap> {
    if !(x0 >= 0.0) || !x0.is_finite() {
        return Err(Error::InvalidParameter {
            field: "x0",
            message: format!("must be finite and non-negative, got {x0}"),
        });
    }
    let needed = 3.0 + 2.0 * x0;
    if grid.x_half() < needed || grid.p_half() < needed {
        return Err(Error::GridRange(format!(
            "half ranges ({}, {}) below 3 + 2 x0 = {needed}",
            grid.x_half(),
            grid.p_half()
        )));
    }
    let overlap = (-2.0 * x0 * x0).exp();
    let denom = 2.0 * (1.0 + theta_cat.cos() * overlap);
    if denom < 1e-12 {
        return Err(Error::DegenerateCat);
    }
    let n_sq = 1.0 / denom;
    let values = Array2::from_shape_fn((grid.np(), grid.nx()), |(j, i)| {
        let x = grid.x(i);
        let p = grid.p(j);
        n_sq * (w0(x - x0, p) + w0(x + x0, p) + 2.0 * (4.0 * x0 * p + phi).cos() * w0(x, p))
    });
    let map = WignerMap { grid: *grid, values };
    let total = map.total();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::GridRange(format!(
            "normalization check failed: integral = {total:.9} (phi and theta_cat disagree, \
             or the grid clips the packets)"
        )));
    }
    Ok(map)
}
