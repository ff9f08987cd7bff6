//! Sampled 2-D fields on centered Cartesian grids.
//!
//! All coordinates are in meters. A grid with `nx` columns and pitch `dx`
//! samples `x_i = (i - nx/2) * dx`, so the origin is always a sample point
//! and even sample counts are required. Complex fields are stored row-major
//! with shape `(ny, nx)`; index `[j, i]` is the point `(x_i, y_j)`.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Centered Cartesian sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid2D {
    /// Build a grid. Sample counts must be even and at least 16; pitches positive.
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 16 || ny < 16 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::InvalidParameter {
                field: "grid",
                message: format!("sample counts must be even and >= 16, got {nx}x{ny}"),
            });
        }
        if !(dx > 0.0) || !(dy > 0.0) || !dx.is_finite() || !dy.is_finite() {
            return Err(Error::InvalidParameter {
                field: "grid",
                message: format!("pitches must be positive and finite, got dx={dx}, dy={dy}"),
            });
        }
        Ok(Self { nx, ny, dx, dy })
    }

    /// Square grid with `n` samples per side covering `extent` meters.
    pub fn square(n: usize, extent: f64) -> Result<Self> {
        if !(extent > 0.0) {
            return Err(Error::InvalidParameter {
                field: "extent",
                message: format!("extent must be positive, got {extent}"),
            });
        }
        let d = extent / n as f64;
        Self::new(n, n, d, d)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    /// x coordinate of column `i`.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx
    }

    /// y coordinate of row `j`.
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy
    }

    pub fn extent_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn extent_y(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    /// Smaller of the two full extents.
    pub fn min_extent(&self) -> f64 {
        self.extent_x().min(self.extent_y())
    }

    /// Area element dx*dy.
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Complex scalar field sampled on a [`Grid2D`].
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub grid: Grid2D,
    pub samples: Array2<Complex64>,
}

impl ComplexField {
    /// Evaluate `f(x, y)` on every grid point.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let samples =
            Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| f(grid.x(i), grid.y(j)));
        Self { grid, samples }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            samples: Array2::zeros((grid.ny(), grid.nx())),
        }
    }

    /// Discrete power integral sum |E|^2 dx dy.
    pub fn power(&self) -> f64 {
        let s: f64 = self.samples.iter().map(|v| v.norm_sqr()).sum();
        s * self.grid.cell_area()
    }

    /// Rescale to unit power. Errors on zero-power fields.
    pub fn normalized(&self) -> Result<Self> {
        let p = self.power();
        if p <= 0.0 || !p.is_finite() {
            return Err(Error::ZeroPower);
        }
        let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
        Ok(Self {
            grid: self.grid,
            samples: &self.samples * scale,
        })
    }

    /// |E|^2 map.
    pub fn intensity(&self) -> RealMap {
        RealMap {
            grid: self.grid,
            values: self.samples.mapv(|v| v.norm_sqr()),
        }
    }

    /// Phase map wrapped into [0, 2pi).
    pub fn phase(&self) -> RealMap {
        RealMap {
            grid: self.grid,
            values: self.samples.mapv(|v| v.arg().rem_euclid(TAU)),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Intensity-weighted rms radius about the grid origin.
    pub fn rms_radius(&self) -> Result<f64> {
        self.intensity().rms_radius_about(0.0, 0.0)
    }

    /// Intensity-weighted rms radius about the intensity centroid.
    pub fn rms_radius_centered(&self) -> Result<f64> {
        let intensity = self.intensity();
        let (cx, cy) = intensity.centroid()?;
        intensity.rms_radius_about(cx, cy)
    }
}

/// Discrete inner product integral f* g dx dy. Both fields must share a grid.
pub fn inner_product(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in f.samples.iter().zip(g.samples.iter()) {
        acc += a.conj() * b;
    }
    Ok(acc * f.grid.cell_area())
}

/// Normalized squared overlap |<f, g>|^2 / (P_f P_g).
pub fn overlap_power(f: &ComplexField, g: &ComplexField) -> Result<f64> {
    let ip = inner_product(f, g)?;
    let pf = f.power();
    let pg = g.power();
    if pf <= 0.0 || pg <= 0.0 {
        return Err(Error::ZeroPower);
    }
    Ok(ip.norm_sqr() / (pf * pg))
}

/// Real scalar map (intensity, phase, interferogram) on a [`Grid2D`].
#[derive(Debug, Clone)]
pub struct RealMap {
    pub grid: Grid2D,
    pub values: Array2<f64>,
}

impl RealMap {
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values =
            Array2::from_shape_fn((grid.ny(), grid.nx()), |(j, i)| f(grid.x(i), grid.y(j)));
        Self { grid, values }
    }

    /// Discrete integral sum v dx dy.
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mass centroid. Errors when the map has no positive mass.
    pub fn centroid(&self) -> Result<(f64, f64)> {
        let mut mass = 0.0;
        let mut mx = 0.0;
        let mut my = 0.0;
        for ((j, i), &v) in self.values.indexed_iter() {
            mass += v;
            mx += v * self.grid.x(i);
            my += v * self.grid.y(j);
        }
        if mass <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok((mx / mass, my / mass))
    }

    /// Second-moment (covariance) matrix about the centroid, as (cxx, cxy, cyy).
    pub fn covariance(&self) -> Result<(f64, f64, f64)> {
        let (cx, cy) = self.centroid()?;
        let mut mass = 0.0;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut syy = 0.0;
        for ((j, i), &v) in self.values.indexed_iter() {
            let x = self.grid.x(i) - cx;
            let y = self.grid.y(j) - cy;
            mass += v;
            sxx += v * x * x;
            sxy += v * x * y;
            syy += v * y * y;
        }
        Ok((sxx / mass, sxy / mass, syy / mass))
    }

    fn rms_radius_about(&self, cx: f64, cy: f64) -> Result<f64> {
        let mut mass = 0.0;
        let mut m2 = 0.0;
        for ((j, i), &v) in self.values.indexed_iter() {
            let x = self.grid.x(i) - cx;
            let y = self.grid.y(j) - cy;
            mass += v;
            m2 += v * (x * x + y * y);
        }
        if mass <= 0.0 {
            return Err(Error::ZeroPower);
        }
        Ok((m2 / mass).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_coordinates_are_centered() {
        let g = Grid2D::new(16, 32, 0.5, 0.25).unwrap();
        assert_eq!(g.x(8), 0.0);
        assert_eq!(g.y(16), 0.0);
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.y(0), -4.0);
        assert_eq!(g.extent_x(), 8.0);
    }

    #[test]
    fn grid_rejects_odd_or_small_counts() {
        assert!(Grid2D::new(15, 16, 1.0, 1.0).is_err());
        assert!(Grid2D::new(16, 18, 1.0, 1.0).is_ok());
        assert!(Grid2D::new(8, 8, 1.0, 1.0).is_err());
        assert!(Grid2D::new(16, 16, 0.0, 1.0).is_err());
    }

    #[test]
    fn unit_gaussian_power_and_self_overlap() {
        let g = Grid2D::square(128, 12.0 * 1e-3).unwrap();
        let w = 1e-3;
        let norm = (2.0 / std::f64::consts::PI).sqrt() / w;
        let f = ComplexField::from_fn(g, |x, y| {
            Complex64::new(norm * (-(x * x + y * y) / (w * w)).exp(), 0.0)
        });
        assert!((f.power() - 1.0).abs() < 1e-9);
        let ip = inner_product(&f, &f).unwrap();
        assert!((ip.re - 1.0).abs() < 1e-9);
        assert!(ip.im.abs() < 1e-15);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric() {
        let g = Grid2D::square(32, 4.0).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x, y * y));
        let h = ComplexField::from_fn(g, |x, y| Complex64::new(y, -x));
        let ab = inner_product(&f, &h).unwrap();
        let ba = inner_product(&h, &f).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
    }

    #[test]
    fn inner_product_rejects_grid_mismatch() {
        let a = ComplexField::zeros(Grid2D::square(32, 1.0).unwrap());
        let b = ComplexField::zeros(Grid2D::square(32, 2.0).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn rms_radius_centered_is_shift_invariant() {
        let g = Grid2D::square(256, 16.0e-3).unwrap();
        let w = 1e-3;
        let gauss = |x0: f64| {
            ComplexField::from_fn(g, move |x, y| {
                Complex64::new((-((x - x0).powi(2) + y * y) / (w * w)).exp(), 0.0)
            })
        };
        let a = gauss(0.0).rms_radius_centered().unwrap();
        let b = gauss(2.0e-3).rms_radius_centered().unwrap();
        assert!((a - b).abs() / a < 1e-9);
    }

    #[test]
    fn zero_power_errors() {
        let f = ComplexField::zeros(Grid2D::square(16, 1.0).unwrap());
        assert!(matches!(f.rms_radius(), Err(Error::ZeroPower)));
        assert!(matches!(f.normalized(), Err(Error::ZeroPower)));
    }
}
