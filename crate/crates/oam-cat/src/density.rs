//! Density matrices over the truncated OAM basis: validation, PSD
//! projection, and Uhlmann fidelity.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-10;

/// Hermitian, trace-1, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validate and wrap a matrix. Hermiticity, unit trace, and
    /// eigenvalues >= -1e-10 are enforced.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        let d = mat.nrows();
        if mat.ncols() != d || d == 0 {
            return Err(Error::InvalidDensity(format!(
                "matrix must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let mut herm_dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                herm_dev = herm_dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if herm_dev > HERMITICITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian: max |rho - rho^H| = {herm_dev:.3e}"
            )));
        }
        let trace: Complex64 = (0..d).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace = {trace} is not 1")));
        }
        let eigen = SymmetricEigen::new(mat.clone());
        let min = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { mat })
    }

    /// Projector onto the normalized pure state `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let d = psi.len();
        let mat = DMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / norm_sqr);
        Ok(Self { mat })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        let mat = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(1.0 / d as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eigen = SymmetricEigen::new(self.mat.clone());
        let mut v: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let sqrt_rho = hermitian_sqrt(&self.mat);
        let inner = &sqrt_rho * other.matrix() * &sqrt_rho;
        let inner = hermitize(&inner);
        let eigen = SymmetricEigen::new(inner);
        // eigenvalues that are exactly zero in exact arithmetic come out at
        // the 1e-16 level and the square root would lift that noise to 1e-8;
        // floor them relative to the leading eigenvalue
        let max = eigen
            .eigenvalues
            .iter()
            .copied()
            .fold(0.0f64, f64::max);
        let floor = 1e-12 * max;
        let tr: f64 = eigen
            .eigenvalues
            .iter()
            .map(|&l| if l > floor { l.sqrt() } else { 0.0 })
            .sum();
        Ok((tr * tr).clamp(0.0, 1.0))
    }
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = m.nrows();
    DMatrix::from_fn(d, d, |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()))
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eigen = SymmetricEigen::new(m.clone());
    let d = m.nrows();
    let q = &eigen.eigenvectors;
    let max = eigen.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let floor = 1e-12 * max;
    let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for k in 0..d {
        let s = if eigen.eigenvalues[k] > floor {
            eigen.eigenvalues[k].sqrt()
        } else {
            0.0
        };
        if s == 0.0 {
            continue;
        }
        let col = q.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += Complex64::new(s, 0.0) * col[i] * col[j].conj();
            }
        }
    }
    out
}

/// Hermitize, clip negative eigenvalues to zero, and renormalize the trace.
/// This is the deterministic projection applied after linear inversion.
pub fn project_to_density(raw: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    let sym = hermitize(raw);
    let eigen = SymmetricEigen::new(sym);
    let d = raw.nrows();
    let clipped: Vec<f64> = eigen.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDensity(
            "projection collapsed to the zero matrix".into(),
        ));
    }
    let q = &eigen.eigenvectors;
    let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for k in 0..d {
        let w = clipped[k] / total;
        if w == 0.0 {
            continue;
        }
        let col = q.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += Complex64::new(w, 0.0) * col[i] * col[j].conj();
            }
        }
    }
    DensityMatrix::from_matrix(hermitize(&out))
}

/// Fidelity of a pure state against a density matrix, <psi|rho|psi>.
/// Provably equal to the Uhlmann fidelity when one argument is pure.
pub fn fidelity_pure(psi: &[Complex64], rho: &DensityMatrix) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: psi.len(),
        });
    }
    let norm_sqr: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    if norm_sqr <= 0.0 {
        return Err(Error::InvalidDensity("zero state vector".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * rho.entry(i, j) * psi[j];
        }
    }
    Ok((acc.re / norm_sqr).clamp(0.0, 1.0))
}
