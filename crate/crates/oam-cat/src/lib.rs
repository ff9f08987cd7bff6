//! Classical analogues of optical cat states built from orbital-angular-momentum light.
//!
//! The library synthesizes coherent-like superpositions of Laguerre-Gaussian
//! modes whose intensity splits into two Gaussian lobes, and provides the
//! surrounding machinery to study them end to end in software:
//!
//! - [`modes`]: p = 0 Laguerre-Gaussian modes, waist matching, inner products;
//! - [`cat`]: Poisson-weighted mode superpositions, closed-form intensities,
//!   parity classification and lobe geometry;
//! - [`wigner`]: the quantum cat-state Wigner map used for side-by-side
//!   comparison with the intensity pictures;
//! - [`holography`]: amplitude-encoded phase holograms and a simulated
//!   first-order reconstruction loop;
//! - [`propagation`]: angular-spectrum and 4f propagation, plane-wave
//!   interferograms, topological-charge probing;
//! - [`analysis`]: spiral spectra, Bloch-sphere interference, mutually
//!   unbiased bases and state tomography;
//! - [`turbulence`]: Kolmogorov phase screens, split-step channels, OAM
//!   crosstalk and fidelity decay;
//! - [`cli`]: the `oam-cat` command-line front end that writes every figure
//!   family to files.
//!
//! Everything is deterministic: random channels are keyed by explicit seeds
//! and identical configurations reproduce identical outputs byte for byte.

pub mod analysis;
pub mod cat;
pub mod density;
pub mod error;
mod fft;
pub mod grid;
pub mod holography;
pub mod lobes;
pub mod modes;
pub mod propagation;
pub mod turbulence;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::{inner_product, overlap_power, ComplexField, Grid2D, RealMap};
pub use modes::{lg_mode, matched_waist, LGModeSpec, WaistPolicy};
