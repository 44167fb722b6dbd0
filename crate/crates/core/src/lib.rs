//! Resonance fluorescence of a two-level atom driven by a laser with a
//! finite, phase-diffusion bandwidth.
//!
//! The crate evaluates the averaged optical Bloch dynamics, the steady-state
//! fluorescence spectrum through several independent routes (closed-form
//! Laplace transform, 3x3 resolvent, time-domain regression + quadrature,
//! Monte Carlo over laser phase paths), the dressed-state decomposition of
//! the spectrum, and a small feature extractor that classifies lineshapes
//! (Mollow triplet, hole burning, dispersive centre, split doublet).
//!
//! All rates share one arbitrary unit. Every formula is homogeneous in the
//! rates, so working in units of the decay rate `gamma` is the same as
//! setting `gamma = 1`.

pub mod bloch;
pub mod dressed;
pub mod error;
pub mod features;
pub mod grid;
mod ode;
pub mod params;
pub mod spectrum;
pub mod stochastic;

pub use bloch::{BlochDerivative, BlochState, CorrelationTrace, Trajectory};
pub use error::{Error, Result};
pub use features::{Classification, Extremum, ExtremumKind, SpectralFeatures};
pub use grid::FrequencyGrid;
pub use params::DriveParams;
pub use spectrum::{Method, Spectrum};

pub use num_complex::Complex64;
