//! Hermite-Gauss mode decomposition of the two-photon state produced by
//! spontaneous parametric down-conversion with a Hermite-Gauss pump.
//!
//! [`analytic`] evaluates the coefficients `C_ab^(n)` in closed form,
//! [`oracle`] recomputes them by direct quadrature, and [`analysis`] extracts
//! Schmidt spectra and sign/support structure.

pub mod analysis;
pub mod analytic;
pub mod cli;
pub mod error;
pub mod figures;
pub mod heatmap;
pub mod io;
pub mod oracle;
pub mod quadrature;
pub mod special_functions;
pub mod summation;
pub mod verify;

pub use analysis::{schmidt_spectrum, SchmidtSpectrum};
pub use analytic::{
    coefficient_1d, coefficient_4d, coefficient_matrix, CoefficientMatrix, PhysicalParams, SigmaMode,
};
pub use error::{HgError, Result};
pub use oracle::{coefficient_quadrature, gaussian_approx_delta, quadrature_matrix, QuadratureSpec};
pub use quadrature::QuadratureRule;
pub use special_functions::{
    hermite_eval, hg_mode_eval, ModeFunctionConvention, Normalization, PhaseConvention,
};
