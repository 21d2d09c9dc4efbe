//! Schmidt decomposition and structural checks on coefficient grids.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::analytic::CoefficientMatrix;
use crate::error::{HgError, Result};

/// Relative threshold below which an entry counts as zero when reading signs.
pub const SIGN_THRESHOLD: f64 = 1e-12;
/// Relative threshold for the nonzero-support mask.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    /// Schmidt weights in descending order.
    pub lambdas: Vec<f64>,
    pub entropy_bits: f64,
    pub schmidt_number: f64,
    pub truncation_tail: f64,
}

impl SchmidtSpectrum {
    fn from_weights(mut lambdas: Vec<f64>, truncation_tail: f64) -> Self {
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let entropy_bits = -lambdas
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.log2())
            .sum::<f64>();
        let purity: f64 = lambdas.iter().map(|l| l * l).sum();
        Self {
            lambdas,
            entropy_bits,
            schmidt_number: 1.0 / purity,
            truncation_tail,
        }
    }

    /// Spectrum of the full transverse state, whose Schmidt weights are the
    /// pairwise products of the x and y weights.
    pub fn product(&self, other: &SchmidtSpectrum) -> Self {
        let lambdas = self
            .lambdas
            .iter()
            .flat_map(|&x| other.lambdas.iter().map(move |&y| x * y))
            .collect();
        let tail = 1.0 - (1.0 - self.truncation_tail) * (1.0 - other.truncation_tail);
        Self::from_weights(lambdas, tail)
    }

    pub fn sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

fn require_normalized(m: &CoefficientMatrix) -> Result<()> {
    if !m.normalized {
        return Err(HgError::Precondition(
            "Schmidt analysis needs a normalized coefficient matrix".into(),
        ));
    }
    Ok(())
}

/// Squared singular values of the coefficient grid.
pub fn schmidt_spectrum(m: &CoefficientMatrix) -> Result<SchmidtSpectrum> {
    require_normalized(m)?;
    let sv = m.entries.clone().singular_values();
    let lambdas = sv.iter().map(|s| s * s).collect();
    Ok(SchmidtSpectrum::from_weights(lambdas, m.truncation_tail))
}

/// The same weights from the eigenvalues of the reduced density matrix `C Cᵀ`.
pub fn schmidt_spectrum_eigen(m: &CoefficientMatrix) -> Result<SchmidtSpectrum> {
    require_normalized(m)?;
    let rho = &m.entries * m.entries.transpose();
    let lambdas = SymmetricEigen::new(rho)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .collect();
    Ok(SchmidtSpectrum::from_weights(lambdas, m.truncation_tail))
}

/// Largest `|C_ab|` among entries with `a + b + n` odd.
pub fn parity_violation(m: &CoefficientMatrix) -> f64 {
    let n = m.pump_index_1d;
    let mut worst: f64 = 0.0;
    for a in 0..m.dim() {
        for b in 0..m.dim() {
            if (a + b + n) % 2 == 1 {
                worst = worst.max(m.get(a, b).abs());
            }
        }
    }
    worst
}

/// `+1`, `−1` or `0`, with entries below `SIGN_THRESHOLD · max|C|` read as zero.
pub fn sign_pattern(m: &CoefficientMatrix) -> DMatrix<i8> {
    let cut = SIGN_THRESHOLD * m.max_abs();
    m.entries.map(|x| {
        if x.abs() <= cut {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    })
}

/// Entries above `SUPPORT_THRESHOLD · max|C|`.
pub fn support_pattern(m: &CoefficientMatrix) -> DMatrix<bool> {
    let cut = SUPPORT_THRESHOLD * m.max_abs();
    m.entries.map(|x| x.abs() > cut)
}
