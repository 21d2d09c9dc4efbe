//! Analytic-versus-quadrature comparison over the default validation grid.

use serde::Serialize;

use crate::analysis::parity_violation;
use crate::analytic::{coefficient_matrix, PhysicalParams, SigmaMode};
use crate::error::Result;
use crate::oracle::{quadrature_matrix, QuadratureSpec};

/// Environment variable overriding [`DEFAULT_TOLERANCE`].
pub const TOLERANCE_ENV: &str = "HGSPDC_TOLERANCE";
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const PARITY_TOLERANCE: f64 = 1e-10;

pub const GRID_PUMP_ORDERS: [usize; 4] = [0, 1, 2, 5];
pub const GRID_RATIOS: [f64; 5] = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0];
pub const GRID_SIGMA_MODES: [SigmaMode; 3] =
    [SigmaMode::Geometric, SigmaMode::PumpMatched, SigmaMode::PhaseMatched];
pub const GRID_MAX_INDEX: usize = 12;

/// Tolerance from the environment, or the default when unset or unparsable.
pub fn tolerance_from_env() -> f64 {
    match std::env::var(TOLERANCE_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => t,
            _ => {
                log::warn!("ignoring {TOLERANCE_ENV}={s:?}; using {DEFAULT_TOLERANCE:e}");
                DEFAULT_TOLERANCE
            }
        },
        Err(_) => DEFAULT_TOLERANCE,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub n: usize,
    pub ratio: f64,
    pub sigma_mode: SigmaMode,
    /// `max |analytic − quadrature| / max |analytic|`.
    pub relative_deviation: f64,
    pub analytic_parity_violation: f64,
    pub quadrature_parity_violation: f64,
    pub fallback_entries: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub tolerance: f64,
    pub max_relative_deviation: f64,
    pub max_quadrature_parity_violation: f64,
    pub max_analytic_parity_violation: f64,
    pub cases: Vec<CaseReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_relative_deviation <= self.tolerance
            && self.max_analytic_parity_violation == 0.0
            && self.max_quadrature_parity_violation < PARITY_TOLERANCE
    }
}

pub fn verify_case(
    n: usize,
    ratio: f64,
    sigma_mode: SigmaMode,
    max_index: usize,
    spec: &QuadratureSpec,
) -> Result<CaseReport> {
    let params = PhysicalParams::with_ratio(ratio, sigma_mode, (n, 0))?;
    let analytic = coefficient_matrix(n, &params, max_index, false)?;
    let quad = quadrature_matrix(n, &params, max_index, false, spec)?;
    let scale = analytic.max_abs();
    let diff = (&analytic.entries - &quad.entries).amax();
    Ok(CaseReport {
        n,
        ratio,
        sigma_mode,
        relative_deviation: if scale > 0.0 { diff / scale } else { diff },
        analytic_parity_violation: parity_violation(&analytic),
        quadrature_parity_violation: parity_violation(&quad),
        fallback_entries: analytic.fallback_entries,
    })
}

/// Runs every `(n, w/δ, σ mode)` combination of the default grid.
pub fn verify_default_grid(tolerance: f64, spec: &QuadratureSpec) -> Result<VerifyReport> {
    let mut cases = Vec::new();
    for &n in &GRID_PUMP_ORDERS {
        for &ratio in &GRID_RATIOS {
            for &mode in &GRID_SIGMA_MODES {
                cases.push(verify_case(n, ratio, mode, GRID_MAX_INDEX, spec)?);
            }
        }
    }
    let max = |f: fn(&CaseReport) -> f64| cases.iter().map(f).fold(0.0, f64::max);
    Ok(VerifyReport {
        tolerance,
        max_relative_deviation: max(|c| c.relative_deviation),
        max_quadrature_parity_violation: max(|c| c.quadrature_parity_violation),
        max_analytic_parity_violation: max(|c| c.analytic_parity_violation),
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_case_agrees() {
        let r = verify_case(2, 0.5, SigmaMode::PhaseMatched, 8, &QuadratureSpec::default()).unwrap();
        assert!(r.relative_deviation < DEFAULT_TOLERANCE, "{r:?}");
        assert_eq!(r.analytic_parity_violation, 0.0);
        assert!(r.quadrature_parity_violation < PARITY_TOLERANCE);
    }

    #[test]
    fn default_tolerance_without_env() {
        if std::env::var(TOLERANCE_ENV).is_err() {
            assert_eq!(tolerance_from_env(), DEFAULT_TOLERANCE);
        }
    }
}
