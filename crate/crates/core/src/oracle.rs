//! Brute-force evaluation of the projection integral
//!
//! ```text
//! C_ab^(n) = ∫∫ Φ(q₁, q₂) v_a(q₁; σ₁) v_b(q₂; σ₂) dq₁ dq₂
//! ```
//!
//! on a tensor-product grid in the rotated coordinates `q± = (q₁ ± q₂)/√2`.
//! Nothing here uses the diagonal-mode expansion or the overlap series; the
//! amplitude and the detection modes are evaluated pointwise.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::analytic::{CoefficientMatrix, PhysicalParams};
use crate::error::{HgError, Result};
use crate::quadrature::{clenshaw_curtis, gauss_hermite, QuadratureRule, Rule1d};
use crate::special_functions::{hg_mode_eval, hg_modes_into};

/// Largest change allowed when the node count is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-10;

/// Phase-matching width constant from matching the FWHM of the sinc.
pub const SINC_GAUSSIAN_WIDTH_FACTOR: f64 = 0.257;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    /// Clenshaw-Curtis box half-width, in natural widths beyond the classical
    /// turning point of the highest-order factor. Unused by Gauss-Hermite.
    pub domain_halfwidth_sigmas: f64,
    pub rule: QuadratureRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_axis: 200,
            domain_halfwidth_sigmas: 8.0,
            rule: QuadratureRule::GaussHermite,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rule(rule: QuadratureRule) -> Self {
        Self {
            rule,
            ..Self::default()
        }
    }

    fn doubled(&self) -> Self {
        Self {
            nodes_per_axis: 2 * self.nodes_per_axis,
            ..*self
        }
    }

    /// Rule in the scaled variable `z`, for an integrand `poly(deg ≤ degree) · e^{−z²}`.
    fn rule_for_degree(&self, degree: usize) -> Result<Rule1d> {
        match self.rule {
            QuadratureRule::GaussHermite => Ok((*gauss_hermite(self.nodes_per_axis)?).clone()),
            QuadratureRule::ClenshawCurtis => {
                let halfwidth = self.domain_halfwidth_sigmas + ((2 * degree + 1) as f64).sqrt();
                clenshaw_curtis(self.nodes_per_axis, halfwidth)
            }
        }
    }
}

/// `δ = 0.257 √(L / 4K)` for crystal length `L` and pump wave number `K`.
pub fn gaussian_approx_delta(crystal_length: f64, pump_wavenumber: f64) -> Result<f64> {
    let ok = |x: f64| x > 0.0 && x.is_finite();
    if !ok(crystal_length) || !ok(pump_wavenumber) {
        return Err(HgError::domain(format!(
            "crystal length and pump wave number must be positive, got L={crystal_length}, K={pump_wavenumber}"
        )));
    }
    Ok(SINC_GAUSSIAN_WIDTH_FACTOR * (crystal_length / (4.0 * pump_wavenumber)).sqrt())
}

/// One Cartesian axis of the Gaussian-approximated two-photon amplitude,
/// `√2 · v_n(q₁ + q₂; w_p) · v_0(q₁ − q₂; δ)`, which has unit norm under the
/// unit-norm convention.
pub fn two_photon_amplitude_1d(q1: f64, q2: f64, n: usize, params: &PhysicalParams) -> f64 {
    let conv = params.convention;
    // widths are validated on construction; a bad width yields 0 here
    let pump = hg_mode_eval(n, q1 + q2, params.pump_waist, conv).unwrap_or(0.0);
    let pm = hg_mode_eval(0, q1 - q2, params.pm_width, conv).unwrap_or(0.0);
    SQRT_2 * pump * pm
}

/// The real sign picked up from the convention phases `D_n D_0 D_a* D_b*`.
fn phase_sign(n: usize, a: usize, b: usize, params: &PhysicalParams) -> f64 {
    let c = params.convention;
    (c.phase(n) * c.phase(0) * c.phase(a).conj() * c.phase(b).conj()).re
}

fn integrate_once(
    n: usize,
    params: &PhysicalParams,
    sigma1: f64,
    sigma2: f64,
    max_index: usize,
    spec: &QuadratureSpec,
) -> Result<DMatrix<f64>> {
    let dim = max_index + 1;
    let detection = 0.25 * (sigma1 * sigma1 + sigma2 * sigma2);
    let c_plus = (params.pump_waist.powi(2) + detection).sqrt();
    let c_minus = (params.pm_width.powi(2) + detection).sqrt();
    let rule = spec.rule_for_degree(n + 2 * max_index)?;
    let conv = params.convention;

    let partials: Vec<DMatrix<f64>> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&zp, &wp)| -> Result<DMatrix<f64>> {
            let mut acc = DMatrix::<f64>::zeros(dim, dim);
            let mut v1 = vec![0.0; dim];
            let mut v2 = vec![0.0; dim];
            let q_plus = zp / c_plus;
            for (&zm, &wm) in rule.nodes.iter().zip(&rule.weights) {
                let q_minus = zm / c_minus;
                let q1 = FRAC_1_SQRT_2 * (q_plus + q_minus);
                let q2 = FRAC_1_SQRT_2 * (q_plus - q_minus);
                let weight = wp * wm / (c_plus * c_minus) * two_photon_amplitude_1d(q1, q2, n, params);
                if weight == 0.0 {
                    continue;
                }
                hg_modes_into(q1, sigma1, conv, &mut v1)?;
                hg_modes_into(q2, sigma2, conv, &mut v2)?;
                for (a, &x) in v1.iter().enumerate() {
                    let wx = weight * x;
                    for (b, &y) in v2.iter().enumerate() {
                        acc[(a, b)] += wx * y;
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = DMatrix::<f64>::zeros(dim, dim);
    for p in &partials {
        total += p;
    }
    for a in 0..dim {
        for b in 0..dim {
            total[(a, b)] *= phase_sign(n, a, b, params);
        }
    }
    Ok(total)
}

/// A converged quadrature grid together with its node-doubling check.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub entries: DMatrix<f64>,
    pub coarse: DMatrix<f64>,
    pub max_doubling_change: f64,
}

/// All coefficients `a, b ≤ max_index` by quadrature, for possibly unequal
/// detection widths. Fails when doubling the nodes moves any entry by more
/// than [`CONVERGENCE_TOLERANCE`].
pub fn quadrature_grid(
    n: usize,
    params: &PhysicalParams,
    sigma1: f64,
    sigma2: f64,
    max_index: usize,
    spec: &QuadratureSpec,
) -> Result<QuadratureGrid> {
    params.validate()?;
    for s in [sigma1, sigma2] {
        if !(s > 0.0 && s.is_finite()) {
            return Err(HgError::domain(format!("detection width must be positive, got {s}")));
        }
    }
    let coarse = integrate_once(n, params, sigma1, sigma2, max_index, spec)?;
    let fine = integrate_once(n, params, sigma1, sigma2, max_index, &spec.doubled())?;
    let (mut worst, mut at) = (0.0, (0, 0));
    for a in 0..=max_index {
        for b in 0..=max_index {
            let d = (fine[(a, b)] - coarse[(a, b)]).abs();
            if d > worst {
                worst = d;
                at = (a, b);
            }
        }
    }
    if worst > CONVERGENCE_TOLERANCE {
        return Err(HgError::QuadratureNotConverged {
            coarse: coarse[at],
            fine: fine[at],
            diff: worst,
            tolerance: CONVERGENCE_TOLERANCE,
        });
    }
    Ok(QuadratureGrid {
        entries: fine,
        coarse,
        max_doubling_change: worst,
    })
}

/// A single coefficient by quadrature.
pub fn coefficient_quadrature(
    n: usize,
    a: usize,
    b: usize,
    params: &PhysicalParams,
    sigma1: f64,
    sigma2: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let grid = quadrature_grid(n, params, sigma1, sigma2, a.max(b), spec)?;
    Ok(grid.entries[(a, b)])
}

/// Quadrature counterpart of [`crate::analytic::coefficient_matrix`], with
/// σ₁ = σ₂ resolved from `params`.
pub fn quadrature_matrix(
    n: usize,
    params: &PhysicalParams,
    max_index: usize,
    normalize: bool,
    spec: &QuadratureSpec,
) -> Result<CoefficientMatrix> {
    let sigma = params.sigma();
    let grid = quadrature_grid(n, params, sigma, sigma, max_index, spec)?;
    CoefficientMatrix::from_entries(n, *params, grid.entries, normalize)
}

/// `∫∫ |Φ(q₁, q₂)|² dq₁ dq₂` by quadrature.
pub fn amplitude_norm_sq(n: usize, params: &PhysicalParams, spec: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    // |Φ|² decays like exp(−2w²q+² − 2δ²q−²)
    let c_plus = SQRT_2 * params.pump_waist;
    let c_minus = SQRT_2 * params.pm_width;
    let rule = spec.rule_for_degree(2 * n)?;
    let mut total = 0.0;
    for (&zp, &wp) in rule.nodes.iter().zip(&rule.weights) {
        for (&zm, &wm) in rule.nodes.iter().zip(&rule.weights) {
            let (qp, qm) = (zp / c_plus, zm / c_minus);
            let amp = two_photon_amplitude_1d(
                FRAC_1_SQRT_2 * (qp + qm),
                FRAC_1_SQRT_2 * (qp - qm),
                n,
                params,
            );
            total += wp * wm / (c_plus * c_minus) * amp * amp;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::SigmaMode;
    use approx::assert_abs_diff_eq;

    fn geometric(ratio: f64, n: usize) -> PhysicalParams {
        PhysicalParams::with_ratio(ratio, SigmaMode::Geometric, (n, 0)).unwrap()
    }

    #[test]
    fn delta_formula() {
        let d1 = gaussian_approx_delta(1e-3, 1e7).unwrap();
        let d4 = gaussian_approx_delta(4e-3, 1e7).unwrap();
        assert_abs_diff_eq!(d4, 2.0 * d1, epsilon = 1e-20);
        assert!(gaussian_approx_delta(1e-300, 1.0).unwrap() < 1e-150);
        let k = 2.0 * std::f64::consts::PI / 405e-9;
        let d = gaussian_approx_delta(2e-3, k).unwrap();
        // 0.257 · √(2e−3 / (4 · 1.55140e7)) by hand
        assert_abs_diff_eq!(d, 1.459_06e-6, epsilon = 1e-10);
        assert!(gaussian_approx_delta(0.0, k).is_err());
        assert!(gaussian_approx_delta(1e-3, -1.0).is_err());
    }

    #[test]
    fn amplitude_examples() {
        let p = geometric(1.5, 1);
        assert_eq!(two_photon_amplitude_1d(0.4, -0.4, 1, &p), 0.0);
        let peak = two_photon_amplitude_1d(0.0, 0.0, 0, &p);
        assert!(peak > 0.0);
        for &(x, y) in &[(0.1, 0.5), (-0.3, 0.2), (0.7, 0.7)] {
            assert!(two_photon_amplitude_1d(x, y, 0, &p) < peak);
            for n in 0..5 {
                assert_eq!(two_photon_amplitude_1d(x, y, n, &p), two_photon_amplitude_1d(y, x, n, &p));
            }
        }
    }

    #[test]
    fn amplitude_is_unit_norm() {
        for n in [0, 1, 4] {
            let norm = amplitude_norm_sq(n, &geometric(0.7, n), &QuadratureSpec::default()).unwrap();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn oracle_examples() {
        let spec = QuadratureSpec::default();
        let p = geometric(1.3, 1);
        let s = p.sigma();
        assert!(coefficient_quadrature(1, 0, 0, &p, s, s, &spec).unwrap().abs() < 1e-12);

        let p = geometric(1.0, 2);
        let s = p.sigma();
        let c11 = coefficient_quadrature(2, 1, 1, &p, s, s, &spec).unwrap();
        assert_abs_diff_eq!(c11, 0.5f64.sqrt(), epsilon = 1e-8);

        let p = geometric(2.0, 0);
        let s = p.sigma();
        assert!(coefficient_quadrature(0, 0, 1, &p, s, s, &spec).unwrap().abs() < 1e-9);
    }

    #[test]
    fn unequal_widths_are_supported() {
        let p = geometric(1.0, 0);
        let grid = quadrature_grid(0, &p, 1.1, 1.6, 4, &QuadratureSpec::default()).unwrap();
        assert!(grid.max_doubling_change < CONVERGENCE_TOLERANCE);
        // with σ₁ ≠ σ₂ the exchange symmetry is broken
        assert!((grid.entries[(0, 2)] - grid.entries[(2, 0)]).abs() > 1e-6);
        assert!(quadrature_grid(0, &p, 0.0, 1.0, 2, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn too_few_nodes_is_a_convergence_error() {
        let spec = QuadratureSpec {
            nodes_per_axis: 12,
            ..QuadratureSpec::with_rule(QuadratureRule::ClenshawCurtis)
        };
        let p = geometric(0.5, 3);
        let err = quadrature_grid(3, &p, p.sigma(), p.sigma(), 8, &spec).unwrap_err();
        assert!(matches!(err, HgError::QuadratureNotConverged { .. }));
    }
}
