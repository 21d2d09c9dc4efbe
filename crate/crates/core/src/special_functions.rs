//! Hermite polynomials, log-factorials, Gamma at half-integers and the
//! one-dimensional Hermite-Gauss mode function.
//!
//! The mode function is
//!
//! ```text
//! v_n(q; w) = √w · D_n · H_n(w q) · exp(−w² q² / 2)
//! ```
//!
//! where the constant `D_n` depends on the [`ModeFunctionConvention`]. Under
//! [`Normalization::UnitNorm`] `|D_n|² = 1 / (2ⁿ n! √π)` and the mode is
//! L²-normalized; under [`Normalization::PaperDn`] `|D_n|² = 1 / (2ⁿ⁺¹ n! √π)`
//! and every mode has squared norm 1/2.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HgError, Result};

/// Default upper limit accepted by [`hermite_eval`].
pub const DEFAULT_MAX_HERMITE_ORDER: usize = 200;

/// Orders above this switch the plain recurrence to log-magnitude tracking.
pub const LOG_SPACE_HERMITE_ORDER: usize = 150;

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_071_713_675_677;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    #[default]
    UnitNorm,
    PaperDn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// Real constant with positive leading coefficient.
    #[default]
    RealPositiveLeading,
    /// The complex prefactor `−(iⁿ)`.
    PaperPhase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModeFunctionConvention {
    pub normalization: Normalization,
    pub phase: PhaseConvention,
}

impl ModeFunctionConvention {
    pub const fn new(normalization: Normalization, phase: PhaseConvention) -> Self {
        Self {
            normalization,
            phase,
        }
    }

    /// Ratio `|D_n| / |D_n^unit|`; independent of n.
    pub fn norm_factor(&self) -> f64 {
        match self.normalization {
            Normalization::UnitNorm => 1.0,
            Normalization::PaperDn => std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// The unit-modulus phase of `D_n`.
    pub fn phase(&self, order: usize) -> Complex64 {
        match self.phase {
            PhaseConvention::RealPositiveLeading => Complex64::new(1.0, 0.0),
            PhaseConvention::PaperPhase => -Complex64::i().powu((order % 4) as u32),
        }
    }
}

/// Physicists' Hermite polynomial `H_order(x)` with the default order limit.
pub fn hermite_eval(order: usize, x: f64) -> Result<f64> {
    hermite_eval_bounded(order, x, DEFAULT_MAX_HERMITE_ORDER)
}

/// As [`hermite_eval`] with an explicit order limit.
///
/// Orders above [`LOG_SPACE_HERMITE_ORDER`] run the recurrence with
/// log-magnitude rescaling and exponentiate at the end, so the only way to
/// get a non-finite result is a true overflow of `|H_n(x)|`.
pub fn hermite_eval_bounded(order: usize, x: f64, max_order: usize) -> Result<f64> {
    if order > max_order {
        return Err(HgError::Capability {
            order,
            max: max_order,
        });
    }
    if order > LOG_SPACE_HERMITE_ORDER {
        let (log_abs, sign) = hermite_log_abs(order, x);
        return Ok(sign * log_abs.exp());
    }
    Ok(hermite_recurrence(order, x))
}

fn hermite_recurrence(order: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if order == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..order {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(ln|H_n(x)|, sign H_n(x))`, never overflowing. A zero value returns
/// `(-inf, 0)`.
pub fn hermite_log_abs(order: usize, x: f64) -> (f64, f64) {
    const RESCALE: f64 = 1e150;
    let mut log_scale = 0.0;
    let mut prev = 1.0;
    let mut cur = if order == 0 { 1.0 } else { 2.0 * x };
    for k in 1..order {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    if cur == 0.0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        (cur.abs().ln() + log_scale, cur.signum())
    }
}

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(171);
        let mut acc = 1.0_f64;
        table.push(0.0);
        for k in 1..=170u32 {
            acc *= k as f64;
            table.push(acc.ln());
        }
        table
    })
}

/// `ln n!`.
pub fn log_factorial(n: u64) -> f64 {
    if n <= 170 {
        return factorial_table()[n as usize];
    }
    // Stirling series for ln Γ(x), x = n + 1 > 171.
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// `ln Γ(two_z / 2)` for integer and half-integer arguments.
///
/// Half-integers use `Γ(k + 1/2) = (2k)! √π / (4ᵏ k!)`, which is the
/// recurrence `Γ(z+1) = zΓ(z)` unrolled from `Γ(1/2) = √π`.
pub fn log_gamma_half_integer(two_z: u64) -> Result<f64> {
    if two_z == 0 {
        return Err(HgError::domain("Gamma argument must be positive"));
    }
    if two_z.is_multiple_of(2) {
        Ok(log_factorial(two_z / 2 - 1))
    } else {
        let k = (two_z - 1) / 2;
        Ok(log_factorial(2 * k) - log_factorial(k) - 2.0 * k as f64 * LN_2 + LN_SQRT_PI)
    }
}

/// Unit-normalized Hermite functions `φ_0(u) .. φ_max(u)` written into `out`,
/// with `φ_n(u) = H_n(u) e^{−u²/2} / √(2ⁿ n! √π)`.
///
/// Uses the normalized three-term recurrence, which cannot overflow.
pub fn hermite_functions_into(u: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = (-0.5 * u * u - 0.5 * LN_SQRT_PI).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * u * out[0];
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * u * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_nan() || width <= 0.0 || !width.is_finite() {
        return Err(HgError::domain(format!(
            "mode width must be positive and finite, got {width}"
        )));
    }
    Ok(())
}

/// Real part of the mode function with the convention's normalization and
/// the phase of `D_n` factored out (see [`hg_mode_eval_complex`]).
pub fn hg_mode_eval(
    order: usize,
    q: f64,
    width: f64,
    convention: ModeFunctionConvention,
) -> Result<f64> {
    check_width(width)?;
    let mut buf = vec![0.0; order + 1];
    hermite_functions_into(width * q, &mut buf);
    Ok(width.sqrt() * convention.norm_factor() * buf[order])
}

/// The full mode function including the complex phase of `D_n`.
pub fn hg_mode_eval_complex(
    order: usize,
    q: f64,
    width: f64,
    convention: ModeFunctionConvention,
) -> Result<Complex64> {
    Ok(convention.phase(order) * hg_mode_eval(order, q, width, convention)?)
}

/// Every real mode `v_0(q; w) .. v_max(q; w)` at a single point.
pub fn hg_modes_into(
    q: f64,
    width: f64,
    convention: ModeFunctionConvention,
    out: &mut [f64],
) -> Result<()> {
    check_width(width)?;
    hermite_functions_into(width * q, out);
    let scale = width.sqrt() * convention.norm_factor();
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(())
}
