//! Closed-form and series evaluation of the one-dimensional Hermite-Gauss
//! expansion coefficients `C_ab^(n)` of the two-photon amplitude.
//!
//! In the Gaussian approximation of the phase-matching function the 1D
//! amplitude is
//!
//! ```text
//! Φ(q₁, q₂) = √2 · v_n(q₁ + q₂; w_p) · v_0(q₁ − q₂; δ)
//! ```
//!
//! (the `√2` is the Jacobian of `(q₁, q₂) → (q₁ ± q₂)` and makes `Φ` unit
//! norm). Rotating to `q± = (q₁ ± q₂)/√2` and expanding the detection modes in
//! diagonal HG modes gives
//!
//! ```text
//! C_ab^(n) = √2 Σ_k B(a, b, k) · I(w_p, σ, n, N − k) · I(δ, σ, 0, k),   N = a + b
//! ```
//!
//! with the overlap integral `I(γ, σ, t, s) = ∫ v_t(√2 q; γ) v_s(q; σ) dq`.

use std::f64::consts::{LN_2, PI, SQRT_2};

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HgError, Result};
use crate::special_functions::{
    log_factorial, log_gamma_half_integer, ModeFunctionConvention, PhaseConvention,
};
use crate::summation::CompensatedSum;

/// Default truncation index for coefficient matrices.
pub const DEFAULT_MAX_INDEX: usize = 40;

/// How the detection-mode width σ is derived from the pump and phase-matching widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// σ = √(2 w_p δ)
    Geometric,
    /// σ = √2 · w_p
    PumpMatched,
    /// σ = √2 · δ
    PhaseMatched,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub pump_waist: f64,
    pub pm_width: f64,
    pub sigma_mode: SigmaMode,
    pub pump_order: (usize, usize),
    #[serde(default)]
    pub convention: ModeFunctionConvention,
}

impl PhysicalParams {
    pub fn new(
        pump_waist: f64,
        pm_width: f64,
        sigma_mode: SigmaMode,
        pump_order: (usize, usize),
    ) -> Result<Self> {
        let params = Self {
            pump_waist,
            pm_width,
            sigma_mode,
            pump_order,
            convention: ModeFunctionConvention::default(),
        };
        params.validate()?;
        Ok(params)
    }

    /// Unit pump waist with `w_p/δ = ratio`.
    pub fn with_ratio(ratio: f64, sigma_mode: SigmaMode, pump_order: (usize, usize)) -> Result<Self> {
        Self::new(1.0, 1.0 / ratio, sigma_mode, pump_order)
    }

    pub fn with_convention(mut self, convention: ModeFunctionConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.pump_waist) {
            return Err(HgError::domain(format!(
                "pump waist must be positive, got {}",
                self.pump_waist
            )));
        }
        if !positive(self.pm_width) {
            return Err(HgError::domain(format!(
                "phase-matching width must be positive, got {}",
                self.pm_width
            )));
        }
        if !positive(self.sigma()) {
            return Err(HgError::domain(format!(
                "detection width must be positive, got {}",
                self.sigma()
            )));
        }
        Ok(())
    }

    /// Resolved detection-mode width σ.
    pub fn sigma(&self) -> f64 {
        match self.sigma_mode {
            SigmaMode::Geometric => (2.0 * self.pump_waist * self.pm_width).sqrt(),
            SigmaMode::PumpMatched => SQRT_2 * self.pump_waist,
            SigmaMode::PhaseMatched => SQRT_2 * self.pm_width,
            SigmaMode::Explicit(s) => s,
        }
    }

    /// `w_p / δ`.
    pub fn ratio(&self) -> f64 {
        self.pump_waist / self.pm_width
    }

    /// Every length rescaled by `c` (an explicit σ included).
    pub fn scaled(&self, c: f64) -> Self {
        let sigma_mode = match self.sigma_mode {
            SigmaMode::Explicit(s) => SigmaMode::Explicit(c * s),
            other => other,
        };
        Self {
            pump_waist: c * self.pump_waist,
            pm_width: c * self.pm_width,
            sigma_mode,
            ..*self
        }
    }
}

/// `(ln |x|, sign)` of a big integer.
fn ln_abs_bigint(x: &BigInt) -> (f64, f64) {
    let sign = match x.sign() {
        Sign::Minus => -1.0,
        Sign::NoSign => return (f64::NEG_INFINITY, 0.0),
        Sign::Plus => 1.0,
    };
    let mag: &BigUint = x.magnitude();
    let bits = mag.bits();
    let ln = if bits <= 64 {
        (mag.iter_u64_digits().next().unwrap_or(0) as f64).ln()
    } else {
        let shift = bits - 64;
        let top: BigUint = mag >> shift;
        (top.iter_u64_digits().next().unwrap() as f64).ln() + shift as f64 * LN_2
    };
    (ln, sign)
}

/// Diagonal-mode change-of-basis coefficient
///
/// ```text
/// B(n, m, k) = √((n+m−k)! k! / (2^{n+m} n! m!)) · (1/k!) dᵏ/dtᵏ [(1−t)ⁿ(1+t)ᵐ] |_{t=0}
/// ```
///
/// The derivative is the exact integer convolution `Σ_j (−1)ʲ C(n,j) C(m,k−j)`.
pub fn diag_hg_coefficient(n: usize, m: usize, k: usize) -> Result<f64> {
    if k > n + m {
        return Err(HgError::domain(format!(
            "B(n={n}, m={m}, k={k}) requires k <= n + m"
        )));
    }
    let lo = k.saturating_sub(m);
    let hi = n.min(k);
    let mut conv = BigInt::from(0);
    // C(n, j) and C(m, k − j) updated incrementally.
    let mut c_n = binomial(n, lo);
    let mut c_m = binomial(m, k - lo);
    for j in lo..=hi {
        let term = &c_n * &c_m;
        if j % 2 == 0 {
            conv += term;
        } else {
            conv -= term;
        }
        if j < hi {
            c_n = c_n * BigInt::from(n - j) / BigInt::from(j + 1);
            c_m = c_m * BigInt::from(k - j) / BigInt::from(m - (k - j) + 1);
        }
    }
    let (ln_conv, sign) = ln_abs_bigint(&conv);
    if sign == 0.0 {
        return Ok(0.0);
    }
    let ln_prefactor = 0.5
        * (log_factorial((n + m - k) as u64) + log_factorial(k as u64)
            - (n + m) as f64 * LN_2
            - log_factorial(n as u64)
            - log_factorial(m as u64));
    Ok(sign * (ln_prefactor + ln_conv).exp())
}

fn binomial(n: usize, k: usize) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Which formula produced an overlap value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMethod {
    /// `t + s` odd; the integrand is odd.
    ParityZero,
    /// Single-term closed form for `t = 0`.
    ClosedFormT0,
    /// Double power series from expanding both Hermite polynomials.
    DoubleSeries,
    /// Generating-function single sum, used when the double series is too ill-conditioned.
    SingleSeriesFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapValue {
    pub value: f64,
    pub method: OverlapMethod,
    /// `Σ|terms| / |Σ terms|` of the double series when it was evaluated, else 1.
    pub condition: f64,
}

/// Controls when the double series is abandoned for the single-sum form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub max_condition: f64,
    /// Largest tolerated estimate of the absolute rounding error.
    pub max_abs_error: f64,
    pub term_budget: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self {
            max_condition: 1e12,
            max_abs_error: 1e-14,
            term_budget: 1_000_000,
        }
    }
}

fn check_widths(gamma: f64, sigma: f64) -> Result<()> {
    if !(gamma > 0.0 && sigma > 0.0 && gamma.is_finite() && sigma.is_finite()) {
        return Err(HgError::domain(format!(
            "overlap widths must be positive, got gamma={gamma}, sigma={sigma}"
        )));
    }
    Ok(())
}

/// `ln(c_t c_s t! s!)` with `c_n = (2ⁿ n! √π)^{-1/2}`, i.e. `½ ln(t! s! / (2^{t+s} π))`.
fn ln_hermite_norms(t: usize, s: usize) -> f64 {
    0.5 * (log_factorial(t as u64) + log_factorial(s as u64) - (t + s) as f64 * LN_2 - PI.ln())
}

/// Result of summing the double series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: f64,
    pub abs_sum: f64,
    pub condition: f64,
    pub terms: usize,
}

/// The overlap integral by expanding both Hermite polynomials in power series
/// and integrating term by term:
///
/// ```text
/// I = √(γσ/α) c_t c_s t! s! Σ_ℓ Σ_j (−1)^{ℓ+j} / (ℓ!(t−2ℓ)! j!(s−2j)!)
///     · X^{t−2ℓ} Y^{s−2j} Γ((t+s+1)/2 − ℓ − j)
/// α = γ² + σ²/2,   X = 2√2 γ / √α,   Y = 2σ / √α
/// ```
///
/// Terms are formed in log-magnitude and accumulated with compensated summation.
pub fn overlap_double_series(
    gamma: f64,
    sigma: f64,
    t: usize,
    s: usize,
    term_budget: usize,
) -> Result<SeriesSum> {
    check_widths(gamma, sigma)?;
    if (t + s) % 2 == 1 {
        return Ok(SeriesSum {
            value: 0.0,
            abs_sum: 0.0,
            condition: 1.0,
            terms: 0,
        });
    }
    let alpha = gamma * gamma + 0.5 * sigma * sigma;
    let ln_x = (2.0 * SQRT_2 * gamma).ln() - 0.5 * alpha.ln();
    let ln_y = (2.0 * sigma).ln() - 0.5 * alpha.ln();
    let ln_pref = 0.5 * (gamma * sigma / alpha).ln() + ln_hermite_norms(t, s);

    let mut acc = CompensatedSum::new();
    for l in 0..=t / 2 {
        let ln_l = -log_factorial(l as u64)
            - log_factorial((t - 2 * l) as u64)
            + (t - 2 * l) as f64 * ln_x;
        for j in 0..=s / 2 {
            if acc.terms() >= term_budget {
                return Err(HgError::SeriesBudget {
                    budget: term_budget,
                    partial_sum: acc.value() * ln_pref.exp(),
                    bound: acc.abs_sum() * ln_pref.exp(),
                });
            }
            let two_z = (t + s + 1 - 2 * l - 2 * j) as u64;
            let ln_term = ln_pref
                + ln_l
                - log_factorial(j as u64)
                - log_factorial((s - 2 * j) as u64)
                + (s - 2 * j) as f64 * ln_y
                + log_gamma_half_integer(two_z)?;
            let sign = if (l + j) % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(sign * ln_term.exp());
        }
    }
    Ok(SeriesSum {
        value: acc.value(),
        abs_sum: acc.abs_sum(),
        condition: acc.condition(),
        terms: acc.terms(),
    })
}

/// Closed form for `t = 0`:
///
/// ```text
/// I(γ, σ, 0, s) = √(γσ/α) · c_0 c_s · √π · s! / (s/2)! · (σ²/α − 1)^{s/2}
/// ```
pub fn overlap_t0_closed_form(gamma: f64, sigma: f64, s: usize) -> Result<f64> {
    check_widths(gamma, sigma)?;
    if s % 2 == 1 {
        return Ok(0.0);
    }
    let alpha = gamma * gamma + 0.5 * sigma * sigma;
    let base = sigma * sigma / alpha - 1.0;
    let half = s / 2;
    let ln_mag = 0.5 * (gamma * sigma / alpha).ln() + ln_hermite_norms(0, s) + 0.5 * PI.ln()
        - log_factorial(half as u64);
    // 0⁰ = 1 for the confocal case σ² = α.
    Ok(ln_mag.exp() * base.powi(half as i32))
}

/// Single sum obtained from the product of the two Hermite generating functions:
///
/// ```text
/// I = √(γσ/α) c_t c_s √π t! s! Σ_r R^r/r! · A^{(t−r)/2}/((t−r)/2)! · (−A)^{(s−r)/2}/((s−r)/2)!
/// A = (γ² − σ²/2)/α,   R = 2√2 γσ/α,   A² + R²/4 = 1
/// ```
///
/// Every term has modulus at most one after the prefactor, so this form is well
/// conditioned where the double series is not.
pub fn overlap_single_series(gamma: f64, sigma: f64, t: usize, s: usize) -> Result<f64> {
    check_widths(gamma, sigma)?;
    if (t + s) % 2 == 1 {
        return Ok(0.0);
    }
    let g2 = gamma * gamma;
    let h2 = 0.5 * sigma * sigma;
    let alpha = g2 + h2;
    let a = (g2 - h2) / alpha;
    let ln_r = (2.0 * SQRT_2 * gamma * sigma / alpha).ln();
    let ln_pref = 0.5 * (gamma * sigma / alpha).ln() + ln_hermite_norms(t, s) + 0.5 * PI.ln();

    let mut acc = CompensatedSum::new();
    let mut r = t % 2;
    while r <= t.min(s) {
        let (pt, ps) = ((t - r) / 2, (s - r) / 2);
        let ln_mag = ln_pref + r as f64 * ln_r
            - log_factorial(r as u64)
            - log_factorial(pt as u64)
            - log_factorial(ps as u64);
        let powers = a.powi(pt as i32) * (-a).powi(ps as i32);
        acc.add(ln_mag.exp() * powers);
        r += 2;
    }
    Ok(acc.value())
}

/// `I(γ, σ, t, s)` for unit-norm real modes, with the default [`SeriesPolicy`].
pub fn overlap_integral(gamma: f64, sigma: f64, t: usize, s: usize) -> Result<f64> {
    Ok(overlap_integral_detailed(gamma, sigma, t, s, &SeriesPolicy::default())?.value)
}

pub fn overlap_integral_detailed(
    gamma: f64,
    sigma: f64,
    t: usize,
    s: usize,
    policy: &SeriesPolicy,
) -> Result<OverlapValue> {
    check_widths(gamma, sigma)?;
    if (t + s) % 2 == 1 {
        return Ok(OverlapValue {
            value: 0.0,
            method: OverlapMethod::ParityZero,
            condition: 1.0,
        });
    }
    if t == 0 {
        return Ok(OverlapValue {
            value: overlap_t0_closed_form(gamma, sigma, s)?,
            method: OverlapMethod::ClosedFormT0,
            condition: 1.0,
        });
    }
    let series = overlap_double_series(gamma, sigma, t, s, policy.term_budget)?;
    let abs_error = series.abs_sum * f64::EPSILON * (t + s + 8) as f64;
    if series.condition > policy.max_condition || abs_error > policy.max_abs_error {
        return Ok(OverlapValue {
            value: overlap_single_series(gamma, sigma, t, s)?,
            method: OverlapMethod::SingleSeriesFallback,
            condition: series.condition,
        });
    }
    Ok(OverlapValue {
        value: series.value,
        method: OverlapMethod::DoubleSeries,
        condition: series.condition,
    })
}

/// `±1` carried by the product `D_n D_0 D_a* D_b*` of convention phases.
///
/// With the `−(iᵐ)` phases the product is `i^{n − a − b}`, real whenever
/// the parity rule holds.
pub fn coefficient_phase_sign(n: usize, a: usize, b: usize, convention: ModeFunctionConvention) -> f64 {
    match convention.phase {
        PhaseConvention::RealPositiveLeading => 1.0,
        PhaseConvention::PaperPhase => {
            let exponent = (n as i64 - a as i64 - b as i64).rem_euclid(4);
            match exponent {
                0 => 1.0,
                2 => -1.0,
                // parity-forbidden; the coefficient is zero anyway
                _ => 0.0,
            }
        }
    }
}

/// Uniform factor applied to every coefficient by the convention's normalization.
fn coefficient_norm_scale(convention: ModeFunctionConvention) -> f64 {
    convention.norm_factor().powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientValue {
    pub value: f64,
    /// At least one overlap needed the single-sum fallback.
    pub fallback: bool,
}

/// Cached overlaps for one `(n, params)` pair, indexed by the diagonal-mode order.
struct OverlapTables {
    pump: Vec<OverlapValue>,
    phase_matching: Vec<OverlapValue>,
}

impl OverlapTables {
    fn build(n: usize, params: &PhysicalParams, max_order: usize, policy: &SeriesPolicy) -> Result<Self> {
        let sigma = params.sigma();
        let pump = (0..=max_order)
            .map(|s| overlap_integral_detailed(params.pump_waist, sigma, n, s, policy))
            .collect::<Result<Vec<_>>>()?;
        let phase_matching = (0..=max_order)
            .map(|k| overlap_integral_detailed(params.pm_width, sigma, 0, k, policy))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            pump,
            phase_matching,
        })
    }

    fn coefficient(&self, n: usize, a: usize, b: usize, params: &PhysicalParams) -> Result<CoefficientValue> {
        if (a + b + n) % 2 == 1 {
            return Ok(CoefficientValue {
                value: 0.0,
                fallback: false,
            });
        }
        let total = a + b;
        let mut acc = CompensatedSum::new();
        let mut fallback = false;
        // I(δ, σ, 0, k) vanishes for odd k.
        for k in (0..=total).step_by(2) {
            let pump = self.pump[total - k];
            let pm = self.phase_matching[k];
            if pump.value == 0.0 || pm.value == 0.0 {
                continue;
            }
            fallback |= pump.method == OverlapMethod::SingleSeriesFallback;
            acc.add(diag_hg_coefficient(a, b, k)? * pump.value * pm.value);
        }
        let value = SQRT_2
            * acc.value()
            * coefficient_norm_scale(params.convention)
            * coefficient_phase_sign(n, a, b, params.convention);
        Ok(CoefficientValue { value, fallback })
    }
}

/// `C_ab^(n)` for equal detection widths σ₁ = σ₂ = σ.
pub fn coefficient_1d(n: usize, a: usize, b: usize, params: &PhysicalParams) -> Result<f64> {
    Ok(coefficient_1d_detailed(n, a, b, params, &SeriesPolicy::default())?.value)
}

pub fn coefficient_1d_detailed(
    n: usize,
    a: usize,
    b: usize,
    params: &PhysicalParams,
    policy: &SeriesPolicy,
) -> Result<CoefficientValue> {
    params.validate()?;
    if (a + b + n) % 2 == 1 {
        return Ok(CoefficientValue {
            value: 0.0,
            fallback: false,
        });
    }
    OverlapTables::build(n, params, a + b, policy)?.coefficient(n, a, b, params)
}

/// The coefficient as a complex number, carrying the phases `D_n D_0 D_a* D_b*`
/// of the active convention. With `−iⁿ` phases its imaginary part vanishes.
pub fn coefficient_1d_complex(n: usize, a: usize, b: usize, params: &PhysicalParams) -> Result<Complex64> {
    let unit_phase = PhysicalParams {
        convention: ModeFunctionConvention {
            phase: PhaseConvention::RealPositiveLeading,
            ..params.convention
        },
        ..*params
    };
    let magnitude = coefficient_1d(n, a, b, &unit_phase)?;
    let c = params.convention;
    Ok(c.phase(n) * c.phase(0) * c.phase(a).conj() * c.phase(b).conj() * magnitude)
}

/// `C^{(nm)}_{jkst} = C^{(n)}_{js} · C^{(m)}_{kt}`.
pub fn coefficient_4d(
    n: usize,
    m: usize,
    j: usize,
    k: usize,
    s: usize,
    t: usize,
    params: &PhysicalParams,
) -> Result<f64> {
    let x = coefficient_1d(n, j, s, params)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(x * coefficient_1d(m, k, t, params)?)
}

/// Truncated `(A+1) × (A+1)` grid of `C_ab^(n)`, row index `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub pump_index_1d: usize,
    pub params: PhysicalParams,
    pub max_index: usize,
    pub entries: DMatrix<f64>,
    /// Frobenius norm before any rescaling.
    pub raw_frobenius_norm: f64,
    pub normalized: bool,
    /// Missing squared norm `1 − Σ|C_ab|²` of the unit-norm amplitude, clamped at zero.
    pub truncation_tail: f64,
    /// Entries for which an overlap used the single-sum fallback.
    pub fallback_entries: usize,
}

impl CoefficientMatrix {
    /// Wraps an externally computed grid (e.g. from quadrature or a file).
    pub fn from_entries(
        pump_index_1d: usize,
        params: PhysicalParams,
        entries: DMatrix<f64>,
        normalize: bool,
    ) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(HgError::Precondition(format!(
                "coefficient grid must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let max_index = entries.nrows() - 1;
        let mut m = Self {
            pump_index_1d,
            params,
            max_index,
            raw_frobenius_norm: entries.norm(),
            entries,
            normalized: false,
            truncation_tail: 0.0,
            fallback_entries: 0,
        };
        let expected = coefficient_norm_scale(params.convention);
        m.truncation_tail = (1.0 - (m.raw_frobenius_norm / expected).powi(2)).max(0.0);
        if normalize {
            m.normalize();
        }
        Ok(m)
    }

    /// Rescales to unit Frobenius norm; `raw_frobenius_norm` is kept.
    pub fn normalize(&mut self) {
        let norm = self.entries.norm();
        if norm > 0.0 {
            self.entries /= norm;
        }
        self.normalized = true;
    }

    pub fn dim(&self) -> usize {
        self.max_index + 1
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[(a, b)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Fills the coefficient grid for pump order `n` up to `max_index`.
pub fn coefficient_matrix(
    n: usize,
    params: &PhysicalParams,
    max_index: usize,
    normalize: bool,
) -> Result<CoefficientMatrix> {
    coefficient_matrix_with_policy(n, params, max_index, normalize, &SeriesPolicy::default())
}

pub fn coefficient_matrix_with_policy(
    n: usize,
    params: &PhysicalParams,
    max_index: usize,
    normalize: bool,
    policy: &SeriesPolicy,
) -> Result<CoefficientMatrix> {
    params.validate()?;
    if max_index < n {
        log::warn!("max index {max_index} is below the pump order {n}; most of the state is truncated");
    }
    let tables = OverlapTables::build(n, params, 2 * max_index, policy)?;
    let dim = max_index + 1;
    let rows: Vec<Vec<CoefficientValue>> = (0..dim)
        .into_par_iter()
        .map(|a| {
            (0..dim)
                .map(|b| tables.coefficient(n, a, b, params))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let fallback_entries = rows.iter().flatten().filter(|c| c.fallback).count();
    let entries = DMatrix::from_fn(dim, dim, |a, b| rows[a][b].value);
    let mut m = CoefficientMatrix::from_entries(n, *params, entries, normalize)?;
    m.fallback_entries = fallback_entries;
    Ok(m)
}

/// Special cases with known closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormCase {
    /// Gaussian pump with σ = √(2 w_p δ): `C_js = δ_js √(1−μ²) μʲ`, `μ = (w−δ)/(w+δ)`,
    /// with `−iⁿ` mode phases; real-positive modes see `(−μ)ʲ`.
    GaussianPumpDiagonal,
    /// `w_p = δ` with σ = √(2 w_p δ): `C_ab = √(n! / (2ⁿ a! b!))` on `a + b = n`.
    ConfocalBinomial,
}

fn nearly_equal(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs())
}

pub fn closed_form_reference(
    case: ClosedFormCase,
    n: usize,
    a: usize,
    b: usize,
    params: &PhysicalParams,
) -> Result<f64> {
    params.validate()?;
    if params.sigma_mode != SigmaMode::Geometric {
        return Err(HgError::domain("closed forms require the geometric detection width"));
    }
    // Both forms assume `−iⁿ` mode phases; real-positive modes differ by (−1)^{(a+b−n)/2}.
    let conv = params.convention;
    let to_convention = if (a + b + n) % 2 == 1 {
        1.0
    } else {
        let flip = if ((a + b).abs_diff(n) / 2) % 2 == 1 { -1.0 } else { 1.0 };
        flip * coefficient_phase_sign(n, a, b, conv) * coefficient_norm_scale(conv)
    };
    closed_form_phased(case, n, a, b, params).map(|v| v * to_convention)
}

fn closed_form_phased(
    case: ClosedFormCase,
    n: usize,
    a: usize,
    b: usize,
    params: &PhysicalParams,
) -> Result<f64> {
    match case {
        ClosedFormCase::GaussianPumpDiagonal => {
            if n != 0 {
                return Err(HgError::domain("Gaussian-pump closed form requires n = 0"));
            }
            if a != b {
                return Ok(0.0);
            }
            let (w, d) = (params.pump_waist, params.pm_width);
            let mu = (w - d) / (w + d);
            Ok((1.0 - mu * mu).sqrt() * mu.powi(a as i32))
        }
        ClosedFormCase::ConfocalBinomial => {
            if !nearly_equal(params.pump_waist, params.pm_width) {
                return Err(HgError::domain("confocal closed form requires w_p = delta"));
            }
            if a + b != n {
                return Err(HgError::domain("confocal closed form requires a + b = n"));
            }
            let ln = 0.5
                * (log_factorial(n as u64)
                    - n as f64 * LN_2
                    - log_factorial(a as u64)
                    - log_factorial(b as u64));
            Ok(ln.exp())
        }
    }
}

/// The Gaussian-pump diagonal with the prefactor `wδ/2`, `δ_js (wδ/2)(w−δ)ʲ/(w+δ)^{j+1}`.
///
/// Kept as a diagnostic: its prefactor does not give `Σ_j C_jj² = 1`.
pub fn gaussian_pump_diagonal_half_prefactor(j: usize, s: usize, params: &PhysicalParams) -> f64 {
    if j != s {
        return 0.0;
    }
    let (w, d) = (params.pump_waist, params.pm_width);
    w * d / 2.0 * (w - d).powi(j as i32) / (w + d).powi(j as i32 + 1)
}
