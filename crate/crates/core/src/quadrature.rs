//! One-dimensional quadrature rules used by the oracle.
//!
//! Both rules integrate an *unweighted* integrand `∫ f(z) dz`. For
//! Gauss-Hermite the stored weights are `wᵢ e^{zᵢ²}`, so a rule with `P` nodes
//! is exact for `f = polynomial(deg < 2P) · e^{−z²}`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{HgError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    GaussHermite,
    ClenshawCurtis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}

/// Orthonormal Hermite functions `φ_{n−1}(z)` and `φ_n(z)` as
/// `(mantissa_{n−1}, mantissa_n, log_scale)`; the true values are the mantissas
/// times `exp(log_scale − z²/2)`.
fn hermite_pair_scaled(n: usize, z: f64) -> (f64, f64, f64) {
    const RESCALE: f64 = 1e100;
    let mut log_scale = -0.25 * PI.ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..n {
        let jf = j as f64;
        let next = z * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (prev, cur, log_scale)
}

/// Gauss-Hermite nodes from the eigenvalues of the Jacobi matrix, polished by
/// Newton steps on the orthonormal recurrence.
fn gauss_hermite_uncached(n: usize) -> Result<Rule1d> {
    if n == 0 {
        return Err(HgError::domain("quadrature needs at least one node"));
    }
    let nf = n as f64;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (0.5 * i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut eig = SymmetricEigen::new(jacobi).eigenvalues.as_slice().to_vec();
    eig.sort_by(|a, b| a.total_cmp(b));

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut z in eig {
        for _ in 0..4 {
            let (prev, cur, _) = hermite_pair_scaled(n, z);
            if prev == 0.0 {
                break;
            }
            // p_n'(z) = √(2n) p_{n−1}(z)
            let step = cur / ((2.0 * nf).sqrt() * prev);
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (prev, _, log_scale) = hermite_pair_scaled(n, z);
        // wᵢ e^{zᵢ²} = 1 / (n φ_{n−1}(zᵢ)²)
        let ln_phi = prev.abs().ln() + log_scale - 0.5 * z * z;
        nodes.push(z);
        weights.push((-2.0 * ln_phi).exp() / nf);
    }
    // exact symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let z = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -z;
        nodes[j] = z;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(Rule1d { nodes, weights })
}

/// Clenshaw-Curtis rule with `n` points on `[−halfwidth, halfwidth]`.
fn clenshaw_curtis_unit(n: usize) -> Result<Rule1d> {
    if n < 2 {
        return Err(HgError::domain("Clenshaw-Curtis needs at least two nodes"));
    }
    let big_n = n - 1;
    let nf = big_n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..=big_n {
        let theta = k as f64 * PI / nf;
        let mut s = 0.0;
        for j in 1..=big_n / 2 {
            let b = if 2 * j == big_n { 1.0 } else { 2.0 };
            s += b / (4.0 * (j * j) as f64 - 1.0) * (2.0 * j as f64 * theta).cos();
        }
        let c = if k == 0 || k == big_n { 1.0 } else { 2.0 };
        nodes.push(-theta.cos());
        weights.push(c / nf * (1.0 - s));
    }
    Ok(Rule1d { nodes, weights })
}

type RuleCache = Mutex<HashMap<(QuadratureRule, usize), Arc<Rule1d>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Standard rule: Gauss-Hermite on ℝ, or Clenshaw-Curtis on `[−1, 1]`.
pub fn standard_rule(rule: QuadratureRule, nodes: usize) -> Result<Arc<Rule1d>> {
    if let Some(r) = cache().lock().unwrap().get(&(rule, nodes)) {
        return Ok(Arc::clone(r));
    }
    let built = Arc::new(match rule {
        QuadratureRule::GaussHermite => gauss_hermite_uncached(nodes)?,
        QuadratureRule::ClenshawCurtis => clenshaw_curtis_unit(nodes)?,
    });
    cache()
        .lock()
        .unwrap()
        .insert((rule, nodes), Arc::clone(&built));
    Ok(built)
}

/// Gauss-Hermite rule for `∫ f(z) dz` where `f` decays like `e^{−z²}`.
pub fn gauss_hermite(nodes: usize) -> Result<Arc<Rule1d>> {
    standard_rule(QuadratureRule::GaussHermite, nodes)
}

/// Clenshaw-Curtis rule on `[−halfwidth, halfwidth]`.
pub fn clenshaw_curtis(nodes: usize, halfwidth: f64) -> Result<Rule1d> {
    let unit = standard_rule(QuadratureRule::ClenshawCurtis, nodes)?;
    Ok(Rule1d {
        nodes: unit.nodes.iter().map(|z| z * halfwidth).collect(),
        weights: unit.weights.iter().map(|w| w * halfwidth).collect(),
    })
}
