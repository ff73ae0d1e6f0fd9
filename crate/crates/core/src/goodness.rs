//! Certification that a mixed pair is *good*, i.e. `Σ_i ∫ |g_i log g_i| < ∞`,
//! through three sufficient conditions: a finite ε-th absolute moment of
//! `Y`, a finite `∫ g^{1+δ}` and finite discrete entropy of `X`.
//!
//! The certificate also carries an explicit upper bound on
//! `Σ_i |∫ g_i log g_i|`:
//!
//! ```text
//! H(X) + |log C_ε| + M_ε + log B_δ + ∫ g^{1+δ}
//! ```
//!
//! where `C_ε` normalizes `e^{-|y|^ε}` and `B_δ` is the point past which
//! `log x ≤ x^δ`. A failed report means "not certified": the conditions are
//! sufficient, not necessary.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::distribution::MixedPairDistribution;
use crate::entropy::shannon_entropy_unchecked;
use crate::error::{Error, Result};
use crate::quadrature::QuadOptions;
use crate::vector::MixedPairVectorDistribution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoodnessReport {
    pub epsilon: f64,
    pub delta: f64,
    /// `∫ |y|^ε g(y) dy` (or `∫ ‖y‖^ε g` for vectors).
    pub m_epsilon: f64,
    /// `∫ g(y)^{1+δ} dy`.
    pub power_integral: f64,
    /// `-Σ p_i log p_i`.
    pub discrete_entropy: f64,
    pub b_delta: f64,
    pub c_epsilon: f64,
    pub ln_c_epsilon: f64,
    pub magnitude_bound: f64,
    pub passed: bool,
    /// Why certification failed, when it did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl GoodnessReport {
    fn failed(epsilon: f64, delta: f64, reason: String) -> Self {
        GoodnessReport {
            epsilon,
            delta,
            m_epsilon: f64::NAN,
            power_integral: f64::NAN,
            discrete_entropy: f64::NAN,
            b_delta: f64::NAN,
            c_epsilon: f64::NAN,
            ln_c_epsilon: f64::NAN,
            magnitude_bound: f64::INFINITY,
            passed: false,
            failure: Some(reason),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite_or_divergent(what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DivergentIntegral(format!("{what} evaluated to {v}")))
    }
}

/// `M_ε = ∫ |y|^ε g(y) dy`.
pub fn epsilon_moment(dist: &MixedPairDistribution, epsilon: f64) -> Result<f64> {
    check_positive("epsilon", epsilon)?;
    let mut total = 0.0;
    for atom in dist.atoms() {
        let shape = &atom.sub.shape;
        let mut e = shape.integrate_with(|y, f| if f > 0.0 { y.abs().powf(epsilon) * f } else { 0.0 }, opts_with_zero())?;
        e.value *= atom.sub.mass;
        total += e.value;
    }
    finite_or_divergent("epsilon moment", total)
}

fn opts_with_zero() -> QuadOptions {
    QuadOptions::with_tol(1e-10)
}

/// `∫ g(y)^{1+δ} dy` for the marginal density `g = Σ_i g_i`.
pub fn power_integral(dist: &MixedPairDistribution, delta: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    let e = dist.integrate_marginal(|_, g| if g > 0.0 { g.powf(1.0 + delta) } else { 0.0 }, QuadOptions::with_tol(1e-10))?;
    finite_or_divergent("power integral", e.value)
}

/// `-Σ_i p_i log p_i` over the atom masses.
pub fn discrete_entropy(dist: &MixedPairDistribution) -> f64 {
    shannon_entropy_unchecked(dist.atoms().iter().map(|a| a.sub.mass))
}

/// `log C_ε` with `C_ε = 1 / ∫ e^{-|y|^ε} dy = 1 / (2 Γ(1 + 1/ε))`.
pub fn ln_normalizing_constant_c(epsilon: f64) -> Result<f64> {
    ln_normalizing_constant_c_dim(epsilon, 1)
}

/// `log` of the normalizer of `e^{-‖y‖^ε}` on `R^d`, i.e. of
/// `1 / (S_{d-1} Γ(d/ε) / ε)`.
pub fn ln_normalizing_constant_c_dim(epsilon: f64, dim: usize) -> Result<f64> {
    check_positive("epsilon", epsilon)?;
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let d = dim as f64;
    let ln_sphere = std::f64::consts::LN_2 + 0.5 * d * std::f64::consts::PI.ln() - ln_gamma(d / 2.0);
    Ok(-(ln_sphere + ln_gamma(d / epsilon) - epsilon.ln()))
}

/// `C_ε = 1 / ∫ e^{-|y|^ε} dy`. Underflows to zero for very small `ε`;
/// use [`ln_normalizing_constant_c`] there.
pub fn normalizing_constant_c(epsilon: f64) -> Result<f64> {
    Ok(ln_normalizing_constant_c(epsilon)?.exp())
}

pub fn normalizing_constant_c_dim(epsilon: f64, dim: usize) -> Result<f64> {
    Ok(ln_normalizing_constant_c_dim(epsilon, dim)?.exp())
}

/// Smallest `B ≥ 1` with `log x ≤ x^δ` for every `x ≥ B`.
///
/// `x^δ - log x` has its minimum `(1 + log δ) / δ` at `x = δ^{-1/δ}`, so the
/// inequality holds everywhere when `δ ≥ 1/e`. Otherwise the largest
/// crossing is found by bisection in `t = log x` on `e^{δ t} = t`.
pub fn log_threshold_b(delta: f64) -> Result<f64> {
    check_positive("delta", delta)?;
    if 1.0 + delta.ln() >= 0.0 {
        return Ok(1.0);
    }
    let phi = |t: f64| (delta * t).exp() - t;
    let mut lo = -delta.ln() / delta; // argmin, phi(lo) < 0
    let mut hi = 2.0 * lo.max(1.0);
    while phi(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(hi.exp())
}

/// Evaluates the three sufficient conditions and assembles the bound.
/// Divergent integrals produce a failed report rather than an error.
pub fn goodness_check(dist: &MixedPairDistribution, epsilon: f64, delta: f64) -> Result<GoodnessReport> {
    check_positive("epsilon", epsilon)?;
    check_positive("delta", delta)?;
    let parts = (|| -> Result<(f64, f64)> { Ok((epsilon_moment(dist, epsilon)?, power_integral(dist, delta)?)) })();
    let (m_epsilon, power) = match parts {
        Ok(p) => p,
        Err(Error::DivergentIntegral(why)) => return Ok(GoodnessReport::failed(epsilon, delta, why)),
        Err(e) => return Err(e),
    };
    assemble(epsilon, delta, m_epsilon, power, discrete_entropy(dist), ln_normalizing_constant_c(epsilon)?)
}

fn assemble(
    epsilon: f64,
    delta: f64,
    m_epsilon: f64,
    power_integral: f64,
    discrete_entropy: f64,
    ln_c_epsilon: f64,
) -> Result<GoodnessReport> {
    let b_delta = log_threshold_b(delta)?;
    let magnitude_bound = discrete_entropy + ln_c_epsilon.abs() + m_epsilon + b_delta.ln() + power_integral;
    let passed = [m_epsilon, power_integral, discrete_entropy, magnitude_bound]
        .iter()
        .all(|v| v.is_finite());
    Ok(GoodnessReport {
        epsilon,
        delta,
        m_epsilon,
        power_integral,
        discrete_entropy,
        b_delta,
        c_epsilon: ln_c_epsilon.exp(),
        ln_c_epsilon,
        magnitude_bound,
        passed,
        failure: (!passed).then(|| "a sufficient condition evaluated to a non-finite value".to_string()),
    })
}

/// The vector form of [`goodness_check`]: `‖y‖^ε` moment, `∫ g^{1+δ}` over
/// `R^d` and the entropy of the label vector.
pub fn goodness_check_vector(dist: &MixedPairVectorDistribution, epsilon: f64, delta: f64) -> Result<GoodnessReport> {
    check_positive("epsilon", epsilon)?;
    check_positive("delta", delta)?;
    let parts = (|| -> Result<(f64, f64)> {
        let m = dist.expect_over_marginal(|y, _| y.iter().map(|v| v * v).sum::<f64>().sqrt().powf(epsilon))?;
        let p = dist.expect_over_marginal(|_, g| g.powf(delta))?;
        Ok((finite_or_divergent("epsilon moment", m)?, finite_or_divergent("power integral", p)?))
    })();
    let (m_epsilon, power) = match parts {
        Ok(p) => p,
        Err(Error::DivergentIntegral(why)) => return Ok(GoodnessReport::failed(epsilon, delta, why)),
        Err(e) => return Err(e),
    };
    let h = shannon_entropy_unchecked(dist.atoms().iter().map(|a| a.mass));
    assemble(epsilon, delta, m_epsilon, power, h, ln_normalizing_constant_c_dim(epsilon, dist.dim())?)
}
