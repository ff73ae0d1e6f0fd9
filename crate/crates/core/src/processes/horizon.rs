use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::chain::CtmcSpec;
use crate::entropy::shannon_entropy_unchecked;
use crate::error::{Error, Result};

/// Guard on `λT` for the Poisson series.
pub const MAX_MEAN_COUNT: f64 = 1e5;
const TAIL_MASS_TOL: f64 = 1e-15;
const TAIL_ENTROPY_TOL: f64 = 1e-12;

/// Entropy of a Poisson process on `(0, T]`: the count plus the
/// locations `Σ_k p_k log(T^k / k!)` of the points given their number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonHorizonEntropy {
    pub total: f64,
    /// `H(N(T))`.
    pub count_entropy: f64,
    pub location_entropy: f64,
    pub mean_count: f64,
    pub series_terms: usize,
    /// Bound on the omitted pmf tail.
    pub tail_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtmcHorizonEntropy {
    pub total: f64,
    pub poisson: PoissonHorizonEntropy,
    /// `Σ_k p_k [H(π) + k H_MC]`.
    pub mark_entropy: f64,
    pub initial_entropy: f64,
    pub transition_entropy: f64,
}

/// Visits `(k, p_k, log p_k)` until the pmf tail and the tail of
/// `term(k, log p_k)` are negligible.
fn poisson_series(mu: f64, mut visit: impl FnMut(usize, f64, f64), tail_size: impl Fn(usize, f64) -> f64) -> (usize, f64) {
    let ln_mu = mu.ln();
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let ln_p = -mu + kf * ln_mu - ln_gamma(kf + 1.0);
        let p = ln_p.exp();
        visit(k, p, ln_p);
        if kf + 1.0 > mu {
            // Later terms shrink at least geometrically with ratio r.
            let r = mu / (kf + 2.0);
            let tail = p * r / (1.0 - r);
            if tail < TAIL_MASS_TOL && tail * tail_size(k + 1, ln_p) < TAIL_ENTROPY_TOL {
                return (k + 1, tail);
            }
        }
        k += 1;
    }
}

fn check(lambda: f64, horizon: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() || !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("need lambda, T > 0 (got {lambda}, {horizon})")));
    }
    let mean = lambda * horizon;
    if mean > MAX_MEAN_COUNT {
        return Err(Error::HorizonTooLarge {
            mean,
            max: MAX_MEAN_COUNT,
        });
    }
    Ok(mean)
}

/// Exact entropy of a rate-`lambda` Poisson process observed on `(0, T]`.
pub fn finite_horizon_poisson_entropy(lambda: f64, horizon: f64) -> Result<PoissonHorizonEntropy> {
    let mu = check(lambda, horizon)?;
    let ln_t = horizon.ln();
    let mut count_entropy = 0.0;
    let mut location_entropy = 0.0;
    let (terms, tail) = poisson_series(
        mu,
        |k, p, ln_p| {
            if p > 0.0 {
                let kf = k as f64;
                count_entropy -= p * ln_p;
                location_entropy += p * (kf * ln_t - ln_gamma(kf + 1.0));
            }
        },
        |k, ln_p| {
            let kf = k as f64;
            ln_p.abs() + (kf * ln_t).abs() + ln_gamma(kf + 1.0) + kf
        },
    );
    Ok(PoissonHorizonEntropy {
        total: count_entropy + location_entropy,
        count_entropy,
        location_entropy,
        mean_count: mu,
        series_terms: terms,
        tail_mass: tail,
    })
}

/// Exact path entropy of a stationary chain, `H(N(T), V(T), x(T))`.
pub fn finite_horizon_ctmc_entropy(spec: &CtmcSpec, horizon: f64) -> Result<CtmcHorizonEntropy> {
    let pi = spec.require_stationary_start()?;
    let poisson = finite_horizon_poisson_entropy(spec.lambda(), horizon)?;
    let h_pi = shannon_entropy_unchecked(pi.iter().copied());
    let h_mc = spec.transition_entropy()?;
    let mut mark_entropy = 0.0;
    poisson_series(
        poisson.mean_count,
        |k, p, _| mark_entropy += p * (h_pi + k as f64 * h_mc),
        |k, _| h_pi + k as f64 * h_mc + 1.0,
    );
    Ok(CtmcHorizonEntropy {
        total: poisson.total + mark_entropy,
        poisson,
        mark_entropy,
        initial_entropy: h_pi,
        transition_entropy: h_mc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::{ctmc_entropy_rate, poisson_entropy_rate, TransitionMatrix};
    use std::f64::consts::{E, LN_2};

    #[test]
    fn total_is_mean_count_times_one_minus_log_rate() {
        // Σ p_k (μ - k log μ + log k!) + Σ p_k (k log T - log k!) = μ (1 - log λ).
        for &(lambda, t) in &[(1.0, 1e-3), (0.5, 7.0), (2.0, 500.0), (E, 1000.0), (3.0, 30_000.0)] {
            let h = finite_horizon_poisson_entropy(lambda, t).unwrap();
            let oracle = lambda * t * (1.0 - f64::ln(lambda));
            assert!((h.total - oracle).abs() <= 1e-9 * oracle.abs().max(1.0), "{lambda} {t}: {} vs {oracle}", h.total);
            assert!(h.tail_mass < 1e-15);
        }
    }

    #[test]
    fn small_horizon_count_entropy() {
        let mu: f64 = 1e-3;
        let h = finite_horizon_poisson_entropy(1.0, mu).unwrap();
        let first_order = mu * (1.0 - mu.ln());
        assert!((h.count_entropy - first_order).abs() < 2.0 * mu * mu * (1.0 - mu.ln()));
    }

    #[test]
    fn converges_to_rate() {
        for lambda in [0.5, 1.0, 2.0, E] {
            let t = 1e3 / lambda;
            let h = finite_horizon_poisson_entropy(lambda, t).unwrap();
            assert!((h.total / t - poisson_entropy_rate(lambda).unwrap()).abs() <= 0.01);
        }
        assert!(matches!(
            finite_horizon_poisson_entropy(1.0, 2e5),
            Err(Error::HorizonTooLarge { .. })
        ));
    }

    #[test]
    fn chain_horizon() {
        let single = CtmcSpec::new(1.0, TransitionMatrix::new(vec![vec![1.0]]).unwrap(), vec![1.0]).unwrap();
        let a = finite_horizon_ctmc_entropy(&single, 10.0).unwrap();
        assert_eq!(a.total, finite_horizon_poisson_entropy(1.0, 10.0).unwrap().total);
        let sym = TransitionMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let spec = CtmcSpec::stationary(2.0, sym.clone()).unwrap();
        let h = finite_horizon_ctmc_entropy(&spec, 500.0).unwrap();
        assert!((h.total / 500.0 - 2.0).abs() <= 0.01);
        assert!((h.total / 500.0 - ctmc_entropy_rate(&spec).unwrap()).abs() <= 0.01);
        let tiny = finite_horizon_ctmc_entropy(&spec, 1e-9).unwrap();
        assert!((tiny.total - LN_2).abs() < 1e-6);
        let off = CtmcSpec::new(2.0, sym, vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            finite_horizon_ctmc_entropy(&off, 1.0),
            Err(Error::NonStationaryInitial { .. })
        ));
    }
}
