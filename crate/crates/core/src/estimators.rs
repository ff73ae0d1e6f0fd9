//! Sample-based entropy estimates used as cross-checks: the plug-in
//! estimator for discrete samples and the Kozachenko–Leonenko k-th
//! nearest-neighbour estimator for one-dimensional continuous samples.

use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use statrs::function::gamma::digamma;

use crate::error::{Error, Result};
use crate::rng::{stream, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorMethod {
    PlugIn,
    NearestNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardError {
    Bootstrap,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    /// Neighbour order.
    pub k: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub standard_error: StandardError,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            k: 3,
            bootstrap: 200,
            seed: 0,
            standard_error: StandardError::Bootstrap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub value: f64,
    pub n: usize,
    pub standard_error: f64,
    pub method: EstimatorMethod,
    pub standard_error_method: StandardError,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<usize>,
    /// Samples perturbed to break ties.
    pub jittered: usize,
}

fn sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn plugin_from_counts(counts: &[u64], n: u64) -> f64 {
    let nf = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / nf;
            -q * q.ln()
        })
        .sum()
}

/// `-Σ (c_k / n) log(c_k / n)` over the observed symbol counts.
pub fn plugin_discrete_entropy<T: Hash + Eq>(samples: &[T], opts: &EstimatorOptions) -> Result<EstimatorResult> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut map: HashMap<&T, u64> = HashMap::new();
    let mut order: Vec<&T> = Vec::new();
    for s in samples {
        let c = map.entry(s).or_insert(0);
        if *c == 0 {
            order.push(s);
        }
        *c += 1;
    }
    // First-appearance order keeps bootstrap draws reproducible.
    let counts: Vec<u64> = order.iter().map(|s| map[s]).collect();
    let n = samples.len() as u64;
    let value = plugin_from_counts(&counts, n);
    let standard_error = match opts.standard_error {
        StandardError::Asymptotic => {
            let nf = n as f64;
            let second: f64 = counts
                .iter()
                .map(|&c| {
                    let q = c as f64 / nf;
                    q * q.ln().powi(2)
                })
                .sum();
            ((second - value * value).max(0.0) / nf).sqrt()
        }
        StandardError::Bootstrap => {
            let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
            let reps: Vec<f64> = (0..opts.bootstrap)
                .map(|b| {
                    let mut rng = stream(opts.seed, b as u64);
                    plugin_from_counts(&multinomial(n, &probs, &mut rng), n)
                })
                .collect();
            sd(&reps)
        }
    };
    Ok(EstimatorResult {
        value,
        n: samples.len(),
        standard_error,
        method: EstimatorMethod::PlugIn,
        standard_error_method: opts.standard_error,
        k: None,
        bootstrap: (opts.standard_error == StandardError::Bootstrap).then_some(opts.bootstrap),
        jittered: 0,
    })
}

/// Multinomial counts by successive conditional binomials.
fn multinomial<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = n;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 || i + 1 == probs.len() {
            out.push(left);
            left = 0;
            continue;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let c = Binomial::new(left, q).expect("valid binomial").sample(rng);
        out.push(c);
        left -= c;
        mass -= p;
    }
    out
}

/// Distance from each sorted point to its `k`-th nearest neighbour.
fn knn_distances(sorted: &[f64], k: usize) -> Vec<f64> {
    let n = sorted.len();
    (0..n)
        .map(|i| {
            let (mut l, mut r) = (i, i);
            let mut d = 0.0;
            for _ in 0..k {
                let dl = if l > 0 { sorted[i] - sorted[l - 1] } else { f64::INFINITY };
                let dr = if r + 1 < n { sorted[r + 1] - sorted[i] } else { f64::INFINITY };
                if dl <= dr {
                    l -= 1;
                    d = dl;
                } else {
                    r += 1;
                    d = dr;
                }
            }
            d
        })
        .collect()
}

/// `ψ(n) - ψ(k) + log 2 + (1/n) Σ log ε_i`, with `ε_i` the distance to
/// the `k`-th nearest neighbour.
///
/// Tied values are perturbed by seeded noise of relative size `1e-12`
/// and counted in `jittered`. The bootstrap resamples the per-point terms
/// `log ε_i`, since resampling the points would create zero distances.
pub fn nn_differential_entropy(samples: &[f64], opts: &EstimatorOptions) -> Result<EstimatorResult> {
    let k = opts.k;
    let n = samples.len();
    if k < 1 || n < k + 1 {
        return Err(Error::InvalidArgument(format!("need k >= 1 and at least k + 1 samples (k = {k}, n = {n})")));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let span = sorted[n - 1] - sorted[0];
    if span == 0.0 {
        return Err(Error::DegenerateSample("all samples are equal".into()));
    }
    let mut jittered = 0;
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        let mut rng: StreamRng = stream(opts.seed, u64::MAX - 1);
        let scale = 1e-12 * span.max(sorted[0].abs()).max(sorted[n - 1].abs());
        let tied: Vec<bool> = (0..n)
            .map(|i| (i > 0 && sorted[i - 1] == sorted[i]) || (i + 1 < n && sorted[i + 1] == sorted[i]))
            .collect();
        for i in 0..n {
            if tied[i] {
                sorted[i] += scale * (rng.random::<f64>() - 0.5);
                jittered += 1;
            }
        }
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateSample("ties persist after jitter".into()));
        }
    }
    let terms: Vec<f64> = knn_distances(&sorted, k).into_iter().map(f64::ln).collect();
    let nf = n as f64;
    let offset = digamma(nf) - digamma(k as f64) + std::f64::consts::LN_2;
    let mean = terms.iter().sum::<f64>() / nf;
    let standard_error = match opts.standard_error {
        StandardError::Asymptotic => sd(&terms) / nf.sqrt(),
        StandardError::Bootstrap => {
            let reps: Vec<f64> = (0..opts.bootstrap)
                .map(|b| {
                    let mut rng = stream(opts.seed, b as u64);
                    let mut s = 0.0;
                    for _ in 0..n {
                        s += terms[rng.random_range(0..n)];
                    }
                    s / nf
                })
                .collect();
            sd(&reps)
        }
    };
    Ok(EstimatorResult {
        value: offset + mean,
        n,
        standard_error,
        method: EstimatorMethod::NearestNeighbor,
        standard_error_method: opts.standard_error,
        k: Some(k),
        bootstrap: (opts.standard_error == StandardError::Bootstrap).then_some(opts.bootstrap),
        jittered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensitySpec;
    use crate::rng::seeded;
    use std::f64::consts::LN_2;

    fn draws(d: &DensitySpec, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seeded(seed);
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    #[test]
    fn plugin_examples() {
        let o = EstimatorOptions::default();
        let r = plugin_discrete_entropy(&[7; 50], &o).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.standard_error, 0.0);
        let r = plugin_discrete_entropy(&["a"], &o).unwrap();
        assert_eq!((r.value, r.n), (0.0, 1));
        let mut rng = seeded(4);
        let coins: Vec<bool> = (0..100_000).map(|_| rng.random::<bool>()).collect();
        let r = plugin_discrete_entropy(&coins, &o).unwrap();
        assert!((r.value - LN_2).abs() <= 4.0 * r.standard_error.max(1e-7), "{r:?}");
        assert!(plugin_discrete_entropy::<u8>(&[], &o).is_err());
    }

    #[test]
    fn nearest_neighbor_examples() {
        let o = EstimatorOptions::default();
        let cases = [
            (DensitySpec::unit_uniform(), 0.0),
            (DensitySpec::gaussian(0.0, 1.0).unwrap(), 1.4189385332046727),
            (DensitySpec::exponential(2.0).unwrap(), 1.0 - LN_2),
        ];
        for (i, (d, h)) in cases.iter().enumerate() {
            let r = nn_differential_entropy(&draws(d, 100_000, 40 + i as u64), &o).unwrap();
            assert!((r.value - h).abs() <= 4.0 * r.standard_error, "{d:?}: {r:?}");
            assert_eq!(r.jittered, 0);
        }
    }

    #[test]
    fn shift_invariance_and_scale_covariance() {
        let o = EstimatorOptions::default();
        let s = draws(&DensitySpec::gaussian(0.0, 1.0).unwrap(), 10_000, 8);
        let base = nn_differential_entropy(&s, &o).unwrap();
        let shifted: Vec<f64> = s.iter().map(|v| v + 3.5).collect();
        assert!((nn_differential_entropy(&shifted, &o).unwrap().value - base.value).abs() < 1e-9);
        let scaled: Vec<f64> = s.iter().map(|v| -2.5 * v).collect();
        let diff = nn_differential_entropy(&scaled, &o).unwrap().value - base.value;
        assert!((diff - 2.5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn ties_and_degenerate_samples() {
        let o = EstimatorOptions::default();
        assert!(matches!(
            nn_differential_entropy(&[1.0; 10], &o),
            Err(Error::DegenerateSample(_))
        ));
        assert!(nn_differential_entropy(&[1.0, 2.0, 3.0], &o).is_err());
        let mut s = draws(&DensitySpec::unit_uniform(), 1000, 2);
        s[10] = s[20];
        let a = nn_differential_entropy(&s, &o).unwrap();
        let b = nn_differential_entropy(&s, &o).unwrap();
        assert_eq!(a.jittered, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn asymptotic_standard_error_is_close_to_bootstrap() {
        let s = draws(&DensitySpec::exponential(1.0).unwrap(), 20_000, 3);
        let boot = nn_differential_entropy(&s, &EstimatorOptions::default()).unwrap();
        let asym = nn_differential_entropy(
            &s,
            &EstimatorOptions {
                standard_error: StandardError::Asymptotic,
                ..EstimatorOptions::default()
            },
        )
        .unwrap();
        assert_eq!(boot.value, asym.value);
        assert!((boot.standard_error / asym.standard_error - 1.0).abs() < 0.25);
    }
}
