use serde::Serialize;

use super::chain::poisson_entropy_rate;
use super::path::{merge, simulate_poisson, split, SamplePath};
use crate::entropy::shannon_entropy_unchecked;
use crate::error::{Error, Result};
use crate::estimators::{nn_differential_entropy, EstimatorOptions};
use crate::rng::stream;

/// Minimum events per baby process for the empirical rate estimate.
pub const MIN_EVENTS: usize = 100;

/// The four lines of the splitting identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingIdentity {
    pub lambda: f64,
    pub p: f64,
    /// Sum of the baby-process rates, via the rate function.
    /// Then the same sum written out, the parent rate plus coin entropy
    /// written out, and the same through the rate and Shannon functions.
    pub lines: [f64; 4],
    pub lhs: f64,
    pub rhs: f64,
    pub max_discrepancy: f64,
}

fn check_bias(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("bias must lie in (0, 1), got {p}")))
    }
}

/// `λp(1 - log λp) + λ(1-p)(1 - log λ(1-p)) = λ(1 - log λ) + λ H(p)`,
/// evaluated line by line.
pub fn splitting_identity(lambda: f64, p: f64) -> Result<SplittingIdentity> {
    check_bias(p)?;
    let q = 1.0 - p;
    let l1 = poisson_entropy_rate(lambda * p)? + poisson_entropy_rate(lambda * q)?;
    let l2 = lambda * p * (1.0 - (lambda * p).ln()) + lambda * q * (1.0 - (lambda * q).ln());
    let l3 = lambda * (1.0 - lambda.ln()) + lambda * (-p * p.ln() - q * q.ln());
    let l4 = poisson_entropy_rate(lambda)? + lambda * shannon_entropy_unchecked([p, q]);
    let lines = [l1, l2, l3, l4];
    let max_discrepancy = lines.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    Ok(SplittingIdentity {
        lambda,
        p,
        lines,
        lhs: l1,
        rhs: l4,
        max_discrepancy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitExperimentOptions {
    pub lambda: f64,
    pub p: f64,
    pub horizon: f64,
    pub trials: usize,
    pub seed: u64,
    pub estimator: EstimatorOptions,
}

/// Entropy-rate estimate `λ̂ ĥ` for one baby process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BabyEstimate {
    pub events: usize,
    pub rate_hat: f64,
    /// Nearest-neighbour entropy of the interarrival times.
    pub interarrival_entropy: f64,
    pub estimate: f64,
    pub standard_error: f64,
    /// `μ(1 - log μ)` at the true baby rate `μ`.
    pub expected: f64,
}

impl BabyEstimate {
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.expected) / self.standard_error
    }

    /// The Poisson bound holds up to `sigmas` standard errors.
    pub fn respects_poisson_bound(&self, sigmas: f64) -> bool {
        self.estimate <= self.expected + sigmas * self.standard_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub parent_events: usize,
    pub heads: BabyEstimate,
    pub tails: BabyEstimate,
    pub merge_matches_parent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitExperimentReport {
    pub lambda: f64,
    pub p: f64,
    pub horizon: f64,
    pub seed: u64,
    pub trials: Vec<TrialReport>,
    /// Trial means, with standard error `sqrt(Σ se²) / trials`.
    pub heads: BabyEstimate,
    pub tails: BabyEstimate,
    pub merge_matches_parent: bool,
}

fn baby(path: &SamplePath, rate: f64, opts: &EstimatorOptions) -> Result<BabyEstimate> {
    let events = path.count();
    if events < MIN_EVENTS {
        return Err(Error::TooFewEvents {
            count: events,
            min: MIN_EVENTS,
        });
    }
    let t = path.horizon;
    let rate_hat = events as f64 / t;
    let h = nn_differential_entropy(&path.interarrivals(), opts)?;
    let estimate = rate_hat * h.value;
    // Delta method with Var(λ̂) = λ̂ / T.
    let var = h.value * h.value * rate_hat / t + rate_hat * rate_hat * h.standard_error * h.standard_error;
    Ok(BabyEstimate {
        events,
        rate_hat,
        interarrival_entropy: h.value,
        estimate,
        standard_error: var.sqrt(),
        expected: poisson_entropy_rate(rate)?,
    })
}

fn average(items: &[BabyEstimate]) -> BabyEstimate {
    let n = items.len() as f64;
    let mean = |f: fn(&BabyEstimate) -> f64| items.iter().map(f).sum::<f64>() / n;
    BabyEstimate {
        events: items.iter().map(|b| b.events).sum(),
        rate_hat: mean(|b| b.rate_hat),
        interarrival_entropy: mean(|b| b.interarrival_entropy),
        estimate: mean(|b| b.estimate),
        standard_error: items.iter().map(|b| b.standard_error.powi(2)).sum::<f64>().sqrt() / n,
        expected: items[0].expected,
    }
}

/// Simulates thinning of a Poisson process and estimates both baby
/// entropy rates through the renewal identity (rate × interarrival
/// entropy). Trial `t` runs on stream `(seed, t)`.
pub fn split_entropy_experiment(opts: &SplitExperimentOptions) -> Result<SplitExperimentReport> {
    check_bias(opts.p)?;
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let mut trials = Vec::with_capacity(opts.trials);
    for t in 0..opts.trials {
        let mut rng = stream(opts.seed, t as u64);
        let parent = simulate_poisson(opts.lambda, opts.horizon, &mut rng)?;
        let s = split(&parent, opts.p, &mut rng)?;
        let est = EstimatorOptions {
            seed: opts.estimator.seed.wrapping_add(t as u64),
            ..opts.estimator
        };
        trials.push(TrialReport {
            trial: t,
            parent_events: parent.count(),
            heads: baby(&s.heads, opts.lambda * opts.p, &est)?,
            tails: baby(&s.tails, opts.lambda * (1.0 - opts.p), &est)?,
            merge_matches_parent: merge(&s.heads, &s.tails)? == parent,
        });
    }
    let heads: Vec<BabyEstimate> = trials.iter().map(|t| t.heads).collect();
    let tails: Vec<BabyEstimate> = trials.iter().map(|t| t.tails).collect();
    Ok(SplitExperimentReport {
        lambda: opts.lambda,
        p: opts.p,
        horizon: opts.horizon,
        seed: opts.seed,
        heads: average(&heads),
        tails: average(&tails),
        merge_matches_parent: trials.iter().all(|t| t.merge_matches_parent),
        trials,
    })
}
