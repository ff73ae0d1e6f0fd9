use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::entropy::shannon_entropy_unchecked;
use crate::error::{Error, Result};

/// Row sums must match 1 this closely.
pub const ROW_SUM_TOL: f64 = 1e-12;
/// Bound on `‖πP - π‖∞` for a returned stationary distribution.
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-12;
const INITIAL_TOL: f64 = 1e-9;

/// Row-stochastic matrix over states `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    rows: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidChain("empty transition matrix".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidChain(format!("row {i} has {} entries, expected {n}", r.len())));
            }
            if let Some(v) = r.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
                return Err(Error::InvalidChain(format!("row {i} has entry {v} outside [0, 1]")));
            }
            let s: f64 = r.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChain(format!("row {i} sums to {s}")));
            }
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `πP`.
    pub fn left_multiply(&self, pi: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|j| (0..n).map(|i| pi[i] * self.rows[i][j]).sum()).collect()
    }

    fn reachable_from(&self, start: usize, reverse: bool) -> Vec<bool> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for (j, s) in seen.iter_mut().enumerate() {
                let edge = if reverse { self.rows[j][i] } else { self.rows[i][j] };
                if edge > 0.0 && !*s {
                    *s = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Every state reaches every other.
    pub fn is_irreducible(&self) -> bool {
        self.reachable_from(0, false).iter().all(|&b| b) && self.reachable_from(0, true).iter().all(|&b| b)
    }
}

/// `π` with `πP = π` and `Σπ = 1`, for an irreducible `P`.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<Vec<f64>> {
    if !p.is_irreducible() {
        return Err(Error::ReducibleChain);
    }
    let n = p.len();
    // (P^T - I) π = 0 with the last equation replaced by Σπ = 1.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = p.rows[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let lu = a.clone().lu();
    let mut x = lu
        .solve(&b)
        .ok_or_else(|| Error::InvalidChain("stationary system is singular".into()))?;
    // One step of iterative refinement.
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let mut pi: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= s);
    let residual = residual(p, &pi);
    if residual > STATIONARY_RESIDUAL_TOL {
        return Err(Error::InvalidChain(format!("stationary residual {residual:e} above tolerance")));
    }
    Ok(pi)
}

fn residual(p: &TransitionMatrix, pi: &[f64]) -> f64 {
    p.left_multiply(pi)
        .iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// `H_MC = -Σ_i π(i) Σ_j p_ij log p_ij`.
pub fn markov_transition_entropy(p: &TransitionMatrix, pi: &[f64]) -> Result<f64> {
    if pi.len() != p.len() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} states, matrix has {}",
            pi.len(),
            p.len()
        )));
    }
    Ok(pi
        .iter()
        .zip(&p.rows)
        .map(|(w, row)| w * shannon_entropy_unchecked(row.iter().copied()))
        .sum())
}

/// `λ(1 - log λ)`.
pub fn poisson_entropy_rate(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {lambda}")));
    }
    Ok(lambda * (1.0 - lambda.ln()))
}

/// Chain with Poisson(λ) jump times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtmcSpec {
    lambda: f64,
    transitions: TransitionMatrix,
    initial: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    lambda: f64,
    #[serde(rename = "P")]
    p: Vec<Vec<f64>>,
    #[serde(default)]
    initial: Option<Vec<f64>>,
    #[serde(default)]
    stationary: bool,
}

impl CtmcSpec {
    pub fn new(lambda: f64, transitions: TransitionMatrix, initial: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidChain(format!("lambda must be positive, got {lambda}")));
        }
        if initial.len() != transitions.len() {
            return Err(Error::InvalidChain("initial distribution has the wrong length".into()));
        }
        let s: f64 = initial.iter().sum();
        if initial.iter().any(|v| !(*v >= 0.0)) || (s - 1.0).abs() > INITIAL_TOL {
            return Err(Error::InvalidChain(format!("initial distribution is not a pmf (sum {s})")));
        }
        Ok(CtmcSpec {
            lambda,
            transitions,
            initial,
        })
    }

    /// Starts from the stationary distribution of `transitions`.
    pub fn stationary(lambda: f64, transitions: TransitionMatrix) -> Result<Self> {
        let pi = stationary_distribution(&transitions)?;
        Self::new(lambda, transitions, pi)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ChainFile = serde_json::from_str(text)?;
        let p = TransitionMatrix::new(f.p)?;
        match (f.initial, f.stationary) {
            (Some(_), true) => Err(Error::InvalidChain("give either \"initial\" or \"stationary\": true, not both".into())),
            (Some(init), false) => Self::new(f.lambda, p, init),
            (None, true) => Self::stationary(f.lambda, p),
            (None, false) => Err(Error::InvalidChain("missing \"initial\" (or \"stationary\": true)".into())),
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn transitions(&self) -> &TransitionMatrix {
        &self.transitions
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn stationary_distribution(&self) -> Result<Vec<f64>> {
        stationary_distribution(&self.transitions)
    }

    /// `H_MC` under the stationary distribution.
    pub fn transition_entropy(&self) -> Result<f64> {
        markov_transition_entropy(&self.transitions, &self.stationary_distribution()?)
    }

    /// Largest `|initial - π|`; errors unless the start is stationary.
    pub(crate) fn require_stationary_start(&self) -> Result<Vec<f64>> {
        let pi = self.stationary_distribution()?;
        let deviation = pi
            .iter()
            .zip(&self.initial)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if deviation > INITIAL_TOL {
            return Err(Error::NonStationaryInitial { deviation });
        }
        Ok(pi)
    }
}

/// `λ(1 - log λ) + λ H_MC`.
pub fn ctmc_entropy_rate(spec: &CtmcSpec) -> Result<f64> {
    Ok(poisson_entropy_rate(spec.lambda)? + spec.lambda * spec.transition_entropy()?)
}
