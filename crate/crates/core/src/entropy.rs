//! Discrete, differential and mixed-pair entropies in nats, plus
//! conditional entropy and mutual information of mixed-pair vectors.

use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::density::DensitySpec;
use crate::distribution::{Label, MixedPairDistribution};
use crate::error::{Error, Result};
use crate::goodness::{goodness_check, goodness_check_vector, GoodnessReport};
use crate::quadrature::QuadOptions;
use crate::rng::StreamRng;
use crate::vector::{MixedPairVectorDistribution, VectorShape, MAX_QUADRATURE_DIM};

/// Densities at or below this contribute nothing to `-g log g`.
pub const DENSITY_FLOOR: f64 = 1e-300;

const PMF_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    Quadrature,
    MonteCarlo,
}

/// How vector entropies are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorMethod {
    /// Quadrature up to the dimension limit, Monte Carlo above.
    #[default]
    Auto,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy)]
pub struct EntropyOptions {
    /// Absolute quadrature tolerance per atom term.
    pub tol: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// Evaluate even when the goodness conditions are not certified; the
    /// result is then marked uncertified.
    pub allow_uncertified: bool,
    pub vector_method: VectorMethod,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            tol: 1e-8,
            epsilon: 1.0,
            delta: 1.0,
            allow_uncertified: false,
            vector_method: VectorMethod::Auto,
            mc_samples: 200_000,
            seed: 0,
        }
    }
}

impl EntropyOptions {
    pub fn uncertified() -> Self {
        EntropyOptions {
            allow_uncertified: true,
            ..Self::default()
        }
    }
}

/// One atom's contribution `-∫ g_i log g_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomTerm {
    pub label: Vec<Label>,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    pub value: f64,
    pub method: EntropyMethod,
    pub error_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<AtomTerm>>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl EntropyResult {
    /// `Σ_i |∫ g_i log g_i|` from the recorded terms.
    pub fn term_magnitude(&self) -> Option<f64> {
        self.terms.as_ref().map(|t| t.iter().map(|a| a.value.abs()).sum())
    }

    fn from_terms(terms: Vec<AtomTerm>, certified: bool) -> Self {
        let value = terms.iter().map(|t| t.value).sum();
        let error_estimate = terms.iter().map(|t| t.error).sum();
        EntropyResult {
            value,
            method: EntropyMethod::Quadrature,
            error_estimate,
            terms: Some(terms),
            certified,
            samples: None,
        }
    }
}

/// An information quantity assembled from several entropies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoQuantity {
    pub value: f64,
    pub error_estimate: f64,
}

#[inline]
pub fn neg_g_log_g(g: f64) -> f64 {
    if g <= DENSITY_FLOOR {
        0.0
    } else {
        -g * g.ln()
    }
}

/// `-Σ p log p` without validating the input.
pub fn shannon_entropy_unchecked(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter().map(neg_g_log_g).sum()
}

/// `-Σ p_i log p_i`, with `0 log 0 = 0`.
pub fn shannon_entropy(pmf: &[f64]) -> Result<f64> {
    if pmf.is_empty() {
        return Err(Error::InvalidPmf("empty".into()));
    }
    if let Some(p) = pmf.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidPmf(format!("entry {p}")));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > PMF_TOL {
        return Err(Error::InvalidPmf(format!("sums to {total}")));
    }
    Ok(shannon_entropy_unchecked(pmf.iter().copied()))
}

/// `h(Y) = -∫ f log f` by quadrature.
pub fn differential_entropy(density: &DensitySpec) -> Result<EntropyResult> {
    density.validate()?;
    let e = density.integrate_with(|_, f| neg_g_log_g(f), QuadOptions::with_tol(1e-8))?;
    Ok(EntropyResult {
        value: e.value,
        method: EntropyMethod::Quadrature,
        error_estimate: e.error,
        terms: None,
        certified: true,
        samples: None,
    })
}

fn gate(report: GoodnessReport, opts: &EntropyOptions) -> Result<bool> {
    if report.passed {
        Ok(true)
    } else if opts.allow_uncertified {
        Ok(false)
    } else {
        Err(Error::NotCertified(report.failure.unwrap_or_else(|| "goodness conditions not met".into())))
    }
}

/// `H(Z) = -Σ_i ∫ g_i log g_i`, one quadrature term per atom.
pub fn mixed_entropy(dist: &MixedPairDistribution, opts: &EntropyOptions) -> Result<EntropyResult> {
    let certified = gate(goodness_check(dist, opts.epsilon, opts.delta)?, opts)?;
    let q = QuadOptions::with_tol(opts.tol);
    let terms = dist
        .atoms()
        .iter()
        .map(|a| {
            let m = a.sub.mass;
            let e = a.sub.shape.integrate_with(|_, f| neg_g_log_g(m * f), q)?;
            Ok(AtomTerm {
                label: vec![a.label.clone()],
                value: e.value,
                error: e.error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyResult::from_terms(terms, certified))
}

/// Vector entropy `-Σ_x ∫ g_x log g_x`.
pub fn mixed_entropy_vector(dist: &MixedPairVectorDistribution, opts: &EntropyOptions) -> Result<EntropyResult> {
    let use_mc = match opts.vector_method {
        VectorMethod::Auto => dist.dim() > MAX_QUADRATURE_DIM,
        VectorMethod::Quadrature => {
            if dist.dim() > MAX_QUADRATURE_DIM {
                return Err(Error::DimensionLimit {
                    dim: dist.dim(),
                    max: MAX_QUADRATURE_DIM,
                });
            }
            false
        }
        VectorMethod::MonteCarlo => true,
    };
    let certified = gate(goodness_check_vector(dist, opts.epsilon, opts.delta)?, opts)?;
    if use_mc {
        let mut rng = StreamRng::seed_from_u64(opts.seed);
        let mut r = mc_entropy_vector(dist, opts.mc_samples, &mut rng)?;
        r.certified = certified;
        return Ok(r);
    }
    let q = QuadOptions::with_tol(opts.tol);
    let terms = dist
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let (value, error) = match &a.shape {
                VectorShape::Histogram(h) => (h.cells().map(|(vol, v)| vol * neg_g_log_g(a.mass * v)).sum(), 0.0),
                _ => {
                    let e = dist.integrate_atom(i, |_, g| neg_g_log_g(g), q)?;
                    (e.value, e.error)
                }
            };
            Ok(AtomTerm {
                label: a.labels.clone(),
                value,
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyResult::from_terms(terms, certified))
}

/// Running mean and variance.
#[derive(Default)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

fn mc_result(w: Welford) -> EntropyResult {
    EntropyResult {
        value: w.mean,
        method: EntropyMethod::MonteCarlo,
        error_estimate: w.standard_error(),
        terms: None,
        certified: true,
        samples: Some(w.n),
    }
}

/// `-(1/n) Σ_k log g_{I_k}(Y_k)` over `n` draws.
pub fn mc_entropy<R: Rng + ?Sized>(dist: &MixedPairDistribution, n: usize, rng: &mut R) -> Result<EntropyResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let mut w = Welford::default();
    for _ in 0..n {
        let (i, y) = dist.sample_index(rng);
        let a = &dist.atoms()[i];
        w.push(-(a.sub.mass.ln() + a.sub.shape.ln_pdf(y)));
    }
    Ok(mc_result(w))
}

pub fn mc_entropy_vector<R: Rng + ?Sized>(
    dist: &MixedPairVectorDistribution,
    n: usize,
    rng: &mut R,
) -> Result<EntropyResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let mut w = Welford::default();
    for _ in 0..n {
        let (i, y) = dist.sample(rng);
        w.push(-dist.sub_density(i, &y).ln());
    }
    Ok(mc_result(w))
}

/// `H(Z_A | Z_B) = H(Z_A, Z_B) - H(Z_B)` with `B = conditioning`.
pub fn conditional_entropy(
    joint: &MixedPairVectorDistribution,
    conditioning: &[usize],
    opts: &EntropyOptions,
) -> Result<InfoQuantity> {
    let h_joint = mixed_entropy_vector(joint, opts)?;
    let h_cond = mixed_entropy_vector(&joint.marginal(conditioning)?, opts)?;
    Ok(InfoQuantity {
        value: h_joint.value - h_cond.value,
        error_estimate: h_joint.error_estimate + h_cond.error_estimate,
    })
}

/// `I(Z_1; Z_2)` for a two-coordinate joint.
pub fn mutual_information(joint: &MixedPairVectorDistribution, opts: &EntropyOptions) -> Result<InfoQuantity> {
    if joint.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "mutual information needs a two-coordinate joint, got dimension {}",
            joint.dim()
        )));
    }
    mutual_information_between(joint, &[0], &[1], opts)
}

/// `I(Z_A; Z_B) = H(Z_A) + H(Z_B) - H(Z_A, Z_B)` for disjoint coordinate groups.
pub fn mutual_information_between(
    joint: &MixedPairVectorDistribution,
    a: &[usize],
    b: &[usize],
    opts: &EntropyOptions,
) -> Result<InfoQuantity> {
    if a.iter().any(|i| b.contains(i)) {
        return Err(Error::InvalidArgument("coordinate groups overlap".into()));
    }
    let both: Vec<usize> = a.iter().chain(b).copied().collect();
    let ab = if both.iter().copied().eq(0..joint.dim()) {
        mixed_entropy_vector(joint, opts)?
    } else {
        mixed_entropy_vector(&joint.marginal(&both)?, opts)?
    };
    let ha = mixed_entropy_vector(&joint.marginal(a)?, opts)?;
    let hb = mixed_entropy_vector(&joint.marginal(b)?, opts)?;
    Ok(InfoQuantity {
        value: ha.value + hb.value - ab.value,
        error_estimate: ha.error_estimate + hb.error_estimate + ab.error_estimate,
    })
}
