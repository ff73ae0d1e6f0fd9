use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::density::DensitySpec;
use crate::distribution::Label;
use crate::entropy::{differential_entropy, mixed_entropy_vector, EntropyMethod, EntropyOptions, VectorMethod};
use crate::error::{Error, Result};
use crate::vector::{MixedPairVectorDistribution, VectorAtom, VectorShape, MAX_QUADRATURE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStatsMethod {
    /// Quadrature up to the dense limit, Monte Carlo above.
    Auto,
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderStatsReport {
    pub n: usize,
    /// `n h(f)` for the unsorted i.i.d. vector.
    pub h_iid: f64,
    /// Entropy of the increasing rearrangement, density `n! ∏ f`.
    pub h_sorted: f64,
    pub difference: f64,
    /// `-log n!`.
    pub expected_difference: f64,
    pub method: EntropyMethod,
    pub error_estimate: f64,
}

/// Joint entropy of the order statistics of `n` i.i.d. draws against the
/// unsorted vector.
pub fn order_statistics_entropy(density: &DensitySpec, n: usize, method: OrderStatsMethod) -> Result<OrderStatsReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    let h = differential_entropy(density)?;
    let sorted = MixedPairVectorDistribution::new(vec![VectorAtom {
        labels: vec![Label::constant(); n],
        mass: 1.0,
        shape: VectorShape::OrderedIid {
            base: density.clone(),
            dim: n,
        },
    }])?;
    let mut opts = EntropyOptions::default();
    opts.vector_method = match method {
        OrderStatsMethod::Auto if n <= MAX_QUADRATURE_DIM => VectorMethod::Quadrature,
        OrderStatsMethod::Auto => VectorMethod::MonteCarlo,
        OrderStatsMethod::Quadrature => VectorMethod::Quadrature,
        OrderStatsMethod::MonteCarlo { samples, seed } => {
            opts.mc_samples = samples;
            opts.seed = seed;
            VectorMethod::MonteCarlo
        }
    };
    let hs = mixed_entropy_vector(&sorted, &opts)?;
    let h_iid = n as f64 * h.value;
    Ok(OrderStatsReport {
        n,
        h_iid,
        h_sorted: hs.value,
        difference: hs.value - h_iid,
        expected_difference: -ln_factorial(n as u64),
        method: hs.method,
        error_estimate: hs.error_estimate + n as f64 * h.error_estimate,
    })
}
