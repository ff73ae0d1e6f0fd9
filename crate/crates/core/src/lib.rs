//! Entropy for mixtures of discrete and continuous random variables.
//!
//! A *mixed pair* `Z = (X, Y)` couples a discrete label `X` with a real
//! coordinate `Y` whose law, restricted to each label, has a density. This
//! crate represents such distributions ([`MixedPairDistribution`] and the
//! vector form [`MixedPairVectorDistribution`]), evaluates their entropy by
//! adaptive quadrature or Monte Carlo, certifies well-posedness through
//! moment/power-integral conditions, pushes distributions through
//! piecewise-monotone bijections and checks the unit-derivative condition
//! under which entropy is preserved.
//!
//! The [`processes`] module applies the same machinery to Poisson processes
//! and continuous-time Markov chains: exact finite-horizon path entropies,
//! asymptotic entropy rates, the Poisson splitting identity and
//! order-statistics entropies.
//!
//! All entropies are in nats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod distribution;
pub mod entropy;
pub mod estimators;
pub mod goodness;
pub mod processes;
pub mod quadrature;
pub mod rng;
pub mod transform;
pub mod vector;
pub mod vector_transform;

mod error;

pub use density::{DensitySpec, Support};
pub use distribution::{Atom, Label, MixedPairDistribution, SubDensity};
pub use entropy::{EntropyMethod, EntropyOptions, EntropyResult, InfoQuantity};
pub use error::{Error, Result};
pub use estimators::{EstimatorMethod, EstimatorOptions, EstimatorResult};
pub use goodness::GoodnessReport;
pub use processes::{CtmcSpec, SamplePath, SplitResult, TransitionMatrix};
pub use transform::{MapRegion, MixedPairMap, RegionMap};
pub use vector::{HistogramGrid, MixedPairVectorDistribution, VectorAtom, VectorShape};
pub use vector_transform::{VectorDomain, VectorMixedPairMap, VectorPiece, VectorTransform};

/// Crate version, embedded in reports produced from stochastic runs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
