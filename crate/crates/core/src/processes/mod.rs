//! Poisson processes and continuous-time Markov chains driven by them:
//! simulation, exact finite-horizon entropies, entropy rates, the
//! splitting identity and the order-statistics identity.

mod chain;
mod horizon;
mod order_stats;
mod path;
mod splitting;

pub use chain::{
    ctmc_entropy_rate, markov_transition_entropy, poisson_entropy_rate, stationary_distribution, CtmcSpec,
    TransitionMatrix, STATIONARY_RESIDUAL_TOL,
};
pub use horizon::{
    finite_horizon_ctmc_entropy, finite_horizon_poisson_entropy, CtmcHorizonEntropy, PoissonHorizonEntropy,
    MAX_MEAN_COUNT,
};
pub use order_stats::{order_statistics_entropy, OrderStatsMethod, OrderStatsReport};
pub use path::{merge, simulate_ctmc, simulate_poisson, split, SamplePath, SplitResult};
pub use splitting::{
    split_entropy_experiment, splitting_identity, BabyEstimate, SplitExperimentOptions, SplitExperimentReport,
    SplittingIdentity, TrialReport, MIN_EVENTS,
};
