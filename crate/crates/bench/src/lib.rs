//! Fixtures shared by the benchmarks.

use mixent_core::distribution::{inject_discrete, Atom, Label, SubDensity};
use mixent_core::rng::seeded;
use mixent_core::{DensitySpec, MixedPairDistribution};

/// Uniform pmf over `n` labels pushed through the discrete injection.
pub fn discrete(n: usize) -> MixedPairDistribution {
    let pmf: Vec<(Label, f64)> = (0..n).map(|i| (Label::Int(i as i64), 1.0 / n as f64)).collect();
    inject_discrete(&pmf).expect("valid pmf")
}

/// Three atoms with Gaussian, exponential and piecewise-linear shapes.
pub fn mixed() -> MixedPairDistribution {
    MixedPairDistribution::new(vec![
        Atom {
            label: Label::Int(0),
            sub: SubDensity::new(0.3, DensitySpec::gaussian(0.0, 1.0).unwrap()),
        },
        Atom {
            label: Label::Int(1),
            sub: SubDensity::new(0.3, DensitySpec::exponential(2.0).unwrap()),
        },
        Atom {
            label: Label::Int(2),
            sub: SubDensity::new(0.4, DensitySpec::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]).unwrap()),
        },
    ])
    .expect("valid distribution")
}

pub fn gaussian_sample(n: usize, seed: u64) -> Vec<f64> {
    let d = DensitySpec::gaussian(0.0, 1.0).unwrap();
    let mut rng = seeded(seed);
    (0..n).map(|_| d.sample(&mut rng)).collect()
}
