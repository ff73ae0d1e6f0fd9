use proptest::prelude::*;

use mixent_core::distribution::{inject_discrete, Atom, Label, SubDensity};
use mixent_core::entropy::{mixed_entropy, mutual_information, shannon_entropy, EntropyOptions};
use mixent_core::estimators::{nn_differential_entropy, EstimatorOptions};
use mixent_core::goodness::goodness_check;
use mixent_core::processes::{
    merge, simulate_poisson, split, splitting_identity, stationary_distribution, TransitionMatrix,
    STATIONARY_RESIDUAL_TOL,
};
use mixent_core::rng::seeded;
use mixent_core::transform::{MapRegion, RegionMap};
use mixent_core::vector::{HistogramGrid, VectorAtom, VectorShape};
use mixent_core::{DensitySpec, MixedPairDistribution, MixedPairMap, MixedPairVectorDistribution, Support};

fn normalize(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

fn gaussian_mix(params: &[(f64, f64, f64)]) -> MixedPairDistribution {
    let masses = normalize(&params.iter().map(|p| p.0).collect::<Vec<_>>());
    let atoms = params
        .iter()
        .zip(masses)
        .enumerate()
        .map(|(i, (&(_, m, v), mass))| Atom {
            label: Label::Int(i as i64),
            sub: SubDensity::new(mass, DensitySpec::gaussian(m, v).unwrap()),
        })
        .collect();
    MixedPairDistribution::new(atoms).unwrap()
}

fn mix_params() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.05f64..1.0, -5.0f64..5.0, 0.05f64..4.0), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn discrete_injection_matches_shannon(w in prop::collection::vec(0.001f64..1.0, 2..100)) {
        let p = normalize(&w);
        let pmf: Vec<(Label, f64)> = p.iter().enumerate().map(|(i, &q)| (Label::Int(i as i64), q)).collect();
        let d = inject_discrete(&pmf).unwrap();
        let h = mixed_entropy(&d, &EntropyOptions::default()).unwrap();
        prop_assert!((h.value - shannon_entropy(&p).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn posterior_sums_to_one(params in mix_params(), y in -8.0f64..8.0) {
        let d = gaussian_mix(&params);
        let w = d.posterior_weights(y).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn conditional_density_round_trip(params in mix_params(), y in -8.0f64..8.0) {
        let d = gaussian_mix(&params);
        for i in 0..d.len() {
            let stored = d.atoms()[i].sub.eval(y);
            let rebuilt = d.atom_mass(i).unwrap() * d.conditional_density(i).unwrap().pdf(y);
            prop_assert!((stored - rebuilt).abs() <= 1e-12 * stored.max(1.0));
        }
    }

    #[test]
    fn magnitude_bound_holds(params in mix_params()) {
        let d = gaussian_mix(&params);
        let g = goodness_check(&d, 1.0, 1.0).unwrap();
        prop_assert!(g.passed);
        let h = mixed_entropy(&d, &EntropyOptions::default()).unwrap();
        prop_assert!(h.term_magnitude().unwrap() <= g.magnitude_bound + 1e-6);
    }

    #[test]
    fn tabulated_mutual_information_is_nonnegative(w in prop::collection::vec(0.0f64..1.0, 16), rho in 0.0f64..5.0) {
        // Tilt the weights toward the diagonal to create dependence.
        let weights: Vec<f64> = (0..16)
            .map(|c| w[c] + 1e-3 + if c / 4 == c % 4 { rho } else { 0.0 })
            .collect();
        let edges = vec![vec![0.0, 0.5, 1.0, 2.0, 4.0], vec![-1.0, 0.0, 0.25, 0.5, 3.0]];
        let grid = HistogramGrid::from_weights(edges, weights).unwrap();
        let joint = MixedPairVectorDistribution::new(vec![VectorAtom {
            labels: vec![Label::constant(); 2],
            mass: 1.0,
            shape: VectorShape::Histogram(grid),
        }]).unwrap();
        let i = mutual_information(&joint, &EntropyOptions::default()).unwrap();
        prop_assert!(i.value >= -1e-8);
    }

    #[test]
    fn mixed_mutual_information_is_nonnegative(params in mix_params()) {
        // Label in the first coordinate, a label-dependent Gaussian in the second.
        let masses = normalize(&params.iter().map(|p| p.0).collect::<Vec<_>>());
        let atoms = params.iter().zip(masses).enumerate().map(|(i, (&(_, m, v), mass))| VectorAtom {
            labels: vec![Label::Int(i as i64), Label::constant()],
            mass,
            shape: VectorShape::Product(vec![DensitySpec::unit_uniform(), DensitySpec::gaussian(m, v).unwrap()]),
        }).collect();
        let joint = MixedPairVectorDistribution::new(atoms).unwrap();
        let i = mutual_information(&joint, &EntropyOptions::default()).unwrap();
        prop_assert!(i.value >= -1e-8);
    }

    #[test]
    fn splitting_identity_lines_agree(lambda in 0.01f64..50.0, p in 0.001f64..0.999) {
        let s = splitting_identity(lambda, p).unwrap();
        prop_assert!(s.max_discrepancy <= 1e-12 * lambda.max(1.0));
    }

    #[test]
    fn stationary_residual_is_small(w in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 4), 4)) {
        let p = TransitionMatrix::new(w.iter().map(|r| normalize(r)).collect()).unwrap();
        let pi = stationary_distribution(&p).unwrap();
        let back = p.left_multiply(&pi);
        let residual = pi.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(residual <= STATIONARY_RESIDUAL_TOL);
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn split_then_merge_is_lossless(seed in any::<u64>(), lambda in 0.1f64..20.0, p in 0.01f64..0.99) {
        let mut rng = seeded(seed);
        let parent = simulate_poisson(lambda, 50.0, &mut rng).unwrap();
        let s = split(&parent, p, &mut rng).unwrap();
        prop_assert_eq!(s.heads.count() + s.tails.count(), parent.count());
        prop_assert_eq!(merge(&s.heads, &s.tails).unwrap(), parent);
    }

    #[test]
    fn affine_map_round_trip(slope in prop::sample::select(vec![-1.0, 1.0]), c in -10.0f64..10.0, y in -100.0f64..100.0) {
        let m = MixedPairMap::new(vec![MapRegion {
            input_label: Label::constant(),
            interval: Support::real_line(),
            output_label: Label::Int(7),
            map: RegionMap::Affine { slope, intercept: c },
        }]).unwrap();
        let (l, z) = m.apply(&Label::constant(), y).unwrap();
        let (back_l, back) = m.apply_inverse(&l, z).unwrap();
        prop_assert_eq!(back_l, Label::constant());
        prop_assert!((back - y).abs() <= 1e-9);
        prop_assert!(m.unit_derivative_check(100).certified);
    }

    #[test]
    fn nn_estimate_is_shift_invariant(seed in any::<u64>(), shift in -100.0f64..100.0) {
        let mut rng = seeded(seed);
        let g = DensitySpec::gaussian(0.0, 1.0).unwrap();
        let s: Vec<f64> = (0..500).map(|_| g.sample(&mut rng)).collect();
        let moved: Vec<f64> = s.iter().map(|v| v + shift).collect();
        let o = EstimatorOptions { bootstrap: 10, ..EstimatorOptions::default() };
        let a = nn_differential_entropy(&s, &o).unwrap().value;
        let b = nn_differential_entropy(&moved, &o).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9);
    }
}
