//! Acceptance run: one PASS/FAIL line per criterion.

use std::f64::consts::LN_2;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;

use mixent_core::distribution::{inject_continuous, inject_discrete, inject_mixed, Label};
use mixent_core::entropy::{mixed_entropy, mutual_information, shannon_entropy, EntropyOptions};
use mixent_core::estimators::{nn_differential_entropy, EstimatorOptions};
use mixent_core::goodness::goodness_check;
use mixent_core::processes::{
    ctmc_entropy_rate, finite_horizon_ctmc_entropy, order_statistics_entropy, split_entropy_experiment,
    splitting_identity, CtmcSpec, OrderStatsMethod, SplitExperimentOptions, TransitionMatrix,
};
use mixent_core::rng::{seeded, stream};
use mixent_core::vector::{HistogramGrid, VectorAtom, VectorShape};
use mixent_core::{DensitySpec, MixedPairDistribution, MixedPairMap, MixedPairVectorDistribution};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within_time(start: Instant, limit: f64, r: Check) -> Check {
    let t = start.elapsed().as_secs_f64();
    match r {
        Ok(m) if t < limit => Ok(format!("{m}; {t:.2}s < {limit}s")),
        Ok(m) => Err(format!("{m}; runtime {t:.2}s exceeds {limit}s")),
        Err(m) => Err(format!("{m}; {t:.2}s")),
    }
}

fn injection_consistency() -> Check {
    let start = Instant::now();
    let mut rng = seeded(1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(2..=100);
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        let p: Vec<f64> = w.iter().map(|v| v / s).collect();
        let pmf: Vec<(Label, f64)> = p.iter().enumerate().map(|(i, &q)| (Label::Int(i as i64), q)).collect();
        let d = inject_discrete(&pmf).map_err(|e| e.to_string())?;
        let h = mixed_entropy(&d, &EntropyOptions::default()).map_err(|e| e.to_string())?;
        worst = worst.max((h.value - shannon_entropy(&p).map_err(|e| e.to_string())?).abs());
    }
    within_time(start, 10.0, ensure(worst <= 1e-8, format!("max gap {worst:.2e} over 50 pmfs (limit 1e-8)")))
}

fn split_map_example() -> Check {
    let u02 = inject_continuous(DensitySpec::uniform(0.0, 2.0).unwrap()).map_err(|e| e.to_string())?;
    let map = MixedPairMap::from_path(corpus().join("maps/split.json")).map_err(|e| e.to_string())?;
    let rep = map.preservation_report(&u02, &EntropyOptions::default()).map_err(|e| e.to_string())?;
    let h_out = rep.h_out.unwrap_or(f64::NAN);
    let pushed = map.pushforward(&u02).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for atom in pushed.atoms() {
        for k in 0..2000 {
            let y = -0.5 + 2.0 * (k as f64 + 0.5) / 2000.0;
            let want = if (0.0..=1.0).contains(&y) { 0.5 } else { 0.0 };
            worst = worst.max((atom.sub.eval(y) - want).abs());
        }
    }
    let ok = rep.certified
        && (rep.h_in - LN_2).abs() <= 1e-8
        && (h_out - LN_2).abs() <= 1e-8
        && pushed.len() == 2
        && worst <= 1e-9;
    ensure(
        ok,
        format!(
            "certified={}, H_in-log2={:.1e}, H_out-log2={:.1e}, atoms={}, pointwise gap {worst:.1e}",
            rep.certified,
            rep.h_in - LN_2,
            h_out - LN_2,
            pushed.len()
        ),
    )
}

fn quantization_guard() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let map = dir.path().join("quantization.json");
    std::fs::write(
        &map,
        r#"{"regions": [
  {"input_label": 1, "interval": [0, 1], "output_label": "x0", "map": {"type": "affine", "slope": 1, "intercept": 0}},
  {"input_label": 1, "interval": [1, 2], "output_label": 2, "map": {"type": "affine", "slope": 0, "intercept": 2}}
]}"#,
    )
    .map_err(|e| e.to_string())?;
    let dist = dir.path().join("u02.json");
    let u02 = inject_continuous(DensitySpec::uniform(0.0, 2.0).unwrap()).map_err(|e| e.to_string())?;
    std::fs::write(&dist, u02.to_json()).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_mixent"))
        .args(["transform", "--dist", dist.to_str().unwrap(), "--map", map.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code();
    let v = inject_mixed(&[(Label::Int(2), 0.5)], Some((0.5, DensitySpec::unit_uniform()))).map_err(|e| e.to_string())?;
    let h = mixed_entropy(&v, &EntropyOptions::default()).map_err(|e| e.to_string())?;
    ensure(
        code == Some(1) && (h.value - LN_2).abs() <= 1e-8,
        format!("transform exit {code:?} (want 1), H(V)-log2={:.1e}", h.value - LN_2),
    )
}

fn splitting_grid() -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let lambda = 0.1 + (10.0 - 0.1) * i as f64 / 19.0;
        for j in 1..=19 {
            let p = 0.05 * j as f64;
            let s = splitting_identity(lambda, p).map_err(|e| e.to_string())?;
            worst = worst.max(s.max_discrepancy);
        }
    }
    within_time(start, 1.0, ensure(worst <= 1e-12, format!("max discrepancy {worst:.2e} on 20x19 grid (limit 1e-12)")))
}

fn chain_convergence() -> Check {
    let start = Instant::now();
    let chains = [
        ("single-state", CtmcSpec::stationary(1.0, TransitionMatrix::new(vec![vec![1.0]]).unwrap())),
        (
            "symmetric",
            CtmcSpec::stationary(2.0, TransitionMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()),
        ),
        (
            "asymmetric",
            CtmcSpec::stationary(1.0, TransitionMatrix::new(vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap()),
        ),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, spec) in chains {
        let spec = spec.map_err(|e| e.to_string())?;
        let t = 1e3 / spec.lambda();
        let per_t = finite_horizon_ctmc_entropy(&spec, t).map_err(|e| e.to_string())?.total / t;
        let rate = ctmc_entropy_rate(&spec).map_err(|e| e.to_string())?;
        ok &= (per_t - rate).abs() <= 0.01;
        if name == "symmetric" {
            ok &= (per_t - 2.0).abs() <= 0.01;
        }
        parts.push(format!("{name} gap {:.1e}", per_t - rate));
    }
    within_time(start, 30.0, ensure(ok, parts.join(", ")))
}

fn order_statistics() -> Check {
    let u = DensitySpec::unit_uniform();
    let two = order_statistics_entropy(&u, 2, OrderStatsMethod::Quadrature).map_err(|e| e.to_string())?;
    let three = order_statistics_entropy(&u, 3, OrderStatsMethod::MonteCarlo { samples: 1_000_000, seed: 6 })
        .map_err(|e| e.to_string())?;
    let g = DensitySpec::gaussian(0.0, 1.0).unwrap();
    let three_g = order_statistics_entropy(&g, 3, OrderStatsMethod::MonteCarlo { samples: 1_000_000, seed: 6 })
        .map_err(|e| e.to_string())?;
    let ln6 = 6f64.ln();
    // The uniform log-density is constant, so its Monte Carlo error is zero
    // and only rounding separates the two sides.
    let gap_u = (three.difference + ln6).abs();
    let gap_g = (three_g.difference + ln6).abs();
    let ok = (two.h_sorted + LN_2).abs() <= 1e-4
        && gap_u <= 4.0 * three.error_estimate + 1e-12
        && gap_g <= 4.0 * three_g.error_estimate;
    ensure(
        ok,
        format!(
            "n=2 h_sorted+log2={:.1e}; n=3 uniform gap {gap_u:.1e} (se {:.1e}); n=3 gaussian gap {gap_g:.1e} (se {:.1e})",
            two.h_sorted + LN_2,
            three.error_estimate,
            three_g.error_estimate
        ),
    )
}

fn splitting_experiment() -> Check {
    let start = Instant::now();
    let opts = SplitExperimentOptions {
        lambda: 1.0,
        p: 0.5,
        horizon: 1e5,
        trials: 1,
        seed: 20_240_101,
        estimator: EstimatorOptions::default(),
    };
    let rep = split_entropy_experiment(&opts).map_err(|e| e.to_string())?;
    let target = 0.5 * (1.0 - 0.5f64.ln());
    let mut ok = rep.merge_matches_parent;
    let mut parts = Vec::new();
    for (name, b) in [("heads", &rep.heads), ("tails", &rep.tails)] {
        let z = (b.estimate - target) / b.standard_error;
        ok &= z.abs() <= 4.0 && (b.expected - target).abs() < 1e-12 && b.respects_poisson_bound(3.0);
        parts.push(format!("{name} {:.6} (se {:.4}, z {z:.2})", b.estimate, b.standard_error));
    }
    within_time(start, 60.0, ensure(ok, parts.join(", ")))
}

fn magnitude_bound_on_corpus() -> Check {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus().join("distributions"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    let mut ok = files.len() == 30;
    let mut least_slack = f64::INFINITY;
    for f in &files {
        let d = MixedPairDistribution::from_path(f).map_err(|e| format!("{}: {e}", f.display()))?;
        let g = goodness_check(&d, 1.0, 1.0).map_err(|e| e.to_string())?;
        let h = mixed_entropy(&d, &EntropyOptions::default()).map_err(|e| e.to_string())?;
        let slack = g.magnitude_bound + 1e-6 - h.term_magnitude().unwrap_or(f64::INFINITY);
        least_slack = least_slack.min(slack);
        ok &= g.passed && slack >= 0.0;
    }
    ensure(ok, format!("{} distributions, least slack {least_slack:.3}", files.len()))
}

fn mutual_information_sign() -> Check {
    let mut rng = stream(9, 0);
    let opts = EntropyOptions::default();
    let mut least = f64::INFINITY;
    for case in 0..30 {
        let joint = match case % 3 {
            0 => {
                let rho = 5.0 * rng.random::<f64>();
                let w: Vec<f64> = if case == 27 {
                    // Independent coordinates: the mutual information is zero.
                    let a: Vec<f64> = (0..5).map(|_| rng.random::<f64>() + 0.1).collect();
                    (0..25).map(|c| a[c / 5] * a[4 - c % 5]).collect()
                } else {
                    (0..25)
                        .map(|c| rng.random::<f64>() + 1e-3 + if c / 5 == c % 5 { rho } else { 0.0 })
                        .collect()
                };
                let edges = vec![vec![0.0, 0.2, 0.5, 1.0, 1.5, 3.0], vec![-2.0, -1.0, 0.0, 0.1, 1.0, 4.0]];
                let grid = HistogramGrid::from_weights(edges, w).map_err(|e| e.to_string())?;
                MixedPairVectorDistribution::new(vec![VectorAtom {
                    labels: vec![Label::constant(); 2],
                    mass: 1.0,
                    shape: VectorShape::Histogram(grid),
                }])
            }
            1 => {
                let k = rng.random_range(2..6);
                let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
                let s: f64 = w.iter().sum();
                let atoms = (0..k)
                    .map(|i| VectorAtom {
                        labels: vec![Label::Int(i as i64), Label::constant()],
                        mass: w[i] / s,
                        shape: VectorShape::Product(vec![
                            DensitySpec::unit_uniform(),
                            DensitySpec::gaussian(3.0 * rng.random::<f64>(), 0.1 + rng.random::<f64>()).unwrap(),
                        ]),
                    })
                    .collect();
                MixedPairVectorDistribution::new(atoms)
            }
            _ => {
                let w: Vec<f64> = (0..9).map(|_| rng.random::<f64>().powi(3) + 1e-4).collect();
                let s: f64 = w.iter().sum();
                let atoms = (0..9)
                    .map(|c| VectorAtom {
                        labels: vec![Label::Int(c / 3), Label::Int(c % 3)],
                        mass: w[c as usize] / s,
                        shape: VectorShape::Product(vec![DensitySpec::unit_uniform(), DensitySpec::unit_uniform()]),
                    })
                    .collect();
                MixedPairVectorDistribution::new(atoms)
            }
        }
        .map_err(|e| e.to_string())?;
        let i = mutual_information(&joint, &opts).map_err(|e| e.to_string())?;
        least = least.min(i.value);
    }
    ensure(least >= -1e-8, format!("smallest of 30 mutual informations {least:.3e} (limit -1e-8)"))
}

fn estimator_cross_validation() -> Check {
    let families = [
        ("uniform", DensitySpec::unit_uniform(), 0.0),
        (
            "gaussian",
            DensitySpec::gaussian(0.0, 1.0).unwrap(),
            0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln(),
        ),
        ("exponential(2)", DensitySpec::exponential(2.0).unwrap(), 1.0 - LN_2),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, truth) in families {
        let mut hits = 0;
        for seed in 0..100u64 {
            let mut rng = stream(seed, 1);
            let s: Vec<f64> = (0..100_000).map(|_| d.sample(&mut rng)).collect();
            let r = nn_differential_entropy(&s, &EstimatorOptions { seed, ..EstimatorOptions::default() })
                .map_err(|e| e.to_string())?;
            if (r.value - truth).abs() <= 4.0 * r.standard_error {
                hits += 1;
            }
        }
        ok &= hits >= 95;
        parts.push(format!("{name} {hits}/100"));
    }
    ensure(ok, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("injection consistency", injection_consistency),
        ("split map preserves entropy", split_map_example),
        ("quantization map rejected", quantization_guard),
        ("splitting identity grid", splitting_grid),
        ("chain horizon entropy converges to rate", chain_convergence),
        ("order statistics entropy", order_statistics),
        ("baby process entropy rates", splitting_experiment),
        ("magnitude bound on corpus", magnitude_bound_on_corpus),
        ("mutual information nonnegative", mutual_information_sign),
        ("nearest-neighbour estimator coverage", estimator_cross_validation),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
