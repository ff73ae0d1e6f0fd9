use std::path::PathBuf;

use mixent_core::entropy::{mixed_entropy, EntropyOptions};
use mixent_core::goodness::goodness_check;
use mixent_core::transform::DEFAULT_PROBES;
use mixent_core::{MixedPairDistribution, MixedPairMap};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn distributions() -> Vec<(String, MixedPairDistribution)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus().join("distributions"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let d = MixedPairDistribution::from_path(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, d)
        })
        .collect()
}

#[test]
fn every_corpus_distribution_is_certified_and_bounded() {
    let all = distributions();
    assert_eq!(all.len(), 30);
    for (name, d) in &all {
        let g = goodness_check(d, 1.0, 1.0).unwrap();
        assert!(g.passed, "{name}: {g:?}");
        let h = mixed_entropy(d, &EntropyOptions::default()).unwrap();
        assert!(h.certified);
        let mag = h.term_magnitude().unwrap();
        assert!(mag <= g.magnitude_bound + 1e-6, "{name}: {mag} > {}", g.magnitude_bound);
    }
}

#[test]
fn closed_form_corpus_entries() {
    let ln2 = std::f64::consts::LN_2;
    let cases = [
        ("fair_coin", ln2),
        ("u02", ln2),
        ("v_mixed", ln2),
        ("std_gaussian", 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()),
        ("exp_rate2", 1.0 - ln2),
        ("die", 6f64.ln()),
        ("uniform_wide", 100f64.ln()),
        ("uniform_narrow", 0.01f64.ln()),
        // Triangle on [0, 2] with peak 1: h = 1/2.
        ("triangle", 0.5),
    ];
    let all = distributions();
    for (name, oracle) in cases {
        let d = &all.iter().find(|(n, _)| n == name).unwrap().1;
        let h = mixed_entropy(d, &EntropyOptions::default()).unwrap();
        assert!((h.value - oracle).abs() < 1e-8, "{name}: {} vs {oracle}", h.value);
    }
}

#[test]
fn corpus_maps() {
    let u02 = MixedPairDistribution::from_path(corpus().join("distributions/u02.json")).unwrap();
    let split = MixedPairMap::from_path(corpus().join("maps/split.json")).unwrap();
    let r = split.preservation_report(&u02, &EntropyOptions::default()).unwrap();
    assert!(r.certified);
    assert!((r.h_out.unwrap() - std::f64::consts::LN_2).abs() < 1e-8);

    let q = MixedPairMap::from_path(corpus().join("maps/quantization.json")).unwrap();
    let b = q.bijectivity_check(Some(&u02), DEFAULT_PROBES);
    assert!(!b.bijective);
    assert!(b.reason.is_some());

    let scale = MixedPairMap::from_path(corpus().join("maps/scale_by_two.json")).unwrap();
    let g = MixedPairDistribution::from_path(corpus().join("distributions/std_gaussian.json")).unwrap();
    let r = scale.preservation_report(&g, &EntropyOptions::default()).unwrap();
    assert!(!r.certified);
    assert!((r.difference.unwrap() - std::f64::consts::LN_2).abs() < 1e-6);
}
