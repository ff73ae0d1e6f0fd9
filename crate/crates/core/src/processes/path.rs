use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use super::chain::CtmcSpec;
use crate::error::{Error, Result};

/// A realization of a marked point process on `(0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePath {
    pub horizon: f64,
    pub times: Vec<f64>,
    /// Per-jump marks: chain states, or 1/0 for heads/tails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marks: Option<Vec<usize>>,
    /// State before the first jump, when the path comes from a chain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_mark: Option<usize>,
}

impl SamplePath {
    pub fn new(horizon: f64, times: Vec<f64>, marks: Option<Vec<usize>>) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!("horizon {horizon}")));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("jump times must be strictly increasing".into()));
        }
        if times.first().is_some_and(|&t| t <= 0.0) || times.last().is_some_and(|&t| t > horizon) {
            return Err(Error::InvalidArgument("jump times must lie in (0, T]".into()));
        }
        if marks.as_ref().is_some_and(|m| m.len() != times.len()) {
            return Err(Error::InvalidArgument("marks and jumps differ in length".into()));
        }
        Ok(SamplePath {
            horizon,
            times,
            marks,
            initial_mark: None,
        })
    }

    /// `N(T)`.
    pub fn count(&self) -> usize {
        self.times.len()
    }

    /// Gaps between consecutive points, the first measured from 0.
    pub fn interarrivals(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.times
            .iter()
            .map(|&t| {
                let d = t - prev;
                prev = t;
                d
            })
            .collect()
    }

    /// CSV with a `time,mark` header; the mark column is empty for
    /// unmarked paths.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,mark\n");
        for (k, t) in self.times.iter().enumerate() {
            match &self.marks {
                Some(m) => out.push_str(&format!("{t:?},{}\n", m[k])),
                None => out.push_str(&format!("{t:?},\n")),
            }
        }
        out
    }
}

fn check_rate(lambda: f64, horizon: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {lambda}")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

fn poisson_times<R: Rng + ?Sized>(lambda: f64, horizon: f64, rng: &mut R) -> Vec<f64> {
    let exp = Exp::new(lambda).expect("positive rate");
    let mut times = Vec::with_capacity((lambda * horizon * 1.1) as usize + 16);
    let mut t = 0.0;
    loop {
        t += exp.sample(rng);
        if t > horizon {
            return times;
        }
        if times.last().is_none_or(|&p| t > p) {
            times.push(t);
        }
    }
}

/// Rate-`lambda` Poisson process on `(0, T]` by exponential interarrivals.
pub fn simulate_poisson<R: Rng + ?Sized>(lambda: f64, horizon: f64, rng: &mut R) -> Result<SamplePath> {
    check_rate(lambda, horizon)?;
    SamplePath::new(horizon, poisson_times(lambda, horizon, rng), None)
}

/// Poisson jump times with states evolving by `P` from an initial draw.
pub fn simulate_ctmc<R: Rng + ?Sized>(spec: &CtmcSpec, horizon: f64, rng: &mut R) -> Result<SamplePath> {
    check_rate(spec.lambda(), horizon)?;
    let p = spec.transitions();
    let mut state = draw(spec.initial(), rng);
    let initial = state;
    let times = poisson_times(spec.lambda(), horizon, rng);
    let marks = times
        .iter()
        .map(|_| {
            state = draw(p.row(state), rng);
            state
        })
        .collect();
    let mut path = SamplePath::new(horizon, times, Some(marks))?;
    path.initial_mark = Some(initial);
    Ok(path)
}

fn draw<R: Rng + ?Sized>(pmf: &[f64], rng: &mut R) -> usize {
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, &p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// A path thinned by independent coins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitResult {
    pub parent: SamplePath,
    pub coins: Vec<bool>,
    pub heads: SamplePath,
    pub tails: SamplePath,
}

impl SplitResult {
    /// `M(T)`.
    pub fn heads_count(&self) -> usize {
        self.heads.count()
    }
}

fn subpath(path: &SamplePath, keep: impl Fn(usize) -> bool) -> SamplePath {
    let idx: Vec<usize> = (0..path.count()).filter(|&k| keep(k)).collect();
    SamplePath {
        horizon: path.horizon,
        times: idx.iter().map(|&k| path.times[k]).collect(),
        marks: path.marks.as_ref().map(|m| idx.iter().map(|&k| m[k]).collect()),
        initial_mark: path.initial_mark,
    }
}

/// Tosses a coin of bias `p` per jump; heads go to the first baby process.
pub fn split<R: Rng + ?Sized>(path: &SamplePath, p: f64, rng: &mut R) -> Result<SplitResult> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("bias must lie in (0, 1), got {p}")));
    }
    let coins: Vec<bool> = (0..path.count()).map(|_| rng.random::<f64>() < p).collect();
    Ok(SplitResult {
        heads: subpath(path, |k| coins[k]),
        tails: subpath(path, |k| !coins[k]),
        parent: path.clone(),
        coins,
    })
}

/// Superposition of two paths on the same horizon.
pub fn merge(a: &SamplePath, b: &SamplePath) -> Result<SamplePath> {
    if a.horizon != b.horizon {
        return Err(Error::InvalidArgument("paths have different horizons".into()));
    }
    if a.marks.is_some() != b.marks.is_some() {
        return Err(Error::InvalidArgument("cannot merge marked with unmarked paths".into()));
    }
    let (mut i, mut j) = (0, 0);
    let mut times = Vec::with_capacity(a.count() + b.count());
    let mut marks = a.marks.as_ref().map(|_| Vec::with_capacity(a.count() + b.count()));
    while i < a.count() || j < b.count() {
        let take_a = j == b.count() || (i < a.count() && a.times[i] < b.times[j]);
        let (src, k) = if take_a { (a, i) } else { (b, j) };
        times.push(src.times[k]);
        if let (Some(out), Some(m)) = (marks.as_mut(), src.marks.as_ref()) {
            out.push(m[k]);
        }
        if take_a {
            i += 1;
        } else {
            j += 1;
        }
    }
    let mut path = SamplePath::new(a.horizon, times, marks)?;
    path.initial_mark = a.initial_mark.or(b.initial_mark);
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::TransitionMatrix;
    use crate::rng::{seeded, stream};

    #[test]
    fn poisson_counts_match_rate() {
        let mut total = 0.0;
        for s in 0..100 {
            let p = simulate_poisson(1.0, 1000.0, &mut stream(5, s)).unwrap();
            assert!(p.times.windows(2).all(|w| w[0] < w[1]));
            assert!(p.times.iter().all(|&t| t > 0.0 && t <= 1000.0));
            total += p.count() as f64 / 1000.0;
        }
        let mean = total / 100.0;
        assert!((mean - 1.0).abs() < 3.0 * (1.0f64 / 1000.0 / 100.0).sqrt(), "{mean}");
        let a = simulate_poisson(2.0, 50.0, &mut seeded(3)).unwrap();
        let b = simulate_poisson(2.0, 50.0, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chain_marks() {
        let single = CtmcSpec::new(1.0, TransitionMatrix::new(vec![vec![1.0]]).unwrap(), vec![1.0]).unwrap();
        let p = simulate_ctmc(&single, 100.0, &mut seeded(1)).unwrap();
        assert!(p.marks.unwrap().iter().all(|&m| m == 0));
        let ident = TransitionMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec = CtmcSpec::new(1.0, ident, vec![0.0, 1.0]).unwrap();
        let p = simulate_ctmc(&spec, 100.0, &mut seeded(1)).unwrap();
        assert_eq!(p.initial_mark, Some(1));
        assert!(p.marks.unwrap().iter().all(|&m| m == 1));
        let sym = TransitionMatrix::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let spec = CtmcSpec::stationary(1.0, sym).unwrap();
        let p = simulate_ctmc(&spec, 20_000.0, &mut seeded(2)).unwrap();
        let m = p.marks.unwrap();
        let ones = m.iter().filter(|&&v| v == 1).count() as f64 / m.len() as f64;
        assert!((ones - 0.5).abs() < 0.02);
    }

    #[test]
    fn split_is_lossless_and_binomial() {
        let parent = simulate_poisson(1.0, 10_000.0, &mut seeded(11)).unwrap();
        let s = split(&parent, 0.5, &mut seeded(12)).unwrap();
        assert_eq!(s.heads_count(), s.coins.iter().filter(|&&c| c).count());
        assert_eq!(merge(&s.heads, &s.tails).unwrap(), parent);
        let n = parent.count() as f64;
        let se = (n * 0.25).sqrt();
        assert!((s.heads_count() as f64 - 0.5 * n).abs() < 3.0 * se);
        let again = split(&parent, 0.5, &mut seeded(12)).unwrap();
        assert_eq!(again.coins, s.coins);
        assert!(split(&parent, 1.0, &mut seeded(0)).is_err());
    }

    #[test]
    fn csv_export() {
        let p = SamplePath::new(2.0, vec![0.5, 1.25], Some(vec![1, 0])).unwrap();
        assert_eq!(p.to_csv(), "time,mark\n0.5,1\n1.25,0\n");
        assert!(SamplePath::new(1.0, vec![0.5, 0.25], None).is_err());
        assert!(SamplePath::new(1.0, vec![1.5], None).is_err());
    }
}
