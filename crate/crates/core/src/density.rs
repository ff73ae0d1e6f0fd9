//! One-dimensional densities: a closed set of analytic families plus
//! piecewise-linear tabulations.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, QuadOptions, Tail};

/// Normalization tolerance for analytic families.
pub const ANALYTIC_NORM_TOL: f64 = 1e-9;
/// Normalization tolerance for tabulated densities.
pub const TABULATED_NORM_TOL: f64 = 1e-6;

/// Half-width, in standard deviations, of the Gaussian integration window.
const GAUSSIAN_WINDOW: f64 = 8.0;
/// Upper end, in mean lifetimes, of the exponential integration window.
const EXPONENTIAL_WINDOW: f64 = 32.0;

/// Closed interval, half-line or full line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> Self {
        Support { lo, hi }
    }

    pub fn real_line() -> Self {
        Support::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.lo && y <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

impl Serialize for Support {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let end = |v: f64| if v.is_finite() { Some(v) } else { None };
        [end(self.lo), end(self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Support {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[Option<f64>; 2]>::deserialize(d)?;
        Ok(Support::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)))
    }
}

/// Piecewise-linear density through `(y, value)` knots, zero outside
/// `[first knot, last knot]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl PiecewiseLinear {
    /// Knots must be strictly increasing in `y` with nonnegative values.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidDensity("piecewise-linear needs at least two knots".into()));
        }
        for (y, v) in &knots {
            if !y.is_finite() || !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidDensity(format!("bad knot ({y}, {v})")));
            }
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidDensity("piecewise-linear knots must be strictly increasing".into()));
        }
        let mut cumulative = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in knots.windows(2) {
            acc += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
            cumulative.push(acc);
        }
        Ok(PiecewiseLinear { knots, cumulative })
    }

    /// Builds the tabulation and rescales it to unit mass.
    pub fn normalized(knots: Vec<(f64, f64)>) -> Result<Self> {
        let raw = PiecewiseLinear::new(knots)?;
        let total = raw.total();
        if !(total > 0.0) {
            return Err(Error::InvalidDensity("piecewise-linear density has zero mass".into()));
        }
        PiecewiseLinear::new(raw.knots.iter().map(|&(y, v)| (y, v / total)).collect())
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    fn segment(&self, y: f64) -> Option<usize> {
        let n = self.knots.len();
        if y < self.knots[0].0 || y > self.knots[n - 1].0 {
            return None;
        }
        let idx = self.knots.partition_point(|k| k.0 <= y);
        Some(idx.clamp(1, n - 1) - 1)
    }

    fn pdf(&self, y: f64) -> f64 {
        match self.segment(y) {
            None => 0.0,
            Some(j) => {
                let (y0, v0) = self.knots[j];
                let (y1, v1) = self.knots[j + 1];
                v0 + (v1 - v0) * (y - y0) / (y1 - y0)
            }
        }
    }

    fn cdf(&self, y: f64) -> f64 {
        let n = self.knots.len();
        if y <= self.knots[0].0 {
            return 0.0;
        }
        if y >= self.knots[n - 1].0 {
            return self.total();
        }
        let j = self.segment(y).expect("inside support");
        let (y0, v0) = self.knots[j];
        let t = y - y0;
        let v = self.pdf(y);
        self.cumulative[j] + 0.5 * (v0 + v) * t
    }

    fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total();
        let j = self.cumulative.partition_point(|&c| c < target).clamp(1, self.knots.len() - 1) - 1;
        let (y0, v0) = self.knots[j];
        let (y1, v1) = self.knots[j + 1];
        let w = y1 - y0;
        let slope = (v1 - v0) / w;
        let r = (target - self.cumulative[j]).max(0.0);
        // Root of v0 t + slope t^2 / 2 = r in cancellation-free form.
        let disc = (v0 * v0 + 2.0 * slope * r).max(0.0);
        let denom = v0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        y0 + t.clamp(0.0, w)
    }
}

/// A one-dimensional density description.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    Gaussian { mean: f64, variance: f64 },
    PiecewiseLinear(PiecewiseLinear),
}

impl DensitySpec {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let d = DensitySpec::Uniform { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = DensitySpec::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        let d = DensitySpec::Gaussian { mean, variance };
        d.validate()?;
        Ok(d)
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let d = DensitySpec::PiecewiseLinear(PiecewiseLinear::new(knots)?);
        d.validate()?;
        Ok(d)
    }

    /// The unit interval density used by the discrete injection.
    pub fn unit_uniform() -> Self {
        DensitySpec::Uniform { a: 0.0, b: 1.0 }
    }

    /// Checks parameters and unit mass.
    pub fn validate(&self) -> Result<()> {
        match *self {
            DensitySpec::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && b > a) {
                    return Err(Error::InvalidDensity(format!("uniform needs finite a < b, got [{a}, {b}]")));
                }
            }
            DensitySpec::Exponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::InvalidDensity(format!("exponential rate must be positive, got {rate}")));
                }
            }
            DensitySpec::Gaussian { mean, variance } => {
                if !(mean.is_finite() && variance.is_finite() && variance > 0.0) {
                    return Err(Error::InvalidDensity(format!(
                        "gaussian needs finite mean and positive variance, got ({mean}, {variance})"
                    )));
                }
            }
            DensitySpec::PiecewiseLinear(ref pl) => {
                let total = pl.total();
                if (total - 1.0).abs() > TABULATED_NORM_TOL {
                    return Err(Error::InvalidDensity(format!(
                        "piecewise-linear density integrates to {total}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            DensitySpec::Uniform { .. } => "uniform",
            DensitySpec::Exponential { .. } => "exponential",
            DensitySpec::Gaussian { .. } => "gaussian",
            DensitySpec::PiecewiseLinear(_) => "piecewise-linear",
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, DensitySpec::PiecewiseLinear(_))
    }

    /// Normalization tolerance appropriate to the family.
    pub fn norm_tol(&self) -> f64 {
        if self.is_tabulated() {
            TABULATED_NORM_TOL
        } else {
            ANALYTIC_NORM_TOL
        }
    }

    pub fn support(&self) -> Support {
        match self {
            DensitySpec::Uniform { a, b } => Support::new(*a, *b),
            DensitySpec::Exponential { .. } => Support::new(0.0, f64::INFINITY),
            DensitySpec::Gaussian { .. } => Support::real_line(),
            DensitySpec::PiecewiseLinear(pl) => {
                Support::new(pl.knots[0].0, pl.knots[pl.knots.len() - 1].0)
            }
        }
    }

    /// Finite window outside of which the density carries mass below 1e-12.
    pub fn effective_range(&self) -> (f64, f64) {
        match *self {
            DensitySpec::Exponential { rate } => (0.0, EXPONENTIAL_WINDOW / rate),
            DensitySpec::Gaussian { mean, variance } => {
                let s = variance.sqrt();
                (mean - GAUSSIAN_WINDOW * s, mean + GAUSSIAN_WINDOW * s)
            }
            _ => {
                let s = self.support();
                (s.lo, s.hi)
            }
        }
    }

    /// Sorted points inside the effective range between which the density
    /// is smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            DensitySpec::Uniform { a, b } => vec![*a, *b],
            DensitySpec::Exponential { rate } => [0.0, 1.0, 4.0, 12.0, EXPONENTIAL_WINDOW]
                .iter()
                .map(|t| t / rate)
                .collect(),
            DensitySpec::Gaussian { mean, variance } => {
                let s = variance.sqrt();
                [-GAUSSIAN_WINDOW, -4.0, -2.0, 0.0, 2.0, 4.0, GAUSSIAN_WINDOW]
                    .iter()
                    .map(|z| mean + z * s)
                    .collect()
            }
            DensitySpec::PiecewiseLinear(pl) => pl.knots.iter().map(|k| k.0).collect(),
        }
    }

    /// Density value; exactly zero outside the support.
    pub fn pdf(&self, y: f64) -> f64 {
        match *self {
            DensitySpec::Uniform { a, b } => {
                if y >= a && y <= b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            DensitySpec::Exponential { rate } => {
                if y >= 0.0 {
                    rate * (-rate * y).exp()
                } else {
                    0.0
                }
            }
            DensitySpec::Gaussian { mean, variance } => {
                let z = y - mean;
                (-0.5 * z * z / variance).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
            }
            DensitySpec::PiecewiseLinear(ref pl) => pl.pdf(y),
        }
    }

    /// Log-density; `-inf` outside the support.
    pub fn ln_pdf(&self, y: f64) -> f64 {
        match *self {
            DensitySpec::Exponential { rate } if y >= 0.0 => rate.ln() - rate * y,
            DensitySpec::Gaussian { mean, variance } => {
                let z = y - mean;
                -0.5 * z * z / variance - 0.5 * (2.0 * std::f64::consts::PI * variance).ln()
            }
            _ => self.pdf(y).ln(),
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        match *self {
            DensitySpec::Uniform { a, b } => ((y - a) / (b - a)).clamp(0.0, 1.0),
            DensitySpec::Exponential { rate } => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-rate * y).exp_m1()
                }
            }
            DensitySpec::Gaussian { mean, variance } => {
                if y == f64::INFINITY {
                    return 1.0;
                }
                if y == f64::NEG_INFINITY {
                    return 0.0;
                }
                0.5 * erfc(-(y - mean) / (2.0 * variance).sqrt())
            }
            DensitySpec::PiecewiseLinear(ref pl) => pl.cdf(y),
        }
    }

    /// Probability of the interval [lo, hi].
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        // Upper-tail form keeps precision for right-hand Gaussian regions.
        match *self {
            DensitySpec::Gaussian { mean, variance } if lo > mean => {
                let sf = |y: f64| {
                    if y == f64::INFINITY {
                        0.0
                    } else {
                        0.5 * erfc((y - mean) / (2.0 * variance).sqrt())
                    }
                };
                sf(lo) - sf(hi)
            }
            _ => self.cdf(hi) - self.cdf(lo),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DensitySpec::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            DensitySpec::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            DensitySpec::Gaussian { mean, variance } => {
                Normal::new(mean, variance.sqrt()).expect("validated variance").sample(rng)
            }
            DensitySpec::PiecewiseLinear(ref pl) => pl.quantile(rng.random::<f64>()),
        }
    }

    /// Law of `slope * Y + intercept` when it stays inside the family set.
    pub fn affine_image(&self, slope: f64, intercept: f64) -> Option<DensitySpec> {
        if slope == 0.0 || !slope.is_finite() || !intercept.is_finite() {
            return None;
        }
        match *self {
            DensitySpec::Uniform { a, b } => {
                let (u, v) = (slope * a + intercept, slope * b + intercept);
                Some(DensitySpec::Uniform { a: u.min(v), b: u.max(v) })
            }
            DensitySpec::Exponential { rate } => {
                if intercept == 0.0 && slope > 0.0 {
                    Some(DensitySpec::Exponential { rate: rate / slope })
                } else {
                    None
                }
            }
            DensitySpec::Gaussian { mean, variance } => Some(DensitySpec::Gaussian {
                mean: slope * mean + intercept,
                variance: slope * slope * variance,
            }),
            DensitySpec::PiecewiseLinear(ref pl) => {
                let mut knots: Vec<(f64, f64)> = pl
                    .knots
                    .iter()
                    .map(|&(y, v)| (slope * y + intercept, v / slope.abs()))
                    .collect();
                if slope < 0.0 {
                    knots.reverse();
                }
                PiecewiseLinear::new(knots).ok().map(DensitySpec::PiecewiseLinear)
            }
        }
    }

    /// Conditional law given `Y` in [lo, hi], when it stays inside the
    /// family set. Returns the probability of the interval alongside.
    pub fn restrict(&self, lo: f64, hi: f64) -> Option<(f64, DensitySpec)> {
        let mass = self.mass_between(lo, hi);
        if !(mass > 0.0) {
            return None;
        }
        let s = self.support();
        if lo <= s.lo && hi >= s.hi {
            return Some((mass, self.clone()));
        }
        match *self {
            DensitySpec::Uniform { a, b } => {
                let (u, v) = (a.max(lo), b.min(hi));
                (v > u).then_some((mass, DensitySpec::Uniform { a: u, b: v }))
            }
            DensitySpec::PiecewiseLinear(ref pl) => {
                let (u, v) = (s.lo.max(lo), s.hi.min(hi));
                let mut knots = vec![(u, pl.pdf(u))];
                knots.extend(pl.knots.iter().copied().filter(|k| k.0 > u && k.0 < v));
                knots.push((v, pl.pdf(v)));
                PiecewiseLinear::normalized(knots)
                    .ok()
                    .map(|p| (mass, DensitySpec::PiecewiseLinear(p)))
            }
            _ => None,
        }
    }

    /// Integral of `integrand(y, f(y))` over the support, including unbounded
    /// tails for the Gaussian and exponential families.
    pub fn integrate_with<F: Fn(f64, f64) -> f64>(&self, integrand: F, opts: QuadOptions) -> Result<Estimate> {
        let f = |y: f64| integrand(y, self.pdf(y));
        let breaks = self.breakpoints();
        let mut total = quadrature::integrate_segments(&f, &breaks, opts);
        let (lo, hi) = self.effective_range();
        let s = self.support();
        let scale = (hi - lo).max(1e-12);
        if s.hi.is_infinite() {
            total = total + quadrature::integrate_tail(&f, hi, Tail::Upper, scale, opts)?;
        }
        if s.lo.is_infinite() {
            total = total + quadrature::integrate_tail(&f, lo, Tail::Lower, scale, opts)?;
        }
        Ok(total)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
enum DensityRepr {
    Uniform {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<Support>,
    },
    Exponential {
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<Support>,
    },
    Gaussian {
        mean: f64,
        variance: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<Support>,
    },
    PiecewiseLinear {
        knots: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<Support>,
    },
}

impl Serialize for DensitySpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let support = Some(self.support());
        let repr = match self {
            DensitySpec::Uniform { a, b } => DensityRepr::Uniform { a: *a, b: *b, support },
            DensitySpec::Exponential { rate } => DensityRepr::Exponential { rate: *rate, support },
            DensitySpec::Gaussian { mean, variance } => DensityRepr::Gaussian {
                mean: *mean,
                variance: *variance,
                support,
            },
            DensitySpec::PiecewiseLinear(pl) => DensityRepr::PiecewiseLinear {
                knots: pl.knots.iter().map(|&(y, v)| [y, v]).collect(),
                support,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensitySpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = DensityRepr::deserialize(d)?;
        let (spec, declared) = match repr {
            DensityRepr::Uniform { a, b, support } => (DensitySpec::Uniform { a, b }, support),
            DensityRepr::Exponential { rate, support } => (DensitySpec::Exponential { rate }, support),
            DensityRepr::Gaussian { mean, variance, support } => {
                (DensitySpec::Gaussian { mean, variance }, support)
            }
            DensityRepr::PiecewiseLinear { knots, support } => {
                let pl = PiecewiseLinear::new(knots.into_iter().map(|[y, v]| (y, v)).collect())
                    .map_err(D::Error::custom)?;
                (DensitySpec::PiecewiseLinear(pl), support)
            }
        };
        spec.validate().map_err(D::Error::custom)?;
        if let Some(declared) = declared {
            let actual = spec.support();
            if declared != actual {
                return Err(D::Error::custom(format!(
                    "declared support [{}, {}] does not match the {} family support [{}, {}]",
                    declared.lo,
                    declared.hi,
                    spec.family_name(),
                    actual.lo,
                    actual.hi
                )));
            }
        }
        Ok(spec)
    }
}
