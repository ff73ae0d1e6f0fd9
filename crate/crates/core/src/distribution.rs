//! Mixed-pair distributions: a finite list of labelled atoms, each carrying
//! a sub-density `g_i = p_i * g̃_i` over the reals.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::{DensitySpec, ANALYTIC_NORM_TOL};
use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, QuadOptions, Tail};

/// Discrete value of a mixed pair. Integers are stored exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl Label {
    /// Label of the constant atom produced by the continuous injection.
    pub fn constant() -> Label {
        Label::Int(1)
    }

    /// Indicator label for the continuous part of a discrete-continuous variable.
    pub fn continuous_part() -> Label {
        Label::Str("x0".into())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Label {
    fn from(v: i64) -> Self {
        Label::Int(v)
    }
}

impl From<&str> for Label {
    fn from(v: &str) -> Self {
        Label::Str(v.to_owned())
    }
}

/// `mass × shape`, the joint density of `(X = x_i, Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubDensity {
    pub mass: f64,
    #[serde(rename = "density")]
    pub shape: DensitySpec,
}

impl SubDensity {
    pub fn new(mass: f64, shape: DensitySpec) -> Self {
        SubDensity { mass, shape }
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        self.mass * self.shape.pdf(y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub label: Label,
    #[serde(flatten)]
    pub sub: SubDensity,
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "is_zero")]
    tail_mass: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// Distribution of a mixed pair `(X, Y)`.
///
/// Immutable after construction. Masses are strictly positive, labels are
/// distinct and masses sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPairDistribution {
    atoms: Vec<Atom>,
    cumulative: Vec<f64>,
    tail_mass: f64,
}

impl MixedPairDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        Self::with_tail_mass(atoms, 0.0)
    }

    /// Finite truncation of a distribution with countably many atoms.
    ///
    /// The listed masses must sum to `1 - tail_mass`; they are rescaled to
    /// unit total and `tail_mass` is kept for reporting.
    pub fn with_tail_mass(mut atoms: Vec<Atom>, tail_mass: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        if !(0.0..1.0).contains(&tail_mass) {
            return Err(Error::InvalidDistribution(format!("tail mass {tail_mass} outside [0, 1)")));
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(&a.label) {
                return Err(Error::InvalidDistribution(format!("duplicate label {}", a.label)));
            }
            if !(a.sub.mass > 0.0 && a.sub.mass.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "atom {} has non-positive mass {}",
                    a.label, a.sub.mass
                )));
            }
            a.sub.shape.validate()?;
        }
        let total: f64 = atoms.iter().map(|a| a.sub.mass).sum();
        if (total + tail_mass - 1.0).abs() > ANALYTIC_NORM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {} (tail mass {tail_mass}), expected 1",
                total
            )));
        }
        if tail_mass > 0.0 {
            for a in &mut atoms {
                a.sub.mass /= total;
            }
        }
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for a in &atoms {
            acc += a.sub.mass;
            cumulative.push(acc);
        }
        Ok(MixedPairDistribution {
            atoms,
            cumulative,
            tail_mass,
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Mass dropped when a countable distribution was truncated.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.atoms.iter().position(|a| &a.label == label)
    }

    fn atom(&self, i: usize) -> Result<&Atom> {
        self.atoms.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.atoms.len(),
        })
    }

    /// `p_i`, the stored mass of atom `i`.
    pub fn atom_mass(&self, i: usize) -> Result<f64> {
        Ok(self.atom(i)?.sub.mass)
    }

    /// `∫ g_i(y) dy` by quadrature, for cross-checking the stored mass.
    pub fn atom_mass_by_quadrature(&self, i: usize, opts: QuadOptions) -> Result<Estimate> {
        let sub = &self.atom(i)?.sub;
        sub.shape.integrate_with(|_, f| sub.mass * f, opts)
    }

    /// `g(y) = Σ_i g_i(y)`.
    pub fn marginal_density(&self, y: f64) -> f64 {
        self.atoms.iter().map(|a| a.sub.eval(y)).sum()
    }

    /// `p_i(y) = g_i(y) / g(y)`.
    pub fn posterior_weights(&self, y: f64) -> Result<Vec<f64>> {
        let values: Vec<f64> = self.atoms.iter().map(|a| a.sub.eval(y)).collect();
        let g: f64 = values.iter().sum();
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::UndefinedPosterior { y });
        }
        Ok(values.into_iter().map(|v| v / g).collect())
    }

    /// `g̃_i`, the density of `Y` given `X = x_i`.
    pub fn conditional_density(&self, i: usize) -> Result<&DensitySpec> {
        Ok(&self.atom(i)?.sub.shape)
    }

    /// Sorted union of all atoms' breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.atoms.iter().flat_map(|a| a.sub.shape.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Integral of `integrand(y, g(y))` over the union of supports.
    pub fn integrate_marginal<F: Fn(f64, f64) -> f64>(&self, integrand: F, opts: QuadOptions) -> Result<Estimate> {
        let f = |y: f64| integrand(y, self.marginal_density(y));
        let breaks = self.breakpoints();
        let mut total = quadrature::integrate_segments(&f, &breaks, opts);
        let lo = breaks[0];
        let hi = breaks[breaks.len() - 1];
        let scale = (hi - lo).max(1e-12);
        if self.atoms.iter().any(|a| a.sub.shape.support().hi.is_infinite()) {
            total = total + quadrature::integrate_tail(&f, hi, Tail::Upper, scale, opts)?;
        }
        if self.atoms.iter().any(|a| a.sub.shape.support().lo.is_infinite()) {
            total = total + quadrature::integrate_tail(&f, lo, Tail::Lower, scale, opts)?;
        }
        Ok(total)
    }

    /// Draws an atom index with probability `p_i`, then `y ~ g̃_i`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let u = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
        (i, self.atoms[i].sub.shape.sample(rng))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Label, f64) {
        let (i, y) = self.sample_index(rng);
        (self.atoms[i].label.clone(), y)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile = serde_json::from_str(text)?;
        Self::with_tail_mass(file.atoms, file.tail_mass)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = DistributionFile {
            atoms: self.atoms.clone(),
            tail_mass: self.tail_mass,
        };
        serde_json::to_string_pretty(&file).expect("distribution serializes")
    }
}

fn check_pmf(pmf: &[(Label, f64)]) -> Result<()> {
    if pmf.is_empty() {
        return Err(Error::InvalidPmf("empty".into()));
    }
    for (l, p) in pmf {
        if !(*p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidPmf(format!("probability of {l} is {p}")));
        }
    }
    Ok(())
}

/// Pairs each discrete value with an independent uniform[0, 1] coordinate.
pub fn inject_discrete(pmf: &[(Label, f64)]) -> Result<MixedPairDistribution> {
    check_pmf(pmf)?;
    let total: f64 = pmf.iter().map(|p| p.1).sum();
    if (total - 1.0).abs() > ANALYTIC_NORM_TOL {
        return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
    }
    let atoms = pmf
        .iter()
        .map(|(l, p)| Atom {
            label: l.clone(),
            sub: SubDensity::new(*p, DensitySpec::unit_uniform()),
        })
        .collect();
    MixedPairDistribution::new(atoms).map_err(|e| Error::InvalidPmf(e.to_string()))
}

/// Pairs a continuous variable with a constant discrete coordinate.
pub fn inject_continuous(density: DensitySpec) -> Result<MixedPairDistribution> {
    density.validate()?;
    MixedPairDistribution::new(vec![Atom {
        label: Label::constant(),
        sub: SubDensity::new(1.0, density),
    }])
}

/// Injection of a discrete-continuous variable: discrete values keep their
/// labels with uniform[0, 1] coordinates, and the continuous part becomes a
/// fresh atom labelled [`Label::continuous_part`].
pub fn inject_mixed(
    discrete: &[(Label, f64)],
    continuous_part: Option<(f64, DensitySpec)>,
) -> Result<MixedPairDistribution> {
    let x0 = Label::continuous_part();
    if discrete.iter().any(|(l, _)| *l == x0) {
        return Err(Error::InvalidDistribution(format!("label {x0} is reserved for the continuous part")));
    }
    if !discrete.is_empty() {
        check_pmf(discrete)?;
    }
    let cont_mass = continuous_part.as_ref().map_or(0.0, |c| c.0);
    if cont_mass < 0.0 || !cont_mass.is_finite() {
        return Err(Error::InvalidDistribution(format!("continuous mass {cont_mass}")));
    }
    let total: f64 = discrete.iter().map(|p| p.1).sum::<f64>() + cont_mass;
    if (total - 1.0).abs() > ANALYTIC_NORM_TOL {
        return Err(Error::InvalidDistribution(format!(
            "discrete and continuous masses sum to {total}, expected 1"
        )));
    }
    let mut atoms: Vec<Atom> = discrete
        .iter()
        .map(|(l, p)| Atom {
            label: l.clone(),
            sub: SubDensity::new(*p, DensitySpec::unit_uniform()),
        })
        .collect();
    if let Some((mass, shape)) = continuous_part {
        if mass > 0.0 {
            shape.validate()?;
            atoms.push(Atom {
                label: x0,
                sub: SubDensity::new(mass, shape),
            });
        }
    }
    MixedPairDistribution::new(atoms)
}
