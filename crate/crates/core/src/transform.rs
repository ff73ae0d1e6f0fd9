//! Bijections between mixed-pair spaces, declared region by region.
//!
//! A map sends `(x, y)` with `y` in a region of label `x` to
//! `(x', F(y))`, where `F` is strictly monotone on the region. Boundaries
//! shared by two regions belong to the left one.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::{DensitySpec, PiecewiseLinear, Support};
use crate::distribution::{Atom, Label, MixedPairDistribution, SubDensity};
use crate::entropy::{mixed_entropy, EntropyOptions};
use crate::error::{Error, Result};

/// Probe points per region used by the default checks.
pub const DEFAULT_PROBES: usize = 10_000;
/// Allowed `||F'| - 1|` for certification.
pub const UNIT_DERIVATIVE_TOL: f64 = 1e-6;
/// Allowed round-trip error in the bijectivity check.
pub const ROUNDTRIP_TOL: f64 = 1e-9;
/// Knot count of tabulated pushforward densities.
pub const TABULATED_KNOTS: usize = 4096;

/// Continuous part of one region's map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionMap {
    Affine { slope: f64, intercept: f64 },
    /// Linear interpolation through `(y, F(y))` knots.
    Tabulated { knots: Vec<(f64, f64)> },
    /// Apply the maps in order.
    Composite { maps: Vec<RegionMap> },
}

impl RegionMap {
    pub fn identity() -> Self {
        RegionMap::Affine {
            slope: 1.0,
            intercept: 0.0,
        }
    }

    pub fn shift(c: f64) -> Self {
        RegionMap::Affine {
            slope: 1.0,
            intercept: c,
        }
    }

    fn segment(knots: &[(f64, f64)], y: f64) -> usize {
        let n = knots.len();
        knots.partition_point(|k| k.0 < y).clamp(1, n - 1) - 1
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            RegionMap::Affine { slope, intercept } => slope * y + intercept,
            RegionMap::Tabulated { knots } => {
                let j = Self::segment(knots, y);
                let (y0, z0) = knots[j];
                let (y1, z1) = knots[j + 1];
                z0 + (z1 - z0) * (y - y0) / (y1 - y0)
            }
            RegionMap::Composite { maps } => maps.iter().fold(y, |v, m| m.eval(v)),
        }
    }

    /// `dF/dy`; on a tabulated knot the slope of the segment on its left.
    pub fn derivative(&self, y: f64) -> f64 {
        match self {
            RegionMap::Affine { slope, .. } => *slope,
            RegionMap::Tabulated { knots } => {
                let j = Self::segment(knots, y);
                (knots[j + 1].1 - knots[j].1) / (knots[j + 1].0 - knots[j].0)
            }
            RegionMap::Composite { maps } => {
                let mut v = y;
                let mut d = 1.0;
                for m in maps {
                    d *= m.derivative(v);
                    v = m.eval(v);
                }
                d
            }
        }
    }

    /// Strict monotonicity, checked structurally.
    pub fn is_strictly_monotone(&self) -> bool {
        match self {
            RegionMap::Affine { slope, intercept } => *slope != 0.0 && slope.is_finite() && intercept.is_finite(),
            RegionMap::Tabulated { knots } => {
                if knots.len() < 2 || knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
                    return false;
                }
                let xs_increasing = knots.windows(2).all(|w| w[1].0 > w[0].0);
                let up = knots.windows(2).all(|w| w[1].1 > w[0].1);
                let down = knots.windows(2).all(|w| w[1].1 < w[0].1);
                xs_increasing && (up || down)
            }
            RegionMap::Composite { maps } => !maps.is_empty() && maps.iter().all(|m| m.is_strictly_monotone()),
        }
    }

    fn increasing(&self) -> bool {
        match self {
            RegionMap::Affine { slope, .. } => *slope > 0.0,
            RegionMap::Tabulated { knots } => knots[knots.len() - 1].1 > knots[0].1,
            RegionMap::Composite { maps } => maps.iter().filter(|m| !m.increasing()).count() % 2 == 0,
        }
    }

    /// Inverse map; requires strict monotonicity.
    pub fn inverse(&self) -> Result<RegionMap> {
        if !self.is_strictly_monotone() {
            return Err(Error::NotBijective("region map is not strictly monotone".into()));
        }
        Ok(match self {
            RegionMap::Affine { slope, intercept } => RegionMap::Affine {
                slope: 1.0 / slope,
                intercept: -intercept / slope,
            },
            RegionMap::Tabulated { knots } => {
                let mut k: Vec<(f64, f64)> = knots.iter().map(|&(y, z)| (z, y)).collect();
                if !self.increasing() {
                    k.reverse();
                }
                RegionMap::Tabulated { knots: k }
            }
            RegionMap::Composite { maps } => RegionMap::Composite {
                maps: maps.iter().rev().map(|m| m.inverse()).collect::<Result<_>>()?,
            },
        })
    }

    /// Whether the map is defined on `[lo, hi]` without extrapolation.
    fn covers(&self, lo: f64, hi: f64) -> bool {
        match self {
            RegionMap::Affine { .. } => true,
            RegionMap::Tabulated { knots } => knots[0].0 <= lo && knots[knots.len() - 1].0 >= hi,
            RegionMap::Composite { maps } => {
                let (mut a, mut b) = (lo, hi);
                for m in maps {
                    if !m.covers(a, b) {
                        return false;
                    }
                    let (u, v) = m.image(a, b);
                    a = u;
                    b = v;
                }
                true
            }
        }
    }

    /// Image of `[lo, hi]` as an ordered interval.
    pub fn image(&self, lo: f64, hi: f64) -> (f64, f64) {
        let ev = |y: f64| -> f64 {
            if y.is_infinite() {
                match self {
                    RegionMap::Affine { slope, .. } => y * slope.signum(),
                    _ => self.eval(y),
                }
            } else {
                self.eval(y)
            }
        };
        let (u, v) = (ev(lo), ev(hi));
        (u.min(v), u.max(v))
    }
}

/// One piece of a mixed-pair map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRegion {
    pub input_label: Label,
    pub interval: Support,
    pub output_label: Label,
    pub map: RegionMap,
}

impl MapRegion {
    pub fn image(&self) -> (f64, f64) {
        self.map.image(self.interval.lo, self.interval.hi)
    }
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    regions: Vec<MapRegion>,
}

/// `F = (F_d, F_c)` as a list of regions.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPairMap {
    regions: Vec<MapRegion>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BijectivityReport {
    pub bijective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub max_roundtrip_error: f64,
    pub probes_per_region: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub certified: bool,
    pub probes_per_region: usize,
    /// Largest `||F'| - 1|` seen.
    pub worst_deviation: f64,
    /// `|F'|` at the worst probe.
    pub worst_derivative: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_label: Option<Label>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationReport {
    pub h_in: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h_out: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
    /// Bijective and unit-derivative on the probe grid.
    pub certified: bool,
    pub bijectivity: BijectivityReport,
    pub derivative: DerivativeReport,
    pub error_estimate: f64,
}

/// `n` probe points strictly inside `[lo, hi]`, uniform after mapping an
/// unbounded interval onto (0, 1).
fn probe_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) / n as f64;
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => lo + t * (hi - lo),
                (true, false) => lo + t / (1.0 - t),
                (false, true) => hi - (1.0 - t) / t,
                (false, false) => (std::f64::consts::PI * (t - 0.5)).tan(),
            }
        })
        .collect()
}

impl MixedPairMap {
    pub fn new(regions: Vec<MapRegion>) -> Result<Self> {
        if regions.is_empty() {
            return Err(Error::InvalidMap("no regions".into()));
        }
        for r in &regions {
            let s = r.interval;
            if s.lo.is_nan() || s.hi.is_nan() || s.lo >= s.hi {
                return Err(Error::InvalidMap(format!("region of {} has empty interval", r.input_label)));
            }
            if let RegionMap::Tabulated { knots } = &r.map {
                if knots.len() < 2 {
                    return Err(Error::InvalidMap("tabulated map needs two knots".into()));
                }
            }
        }
        for (i, a) in regions.iter().enumerate() {
            for b in &regions[i + 1..] {
                if a.input_label == b.input_label && a.interval.lo < b.interval.hi && b.interval.lo < a.interval.hi {
                    return Err(Error::InvalidMap(format!(
                        "regions of label {} overlap: [{}, {}] and [{}, {}]",
                        a.input_label, a.interval.lo, a.interval.hi, b.interval.lo, b.interval.hi
                    )));
                }
            }
        }
        let mut regions = regions;
        regions.sort_by(|a, b| {
            a.input_label
                .cmp(&b.input_label)
                .then(a.interval.lo.total_cmp(&b.interval.lo))
        });
        Ok(MixedPairMap { regions })
    }

    /// The same continuous map on every listed label, keeping labels.
    pub fn uniform_over(labels: &[Label], map: RegionMap) -> Result<Self> {
        Self::new(
            labels
                .iter()
                .map(|l| MapRegion {
                    input_label: l.clone(),
                    interval: Support::real_line(),
                    output_label: l.clone(),
                    map: map.clone(),
                })
                .collect(),
        )
    }

    pub fn regions(&self) -> &[MapRegion] {
        &self.regions
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        Self::new(file.regions)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&MapFile {
            regions: self.regions.clone(),
        })
        .expect("map serializes")
    }

    fn region_of(&self, label: &Label, y: f64) -> Option<&MapRegion> {
        self.regions
            .iter()
            .find(|r| r.input_label == *label && r.interval.lo <= y && y <= r.interval.hi)
    }

    pub fn apply(&self, label: &Label, y: f64) -> Result<(Label, f64)> {
        let r = self.region_of(label, y).ok_or_else(|| Error::OutsideDomain {
            label: label.clone(),
            y,
        })?;
        Ok((r.output_label.clone(), r.map.eval(y)))
    }

    /// `F^{-1}`, region by region.
    pub fn inverse(&self) -> Result<MixedPairMap> {
        let regions = self
            .regions
            .iter()
            .map(|r| {
                let (lo, hi) = r.image();
                Ok(MapRegion {
                    input_label: r.output_label.clone(),
                    interval: Support::new(lo, hi),
                    output_label: r.input_label.clone(),
                    map: r.map.inverse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MixedPairMap::new(regions).map_err(|e| Error::NotBijective(e.to_string()))
    }

    pub fn apply_inverse(&self, label: &Label, y: f64) -> Result<(Label, f64)> {
        self.inverse()?.apply(label, y)
    }

    /// `G ∘ F` where `self = F`.
    pub fn then(&self, g: &MixedPairMap) -> Result<MixedPairMap> {
        let mut out = Vec::new();
        for r in &self.regions {
            let (zlo, zhi) = r.image();
            let inv = r.map.inverse()?;
            for s in g.regions.iter().filter(|s| s.input_label == r.output_label) {
                let lo = zlo.max(s.interval.lo);
                let hi = zhi.min(s.interval.hi);
                if lo >= hi {
                    continue;
                }
                let (ylo, yhi) = inv.image(lo, hi);
                let map = match (&r.map, &s.map) {
                    (RegionMap::Affine { slope: a, intercept: b }, RegionMap::Affine { slope: c, intercept: d }) => {
                        RegionMap::Affine {
                            slope: a * c,
                            intercept: c * b + d,
                        }
                    }
                    _ => RegionMap::Composite {
                        maps: vec![r.map.clone(), s.map.clone()],
                    },
                };
                out.push(MapRegion {
                    input_label: r.input_label.clone(),
                    interval: Support::new(ylo, yhi),
                    output_label: s.output_label.clone(),
                    map,
                });
            }
        }
        MixedPairMap::new(out)
    }

    /// Structural and numerical bijectivity: strictly monotone pieces,
    /// disjoint images per output label and forward-inverse round trips.
    /// With `dist`, also checks that the regions carry all of its mass.
    pub fn bijectivity_check(&self, dist: Option<&MixedPairDistribution>, probes: usize) -> BijectivityReport {
        let fail = |reason: String, err: f64| BijectivityReport {
            bijective: false,
            reason: Some(reason),
            max_roundtrip_error: err,
            probes_per_region: probes,
        };
        for r in &self.regions {
            if !r.map.is_strictly_monotone() {
                return fail(
                    format!(
                        "map on label {} over [{}, {}] is not strictly monotone",
                        r.input_label, r.interval.lo, r.interval.hi
                    ),
                    f64::NAN,
                );
            }
            if !r.map.covers(r.interval.lo, r.interval.hi) {
                return fail(format!("tabulated map on label {} does not cover its interval", r.input_label), f64::NAN);
            }
        }
        for (i, a) in self.regions.iter().enumerate() {
            let (alo, ahi) = a.image();
            for b in &self.regions[i + 1..] {
                let (blo, bhi) = b.image();
                if a.output_label == b.output_label && alo < bhi && blo < ahi {
                    return fail(
                        format!("two regions map onto overlapping parts of label {}", a.output_label),
                        f64::NAN,
                    );
                }
            }
        }
        if let Some(d) = dist {
            for atom in d.atoms() {
                let covered: f64 = self
                    .regions
                    .iter()
                    .filter(|r| r.input_label == atom.label)
                    .map(|r| atom.sub.shape.mass_between(r.interval.lo, r.interval.hi))
                    .sum();
                if (covered - 1.0).abs() > 1e-9 {
                    return fail(
                        format!("regions of label {} carry {covered} of its mass", atom.label),
                        f64::NAN,
                    );
                }
            }
        }
        let inv = match self.inverse() {
            Ok(m) => m,
            Err(e) => return fail(e.to_string(), f64::NAN),
        };
        let mut worst: f64 = 0.0;
        for r in &self.regions {
            for y in probe_points(r.interval.lo, r.interval.hi, probes) {
                let back = self.apply(&r.input_label, y).and_then(|(l, z)| inv.apply(&l, z));
                match back {
                    Ok((l, yb)) if l == r.input_label => {
                        worst = worst.max((yb - y).abs() / y.abs().max(1.0));
                    }
                    _ => return fail(format!("round trip failed at ({}, {y})", r.input_label), f64::INFINITY),
                }
            }
        }
        BijectivityReport {
            bijective: worst <= ROUNDTRIP_TOL,
            reason: (worst > ROUNDTRIP_TOL).then(|| format!("round-trip error {worst:e}")),
            max_roundtrip_error: worst,
            probes_per_region: probes,
        }
    }

    /// Checks `|dF_c/dy| = 1` on a probe grid of each region.
    pub fn unit_derivative_check(&self, probes: usize) -> DerivativeReport {
        let mut report = DerivativeReport {
            certified: true,
            probes_per_region: probes,
            worst_deviation: 0.0,
            worst_derivative: 1.0,
            worst_label: None,
            worst_y: None,
        };
        for r in &self.regions {
            for y in probe_points(r.interval.lo, r.interval.hi, probes) {
                let d = r.map.derivative(y).abs();
                let dev = if d.is_finite() { (d - 1.0).abs() } else { f64::INFINITY };
                if dev > report.worst_deviation || report.worst_label.is_none() {
                    report.worst_deviation = dev;
                    report.worst_derivative = d;
                    report.worst_label = Some(r.input_label.clone());
                    report.worst_y = Some(y);
                }
            }
        }
        report.certified = report.worst_deviation <= UNIT_DERIVATIVE_TOL;
        report
    }

    /// Law of `F(Z)`: `h_j(F(y)) |F'(y)| = g_i(y)` region by region.
    pub fn pushforward(&self, dist: &MixedPairDistribution) -> Result<MixedPairDistribution> {
        let check = self.bijectivity_check(Some(dist), 64);
        if !check.bijective {
            return Err(Error::NotBijective(check.reason.unwrap_or_default()));
        }
        let mut pieces: Vec<(Label, Vec<(f64, DensitySpec)>)> = Vec::new();
        for atom in dist.atoms() {
            for r in self.regions.iter().filter(|r| r.input_label == atom.label) {
                let shape = &atom.sub.shape;
                let p = shape.mass_between(r.interval.lo, r.interval.hi);
                if !(p > 0.0) {
                    continue;
                }
                let image = image_density(shape, r)?;
                let mass = atom.sub.mass * p;
                match pieces.iter_mut().find(|(l, _)| *l == r.output_label) {
                    Some(slot) => slot.1.push((mass, image)),
                    None => pieces.push((r.output_label.clone(), vec![(mass, image)])),
                }
            }
        }
        let atoms = pieces
            .into_iter()
            .map(|(label, parts)| {
                let mass: f64 = parts.iter().map(|p| p.0).sum();
                Ok(Atom {
                    label,
                    sub: SubDensity::new(mass, combine(parts)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MixedPairDistribution::with_tail_mass(atoms, 0.0)
    }

    /// Entropy before and after, with the certification outcome.
    pub fn preservation_report(&self, dist: &MixedPairDistribution, opts: &EntropyOptions) -> Result<PreservationReport> {
        let h_in = mixed_entropy(dist, opts)?;
        let bijectivity = self.bijectivity_check(Some(dist), DEFAULT_PROBES);
        let derivative = self.unit_derivative_check(DEFAULT_PROBES);
        if !bijectivity.bijective {
            return Ok(PreservationReport {
                h_in: h_in.value,
                h_out: None,
                difference: None,
                certified: false,
                bijectivity,
                derivative,
                error_estimate: h_in.error_estimate,
            });
        }
        let h_out = mixed_entropy(&self.pushforward(dist)?, opts)?;
        Ok(PreservationReport {
            h_in: h_in.value,
            h_out: Some(h_out.value),
            difference: Some(h_out.value - h_in.value),
            certified: derivative.certified,
            bijectivity,
            derivative,
            error_estimate: h_in.error_estimate + h_out.error_estimate,
        })
    }
}

/// Conditional law of `F(Y)` given `Y` in the region.
fn image_density(shape: &DensitySpec, r: &MapRegion) -> Result<DensitySpec> {
    let (lo, hi) = (r.interval.lo, r.interval.hi);
    if let RegionMap::Affine { slope, intercept } = r.map {
        if let Some(img) = shape.restrict(lo, hi).and_then(|(_, d)| d.affine_image(slope, intercept)) {
            return Ok(img);
        }
    }
    let (elo, ehi) = shape.effective_range();
    let (ylo, yhi) = (lo.max(elo), hi.min(ehi));
    let (zlo, zhi) = r.map.image(ylo, yhi);
    let inv = r.map.inverse()?;
    let n = TABULATED_KNOTS;
    let knots = (0..n)
        .map(|k| {
            let z = if k + 1 == n {
                zhi
            } else {
                zlo + (zhi - zlo) * k as f64 / (n - 1) as f64
            };
            let y = inv.eval(z).clamp(ylo, yhi);
            let d = r.map.derivative(y).abs();
            (z, shape.pdf(y) / d)
        })
        .collect();
    Ok(DensitySpec::PiecewiseLinear(PiecewiseLinear::normalized(knots)?))
}

/// Joins the pieces landing on one output label into a single density.
fn combine(mut parts: Vec<(f64, DensitySpec)>) -> Result<DensitySpec> {
    if parts.len() == 1 {
        return Ok(parts.pop().expect("one part").1);
    }
    let total: f64 = parts.iter().map(|p| p.0).sum();
    parts.sort_by(|a, b| a.1.support().lo.total_cmp(&b.1.support().lo));
    let mut merged: Option<(f64, f64, f64)> = None;
    let all_uniform = parts.iter().all(|p| matches!(p.1, DensitySpec::Uniform { .. }));
    if all_uniform {
        for (m, d) in &parts {
            let DensitySpec::Uniform { a, b } = *d else { unreachable!() };
            let height = m / total / (b - a);
            merged = match merged {
                None => Some((a, b, height)),
                Some((u, v, h)) if (v - a).abs() <= 1e-12 * v.abs().max(1.0) && (h - height).abs() <= 1e-12 * h => {
                    Some((u, b, h))
                }
                _ => {
                    merged = None;
                    break;
                }
            };
        }
        if let Some((a, b, _)) = merged {
            return DensitySpec::uniform(a, b);
        }
    }
    let mut knots: Vec<(f64, f64)> = Vec::new();
    for (m, d) in &parts {
        let w = m / total;
        let local: Vec<(f64, f64)> = match d {
            DensitySpec::Uniform { a, b } => vec![(*a, w / (b - a)), (*b, w / (b - a))],
            DensitySpec::PiecewiseLinear(pl) => pl.knots().iter().map(|&(y, v)| (y, w * v)).collect(),
            other => {
                let (lo, hi) = other.effective_range();
                let n = TABULATED_KNOTS;
                (0..n)
                    .map(|k| {
                        let y = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                        (y, w * other.pdf(y))
                    })
                    .collect()
            }
        };
        let mut local = local.into_iter();
        let Some((y0, v0)) = local.next() else { continue };
        match knots.last().copied() {
            None => knots.push((y0, v0)),
            Some((py, pv)) => {
                let eta = 1e-9 * py.abs().max(1.0);
                if y0 < py - eta {
                    return Err(Error::NotBijective("pieces of one output label overlap".into()));
                }
                if y0 <= py + eta {
                    knots.push((py + eta, v0));
                } else {
                    if pv != 0.0 {
                        knots.push((py + eta, 0.0));
                    }
                    if v0 != 0.0 {
                        knots.push((y0 - eta, 0.0));
                    }
                    knots.push((y0, v0));
                }
            }
        }
        knots.extend(local);
    }
    Ok(DensitySpec::PiecewiseLinear(PiecewiseLinear::normalized(knots)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::inject_continuous;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn split_map() -> MixedPairMap {
        MixedPairMap::new(vec![
            MapRegion {
                input_label: Label::constant(),
                interval: Support::new(0.0, 1.0),
                output_label: 0.into(),
                map: RegionMap::identity(),
            },
            MapRegion {
                input_label: Label::constant(),
                interval: Support::new(1.0, 2.0),
                output_label: 1.into(),
                map: RegionMap::shift(-1.0),
            },
        ])
        .unwrap()
    }

    fn u02() -> MixedPairDistribution {
        inject_continuous(DensitySpec::uniform(0.0, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn split_map_points() {
        let m = split_map();
        assert_eq!(m.apply(&Label::constant(), 1.5).unwrap(), (1.into(), 0.5));
        assert_eq!(m.apply(&Label::constant(), 0.5).unwrap(), (0.into(), 0.5));
        // The shared boundary belongs to the left region.
        assert_eq!(m.apply(&Label::constant(), 1.0).unwrap(), (0.into(), 1.0));
        assert!(matches!(m.apply(&Label::constant(), 2.5), Err(Error::OutsideDomain { .. })));
        assert_eq!(m.apply_inverse(&1.into(), 0.5).unwrap(), (Label::constant(), 1.5));
    }

    #[test]
    fn derivative_checks() {
        assert!(split_map().unit_derivative_check(DEFAULT_PROBES).certified);
        let scale = MixedPairMap::uniform_over(
            &[Label::constant()],
            RegionMap::Affine {
                slope: 2.0,
                intercept: 0.0,
            },
        )
        .unwrap();
        let r = scale.unit_derivative_check(DEFAULT_PROBES);
        assert!(!r.certified);
        assert_eq!(r.worst_derivative, 2.0);
        let shift = MixedPairMap::uniform_over(&[Label::constant()], RegionMap::shift(3.0)).unwrap();
        assert!(shift.unit_derivative_check(DEFAULT_PROBES).certified);
    }

    #[test]
    fn pushforward_examples() {
        let out = split_map().pushforward(&u02()).unwrap();
        assert_eq!(out.len(), 2);
        for a in out.atoms() {
            assert_abs_diff_eq!(a.sub.mass, 0.5, epsilon = 1e-15);
            assert_eq!(a.sub.shape, DensitySpec::unit_uniform());
        }
        let u = inject_continuous(DensitySpec::unit_uniform()).unwrap();
        let id = MixedPairMap::uniform_over(&[Label::constant()], RegionMap::identity()).unwrap();
        assert_eq!(id.pushforward(&u).unwrap(), u);
        let shift = MixedPairMap::uniform_over(&[Label::constant()], RegionMap::shift(3.0)).unwrap();
        let s = shift.pushforward(&u).unwrap();
        assert_eq!(s.atoms()[0].sub.shape, DensitySpec::uniform(3.0, 4.0).unwrap());
        // Inverse pushforward folds the two halves back into uniform[0,2].
        let back = split_map().inverse().unwrap().pushforward(&out).unwrap();
        assert_eq!(back.atoms()[0].sub.shape, DensitySpec::uniform(0.0, 2.0).unwrap());
    }

    #[test]
    fn preservation_examples() {
        let o = EntropyOptions::default();
        let r = split_map().preservation_report(&u02(), &o).unwrap();
        assert!(r.certified);
        assert_abs_diff_eq!(r.h_in, LN_2, epsilon = 1e-9);
        assert_abs_diff_eq!(r.h_out.unwrap(), LN_2, epsilon = 1e-9);
        let u = inject_continuous(DensitySpec::unit_uniform()).unwrap();
        let scale = MixedPairMap::uniform_over(
            &[Label::constant()],
            RegionMap::Affine {
                slope: 2.0,
                intercept: 0.0,
            },
        )
        .unwrap();
        let r = scale.preservation_report(&u, &o).unwrap();
        assert!(!r.certified);
        assert_abs_diff_eq!(r.h_in, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.h_out.unwrap(), LN_2, epsilon = 1e-9);
    }

    #[test]
    fn quantization_is_rejected() {
        let q = MixedPairMap::new(vec![
            MapRegion {
                input_label: Label::constant(),
                interval: Support::new(0.0, 1.0),
                output_label: Label::continuous_part(),
                map: RegionMap::identity(),
            },
            MapRegion {
                input_label: Label::constant(),
                interval: Support::new(1.0, 2.0),
                output_label: 2.into(),
                map: RegionMap::Affine {
                    slope: 0.0,
                    intercept: 0.0,
                },
            },
        ])
        .unwrap();
        let r = q.preservation_report(&u02(), &EntropyOptions::default()).unwrap();
        assert!(!r.bijectivity.bijective);
        assert!(r.h_out.is_none() && !r.certified);
        assert!(q.pushforward(&u02()).is_err());
    }

    #[test]
    fn tabulated_map_pushforward() {
        // A piecewise-linear increasing map with slopes 1/2 and 3/2.
        let m = MixedPairMap::uniform_over(
            &[Label::constant()],
            RegionMap::Tabulated {
                knots: vec![(0.0, 0.0), (1.0, 0.5), (2.0, 2.0)],
            },
        )
        .unwrap();
        let m = MixedPairMap::new(vec![MapRegion {
            interval: Support::new(0.0, 2.0),
            ..m.regions()[0].clone()
        }])
        .unwrap();
        let out = m.pushforward(&u02()).unwrap();
        let o = EntropyOptions::default();
        let h = mixed_entropy(&out, &o).unwrap().value;
        // h(F(Y)) = h(Y) + E log|F'(Y)|.
        let oracle = LN_2 + 0.5 * (0.5f64.ln() + 1.5f64.ln());
        assert!((h - oracle).abs() < 1e-4, "{h} vs {oracle}");
        assert!(!m.unit_derivative_check(100).certified);
    }

    #[test]
    fn composition_multiplies_derivatives() {
        let f = split_map();
        let g = MixedPairMap::new(vec![
            MapRegion {
                input_label: 0.into(),
                interval: Support::new(0.0, 1.0),
                output_label: 0.into(),
                map: RegionMap::shift(5.0),
            },
            MapRegion {
                input_label: 1.into(),
                interval: Support::new(0.0, 1.0),
                output_label: 1.into(),
                map: RegionMap::Affine {
                    slope: -1.0,
                    intercept: 1.0,
                },
            },
        ])
        .unwrap();
        let gf = f.then(&g).unwrap();
        assert!(gf.unit_derivative_check(1000).certified);
        assert_eq!(gf.apply(&Label::constant(), 1.25).unwrap(), (1.into(), 0.75));
        assert!(gf.bijectivity_check(Some(&u02()), 1000).bijective);
    }

    #[test]
    fn json_round_trip() {
        let m = split_map();
        let back = MixedPairMap::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"regions":[{"input_label":1,"interval":[0,1],"output_label":0,"map":{"type":"spline"}}]}"#;
        assert!(MixedPairMap::from_json(bad).is_err());
    }
}
