//! Vectors of mixed pairs: atoms indexed by label vectors `x ∈ S^d`, each
//! carrying a sub-density over `R^d`.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;

use crate::density::{DensitySpec, ANALYTIC_NORM_TOL, TABULATED_NORM_TOL};
use crate::distribution::{Label, MixedPairDistribution};
use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, QuadOptions};
use crate::rng::StreamRng;

/// Largest dimension handled by dense nested quadrature.
pub const MAX_QUADRATURE_DIM: usize = 4;

/// Sample count used when an expectation falls back to Monte Carlo.
pub const FALLBACK_SAMPLES: usize = 200_000;

/// Piecewise-constant density on a rectangular grid. Values are stored
/// row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramGrid {
    edges: Vec<Vec<f64>>,
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl HistogramGrid {
    /// `values` are density heights, one per cell.
    pub fn new(edges: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidDensity("histogram needs at least one axis".into()));
        }
        let mut cells = 1usize;
        for (k, e) in edges.iter().enumerate() {
            if e.len() < 2 {
                return Err(Error::InvalidDensity(format!("axis {k} has fewer than two edges")));
            }
            if e.iter().any(|v| !v.is_finite()) || e.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidDensity(format!("edges of axis {k} not strictly increasing")));
            }
            cells *= e.len() - 1;
        }
        if values.len() != cells {
            return Err(Error::InvalidDensity(format!("expected {cells} cell values, got {}", values.len())));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidDensity("negative or non-finite cell value".into()));
        }
        let mut grid = HistogramGrid {
            edges,
            values,
            cumulative: Vec::new(),
        };
        let mut acc = 0.0;
        grid.cumulative = (0..cells)
            .map(|c| {
                acc += grid.values[c] * grid.cell_volume(c);
                acc
            })
            .collect();
        Ok(grid)
    }

    /// Builds a normalized histogram from nonnegative cell weights.
    pub fn from_weights(edges: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let raw = HistogramGrid::new(edges, vec![0.0; weights.len()])?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidDensity("histogram weights must be nonnegative with positive sum".into()));
        }
        let values = weights
            .iter()
            .enumerate()
            .map(|(c, w)| w / total / raw.cell_volume(c))
            .collect();
        HistogramGrid::new(raw.edges, values)
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<f64>] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    fn shape(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.len() - 1).collect()
    }

    fn unravel(&self, mut c: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; shape.len()];
        for k in (0..shape.len()).rev() {
            idx[k] = c % shape[k];
            c /= shape[k];
        }
        idx
    }

    fn cell_volume(&self, c: usize) -> f64 {
        self.unravel(c)
            .iter()
            .zip(&self.edges)
            .map(|(&i, e)| e[i + 1] - e[i])
            .product()
    }

    /// `(volume, height)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.values.len()).map(|c| (self.cell_volume(c), self.values[c]))
    }

    pub fn pdf(&self, y: &[f64]) -> f64 {
        let mut c = 0usize;
        for (k, e) in self.edges.iter().enumerate() {
            let v = y[k];
            if !(v >= e[0] && v <= e[e.len() - 1]) {
                return 0.0;
            }
            let i = (e.partition_point(|&x| x <= v) - 1).min(e.len() - 2);
            c = c * (e.len() - 1) + i;
        }
        self.values[c]
    }

    /// Histogram of the coordinates in `keep`, in the given order.
    pub fn marginal(&self, keep: &[usize]) -> Result<HistogramGrid> {
        let edges: Vec<Vec<f64>> = keep.iter().map(|&k| self.edges[k].clone()).collect();
        let out_shape: Vec<usize> = edges.iter().map(|e| e.len() - 1).collect();
        let mut weights = vec![0.0; out_shape.iter().product()];
        for c in 0..self.values.len() {
            let idx = self.unravel(c);
            let mut o = 0usize;
            for (j, &k) in keep.iter().enumerate() {
                o = o * out_shape[j] + idx[k];
            }
            weights[o] += self.values[c] * self.cell_volume(c);
        }
        let kept = HistogramGrid::new(edges, vec![0.0; weights.len()])?;
        let values = weights.iter().enumerate().map(|(c, w)| w / kept.cell_volume(c)).collect();
        HistogramGrid::new(kept.edges, values)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let u = rng.random::<f64>() * self.total();
        let c = self.cumulative.partition_point(|&v| v <= u).min(self.values.len() - 1);
        self.unravel(c)
            .iter()
            .zip(&self.edges)
            .map(|(&i, e)| e[i] + rng.random::<f64>() * (e[i + 1] - e[i]))
            .collect()
    }
}

/// Conditional density of `Y ∈ R^d` given one label vector.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorShape {
    /// Independent coordinates.
    Product(Vec<DensitySpec>),
    Histogram(HistogramGrid),
    /// Increasing rearrangement of `dim` i.i.d. draws from `base`:
    /// `n! ∏ f(y_k)` on `y_1 ≤ … ≤ y_n`.
    OrderedIid { base: DensitySpec, dim: usize },
    /// Convex combination; weights sum to one.
    Mixture(Vec<(f64, VectorShape)>),
}

impl VectorShape {
    pub fn dim(&self) -> usize {
        match self {
            VectorShape::Product(f) => f.len(),
            VectorShape::Histogram(h) => h.dim(),
            VectorShape::OrderedIid { dim, .. } => *dim,
            VectorShape::Mixture(parts) => parts.first().map_or(0, |p| p.1.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VectorShape::Product(f) => {
                if f.is_empty() {
                    return Err(Error::InvalidDensity("empty product".into()));
                }
                f.iter().try_for_each(|d| d.validate())
            }
            VectorShape::Histogram(h) => {
                if (h.total() - 1.0).abs() > TABULATED_NORM_TOL {
                    return Err(Error::InvalidDensity(format!("histogram integrates to {}", h.total())));
                }
                Ok(())
            }
            VectorShape::OrderedIid { base, dim } => {
                if *dim < 1 {
                    return Err(Error::InvalidDensity("ordered shape needs dim >= 1".into()));
                }
                base.validate()
            }
            VectorShape::Mixture(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidDensity("empty mixture".into()));
                }
                let d = parts[0].1.dim();
                let mut total = 0.0;
                for (w, s) in parts {
                    if !(*w > 0.0) || !w.is_finite() || s.dim() != d {
                        return Err(Error::InvalidDensity("bad mixture component".into()));
                    }
                    s.validate()?;
                    total += w;
                }
                if (total - 1.0).abs() > ANALYTIC_NORM_TOL {
                    return Err(Error::InvalidDensity(format!("mixture weights sum to {total}")));
                }
                Ok(())
            }
        }
    }

    pub fn pdf(&self, y: &[f64]) -> f64 {
        match self {
            VectorShape::Product(f) => {
                let mut p = 1.0;
                for (d, &v) in f.iter().zip(y) {
                    p *= d.pdf(v);
                    if p == 0.0 {
                        break;
                    }
                }
                p
            }
            VectorShape::Histogram(h) => h.pdf(y),
            VectorShape::OrderedIid { base, dim } => {
                if y.windows(2).any(|w| w[1] < w[0]) {
                    return 0.0;
                }
                let mut p = factorial(*dim);
                for &v in y {
                    p *= base.pdf(v);
                }
                p
            }
            VectorShape::Mixture(parts) => parts.iter().map(|(w, s)| w * s.pdf(y)).sum(),
        }
    }

    /// Breakpoints of coordinate `axis` when the leading coordinates are
    /// fixed to `prefix`.
    pub fn breaks(&self, axis: usize, prefix: &[f64]) -> Vec<f64> {
        match self {
            VectorShape::Product(f) => f[axis].breakpoints(),
            VectorShape::Histogram(h) => h.edges[axis].clone(),
            VectorShape::OrderedIid { base, .. } => {
                let b = base.breakpoints();
                if axis == 0 {
                    return b;
                }
                let lo = prefix[axis - 1];
                let hi = b[b.len() - 1];
                if lo >= hi {
                    return Vec::new();
                }
                let mut out = vec![lo];
                out.extend(b.into_iter().filter(|&v| v > lo));
                out
            }
            VectorShape::Mixture(parts) => {
                let mut b: Vec<f64> = parts.iter().flat_map(|p| p.1.breaks(axis, prefix)).collect();
                b.sort_by(f64::total_cmp);
                b.dedup();
                b
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            VectorShape::Product(f) => f.iter().map(|d| d.sample(rng)).collect(),
            VectorShape::Histogram(h) => h.sample(rng),
            VectorShape::OrderedIid { base, dim } => {
                let mut v: Vec<f64> = (0..*dim).map(|_| base.sample(rng)).collect();
                v.sort_by(f64::total_cmp);
                v
            }
            VectorShape::Mixture(parts) => {
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                for (w, s) in parts {
                    acc += w;
                    if u < acc {
                        return s.sample(rng);
                    }
                }
                parts[parts.len() - 1].1.sample(rng)
            }
        }
    }

    /// Density of the coordinates in `keep`, in the given order.
    pub fn marginal(&self, keep: &[usize]) -> Result<VectorShape> {
        let identity = keep.iter().copied().eq(0..self.dim());
        if identity {
            return Ok(self.clone());
        }
        match self {
            VectorShape::Product(f) => Ok(VectorShape::Product(keep.iter().map(|&k| f[k].clone()).collect())),
            VectorShape::Histogram(h) => Ok(VectorShape::Histogram(h.marginal(keep)?)),
            VectorShape::OrderedIid { .. } => Err(Error::Unsupported(
                "marginals of ordered shapes other than the full vector".into(),
            )),
            VectorShape::Mixture(parts) => {
                let parts = parts
                    .iter()
                    .map(|(w, s)| Ok((*w, s.marginal(keep)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(simplify(parts))
            }
        }
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Flattens nested mixtures, merges equal components and folds histograms
/// sharing a grid into one.
pub fn simplify(parts: Vec<(f64, VectorShape)>) -> VectorShape {
    let mut flat: Vec<(f64, VectorShape)> = Vec::new();
    let mut stack: Vec<(f64, VectorShape)> = parts.into_iter().rev().collect();
    while let Some((w, s)) = stack.pop() {
        match s {
            VectorShape::Mixture(inner) => {
                for (v, t) in inner.into_iter().rev() {
                    stack.push((w * v, t));
                }
            }
            other => {
                if let Some(slot) = flat.iter_mut().find(|(_, t)| *t == other) {
                    slot.0 += w;
                } else {
                    flat.push((w, other));
                }
            }
        }
    }
    if flat.len() > 1 {
        if let VectorShape::Histogram(first) = &flat[0].1 {
            let same_grid = flat
                .iter()
                .all(|(_, s)| matches!(s, VectorShape::Histogram(h) if h.edges == first.edges));
            if same_grid {
                let total: f64 = flat.iter().map(|p| p.0).sum();
                let mut values = vec![0.0; first.values.len()];
                for (w, s) in &flat {
                    if let VectorShape::Histogram(h) = s {
                        for (acc, v) in values.iter_mut().zip(&h.values) {
                            *acc += w / total * v;
                        }
                    }
                }
                let edges = first.edges.clone();
                return VectorShape::Histogram(HistogramGrid::new(edges, values).expect("combined grid is valid"));
            }
        }
    }
    if flat.len() == 1 {
        return flat.pop().expect("one component").1;
    }
    VectorShape::Mixture(flat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorAtom {
    pub labels: Vec<Label>,
    pub mass: f64,
    pub shape: VectorShape,
}

/// Distribution of `(X^d, Y^d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPairVectorDistribution {
    dim: usize,
    atoms: Vec<VectorAtom>,
    cumulative: Vec<f64>,
}

impl MixedPairVectorDistribution {
    pub fn new(atoms: Vec<VectorAtom>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidDistribution("no atoms".into()))?;
        let dim = first.labels.len();
        if dim == 0 {
            return Err(Error::InvalidDistribution("dimension must be at least 1".into()));
        }
        let mut seen = HashSet::new();
        let mut total = 0.0;
        for a in &atoms {
            if a.labels.len() != dim || a.shape.dim() != dim {
                return Err(Error::InvalidDistribution(format!(
                    "atom {:?} does not have dimension {dim}",
                    a.labels
                )));
            }
            if !seen.insert(a.labels.clone()) {
                return Err(Error::InvalidDistribution(format!("duplicate label vector {:?}", a.labels)));
            }
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::InvalidDistribution(format!("atom {:?} has mass {}", a.labels, a.mass)));
            }
            a.shape.validate()?;
            total += a.mass;
        }
        if (total - 1.0).abs() > ANALYTIC_NORM_TOL {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}, expected 1")));
        }
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|a| {
                acc += a.mass;
                acc
            })
            .collect();
        Ok(MixedPairVectorDistribution { dim, atoms, cumulative })
    }

    pub fn from_scalar(dist: &MixedPairDistribution) -> Self {
        Self::independent(std::slice::from_ref(dist))
    }

    /// Joint law of independent mixed pairs.
    pub fn independent(parts: &[MixedPairDistribution]) -> Self {
        let mut atoms = vec![VectorAtom {
            labels: Vec::new(),
            mass: 1.0,
            shape: VectorShape::Product(Vec::new()),
        }];
        for part in parts {
            let mut next = Vec::with_capacity(atoms.len() * part.len());
            for a in &atoms {
                for b in part.atoms() {
                    let mut labels = a.labels.clone();
                    labels.push(b.label.clone());
                    let VectorShape::Product(mut f) = a.shape.clone() else {
                        unreachable!()
                    };
                    f.push(b.sub.shape.clone());
                    next.push(VectorAtom {
                        labels,
                        mass: a.mass * b.sub.mass,
                        shape: VectorShape::Product(f),
                    });
                }
            }
            atoms = next;
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        for a in &mut atoms {
            a.mass /= total;
        }
        Self::new(atoms).expect("product of valid distributions is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[VectorAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `g_x(y)` for atom `i`.
    pub fn sub_density(&self, i: usize, y: &[f64]) -> f64 {
        let a = &self.atoms[i];
        a.mass * a.shape.pdf(y)
    }

    /// `g(y) = Σ_x g_x(y)`.
    pub fn marginal_density(&self, y: &[f64]) -> f64 {
        self.atoms.iter().map(|a| a.mass * a.shape.pdf(y)).sum()
    }

    /// Law of the sub-vector of coordinates `coords`, obtained by summing
    /// labels and integrating out the continuous coordinates.
    pub fn marginal(&self, coords: &[usize]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty coordinate set".into()));
        }
        let mut seen = HashSet::new();
        for &c in coords {
            if c >= self.dim {
                return Err(Error::IndexOutOfRange { index: c, len: self.dim });
            }
            if !seen.insert(c) {
                return Err(Error::InvalidArgument(format!("coordinate {c} repeated")));
            }
        }
        type Group = (Vec<Label>, Vec<(f64, VectorShape)>);
        let mut groups: Vec<Group> = Vec::new();
        for a in &self.atoms {
            let labels: Vec<Label> = coords.iter().map(|&c| a.labels[c].clone()).collect();
            let shape = a.shape.marginal(coords)?;
            match groups.iter_mut().find(|g| g.0 == labels) {
                Some(g) => g.1.push((a.mass, shape)),
                None => groups.push((labels, vec![(a.mass, shape)])),
            }
        }
        let atoms = groups
            .into_iter()
            .map(|(labels, parts)| {
                let mass: f64 = parts.iter().map(|p| p.0).sum();
                let parts = parts.into_iter().map(|(w, s)| (w / mass, s)).collect();
                VectorAtom {
                    labels,
                    mass,
                    shape: simplify(parts),
                }
            })
            .collect();
        Self::new(atoms)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<f64>) {
        let u = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
        (i, self.atoms[i].shape.sample(rng))
    }

    /// Nested quadrature of `integrand(y, g_x(y))` over the support of atom `i`.
    pub fn integrate_atom<F: Fn(&[f64], f64) -> f64>(&self, i: usize, integrand: F, opts: QuadOptions) -> Result<Estimate> {
        if self.dim > MAX_QUADRATURE_DIM {
            return Err(Error::DimensionLimit {
                dim: self.dim,
                max: MAX_QUADRATURE_DIM,
            });
        }
        let a = &self.atoms[i];
        let breaks = |k: usize, p: &[f64]| a.shape.breaks(k, p);
        let f = |y: &[f64]| integrand(y, a.mass * a.shape.pdf(y));
        Ok(quadrature::integrate_nested(self.dim, &breaks, &f, opts))
    }

    /// Breakpoints of axis `k` over all atoms.
    fn union_breaks(&self, k: usize, prefix: &[f64]) -> Vec<f64> {
        let mut b: Vec<f64> = self.atoms.iter().flat_map(|a| a.shape.breaks(k, prefix)).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `E[h(Y, g(Y))]` under the marginal density `g`, by nested quadrature
    /// up to [`MAX_QUADRATURE_DIM`] and by seeded Monte Carlo above.
    pub fn expect_over_marginal<F: Fn(&[f64], f64) -> f64>(&self, h: F) -> Result<f64> {
        if self.dim > MAX_QUADRATURE_DIM {
            let mut rng = StreamRng::seed_from_u64(0);
            let mut mean = 0.0;
            for n in 1..=FALLBACK_SAMPLES {
                let (_, y) = self.sample(&mut rng);
                let v = h(&y, self.marginal_density(&y));
                mean += (v - mean) / n as f64;
            }
            return Ok(mean);
        }
        let breaks = |k: usize, p: &[f64]| self.union_breaks(k, p);
        let f = |y: &[f64]| {
            let g = self.marginal_density(y);
            if g > 0.0 {
                h(y, g) * g
            } else {
                0.0
            }
        };
        Ok(quadrature::integrate_nested(self.dim, &breaks, &f, QuadOptions::with_tol(1e-9)).value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{inject_continuous, inject_discrete};
    use approx::assert_abs_diff_eq;

    fn u01() -> MixedPairDistribution {
        inject_continuous(DensitySpec::unit_uniform()).unwrap()
    }

    #[test]
    fn independent_product_masses_and_density() {
        let coin = inject_discrete(&[(0.into(), 0.5), (1.into(), 0.5)]).unwrap();
        let u02 = inject_continuous(DensitySpec::uniform(0.0, 2.0).unwrap()).unwrap();
        let v = MixedPairVectorDistribution::independent(&[coin, u02]);
        assert_eq!(v.dim(), 2);
        assert_eq!(v.len(), 2);
        assert_abs_diff_eq!(v.marginal_density(&[0.5, 1.5]), 0.5, epsilon = 1e-15);
        let total = v.expect_over_marginal(|_, _| 1.0).unwrap();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn histogram_marginals_and_normalization() {
        let edges = vec![vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 3.0]];
        let h = HistogramGrid::from_weights(edges, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_abs_diff_eq!(h.total(), 1.0, epsilon = 1e-14);
        let m0 = h.marginal(&[0]).unwrap();
        assert_abs_diff_eq!(m0.values()[0] * 0.5, 0.3, epsilon = 1e-14);
        let m1 = h.marginal(&[1]).unwrap();
        assert_abs_diff_eq!(m1.values()[1] * 2.0, 0.6, epsilon = 1e-14);
        assert_eq!(h.pdf(&[2.0, 0.5]), 0.0);
        assert_abs_diff_eq!(h.pdf(&[0.75, 2.0]), 0.4 / (0.5 * 2.0), epsilon = 1e-14);
    }

    #[test]
    fn marginal_merges_atoms() {
        let coin = inject_discrete(&[(0.into(), 0.5), (1.into(), 0.5)]).unwrap();
        let v = MixedPairVectorDistribution::independent(&[coin.clone(), coin]);
        let m = v.marginal(&[1]).unwrap();
        assert_eq!(m.len(), 2);
        for a in m.atoms() {
            assert_abs_diff_eq!(a.mass, 0.5, epsilon = 1e-15);
            assert_eq!(a.shape, VectorShape::Product(vec![DensitySpec::unit_uniform()]));
        }
        assert!(v.marginal(&[2]).is_err());
        assert!(v.marginal(&[0, 0]).is_err());
    }

    #[test]
    fn ordered_shape_integrates_to_one() {
        let base = DensitySpec::exponential(1.0).unwrap();
        let v = MixedPairVectorDistribution::new(vec![VectorAtom {
            labels: vec![Label::constant(), Label::constant()],
            mass: 1.0,
            shape: VectorShape::OrderedIid { base, dim: 2 },
        }])
        .unwrap();
        assert_abs_diff_eq!(v.expect_over_marginal(|_, _| 1.0).unwrap(), 1.0, epsilon = 1e-8);
        assert_eq!(v.marginal_density(&[0.5, 0.2]), 0.0);
    }

    #[test]
    fn high_dimension_falls_back_to_sampling() {
        let parts: Vec<_> = (0..5).map(|_| u01()).collect();
        let v = MixedPairVectorDistribution::independent(&parts);
        let m = v.expect_over_marginal(|y, _| y[0]).unwrap();
        assert!((m - 0.5).abs() < 0.01);
        assert!(matches!(
            v.integrate_atom(0, |_, g| g, QuadOptions::default()),
            Err(Error::DimensionLimit { .. })
        ));
    }

    #[test]
    fn sampling_is_seeded() {
        let coin = inject_discrete(&[(0.into(), 0.5), (1.into(), 0.5)]).unwrap();
        let v = MixedPairVectorDistribution::independent(&[coin, u01()]);
        let mut a = crate::rng::seeded(9);
        let mut b = crate::rng::seeded(9);
        for _ in 0..10 {
            assert_eq!(v.sample(&mut a), v.sample(&mut b));
        }
    }
}
