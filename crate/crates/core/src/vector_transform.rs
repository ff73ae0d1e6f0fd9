//! Piecewise diffeomorphisms between spaces of mixed-pair vectors and the
//! unit-Jacobian certification.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::distribution::Label;
use crate::error::{Error, Result};

/// Allowed `||det J| - 1|` for certification.
pub const UNIT_JACOBIAN_TOL: f64 = 1e-6;
/// Determinants below this are reported as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
const ROUNDTRIP_TOL: f64 = 1e-9;

type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Where a piece applies.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorDomain {
    All,
    /// Closed box, one `(lo, hi)` per coordinate.
    Box(Vec<(f64, f64)>),
    /// `y[order[0]] <= y[order[1]] <= …`.
    Sorted(Vec<usize>),
}

impl VectorDomain {
    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            VectorDomain::All => true,
            VectorDomain::Box(b) => b.iter().zip(y).all(|(&(lo, hi), &v)| lo <= v && v <= hi),
            VectorDomain::Sorted(order) => order.windows(2).all(|w| y[w[0]] <= y[w[1]]),
        }
    }
}

#[derive(Clone)]
pub enum VectorTransform {
    /// `A y + b`, with `A^{-1}` kept for the inverse.
    Linear {
        matrix: DMatrix<f64>,
        offset: DVector<f64>,
        inverse: DMatrix<f64>,
    },
    /// `out[k] = y[perm[k]]`.
    Permutation(Vec<usize>),
    /// Arbitrary evaluators; the Jacobian falls back to central differences.
    Custom {
        forward: VecFn,
        inverse: VecFn,
        jacobian: Option<JacFn>,
    },
}

impl fmt::Debug for VectorTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorTransform::Linear { matrix, offset, .. } => f
                .debug_struct("Linear")
                .field("matrix", matrix)
                .field("offset", offset)
                .finish(),
            VectorTransform::Permutation(p) => f.debug_tuple("Permutation").field(p).finish(),
            VectorTransform::Custom { jacobian, .. } => f
                .debug_struct("Custom")
                .field("analytic_jacobian", &jacobian.is_some())
                .finish(),
        }
    }
}

impl VectorTransform {
    pub fn linear(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != offset.len() {
            return Err(Error::InvalidMap("linear map must be square and match its offset".into()));
        }
        let inverse = matrix
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::NotBijective("singular linear map".into()))?;
        Ok(VectorTransform::Linear { matrix, offset, inverse })
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::linear(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]), DVector::zeros(2)).expect("rotations are invertible")
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::linear(DMatrix::from_diagonal(&DVector::from_column_slice(d)), DVector::zeros(d.len()))
    }

    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidMap(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(VectorTransform::Permutation(perm))
    }

    pub fn custom(
        forward: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        inverse: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        VectorTransform::Custom {
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
            jacobian: None,
        }
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        match self {
            VectorTransform::Linear { matrix, offset, .. } => {
                (matrix * DVector::from_column_slice(y) + offset).as_slice().to_vec()
            }
            VectorTransform::Permutation(p) => p.iter().map(|&k| y[k]).collect(),
            VectorTransform::Custom { forward, .. } => forward(y),
        }
    }

    pub fn eval_inverse(&self, z: &[f64]) -> Vec<f64> {
        match self {
            VectorTransform::Linear { offset, inverse, .. } => {
                (inverse * (DVector::from_column_slice(z) - offset)).as_slice().to_vec()
            }
            VectorTransform::Permutation(p) => {
                let mut y = vec![0.0; p.len()];
                for (k, &src) in p.iter().enumerate() {
                    y[src] = z[k];
                }
                y
            }
            VectorTransform::Custom { inverse, .. } => inverse(z),
        }
    }

    /// `J = [∂z_k / ∂y_l]`.
    pub fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        match self {
            VectorTransform::Linear { matrix, .. } => matrix.clone(),
            VectorTransform::Permutation(p) => {
                let mut j = DMatrix::zeros(p.len(), p.len());
                for (k, &src) in p.iter().enumerate() {
                    j[(k, src)] = 1.0;
                }
                j
            }
            VectorTransform::Custom {
                jacobian: Some(jac), ..
            } => jac(y),
            VectorTransform::Custom { forward, .. } => {
                let d = y.len();
                let mut j = DMatrix::zeros(d, d);
                let mut p = y.to_vec();
                for l in 0..d {
                    let h = 1e-6 * y[l].abs().max(1.0);
                    p[l] = y[l] + h;
                    let up = forward(&p);
                    p[l] = y[l] - h;
                    let down = forward(&p);
                    p[l] = y[l];
                    for k in 0..d {
                        j[(k, l)] = (up[k] - down[k]) / (2.0 * h);
                    }
                }
                j
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct VectorPiece {
    pub input: Vec<Label>,
    pub domain: VectorDomain,
    pub output: Vec<Label>,
    pub transform: VectorTransform,
}

#[derive(Debug, Clone)]
pub struct VectorMixedPairMap {
    dim: usize,
    pieces: Vec<VectorPiece>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularPoint {
    pub labels: Vec<Label>,
    pub y: Vec<f64>,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianReport {
    pub certified: bool,
    pub probes: usize,
    pub worst_deviation: f64,
    pub worst_det: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_labels: Option<Vec<Label>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_y: Option<Vec<f64>>,
    pub singular: Vec<SingularPoint>,
    pub max_roundtrip_error: f64,
}

impl VectorMixedPairMap {
    pub fn new(pieces: Vec<VectorPiece>) -> Result<Self> {
        let dim = pieces
            .first()
            .ok_or_else(|| Error::InvalidMap("no pieces".into()))?
            .input
            .len();
        for p in &pieces {
            if p.input.len() != dim || p.output.len() != dim {
                return Err(Error::InvalidMap("label vectors must share one dimension".into()));
            }
            let bad = match &p.transform {
                VectorTransform::Linear { matrix, .. } => matrix.nrows() != dim,
                VectorTransform::Permutation(perm) => perm.len() != dim,
                VectorTransform::Custom { .. } => false,
            };
            let bad_domain = match &p.domain {
                VectorDomain::Box(b) => b.len() != dim || b.iter().any(|&(lo, hi)| !(lo < hi)),
                VectorDomain::Sorted(o) => o.len() != dim || o.iter().any(|&k| k >= dim),
                VectorDomain::All => false,
            };
            if bad || bad_domain {
                return Err(Error::InvalidMap(format!("piece for {:?} has the wrong dimension", p.input)));
            }
        }
        Ok(VectorMixedPairMap { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[VectorPiece] {
        &self.pieces
    }

    pub fn apply(&self, labels: &[Label], y: &[f64]) -> Result<(Vec<Label>, Vec<f64>)> {
        let p = self
            .pieces
            .iter()
            .find(|p| p.input == labels && p.domain.contains(y))
            .ok_or_else(|| Error::OutsideDomain {
                label: labels.first().cloned().unwrap_or(Label::Int(0)),
                y: y.first().copied().unwrap_or(f64::NAN),
            })?;
        Ok((p.output.clone(), p.transform.eval(y)))
    }

    /// Finds the piece whose image contains `(labels, z)` and inverts it.
    pub fn apply_inverse(&self, labels: &[Label], z: &[f64]) -> Result<(Vec<Label>, Vec<f64>)> {
        for p in self.pieces.iter().filter(|p| p.output == labels) {
            let y = p.transform.eval_inverse(z);
            if p.domain.contains(&y) {
                return Ok((p.input.clone(), y));
            }
        }
        Err(Error::OutsideDomain {
            label: labels.first().cloned().unwrap_or(Label::Int(0)),
            y: z.first().copied().unwrap_or(f64::NAN),
        })
    }

    /// Probe points of a piece: a tensor grid with `per_axis` points per
    /// coordinate on its box (or `[-3, 3]^d`), rearranged into sorted
    /// domains.
    fn probes(&self, piece: &VectorPiece, per_axis: usize) -> Vec<Vec<f64>> {
        let d = self.dim;
        let bounds: Vec<(f64, f64)> = match &piece.domain {
            VectorDomain::Box(b) => b.clone(),
            _ => vec![(-3.0, 3.0); d],
        };
        let total = per_axis.pow(d as u32);
        (0..total)
            .map(|mut c| {
                let mut y = vec![0.0; d];
                for k in (0..d).rev() {
                    let i = c % per_axis;
                    c /= per_axis;
                    let (lo, hi) = bounds[k];
                    // Irrational offsets avoid landing exactly on ties.
                    let t = (i as f64 + 0.5 + 0.1 * std::f64::consts::FRAC_1_SQRT_2 * (k as f64 + 1.0).sin()) / per_axis as f64;
                    y[k] = lo + t * (hi - lo);
                }
                if let VectorDomain::Sorted(order) = &piece.domain {
                    let mut vals = y.clone();
                    vals.sort_by(f64::total_cmp);
                    for (rank, &k) in order.iter().enumerate() {
                        y[k] = vals[rank];
                    }
                }
                y
            })
            .collect()
    }

    /// Checks `|det J| = 1` and forward-inverse round trips on a probe grid.
    pub fn unit_jacobian_check(&self, per_axis: usize) -> JacobianReport {
        let mut report = JacobianReport {
            certified: true,
            probes: 0,
            worst_deviation: 0.0,
            worst_det: 1.0,
            worst_labels: None,
            worst_y: None,
            singular: Vec::new(),
            max_roundtrip_error: 0.0,
        };
        for piece in &self.pieces {
            for y in self.probes(piece, per_axis) {
                report.probes += 1;
                let det = piece.transform.jacobian(&y).determinant();
                if !(det.abs() >= SINGULAR_TOL) {
                    report.singular.push(SingularPoint {
                        labels: piece.input.clone(),
                        y: y.clone(),
                        det,
                    });
                }
                let dev = (det.abs() - 1.0).abs();
                let dev = if dev.is_finite() { dev } else { f64::INFINITY };
                if dev > report.worst_deviation || report.worst_labels.is_none() {
                    report.worst_deviation = dev;
                    report.worst_det = det;
                    report.worst_labels = Some(piece.input.clone());
                    report.worst_y = Some(y.clone());
                }
                let z = piece.transform.eval(&y);
                let back = match self.apply_inverse(&piece.output, &z) {
                    Ok((labels, yb)) if labels == piece.input => {
                        yb.iter().zip(&y).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max)
                    }
                    _ => f64::INFINITY,
                };
                report.max_roundtrip_error = report.max_roundtrip_error.max(back);
            }
        }
        report.certified = report.worst_deviation <= UNIT_JACOBIAN_TOL
            && report.singular.is_empty()
            && report.max_roundtrip_error <= ROUNDTRIP_TOL;
        report
    }
}

/// `(Y_1, …, Y_n) ↦` sorted coordinates plus the rank pattern folded into
/// the label of the first coordinate: one piece per ordering of the input.
pub fn sorting_map(n: usize, label: Label) -> Result<VectorMixedPairMap> {
    let mut pieces = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut index = 0i64;
    loop {
        let mut output = vec![label.clone(); n];
        output[0] = Label::Int(index);
        pieces.push(VectorPiece {
            input: vec![label.clone(); n],
            domain: VectorDomain::Sorted(perm.clone()),
            output,
            transform: VectorTransform::permutation(perm.clone())?,
        });
        index += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    VectorMixedPairMap::new(pieces)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
