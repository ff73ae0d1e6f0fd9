//! Adaptive Gauss-Legendre quadrature.
//!
//! Each panel is integrated with a fixed 10-point Gauss-Legendre rule and
//! compared against the same rule applied to its two halves; the difference
//! is the panel error estimate. Panels are refined globally, largest error
//! first, until the summed estimate drops below the absolute tolerance.
//!
//! Integrals over unbounded ranges are handled by [`integrate_tail`], which
//! integrates geometrically growing shells and decides convergence or
//! divergence from the size of the last shell.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Panel order.
pub const ORDER: usize = 10;

/// Default absolute tolerance per integral.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Radius beyond which an unconverged tail integral is declared divergent.
pub const MAX_TAIL_RADIUS: f64 = 1e8;

/// Relative size of the final tail shell above which the integral diverges.
pub const DIVERGENCE_RATIO: f64 = 1e-6;

/// Value and absolute error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate::new(self.value + rhs.value, self.error + rhs.error)
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::default(), |a, b| a + b)
    }
}

/// Refinement controls.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: DEFAULT_TOL,
            max_panels: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            ..Default::default()
        }
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// One application of the panel rule on [a, b].
pub fn panel<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        s += w * f(mid + half * x);
    }
    s * half
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, whole: f64) -> Panel {
        let m = 0.5 * (a + b);
        let left = panel(f, a, m);
        let right = panel(f, m, b);
        let error = (whole - (left + right)).abs();
        Panel {
            a,
            b,
            left,
            right,
            error,
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integral of `f` over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, opts: QuadOptions) -> Estimate {
    if !(b > a) {
        return Estimate::default();
    }
    let whole = panel(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel::new(f, a, b, whole));
    let mut panels = 1usize;
    let mut total_err = heap.peek().map_or(0.0, |p| p.error);
    loop {
        if total_err <= opts.abs_tol || panels >= opts.max_panels {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        // Stop refining once panels cannot be halved meaningfully.
        if (worst.b - worst.a) <= 1e-13 * (1.0 + m.abs()) {
            heap.push(worst);
            break;
        }
        let left = Panel::new(f, worst.a, m, worst.left);
        let right = Panel::new(f, m, worst.b, worst.right);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        panels += 1;
    }
    // Sum in positional order so the result does not depend on heap layout.
    let mut parts: Vec<&Panel> = heap.iter().collect();
    parts.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = parts.iter().map(|p| p.value()).sum();
    let error = parts.iter().map(|p| p.error).sum();
    Estimate::new(value, error)
}

/// Integral over consecutive segments of a sorted breakpoint list.
///
/// The tolerance is split across segments in proportion to their length.
pub fn integrate_segments<F: Fn(f64) -> f64 + ?Sized>(f: &F, breaks: &[f64], opts: QuadOptions) -> Estimate {
    if breaks.len() < 2 {
        return Estimate::default();
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    if !(span > 0.0) {
        return Estimate::default();
    }
    breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let share = ((w[1] - w[0]) / span).max(1e-3);
            integrate(f, w[0], w[1], QuadOptions { abs_tol: opts.abs_tol * share, ..opts })
        })
        .sum()
}

/// Direction of a tail integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Upper,
    Lower,
}

/// Integral of `f` over [start, ∞) (or (-∞, start]).
///
/// Shells of doubling width are added until a shell contributes less than
/// 1e-15 of the running total. If the shells reach [`MAX_TAIL_RADIUS`] first,
/// the last shell is taken as the estimate of the remaining tail and the
/// integral is declared divergent when that exceeds [`DIVERGENCE_RATIO`] of
/// the accumulated value.
pub fn integrate_tail<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    start: f64,
    tail: Tail,
    scale: f64,
    opts: QuadOptions,
) -> Result<Estimate> {
    let sign = match tail {
        Tail::Upper => 1.0,
        Tail::Lower => -1.0,
    };
    let mut width = scale.abs().max(1e-12);
    let mut inner = start;
    let mut acc = Estimate::default();
    let mut quiet_shells = 0;
    loop {
        let outer = inner + sign * width;
        let shell = if sign > 0.0 {
            integrate(f, inner, outer, opts)
        } else {
            integrate(f, outer, inner, opts)
        };
        if !shell.value.is_finite() {
            return Err(Error::DivergentIntegral(format!(
                "non-finite contribution on shell ending at {outer:e}"
            )));
        }
        acc = acc + shell;
        let small = shell.value.abs() <= 1e-15 * acc.value.abs().max(1e-300);
        quiet_shells = if small { quiet_shells + 1 } else { 0 };
        if quiet_shells >= 2 {
            return Ok(acc);
        }
        if (outer - start).abs() >= MAX_TAIL_RADIUS {
            if shell.value.abs() > DIVERGENCE_RATIO * acc.value.abs() {
                return Err(Error::DivergentIntegral(format!(
                    "tail beyond radius {MAX_TAIL_RADIUS:e} still contributes {:e}",
                    shell.value
                )));
            }
            acc.error += shell.value.abs();
            return Ok(acc);
        }
        inner = outer;
        width *= 2.0;
    }
}


/// Iterated integral of `f` over a region described axis by axis.
///
/// `breaks(axis, prefix)` returns the sorted breakpoints of coordinate
/// `axis` given the already-fixed leading coordinates `prefix`; the
/// integrand must be smooth between consecutive breakpoints. Inner levels
/// run with a tolerance scaled down by the outer span.
pub fn integrate_nested<B, F>(dim: usize, breaks: &B, f: &F, opts: QuadOptions) -> Estimate
where
    B: Fn(usize, &[f64]) -> Vec<f64> + ?Sized,
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    fn level<B, F>(k: usize, dim: usize, prefix: &[f64], breaks: &B, f: &F, opts: QuadOptions) -> Estimate
    where
        B: Fn(usize, &[f64]) -> Vec<f64> + ?Sized,
        F: Fn(&[f64]) -> f64 + ?Sized,
    {
        let b = breaks(k, prefix);
        if b.len() < 2 {
            return Estimate::default();
        }
        let span = (b[b.len() - 1] - b[0]).max(1.0);
        let mut point = Vec::with_capacity(dim);
        point.extend_from_slice(prefix);
        point.push(0.0);
        if k + 1 == dim {
            let g = |t: f64| {
                let mut p = point.clone();
                p[k] = t;
                f(&p)
            };
            return integrate_segments(&g, &b, opts);
        }
        let inner_opts = QuadOptions {
            abs_tol: 0.1 * opts.abs_tol / span,
            max_panels: (opts.max_panels / 4).max(50),
        };
        let inner_err = std::cell::Cell::new(0.0f64);
        let g = |t: f64| {
            let mut p = point.clone();
            p[k] = t;
            let e = level(k + 1, dim, &p, breaks, f, inner_opts);
            inner_err.set(inner_err.get().max(e.error));
            e.value
        };
        let mut est = integrate_segments(&g, &b, opts);
        est.error += inner_err.get() * (b[b.len() - 1] - b[0]);
        est
    }
    if dim == 0 {
        return Estimate::new(f(&[]), 0.0);
    }
    level(0, dim, &[], breaks, f, opts)
}
