use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Nodes and positive weights for an integral over an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl IntervalQuadrature {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return invalid("quadrature needs equal, nonzero numbers of nodes and weights");
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return invalid("quadrature weights must be positive");
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// True when the node set is closed under `u -> -u` with matching weights.
    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            let j = n - 1 - i;
            (self.nodes[i] + self.nodes[j]).abs() <= 1e-14 * (1.0 + self.nodes[i].abs())
                && (self.weights[i] - self.weights[j]).abs() <= 1e-14 * self.weights[i]
        })
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * pn - p0) / (x * x - 1.0)
    };
    (pn, dp)
}

/// `n`-point Gauss–Legendre rule on `[a, b]`, exact through degree `2n - 1`.
///
/// Nodes come from Newton iteration on `P_n` started at the Tricomi
/// approximation; nodes are returned in ascending order.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<IntervalQuadrature> {
    if n == 0 {
        return invalid("gauss_legendre needs at least one node");
    }
    if !(a < b) {
        return invalid(format!("gauss_legendre interval [{a}, {b}] is empty"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[n - 1 - i] = mid + half * x;
        weights[n - 1 - i] = half * w;
        nodes[i] = mid - half * x;
        weights[i] = half * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = mid;
    }
    IntervalQuadrature::new(nodes, weights)
}

/// Gauss–Legendre with `n` nodes on each panel between consecutive breakpoints.
pub fn composite_gauss_legendre(breakpoints: &[f64], n: usize) -> Result<IntervalQuadrature> {
    if breakpoints.len() < 2 {
        return invalid("composite rule needs at least two breakpoints");
    }
    let mut nodes = Vec::with_capacity(n * (breakpoints.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breakpoints.windows(2) {
        let panel = gauss_legendre(n, pair[0], pair[1])?;
        nodes.extend_from_slice(panel.nodes());
        weights.extend_from_slice(panel.weights());
    }
    IntervalQuadrature::new(nodes, weights)
}

/// Equispaced trapezoid rule on the unit circle (arc-length measure).
#[derive(Debug, Clone, PartialEq)]
pub struct CircleQuadrature {
    angles: Vec<f64>,
    weight: f64,
}

impl CircleQuadrature {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return invalid("circle quadrature needs at least one node");
        }
        let weight = 2.0 * PI / node_count as f64;
        let angles = (0..node_count).map(|m| m as f64 * weight).collect();
        Ok(Self { angles, weight })
    }

    pub fn node_count(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.angles.iter().map(|&t| f(t)).sum::<f64>() * self.weight
    }
}

/// Product rule for the ball `B^k(radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallQuadrature {
    dimension: usize,
    radius: f64,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl BallQuadrature {
    pub fn new(radius: f64, nodes: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if !(radius > 0.0) {
            return invalid("ball radius must be positive");
        }
        if nodes.is_empty() || nodes.len() != weights.len() {
            return invalid("ball quadrature needs equal, nonzero numbers of nodes and weights");
        }
        let dimension = nodes[0].len();
        if dimension == 0 || nodes.iter().any(|u| u.len() != dimension) {
            return invalid("ball nodes must share a positive dimension");
        }
        let slack = radius * (1.0 + 1e-12);
        if nodes.iter().any(|u| norm(u) > slack) {
            return invalid("ball node lies outside the ball");
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return invalid("ball weights must be positive");
        }
        Ok(Self {
            dimension,
            radius,
            nodes,
            weights,
        })
    }

    /// The one-dimensional ball `[-radius, radius]` with Gauss–Legendre nodes.
    pub fn interval(radius: f64, n: usize) -> Result<Self> {
        let q = gauss_legendre(n, -radius, radius)?;
        Self::from_interval(radius, &q)
    }

    pub fn from_interval(radius: f64, quad: &IntervalQuadrature) -> Result<Self> {
        Self::new(
            radius,
            quad.nodes().iter().map(|&u| vec![u]).collect(),
            quad.weights().to_vec(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Exact volume of the ball.
    pub fn volume(&self) -> f64 {
        ball_volume(self.dimension, self.radius)
    }
}

/// Volume of `B^k(r)` via `V_k = 2 pi r^2 / k * V_{k-2}`.
pub(crate) fn ball_volume(k: usize, r: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0 * r,
        _ => 2.0 * PI * r * r / k as f64 * ball_volume(k - 2, r),
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Polar product rule on the disk `B^2(epsilon)`: Gauss–Legendre in the radius
/// (carrying the Jacobian `r`) times the trapezoid rule in angle.
pub fn disk_quadrature(
    epsilon: f64,
    radial_count: usize,
    angular_count: usize,
) -> Result<BallQuadrature> {
    if radial_count < 4 || angular_count < 4 {
        return invalid("disk quadrature needs at least 4 radial and 4 angular nodes");
    }
    let radial = gauss_legendre(radial_count, 0.0, epsilon)?;
    let circle = CircleQuadrature::new(angular_count)?;
    let mut nodes = Vec::with_capacity(radial_count * angular_count);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (&r, &wr) in radial.nodes().iter().zip(radial.weights()) {
        for &theta in circle.angles() {
            nodes.push(vec![r * theta.cos(), r * theta.sin()]);
            weights.push(wr * r * circle.weight());
        }
    }
    BallQuadrature::new(epsilon, nodes, weights)
}

/// Kronrod abscissae of the 7/15-point Gauss–Kronrod pair on `[-1, 1]`
/// (non-negative half, descending).
const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_panel<F>(f: &F, a: f64, b: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in GK15_NODES.iter().zip(&GK15_WEIGHTS).enumerate() {
        let pair = if x == 0.0 {
            f(mid)
        } else {
            f(mid - half * x) + f(mid + half * x)
        };
        kronrod += pair * wk;
        if i % 2 == 1 {
            gauss += pair * G7_WEIGHTS[i / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

/// Adaptive Gauss–Kronrod integration of a complex integrand on `[a, b]`.
///
/// Panels are bisected until each meets its share of `max(abs_tol,
/// rel_tol |I|)`; returns the integral and the summed error estimate. Fails
/// with [`Error::Resolution`] once `max_panels` is exhausted.
pub fn adaptive_gauss_kronrod<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    if !(a < b) {
        return invalid(format!("integration interval [{a}, {b}] is empty"));
    }
    let (first, first_err) = gauss_kronrod_panel(&f, a, b);
    // panels are kept in left-to-right order so the final sum is deterministic
    let mut panels = vec![(a, b, first, first_err)];
    loop {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if error <= target {
            return Ok((total, error));
        }
        if panels.len() >= max_panels {
            return Err(Error::Resolution {
                what: "adaptive quadrature",
                achieved: error,
                required: target,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = panels[worst];
        let mid = 0.5 * (lo + hi);
        let (left, left_err) = gauss_kronrod_panel(&f, lo, mid);
        let (right, right_err) = gauss_kronrod_panel(&f, mid, hi);
        panels[worst] = (lo, mid, left, left_err);
        panels.insert(worst + 1, (mid, hi, right, right_err));
    }
}
