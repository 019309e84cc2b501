use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{BallQuadrature, IntervalQuadrature};

/// Allowed `|sum_m w_m F(u_m) - swapped|` relative to `max(1, swapped)`.
pub const FUBINI_TOLERANCE: f64 = 1e-8;

/// A curve `H` with its own arc-length quadrature, or a single point
/// carrying counting measure.
#[derive(Clone)]
pub enum Curve {
    Point(Vec<f64>),
    Parametric {
        point: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
        speed: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        /// Nodes in `[0, 1]`.
        quad: IntervalQuadrature,
    },
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::Point(p) => f.debug_tuple("Point").field(p).finish(),
            Curve::Parametric { quad, .. } => f
                .debug_struct("Parametric")
                .field("nodes", &quad.len())
                .finish_non_exhaustive(),
        }
    }
}

impl Curve {
    pub fn point(x: Vec<f64>) -> Self {
        Curve::Point(x)
    }

    pub fn parametric(
        point: Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>,
        speed: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        quad: IntervalQuadrature,
    ) -> Result<Self> {
        if quad.nodes().iter().any(|t| !(0.0..=1.0).contains(t)) {
            return invalid("curve quadrature nodes must lie in [0, 1]");
        }
        if quad.nodes().iter().any(|&t| !(speed(t) > 0.0)) {
            return invalid("curve speed must be positive");
        }
        Ok(Curve::Parametric { point, speed, quad })
    }

    /// Straight segment from `a` to `b`.
    pub fn segment(a: Vec<f64>, b: Vec<f64>, quad: IntervalQuadrature) -> Result<Self> {
        if a.len() != b.len() {
            return invalid("segment endpoints differ in dimension");
        }
        let len = a
            .iter()
            .zip(&b)
            .map(|(p, q)| (q - p).powi(2))
            .sum::<f64>()
            .sqrt();
        if !(len > 0.0) {
            return invalid("segment has zero length");
        }
        Self::parametric(
            Arc::new(move |t| a.iter().zip(&b).map(|(p, q)| p + t * (q - p)).collect()),
            Arc::new(move |_| len),
            quad,
        )
    }

    /// Points of `H` with their `d sigma` weights.
    pub fn samples(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            Curve::Point(p) => vec![(p.clone(), 1.0)],
            Curve::Parametric { point, speed, quad } => quad
                .nodes()
                .iter()
                .zip(quad.weights())
                .map(|(&t, &w)| (point(t), w * speed(t)))
                .collect(),
        }
    }

    /// Total measure of `H`: its length, or 1 for a point.
    pub fn measure(&self) -> f64 {
        self.samples().iter().map(|s| s.1).sum()
    }

    /// Largest distance between neighbouring nodes, endpoints included.
    pub fn max_spacing(&self) -> f64 {
        let Curve::Parametric { point, quad, .. } = self else {
            return 0.0;
        };
        let mut ts: Vec<f64> = quad.nodes().to_vec();
        ts.sort_by(f64::total_cmp);
        ts.insert(0, 0.0);
        ts.push(1.0);
        ts.windows(2)
            .map(|w| {
                let (p, q) = (point(w[0]), point(w[1]));
                p.iter()
                    .zip(&q)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `int_H |state|^2 d sigma`.
///
/// The node spacing must not exceed `h / (4 K)` with `K` a bound on the
/// state's local wavenumber `|xi|`.
pub fn restriction_integral(
    state: impl Fn(&[f64]) -> Complex64,
    curve: &Curve,
    hbar: f64,
    wavenumber_bound: f64,
) -> Result<f64> {
    if wavenumber_bound > 0.0 {
        let required = hbar / (4.0 * wavenumber_bound);
        let achieved = curve.max_spacing();
        if achieved > required {
            return Err(Error::Resolution {
                what: "curve node spacing",
                achieved,
                required,
            });
        }
    }
    let mut total = 0.0;
    for (j, (p, w)) in curve.samples().iter().enumerate() {
        let v = state(p).norm_sqr();
        if !v.is_finite() {
            return Err(Error::NonFinite { node: j });
        }
        total += w * v;
    }
    Ok(total)
}

/// Both orders of `int_B int_H |phi^(u)|^2 d sigma du`.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedIntegrals {
    /// `F(u_m) = int_H |phi^(u_m)|^2 d sigma`.
    pub per_u: Vec<f64>,
    /// `int_H (sum_m w_m |phi^(u_m)|^2) d sigma`.
    pub swapped: f64,
}

/// `intensities[m][j]` is `|phi^(u_m)|^2` at the `j`-th sample of the curve.
pub fn iterated_both_orders(
    intensities: &[Vec<f64>],
    u_weights: &[f64],
    curve: &Curve,
) -> Result<IteratedIntegrals> {
    let sigma: Vec<f64> = curve.samples().into_iter().map(|s| s.1).collect();
    if intensities.len() != u_weights.len() || intensities.iter().any(|r| r.len() != sigma.len()) {
        return invalid("intensity table does not match the quadratures");
    }
    let per_u = intensities
        .iter()
        .map(|row| row.iter().zip(&sigma).map(|(v, s)| v * s).sum())
        .collect();
    let swapped = sigma
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let inner: f64 = intensities
                .iter()
                .zip(u_weights)
                .map(|(row, w)| w * row[j])
                .sum();
            s * inner
        })
        .sum();
    Ok(IteratedIntegrals { per_u, swapped })
}

/// `|sum_m w_m F(u_m) - swapped|`, rejected beyond [`FUBINI_TOLERANCE`].
pub fn fubini_check(per_u: &[f64], quad: &BallQuadrature, swapped: f64) -> Result<f64> {
    if per_u.len() != quad.len() {
        return invalid("one value per parameter node is required");
    }
    let iterated: f64 = per_u.iter().zip(quad.weights()).map(|(f, w)| f * w).sum();
    let gap = (iterated - swapped).abs();
    let allowed = FUBINI_TOLERANCE * swapped.abs().max(1.0);
    if gap > allowed {
        return Err(Error::OrderSwap { gap, allowed });
    }
    Ok(gap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionReport {
    pub per_u_values: Vec<f64>,
    pub weights: Vec<f64>,
    /// `sum_m w_m F(u_m)`.
    pub iterated_value: f64,
    pub omega: f64,
    /// `(weighted mean of F) / omega`.
    pub threshold: f64,
    /// Weight of `{F <= threshold}` over the total weight.
    pub good_fraction: f64,
    pub total_weight: f64,
}

impl RestrictionReport {
    /// Markov's inequality: the good set has relative weight at least `1 - omega`.
    pub fn markov_holds(&self) -> bool {
        self.good_fraction >= 1.0 - self.omega
    }
}

/// The good set `{u : F(u) <= mean / omega}` and its relative weight.
pub fn good_set_fraction(per_u: &[f64], weights: &[f64], omega: f64) -> Result<RestrictionReport> {
    if !(omega > 0.0 && omega < 1.0) {
        return invalid(format!("omega must lie in (0, 1), got {omega}"));
    }
    if per_u.len() != weights.len() || per_u.is_empty() {
        return invalid("one weight per value is required");
    }
    if per_u.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
        return invalid("restriction values must be finite and nonnegative");
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return invalid("weights must be positive");
    }
    let total_weight: f64 = weights.iter().sum();
    let iterated_value: f64 = per_u.iter().zip(weights).map(|(f, w)| f * w).sum();
    let threshold = iterated_value / total_weight / omega;
    let good: f64 = per_u
        .iter()
        .zip(weights)
        .filter(|(f, _)| **f <= threshold)
        .map(|(_, w)| w)
        .sum();
    Ok(RestrictionReport {
        per_u_values: per_u.to_vec(),
        weights: weights.to_vec(),
        iterated_value,
        omega,
        threshold,
        good_fraction: good / total_weight,
        total_weight,
    })
}
