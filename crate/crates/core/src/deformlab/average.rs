use crate::error::{invalid, Error, Result};
use crate::numerics::BallQuadrature;

/// Default bound on `C2 / C1` for a band to count as two-sided.
pub const DEFAULT_BAND_BOUND: f64 = 2.0;

/// `sum_m w_m intensity(u_m)`.
pub fn average_over_ball(intensity: impl Fn(&[f64]) -> f64, quad: &BallQuadrature) -> Result<f64> {
    let mut total = 0.0;
    for (m, (u, w)) in quad.nodes().iter().zip(quad.weights()).enumerate() {
        let v = intensity(u);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: m });
        }
        total += w * v;
    }
    Ok(total)
}

/// Averaged intensities over a set of points at one `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageProfile {
    pub hbar: f64,
    pub x_samples: Vec<f64>,
    pub values: Vec<f64>,
    /// `(min, max)` over the samples.
    pub band: (f64, f64),
}

impl AverageProfile {
    pub fn new(hbar: f64, x_samples: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if x_samples.len() != values.len() || values.is_empty() {
            return invalid("profile needs one value per sample");
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node });
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lo > 0.0) {
            return Err(Error::DegenerateBand(lo));
        }
        Ok(Self {
            hbar,
            x_samples,
            values,
            band: (lo, hi),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub c1: f64,
    pub c2: f64,
    pub ratio: f64,
    pub bound: f64,
    pub two_sided: bool,
}

/// Smallest and largest value over a sweep of profiles.
pub fn two_sided_band(profiles: &[AverageProfile], bound: f64) -> Result<Band> {
    if profiles.len() < 3 {
        return invalid("a band needs at least three profiles");
    }
    let c1 = profiles
        .iter()
        .map(|p| p.band.0)
        .fold(f64::INFINITY, f64::min);
    let c2 = profiles
        .iter()
        .map(|p| p.band.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(c1 > 0.0) {
        return Err(Error::DegenerateBand(c1));
    }
    let ratio = c2 / c1;
    Ok(Band {
        c1,
        c2,
        ratio,
        bound,
        two_sided: ratio <= bound,
    })
}
