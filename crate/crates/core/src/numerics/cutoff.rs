use crate::error::{invalid, Result};

/// Smooth radial cutoff: 1 on `[0, inner]`, 0 on `[outer, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffProfile {
    inner: f64,
    outer: f64,
}

impl CutoffProfile {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return invalid(format!(
                "cutoff radii must satisfy 0 < inner < outer, got ({inner}, {outer})"
            ));
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn eval(&self, t: f64) -> f64 {
        chi_eval(self, t)
    }
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self {
            inner: 1.0,
            outer: 2.0,
        }
    }
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// `chi(|t|)` with the `exp(-1/s)` partition-of-unity blend between the radii.
pub fn chi_eval(profile: &CutoffProfile, t: f64) -> f64 {
    let r = t.abs();
    if r <= profile.inner {
        1.0
    } else if r >= profile.outer {
        0.0
    } else {
        let a = bump(profile.outer - r);
        let b = bump(r - profile.inner);
        a / (a + b)
    }
}
