use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Equispaced samples of an interval.
///
/// A periodic grid omits the right endpoint, so `count` points cover
/// `[lower, upper)` with spacing `(upper - lower) / count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    lower: f64,
    upper: f64,
    count: usize,
    periodic: bool,
}

impl UniformGrid {
    pub const MIN_COUNT: usize = 8;

    pub fn new(lower: f64, upper: f64, count: usize, periodic: bool) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || upper <= lower {
            return invalid(format!("grid bounds [{lower}, {upper}] are not increasing"));
        }
        if count < Self::MIN_COUNT {
            return invalid(format!("grid count {count} is below {}", Self::MIN_COUNT));
        }
        Ok(Self {
            lower,
            upper,
            count,
            periodic,
        })
    }

    /// Periodic grid on `[-half_width, half_width)`.
    pub fn periodic_centered(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count, true)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            self.length() / self.count as f64
        } else {
            self.length() / (self.count - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// True when `x -> -x` maps grid points onto grid points.
    pub fn is_reflection_symmetric(&self) -> bool {
        self.periodic
            && self.count % 2 == 0
            && (self.lower + self.upper).abs() <= 1e-14 * self.length()
    }

    /// Index of the mirror image `-x_i` on a reflection-symmetric grid.
    pub fn mirror_index(&self, i: usize) -> usize {
        (self.count - i) % self.count
    }

    /// Quadrature weight of sample `i` (trapezoid rule).
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if !self.periodic && (i == 0 || i + 1 == self.count) {
            0.5 * h
        } else {
            h
        }
    }
}

/// Complex amplitudes on a grid, tagged with the semiclassical parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: UniformGrid,
    values: Vec<Complex64>,
    hbar: f64,
}

impl WaveField {
    pub fn new(grid: UniformGrid, values: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if values.len() != grid.count() {
            return invalid(format!(
                "field has {} values for a grid of {} points",
                values.len(),
                grid.count()
            ));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return invalid(format!("hbar must be positive, got {hbar}"));
        }
        Ok(Self { grid, values, hbar })
    }

    pub fn from_fn(grid: UniformGrid, hbar: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::new(grid, values, hbar)
    }

    pub fn zeros(grid: UniformGrid, hbar: f64) -> Result<Self> {
        Self::new(grid, vec![Complex64::new(0.0, 0.0); grid.count()], hbar)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm_sqr() * self.grid.weight(i))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    /// `<self, other>` with the grid weights, antilinear in `self`.
    pub fn inner(&self, other: &WaveField) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * self.grid.weight(i))
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> WaveField {
        WaveField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            hbar: self.hbar,
        }
    }

    /// Field sampled at mirrored points, `psi(-x)`.
    pub fn reflected(&self) -> Result<WaveField> {
        if !self.grid.is_reflection_symmetric() {
            return invalid("reflection needs a periodic grid centred at 0 with an even count");
        }
        let values = (0..self.grid.count())
            .map(|i| self.values[self.grid.mirror_index(i)])
            .collect();
        Ok(WaveField {
            grid: self.grid,
            values,
            hbar: self.hbar,
        })
    }

    /// Fraction of the squared norm carried within `distance` of either end.
    pub fn boundary_mass(&self, distance: f64) -> f64 {
        let total = self.l2_norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        let (lo, hi) = (self.grid.lower(), self.grid.upper());
        let edge: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|&(i, _)| {
                let x = self.grid.point(i);
                x - lo < distance || hi - x < distance
            })
            .map(|(i, v)| v.norm_sqr() * self.grid.weight(i))
            .sum();
        edge / total
    }
}
