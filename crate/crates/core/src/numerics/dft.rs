//! Discrete semiclassical Fourier pair on a periodic grid.
//!
//! Forward kernel `exp(-i y eta / h)` with the symmetric `1/sqrt(2 pi h)`
//! normalization:
//!
//! ```text
//! F_k = dy / sqrt(2 pi h) * sum_j exp(-i y_j eta_k / h) f_j
//! f_j = deta / sqrt(2 pi h) * sum_k exp(+i y_j eta_k / h) F_k
//! ```
//!
//! with `eta_k = h * xi_k`, `xi_k = 2 pi k / length` for `k` in `[-N/2, N/2)`
//! stored in FFT order. Then `sum |f_j|^2 dy = sum |F_k|^2 deta`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{UniformGrid, WaveField};
use crate::error::{invalid, Result};

/// Semiclassical spectrum of a [`WaveField`], in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: UniformGrid,
    pub hbar: f64,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    /// Momentum spacing `h * 2 pi / length`.
    pub fn momentum_spacing(&self) -> f64 {
        self.hbar * 2.0 * PI / self.grid.length()
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.momentum_spacing()
    }
}

/// Signed integer mode for FFT slot `slot`.
pub(crate) fn signed_mode(slot: usize, n: usize) -> i64 {
    if slot < n / 2 {
        slot as i64
    } else {
        slot as i64 - n as i64
    }
}

/// Angular wavenumbers `xi_k` in FFT order (the Nyquist slot is negative).
pub(crate) fn wavenumbers(grid: &UniformGrid) -> Vec<f64> {
    let n = grid.count();
    let dk = 2.0 * PI / grid.length();
    (0..n).map(|s| signed_mode(s, n) as f64 * dk).collect()
}

/// Semiclassical momenta `eta_k = h xi_k` in FFT order.
pub fn momenta(grid: &UniformGrid, hbar: f64) -> Vec<f64> {
    wavenumbers(grid).into_iter().map(|xi| hbar * xi).collect()
}

fn require_periodic(grid: &UniformGrid) -> Result<()> {
    if grid.is_periodic() {
        Ok(())
    } else {
        invalid("the discrete Fourier pair needs a periodic grid")
    }
}

pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    fft.process(buf);
}

pub fn dft_forward(field: &WaveField) -> Result<Spectrum> {
    let grid = *field.grid();
    require_periodic(&grid)?;
    let hbar = field.hbar();
    let mut buf = field.values().to_vec();
    fft_in_place(&mut buf, false);
    let scale = grid.spacing() / (2.0 * PI * hbar).sqrt();
    let lower = grid.lower();
    for (v, xi) in buf.iter_mut().zip(wavenumbers(&grid)) {
        *v *= Complex64::from_polar(scale, -xi * lower);
    }
    Ok(Spectrum {
        grid,
        hbar,
        values: buf,
    })
}

pub fn dft_inverse(spectrum: &Spectrum) -> Result<WaveField> {
    let grid = spectrum.grid;
    require_periodic(&grid)?;
    if spectrum.values.len() != grid.count() {
        return invalid("spectrum length does not match its grid");
    }
    let scale = spectrum.momentum_spacing() / (2.0 * PI * spectrum.hbar).sqrt();
    let lower = grid.lower();
    let mut buf: Vec<Complex64> = spectrum
        .values
        .iter()
        .zip(wavenumbers(&grid))
        .map(|(v, xi)| v * Complex64::from_polar(scale, xi * lower))
        .collect();
    fft_in_place(&mut buf, true);
    WaveField::new(grid, buf, spectrum.hbar)
}

/// Trigonometric interpolant of a periodic field, evaluable off the grid.
///
/// The Nyquist coefficient is split evenly between `+-N/2`, so the
/// interpolant of a real field is real.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    lower: f64,
    coefficients: Vec<Complex64>,
    wavenumbers: Vec<f64>,
    nyquist: Option<(Complex64, f64)>,
}

impl TrigInterpolant {
    pub fn new(field: &WaveField) -> Result<Self> {
        let grid = field.grid();
        require_periodic(grid)?;
        let n = grid.count();
        let mut c = field.values().to_vec();
        fft_in_place(&mut c, false);
        let inv_n = 1.0 / n as f64;
        c.iter_mut().for_each(|v| *v *= inv_n);
        let mut xi = wavenumbers(grid);
        let nyquist = if n % 2 == 0 {
            let slot = n / 2;
            let entry = (c[slot], -xi[slot]);
            c.remove(slot);
            xi.remove(slot);
            Some(entry)
        } else {
            None
        };
        Ok(Self {
            lower: grid.lower(),
            coefficients: c,
            wavenumbers: xi,
            nyquist,
        })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let s = x - self.lower;
        let mut acc: Complex64 = self
            .coefficients
            .iter()
            .zip(&self.wavenumbers)
            .map(|(c, xi)| c * Complex64::from_polar(1.0, xi * s))
            .sum();
        if let Some((c, xi)) = self.nyquist {
            acc += c * (xi * s).cos();
        }
        acc
    }
}

/// Value of the trigonometric interpolant of `field` at `x`.
pub fn trig_eval(field: &WaveField, x: f64) -> Result<Complex64> {
    Ok(TrigInterpolant::new(field)?.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::new(-3.0, 5.0, n, true).unwrap()
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let g = grid(64);
        let mut vals = vec![Complex64::new(0.0, 0.0); 64];
        vals[17] = Complex64::new(1.0, 0.0);
        let s = dft_forward(&WaveField::new(g, vals, 0.3).unwrap()).unwrap();
        let m0 = s.values[0].norm();
        assert!(m0 > 0.0);
        assert!(s.values.iter().all(|v| (v.norm() - m0).abs() < 1e-14));
    }

    #[test]
    fn grid_mode_has_single_coefficient() {
        let g = grid(64);
        let xi = 2.0 * PI * 5.0 / g.length();
        let f = WaveField::from_fn(g, 0.2, |x| Complex64::from_polar(1.0, xi * x)).unwrap();
        let s = dft_forward(&f).unwrap();
        for (slot, v) in s.values.iter().enumerate() {
            if slot == 5 {
                assert!(v.norm() > 1.0);
            } else {
                assert!(v.norm() < 1e-12, "slot {slot}: {v}");
            }
        }
    }

    #[test]
    fn unitary_pair_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [64usize, 256, 1024] {
            let g = grid(n);
            let vals = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = WaveField::new(g, vals, 0.05).unwrap();
            let s = dft_forward(&f).unwrap();
            let norm = f.l2_norm_sqr();
            assert!((s.l2_norm_sqr() - norm).abs() <= 1e-12 * norm);
            let back = dft_inverse(&s).unwrap();
            let err = back
                .values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn gaussian_spectrum_matches_continuum_transform() {
        // (pi h)^(-1/4) exp(-y^2/2h) is its own semiclassical transform
        let h = 0.1;
        let g = UniformGrid::periodic_centered(10.0, 256).unwrap();
        let f = WaveField::from_fn(g, h, |y| {
            Complex64::new((PI * h).powf(-0.25) * (-y * y / (2.0 * h)).exp(), 0.0)
        })
        .unwrap();
        let s = dft_forward(&f).unwrap();
        for (v, eta) in s.values.iter().zip(momenta(&g, h)) {
            let expect = (PI * h).powf(-0.25) * (-eta * eta / (2.0 * h)).exp();
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_nonperiodic_grid() {
        let g = UniformGrid::new(0.0, 1.0, 16, false).unwrap();
        let f = WaveField::zeros(g, 1.0).unwrap();
        assert!(dft_forward(&f).is_err());
    }

    #[test]
    fn interpolant_reproduces_samples_and_smooth_functions() {
        let g = UniformGrid::periodic_centered(8.0, 128).unwrap();
        let f = WaveField::from_fn(g, 1.0, |x: f64| {
            Complex64::new((-x * x).exp(), x.sin() * (-x * x).exp())
        })
        .unwrap();
        let interp = TrigInterpolant::new(&f).unwrap();
        for i in [0usize, 5, 64, 127] {
            assert!((interp.eval(g.point(i)) - f.values()[i]).norm() < 1e-13);
        }
        let x: f64 = 0.123_456;
        let exact = Complex64::new((-x * x).exp(), x.sin() * (-x * x).exp());
        assert!((interp.eval(x) - exact).norm() < 1e-12);
    }
}
