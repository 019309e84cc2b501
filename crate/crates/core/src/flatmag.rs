//! Constant magnetic potentials on flat space.
//!
//! `exp((i / 2h) <hD + u, hD + u>)` is the Fourier multiplier
//! `exp((i / 2h) |h xi + u|^2)`, so on a periodic box the propagation is exact
//! up to the measured boundary leakage. The averaged intensity
//! `int |f^(u)(x)|^2 chi(u) du` is cross-checked against the quadratic form of
//! the Weyl quantization of `a(y, xi) = chi(y - xi)` on the translated state
//! `g_x(y) = f(x + y)`.

use std::f64::consts::PI;

use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::dft::{fft_in_place, wavenumbers};
use crate::numerics::{
    chi_eval, CutoffProfile, IntervalQuadrature, TrigInterpolant, UniformGrid, WaveField,
};
use crate::Execution;

/// Largest relative mass allowed within `4 sqrt(h)` of the box edge.
pub const BOUNDARY_LEAKAGE_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDirection {
    Forward,
    Backward,
}

impl TimeDirection {
    fn sign(self) -> f64 {
        match self {
            TimeDirection::Forward => 1.0,
            TimeDirection::Backward => -1.0,
        }
    }
}

/// One-dimensional state on a periodic box.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatState {
    field: WaveField,
}

impl FlatState {
    pub fn new(field: WaveField) -> Result<Self> {
        if !field.grid().is_periodic() {
            return invalid("flat states live on periodic grids");
        }
        Ok(Self { field })
    }

    /// `(pi h)^(-1/4) exp(-(y - centre)^2 / 2h)`.
    pub fn gaussian(grid: UniformGrid, hbar: f64, centre: f64) -> Result<Self> {
        let amp = (PI * hbar).powf(-0.25);
        Self::new(WaveField::from_fn(grid, hbar, |y| {
            Complex64::new(amp * (-(y - centre).powi(2) / (2.0 * hbar)).exp(), 0.0)
        })?)
    }

    pub fn field(&self) -> &WaveField {
        &self.field
    }

    pub fn hbar(&self) -> f64 {
        self.field.hbar()
    }

    pub fn grid(&self) -> &UniformGrid {
        self.field.grid()
    }

    pub fn scaled(&self, c: Complex64) -> FlatState {
        FlatState {
            field: self.field.scaled(c),
        }
    }

    fn check_leakage(&self) -> Result<()> {
        let leakage = self.field.boundary_mass(4.0 * self.hbar().sqrt());
        if leakage > BOUNDARY_LEAKAGE_LIMIT {
            return Err(Error::DomainTruncation {
                leakage,
                limit: BOUNDARY_LEAKAGE_LIMIT,
            });
        }
        Ok(())
    }
}

fn magnetic_multiplier(h: f64, xi: f64, u: f64, sign: f64) -> Complex64 {
    let p = h * xi + u;
    Complex64::from_polar(1.0, sign * p * p / (2.0 * h))
}

/// `exp(+-(i / 2h) |hD + u|^2) f` by multiplying the discrete spectrum.
pub fn flat_magnetic_propagate(
    state: &FlatState,
    u: &[f64],
    direction: TimeDirection,
) -> Result<FlatState> {
    if u.len() != 1 {
        return invalid(format!("a 1-D state needs a 1-vector u, got {}", u.len()));
    }
    state.check_leakage()?;
    Ok(FlatState {
        field: apply_multiplier(&state.field, u[0], direction.sign()),
    })
}

fn apply_multiplier(field: &WaveField, u: f64, sign: f64) -> WaveField {
    let h = field.hbar();
    let grid = *field.grid();
    let mut buf = field.values().to_vec();
    fft_in_place(&mut buf, false);
    let inv_n = 1.0 / grid.count() as f64;
    for (c, xi) in buf.iter_mut().zip(wavenumbers(&grid)) {
        *c *= magnetic_multiplier(h, xi, u, sign) * inv_n;
    }
    fft_in_place(&mut buf, true);
    WaveField::new(grid, buf, h).expect("same grid and size")
}

/// `sum_m w_m chi(|u_m|) |f^(u_m)(x)|^2`.
pub fn averaged_intensity_flat(
    state: &FlatState,
    x: f64,
    chi: &CutoffProfile,
    u_quad: &IntervalQuadrature,
) -> Result<f64> {
    averaged_intensity_flat_with(state, x, chi, u_quad, Execution::default())
}

/// [`averaged_intensity_flat`] with an explicit execution strategy.
pub fn averaged_intensity_flat_with(
    state: &FlatState,
    x: f64,
    chi: &CutoffProfile,
    u_quad: &IntervalQuadrature,
    exec: Execution,
) -> Result<f64> {
    check_covers(chi, u_quad)?;
    state.check_leakage()?;
    let nodes: Vec<(f64, f64)> = u_quad
        .nodes()
        .iter()
        .copied()
        .zip(u_quad.weights().iter().copied())
        .collect();
    let terms = exec.map(&nodes, |&(u, w)| -> Result<f64> {
        let weight = chi_eval(chi, u);
        if weight == 0.0 {
            return Ok(0.0);
        }
        let moved = apply_multiplier(&state.field, u, 1.0);
        let value = TrigInterpolant::new(&moved)?.eval(x);
        Ok(w * weight * value.norm_sqr())
    });
    terms.into_iter().sum()
}

fn check_covers(chi: &CutoffProfile, quad: &IntervalQuadrature) -> Result<()> {
    let lo = quad.nodes().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = quad
        .nodes()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = quad.total_weight();
    let want = 2.0 * chi.outer();
    let centred = (lo + hi).abs() <= 1e-12 * want;
    if !centred || (span - want).abs() > 1e-10 * want {
        return invalid("parameter quadrature must cover [-outer, outer] of the cutoff");
    }
    Ok(())
}

/// Gauss–Legendre panels on `[-outer, -inner, inner, outer]` of the cutoff.
///
/// Splitting at the radii keeps each panel's integrand analytic in the
/// interior, where Gauss–Legendre converges fastest.
pub fn cutoff_parameter_quadrature(
    chi: &CutoffProfile,
    nodes_per_panel: usize,
) -> Result<IntervalQuadrature> {
    let (a, b) = (chi.inner(), chi.outer());
    crate::numerics::composite_gauss_legendre(&[-b, -a, a, b], nodes_per_panel)
}

/// Discretized Weyl quantization of a real symbol on a periodic grid.
#[derive(Debug, Clone)]
pub struct WeylMatrix {
    /// Acts on grid samples: `(A g)_j = sum_l matrix[(j, l)] g_l`.
    pub matrix: Mat<c64>,
    pub grid: UniformGrid,
    pub hbar: f64,
    pub cutoff: CutoffProfile,
}

impl WeylMatrix {
    /// `<A g, g>` with the grid weights.
    pub fn quadratic_form(&self, g: &[Complex64]) -> Result<Complex64> {
        if g.len() != self.grid.count() {
            return invalid("vector does not match the Weyl matrix");
        }
        let col = crate::numerics::operator::column(g);
        let ag = &self.matrix * &col;
        let dy = self.grid.spacing();
        Ok((0..g.len()).map(|j| g[j].conj() * ag[j]).sum::<Complex64>() * dy)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for j in 0..m.ncols() {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.matrix
            .singular_values()
            .map(|s| s.into_iter().fold(0.0, f64::max))
            .unwrap_or(f64::NAN)
    }
}

/// `Op^w_h(a)` for `a(y, xi) = chi(|y - xi|)`.
///
/// The kernel `(2 pi h)^(-1) int exp(i (y - y') xi / h) a((y + y') / 2, xi) dxi`
/// is summed over the grid's discrete momenta `h xi_k` and multiplied by the
/// grid weight, so that `a = 1` gives the identity matrix.
pub fn weyl_quantize_chi(grid: &UniformGrid, hbar: f64, chi: &CutoffProfile) -> Result<WeylMatrix> {
    if !grid.is_periodic() {
        return invalid("Weyl quantization needs a periodic grid");
    }
    let n = grid.count();
    let xi = wavenumbers(grid);
    let y = grid.points();
    // d eta / (2 pi h) * dy = dy / length
    let scale = grid.spacing() / grid.length();
    let mut matrix = Mat::<c64>::zeros(n, n);
    for l in 0..n {
        for j in 0..=l {
            let centre = 0.5 * (y[j] + y[l]);
            let offset = y[j] - y[l];
            let mut acc = Complex64::new(0.0, 0.0);
            for &k in &xi {
                let a = chi_eval(chi, centre - hbar * k);
                if a != 0.0 {
                    acc += Complex64::from_polar(a, offset * k);
                }
            }
            let v = acc * scale;
            matrix[(j, l)] = v;
            matrix[(l, j)] = v.conj();
        }
    }
    Ok(WeylMatrix {
        matrix,
        grid: *grid,
        hbar,
        cutoff: *chi,
    })
}

/// `g_x(y) = f(x + y)` by spectral translation.
pub fn translate(state: &FlatState, x: f64) -> Result<FlatState> {
    let grid = *state.grid();
    let mut buf = state.field.values().to_vec();
    fft_in_place(&mut buf, false);
    let inv_n = 1.0 / grid.count() as f64;
    for (c, k) in buf.iter_mut().zip(wavenumbers(&grid)) {
        *c *= Complex64::from_polar(inv_n, k * x);
    }
    fft_in_place(&mut buf, true);
    let moved = FlatState::new(WaveField::new(grid, buf, state.hbar())?)?;
    moved.check_leakage()?;
    Ok(moved)
}

/// Both sides of the change-of-variables identity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    /// `int chi(u) |f^(u)(x)|^2 du`.
    pub lhs: f64,
    /// `<Op^w(a) g_x, g_x>`.
    pub rhs: f64,
    pub gap: f64,
}

/// Compares the averaged intensity with the Weyl quadratic form.
pub fn motivation_identity_check(
    state: &FlatState,
    x: f64,
    chi: &CutoffProfile,
    u_quad: &IntervalQuadrature,
) -> Result<IdentityCheck> {
    let weyl = weyl_quantize_chi(state.grid(), state.hbar(), chi)?;
    motivation_identity_check_with(state, x, &weyl, u_quad)
}

/// As [`motivation_identity_check`] with a prebuilt Weyl matrix.
pub fn motivation_identity_check_with(
    state: &FlatState,
    x: f64,
    weyl: &WeylMatrix,
    u_quad: &IntervalQuadrature,
) -> Result<IdentityCheck> {
    if weyl.grid != *state.grid() || weyl.hbar != state.hbar() {
        return invalid("Weyl matrix was built for a different grid or hbar");
    }
    let lhs = averaged_intensity_flat(state, x, &weyl.cutoff, u_quad)?;
    let g = translate(state, x)?;
    let rhs = weyl.quadratic_form(g.field().values())?.re;
    Ok(IdentityCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// Two-dimensional state on a tensor grid, stored row-major with the first
/// coordinate as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatState2 {
    grids: [UniformGrid; 2],
    values: Vec<Complex64>,
    hbar: f64,
}

impl FlatState2 {
    pub fn new(grids: [UniformGrid; 2], values: Vec<Complex64>, hbar: f64) -> Result<Self> {
        if !(grids[0].is_periodic() && grids[1].is_periodic()) {
            return invalid("flat states live on periodic grids");
        }
        if values.len() != grids[0].count() * grids[1].count() {
            return invalid("2-D field size does not match its grids");
        }
        if !(hbar > 0.0) {
            return invalid("hbar must be positive");
        }
        Ok(Self {
            grids,
            values,
            hbar,
        })
    }

    /// `(pi h)^(-1/2) exp(-|y - centre|^2 / 2h)`.
    pub fn gaussian(grids: [UniformGrid; 2], hbar: f64, centre: [f64; 2]) -> Result<Self> {
        let (x1, x2) = (grids[0].points(), grids[1].points());
        let amp = (PI * hbar).powf(-0.5);
        let values = x1
            .iter()
            .flat_map(|&a| {
                x2.iter().map(move |&b| {
                    let r2 = (a - centre[0]).powi(2) + (b - centre[1]).powi(2);
                    Complex64::new(amp * (-r2 / (2.0 * hbar)).exp(), 0.0)
                })
            })
            .collect();
        Self::new(grids, values, hbar)
    }

    pub fn grids(&self) -> &[UniformGrid; 2] {
        &self.grids
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    fn weight(&self) -> f64 {
        self.grids[0].spacing() * self.grids[1].spacing()
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.weight()
    }

    fn check_leakage(&self) -> Result<()> {
        let total = self.l2_norm_sqr();
        if total == 0.0 {
            return Ok(());
        }
        let d = 4.0 * self.hbar.sqrt();
        let near = |g: &UniformGrid, i: usize| {
            let x = g.point(i);
            x - g.lower() < d || g.upper() - x < d
        };
        let n2 = self.grids[1].count();
        let edge: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|&(idx, _)| near(&self.grids[0], idx / n2) || near(&self.grids[1], idx % n2))
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * self.weight();
        let leakage = edge / total;
        if leakage > BOUNDARY_LEAKAGE_LIMIT {
            return Err(Error::DomainTruncation {
                leakage,
                limit: BOUNDARY_LEAKAGE_LIMIT,
            });
        }
        Ok(())
    }

    /// Normalized 2-D FFT coefficients (inverse transform without scaling
    /// reproduces the samples).
    fn coefficients(&self) -> Vec<Complex64> {
        let (n1, n2) = (self.grids[0].count(), self.grids[1].count());
        let mut buf = self.values.clone();
        fft2(&mut buf, n1, n2, false);
        let inv = 1.0 / (n1 * n2) as f64;
        buf.iter_mut().for_each(|v| *v *= inv);
        buf
    }

    /// Value of the trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, p: [f64; 2]) -> Complex64 {
        Interpolant2::new(self).eval(p)
    }
}

fn fft2(buf: &mut [Complex64], n1: usize, n2: usize, inverse: bool) {
    for row in buf.chunks_mut(n2) {
        fft_in_place(row, inverse);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n1];
    for j in 0..n2 {
        for i in 0..n1 {
            col[i] = buf[i * n2 + j];
        }
        fft_in_place(&mut col, inverse);
        for i in 0..n1 {
            buf[i * n2 + j] = col[i];
        }
    }
}

/// Separable trigonometric interpolant of a [`FlatState2`].
#[derive(Debug, Clone)]
pub struct Interpolant2 {
    coefficients: Vec<Complex64>,
    wavenumbers: [Vec<f64>; 2],
    lower: [f64; 2],
}

impl Interpolant2 {
    pub fn new(state: &FlatState2) -> Self {
        Self {
            coefficients: state.coefficients(),
            wavenumbers: [wavenumbers(&state.grids[0]), wavenumbers(&state.grids[1])],
            lower: [state.grids[0].lower(), state.grids[1].lower()],
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> Complex64 {
        let n2 = self.wavenumbers[1].len();
        let s2 = p[1] - self.lower[1];
        let phase2: Vec<Complex64> = self.wavenumbers[1]
            .iter()
            .map(|k| Complex64::from_polar(1.0, k * s2))
            .collect();
        let s1 = p[0] - self.lower[0];
        self.wavenumbers[0]
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let row = &self.coefficients[i * n2..(i + 1) * n2];
                let inner: Complex64 = row.iter().zip(&phase2).map(|(c, e)| c * e).sum();
                inner * Complex64::from_polar(1.0, k * s1)
            })
            .sum()
    }
}

/// Two-dimensional counterpart of [`flat_magnetic_propagate`].
pub fn flat_magnetic_propagate_2d(
    state: &FlatState2,
    u: &[f64],
    direction: TimeDirection,
) -> Result<FlatState2> {
    if u.len() != 2 {
        return invalid(format!("a 2-D state needs a 2-vector u, got {}", u.len()));
    }
    state.check_leakage()?;
    let (n1, n2) = (state.grids[0].count(), state.grids[1].count());
    let h = state.hbar;
    let mut buf = state.coefficients();
    let k1 = wavenumbers(&state.grids[0]);
    let k2 = wavenumbers(&state.grids[1]);
    let m2: Vec<Complex64> = k2
        .iter()
        .map(|&k| magnetic_multiplier(h, k, u[1], direction.sign()))
        .collect();
    for (i, &k) in k1.iter().enumerate() {
        let m1 = magnetic_multiplier(h, k, u[0], direction.sign());
        for j in 0..n2 {
            buf[i * n2 + j] *= m1 * m2[j];
        }
    }
    fft2(&mut buf, n1, n2, true);
    FlatState2::new(state.grids, buf, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adaptive_gauss_kronrod, gauss_legendre};

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::periodic_centered(10.0, n).unwrap()
    }

    #[test]
    fn grid_modes_pick_up_the_multiplier_phase() {
        let g = grid(128);
        let h = 0.1;
        let k = 2.0 * PI * 7.0 / g.length();
        let f = WaveField::from_fn(g, h, |y| Complex64::from_polar(1.0, k * y)).unwrap();
        // plane waves fill the box, so the leakage guard is bypassed
        let u = 0.3;
        let moved = apply_multiplier(&f, u, 1.0);
        let p = h * k + u;
        let expect = Complex64::from_polar(1.0, p * p / (2.0 * h));
        for (a, b) in moved.values().iter().zip(f.values()) {
            assert!((a - b * expect).norm() < 1e-12);
        }
    }

    #[test]
    fn propagation_is_unitary_and_invertible() {
        let s = FlatState::gaussian(grid(256), 0.05, 0.3).unwrap();
        for u in [-1.5, -0.2, 0.0, 0.7, 2.0] {
            let f = flat_magnetic_propagate(&s, &[u], TimeDirection::Forward).unwrap();
            assert!((f.field().l2_norm() - s.field().l2_norm()).abs() < 1e-12);
            let back = flat_magnetic_propagate(&f, &[u], TimeDirection::Backward).unwrap();
            let err = back
                .field()
                .values()
                .iter()
                .zip(s.field().values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn leakage_guard_trips_near_the_edge() {
        let s = FlatState::gaussian(grid(256), 0.05, 9.8).unwrap();
        assert!(matches!(
            flat_magnetic_propagate(&s, &[0.0], TimeDirection::Forward),
            Err(Error::DomainTruncation { .. })
        ));
    }

    #[test]
    fn averaged_intensity_is_quadratic() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 24).unwrap();
        let s = FlatState::gaussian(grid(256), 0.1, 0.0).unwrap();
        let base = averaged_intensity_flat(&s, 0.2, &chi, &q).unwrap();
        let c = Complex64::new(1.5, -2.0);
        let scaled = averaged_intensity_flat(&s.scaled(c), 0.2, &chi, &q).unwrap();
        assert!((scaled - c.norm_sqr() * base).abs() < 1e-12 * scaled);
        let zero = FlatState::new(WaveField::zeros(grid(256), 0.1).unwrap()).unwrap();
        assert_eq!(averaged_intensity_flat(&zero, 0.2, &chi, &q).unwrap(), 0.0);
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 24).unwrap();
        let s = FlatState::gaussian(grid(256), 0.05, 0.0).unwrap();
        let a = averaged_intensity_flat_with(&s, 0.3, &chi, &q, Execution::Serial).unwrap();
        let b = averaged_intensity_flat_with(&s, 0.3, &chi, &q, Execution::Parallel).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn averaged_intensity_requires_covering_quadrature() {
        let chi = CutoffProfile::default();
        let s = FlatState::gaussian(grid(128), 0.1, 0.0).unwrap();
        let q = gauss_legendre(20, -1.0, 1.0).unwrap();
        assert!(averaged_intensity_flat(&s, 0.0, &chi, &q).is_err());
    }

    #[test]
    fn propagated_gaussian_matches_kernel_quadrature() {
        // e^{(i/2h)(hD+u)^2} has kernel c (2 pi h)^{-1/2} e^{-i(x+u-y)^2/2h}
        // with |c| = 1, so the modulus follows from a direct y-integral.
        let (h, u, x) = (0.05, 0.3, 0.0);
        let s = FlatState::gaussian(grid(512), h, 0.0).unwrap();
        let f = flat_magnetic_propagate(&s, &[u], TimeDirection::Forward).unwrap();
        let spectral = TrigInterpolant::new(f.field()).unwrap().eval(x).norm();
        let amp = (PI * h).powf(-0.25);
        let integrand = |y: f64| {
            Complex64::from_polar(
                amp * (-y * y / (2.0 * h)).exp(),
                -(x + u - y).powi(2) / (2.0 * h),
            )
        };
        let (integral, _) =
            adaptive_gauss_kronrod(integrand, -3.0, 3.0, 1e-14, 1e-12, 20000).unwrap();
        let direct = integral.norm() / (2.0 * PI * h).sqrt();
        assert!(
            (spectral - direct).abs() < 1e-6 * direct,
            "{spectral} vs {direct}"
        );
    }

    #[test]
    fn propagated_gaussian_modulus_closed_form() {
        let h = 0.05;
        let s = FlatState::gaussian(grid(512), h, 0.0).unwrap();
        for u in [-0.8, 0.3, 1.2] {
            let f = flat_magnetic_propagate(&s, &[u], TimeDirection::Forward).unwrap();
            let interp = TrigInterpolant::new(f.field()).unwrap();
            for x in [-1.0, -0.3, 0.0, 0.45] {
                let want = (2.0 * PI * h).powf(-0.5) * (-(x + u).powi(2) / (2.0 * h)).exp();
                assert!((interp.eval(x).norm_sqr() - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_holds_across_the_sweep() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 32).unwrap();
        for h in [0.1, 0.05, 0.02] {
            let s = FlatState::gaussian(grid(1024), h, 0.0).unwrap();
            let w = weyl_quantize_chi(s.grid(), h, &chi).unwrap();
            for x in [-0.5, 0.0, 0.5] {
                let c = motivation_identity_check_with(&s, x, &w, &q).unwrap();
                assert!(c.gap <= 1e-6 * c.lhs.max(1.0), "h={h} x={x} {c:?}");
            }
        }
    }

    #[test]
    fn identity_at_reference_point_and_one_step_over() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 32).unwrap();
        let s = FlatState::gaussian(grid(512), 0.1, 0.0).unwrap();
        let at0 = motivation_identity_check(&s, 0.0, &chi, &q).unwrap();
        assert!(at0.gap <= 1e-6);
        let step = motivation_identity_check(&s, s.grid().spacing(), &chi, &q).unwrap();
        assert!(step.gap <= 1e-6 * step.lhs.max(1.0));
        assert!(step.lhs != at0.lhs && step.rhs != at0.rhs);
    }

    #[test]
    fn identity_of_zero_field_is_zero() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 16).unwrap();
        let zero = FlatState::new(WaveField::zeros(grid(128), 0.1).unwrap()).unwrap();
        let c = motivation_identity_check(&zero, 0.3, &chi, &q).unwrap();
        assert_eq!((c.lhs, c.rhs, c.gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn translation_guard_trips_when_mass_wraps() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 16).unwrap();
        let s = FlatState::gaussian(grid(256), 0.1, 0.0).unwrap();
        assert!(matches!(
            motivation_identity_check(&s, 9.5, &chi, &q),
            Err(Error::DomainTruncation { .. })
        ));
    }

    #[test]
    fn averaged_intensity_is_uniform_in_hbar() {
        let chi = CutoffProfile::default();
        let q = cutoff_parameter_quadrature(&chi, 32).unwrap();
        let xs: Vec<f64> = (0..9).map(|i| -0.8 + 0.2 * i as f64).collect();
        let sups: Vec<f64> = [0.1, 0.05, 0.02]
            .iter()
            .map(|&h| {
                let s = FlatState::gaussian(grid(512), h, 0.0).unwrap();
                xs.iter()
                    .map(|&x| averaged_intensity_flat(&s, x, &chi, &q).unwrap())
                    .fold(0.0, f64::max)
            })
            .collect();
        let ratio = crate::numerics::spread_ratio(&sups).unwrap();
        assert!(ratio <= 2.0, "{sups:?}");
    }

    #[test]
    fn weyl_of_one_is_identity() {
        let g = grid(64);
        let chi = CutoffProfile::new(1e3, 2e3).unwrap();
        let w = weyl_quantize_chi(&g, 0.1, &chi).unwrap();
        for j in 0..64 {
            for i in 0..64 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((w.matrix[(i, j)] - c64::new(want, 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn weyl_matrix_is_hermitian_with_bounded_norm() {
        let chi = CutoffProfile::default();
        let mut norms = vec![];
        for h in [0.2, 0.1, 0.05] {
            let w = weyl_quantize_chi(&grid(128), h, &chi).unwrap();
            assert!(w.hermitian_defect() < 1e-9);
            norms.push(w.operator_norm());
        }
        // 0 <= chi <= 1, so the norm stays O(1) uniformly in h
        assert!(norms.iter().all(|&n| n > 0.5 && n < 2.0), "{norms:?}");
    }

    #[test]
    fn translation_shifts_samples() {
        let g = grid(256);
        let s = FlatState::gaussian(g, 0.1, 0.0).unwrap();
        let dx = g.spacing();
        let t = translate(&s, dx).unwrap();
        // g(y) = f(y + dx): sample j of g equals sample j+1 of f
        for j in 0..255 {
            assert!((t.field().values()[j] - s.field().values()[j + 1]).norm() < 1e-12);
        }
    }

    #[test]
    fn two_d_propagation_matches_closed_form_modulus() {
        let g = UniformGrid::periodic_centered(4.0, 64).unwrap();
        let h = 0.1;
        let s = FlatState2::gaussian([g, g], h, [0.0, 0.0]).unwrap();
        assert!((s.l2_norm_sqr() - 1.0).abs() < 1e-10);
        let u = [0.3, -0.2];
        let f = flat_magnetic_propagate_2d(&s, &u, TimeDirection::Forward).unwrap();
        assert!((f.l2_norm_sqr() - 1.0).abs() < 1e-10);
        let interp = Interpolant2::new(&f);
        for p in [[0.0, 0.0], [-0.3, 0.2], [0.17, -0.41]] {
            let r2 = (p[0] + u[0]).powi(2) + (p[1] + u[1]).powi(2);
            let want = (-r2 / (2.0 * h)).exp() / (2.0 * PI * h);
            assert!((interp.eval(p).norm_sqr() - want).abs() < 1e-9);
        }
    }
}
