//! The one-dimensional magnetic harmonic oscillator
//! `P_u(h) = ((h D_x - u)^2 + x^2) / 2` and the deformations of its ground
//! state.
//!
//! Three independent routes to `phi^(u) = exp(-i t0 P_u / h) phi` are
//! provided:
//!
//! * [`propagate_spectral`]: dense eigendecomposition of the operator built by
//!   spectral differentiation on a periodic box;
//! * [`mehler_propagate`]: adaptive quadrature of the Mehler oscillatory
//!   integral in the momentum variable;
//! * [`coherent_oracle`]: the closed-form modulus. Conjugating by the gauge
//!   factor `exp(i u x / h)` turns `P_u` into `P_0`, and the ground state
//!   becomes a coherent state centred at `(0, -u)` in phase space, which the
//!   harmonic flow rotates to position `-u sin t0`.

use std::f64::consts::PI;

use faer::{c64, Mat};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::operator::column;
use crate::numerics::{
    adaptive_gauss_kronrod, dft::fft_in_place, dft::wavenumbers, loglog_slope, HermitianEigen,
    HermitianOperatorDense, IntervalQuadrature, Symmetry, TrigInterpolant, UniformGrid, WaveField,
};
use crate::Execution;

/// Fraction of `epsilon sin t0` kept away from the edge of the averaging band.
pub const BAND_MARGIN: f64 = 0.2;

/// Parameters of one oscillator deformation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HOConfig {
    hbar: f64,
    t0: f64,
    epsilon: f64,
    grid: UniformGrid,
}

impl HOConfig {
    pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
    pub const DEFAULT_COUNT: usize = 2048;

    pub fn new(hbar: f64, t0: f64, epsilon: f64, grid: UniformGrid) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return invalid(format!("hbar must be positive, got {hbar}"));
        }
        if !(t0 > 0.0 && t0 <= PI / 2.0 - 0.1) {
            return invalid(format!("t0 must lie in (0, pi/2 - 0.1], got {t0}"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return invalid(format!("epsilon must be positive, got {epsilon}"));
        }
        if !grid.is_reflection_symmetric() {
            return invalid("oscillator grid must be a periodic box [-L, L) with an even count");
        }
        let half_width = grid.upper();
        let needed = 10f64.max(epsilon + 6.0 * hbar.sqrt() + 2.0);
        if half_width < needed {
            return invalid(format!("box half-width {half_width} is below {needed}"));
        }
        Ok(Self {
            hbar,
            t0,
            epsilon,
            grid,
        })
    }

    /// Box `[-10, 10)` with `count` points.
    pub fn with_count(hbar: f64, t0: f64, epsilon: f64, count: usize) -> Result<Self> {
        let grid = UniformGrid::periodic_centered(Self::DEFAULT_HALF_WIDTH, count)?;
        Self::new(hbar, t0, epsilon, grid)
    }

    pub fn with_default_grid(hbar: f64, t0: f64, epsilon: f64) -> Result<Self> {
        Self::with_count(hbar, t0, epsilon, Self::DEFAULT_COUNT)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Ground-state energy `h / 2`.
    pub fn energy(&self) -> f64 {
        0.5 * self.hbar
    }

    /// Half-width `(1 - BAND_MARGIN) epsilon sin t0` of the band where the
    /// averaged intensity approaches its limit.
    pub fn band_half_width(&self) -> f64 {
        (1.0 - BAND_MARGIN) * self.epsilon * self.t0.sin()
    }

    pub fn in_band(&self, x: f64) -> bool {
        x.abs() <= self.band_half_width()
    }
}

/// `(pi h)^(-1/4) exp(-x^2 / 2h)` sampled on the configuration grid.
pub fn ho_ground_state(config: &HOConfig) -> WaveField {
    let h = config.hbar;
    let amp = (PI * h).powf(-0.25);
    WaveField::from_fn(config.grid, h, |x| {
        Complex64::new(amp * (-x * x / (2.0 * h)).exp(), 0.0)
    })
    .expect("configuration grid and hbar were validated")
}

/// Dense matrix of `P_u` on the periodic grid.
///
/// The kinetic part is the circulant matrix of the multiplier
/// `(h xi_k - u)^2 / 2`; the potential `x^2 / 2` is diagonal.
pub fn build_ho_operator(config: &HOConfig, u: f64) -> HermitianOperatorDense {
    let grid = config.grid;
    let n = grid.count();
    let h = config.hbar;
    let mut symbol: Vec<Complex64> = wavenumbers(&grid)
        .into_iter()
        .map(|xi| Complex64::new(0.5 * (h * xi - u).powi(2), 0.0))
        .collect();
    fft_in_place(&mut symbol, true);
    let inv_n = 1.0 / n as f64;
    let kernel: Vec<Complex64> = symbol.into_iter().map(|v| v * inv_n).collect();
    let points = grid.points();
    let matrix = Mat::<c64>::from_fn(n, n, |i, j| {
        let mut v = kernel[(i + n - j) % n];
        if i == j {
            v += 0.5 * points[i] * points[i];
        }
        v
    });
    HermitianOperatorDense::new(matrix, grid, h, Symmetry::ReflectionConjugation)
        .expect("oscillator grids are reflection symmetric")
}

/// `||P psi - E psi|| / ||E psi||`.
pub fn eigen_residual(op: &HermitianOperatorDense, psi: &WaveField, energy: f64) -> Result<f64> {
    let p_psi = op.apply(psi)?;
    let diff: f64 = p_psi
        .values()
        .iter()
        .zip(psi.values())
        .enumerate()
        .map(|(i, (a, b))| (a - b * energy).norm_sqr() * psi.grid().weight(i))
        .sum();
    Ok(diff.sqrt() / (energy.abs() * psi.l2_norm()))
}

/// Spectral calculus for one operator: `f(P) = V f(Lambda) V*`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigen: HermitianEigen,
    hbar: f64,
}

impl SpectralPropagator {
    pub fn new(op: &HermitianOperatorDense) -> Result<Self> {
        Ok(Self {
            eigen: op.eigen()?,
            hbar: op.hbar(),
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// `exp(-i t P / h) psi`.
    pub fn evolve(&self, psi: &WaveField, t: f64) -> Result<WaveField> {
        let v = &self.eigen.vectors;
        if v.nrows() != psi.values().len() {
            return invalid("field does not match the propagator dimension");
        }
        let mut coeffs = v.adjoint() * column(psi.values());
        for (k, lambda) in self.eigen.values.iter().enumerate() {
            coeffs[k] *= Complex64::from_polar(1.0, -t * lambda / self.hbar);
        }
        let out = v * coeffs;
        WaveField::new(
            *psi.grid(),
            (0..out.nrows()).map(|i| out[i]).collect(),
            psi.hbar(),
        )
    }

    /// Dense `exp(-i t P / h)`.
    pub fn unitary(&self, t: f64) -> Mat<c64> {
        let v = &self.eigen.vectors;
        let n = v.nrows();
        let phases: Vec<Complex64> = self
            .eigen
            .values
            .iter()
            .map(|l| Complex64::from_polar(1.0, -t * l / self.hbar))
            .collect();
        let scaled = Mat::<c64>::from_fn(n, n, |i, k| v[(i, k)] * phases[k]);
        &scaled * v.adjoint()
    }
}

/// `exp(-i t0 P / h) psi` through the eigendecomposition of `op`.
pub fn propagate_spectral(
    op: &HermitianOperatorDense,
    psi: &WaveField,
    t0: f64,
    hbar: f64,
) -> Result<WaveField> {
    op.check_field(psi)?;
    if (hbar - op.hbar()).abs() > 1e-15 * hbar {
        return invalid("hbar of the operator and of the requested propagation differ");
    }
    SpectralPropagator::new(op)?.evolve(psi, t0)
}

fn check_cos(t: f64) -> Result<f64> {
    let c = t.cos();
    if c.abs() < 1e-3 {
        Err(Error::SingularPhase { cos_t: c.abs() })
    } else {
        Ok(c)
    }
}

/// Phase of the magnetic Mehler kernel in the mixed `(x, eta)` representation.
pub fn mehler_phase_eval(t: f64, x: f64, eta: f64, u: f64) -> Result<f64> {
    let c = check_cos(t)?;
    let s = t.sin();
    let numerator = u * u * s - 2.0 * eta * u * s + (x * x + eta * eta) * s - 2.0 * x * u * c
        + 2.0 * x * (u - eta);
    Ok(-numerator / (2.0 * c))
}

/// `exp(-i t0 P_u / h) phi (x)` by adaptive quadrature of the Mehler integral
///
/// ```text
/// (2 pi h)^(-1/2) (pi h)^(-1/4) |cos t0|^(-1/2)
///     * int exp(i Phi(t0, x, eta; u) / h) exp(-eta^2 / 2h) d eta
/// ```
///
/// over `|eta| <= 8 sqrt(h) + 8|u| + 8|x|`. The prefactor combines the kernel
/// normalization with the semiclassical transform of the ground state; the
/// amplitude is `|d_x d_eta Phi|^(1/2)`.
pub fn mehler_propagate(config: &HOConfig, u: f64, x: f64) -> Result<Complex64> {
    let h = config.hbar;
    let t = config.t0;
    let c = check_cos(t)?;
    let window = 8.0 * h.sqrt() + 8.0 * u.abs() + 8.0 * x.abs();
    let integrand = |eta: f64| {
        let phase = mehler_phase_eval(t, x, eta, u).unwrap_or(f64::NAN);
        Complex64::from_polar((-eta * eta / (2.0 * h)).exp(), phase / h)
    };
    let (integral, _) = adaptive_gauss_kronrod(integrand, -window, window, 1e-15, 1e-12, 20_000)?;
    let prefactor = (2.0 * PI * h).powf(-0.5) * (PI * h).powf(-0.25) / c.abs().sqrt();
    Ok(integral * prefactor)
}

/// Exact modulus `(pi h)^(-1/4) exp(-(x + u sin t0)^2 / 2h)`.
pub fn coherent_oracle(hbar: f64, t0: f64, u: f64, x: f64) -> f64 {
    let d = x + u * t0.sin();
    (PI * hbar).powf(-0.25) * (-d * d / (2.0 * hbar)).exp()
}

/// Closed-form `int_{-eps}^{eps} coherent_oracle^2 du`.
pub fn coherent_average(hbar: f64, t0: f64, epsilon: f64, x: f64) -> f64 {
    let s = t0.sin();
    let r = hbar.sqrt();
    0.5 / s * (erf((x + epsilon * s) / r) - erf((x - epsilon * s) / r))
}

/// `erf` through the adaptive integrator; accurate to ~1e-15.
pub(crate) fn erf(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let (v, _) = adaptive_gauss_kronrod(
        |s| Complex64::new((-s * s).exp(), 0.0),
        0.0,
        z.abs().min(10.0),
        1e-17,
        1e-15,
        1000,
    )
    .expect("smooth integrand");
    z.signum() * 2.0 / PI.sqrt() * v.re
}

/// Deformed ground states `phi^(u_m)` for every node of a parameter quadrature.
#[derive(Debug, Clone)]
pub struct HoDeformation {
    config: HOConfig,
    quad: IntervalQuadrature,
    fields: Vec<WaveField>,
    interpolants: Vec<TrigInterpolant>,
}

impl HoDeformation {
    /// Propagates the ground state once per node.
    ///
    /// When the node set is symmetric, only `u >= 0` is propagated and
    /// `phi^(-u)(x) = phi^(u)(-x)` supplies the rest (reflection maps `P_u`
    /// to `P_{-u}` and fixes the ground state).
    pub fn build(config: &HOConfig, quad: &IntervalQuadrature, exec: Execution) -> Result<Self> {
        let ground = ho_ground_state(config);
        let nodes = quad.nodes();
        let n = nodes.len();
        let use_reflection = quad.is_symmetric();
        let todo: Vec<usize> = if use_reflection {
            (n / 2..n).collect()
        } else {
            (0..n).collect()
        };
        let computed = exec.map(&todo, |&m| {
            let op = build_ho_operator(config, nodes[m]);
            propagate_spectral(&op, &ground, config.t0, config.hbar)
        });
        let mut fields: Vec<Option<WaveField>> = vec![None; n];
        for (&m, field) in todo.iter().zip(computed) {
            fields[m] = Some(field?);
        }
        if use_reflection {
            for m in 0..n / 2 {
                let mirror = fields[n - 1 - m].as_ref().expect("upper half computed");
                fields[m] = Some(mirror.reflected()?);
            }
        }
        let fields: Vec<WaveField> = fields.into_iter().map(|f| f.expect("filled")).collect();
        let interpolants = fields
            .iter()
            .map(TrigInterpolant::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: *config,
            quad: quad.clone(),
            fields,
            interpolants,
        })
    }

    pub fn config(&self) -> &HOConfig {
        &self.config
    }

    pub fn quadrature(&self) -> &IntervalQuadrature {
        &self.quad
    }

    pub fn fields(&self) -> &[WaveField] {
        &self.fields
    }

    /// `phi^(u_m)(x)` for every node.
    pub fn values_at(&self, x: f64) -> Vec<Complex64> {
        self.interpolants.iter().map(|p| p.eval(x)).collect()
    }

    /// `|phi^(u_m)(x)|^2` for every node.
    pub fn intensities_at(&self, x: f64) -> Vec<f64> {
        self.values_at(x).iter().map(|v| v.norm_sqr()).collect()
    }

    /// `I(h, t0, x) = sum_m w_m |phi^(u_m)(x)|^2`.
    pub fn averaged_at(&self, x: f64) -> AveragedIntensity {
        let value = self
            .intensities_at(x)
            .iter()
            .zip(self.quad.weights())
            .map(|(i, w)| i * w)
            .sum();
        AveragedIntensity {
            value,
            out_of_band: !self.config.in_band(x),
        }
    }

    /// Grid points lying in `[-half_width, half_width]`.
    fn window_indices(&self, half_width: f64) -> Vec<usize> {
        let g = self.config.grid;
        (0..g.count())
            .filter(|&i| g.point(i).abs() <= half_width)
            .collect()
    }

    /// `sup_x I(h, t0, x)` over grid points of `[-half_width, half_width]`.
    pub fn sup_of_average(&self, half_width: f64) -> f64 {
        let w = self.quad.weights();
        self.window_indices(half_width)
            .into_iter()
            .map(|i| {
                self.fields
                    .iter()
                    .zip(w)
                    .map(|(f, w)| w * f.values()[i].norm_sqr())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `sum_m w_m sup_x |phi^(u_m)(x)|^2` over grid points of the window.
    pub fn average_of_sup(&self, half_width: f64) -> f64 {
        let idx = self.window_indices(half_width);
        self.fields
            .iter()
            .zip(self.quad.weights())
            .map(|(f, w)| {
                w * idx
                    .iter()
                    .map(|&i| f.values()[i].norm_sqr())
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

/// Averaged intensity with the validity-band flag attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedIntensity {
    pub value: f64,
    /// `x` lies outside `|x| <= (1 - BAND_MARGIN) epsilon sin t0`.
    pub out_of_band: bool,
}

/// `I(h, t0, x) = int |phi^(u)(x)|^2 du` with spectral propagation per node.
pub fn averaged_intensity_ho(
    config: &HOConfig,
    x: f64,
    u_quad: &IntervalQuadrature,
) -> Result<AveragedIntensity> {
    check_parameter_interval(config, u_quad)?;
    Ok(HoDeformation::build(config, u_quad, Execution::Parallel)?.averaged_at(x))
}

fn check_parameter_interval(config: &HOConfig, quad: &IntervalQuadrature) -> Result<()> {
    let eps = config.epsilon * (1.0 + 1e-12);
    if quad.nodes().iter().any(|u| u.abs() > eps) {
        return invalid("parameter quadrature leaves [-epsilon, epsilon]");
    }
    Ok(())
}

/// One row of the sup/average exchange table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupRow {
    pub hbar: f64,
    /// `sup_x int |phi^(u)(x)|^2 du`.
    pub sup_of_average: f64,
    /// `int sup_x |phi^(u)(x)|^2 du`.
    pub average_of_sup: f64,
    /// `I(h, t0, 0)`.
    pub average_at_origin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupStatistics {
    pub rows: Vec<SupRow>,
    /// Log-log slope of `average_of_sup` against `h`.
    pub average_of_sup_slope: f64,
    /// `max / min` of `sup_of_average` over the sweep.
    pub sup_of_average_ratio: f64,
}

/// Sup/average statistics over `x` in `[-window, window]`, one row per
/// precomputed deformation (typically an `h` sweep).
pub fn sup_statistics_from(deformations: &[HoDeformation], window: f64) -> Result<SupStatistics> {
    if deformations.len() < 2 {
        return invalid("sup statistics need at least two values of hbar");
    }
    let rows: Vec<SupRow> = deformations
        .iter()
        .map(|d| SupRow {
            hbar: d.config.hbar,
            sup_of_average: d.sup_of_average(window),
            average_of_sup: d.average_of_sup(window),
            average_at_origin: d.averaged_at(0.0).value,
        })
        .collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.hbar).collect();
    let sups: Vec<f64> = rows.iter().map(|r| r.average_of_sup).collect();
    let avgs: Vec<f64> = rows.iter().map(|r| r.sup_of_average).collect();
    Ok(SupStatistics {
        average_of_sup_slope: loglog_slope(&hs, &sups)?,
        sup_of_average_ratio: crate::numerics::spread_ratio(&avgs)?,
        rows,
    })
}

/// Builds the deformations for every configuration and tabulates the
/// statistics over the window `[-epsilon, epsilon]`.
pub fn sup_statistics(
    sweep: &[HOConfig],
    u_quad_nodes: usize,
    exec: Execution,
) -> Result<SupStatistics> {
    let deformations = sweep
        .iter()
        .map(|c| {
            let q = crate::numerics::gauss_legendre(u_quad_nodes, -c.epsilon, c.epsilon)?;
            HoDeformation::build(c, &q, exec)
        })
        .collect::<Result<Vec<_>>>()?;
    let window = sweep.iter().map(|c| c.epsilon).fold(0.0, f64::max);
    sup_statistics_from(&deformations, window)
}

/// Dense `Q_u = U P_0 U*` with `U = exp(-i t0 P_u / h)`.
pub fn conjugated_operator(config: &HOConfig, u: f64) -> Result<Mat<c64>> {
    let p0 = build_ho_operator(config, 0.0);
    let pu = build_ho_operator(config, u);
    let unitary = SpectralPropagator::new(&pu)?.unitary(config.t0);
    Ok(&unitary * p0.matrix() * unitary.adjoint())
}

/// `||Q_u phi^(u) - (h/2) phi^(u)||_2` in the grid norm.
pub fn conjugated_operator_check(config: &HOConfig, u: f64) -> Result<f64> {
    let pu = build_ho_operator(config, u);
    let prop = SpectralPropagator::new(&pu)?;
    let deformed = prop.evolve(&ho_ground_state(config), config.t0)?;
    let unitary = prop.unitary(config.t0);
    let q = &unitary * build_ho_operator(config, 0.0).matrix() * unitary.adjoint();
    let q_phi = &q * column(deformed.values());
    let e = config.energy();
    let grid = config.grid;
    let r: f64 = deformed
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (q_phi[i] - v * e).norm_sqr() * grid.weight(i))
        .sum();
    Ok(r.sqrt())
}
