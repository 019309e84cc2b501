//! Zonal harmonics near the north pole of the round sphere.
//!
//! `Z_n(r) = sqrt((2n + 1) / 4 pi) P_n(cos r)` peaks at the pole with height
//! `~ h^(-1/2)`. Near the pole the deformed harmonic is modelled by the circle
//! integral `(2 pi h)^(-1/2) int exp(i [<x, w> - t0 |w + u|^2] / h) dw`, whose
//! modulus is `sqrt(2 pi / h) |J0(|x - 2 t0 u| / h)|`. Averaging over `u`
//! flattens the peak.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numerics::{
    composite_gauss_legendre, loglog_slope, spread_ratio, BallQuadrature, CircleQuadrature,
};
use crate::Execution;

/// Largest `t0 * epsilon` for which the phase remainder is dropped.
pub const SMALL_DEFORMATION: f64 = 0.2;
/// Largest `|x|` accepted by the surrogate phase.
pub const SURROGATE_RADIUS: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZonalConfig {
    degree: usize,
    hbar: f64,
    t0: f64,
    epsilon: f64,
}

impl ZonalConfig {
    pub fn new(degree: usize, t0: f64, epsilon: f64) -> Result<Self> {
        if degree == 0 {
            return invalid("zonal degree must be positive");
        }
        if !(t0 > 0.0 && t0 <= 0.5) {
            return invalid(format!("t0 must lie in (0, 0.5], got {t0}"));
        }
        if !(epsilon > 0.0) {
            return invalid("epsilon must be positive");
        }
        if t0 * epsilon > SMALL_DEFORMATION {
            return invalid(format!(
                "t0 * epsilon = {} exceeds {SMALL_DEFORMATION}",
                t0 * epsilon
            ));
        }
        let n = degree as f64;
        Ok(Self {
            degree,
            hbar: 1.0 / (n * (n + 1.0)).sqrt(),
            t0,
            epsilon,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
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

    /// `sqrt((2n + 1) / 4 pi)`, the pole value of the L2-normalized harmonic.
    pub fn normalization(&self) -> f64 {
        zonal_normalization(self.degree)
    }

    /// Fewest circle nodes that resolve the surrogate at `|x| = x_norm`.
    pub fn required_circle_nodes(&self, x_norm: f64) -> usize {
        (20.0 * (x_norm + 2.0 * self.t0 * (1.0 + self.epsilon)) / self.hbar).ceil() as usize
    }

    /// A resolved circle rule for every `|x| <= x_norm`, rounded up to a
    /// power of two.
    pub fn circle_for(&self, x_norm: f64) -> Result<CircleQuadrature> {
        CircleQuadrature::new(
            self.required_circle_nodes(x_norm)
                .max(64)
                .next_power_of_two(),
        )
    }
}

pub fn zonal_normalization(n: usize) -> f64 {
    ((2 * n + 1) as f64 / (4.0 * PI)).sqrt()
}

/// `P_n(t)` by the three-term recurrence.
pub fn legendre_pn(n: usize, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return invalid(format!("Legendre argument {t} outside [-1, 1]"));
    }
    let (mut prev, mut cur) = (1.0, t);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * t * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `(1 / 2 pi) int (cos r + i sin r cos tau)^n d tau`, real part.
pub fn zonal_laplace_integral(n: usize, r: f64, quad: &CircleQuadrature) -> Result<f64> {
    if !(0.0..=PI).contains(&r) {
        return invalid(format!("polar angle {r} outside [0, pi]"));
    }
    let required = 4 * n.max(1);
    if quad.node_count() < required {
        return Err(Error::Resolution {
            what: "Laplace integral circle nodes",
            achieved: quad.node_count() as f64,
            required: required as f64,
        });
    }
    let (c, s) = (r.cos(), r.sin());
    let sum: Complex64 = quad
        .angles()
        .iter()
        .map(|tau| Complex64::new(c, s * tau.cos()).powu(n as u32))
        .sum();
    Ok(sum.re * quad.weight() / (2.0 * PI))
}

/// Pole and off-pole values across a degree sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalScaling {
    pub degrees: Vec<usize>,
    pub hbars: Vec<f64>,
    pub pole_values: Vec<f64>,
    /// `|Z_n(1)|`.
    pub off_pole_values: Vec<f64>,
    /// Slope of `log |Z_n(0)|` against `log h`.
    pub slope: f64,
    /// Largest off-pole value over the value at the smallest degree.
    pub off_pole_ratio: f64,
}

/// Regresses the normalized pole value against `h = (n (n + 1))^(-1/2)`.
pub fn zonal_sup_scaling(n_list: &[usize]) -> Result<ZonalScaling> {
    let lo = n_list.iter().copied().min().unwrap_or(0);
    let hi = n_list.iter().copied().max().unwrap_or(0);
    if lo == 0 || hi < 10 * lo {
        return invalid("degree list must be positive and span at least one decade");
    }
    let hbars: Vec<f64> = n_list
        .iter()
        .map(|&n| 1.0 / ((n * (n + 1)) as f64).sqrt())
        .collect();
    let pole_values = n_list
        .iter()
        .map(|&n| Ok(zonal_normalization(n) * legendre_pn(n, 1.0)?))
        .collect::<Result<Vec<_>>>()?;
    let off_pole_values = n_list
        .iter()
        .map(|&n| Ok(zonal_normalization(n) * legendre_pn(n, 1f64.cos())?.abs()))
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&hbars, &pole_values)?;
    let at_lo = n_list
        .iter()
        .position(|&n| n == lo)
        .expect("minimum is present");
    let off_pole_ratio =
        off_pole_values.iter().copied().fold(0.0, f64::max) / off_pole_values[at_lo];
    Ok(ZonalScaling {
        degrees: n_list.to_vec(),
        hbars,
        pole_values,
        off_pole_values,
        slope,
        off_pole_ratio,
    })
}

/// `<x, w> - t0 |w + u|^2` on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogatePhase {
    t0: f64,
    u: [f64; 2],
    x: [f64; 2],
}

impl SurrogatePhase {
    pub fn new(config: &ZonalConfig, u: [f64; 2], x: [f64; 2]) -> Result<Self> {
        if norm2(x) > SURROGATE_RADIUS {
            return invalid(format!("|x| = {} exceeds {SURROGATE_RADIUS}", norm2(x)));
        }
        if norm2(u) > config.epsilon * (1.0 + 1e-12) {
            return invalid(format!("|u| = {} exceeds epsilon", norm2(u)));
        }
        Ok(Self {
            t0: config.t0,
            u,
            x,
        })
    }

    pub fn eval(&self, angle: f64) -> f64 {
        let w = [angle.cos(), angle.sin()];
        let shifted = [w[0] + self.u[0], w[1] + self.u[1]];
        self.x[0] * w[0] + self.x[1] * w[1]
            - self.t0 * (shifted[0] * shifted[0] + shifted[1] * shifted[1])
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// `(2 pi h)^(-1/2) sum_m w_m exp(i Phi(w_m) / h)` with unit amplitude.
pub fn deformed_zonal_surrogate(
    config: &ZonalConfig,
    u: [f64; 2],
    x: [f64; 2],
    quad: &CircleQuadrature,
) -> Result<Complex64> {
    let phase = SurrogatePhase::new(config, u, x)?;
    let required = config.required_circle_nodes(norm2(x));
    if quad.node_count() < required {
        return Err(Error::Resolution {
            what: "surrogate circle nodes",
            achieved: quad.node_count() as f64,
            required: required as f64,
        });
    }
    let h = config.hbar;
    let sum: Complex64 = quad
        .angles()
        .iter()
        .map(|&a| Complex64::from_polar(1.0, phase.eval(a) / h))
        .sum();
    Ok(sum * quad.weight() / (2.0 * PI * h).sqrt())
}

/// `J0(z) = (1 / pi) int_0^pi cos(z sin theta) d theta` by panelled
/// Gauss–Legendre.
pub fn bessel_j0(z: f64) -> f64 {
    let panels = (z.abs() / 2.0).ceil() as usize + 2;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| PI * i as f64 / panels as f64)
        .collect();
    let quad = composite_gauss_legendre(&breaks, 20).expect("fixed valid panels");
    quad.integrate(|theta| (z * theta.sin()).cos()) / PI
}

/// `sqrt(2 pi / h) |J0(|x - 2 t0 u| / h)|`.
pub fn bessel_oracle(hbar: f64, t0: f64, u: [f64; 2], x: [f64; 2]) -> f64 {
    let w = [x[0] - 2.0 * t0 * u[0], x[1] - 2.0 * t0 * u[1]];
    (2.0 * PI / hbar).sqrt() * bessel_j0(norm2(w) / hbar).abs()
}

/// Limit of the disk-averaged intensity at the pole as `h -> 0`.
pub fn zonal_average_limit(config: &ZonalConfig) -> f64 {
    2.0 * PI * config.epsilon / config.t0
}

/// `sum_m w_m |Z^(u_m)(x)|^2` over a disk of radius epsilon.
pub fn averaged_intensity_zonal(
    config: &ZonalConfig,
    x: [f64; 2],
    disk: &BallQuadrature,
    quad: &CircleQuadrature,
    exec: Execution,
) -> Result<f64> {
    if disk.dimension() != 2 || (disk.radius() - config.epsilon).abs() > 1e-12 * config.epsilon {
        return invalid("disk quadrature must be two-dimensional with radius epsilon");
    }
    if norm2(x) > config.epsilon * config.t0 * (1.0 + 1e-12) {
        return invalid("x must lie within epsilon * t0 of the pole");
    }
    let idx: Vec<usize> = (0..disk.len()).collect();
    let terms = exec.map(&idx, |&m| -> Result<f64> {
        let node = &disk.nodes()[m];
        let z = deformed_zonal_surrogate(config, [node[0], node[1]], x, quad)?;
        let v = disk.weights()[m] * z.norm_sqr();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { node: m })
        }
    });
    terms.into_iter().sum()
}

/// Sampling of the local sup check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSupGrid {
    pub x_radii: usize,
    pub x_angles: usize,
    pub u_radii: usize,
    pub u_angles: usize,
}

impl Default for LocalSupGrid {
    fn default() -> Self {
        Self {
            x_radii: 4,
            x_angles: 8,
            u_radii: 9,
            u_angles: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSup {
    pub hbar: f64,
    /// Largest surrogate modulus over the samples.
    pub sup: f64,
    /// Largest Bessel-oracle modulus over the same samples.
    pub oracle_sup: f64,
    /// Smallest `|x - 2 t0 u| / h` over the samples.
    pub min_argument: f64,
    /// `sqrt(2 pi / h) min(1, sqrt(2 / (pi z)))` at the smallest argument.
    pub envelope: f64,
}

/// Sup of the surrogate over `|x| <= eps / c0` and `eps / 2 <= |u| <= eps`.
pub fn local_sup_bound_check(
    config: &ZonalConfig,
    c0: f64,
    sampling: &LocalSupGrid,
    exec: Execution,
) -> Result<LocalSup> {
    if !(c0 >= 4.0) {
        return invalid(format!("local sup constant must be at least 4, got {c0}"));
    }
    let eps = config.epsilon;
    let x_max = eps / c0;
    let ring = |r: f64, angles: usize| -> Vec<[f64; 2]> {
        (0..angles)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / angles as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect()
    };
    let mut xs = vec![[0.0, 0.0]];
    for i in 1..=sampling.x_radii {
        xs.extend(ring(
            x_max * i as f64 / sampling.x_radii as f64,
            sampling.x_angles,
        ));
    }
    let mut us = vec![];
    for i in 0..sampling.u_radii {
        let r = eps * (0.5 + 0.5 * i as f64 / (sampling.u_radii - 1).max(1) as f64);
        us.extend(ring(r, sampling.u_angles));
    }
    let quad = config.circle_for(x_max)?;
    let h = config.hbar;
    let rows = exec.map(&xs, |&x| -> Result<(f64, f64, f64)> {
        let mut best = (0.0f64, 0.0f64, f64::INFINITY);
        for &u in &us {
            let z = deformed_zonal_surrogate(config, u, x, &quad)?.norm();
            let o = bessel_oracle(h, config.t0, u, x);
            let arg = norm2([x[0] - 2.0 * config.t0 * u[0], x[1] - 2.0 * config.t0 * u[1]]) / h;
            best = (best.0.max(z), best.1.max(o), best.2.min(arg));
        }
        Ok(best)
    });
    let mut out = LocalSup {
        hbar: h,
        sup: 0.0,
        oracle_sup: 0.0,
        min_argument: f64::INFINITY,
        envelope: 0.0,
    };
    for row in rows {
        let (s, o, a) = row?;
        out.sup = out.sup.max(s);
        out.oracle_sup = out.oracle_sup.max(o);
        out.min_argument = out.min_argument.min(a);
    }
    out.envelope = (2.0 * PI / h).sqrt() * (2.0 / (PI * out.min_argument)).sqrt().min(1.0);
    Ok(out)
}

/// Averaged and undeformed pole values across a degree sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalAverageSweep {
    pub hbars: Vec<f64>,
    pub averaged: Vec<f64>,
    /// `|Z^(0)(0)|^2 = 2 pi / h`.
    pub undeformed: Vec<f64>,
    pub averaged_slope: f64,
    pub undeformed_slope: f64,
    pub averaged_ratio: f64,
}

pub fn zonal_average_sweep(
    configs: &[ZonalConfig],
    x: [f64; 2],
    disk: &BallQuadrature,
    exec: Execution,
) -> Result<ZonalAverageSweep> {
    let mut hbars = vec![];
    let mut averaged = vec![];
    let mut undeformed = vec![];
    for cfg in configs {
        let quad = cfg.circle_for(norm2(x))?;
        hbars.push(cfg.hbar);
        averaged.push(averaged_intensity_zonal(cfg, x, disk, &quad, exec)?);
        undeformed.push(deformed_zonal_surrogate(cfg, [0.0, 0.0], [0.0, 0.0], &quad)?.norm_sqr());
    }
    Ok(ZonalAverageSweep {
        averaged_slope: loglog_slope(&hbars, &averaged)?,
        undeformed_slope: loglog_slope(&hbars, &undeformed)?,
        averaged_ratio: spread_ratio(&averaged)?,
        hbars,
        averaged,
        undeformed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::disk_quadrature;

    #[test]
    fn config_validation() {
        assert!(ZonalConfig::new(0, 0.1, 0.4).is_err());
        assert!(ZonalConfig::new(10, 0.0, 0.4).is_err());
        assert!(ZonalConfig::new(10, 0.6, 0.1).is_err());
        assert!(ZonalConfig::new(10, 0.5, 0.5).is_err());
        let c = ZonalConfig::new(10, 0.5, 0.4).unwrap();
        assert!((c.hbar() * (110f64).sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn legendre_seeds_and_endpoints() {
        for t in [-1.0, -0.3, 0.0, 0.8] {
            assert_eq!(legendre_pn(0, t).unwrap(), 1.0);
            assert_eq!(legendre_pn(1, t).unwrap(), t);
        }
        for n in [2, 7, 50, 400] {
            assert!((legendre_pn(n, 1.0).unwrap() - 1.0).abs() < 1e-12);
            let m = legendre_pn(n, -1.0).unwrap();
            let want = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m - want).abs() < 1e-12);
        }
        assert!(legendre_pn(3, 1.1).is_err());
        assert!(legendre_pn(3, f64::NAN).is_err());
        // P_2 = (3t^2 - 1)/2, P_3 = (5t^3 - 3t)/2
        let t: f64 = 0.37;
        assert!((legendre_pn(2, t).unwrap() - (3.0 * t * t - 1.0) / 2.0).abs() < 1e-15);
        assert!((legendre_pn(3, t).unwrap() - (5.0 * t.powi(3) - 3.0 * t) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_stays_bounded() {
        for n in [10, 100, 400] {
            for i in 0..=200 {
                let t = -1.0 + 0.01 * i as f64;
                assert!(legendre_pn(n, t).unwrap().abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn laplace_integral_special_values() {
        let q = CircleQuadrature::new(256).unwrap();
        for n in [1, 5, 20, 64] {
            assert!((zonal_laplace_integral(n, 0.0, &q).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((zonal_laplace_integral(1, PI / 3.0, &q).unwrap() - 0.5).abs() < 1e-12);
        let p5 = legendre_pn(5, 0.3).unwrap();
        assert!((zonal_laplace_integral(5, 0.3f64.acos(), &q).unwrap() - p5).abs() < 1e-10);
    }

    #[test]
    fn laplace_integral_matches_recurrence() {
        for n in [50, 137, 400] {
            let q = CircleQuadrature::new(4 * n).unwrap();
            for i in 0..=40 {
                let r = PI * i as f64 / 40.0;
                let a = zonal_laplace_integral(n, r, &q).unwrap();
                let b = legendre_pn(n, r.cos()).unwrap();
                assert!((a - b).abs() < 1e-10, "n={n} r={r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn laplace_integral_rejects_coarse_rules() {
        let q = CircleQuadrature::new(100).unwrap();
        assert!(matches!(
            zonal_laplace_integral(50, 0.7, &q),
            Err(Error::Resolution { .. })
        ));
        assert!(zonal_laplace_integral(5, -0.1, &q).is_err());
    }

    #[test]
    fn pole_scaling_slope() {
        let s = zonal_sup_scaling(&[10, 20, 50, 100, 200, 400]).unwrap();
        assert!((s.slope + 0.5).abs() < 0.01, "{}", s.slope);
        for (&n, &v) in s.degrees.iter().zip(&s.pole_values) {
            assert!((v - zonal_normalization(n)).abs() < 1e-12);
        }
        assert!(s.off_pole_ratio <= 10.0);
        assert!(zonal_sup_scaling(&[10, 20, 50]).is_err());
    }

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-15);
        // tabulated J0(1), J0(10), J0(30.5)
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-14);
        assert!((bessel_j0(-3.0) - bessel_j0(3.0)).abs() < 1e-15);
    }

    #[test]
    fn bessel_envelope() {
        for i in 0..400 {
            let z = 5.0 + 0.37 * i as f64;
            assert!(bessel_j0(z).abs() <= 1.1 * (2.0 / (PI * z)).sqrt());
        }
    }

    #[test]
    fn surrogate_undeformed_pole_value() {
        let c = ZonalConfig::new(50, 0.1, 0.4).unwrap();
        let q = c.circle_for(0.0).unwrap();
        let z = deformed_zonal_surrogate(&c, [0.0, 0.0], [0.0, 0.0], &q).unwrap();
        assert!((z.norm() - (2.0 * PI / c.hbar()).sqrt()).abs() < 1e-12 * z.norm());
        assert!(
            (bessel_oracle(c.hbar(), 0.1, [0.0, 0.0], [0.0, 0.0]) - z.norm()).abs()
                < 1e-12 * z.norm()
        );
    }

    #[test]
    fn surrogate_matches_bessel_oracle() {
        for n in [20, 100, 400] {
            let c = ZonalConfig::new(n, 0.1, 0.4).unwrap();
            let q = c.circle_for(0.3).unwrap();
            let scale = (2.0 * PI / c.hbar()).sqrt();
            for (u, x) in [
                ([0.1, -0.2], [0.0, 0.0]),
                ([0.4, 0.0], [0.03, 0.01]),
                ([-0.25, 0.3], [0.2, -0.1]),
                ([0.0, 0.05], [-0.29, 0.0]),
            ] {
                let z = deformed_zonal_surrogate(&c, u, x, &q).unwrap().norm();
                let o = bessel_oracle(c.hbar(), 0.1, u, x);
                assert!((z - o).abs() < 1e-8 * scale, "n={n} {z} vs {o}");
            }
        }
    }

    #[test]
    fn surrogate_is_converged_in_node_count() {
        let c = ZonalConfig::new(200, 0.1, 0.4).unwrap();
        let q = c.circle_for(0.1).unwrap();
        let q2 = CircleQuadrature::new(2 * q.node_count()).unwrap();
        let scale = (2.0 * PI / c.hbar()).sqrt();
        let a = deformed_zonal_surrogate(&c, [0.2, 0.1], [0.05, -0.02], &q).unwrap();
        let b = deformed_zonal_surrogate(&c, [0.2, 0.1], [0.05, -0.02], &q2).unwrap();
        assert!((a - b).norm() < 1e-8 * scale);
    }

    #[test]
    fn surrogate_rejects_coarse_rules_and_wide_points() {
        let c = ZonalConfig::new(200, 0.1, 0.4).unwrap();
        let q = CircleQuadrature::new(64).unwrap();
        assert!(matches!(
            deformed_zonal_surrogate(&c, [0.0, 0.0], [0.0, 0.0], &q),
            Err(Error::Resolution { .. })
        ));
        let q = c.circle_for(0.3).unwrap();
        assert!(deformed_zonal_surrogate(&c, [0.0, 0.0], [0.31, 0.0], &q).is_err());
        assert!(deformed_zonal_surrogate(&c, [0.5, 0.0], [0.0, 0.0], &q).is_err());
    }

    #[test]
    fn surrogate_vanishes_at_a_bessel_zero() {
        let c = ZonalConfig::new(100, 0.1, 0.4).unwrap();
        let q = c.circle_for(0.0).unwrap();
        let r = 2.404_825_557_695_773 * c.hbar() / (2.0 * 0.1);
        let z = deformed_zonal_surrogate(&c, [r, 0.0], [0.0, 0.0], &q)
            .unwrap()
            .norm();
        assert!(z < 1e-8 * (2.0 * PI / c.hbar()).sqrt());
    }

    #[test]
    fn averaged_intensity_is_rotation_invariant() {
        let c = ZonalConfig::new(40, 0.2, 0.4).unwrap();
        let disk = disk_quadrature(0.4, 48, 96).unwrap();
        let q = c.circle_for(0.08).unwrap();
        let r = 0.05;
        let vals: Vec<f64> = [0.0, 0.7, 2.0, 4.1]
            .iter()
            .map(|a: &f64| {
                averaged_intensity_zonal(
                    &c,
                    [r * a.cos(), r * a.sin()],
                    &disk,
                    &q,
                    Execution::Serial,
                )
                .unwrap()
            })
            .collect();
        for v in &vals {
            assert!((v - vals[0]).abs() < 1e-6 * vals[0], "{vals:?}");
        }
    }

    #[test]
    fn averaged_intensity_preconditions() {
        let c = ZonalConfig::new(40, 0.2, 0.4).unwrap();
        let q = c.circle_for(0.1).unwrap();
        let wrong = disk_quadrature(0.3, 8, 16).unwrap();
        assert!(averaged_intensity_zonal(&c, [0.0, 0.0], &wrong, &q, Execution::Serial).is_err());
        let disk = disk_quadrature(0.4, 8, 16).unwrap();
        assert!(averaged_intensity_zonal(&c, [0.1, 0.0], &disk, &q, Execution::Serial).is_err());
    }

    #[test]
    fn local_sup_away_from_the_focus() {
        let c = ZonalConfig::new(200, 0.1, 0.4).unwrap();
        let r =
            local_sup_bound_check(&c, 20.0, &LocalSupGrid::default(), Execution::Parallel).unwrap();
        let pole = (2.0 * PI / c.hbar()).sqrt();
        assert!(r.sup < 0.5 * pole);
        assert!((r.sup - r.oracle_sup).abs() <= 0.2 * r.oracle_sup);
        assert!(r.sup <= 1.2 * r.envelope);
        assert!(
            local_sup_bound_check(&c, 3.0, &LocalSupGrid::default(), Execution::Serial).is_err()
        );
    }
}
