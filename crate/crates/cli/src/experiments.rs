//! One function per experiment mode.
//!
//! Defaults reproduce the documented acceptance settings, so an empty config
//! runs the reference experiment. Numerical failures (resolution, boundary
//! leakage, non-finite values) become `error:resolution` rows and the sweep
//! continues; invalid arguments abort with a configuration error.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use magdeform::deformlab::{
    admissibility_check, fubini_check, good_set_fraction, iterated_both_orders, two_sided_band,
    AverageProfile, Curve, MagneticFamily, DEFAULT_ADMISSIBILITY_THRESHOLD, DEFAULT_BAND_BOUND,
    FUBINI_TOLERANCE,
};
use magdeform::flatmag::{
    averaged_intensity_flat_with, cutoff_parameter_quadrature, flat_magnetic_propagate,
    flat_magnetic_propagate_2d, translate, weyl_quantize_chi, FlatState, FlatState2, Interpolant2,
    TimeDirection,
};
use magdeform::numerics::{
    composite_gauss_legendre, dft_forward, dft_inverse, disk_quadrature, gauss_legendre,
    loglog_slope, spread_ratio, TrigInterpolant,
};
use magdeform::oscillator::{
    build_ho_operator, coherent_average, coherent_oracle, conjugated_operator_check,
    ho_ground_state, mehler_propagate, propagate_spectral, sup_statistics_from, HOConfig,
    HoDeformation, SpectralPropagator,
};
use magdeform::zonal::{
    bessel_oracle, deformed_zonal_surrogate, legendre_pn, local_sup_bound_check,
    zonal_average_limit, zonal_average_sweep, zonal_laplace_integral, zonal_normalization,
    LocalSupGrid, ZonalConfig,
};
use magdeform::{
    BallQuadrature, CircleQuadrature, Complex64, CutoffProfile, Error, Execution, UniformGrid,
    WaveField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::ConfigError;
use crate::report::{Check, Outcome, ReportRow};

const HO_SWEEP: [f64; 4] = [0.08, 0.04, 0.02, 0.01];
const HO_T0: f64 = 0.5;
const HO_EPS: f64 = 0.5;
const ZONAL_T0: f64 = 0.1;
const ZONAL_EPS: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub exec: Execution,
    /// Multiplies every check tolerance.
    pub tolerance_scale: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            exec: Execution::Parallel,
            tolerance_scale: 1.0,
        }
    }
}

/// Accumulates rows and verdicts while an experiment runs.
struct Run {
    settings: Settings,
    out: Outcome,
}

impl Run {
    fn scale(&self) -> f64 {
        self.settings.tolerance_scale
    }

    fn exec(&self) -> Execution {
        self.settings.exec
    }

    /// Routes a numerical failure into an error row; invalid arguments abort.
    fn attempt<T>(
        &mut self,
        result: magdeform::Result<T>,
        tag: &str,
        hbar: Option<f64>,
        x: Option<f64>,
    ) -> Result<Option<T>, ConfigError> {
        match result {
            Ok(v) => Ok(Some(v)),
            Err(Error::InvalidArgument(msg)) => Err(ConfigError::Invalid(msg)),
            Err(e) => {
                self.out
                    .rows
                    .push(ReportRow::resolution_error(tag, hbar, x));
                self.out.diagnostics.push(format!("{tag}: {e}"));
                Ok(None)
            }
        }
    }

    fn check(&mut self, c: Check) {
        self.out.checks.push(c);
    }

    fn detail(&mut self, key: &str, value: serde_json::Value) {
        self.out.details.insert(key.to_string(), value);
    }
}

/// Runs `experiment` in `mode` without touching the filesystem.
pub fn execute(
    experiment: Experiment,
    mode: &str,
    config: &ExperimentConfig,
    settings: Settings,
) -> Result<Outcome, ConfigError> {
    if !(settings.tolerance_scale > 0.0 && settings.tolerance_scale.is_finite()) {
        return Err(ConfigError::invalid("tolerance scale must be positive"));
    }
    let mut run = Run {
        settings,
        out: Outcome::default(),
    };
    match (experiment, mode) {
        (Experiment::HoAverage, "band") => ho_band(config, &mut run)?,
        (Experiment::HoAverage, "oracle-triangle") => ho_triangle(config, &mut run)?,
        (Experiment::HoAverage, "invariants") => ho_invariants(config, &mut run)?,
        (Experiment::SupScaling, _) => sup_scaling(config, &mut run)?,
        (Experiment::FlatAverage, _) => flat_average(config, &mut run)?,
        (Experiment::ZonalAverage, "consistency") => zonal_consistency(config, &mut run)?,
        (Experiment::ZonalAverage, _) => zonal_average(config, &mut run)?,
        (Experiment::Restriction, _) => restriction(config, &mut run)?,
        (Experiment::Admissibility, _) => admissibility(config, &mut run)?,
        (e, m) => return Err(ConfigError::invalid(format!("no mode {m:?} for {e}"))),
    }
    Ok(run.out)
}

fn list_or<T: Clone>(given: &[T], default: &[T]) -> Vec<T> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

fn ho_configs(config: &ExperimentConfig, count: usize) -> Result<Vec<HOConfig>, ConfigError> {
    let t0 = config.t0.unwrap_or(HO_T0);
    let eps = config.epsilon.unwrap_or(HO_EPS);
    let half = config
        .box_half_width
        .unwrap_or(HOConfig::DEFAULT_HALF_WIDTH);
    let grid = UniformGrid::periodic_centered(half, config.grid_count.unwrap_or(count))?;
    list_or(&config.hbar_list, &HO_SWEEP)
        .into_iter()
        .map(|h| Ok(HOConfig::new(h, t0, eps, grid)?))
        .collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Builds the deformations of an oscillator sweep, skipping failed values.
fn ho_deformations(
    configs: &[HOConfig],
    u_nodes: usize,
    tag: &str,
    run: &mut Run,
) -> Result<Vec<HoDeformation>, ConfigError> {
    let mut out = vec![];
    for c in configs {
        let quad = gauss_legendre(u_nodes, -c.epsilon(), c.epsilon())?;
        let built = HoDeformation::build(c, &quad, run.exec());
        if let Some(d) = run.attempt(built, tag, Some(c.hbar()), None)? {
            out.push(d);
        }
    }
    Ok(out)
}

fn ho_band(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let id = "ho-average";
    let configs = ho_configs(config, HOConfig::DEFAULT_COUNT)?;
    let t0 = configs[0].t0();
    let s = t0.sin();
    let aggregate = config.x_samples.is_empty();
    let xs = if aggregate {
        vec![0.0]
    } else {
        config.x_samples.clone()
    };
    let started = Instant::now();
    let sweep = ho_deformations(&configs, config.u_nodes.unwrap_or(16), id, run)?;
    let elapsed = started.elapsed().as_secs_f64();

    let oracle = 1.0 / s;
    let mut profiles = vec![];
    let mut deviations = vec![];
    let mut closed_form_gap = 0.0f64;
    for d in &sweep {
        let c = d.config();
        let values: Vec<f64> = xs.iter().map(|&x| d.averaged_at(x).value).collect();
        for (&x, &v) in xs.iter().zip(&values) {
            let exact = coherent_average(c.hbar(), c.t0(), c.epsilon(), x);
            closed_form_gap = closed_form_gap.max((v - exact).abs() / exact);
            if !aggregate {
                let row = ReportRow::new(id, Some(c.hbar()), Some(x), v)
                    .against(oracle, oracle)
                    .out_of_band(!c.in_band(x));
                run.out.rows.push(row);
            }
        }
        deviations.push(
            xs.iter()
                .zip(&values)
                .map(|(_, v)| (v * s - 1.0).abs())
                .collect::<Vec<_>>(),
        );
        if let Some(p) = run.attempt(
            AverageProfile::new(c.hbar(), xs.clone(), values),
            id,
            Some(c.hbar()),
            None,
        )? {
            profiles.push(p);
        }
    }
    if sweep.is_empty() {
        return Ok(());
    }
    if aggregate {
        let at_origin: Vec<f64> = profiles.iter().map(|p| p.values[0]).collect();
        if let Some(r) = run.attempt(spread_ratio(&at_origin), id, None, None)? {
            run.out.rows.push(ReportRow::new(id, None, None, r));
        }
    }

    let scale = run.scale();
    let last = deviations.last().expect("non-empty sweep");
    run.check(Check::at_most(
        "max |I sin t0 - 1| at the smallest hbar",
        max_of(last.iter().copied()),
        0.15,
        scale,
    ));
    let decreasing = (0..xs.len()).all(|j| deviations.windows(2).all(|w| w[1][j] < w[0][j]));
    run.check(Check::flag(
        "|I sin t0 - 1| decreases with hbar",
        decreasing,
    ));
    run.check(Check::at_most(
        "relative gap to the closed form",
        closed_form_gap,
        1e-6,
        scale,
    ));
    run.check(Check::at_most("sweep seconds", elapsed, 120.0, scale));
    if profiles.len() >= 3 {
        if let Some(band) = run.attempt(
            two_sided_band(&profiles, DEFAULT_BAND_BOUND),
            id,
            None,
            None,
        )? {
            run.out.ratios.insert("band".into(), band.ratio);
            run.detail("band", json!({ "c1": band.c1, "c2": band.c2 }));
            run.check(Check::ratio(
                "band max/min",
                band.ratio,
                DEFAULT_BAND_BOUND,
                scale,
            ));
        }
    }
    let hs: Vec<f64> = sweep.iter().map(|d| d.config().hbar()).collect();
    let worst: Vec<f64> = deviations
        .iter()
        .map(|d| max_of(d.iter().copied()))
        .collect();
    if worst.iter().all(|&w| w > 0.0) && hs.len() >= 2 {
        if let Ok(slope) = loglog_slope(&hs, &worst) {
            run.out.slopes.insert("max_deviation".into(), slope);
        }
    }
    run.detail("limit", json!(oracle));
    run.detail("sweep_seconds", json!(elapsed));
    Ok(())
}

fn ho_triangle(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let mut config = config.clone();
    if config.hbar_list.is_empty() {
        config.hbar_list = vec![0.1, 0.05, 0.02];
    }
    let configs = ho_configs(&config, 1024)?;
    let us = list_or(&config.u_values, &[-0.25, 0.0, 0.25]);
    let default_xs: Vec<f64> = (0..41).map(|i| -1.2 + 0.06 * i as f64).collect();
    let xs = list_or(&config.x_samples, &default_xs);
    let mut worst = 0.0f64;
    for c in &configs {
        let h = c.hbar();
        let ground = ho_ground_state(c);
        let tasks: Vec<f64> = us.clone();
        let fields = run.exec().map(&tasks, |&u| {
            propagate_spectral(&build_ho_operator(c, u), &ground, c.t0(), h)
        });
        for (&u, field) in us.iter().zip(fields) {
            let tag = format!("ho-average:u={u}");
            let Some(phi) = run.attempt(
                field.and_then(|f| TrigInterpolant::new(&f)),
                &tag,
                Some(h),
                None,
            )?
            else {
                continue;
            };
            let coherent: Vec<f64> = xs
                .iter()
                .map(|&x| coherent_oracle(h, c.t0(), u, x))
                .collect();
            let scale = max_of(coherent.iter().copied());
            for (&x, &exact) in xs.iter().zip(&coherent) {
                let Some(m) = run.attempt(mehler_propagate(c, u, x), &tag, Some(h), Some(x))?
                else {
                    continue;
                };
                let spectral = phi.eval(x).norm();
                let mehler = m.norm();
                let gap = [
                    (spectral - mehler).abs(),
                    (spectral - exact).abs(),
                    (mehler - exact).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max)
                    / scale;
                worst = worst.max(gap);
                run.out.rows.push(
                    ReportRow::new(tag.clone(), Some(h), Some(x), spectral)
                        .against(exact, scale)
                        .with_gap(gap),
                );
            }
        }
    }
    let scale = run.scale();
    run.check(Check::at_most(
        "pairwise relative sup-norm gap",
        worst,
        1e-6,
        scale,
    ));
    Ok(())
}

fn ho_invariants(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let started = Instant::now();
    let mut config = config.clone();
    if config.hbar_list.is_empty() {
        config.hbar_list = vec![0.05];
    }
    let configs = ho_configs(&config, 512)?;
    let shifts = list_or(&config.u_values, &[-0.25, 0.25, 0.5]);
    let (mut unitarity, mut gauge, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    for c in &configs {
        let h = c.hbar();
        let t0 = c.t0();
        let results = run.exec().map(&shifts, |&u| {
            let p = SpectralPropagator::new(&build_ho_operator(c, u))?;
            let m = p.unitary(t0);
            let gram = m.adjoint() * &m;
            let mut defect = 0.0f64;
            for j in 0..gram.ncols() {
                for i in 0..gram.nrows() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    defect = defect.max((gram[(i, j)] - Complex64::new(want, 0.0)).norm());
                }
            }
            Ok((
                defect,
                p.eigenvalues().to_vec(),
                conjugated_operator_check(c, u)?,
            ))
        });
        let reference = SpectralPropagator::new(&build_ho_operator(c, 0.0));
        let Some(reference) = run.attempt(reference, "ho-average:gauge", Some(h), None)? else {
            continue;
        };
        let (mut u_h, mut g_h, mut r_h) = (0.0f64, 0.0f64, 0.0f64);
        for r in results {
            let Some((defect, eigs, res)) =
                run.attempt(r, "ho-average:unitarity", Some(h), None)?
            else {
                continue;
            };
            u_h = u_h.max(defect);
            r_h = r_h.max(res);
            let k = 40.min(eigs.len());
            g_h = g_h.max(max_of(
                (0..k).map(|i| (eigs[i] - reference.eigenvalues()[i]).abs()),
            ));
        }
        let flat_grid = UniformGrid::periodic_centered(10.0, c.grid().count())?;
        let gaussian = FlatState::gaussian(flat_grid, h, 0.2)?;
        for shift in [-1.0, 0.3, 2.0] {
            let moved = flat_magnetic_propagate(&gaussian, &[shift], TimeDirection::Forward);
            if let Some(m) = run.attempt(moved, "ho-average:unitarity", Some(h), None)? {
                u_h = u_h.max((m.field().l2_norm() - gaussian.field().l2_norm()).abs());
            }
        }
        for (tag, v) in [
            ("ho-average:unitarity", u_h),
            ("ho-average:gauge", g_h),
            ("ho-average:conjugation", r_h),
        ] {
            run.out
                .rows
                .push(ReportRow::new(tag, Some(h), None, v).against(0.0, 1.0));
        }
        unitarity = unitarity.max(u_h);
        gauge = gauge.max(g_h);
        residual = residual.max(r_h);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut parseval = 0.0f64;
    for n in [64, 256, 1024] {
        let grid = UniformGrid::periodic_centered(5.0, n)?;
        let values: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let field = WaveField::new(grid, values, 0.03)?;
        let round_trip = dft_forward(&field).and_then(|s| {
            let energy = (s.l2_norm_sqr() - field.l2_norm_sqr()).abs() / field.l2_norm_sqr();
            let back = dft_inverse(&s)?;
            let gap = max_of(
                back.values()
                    .iter()
                    .zip(field.values())
                    .map(|(a, b)| (a - b).norm()),
            );
            Ok(energy.max(gap))
        });
        if let Some(v) = run.attempt(round_trip, "ho-average:parseval", None, None)? {
            parseval = parseval.max(v);
        }
    }
    run.out
        .rows
        .push(ReportRow::new("ho-average:parseval", None, None, parseval).against(0.0, 1.0));

    let elapsed = started.elapsed().as_secs_f64();
    let scale = run.scale();
    run.check(Check::at_most(
        "propagator unitarity",
        unitarity,
        1e-10,
        scale,
    ));
    run.check(Check::at_most(
        "spectral gauge invariance",
        gauge,
        1e-8,
        scale,
    ));
    run.check(Check::at_most(
        "conjugated eigenfunction residual",
        residual,
        1e-6,
        scale,
    ));
    run.check(Check::at_most(
        "DFT Parseval and round trip",
        parseval,
        1e-12,
        scale,
    ));
    run.check(Check::at_most(
        "invariant suite seconds",
        elapsed,
        600.0,
        scale,
    ));
    Ok(())
}

fn sup_scaling(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let id = "sup-scaling";
    let configs = ho_configs(config, HOConfig::DEFAULT_COUNT)?;
    let sweep = ho_deformations(&configs, config.u_nodes.unwrap_or(16), id, run)?;
    let window = configs[0].epsilon();
    let Some(stats) = run.attempt(sup_statistics_from(&sweep, window), id, None, None)? else {
        return Ok(());
    };
    for r in &stats.rows {
        // a coherent state keeps its peak (pi h)^(-1/2)
        let oracle = 2.0 * window / (PI * r.hbar).sqrt();
        run.out
            .rows
            .push(ReportRow::new(id, Some(r.hbar), None, r.average_of_sup).against(oracle, oracle));
        run.out.rows.push(ReportRow::new(
            "sup-scaling:sup-of-average",
            Some(r.hbar),
            None,
            r.sup_of_average,
        ));
    }
    run.out
        .slopes
        .insert("average_of_sup".into(), stats.average_of_sup_slope);
    run.out
        .ratios
        .insert("sup_of_average".into(), stats.sup_of_average_ratio);
    let scale = run.scale();
    run.check(Check::within(
        "log-log slope",
        stats.average_of_sup_slope,
        -0.5,
        0.05,
        scale,
    ));
    run.check(Check::ratio(
        "sup_x average max/min",
        stats.sup_of_average_ratio,
        2.0,
        scale,
    ));
    Ok(())
}

fn flat_average(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let id = "flat-average";
    let hbars = list_or(&config.hbar_list, &[0.1, 0.05, 0.02]);
    let grid = UniformGrid::periodic_centered(
        config.box_half_width.unwrap_or(10.0),
        config.grid_count.unwrap_or(512),
    )?;
    let chi = match (config.cutoff_inner, config.cutoff_outer) {
        (None, None) => CutoffProfile::default(),
        (a, b) => {
            let d = CutoffProfile::default();
            CutoffProfile::new(a.unwrap_or(d.inner()), b.unwrap_or(d.outer()))?
        }
    };
    let quad = cutoff_parameter_quadrature(&chi, config.u_nodes.unwrap_or(32))?;
    let aggregate = config.x_samples.is_empty();
    let default_xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    let xs = if aggregate {
        vec![0.0]
    } else {
        list_or(&config.x_samples, &default_xs)
    };

    let mut worst = 0.0f64;
    let mut sups = vec![];
    for &h in &hbars {
        let prepared = FlatState::gaussian(grid, h, 0.0)
            .and_then(|s| Ok((weyl_quantize_chi(&grid, h, &chi)?, s)));
        let Some((weyl, state)) = run.attempt(prepared, id, Some(h), None)? else {
            continue;
        };
        let mut sup = 0.0f64;
        let mut complete = true;
        for &x in &xs {
            let pair =
                averaged_intensity_flat_with(&state, x, &chi, &quad, run.exec()).and_then(|lhs| {
                    let g = translate(&state, x)?;
                    Ok((lhs, weyl.quadratic_form(g.field().values())?.re))
                });
            let Some((lhs, rhs)) = run.attempt(pair, id, Some(h), Some(x))? else {
                complete = false;
                continue;
            };
            let gap = (lhs - rhs).abs() / lhs.max(1.0);
            worst = worst.max(gap);
            sup = sup.max(lhs);
            if !aggregate {
                run.out.rows.push(
                    ReportRow::new(id, Some(h), Some(x), lhs)
                        .against(rhs, rhs.abs().max(1.0))
                        .with_gap(gap),
                );
            }
        }
        if complete {
            sups.push(sup);
        }
    }
    if sups.len() >= 2 {
        let ratio = spread_ratio(&sups)?;
        if aggregate {
            run.out.rows.push(ReportRow::new(id, None, None, ratio));
        }
        run.out.ratios.insert("sup_average".into(), ratio);
        let scale = run.scale();
        run.check(Check::at_most("identity relative gap", worst, 1e-6, scale));
        run.check(Check::ratio("sup_x average max/min", ratio, 2.0, scale));
    }
    Ok(())
}

fn zonal_configs(
    config: &ExperimentConfig,
    default: &[usize],
) -> Result<Vec<ZonalConfig>, ConfigError> {
    let t0 = config.t0.unwrap_or(ZONAL_T0);
    let eps = config.epsilon.unwrap_or(ZONAL_EPS);
    list_or(&config.degrees, default)
        .into_iter()
        .map(|n| Ok(ZonalConfig::new(n, t0, eps)?))
        .collect()
}

fn zonal_consistency(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let configs = zonal_configs(config, &[10, 20, 50, 100, 200, 400])?;
    let mut laplace = 0.0f64;
    let mut bessel = 0.0f64;
    for c in &configs {
        let n = c.degree();
        let h = c.hbar();
        let q = CircleQuadrature::new(config.circle_nodes.unwrap_or(4 * n))?;
        let gaps: magdeform::Result<Vec<f64>> = (0..=60)
            .map(|i| {
                let r = PI * i as f64 / 60.0;
                Ok((zonal_laplace_integral(n, r, &q)? - legendre_pn(n, r.cos())?).abs())
            })
            .collect();
        if let Some(g) = run.attempt(gaps, "zonal-average:laplace", Some(h), None)? {
            let g = max_of(g);
            laplace = laplace.max(g);
            run.out
                .rows
                .push(ReportRow::new("zonal-average:laplace", Some(h), None, g).against(0.0, 1.0));
        }

        let pole_scale = (2.0 * PI / h).sqrt();
        let samples: Vec<([f64; 2], [f64; 2])> = (0..25)
            .map(|k| {
                let a = 0.7 * k as f64;
                let r = c.epsilon() * k as f64 / 25.0;
                let u = [r * a.cos(), r * a.sin()];
                let x = [
                    0.012 * k as f64 * (2.0 * a).sin(),
                    -0.01 * k as f64 * a.cos(),
                ];
                (u, x)
            })
            .collect();
        let surrogate = c.circle_for(0.3).and_then(|q| {
            let gaps = samples.iter().map(|&(u, x)| {
                let z = deformed_zonal_surrogate(c, u, x, &q)?.norm();
                Ok((z - bessel_oracle(h, c.t0(), u, x)).abs() / pole_scale)
            });
            gaps.collect::<magdeform::Result<Vec<f64>>>()
        });
        if let Some(g) = run.attempt(surrogate, "zonal-average:bessel", Some(h), None)? {
            let g = max_of(g);
            bessel = bessel.max(g);
            run.out
                .rows
                .push(ReportRow::new("zonal-average:bessel", Some(h), None, g).against(0.0, 1.0));
        }

        let pole = zonal_normalization(n);
        let oracle = (2.0 * PI * h).powf(-0.5);
        run.out.rows.push(
            ReportRow::new("zonal-average:pole", Some(h), Some(0.0), pole).against(oracle, oracle),
        );
    }
    let degrees: Vec<usize> = configs.iter().map(|c| c.degree()).collect();
    let scaling = magdeform::zonal::zonal_sup_scaling(&degrees)?;
    run.out.slopes.insert("pole_value".into(), scaling.slope);
    run.out
        .ratios
        .insert("off_pole".into(), scaling.off_pole_ratio);
    let scale = run.scale();
    run.check(Check::at_most(
        "Laplace integral vs recurrence",
        laplace,
        1e-10,
        scale,
    ));
    run.check(Check::at_most(
        "surrogate vs Bessel, pole-scaled",
        bessel,
        1e-8,
        scale,
    ));
    run.check(Check::within(
        "pole-value slope",
        scaling.slope,
        -0.5,
        0.01,
        scale,
    ));
    Ok(())
}

fn zonal_average(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let id = "zonal-average";
    let configs = zonal_configs(config, &[200, 260, 330, 400])?;
    let eps = configs[0].epsilon();
    let disk = disk_quadrature(
        eps,
        config.disk_radial.unwrap_or(48),
        config.disk_angular.unwrap_or(96),
    )?;
    let c0 = config.c0.unwrap_or(20.0);
    let xs = list_or(&config.x_samples, &[0.0]);
    let limit = zonal_average_limit(&configs[0]);
    let scale = run.scale();

    for &x in &xs {
        let Some(sweep) = run.attempt(
            zonal_average_sweep(&configs, [x, 0.0], &disk, run.exec()),
            id,
            None,
            Some(x),
        )?
        else {
            continue;
        };
        for (h, v) in sweep.hbars.iter().zip(&sweep.averaged) {
            run.out
                .rows
                .push(ReportRow::new(id, Some(*h), Some(x), *v).against(limit, limit));
        }
        let normalized: Vec<f64> = sweep.averaged.iter().map(|v| v / limit).collect();
        let worst = max_of(normalized.iter().map(|v| (v - 1.0).abs()));
        run.check(Check::at_most(
            &format!("|average / limit - 1| at x = {x}"),
            worst,
            0.3,
            scale,
        ));
        run.check(Check::ratio(
            &format!("average max/min at x = {x}"),
            sweep.averaged_ratio,
            2.0,
            scale,
        ));
        if x == xs[0] {
            run.out
                .slopes
                .insert("averaged".into(), sweep.averaged_slope);
            run.out
                .slopes
                .insert("undeformed".into(), sweep.undeformed_slope);
            run.out
                .ratios
                .insert("averaged".into(), sweep.averaged_ratio);
        }
    }

    let resolved = configs
        .iter()
        .all(|c| 2.0 * c.t0() * c.epsilon() / c.hbar() >= 15.0);
    run.check(Check::flag("2 t0 eps / h >= 15 for every degree", resolved));

    let mut sups = vec![];
    for c in &configs {
        let tag = "zonal-average:local-sup";
        let local = local_sup_bound_check(c, c0, &LocalSupGrid::default(), run.exec());
        if let Some(l) = run.attempt(local, tag, Some(c.hbar()), None)? {
            sups.push(l.sup);
            run.out.rows.push(
                ReportRow::new(tag, Some(c.hbar()), None, l.sup).against(l.oracle_sup, l.envelope),
            );
        }
    }
    if sups.len() >= 2 {
        let ratio = spread_ratio(&sups)?;
        run.out.ratios.insert("local_sup".into(), ratio);
        run.check(Check::ratio("local sup max/min", ratio, 3.0, scale));
    }
    run.detail("limit", json!(limit));
    run.detail("c0", json!(c0));
    Ok(())
}

/// Fixed flat 2-D restriction setup: a segment at height 0.1 through a
/// Gaussian of width `sqrt(h)`.
fn flat_segment_gap(config: &ExperimentConfig, run: &mut Run) -> Result<Option<f64>, ConfigError> {
    let tag = "restriction:flat-2d";
    let h = 0.05;
    let g = UniformGrid::periodic_centered(4.0, 128)?;
    let start = FlatState2::gaussian([g, g], h, [0.0, 0.0])?;
    let breaks: Vec<f64> = (0..=48).map(|i| i as f64 / 48.0).collect();
    let curve = Curve::segment(
        vec![-1.5, 0.1],
        vec![1.5, 0.1],
        composite_gauss_legendre(&breaks, 16)?,
    )?;
    let points: Vec<[f64; 2]> = curve.samples().iter().map(|(p, _)| [p[0], p[1]]).collect();
    let disk = disk_quadrature(
        config.epsilon.unwrap_or(0.5),
        config.disk_radial.unwrap_or(6),
        config.disk_angular.unwrap_or(12),
    )?;
    let rows = run.exec().map(disk.nodes(), |u| {
        let moved = flat_magnetic_propagate_2d(&start, u, TimeDirection::Forward)?;
        let interp = Interpolant2::new(&moved);
        Ok(points
            .iter()
            .map(|&p| interp.eval(p).norm_sqr())
            .collect::<Vec<f64>>())
    });
    let table: magdeform::Result<Vec<Vec<f64>>> = rows.into_iter().collect();
    let Some(table) = run.attempt(table, tag, Some(h), None)? else {
        return Ok(None);
    };
    let checked = iterated_both_orders(&table, disk.weights(), &curve).and_then(|it| {
        let gap = fubini_check(&it.per_u, &disk, it.swapped)? / it.swapped.max(1.0);
        let forward: f64 = it
            .per_u
            .iter()
            .zip(disk.weights())
            .map(|(f, w)| f * w)
            .sum();
        Ok((forward, it.swapped, gap))
    });
    let Some((forward, swapped, gap)) = run.attempt(checked, tag, Some(h), None)? else {
        return Ok(None);
    };
    run.out.rows.push(
        ReportRow::new(tag, Some(h), None, forward)
            .against(swapped, swapped.max(1.0))
            .with_gap(gap),
    );
    Ok(Some(gap))
}

fn restriction(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let id = "restriction";
    let configs = ho_configs(config, HOConfig::DEFAULT_COUNT)?;
    let exponent = config.omega_exponent.unwrap_or(0.25);
    let sweep = ho_deformations(&configs, config.u_nodes.unwrap_or(16), id, run)?;
    let point = Curve::point(vec![0.0]);
    let mut ho_gap = 0.0f64;
    let mut markov = true;
    for d in &sweep {
        let h = d.config().hbar();
        let quad = d.quadrature();
        let omega = h.powf(exponent);
        let table: Vec<Vec<f64>> = d.intensities_at(0.0).into_iter().map(|v| vec![v]).collect();
        let report = BallQuadrature::from_interval(d.config().epsilon(), quad).and_then(|ball| {
            let it = iterated_both_orders(&table, quad.weights(), &point)?;
            let gap = fubini_check(&it.per_u, &ball, it.swapped)?;
            Ok((gap, good_set_fraction(&it.per_u, quad.weights(), omega)?))
        });
        let Some((gap, r)) = run.attempt(report, id, Some(h), Some(0.0))? else {
            continue;
        };
        ho_gap = ho_gap.max(gap);
        markov &= r.good_fraction >= 1.0 - omega;
        run.out.rows.push(
            ReportRow::new(id, Some(h), Some(0.0), r.good_fraction)
                .against(1.0 - omega, 1.0)
                .with_gap(gap),
        );
    }
    let flat_gap = flat_segment_gap(config, run)?;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 1000;
    let mut holding = 0usize;
    for _ in 0..trials {
        let n = rng.gen_range(1..300);
        let f: Vec<f64> = (0..n)
            .map(|_| rng.gen::<f64>().powi(rng.gen_range(1..10)) * 1e3)
            .collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..3.0)).collect();
        let omega = rng.gen_range(1e-3..0.999);
        if good_set_fraction(&f, &w, omega)?.markov_holds() {
            holding += 1;
        }
    }
    let fraction = holding as f64 / trials as f64;
    run.out
        .rows
        .push(ReportRow::new("restriction:markov-random", None, None, fraction).against(1.0, 1.0));

    let scale = run.scale();
    run.check(Check::at_most(
        "oscillator Fubini gap",
        ho_gap,
        FUBINI_TOLERANCE,
        scale,
    ));
    if let Some(g) = flat_gap {
        run.check(Check::at_most(
            "flat 2-D Fubini gap",
            g,
            FUBINI_TOLERANCE,
            scale,
        ));
    }
    run.check(Check::flag(
        "good fraction >= 1 - Omega at every hbar",
        markov,
    ));
    run.check(Check::flag(
        "Markov bound on 1000 random arrays",
        holding == trials,
    ));
    run.detail("omega_exponent", json!(exponent));
    Ok(())
}

fn family_by_name(name: &str) -> Result<(MagneticFamily, Option<f64>), ConfigError> {
    Ok(match name {
        "constant-forms" => (MagneticFamily::constant_forms(2)?, Some(1.0)),
        "degenerate-pair" => (MagneticFamily::degenerate_pair(), Some(0.0)),
        "weighted-pair" => (MagneticFamily::weighted_pair(), None),
        "redundant-triple" => (MagneticFamily::redundant_triple(), Some(1.0)),
        other => return Err(ConfigError::invalid(format!("unknown family {other:?}"))),
    })
}

fn admissibility(config: &ExperimentConfig, run: &mut Run) -> Result<(), ConfigError> {
    let names = list_or(
        &config.families,
        &[
            "constant-forms".to_string(),
            "degenerate-pair".into(),
            "weighted-pair".into(),
            "redundant-triple".into(),
        ],
    );
    let threshold = config.threshold.unwrap_or(DEFAULT_ADMISSIBILITY_THRESHOLD);
    let xs = vec![vec![0.0, 0.0], vec![0.5, -0.3], vec![-1.0, 0.8]];
    let params = |k: usize| -> Vec<Vec<f64>> {
        (0..6)
            .map(|i| {
                [0.05, -0.03, 0.02][..k]
                    .iter()
                    .map(|c| c * i as f64)
                    .collect()
            })
            .collect()
    };
    let scale = run.scale();
    let mut verdicts = BTreeMap::new();
    for name in &names {
        let tag = format!("admissibility:{name}");
        let (family, expected) = family_by_name(name)?;
        let report = admissibility_check(&family, &xs, &params(family.param_dim()), threshold);
        let Some(r) = run.attempt(report, &tag, None, None)? else {
            continue;
        };
        let verdict = if r.admissible {
            "admissible"
        } else {
            "not-admissible"
        };
        let mut row = ReportRow::new(format!("{tag}:{verdict}"), None, None, r.min_singular_value);
        if let Some(e) = expected {
            row = row.against(e, 1.0);
            run.check(Check::at_most(
                &format!("{name} sigma_min error"),
                (r.min_singular_value - e).abs(),
                1e-10,
                scale,
            ));
        }
        run.out.rows.push(row);
        verdicts.insert(
            name.clone(),
            json!({
                "admissible": r.admissible,
                "sigma_min": r.min_singular_value,
                "subset": r.chosen_subset,
            }),
        );
    }
    run.detail("families", json!(verdicts));
    run.detail("threshold", json!(threshold));

    // orthogonal invariance under rotations of the parameter
    let base = MagneticFamily::weighted_pair();
    let us = params(2);
    let reference = admissibility_check(&base, &xs, &us, threshold)?.min_singular_value;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut drift = 0.0f64;
    for _ in 0..50 {
        let a: f64 = rng.gen_range(-PI..PI);
        let inner = base.clone();
        let rotated = MagneticFamily::new(
            2,
            2,
            Arc::new(move |x, u| {
                let v = [
                    a.cos() * u[0] - a.sin() * u[1],
                    a.sin() * u[0] + a.cos() * u[1],
                ];
                inner.eval(x, &v).expect("dimensions match")
            }),
        )?;
        let s = admissibility_check(&rotated, &xs, &us, threshold)?.min_singular_value;
        drift = drift.max((s - reference).abs());
    }
    run.out
        .rows
        .push(ReportRow::new("admissibility:rotation-drift", None, None, drift).against(0.0, 1.0));
    run.check(Check::at_most(
        "sigma_min rotation drift",
        drift,
        1e-10,
        scale,
    ));
    Ok(())
}
