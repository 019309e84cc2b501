use magdeform::deformlab::{
    average_over_ball, fubini_check, good_set_fraction, iterated_both_orders, two_sided_band,
    AverageProfile, Curve,
};
use magdeform::numerics::gauss_legendre;
use magdeform::oscillator::{
    averaged_intensity_ho, build_ho_operator, coherent_average, ho_ground_state,
    propagate_spectral, HOConfig, HoDeformation,
};
use magdeform::{BallQuadrature, Execution};

fn config(h: f64) -> HOConfig {
    HOConfig::with_count(h, 0.5, 0.5, 512).unwrap()
}

#[test]
fn generic_ball_average_matches_oscillator_average() {
    let c = config(0.05);
    let quad = gauss_legendre(12, -0.5, 0.5).unwrap();
    let ball = BallQuadrature::from_interval(0.5, &quad).unwrap();
    let ground = ho_ground_state(&c);
    let generic = average_over_ball(
        |u| {
            let op = build_ho_operator(&c, u[0]);
            let phi = propagate_spectral(&op, &ground, 0.5, 0.05).unwrap();
            magdeform::numerics::trig_eval(&phi, 0.0)
                .unwrap()
                .norm_sqr()
        },
        &ball,
    )
    .unwrap();
    let direct = averaged_intensity_ho(&c, 0.0, &quad).unwrap().value;
    assert!((generic - direct).abs() < 1e-10 * direct);
    assert!((direct - coherent_average(0.05, 0.5, 0.5, 0.0)).abs() < 1e-8);
}

#[test]
fn serial_and_parallel_deformations_agree() {
    let c = config(0.1);
    let quad = gauss_legendre(8, -0.5, 0.5).unwrap();
    let a = HoDeformation::build(&c, &quad, Execution::Serial).unwrap();
    let b = HoDeformation::build(&c, &quad, Execution::Parallel).unwrap();
    assert_eq!(
        a.averaged_at(0.07).value.to_bits(),
        b.averaged_at(0.07).value.to_bits()
    );
}

#[test]
fn restriction_pipeline_at_the_origin() {
    let quad = gauss_legendre(16, -0.5, 0.5).unwrap();
    let ball = BallQuadrature::from_interval(0.5, &quad).unwrap();
    let point = Curve::point(vec![0.0]);
    let mut profiles = vec![];
    for h in [0.1, 0.05, 0.025] {
        let d = HoDeformation::build(&config(h), &quad, Execution::Parallel).unwrap();
        let table: Vec<Vec<f64>> = d.intensities_at(0.0).into_iter().map(|v| vec![v]).collect();
        let it = iterated_both_orders(&table, quad.weights(), &point).unwrap();
        assert!(fubini_check(&it.per_u, &ball, it.swapped).unwrap() <= 1e-8);
        assert!((it.swapped - d.averaged_at(0.0).value).abs() <= 1e-12 * it.swapped);
        let omega = h.powf(0.25);
        let report = good_set_fraction(&it.per_u, quad.weights(), omega).unwrap();
        assert!(report.good_fraction >= 1.0 - omega);
        let xs = vec![-0.1, 0.0, 0.1];
        let values = xs.iter().map(|&x| d.averaged_at(x).value).collect();
        profiles.push(AverageProfile::new(h, xs, values).unwrap());
    }
    let band = two_sided_band(&profiles, 2.0).unwrap();
    assert!(band.two_sided, "{band:?}");
}
