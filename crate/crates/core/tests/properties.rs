use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use adiacycle_core::optimizer::{self, Objective, OptimizerSettings};
use adiacycle_core::performance::{engine_figures, Cycle};
use adiacycle_core::qubit_model::{self, EPS_MIN};
use adiacycle_core::{BathParams, Curve, Drive, FieldPoint, Geometry, ProfileStats, Shape};
use proptest::prelude::*;

fn geo() -> Geometry {
    Geometry::new(BathParams::default())
}

/// Ellipse inside the open quadrant `q` (0..4, counterclockwise from +B_z).
fn quadrant_ellipse(q: u8, r: f64, phi: f64, a: f64, b: f64, tilt: f64) -> Option<Curve> {
    let angle = phi + FRAC_PI_2 * q as f64;
    let c = Curve::ellipse(FieldPoint::from_polar(r, angle), a, b, tilt);
    let inside = c.polygon(256).iter().all(|p| {
        let a = p.angle().rem_euclid(2.0 * PI);
        a > FRAC_PI_2 * q as f64 && a < FRAC_PI_2 * (q + 1) as f64
    });
    (inside && c.min_radius() > 10.0 * EPS_MIN).then_some(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_quadrant_loops_obey_landauer(
        q in 0u8..4, r in 0.3f64..6.0, phi in 0.2f64..1.37,
        a in 0.05f64..3.0, b in 0.05f64..3.0, tilt in 0.0f64..PI,
    ) {
        if let Some(c) = quadrant_ellipse(q, r, phi, a, b, tilt) {
            let area = geo().area_line(&c).unwrap();
            prop_assert!(area.abs() <= LN_2 + 1e-9, "{area}");
        }
    }

    #[test]
    fn any_simple_loop_is_below_twice_landauer(
        z in -3.0f64..3.0, x in -3.0f64..3.0, a in 0.1f64..6.0, b in 0.1f64..6.0, tilt in 0.0f64..PI,
    ) {
        let c = Curve::ellipse(FieldPoint::new(z, x), a, b, tilt);
        prop_assume!(c.min_radius() > 1e-3);
        let area = geo().area_line(&c).unwrap();
        prop_assert!(area.abs() <= 2.0 * LN_2 + 1e-9);
    }

    #[test]
    fn reversal_keeps_lengths_and_flips_area(
        z in -3.0f64..3.0, x in -3.0f64..3.0, a in 0.1f64..2.0, b in 0.1f64..2.0, tilt in 0.0f64..PI,
    ) {
        let c = Curve::ellipse(FieldPoint::new(z, x), a, b, tilt);
        prop_assume!(c.min_radius() > 1e-2);
        let g = geo();
        let f = g.geodesic_pass(&c).unwrap();
        let r = g.geodesic_pass(&c.reversed()).unwrap();
        prop_assert!((f.area + r.area).abs() <= 1e-9 * (1.0 + f.area.abs()));
        prop_assert!((f.length / r.length - 1.0).abs() <= 1e-9);
        prop_assert!((f.length_kappa / r.length_kappa - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn axis_reflection_preserves_objective(
        z in 0.2f64..3.0, x in 0.2f64..3.0, a in 0.1f64..1.0, b in 0.1f64..1.0, tilt in 0.0f64..PI,
    ) {
        let c = Curve::ellipse(FieldPoint::new(z, x), a, b, tilt);
        let m = Curve::ellipse(FieldPoint::new(z, -x), a, b, -tilt);
        prop_assume!(c.min_radius() > 1e-2);
        let g = geo();
        let (pc, pm) = (g.geodesic_pass(&c).unwrap(), g.geodesic_pass(&m).unwrap());
        let (oc, om) = (Objective::power().value_of(&pc), Objective::power().value_of(&pm));
        prop_assert!(oc >= 0.0);
        prop_assert!((oc - om).abs() <= 1e-8 * oc.max(1e-12));
    }

    #[test]
    fn duration_identities(
        area in 1e-3f64..0.69, l2 in 0.1f64..50.0, k in 1e-6f64..0.2, bias in 0.01f64..0.2,
    ) {
        let c = Cycle::new(area, ProfileStats { length_l2: l2, mean_kappa: k }, bias);
        prop_assert!((c.tau_kappa() / c.tau_d() - (c.x() - 1.0)).abs() <= 1e-10 * c.x());
        let direct = c.efficiency(c.tau_p());
        prop_assert!((direct - c.eta_pmax()).abs() <= 1e-10);
        prop_assert!((c.power(c.tau_p()) - c.p_max()).abs() <= 1e-12 * c.p_max());
    }

    #[test]
    fn coefficients_are_finite_and_definite(r in 1e-5f64..40.0, phi in 0.0f64..(2.0 * PI)) {
        let p = FieldPoint::from_polar(r, phi);
        let c = qubit_model::coefficients(&p, &BathParams::default()).unwrap();
        let e = c.lambda_matrix.symmetric_eigenvalues();
        let top = e.amax();
        prop_assert!(e.iter().all(|v| v.is_finite() && *v >= -1e-12 * top));
        prop_assert!(c.kappa >= 0.0 && c.kappa.is_finite());
    }
}

#[test]
fn two_lobe_loop_exceeds_single_quadrant_bound() {
    // a thin ellipse through quadrants 1 and 3 collects both positive lobes
    let c = Curve::ellipse(FieldPoint::new(0.0, 0.0), 12.0, 0.8, PI / 4.0);
    let area = geo().area_line(&c).unwrap();
    assert!(area.abs() > LN_2, "{area}");
    assert!(area.abs() < 2.0 * LN_2);
}

#[test]
fn efficiencies_rise_with_x() {
    let d = Drive::engine(0.05).unwrap();
    let mut last = (0.0, 0.0);
    for k in 1..50 {
        let l2 = 10.0 / k as f64;
        let c = Cycle::new(0.4, ProfileStats { length_l2: l2, mean_kappa: 0.01 }, d.bias_ratio);
        let now = (c.eta_max(), c.eta_pmax());
        assert!(now.0 > last.0 && now.1 > last.1);
        last = now;
    }
}

#[test]
fn optimizer_is_deterministic() {
    let g = geo();
    let s = OptimizerSettings { seeds: 3, ..OptimizerSettings::default() };
    let run = || {
        let r = optimizer::optimize_ellipse(FieldPoint::new(1.0, 1.0), Objective::power(), &g, &s).unwrap();
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn scan_cell_matches_single_optimization() {
    let g = geo();
    let s = OptimizerSettings { seeds: 2, ..OptimizerSettings::default() };
    let d = Drive::engine(0.05).unwrap();
    let grid = optimizer::CenterGrid { z_range: (1.0, 1.0), x_range: (1.0, 1.0), nz: 1, nx: 1 };
    let cells = optimizer::scan_centers(&grid, Objective::power(), &g, &s, &d).unwrap();
    let single = optimizer::optimize_ellipse(FieldPoint::new(1.0, 1.0), Objective::power(), &g, &s).unwrap();
    assert_eq!(cells.len(), 1);
    assert_eq!(cells[0].objective_value, Some(single.objective_value));
    let sum = g.summarize(cells[0].curve.as_ref().unwrap()).unwrap();
    assert_eq!(cells[0].performance, Some(engine_figures(&sum, &d).unwrap()));
}

#[test]
fn origin_optimum_avoids_the_inner_region() {
    let g = geo();
    let s = OptimizerSettings { seeds: 4, ..OptimizerSettings::default() };
    let r = optimizer::optimize_ellipse(FieldPoint::new(0.0, 0.0), Objective::power(), &g, &s).unwrap();
    let (low, _) = qubit_model::crossover_radii(&g.bath).unwrap();
    match r.best_curve.shape {
        Shape::Ellipse { a, b, .. } => assert!(a > low && b > low, "{a} {b}"),
        _ => unreachable!(),
    }
    assert!(r.best_curve.min_radius() > low);
    assert!(r.objective_value > 0.0);
}

#[test]
fn uniform_speed_on_circle_about_origin_is_already_optimal() {
    // the metric is rotation invariant, so constant angular speed is geodesic
    let g = geo();
    let c = Curve::circle(FieldPoint::new(0.0, 0.0), 1.3);
    let s = g.summarize(&c).unwrap();
    assert!((s.uniform.length_l2 / s.geodesic_l2 - 1.0).abs() < 1e-6);
    assert!((s.power_optimal.length_l2 / s.uniform.length_l2 - 1.0).abs() < 1e-6);
}
