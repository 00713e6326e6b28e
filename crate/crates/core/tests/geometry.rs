use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use billiard_core::geometry::Perturbation;
use billiard_core::{BoundaryCurve, CurvatureProfile, Error};

fn presets() -> Vec<CurvatureProfile> {
    vec![
        CurvatureProfile::circle(),
        CurvatureProfile::ellipse(0.5).unwrap(),
        CurvatureProfile::ellipse(0.9).unwrap(),
        CurvatureProfile::new(vec![1.0, 0.0, 0.1], vec![]).unwrap(),
        CurvatureProfile::perturbed_circle(&[Perturbation::cosine(3, 0.05)]).unwrap(),
    ]
}

#[test]
fn perimeter_and_total_turning() {
    for p in presets() {
        let c = BoundaryCurve::build(&p, 512).unwrap();
        assert_abs_diff_eq!(c.measured_perimeter(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.total_turning(), TAU, epsilon = 1e-8);
    }
}

#[test]
fn second_harmonic_profile_turns_once() {
    let p = CurvatureProfile::new(vec![1.0, 0.0, 0.1], vec![]).unwrap();
    let c = BoundaryCurve::build(&p, 256).unwrap();
    // Independent quadrature in arc length: ∫ρ⁻¹ ds on a fine uniform grid.
    let n = 20_000;
    let turning: f64 = (0..n).map(|j| 1.0 / c.curvature_radius(j as f64 / n as f64)).sum::<f64>() / n as f64;
    assert_abs_diff_eq!(turning, TAU, epsilon = 1e-8);
}

#[test]
fn closure_violation_is_reported() {
    let p = CurvatureProfile::new(vec![1.0, 0.5], vec![]).unwrap();
    assert!(matches!(BoundaryCurve::build(&p, 256), Err(Error::NotClosed { .. })));
}

#[test]
fn circle_points() {
    let c = BoundaryCurve::build(&CurvatureProfile::circle(), 128).unwrap();
    for j in 0..16 {
        let s = j as f64 / 16.0 + 0.013;
        let (a, ta) = c.point(s);
        let (b, _) = c.point(s + 1.0);
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-14);
        assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-14);
        let (d, _) = c.point(s + 0.5);
        assert_abs_diff_eq!((a[0] - d[0]).hypot(a[1] - d[1]), 1.0 / PI, epsilon = 1e-12);
        assert_abs_diff_eq!(ta[0].hypot(ta[1]), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.curvature_radius(s), 1.0 / TAU, epsilon = 1e-14);
    }
}

#[test]
fn tangent_matches_finite_differences() {
    let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(2, 0.1), Perturbation::cosine(5, 0.02)]).unwrap();
    let c = BoundaryCurve::build(&p, 256).unwrap();
    let h = 1e-6;
    for j in 0..100 {
        let s = j as f64 / 100.0;
        let (a, _) = c.point(s + h);
        let (b, _) = c.point(s - h);
        let (_, t) = c.point(s);
        assert_abs_diff_eq!((a[0] - b[0]) / (2.0 * h), t[0], epsilon = 1e-6);
        assert_abs_diff_eq!((a[1] - b[1]) / (2.0 * h), t[1], epsilon = 1e-6);
    }
}

#[test]
fn ellipse_vertices_are_radius_extrema() {
    let c = BoundaryCurve::build(&CurvatureProfile::ellipse(0.5).unwrap(), 512).unwrap();
    let n = 4000;
    let radii: Vec<f64> = (0..n).map(|j| c.curvature_radius(j as f64 / n as f64)).collect();
    let max = radii.iter().cloned().fold(f64::MIN, f64::max);
    let min = radii.iter().cloned().fold(f64::MAX, f64::min);
    // s = 0 has tangent angle 0: the end of the minor axis, where ρ is largest.
    assert_abs_diff_eq!(c.curvature_radius(0.0), max, epsilon = 1e-12);
    assert_abs_diff_eq!(c.curvature_radius(0.25), min, epsilon = 1e-6 * max);
    assert!(c.lazutkin_integral() > 0.0);
}

#[test]
fn perturbations_up_to_three_tenths_stay_convex() {
    for m in 2..=6 {
        for a in [0.1, 0.2, 0.3] {
            let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(m, a)]).unwrap();
            let (min, _) = p.min_radius();
            assert!(min > 0.0);
            assert!(BoundaryCurve::build(&p, 256).is_ok());
        }
    }
}

#[test]
fn rotation_leaves_integrals_unchanged() {
    let p = CurvatureProfile::new(vec![1.0, 0.0, 0.08, -0.03, 0.02], vec![0.0, 0.04, 0.01, -0.01]).unwrap();
    let base = BoundaryCurve::build(&p, 256).unwrap();
    for theta in [0.3, 1.1, 2.9] {
        let r = BoundaryCurve::build(&p.rotated(theta), 256).unwrap();
        assert_abs_diff_eq!(r.measured_perimeter(), base.measured_perimeter(), epsilon = 1e-10);
        assert_abs_diff_eq!(r.lazutkin_integral(), base.lazutkin_integral(), epsilon = 1e-10);
    }
}

#[test]
fn doubling_the_table_leaves_points_unchanged() {
    let p = CurvatureProfile::ellipse(0.6).unwrap();
    let a = BoundaryCurve::build(&p, 128).unwrap();
    let b = BoundaryCurve::build(&p, 256).unwrap();
    for j in 0..50 {
        let s = j as f64 / 50.0 + 0.0037;
        let (x, _) = a.point(s);
        let (y, _) = b.point(s);
        assert!((x[0] - y[0]).hypot(x[1] - y[1]) < 1e-12);
    }
}
