use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use billiard_core::beta::{
    affine_reconcile, beta_from_normal_form, beta_tilde, beta3_bound_report, cross_validate, isospectral_compare,
    physical_beta, Provenance, Verdict,
};
use billiard_core::geometry::Perturbation;
use billiard_core::normal_form::{normal_form, NormalFormOptions};
use billiard_core::orbits::fit_odd_powers;
use billiard_core::series::UnivariatePoly;
use billiard_core::{BoundaryCurve, CurvatureProfile};

fn circle() -> BoundaryCurve {
    BoundaryCurve::build(&CurvatureProfile::circle(), 256).unwrap()
}

fn perturbed(a: f64) -> BoundaryCurve {
    BoundaryCurve::build(&CurvatureProfile::perturbed_circle(&[Perturbation::cosine(2, a)]).unwrap(), 512).unwrap()
}

fn zeta(c3: f64, c5: f64) -> UnivariatePoly {
    let mut z = UnivariatePoly::<f64>::identity(11);
    z.set_coeff(3, c3);
    z.set_coeff(5, c5);
    z
}

/// `max_t (h t²/2 − ∫₀ᵗ ζ(s) s ds)` by golden-section search.
fn numeric_legendre(z: &UnivariatePoly, h: f64) -> f64 {
    let big_h = |t: f64| -> f64 {
        z.coeffs().iter().enumerate().map(|(n, c)| c * t.powi(n as i32 + 2) / (n as f64 + 2.0)).sum()
    };
    let f = |t: f64| h * t * t / 2.0 - big_h(t);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 3.0 * h);
    while b - a > 1e-15 * h {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn seventh_coefficient_matches_numeric_legendre() {
    for (c3, c5) in [(0.4, 0.3), (-0.7, 1.2), (1.5, -0.5), (0.1, 2.0), (-1.1, -0.9)] {
        let z = zeta(c3, c5);
        let formal = beta_tilde(&z).unwrap();
        // Strip the known cubic and quintic terms, then fit what is left.
        let samples: Vec<(f64, f64)> = (1..=40)
            .map(|j| {
                let h = 0.002 * j as f64;
                (h, numeric_legendre(&z, h) - h.powi(3) / 6.0 + c3 / 5.0 * h.powi(5))
            })
            .collect();
        let fit = fit_odd_powers(&samples, 4).unwrap();
        assert!(fit.coeffs[0].abs() < 1e-9 && fit.coeffs[1].abs() < 1e-7);
        assert_abs_diff_eq!(fit.coeffs[2], 0.0, epsilon = 1e-5 * c3.abs().max(1.0));
        assert_abs_diff_eq!(fit.coeffs[3], formal.coeff(7), epsilon = 1e-3 * formal.coeff(7).abs().max(1.0));
        assert_abs_diff_eq!(formal.coeff(5), -c3 / 5.0, epsilon = 1e-15);
    }
}

#[test]
fn identity_zeta_is_cubic_at_every_order() {
    let b = beta_tilde(&UnivariatePoly::<f64>::identity(13)).unwrap();
    for n in 0..=15 {
        assert_eq!(b.coeff(n), if n == 3 { 1.0 / 6.0 } else { 0.0 });
    }
}

#[test]
fn circle_fifth_coefficient() {
    let nf = normal_form(&circle(), 5, &NormalFormOptions::default()).unwrap();
    let exp = beta_from_normal_form(&nf, 7).unwrap();
    assert_eq!(exp.provenance, Provenance::NormalForm);
    assert_abs_diff_eq!(exp.coeffs_normalized[0], 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(exp.coeffs_normalized[1], 1.0 / 6.0, epsilon = 1e-15);
    assert_abs_diff_eq!(exp.coeffs_normalized[2], -PI * PI / 120.0, epsilon = 1e-12);
    assert!(beta_from_normal_form(&nf, 9).is_err());
    let phys = affine_reconcile(&exp, nf.c1);
    assert_abs_diff_eq!(4.0 * nf.c1.powi(3), 1.0 / (PI * PI), epsilon = 1e-14);
    assert_abs_diff_eq!(phys.coeffs_physical[0], -1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(phys.coeffs_physical[1], PI * PI / 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(phys.coeffs_physical[2], -PI.powi(4) / 120.0, epsilon = 1e-10);
    // Seventh Taylor coefficient of −sin(πh)/π.
    assert_abs_diff_eq!(phys.coeffs_physical[3], PI.powi(6) / 5040.0, epsilon = 1e-9);
}

#[test]
fn physical_beta3_is_the_lazutkin_cube() {
    for a in [0.02, 0.05, 0.1] {
        let c = perturbed(a);
        let b = physical_beta(&c, 3, &NormalFormOptions::default()).unwrap();
        assert_abs_diff_eq!(b.coeffs_physical[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.coeffs_physical[1], c.lazutkin_integral().powi(3) / 24.0, epsilon = 1e-10);
    }
}

#[test]
fn circle_cross_validation() {
    let cv = cross_validate(&circle(), 50, 5);
    assert!(cv.gaps[1].absolute < 1e-4, "{:?}", cv.gaps);
    assert!(cv.gaps[2].absolute < 1e-2, "{:?}", cv.gaps);
    // β₁ = −1 from both paths.
    assert_abs_diff_eq!(cv.gaps[0].normal_form, -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(cv.gaps[0].fit, -1.0, epsilon = 1e-6);
}

#[test]
fn isometric_domains_give_identical_reports() {
    let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(2, 0.05)]).unwrap();
    let a = cross_validate(&BoundaryCurve::build(&p, 512).unwrap(), 30, 3);
    let b = cross_validate(&BoundaryCurve::build(&p.rotated(1.3), 512).unwrap(), 30, 3);
    for (x, y) in a.gaps.iter().zip(&b.gaps) {
        assert_abs_diff_eq!(x.normal_form, y.normal_form, epsilon = 1e-8);
        assert_abs_diff_eq!(x.fit, y.fit, epsilon = 1e-8);
    }
}

#[test]
fn isospectral_verdicts() {
    let p = CurvatureProfile::ellipse(0.7).unwrap();
    let e = BoundaryCurve::build(&p, 512).unwrap();
    let r = BoundaryCurve::build(&p.rotated(0.5), 512).unwrap();
    assert_eq!(isospectral_compare(&e, &r, 12, 1e-8).verdict, Verdict::Indistinguishable);

    let c = circle();
    let report = isospectral_compare(&c, &c, 30, 1e-8);
    assert_eq!(report.verdict, Verdict::Indistinguishable);
    assert!(report.fit_gap.is_some());

    let e9 = BoundaryCurve::build(&CurvatureProfile::ellipse(0.9).unwrap(), 512).unwrap();
    match isospectral_compare(&c, &e9, 8, 1e-8).verdict {
        Verdict::DistinguishedAt { p, q, gap } => {
            assert_eq!((p, q), (1, 2));
            assert!(gap > 1e-4);
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn inequality_report() {
    let c = beta3_bound_report(&circle(), None);
    assert_abs_diff_eq!(c.beta3, PI * PI / 6.0, epsilon = 1e-12);
    assert!(c.tight && c.derived_bound_holds);
    assert!(c.literal_claim_fails);
    assert_eq!((c.beta1, c.literal_beta1), (-1.0, 1.0));

    let e = beta3_bound_report(&BoundaryCurve::build(&CurvatureProfile::ellipse(0.5).unwrap(), 512).unwrap(), None);
    assert!(e.derived_gap > 0.1 && !e.tight);

    let mut last = f64::INFINITY;
    for a in [0.1, 0.05, 0.02, 0.01, 0.005] {
        let r = beta3_bound_report(&perturbed(a), None);
        assert!(r.derived_gap > 0.0 && r.derived_gap < last);
        last = r.derived_gap;
    }
}

#[test]
fn inequality_report_with_fit() {
    let r = beta3_bound_report(&perturbed(0.05), Some(30));
    let (b1, b3) = r.fit.unwrap().unwrap();
    assert_abs_diff_eq!(b1, -1.0, epsilon = 1e-4);
    assert_abs_diff_eq!(b3, r.beta3, epsilon = 1e-2);
}
