//! Birkhoff normal form of the billiard map near the boundary.
//!
//! In Lazutkin coordinates the map reads `x̄ = x + ζ_k(y) + fx`,
//! `ȳ = y + gy` with `fx = O(yᵏ)`, `gy = O(y^{k+1})`. Each
//! [`iterate_step`] moves the mean of the `yᵏ` line of `fx` into `ζ` and
//! removes the rest by an exact-symplectic change of coordinates. Since the
//! map is reversible every step raises `k` by two, and the odd coefficients
//! `c₃, c₅, …` of `ζ∞(y) = y + Σ c_{2i+1} y^{2i+1}` are symplectic invariants.

mod generating;
mod iteration;
mod seed;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::geometry::BoundaryCurve;
use crate::series::{Coeff, FourierTaylorSeries, UnivariatePoly};
use crate::{Error, Result};

pub use generating::{transform_generating_ledger, GeneratingStep};
pub use iteration::{iterate_step, mirror_defect, symplectic_residual, StepRecord, CONSTRAINT_TOL};
pub use seed::{lazutkin_seed, MAX_SEED_ORDER};

/// Default number of Fourier modes in `x`.
pub const DEFAULT_HARMONICS: usize = 48;

/// A near-integrable expansion of the map at order `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MapExpansion {
    /// The integrable part `ζ_k(y)`.
    pub zeta: UnivariatePoly,
    /// `x̄ − x − ζ_k(y)`, starting at `yᵏ`.
    pub fx: FourierTaylorSeries,
    /// `ȳ − y`, starting at `y^{k+1}`.
    pub gy: FourierTaylorSeries,
    pub k: usize,
}

impl MapExpansion {
    /// `x̄ = x + ζ(y) + f(x) yᵏ`, `ȳ = y + g(x) y^{k+1}` with `g` chosen to
    /// satisfy the symplectic cancellation `(k+2) g + f′ = 0`. `f` is given
    /// by harmonics `(κ, f̂_κ)` with `κ ≥ 0`.
    pub fn synthetic(
        zeta: UnivariatePoly,
        k: usize,
        f: &[(i64, num_complex::Complex64)],
        y_order: usize,
        harmonics: usize,
    ) -> Self {
        let fx = FourierTaylorSeries::from_line(y_order, harmonics, k, f);
        let g: Vec<_> = f
            .iter()
            .map(|&(kappa, c)| (kappa, c * num_complex::Complex64::new(0.0, -2.0 * PI * kappa as f64 / (k as f64 + 2.0))))
            .collect();
        let gy = FourierTaylorSeries::from_line(y_order, harmonics, k + 1, &g);
        Self { zeta: zeta.with_order(y_order), fx, gy, k }
    }

    /// `(x̄, ȳ)` from the truncated series.
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (x + self.zeta.eval_f64(y) + self.fx.eval(x, y), y + self.gy.eval(x, y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalFormOptions {
    pub harmonics: usize,
    /// Also compute the series-level mirror defect after each step.
    pub check_mirror: bool,
}

impl Default for NormalFormOptions {
    fn default() -> Self {
        Self { harmonics: DEFAULT_HARMONICS, check_mirror: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormResult {
    /// `(c₃, c₅, …, c_{max_order})`.
    pub c_coeffs: Vec<f64>,
    /// Lazutkin constant `(∫₀¹ ρ^{-2/3} ds)^{-1}`.
    pub c1: f64,
    pub zeta: UnivariatePoly,
    pub ledger: Vec<StepRecord>,
    /// Mirror defect of the seed and after each step (empty when unchecked).
    pub mirror_defects: Vec<f64>,
}

impl NormalFormResult {
    /// `ζ∞` as a polynomial of degree `max_order`.
    pub fn zeta_jet(&self) -> UnivariatePoly {
        let n = 2 * self.c_coeffs.len() + 1;
        let mut z = UnivariatePoly::identity(n);
        for (i, c) in self.c_coeffs.iter().enumerate() {
            z.set_coeff(2 * i + 3, *c);
        }
        z
    }
}

/// `(∫₀¹ ρ^{-2/3} ds)^{-1} = L^{1/3} / ∫₀^{2π} r^{1/3} dφ`.
pub fn lazutkin_constant(curve: &BoundaryCurve) -> f64 {
    let total = seed::LazutkinAbscissa::new(curve.profile()).total();
    curve.raw_length().cbrt() / total
}

/// Drives the Lazutkin seed to normal form up to `ζ`-degree `max_order`.
pub fn normal_form(curve: &BoundaryCurve, max_order: usize, options: &NormalFormOptions) -> Result<NormalFormResult> {
    if max_order < 3 || max_order.is_multiple_of(2) {
        return Err(Error::InvalidProfile("normal form order must be odd and at least 3"));
    }
    let mut exp = lazutkin_seed(curve, max_order, options.harmonics)?;
    let mut ledger = Vec::new();
    let mut mirror_defects = Vec::new();
    if options.check_mirror {
        mirror_defects.push(mirror_defect(&exp)?);
    }
    while exp.k <= max_order {
        let (next, record) = iterate_step(&exp)?;
        if record.k_next != record.k + 2 {
            return Err(Error::ConstraintViolation { k: record.k, what: "mirror symmetry", residual: record.mirror_residual });
        }
        if options.check_mirror {
            mirror_defects.push(mirror_defect(&next)?);
        }
        ledger.push(record);
        exp = next;
    }
    let c_coeffs = (1..=max_order / 2).map(|i| exp.zeta.coeff(2 * i + 1)).collect();
    Ok(NormalFormResult { c_coeffs, c1: lazutkin_constant(curve), zeta: exp.zeta, ledger, mirror_defects })
}

/// The circle's `ζ∞` in the scaled variable `η = πy/2`, where
/// `(π/2) ζ∞ = arcsin η`; exact over any [`Coeff`] backend.
pub fn circle_zeta_scaled<T: Coeff>(order: usize) -> Result<UnivariatePoly<T>> {
    UnivariatePoly::<T>::identity(order).arcsin()
}

/// Circle coefficients `c_{2n+1} = [η^{2n+1}] arcsin η · (π/2)^{2n}`.
pub fn circle_coefficients(max_order: usize) -> Result<Vec<f64>> {
    let scaled = circle_zeta_scaled::<f64>(max_order)?;
    Ok((1..=max_order / 2).map(|n| scaled.coeff(2 * n + 1) * (PI / 2.0).powi(2 * n as i32)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurvatureProfile, Perturbation};
    use crate::series::Rational;
    use num_complex::Complex64;

    fn circle() -> BoundaryCurve {
        BoundaryCurve::build(&CurvatureProfile::circle(), 256).unwrap()
    }

    #[test]
    fn circle_coefficients_from_the_pipeline() {
        let nf = normal_form(&circle(), 5, &NormalFormOptions { harmonics: 4, check_mirror: true }).unwrap();
        assert!((nf.c_coeffs[0] - PI * PI / 24.0).abs() < 1e-12);
        assert!((nf.c_coeffs[1] - 3.0 * PI.powi(4) / 640.0).abs() < 1e-11);
        assert!((nf.c1 - (2.0 * PI).powf(-2.0 / 3.0)).abs() < 1e-14);
        assert!(nf.mirror_defects.iter().all(|d| *d < 1e-12));
        for r in &nf.ledger {
            assert!(r.big_b.iter().all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn circle_seed_is_already_integrable() {
        let exp = lazutkin_seed(&circle(), 7, 4).unwrap();
        for n in 0..=8 {
            assert!(exp.fx.oscillation_norm(n) < 1e-13);
            assert!(exp.gy.line_norm(n) < 1e-13);
        }
        let want = circle_coefficients(7).unwrap();
        assert!((exp.fx.coeff(3, 0).re - want[0]).abs() < 1e-13);
        assert!((exp.fx.coeff(7, 0).re - want[2]).abs() < 1e-11);
    }

    #[test]
    fn exact_circle_coefficients() {
        let z = circle_zeta_scaled::<Rational>(7).unwrap();
        assert_eq!(z.coeff(3), Rational::new(1, 6));
        assert_eq!(z.coeff(5), Rational::new(3, 40));
        assert_eq!(z.coeff(7), Rational::new(5, 112));
        assert_eq!(z.coeff(4), Rational::new(0, 1));
    }

    #[test]
    fn seed_order_is_capped() {
        assert!(matches!(lazutkin_seed(&circle(), 11, 4), Err(Error::SeedOrderExceeded { .. })));
        assert!(normal_form(&circle(), 4, &NormalFormOptions::default()).is_err());
    }

    #[test]
    fn perturbed_circle_constraints_hold() {
        let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(3, 0.05)]).unwrap();
        let curve = BoundaryCurve::build(&p, 512).unwrap();
        let seed = lazutkin_seed(&curve, 5, 32).unwrap();
        assert!(symplectic_residual(&seed) < 1e-10);
        assert!(mirror_defect(&seed).unwrap() < 1e-10);
        let nf = normal_form(&curve, 5, &NormalFormOptions::default()).unwrap();
        for r in &nf.ledger {
            assert!(r.symplectic_residual < 1e-9 && r.order_residual < 1e-9);
        }
        assert!(nf.mirror_defects.iter().all(|d| *d < 1e-9));
        assert!((nf.c1 - 1.0 / curve.lazutkin_integral()).abs() < 1e-12);
    }

    #[test]
    fn normal_form_input_is_a_fixed_point() {
        let zeta = UnivariatePoly::from_coeffs(alloc::vec![0.0, 1.0, 0.0, 0.3, 0.0, 0.0, 0.0]);
        let exp = MapExpansion::synthetic(zeta.clone(), 5, &[], 6, 3);
        let (out, rec) = iterate_step(&exp).unwrap();
        assert_eq!(rec.mean_f0, 0.0);
        assert_eq!(out.zeta, zeta);
        assert_eq!(out.fx.max_norm(), 0.0);
        assert_eq!(out.gy.max_norm(), 0.0);
    }

    #[test]
    fn constant_f0_moves_into_zeta() {
        let zeta = UnivariatePoly::identity(6);
        let exp = MapExpansion::synthetic(zeta, 3, &[(0, Complex64::new(0.7, 0.0))], 6, 3);
        let (out, rec) = iterate_step(&exp).unwrap();
        assert_eq!(rec.k_next, 5);
        assert!(rec.big_b.iter().all(|c| c.norm() == 0.0));
        assert!((out.zeta.coeff(3) - 0.7).abs() < 1e-15);
        assert!(out.fx.max_norm() < 1e-15 && out.gy.max_norm() < 1e-15);
    }

    #[test]
    fn one_harmonic_step() {
        // f₀ = cos 2πx: [f₀] = 0 and B(x) = −sin(2πx)/(5·2π).
        let zeta = UnivariatePoly::identity(6);
        let exp = MapExpansion::synthetic(zeta.clone(), 3, &[(1, Complex64::new(0.5, 0.0))], 6, 8);
        assert!(symplectic_residual(&exp) < 1e-15);
        let (out, rec) = iterate_step(&exp).unwrap();
        assert_eq!(rec.mean_f0, 0.0);
        assert_eq!(out.zeta.coeff(3), 0.0);
        assert!(out.fx.line_norm(3) == 0.0);
        let steps = transform_generating_ledger(&[rec]);
        let x = 0.3;
        let want = -(2.0 * PI * x).sin() / (5.0 * 2.0 * PI);
        assert!((steps[0].big_b(x).0 - want).abs() < 1e-15);
        assert!((steps[0].s(x, 0.1) - 1e-4 * want).abs() < 1e-17);
        assert!(steps[0].exactness_defect(0.27, 0.2, 1e-5) < 1e-9);
    }

    #[test]
    fn broken_symplectic_input_is_rejected() {
        let mut exp = MapExpansion::synthetic(UnivariatePoly::identity(6), 3, &[(1, Complex64::new(0.5, 0.0))], 6, 4);
        exp.gy = FourierTaylorSeries::zeros(6, 4);
        assert!(matches!(iterate_step(&exp), Err(Error::ConstraintViolation { what: "symplectic cancellation", .. })));
        let mut even = MapExpansion::synthetic(UnivariatePoly::identity(6), 4, &[(0, Complex64::new(0.2, 0.0))], 6, 4);
        even.k = 4;
        assert!(matches!(iterate_step(&even), Err(Error::ConstraintViolation { .. })));
    }
}
