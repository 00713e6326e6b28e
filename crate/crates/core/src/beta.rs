//! Taylor coefficients of Mather's β-function at `h = 0`.
//!
//! The normal form `x̄ = x + ζ∞(y)` is integrable with Hamiltonian
//! `H(l) = ∫ ζ∞(√(2l)) dl`; its Legendre transform is
//! `β̃(h) = t³/6 + Σ (2i+1)/(2(2i+3)) c_{2i+1} t^{2i+3}` with `t = ζ∞⁻¹(h)`.
//! The Lazutkin change of coordinates rescales the action by `4C1³` and
//! shifts it by the perimeter, so the physical coefficients are
//! `β₁ = β̃₁/(4C1³) − 1` and `β_{2n+1} = β̃_{2n+1}/(4C1³)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::geometry::BoundaryCurve;
use crate::normal_form::{normal_form, NormalFormOptions, NormalFormResult};
use crate::orbits::{beta_fit, marked_length_spectrum, BetaFit, OrbitOptions, SpectrumEntry};
use crate::series::{Coeff, UnivariatePoly};
use crate::{Error, Result};

/// Where a set of β coefficients came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    NormalForm,
    VariationalFit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaExpansion {
    /// `(β̃₁, β̃₃, β̃₅, …)` in the Lazutkin frame.
    pub coeffs_normalized: Vec<f64>,
    /// `(β₁, β₃, β₅, …)` for the perimeter-one domain; empty until
    /// [`affine_reconcile`] has run.
    pub coeffs_physical: Vec<f64>,
    pub c1: f64,
    pub provenance: Provenance,
}

/// `β̃(h)` as a series from the integrable part `ζ` (which must be odd and
/// start with `y`); valid through degree `ζ.order() + 2`.
pub fn beta_tilde<T: Coeff>(zeta: &UnivariatePoly<T>) -> Result<UnivariatePoly<T>> {
    let m = zeta.order();
    let out_order = m + 2;
    let t = zeta.revert()?.with_order(out_order);
    let mut q = UnivariatePoly::monomial(out_order, 3, T::from_ratio(1, 6));
    let mut i = 1;
    while 2 * i < m {
        let c = zeta.coeff(2 * i + 1);
        let w = T::from_ratio(2 * i as i64 + 1, 2 * (2 * i as i64 + 3));
        q.set_coeff(2 * i + 3, q.coeff(2 * i + 3) + c * w);
        i += 1;
    }
    q.compose(&t)
}

/// Odd coefficients `β̃₁, β̃₃, …, β̃_order` from a normal form.
pub fn beta_from_normal_form(nf: &NormalFormResult, order: usize) -> Result<BetaExpansion> {
    let zeta = nf.zeta_jet();
    let available = zeta.order() + 2;
    if order > available {
        return Err(Error::OrderExceeded { requested: order, available });
    }
    let series = beta_tilde(&zeta)?;
    let coeffs_normalized = (0..=order / 2).map(|n| series.coeff(2 * n + 1)).collect();
    Ok(BetaExpansion { coeffs_normalized, coeffs_physical: Vec::new(), c1: nf.c1, provenance: Provenance::NormalForm })
}

/// Maps Lazutkin-frame coefficients to physical ones for a perimeter-one
/// domain.
pub fn affine_reconcile(exp: &BetaExpansion, c1: f64) -> BetaExpansion {
    let factor = 4.0 * c1.powi(3);
    let coeffs_physical = exp
        .coeffs_normalized
        .iter()
        .enumerate()
        .map(|(n, b)| if n == 0 { b / factor - 1.0 } else { b / factor })
        .collect();
    BetaExpansion { coeffs_physical, c1, ..exp.clone() }
}

/// Normal form, β̃ and reconciliation in one call; `order` is the highest
/// odd β degree wanted.
pub fn physical_beta(curve: &BoundaryCurve, order: usize, options: &NormalFormOptions) -> Result<BetaExpansion> {
    let order = order | 1;
    let nf_order = if order >= 5 { order - 2 } else { 3 };
    let nf = normal_form(curve, nf_order, options)?;
    let exp = beta_from_normal_form(&nf, order)?;
    Ok(affine_reconcile(&exp, nf.c1))
}

/// Both versions of the isoperimetric-type inequality for `β₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct Beta3BoundReport {
    /// `∫₀¹ ρ^{-2/3} ds`.
    pub lazutkin_integral: f64,
    /// `β₁ = −1` after reconciliation.
    pub beta1: f64,
    /// `β₃ = (∫ρ^{-2/3})³ / 24`.
    pub beta3: f64,
    /// `β₁ = 1` in the sign-flipped normalization.
    pub literal_beta1: f64,
    /// `β₃ = (∫ρ^{-2/3})³ / 4` in the sign-flipped normalization.
    pub literal_beta3: f64,
    /// `β₃ + π² β₁` from the literal values; expected `≤ 0`.
    pub literal_combination: f64,
    /// `β₃ + π² β₁` from the derived values.
    pub derived_combination: f64,
    /// `π²/6 − β₃`, nonnegative by Hölder since `∫ρ^{-1} ds = 2π`.
    pub derived_gap: f64,
    /// `derived_gap ≥ −1e−12`.
    pub derived_bound_holds: bool,
    /// `derived_gap < 1e−6`, expected only for the disc.
    pub tight: bool,
    /// Set when the literal combination is positive.
    pub literal_claim_fails: bool,
    /// `(β₁, β₃)` from the variational fit when requested.
    pub fit: Option<core::result::Result<(f64, f64), Error>>,
}

/// Evaluates the derived bound `β₃ ≤ π²/6` and the literal combination
/// `β₃ + π²β₁ ≤ 0` side by side. With `fit_q_max` the variational `β₁`, `β₃`
/// are included.
pub fn beta3_bound_report(curve: &BoundaryCurve, fit_q_max: Option<i64>) -> Beta3BoundReport {
    let integral = curve.lazutkin_integral();
    let beta3 = integral.powi(3) / 24.0;
    let beta1 = -1.0;
    let (literal_beta1, literal_beta3) = (1.0, integral.powi(3) / 4.0);
    let literal_combination = literal_beta3 + PI * PI * literal_beta1;
    let derived_gap = PI * PI / 6.0 - beta3;
    let fit = fit_q_max.map(|q| beta_fit(curve, q, 3).map(|f| (f.coeffs[0], f.coeffs[1])));
    Beta3BoundReport {
        lazutkin_integral: integral,
        beta1,
        beta3,
        literal_beta1,
        literal_beta3,
        literal_combination,
        derived_combination: beta3 + PI * PI * beta1,
        derived_gap,
        derived_bound_holds: derived_gap >= -1e-12,
        tight: derived_gap < 1e-6,
        literal_claim_fails: literal_combination > 0.0,
        fit,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGap {
    /// Odd degree `2n+1`.
    pub degree: usize,
    pub normal_form: f64,
    pub fit: f64,
    pub absolute: f64,
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossValidation {
    pub normal_form: Result<BetaExpansion>,
    pub fit: Result<BetaFit>,
    pub gaps: Vec<CoefficientGap>,
}

/// Compares the normal-form coefficients with the variational fit over
/// `q = 3..=q_max`, up to odd degree `order`.
pub fn cross_validate(curve: &BoundaryCurve, q_max: i64, order: usize) -> CrossValidation {
    let nf = physical_beta(curve, order, &NormalFormOptions::default());
    let fit = beta_fit(curve, q_max, order / 2 + 1);
    let mut gaps = Vec::new();
    if let (Ok(a), Ok(b)) = (&nf, &fit) {
        for (n, (x, y)) in a.coeffs_physical.iter().zip(&b.coeffs).enumerate() {
            let absolute = (x - y).abs();
            gaps.push(CoefficientGap {
                degree: 2 * n + 1,
                normal_form: *x,
                fit: *y,
                absolute,
                relative: absolute / x.abs().max(f64::MIN_POSITIVE),
            });
        }
    }
    CrossValidation { normal_form: nf, fit, gaps }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Every compared entry agrees within the tolerance.
    Indistinguishable,
    /// The first entry (in `q`, then `p`) whose values differ.
    DistinguishedAt { p: i64, q: i64, gap: f64 },
    /// Some entries failed to compute and the rest agree.
    Inconclusive { failed: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsospectralReport {
    pub verdict: Verdict,
    /// Largest entrywise gap among computed entries.
    pub max_gap: f64,
    pub compared: usize,
    /// `(β₁, β₃)` fit gaps when `q_max ≥ 20`.
    pub fit_gap: Option<(f64, f64)>,
}

/// Verdict for two spectra listed over the same rotations; `fit_gap` is left
/// empty.
pub fn compare_spectra(sa: &[SpectrumEntry], sb: &[SpectrumEntry], tol: f64) -> IsospectralReport {
    let mut max_gap = 0.0f64;
    let mut first = None;
    let mut failed = 0;
    let mut compared = 0;
    for (x, y) in sa.iter().zip(sb) {
        match (x.length(), y.length()) {
            (Some(u), Some(v)) => {
                compared += 1;
                let gap = (u - v).abs();
                max_gap = max_gap.max(gap);
                if gap > tol && first.is_none() {
                    first = Some((x.p, x.q, gap));
                }
            }
            _ => failed += 1,
        }
    }
    let verdict = match (first, failed) {
        (Some((p, q, gap)), _) => Verdict::DistinguishedAt { p, q, gap },
        (None, 0) => Verdict::Indistinguishable,
        (None, failed) => Verdict::Inconclusive { failed },
    };
    IsospectralReport { verdict, max_gap, compared, fit_gap: None }
}

/// Entrywise comparison of two marked length spectra.
pub fn isospectral_compare(a: &BoundaryCurve, b: &BoundaryCurve, q_max: i64, tol: f64) -> IsospectralReport {
    let options = OrbitOptions::default();
    let sa = marked_length_spectrum(a, q_max, &options);
    let sb = marked_length_spectrum(b, q_max, &options);
    let mut report = compare_spectra(&sa, &sb, tol);
    let fit_gap = if q_max >= 20 {
        match (beta_fit(a, q_max, 2), beta_fit(b, q_max, 2)) {
            (Ok(fa), Ok(fb)) => Some(((fa.coeffs[0] - fb.coeffs[0]).abs(), (fa.coeffs[1] - fb.coeffs[1]).abs())),
            _ => None,
        }
    } else {
        None
    };
    report.fit_gap = fit_gap;
    report
}
