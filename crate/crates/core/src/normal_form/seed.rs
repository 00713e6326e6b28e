//! The billiard map near the boundary in Lazutkin coordinates, expanded in
//! `y` by jet transport through the chord equation.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Float;

use super::MapExpansion;
use crate::dft::{harmonics_of_samples, trig_coefficients};
use crate::geometry::{BoundaryCurve, CurvatureProfile};
use crate::series::{FourierTaylorSeries, UnivariatePoly};
use crate::{Error, Result};

/// Highest `ζ` degree the seed is expanded to.
pub const MAX_SEED_ORDER: usize = 9;

/// Harmonics below this magnitude are set to zero after sampling.
const CHOP: f64 = 1e-14;

/// Quadrature points for the Lazutkin integrals.
const QUADRATURE: usize = 4096;

/// `x(φ) = (1/I) ∫₀^φ r^{1/3}` for the raw profile, with `I` the full integral.
pub(crate) struct LazutkinAbscissa {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
    total: f64,
}

impl LazutkinAbscissa {
    pub(crate) fn new(profile: &CurvatureProfile) -> Self {
        let samples: Vec<f64> =
            (0..QUADRATURE).map(|j| profile.radius(TAU * j as f64 / QUADRATURE as f64).cbrt()).collect();
        let (cos, sin) = trig_coefficients(&samples, QUADRATURE / 4);
        let mean = cos[0];
        Self { mean, total: TAU * mean, cos, sin }
    }

    /// `I = ∫₀^{2π} r^{1/3} dφ`.
    pub(crate) fn total(&self) -> f64 {
        self.total
    }

    fn at(&self, phi: f64) -> f64 {
        let mut acc = self.mean * phi;
        for k in 1..self.cos.len() {
            let kf = k as f64;
            let (s, c) = (kf * phi).sin_cos();
            acc += (self.cos[k] * s + self.sin[k - 1] * (1.0 - c)) / kf;
        }
        acc / self.total
    }

    /// Tangent angle with `x(φ) = x`.
    fn invert(&self, profile: &CurvatureProfile, x: f64) -> f64 {
        let mut phi = TAU * x;
        for _ in 0..50 {
            let step = (self.at(phi) - x) * self.total / profile.radius(phi).cbrt();
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        phi
    }
}

/// Jets of `x̄ − x` and `ȳ − y` in `y` at the boundary point with tangent
/// angle `phi`.
fn local_jets(profile: &CurvatureProfile, phi: f64, total: f64, order: usize) -> Result<(UnivariatePoly, UnivariatePoly)> {
    let chi_order = order + 2;
    let r = UnivariatePoly::from_coeffs(profile.taylor(phi, chi_order));
    let r0 = r.coeff(0);
    let chi = UnivariatePoly::identity(chi_order);
    let (sin, cos) = (chi.sin()?, chi.cos()?);
    // Chord relative to the tangent: X + iY = ∫₀^ψ R(χ) e^{iχ} dχ.
    let x_chord = (&r * &cos).integral().with_order(chi_order);
    let y_chord = (&r * &sin).integral().with_order(chi_order);
    let tan_half = y_chord.shift_down(1)?.div(&x_chord.shift_down(1)?)?;
    let angle_of_turn = tan_half.scale(&2.0).revert()?.with_order(order);

    let mut relative = r.scale(&(1.0 / r0));
    relative.set_coeff(0, 0.0);
    let r_cbrt = relative.pow_one_plus(&(1.0 / 3.0))?.scale(&r0.cbrt()).with_order(order);
    let arc = r_cbrt.integral().with_order(order);

    let y = UnivariatePoly::identity(order);
    let v = y.scale(&(total / (4.0 * r0.cbrt()))).arcsin()?.scale(&2.0);
    let psi = angle_of_turn.compose(&v.tan()?.scale(&2.0))?;
    let v_bar = &psi - &v;
    let dx = arc.compose(&psi)?.scale(&(1.0 / total));
    let y_bar = &r_cbrt.compose(&psi)? * &v_bar.scale(&0.5).sin()?;
    let dy = &y_bar.scale(&(4.0 / total)) - &y;
    Ok((dx, dy))
}

fn lines_to_series(samples: &[Vec<f64>], order: usize, harmonics: usize) -> FourierTaylorSeries {
    let mut out = FourierTaylorSeries::zeros(order, harmonics);
    let kk = harmonics as i64;
    for n in 0..=order {
        let line: Vec<Complex64> = samples.iter().map(|p| Complex64::new(p[n], 0.0)).collect();
        let hat = harmonics_of_samples(&line, harmonics);
        for k in -kk..=kk {
            let c = hat[(k + kk) as usize];
            if c.norm() > CHOP {
                out.set(n, k, c);
            }
        }
    }
    out
}

/// Lazutkin-coordinate expansion `x̄ = x + y + fx`, `ȳ = y + gy` with `ζ = y`
/// and `k = 3`, carried to `y^{order+1}` with `harmonics` Fourier modes.
pub fn lazutkin_seed(curve: &BoundaryCurve, order: usize, harmonics: usize) -> Result<MapExpansion> {
    if order > MAX_SEED_ORDER {
        return Err(Error::SeedOrderExceeded { requested: order, available: MAX_SEED_ORDER });
    }
    if order < 3 {
        return Err(Error::OrderExceeded { requested: 3, available: order });
    }
    let profile = curve.profile();
    profile.validate()?;
    let abscissa = LazutkinAbscissa::new(profile);
    let total = abscissa.total();
    let y_order = order + 1;
    let grid = 4 * harmonics.max(1);
    let mut dx_samples = Vec::with_capacity(grid);
    let mut dy_samples = Vec::with_capacity(grid);
    for j in 0..grid {
        let phi = abscissa.invert(profile, j as f64 / grid as f64);
        let (dx, dy) = local_jets(profile, phi, total, y_order)?;
        dx_samples.push(dx.coeffs().to_vec());
        dy_samples.push(dy.coeffs().to_vec());
    }
    let mut fx = lines_to_series(&dx_samples, y_order, harmonics);
    let mut gy = lines_to_series(&dy_samples, y_order, harmonics);
    let seed_defect = (0..3).map(|n| if n == 1 { (fx.coeff(1, 0).re - 1.0).abs().max(fx.oscillation_norm(1)) } else { fx.line_norm(n) })
        .chain((0..4).map(|n| gy.line_norm(n)))
        .fold(0.0, f64::max);
    if seed_defect > 1e-9 {
        return Err(Error::ConstraintViolation { k: 3, what: "Lazutkin form of the seed", residual: seed_defect });
    }
    for n in 0..3 {
        fx.clear_line(n);
    }
    for n in 0..4 {
        gy.clear_line(n);
    }
    let zeta = UnivariatePoly::identity(y_order);
    Ok(MapExpansion { zeta, fx, gy, k: 3 })
}
