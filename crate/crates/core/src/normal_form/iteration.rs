//! One exact-symplectic conjugation raising the order of the non-integrable
//! part from `yᵏ` to `y^{k+1}` (or `y^{k+2}` for a mirror-symmetric map).

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use super::MapExpansion;
use crate::series::{FourierTaylorSeries, UnivariatePoly};
use crate::{Error, Result};

/// Absolute tolerance for the constraint assertions, applied to
/// coefficients divided by `max(1, largest coefficient of fx and gy)`.
pub const CONSTRAINT_TOL: f64 = 1e-9;

/// Diagnostics of one conjugation step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    /// Order of the output expansion.
    pub k_next: usize,
    /// `[f₀]`, the mean of the `yᵏ` line; becomes the `yᵏ` coefficient of `ζ`.
    pub mean_f0: f64,
    /// Harmonics of `f₀` indexed `κ + K`.
    pub f0: Vec<Complex64>,
    /// Harmonics of `b(u) = ([f₀] − f₀(u))/(k+2)`.
    pub b: Vec<Complex64>,
    /// Harmonics of `B(x) = −(1/(k+2))∫₀ˣ(f₀ − [f₀])`.
    pub big_b: Vec<Complex64>,
    /// `max_κ |(k+2)ĝ_{k+1,κ} + 2πiκ f̂_{k,κ}|`, scaled.
    pub symplectic_residual: f64,
    /// Largest even-degree coefficient of the input `ζ`.
    pub zeta_parity_residual: f64,
    /// Largest line of the output below its order, scaled.
    pub order_residual: f64,
    /// Largest line of the output at order `k+1` (`y^{k+2}` for `g`), scaled;
    /// zero exactly when the step jumped by two.
    pub mirror_residual: f64,
    pub discarded_energy: f64,
}

/// `max_κ |(k+2)ĝ_{k+1,κ} + 2πiκ f̂_{k,κ}| / max(1, max_κ |2πκ f̂_{k,κ}|)`.
pub fn symplectic_residual(exp: &MapExpansion) -> f64 {
    let k = exp.k;
    if k + 1 > exp.gy.y_order() {
        return 0.0;
    }
    let kk = exp.fx.harmonics() as i64;
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for kappa in -kk..=kk {
        let df = Complex64::new(0.0, TAU * kappa as f64) * exp.fx.coeff(k, kappa);
        scale = scale.max(df.norm());
        worst = worst.max((exp.gy.coeff(k + 1, kappa) * (k as f64 + 2.0) + df).norm());
    }
    worst / scale
}

fn parity_residual(zeta: &UnivariatePoly) -> f64 {
    zeta.coeffs().iter().step_by(2).fold(0.0, |m, c| m.max(c.abs()))
}

fn power(s: &FourierTaylorSeries, m: usize) -> Result<FourierTaylorSeries> {
    let mut out = FourierTaylorSeries::constant(s.y_order(), s.harmonics(), 1.0);
    for _ in 0..m {
        out = out.mul(s)?;
    }
    Ok(out)
}

/// Conjugates `exp` by `Φ_k`, the change `(u, v) ↦ (x, y)` generated by
/// `S(x, v) = v^{k+1} B(x)`:
/// `u = x + (k+1) v^{k−1} B(x)`, `y = v √(1 + (2/(k+2)) v^{k−1} ([f₀] − f₀(x)))`.
pub fn iterate_step(exp: &MapExpansion) -> Result<(MapExpansion, StepRecord)> {
    let k = exp.k;
    let n = exp.fx.y_order();
    let kh = exp.fx.harmonics();
    if k < 2 || k > n {
        return Err(Error::OrderExceeded { requested: k, available: n });
    }
    let kf = k as f64;
    let scale = 1.0f64.max(exp.fx.max_norm()).max(exp.gy.max_norm());
    let zeta_parity_residual = parity_residual(&exp.zeta);
    if zeta_parity_residual > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation { k, what: "odd integrable part", residual: zeta_parity_residual });
    }
    let symplectic = symplectic_residual(exp);
    if symplectic > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation { k, what: "symplectic cancellation", residual: symplectic });
    }
    if k.is_multiple_of(2) {
        let r = exp.fx.line_norm(k).max(exp.gy.line_norm(k + 1)) / scale;
        if r > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation { k, what: "mirror symmetry at even order", residual: r });
        }
    }

    let f0 = exp.fx.line_series(k);
    let mean = f0.coeff(0, 0).re;
    let mut osc = f0.clone();
    osc.set(0, 0, Complex64::new(0.0, 0.0));
    let big_b = osc.integrate_x_oscillating().scale(-1.0 / (kf + 2.0));
    let v = FourierTaylorSeries::from_poly(&UnivariatePoly::identity(n), n, kh);
    let sweeps = n / (k - 1) + 2;

    // x = u + δ with δ = −(k+1) v^{k−1} B(u + δ).
    let mut delta = FourierTaylorSeries::zeros(n, kh);
    for _ in 0..sweeps {
        delta = big_b.compose(&delta, &v)?.mul_y_power(k - 1).scale(-(kf + 1.0));
    }
    let stretch = osc.compose(&delta, &v)?.scale(-2.0 / (kf + 2.0)).mul_y_power(k - 1);
    let y = v.mul(&stretch.sqrt_one_plus()?)?;

    let dx = y.substitute_into(&exp.zeta)?.add(&exp.fx.compose(&delta, &y)?)?;
    let y_bar = y.add(&exp.gy.compose(&delta, &y)?)?;
    let x_bar_inc = delta.add(&dx)?;

    // v̄ = ȳ (1 + (2/(k+2)) v̄^{k−1} ([f₀] − f₀(x̄)))^{−1/2}
    let osc_bar = osc.compose(&x_bar_inc, &v)?.scale(-2.0 / (kf + 2.0));
    let mut v_bar = y_bar.clone();
    for _ in 0..sweeps {
        let arg = osc_bar.mul(&power(&v_bar, k - 1)?)?;
        v_bar = y_bar.mul(&arg.pow_one_plus(-0.5)?)?;
    }
    let u_bar_inc = x_bar_inc.add(&big_b.compose(&x_bar_inc, &v)?.mul(&power(&v_bar, k - 1)?)?.scale(kf + 1.0))?;

    let mut zeta = exp.zeta.clone();
    zeta.set_coeff(k, exp.zeta.coeff(k) + mean);
    let mut fx = u_bar_inc.sub(&FourierTaylorSeries::from_poly(&zeta, n, kh))?;
    let mut gy = v_bar.sub(&v)?;

    let order_residual = (0..=k)
        .map(|m| fx.line_norm(m))
        .chain((0..=k + 1).map(|m| gy.line_norm(m)))
        .fold(0.0, f64::max)
        / scale;
    if order_residual > CONSTRAINT_TOL {
        return Err(Error::ConstraintViolation { k, what: "order raised by the conjugation", residual: order_residual });
    }
    for m in 0..=k {
        fx.clear_line(m);
    }
    for m in 0..=(k + 1).min(n) {
        gy.clear_line(m);
    }
    let mirror_residual = (fx.line_norm(k + 1).max(gy.line_norm(k + 2))) / scale;
    let k_next = if k % 2 == 1 && mirror_residual <= CONSTRAINT_TOL {
        if k < n {
            fx.clear_line(k + 1);
        }
        if k + 2 <= n {
            gy.clear_line(k + 2);
        }
        k + 2
    } else {
        k + 1
    };

    let record = StepRecord {
        k,
        k_next,
        mean_f0: mean,
        f0: f0.line(0).to_vec(),
        b: osc.scale(-1.0 / (kf + 2.0)).line(0).to_vec(),
        big_b: big_b.line(0).to_vec(),
        symplectic_residual: symplectic,
        zeta_parity_residual,
        order_residual,
        mirror_residual,
        discarded_energy: fx.discarded_energy() + gy.discarded_energy(),
    };
    Ok((MapExpansion { zeta, fx, gy, k: k_next }, record))
}

/// Largest coefficient of `φ∘T∘φ − T` with `T(x, y) = (x, −y)`, computed at
/// series level and divided by `max(1, ‖fx‖, ‖gy‖)`; zero for a reversible
/// map up to truncation in `x`.
pub fn mirror_defect(exp: &MapExpansion) -> Result<f64> {
    let n = exp.fx.y_order();
    let kh = exp.fx.harmonics();
    let y = FourierTaylorSeries::from_poly(&UnivariatePoly::identity(n), n, kh);
    let zero = FourierTaylorSeries::zeros(n, kh);
    let step = |x_inc: &FourierTaylorSeries, y_in: &FourierTaylorSeries| -> Result<(FourierTaylorSeries, FourierTaylorSeries)> {
        let dx = y_in.substitute_into(&exp.zeta)?.add(&exp.fx.compose(x_inc, y_in)?)?;
        let y_out = y_in.add(&exp.gy.compose(x_inc, y_in)?)?;
        Ok((x_inc.add(&dx)?, y_out))
    };
    let (x1, y1) = step(&zero, &y)?;
    let (x2, y2) = step(&x1, &y1.neg())?;
    let scale = 1.0f64.max(exp.fx.max_norm()).max(exp.gy.max_norm());
    Ok(x2.max_norm().max(y2.add(&y)?.max_norm()) / scale)
}
