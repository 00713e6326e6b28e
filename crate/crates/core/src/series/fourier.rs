use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use super::UnivariatePoly;
use crate::{Error, Result};

/// Truncated series `f(x, y) = Σₙ yⁿ Σₖ f̂ₙₖ e^{2πikx}`, `0 ≤ n ≤ N`, `|k| ≤ K`.
///
/// Products generate harmonics beyond `K`; those are dropped and their
/// energy `Σ|f̂|²` is accumulated in [`discarded_energy`](Self::discarded_energy)
/// so truncation in `x` stays observable.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTaylorSeries {
    y_order: usize,
    harmonics: usize,
    coeffs: Vec<Complex64>,
    discarded: f64,
}

impl FourierTaylorSeries {
    pub fn zeros(y_order: usize, harmonics: usize) -> Self {
        Self {
            y_order,
            harmonics,
            coeffs: vec![Complex64::zero(); (y_order + 1) * (2 * harmonics + 1)],
            discarded: 0.0,
        }
    }

    pub fn constant(y_order: usize, harmonics: usize, c: f64) -> Self {
        let mut s = Self::zeros(y_order, harmonics);
        s.set(0, 0, Complex64::new(c, 0.0));
        s
    }

    /// The x-independent series with the given y-coefficients.
    pub fn from_poly(p: &UnivariatePoly<f64>, y_order: usize, harmonics: usize) -> Self {
        let mut s = Self::zeros(y_order, harmonics);
        for n in 0..=y_order.min(p.order()) {
            s.set(n, 0, Complex64::new(p.coeff(n), 0.0));
        }
        s
    }

    /// `yⁿ g(x)` where `g` is given by its harmonics `(k, ĝₖ)`; the
    /// conjugate harmonic `-k` is filled in to keep the series real.
    pub fn from_line(y_order: usize, harmonics: usize, n: usize, line: &[(i64, Complex64)]) -> Self {
        let mut s = Self::zeros(y_order, harmonics);
        for &(k, c) in line {
            s.set(n, k, c);
            if k != 0 {
                s.set(n, -k, c.conj());
            }
        }
        s
    }

    pub fn y_order(&self) -> usize {
        self.y_order
    }

    pub fn harmonics(&self) -> usize {
        self.harmonics
    }

    pub fn discarded_energy(&self) -> f64 {
        self.discarded
    }

    fn width(&self) -> usize {
        2 * self.harmonics + 1
    }

    fn idx(&self, n: usize, k: i64) -> usize {
        n * self.width() + (k + self.harmonics as i64) as usize
    }

    /// `f̂ₙₖ`; zero outside the stored range.
    pub fn coeff(&self, n: usize, k: i64) -> Complex64 {
        if n > self.y_order || k.unsigned_abs() as usize > self.harmonics {
            return Complex64::zero();
        }
        self.coeffs[self.idx(n, k)]
    }

    pub fn set(&mut self, n: usize, k: i64, c: Complex64) {
        if n <= self.y_order && k.unsigned_abs() as usize <= self.harmonics {
            let i = self.idx(n, k);
            self.coeffs[i] = c;
        }
    }

    /// Harmonics of the `yⁿ` coefficient, indexed `k + K`.
    pub fn line(&self, n: usize) -> &[Complex64] {
        let w = self.width();
        &self.coeffs[n * w..(n + 1) * w]
    }

    fn line_mut(&mut self, n: usize) -> &mut [Complex64] {
        let w = self.width();
        &mut self.coeffs[n * w..(n + 1) * w]
    }

    fn line_is_zero(&self, n: usize) -> bool {
        self.line(n).iter().all(|c| c.is_zero())
    }

    /// Sets the `yⁿ` line to zero.
    pub fn clear_line(&mut self, n: usize) {
        self.line_mut(n).fill(Complex64::zero());
    }

    /// The `yⁿ` coefficient alone, placed at order `y⁰` of a series with
    /// this shape.
    pub fn line_series(&self, n: usize) -> Self {
        let mut s = Self::zeros(self.y_order, self.harmonics);
        s.line_mut(0).copy_from_slice(self.line(n));
        s
    }

    /// Largest `|f̂ₙₖ|` on the `yⁿ` line.
    pub fn line_norm(&self, n: usize) -> f64 {
        if n > self.y_order {
            return 0.0;
        }
        self.line(n).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|f̂ₙₖ|` over the `yⁿ` line excluding `k = 0`.
    pub fn oscillation_norm(&self, n: usize) -> f64 {
        if n > self.y_order {
            return 0.0;
        }
        let k0 = self.harmonics;
        self.line(n)
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Lowest `n` whose line exceeds `tol`, if any.
    pub fn lowest_order(&self, tol: f64) -> Option<usize> {
        (0..=self.y_order).find(|&n| self.line_norm(n) > tol)
    }

    /// `max |f̂ₙ,₋ₖ − conj(f̂ₙₖ)|`.
    pub fn reality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..=self.y_order {
            for k in 1..=self.harmonics as i64 {
                worst = worst.max((self.coeff(n, -k) - self.coeff(n, k).conj()).norm());
            }
        }
        worst
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.y_order != other.y_order {
            return Err(Error::OrderMismatch("y orders differ"));
        }
        if self.harmonics != other.harmonics {
            return Err(Error::OrderMismatch("harmonic caps differ"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out.discarded += other.discarded;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|a| *a *= c);
        out
    }

    /// Product truncated at order `N` in `y` and at `K` harmonics in `x`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let n_max = self.y_order;
        let kk = self.harmonics as i64;
        let mut out = Self::zeros(n_max, self.harmonics);
        out.discarded = self.discarded + other.discarded;
        let mut full = vec![Complex64::zero(); 4 * self.harmonics + 1];
        for n in 0..=n_max {
            full.iter_mut().for_each(|c| *c = Complex64::zero());
            let mut touched = false;
            for na in 0..=n {
                let nb = n - na;
                if self.line_is_zero(na) || other.line_is_zero(nb) {
                    continue;
                }
                touched = true;
                let la = self.line(na);
                let lb = other.line(nb);
                for (ia, a) in la.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (ib, b) in lb.iter().enumerate() {
                        full[ia + ib] += a * b;
                    }
                }
            }
            if !touched {
                continue;
            }
            let mut dropped = 0.0;
            let line = out.line_mut(n);
            for (i, c) in full.iter().enumerate() {
                let k = i as i64 - 2 * kk;
                if k.abs() <= kk {
                    line[(k + kk) as usize] = *c;
                } else {
                    dropped += c.norm_sqr();
                }
            }
            out.discarded += dropped;
        }
        Ok(out)
    }

    /// Multiplies by `yᵐ`, dropping what falls beyond order `N`.
    pub fn mul_y_power(&self, m: usize) -> Self {
        let mut out = Self::zeros(self.y_order, self.harmonics);
        out.discarded = self.discarded;
        for n in 0..=self.y_order {
            if n + m <= self.y_order {
                let src = self.line(n).to_vec();
                out.line_mut(n + m).copy_from_slice(&src);
            }
        }
        out
    }

    /// Multiplies harmonic `k` by `2πik`.
    pub fn differentiate_x(&self) -> Self {
        self.differentiate_x_times(1)
    }

    fn differentiate_x_times(&self, m: usize) -> Self {
        let mut out = self.clone();
        let kk = self.harmonics as i64;
        for n in 0..=self.y_order {
            let line = out.line_mut(n);
            for (i, c) in line.iter_mut().enumerate() {
                let k = i as i64 - kk;
                let factor = Complex64::new(0.0, TAU * k as f64).powu(m as u32);
                *c *= factor;
            }
        }
        out
    }

    /// `∂f/∂y`; the top order becomes zero.
    pub fn differentiate_y(&self) -> Self {
        let mut out = Self::zeros(self.y_order, self.harmonics);
        out.discarded = self.discarded;
        for n in 1..=self.y_order {
            let src: Vec<Complex64> = self.line(n).iter().map(|c| c * n as f64).collect();
            out.line_mut(n - 1).copy_from_slice(&src);
        }
        out
    }

    /// Antiderivative in `x` of the oscillating part, normalized to vanish at
    /// `x = 0`. The mean `k = 0` harmonic is ignored.
    pub fn integrate_x_oscillating(&self) -> Self {
        let mut out = Self::zeros(self.y_order, self.harmonics);
        let kk = self.harmonics as i64;
        for n in 0..=self.y_order {
            let mut at_zero = Complex64::zero();
            for k in -kk..=kk {
                if k == 0 {
                    continue;
                }
                let c = self.coeff(n, k) / Complex64::new(0.0, TAU * k as f64);
                out.set(n, k, c);
                at_zero += c;
            }
            out.set(n, 0, -at_zero);
        }
        out
    }

    /// The `k = 0` harmonic line as a polynomial in `y`.
    pub fn average_x(&self) -> UnivariatePoly<f64> {
        let coeffs = (0..=self.y_order).map(|n| self.coeff(n, 0).re).collect();
        UnivariatePoly::from_coeffs(coeffs)
    }

    /// Pointwise value (real part).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let kk = self.harmonics as i64;
        let mut total = 0.0;
        let mut ypow = 1.0;
        for n in 0..=self.y_order {
            if !self.line_is_zero(n) {
                let mut line = 0.0;
                for k in -kk..=kk {
                    let c = self.coeff(n, k);
                    let (s, co) = (TAU * k as f64 * x).sin_cos();
                    line += c.re * co - c.im * s;
                }
                total += line * ypow;
            }
            ypow *= y;
        }
        total
    }

    /// `f(x + δ(x,y), σ(x,y))`.
    ///
    /// `δ` may contain a constant shift at order `y⁰`, applied exactly as a
    /// phase; any other `y⁰` content in `δ`, or any `y⁰` content in `σ`, is
    /// rejected since the expansion would not truncate. The remaining
    /// increment is expanded as `Σₘ δᵐ/m! ∂ₓᵐ f`.
    pub fn compose(&self, x_inc: &Self, y_sub: &Self) -> Result<Self> {
        self.check_shape(x_inc)?;
        self.check_shape(y_sub)?;
        let kk = self.harmonics as i64;
        if y_sub.line_norm(0) > 0.0 {
            return Err(Error::NotNearIdentity("y substitution has a y^0 term"));
        }
        if x_inc.oscillation_norm(0) > 0.0 {
            return Err(Error::NotNearIdentity("x increment has an x-dependent y^0 term"));
        }
        let shift = x_inc.coeff(0, 0).re;
        let mut f = self.clone();
        if shift != 0.0 {
            for n in 0..=f.y_order {
                for k in -kk..=kk {
                    let phase = Complex64::from_polar(1.0, TAU * k as f64 * shift);
                    let c = f.coeff(n, k) * phase;
                    f.set(n, k, c);
                }
            }
        }
        let mut delta = x_inc.clone();
        delta.set(0, 0, Complex64::zero());

        let n_max = self.y_order;
        let mut ypow = Vec::with_capacity(n_max + 1);
        ypow.push(Self::constant(n_max, self.harmonics, 1.0));
        for n in 1..=n_max {
            let next = ypow[n - 1].mul(y_sub)?;
            ypow.push(next);
        }

        let delta_is_zero = delta.max_norm() == 0.0;
        let mut out = Self::zeros(n_max, self.harmonics);
        out.discarded = self.discarded + x_inc.discarded + y_sub.discarded;
        let mut delta_pow = Self::constant(n_max, self.harmonics, 1.0);
        let mut factorial = 1.0;
        let mut derivative = f;
        for m in 0..=n_max {
            if m > 0 {
                if delta_is_zero {
                    break;
                }
                delta_pow = delta_pow.mul(&delta)?;
                factorial *= m as f64;
                derivative = derivative.differentiate_x();
                if delta_pow.max_norm() == 0.0 {
                    break;
                }
            }
            let mut a_m = Self::zeros(n_max, self.harmonics);
            for n in 0..=n_max - m {
                if derivative.line_is_zero(n) {
                    continue;
                }
                let term = ypow[n].mul(&derivative.line_series(n))?;
                a_m = a_m.add(&term)?;
            }
            let contribution = if m == 0 { a_m } else { delta_pow.mul(&a_m)?.scale(1.0 / factorial) };
            out = out.add(&contribution)?;
        }
        Ok(out)
    }

    /// `p(self)` for a polynomial `p`; `self` must have no `y⁰` term.
    pub fn substitute_into(&self, p: &UnivariatePoly<f64>) -> Result<Self> {
        if self.line_norm(0) > 0.0 {
            return Err(Error::HasConstantTerm);
        }
        let mut acc = Self::constant(self.y_order, self.harmonics, p.coeff(p.order()));
        for i in (0..p.order()).rev() {
            acc = acc.mul(self)?;
            let c0 = acc.coeff(0, 0) + p.coeff(i);
            acc.set(0, 0, c0);
        }
        Ok(acc)
    }

    /// `(1 + self)^α` by the binomial series; `self` must be `O(y)`.
    pub fn pow_one_plus(&self, alpha: f64) -> Result<Self> {
        if self.line_norm(0) > 0.0 {
            return Err(Error::HasConstantTerm);
        }
        let mut out = Self::constant(self.y_order, self.harmonics, 1.0);
        let mut power = out.clone();
        let mut binom = 1.0;
        for j in 1..=self.y_order {
            power = power.mul(self)?;
            if power.max_norm() == 0.0 {
                break;
            }
            binom *= (alpha - (j as f64 - 1.0)) / j as f64;
            out = out.add(&power.scale(binom))?;
        }
        Ok(out)
    }

    /// `√(1 + self)`.
    pub fn sqrt_one_plus(&self) -> Result<Self> {
        self.pow_one_plus(0.5)
    }
}
