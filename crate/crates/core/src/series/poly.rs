use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use super::Coeff;
use crate::{Error, Result};

/// Power series in one variable truncated at a fixed order:
/// `a₀ + a₁y + … + a_N y^N + O(y^{N+1})`.
///
/// Binary operators between series of different orders produce a result at
/// the smaller order, which is the order to which the result is known.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePoly<T = f64> {
    coeffs: Vec<T>,
}

impl<T: Coeff> UnivariatePoly<T> {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![T::zero(); order + 1] }
    }

    pub fn constant(order: usize, c: T) -> Self {
        let mut p = Self::zero(order);
        p.coeffs[0] = c;
        p
    }

    /// The series `y`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(order, 1, T::one())
    }

    pub fn monomial(order: usize, degree: usize, c: T) -> Self {
        let mut p = Self::zero(order);
        if degree <= order {
            p.coeffs[degree] = c;
        }
        p
    }

    /// Builds a series from its coefficients; the order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `y^n`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> T {
        self.coeffs.get(n).cloned().unwrap_or_else(T::zero)
    }

    pub fn set_coeff(&mut self, n: usize, c: T) {
        if n <= self.order() {
            self.coeffs[n] = c;
        }
    }

    /// Same series re-truncated (or zero-padded) to `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs: Vec<T> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, T::zero());
        Self { coeffs }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n.saturating_sub(1));
        for i in 1..=n {
            out.coeffs[i - 1] = self.coeffs[i].clone() * T::from_int(i as i64);
        }
        out
    }

    /// Antiderivative vanishing at zero; the order grows by one.
    pub fn integral(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n + 1);
        for i in 0..=n {
            out.coeffs[i + 1] = self.coeffs[i].clone() * T::from_ratio(1, i as i64 + 1);
        }
        out
    }

    pub fn eval(&self, y: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * y.clone() + c.clone())
    }

    /// Multiplies by `y^m`, keeping the order.
    pub fn shift_up(&self, m: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n.saturating_sub(m) {
            if i + m <= n {
                out.coeffs[i + m] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Divides by `y^m`. The low coefficients must vanish; the order drops by `m`.
    pub fn shift_down(&self, m: usize) -> Result<Self> {
        if m > self.order() {
            return Err(Error::OrderExceeded { requested: m, available: self.order() });
        }
        if self.coeffs[..m].iter().any(|c| *c != T::zero()) {
            return Err(Error::HasConstantTerm);
        }
        Ok(Self { coeffs: self.coeffs[m..].to_vec() })
    }

    /// Drops coefficients whose magnitude is below `tol`; used to clean
    /// values that are zero by construction before a `shift_down`.
    pub fn chop_low(&self, upto: usize, tol: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().take(upto) {
            if c.magnitude() <= tol {
                *c = T::zero();
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0].clone();
        if a0 == T::zero() {
            return Err(Error::BadLeadingCoefficient);
        }
        let inv0 = T::one() / a0;
        let n = self.order();
        let mut out = Self::zero(n);
        out.coeffs[0] = inv0.clone();
        for i in 1..=n {
            let mut acc = T::zero();
            for j in 1..=i {
                acc = acc + self.coeffs[j].clone() * out.coeffs[i - j].clone();
            }
            out.coeffs[i] = -(acc * inv0.clone());
        }
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// `self(inner)`; `inner` must have zero constant term so the result is
    /// exact to the common order.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if inner.coeffs[0] != T::zero() {
            return Err(Error::HasConstantTerm);
        }
        let n = self.order().min(inner.order());
        let inner = inner.with_order(n);
        let mut acc = Self::constant(n, self.coeff(self.order()));
        for i in (0..self.order()).rev() {
            acc = &acc * &inner;
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[i].clone();
        }
        Ok(acc.with_order(n))
    }

    /// `(1 + self)^alpha` by the binomial series; `self` must have no
    /// constant term.
    pub fn pow_one_plus(&self, alpha: &T) -> Result<Self> {
        if self.coeffs[0] != T::zero() {
            return Err(Error::HasConstantTerm);
        }
        let n = self.order();
        let mut out = Self::constant(n, T::one());
        let mut power = Self::constant(n, T::one());
        let mut binom = T::one();
        for j in 1..=n {
            power = &power * self;
            binom = binom * (alpha.clone() - T::from_int(j as i64 - 1)) * T::from_ratio(1, j as i64);
            out = &out + &power.scale(&binom);
        }
        Ok(out)
    }

    /// Compositional inverse of `y + O(y²)`, found by undetermined
    /// coefficients one degree at a time.
    pub fn revert(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 {
            return Err(Error::BadLeadingCoefficient);
        }
        if self.coeffs[0].magnitude() > 0.0 || (self.coeffs[1].clone() - T::one()).magnitude() > 1e-12 {
            return Err(Error::BadLeadingCoefficient);
        }
        let mut inv = Self::identity(n);
        for degree in 2..=n {
            let residual = self.compose(&inv)?;
            let c = residual.coeffs[degree].clone();
            inv.coeffs[degree] = inv.coeffs[degree].clone() - c;
        }
        Ok(inv)
    }

    /// `exp(self)`; `self` must have no constant term.
    pub fn exp(&self) -> Result<Self> {
        self.power_sum(|j| T::from_ratio(1, j as i64), 1)
    }

    pub fn sin(&self) -> Result<Self> {
        let (s, _) = self.sin_cos()?;
        Ok(s)
    }

    pub fn cos(&self) -> Result<Self> {
        let (_, c) = self.sin_cos()?;
        Ok(c)
    }

    fn sin_cos(&self) -> Result<(Self, Self)> {
        if self.coeffs[0] != T::zero() {
            return Err(Error::HasConstantTerm);
        }
        let n = self.order();
        let mut sin = Self::zero(n);
        let mut cos = Self::constant(n, T::one());
        let mut term = Self::constant(n, T::one());
        for j in 1..=n {
            term = (&term * self).scale(&T::from_ratio(1, j as i64));
            match j % 4 {
                1 => sin = &sin + &term,
                2 => cos = &cos - &term,
                3 => sin = &sin - &term,
                _ => cos = &cos + &term,
            }
        }
        Ok((sin, cos))
    }

    /// `arcsin(self)`; `self` must have no constant term.
    pub fn arcsin(&self) -> Result<Self> {
        if self.coeffs[0] != T::zero() {
            return Err(Error::HasConstantTerm);
        }
        let n = self.order();
        let sq = self * self;
        let mut out = self.clone();
        let mut odd_power = self.clone();
        let mut c = T::one();
        let mut j = 1i64;
        while (2 * j + 1) as usize <= n {
            odd_power = &odd_power * &sq;
            c = c * T::from_ratio((2 * j - 1) * (2 * j - 1), (2 * j) * (2 * j + 1));
            out = &out + &odd_power.scale(&c);
            j += 1;
        }
        Ok(out)
    }

    /// `tan(self)`; `self` must have no constant term.
    pub fn tan(&self) -> Result<Self> {
        let (s, c) = self.sin_cos()?;
        s.div(&c)
    }

    /// Σ_j w_j self^j with `w_j = weight(j)·w_{j-1}`, starting from `w_0 = start`.
    fn power_sum(&self, weight: impl Fn(usize) -> T, start: i64) -> Result<Self> {
        if self.coeffs[0] != T::zero() {
            return Err(Error::HasConstantTerm);
        }
        let n = self.order();
        let mut out = Self::constant(n, T::from_int(start));
        let mut term = Self::constant(n, T::from_int(start));
        for j in 1..=n {
            term = (&term * self).scale(&weight(j));
            out = &out + &term;
        }
        Ok(out)
    }

    /// Largest coefficient magnitude among the given degrees.
    pub fn max_magnitude(&self, degrees: impl Iterator<Item = usize>) -> f64 {
        degrees
            .filter(|&d| d <= self.order())
            .map(|d| self.coeffs[d].magnitude())
            .fold(0.0, f64::max)
    }
}

impl UnivariatePoly<f64> {
    pub fn eval_f64(&self, y: f64) -> f64 {
        self.eval(&y)
    }
}

impl<T: Coeff> Add for &UnivariatePoly<T> {
    type Output = UnivariatePoly<T>;

    fn add(self, rhs: Self) -> UnivariatePoly<T> {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|i| self.coeffs[i].clone() + rhs.coeffs[i].clone()).collect();
        UnivariatePoly { coeffs }
    }
}

impl<T: Coeff> Sub for &UnivariatePoly<T> {
    type Output = UnivariatePoly<T>;

    fn sub(self, rhs: Self) -> UnivariatePoly<T> {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|i| self.coeffs[i].clone() - rhs.coeffs[i].clone()).collect();
        UnivariatePoly { coeffs }
    }
}

impl<T: Coeff> Mul for &UnivariatePoly<T> {
    type Output = UnivariatePoly<T>;

    fn mul(self, rhs: Self) -> UnivariatePoly<T> {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![T::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if *a == T::zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        UnivariatePoly { coeffs }
    }
}

impl<T: Coeff> Neg for &UnivariatePoly<T> {
    type Output = UnivariatePoly<T>;

    fn neg(self) -> UnivariatePoly<T> {
        UnivariatePoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}
