//! Generating functions of the conjugations, kept to certify that every
//! coordinate change is exact symplectic.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Float;

use super::StepRecord;

/// Generating data of one conjugation `Φ_k` with `S(x, v) = v^{k+1} B(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingStep {
    pub k: usize,
    pub mean_f0: f64,
    /// Harmonics of `B`, indexed `κ + K`.
    pub big_b: Vec<Complex64>,
}

fn eval_line(line: &[Complex64], x: f64) -> (f64, f64) {
    let kk = (line.len() / 2) as i64;
    let (mut value, mut slope) = (0.0, 0.0);
    for (i, c) in line.iter().enumerate() {
        let kappa = i as i64 - kk;
        let w = TAU * kappa as f64;
        let (s, co) = (w * x).sin_cos();
        value += c.re * co - c.im * s;
        slope += -w * (c.re * s + c.im * co);
    }
    (value, slope)
}

impl GeneratingStep {
    /// `B(x)` and `B′(x)`.
    pub fn big_b(&self, x: f64) -> (f64, f64) {
        eval_line(&self.big_b, x)
    }

    /// `S(x, v) = v^{k+1} B(x)`.
    pub fn s(&self, x: f64, v: f64) -> f64 {
        v.powi(self.k as i32 + 1) * self.big_b(x).0
    }

    /// `u(x, v) = x + (k+1) v^{k−1} B(x)`.
    pub fn u(&self, x: f64, v: f64) -> f64 {
        x + (self.k as f64 + 1.0) * v.powi(self.k as i32 - 1) * self.big_b(x).0
    }

    /// `y(x, v) = v √(1 + 2 v^{k−1} B′(x))`.
    pub fn y(&self, x: f64, v: f64) -> f64 {
        v * (1.0 + 2.0 * v.powi(self.k as i32 - 1) * self.big_b(x).1).sqrt()
    }

    /// `G = S − (u − x) v²/2`, a periodic primitive of `(y²/2) dx − (v²/2) du`.
    pub fn g(&self, x: f64, v: f64) -> f64 {
        self.s(x, v) - (self.u(x, v) - x) * v * v / 2.0
    }

    /// Largest deviation of the differential of `G` from
    /// `(y²/2) dx − (v²/2) du`, by central differences in `(x, v)`.
    pub fn exactness_defect(&self, x: f64, v: f64, eps: f64) -> f64 {
        let dg_dx = (self.g(x + eps, v) - self.g(x - eps, v)) / (2.0 * eps);
        let dg_dv = (self.g(x, v + eps) - self.g(x, v - eps)) / (2.0 * eps);
        let du_dx = (self.u(x + eps, v) - self.u(x - eps, v)) / (2.0 * eps);
        let du_dv = (self.u(x, v + eps) - self.u(x, v - eps)) / (2.0 * eps);
        let y = self.y(x, v);
        let want_x = y * y / 2.0 - v * v / 2.0 * du_dx;
        let want_v = -v * v / 2.0 * du_dv;
        (dg_dx - want_x).abs().max((dg_dv - want_v).abs())
    }

    /// `|Σ H₊ − Σ H|` over a closed chain `(xᵢ, vᵢ)`, `i = 0..n`, with
    /// `H₊ = G(xᵢ, vᵢ) − G(xᵢ₊₁, vᵢ₊₁) + Hᵢ`; the chain closes when the
    /// last point equals the first up to an integer shift in `x`.
    pub fn telescoping_defect(&self, chain: &[(f64, f64)], actions: &[f64]) -> f64 {
        let transformed: f64 = chain
            .windows(2)
            .zip(actions)
            .map(|(w, h)| self.g(w[0].0, w[0].1) - self.g(w[1].0, w[1].1) + h)
            .sum();
        let original: f64 = actions.iter().take(chain.len().saturating_sub(1)).sum();
        (transformed - original).abs()
    }
}

/// Generating data for every recorded step, in order.
pub fn transform_generating_ledger(records: &[StepRecord]) -> Vec<GeneratingStep> {
    records
        .iter()
        .map(|r| GeneratingStep { k: r.k, mean_f0: r.mean_f0, big_b: r.big_b.clone() })
        .collect()
}
