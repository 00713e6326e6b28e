//! Minimizing periodic configurations of the chord action, the barrier
//! function, Mather's β-function and the marked length spectrum.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::Float;

use crate::billiard::{chord_jet, ChordJet};
use crate::geometry::{BoundaryCurve, CurvePoint};
use crate::{Error, Result};

/// Fitted β-coefficients above this condition number are refused.
pub const MAX_CONDITION: f64 = 1e13;

/// Extra odd powers kept in [`beta_fit`] to absorb the truncated tail.
pub const FIT_GUARD_TERMS: usize = 3;

/// A `p/q`-periodic configuration `x₀ < … < x_{q−1}` with `x_{i+q} = x_i + p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    lift: Vec<f64>,
    p: i64,
    q: i64,
    gcd: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Checks `p/q` and folds `(1/2, 1)` onto `(0, 1/2)` with the reversor.
fn fold_rotation(p: i64, q: i64, allow_multiples: bool) -> Result<(i64, i64)> {
    if q < 2 {
        return Err(Error::InvalidRotation { p, q, reason: "period must be at least 2" });
    }
    if p <= 0 || p >= q {
        return Err(Error::InvalidRotation { p, q, reason: "rotation number must lie in (0, 1)" });
    }
    if !allow_multiples && gcd(p, q) != 1 {
        return Err(Error::InvalidRotation { p, q, reason: "p and q share a factor" });
    }
    Ok(if 2 * p > q { (q - p, q) } else { (p, q) })
}

fn monotone(lift: &[f64], p: i64) -> bool {
    let q = lift.len();
    (0..q).all(|i| {
        let next = if i + 1 < q { lift[i + 1] } else { lift[0] + p as f64 };
        let gap = next - lift[i];
        gap > 0.0 && gap < 1.0
    })
}

impl Configuration {
    pub fn new(lift: Vec<f64>, p: i64, q: i64) -> Result<Self> {
        if lift.len() as i64 != q {
            return Err(Error::InvalidRotation { p, q, reason: "lift length differs from the period" });
        }
        if !monotone(&lift, p) {
            return Err(Error::OrderViolation);
        }
        Ok(Self { lift, p, q, gcd: gcd(p, q) })
    }

    /// `xᵢ = offset + i·p/q`.
    pub fn equispaced(p: i64, q: i64, offset: f64) -> Self {
        let lift = (0..q).map(|i| offset + (i * p) as f64 / q as f64).collect();
        Self { lift, p, q, gcd: gcd(p, q) }
    }

    pub fn lift(&self) -> &[f64] {
        &self.lift
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn gcd(&self) -> i64 {
        self.gcd
    }

    pub fn rotation_number(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `x_i` for any integer `i` through the periodicity convention.
    pub fn point(&self, i: i64) -> f64 {
        let k = i.div_euclid(self.q);
        self.lift[i.rem_euclid(self.q) as usize] + (k * self.p) as f64
    }

    /// Outgoing angles `vᵢ` with `cos vᵢ = ∂₁h(xᵢ, xᵢ₊₁)`.
    pub fn angles(&self, curve: &BoundaryCurve) -> Vec<f64> {
        (0..self.q)
            .map(|i| {
                let a = curve.frame(self.point(i));
                let b = curve.frame(self.point(i + 1));
                chord_jet(&a, &b).d1.clamp(-1.0, 1.0).acos()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitResult {
    pub config: Configuration,
    /// `Σ h` over one period.
    pub action: f64,
    /// `max |∂₁h(xᵢ, xᵢ₊₁) + ∂₂h(xᵢ₋₁, xᵢ)|`.
    pub el_residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starts offset by `j/(n_starts·q)`; the lowest action wins and ties keep
    /// the equispaced start at zero.
    pub n_starts: usize,
    /// Accept `gcd(p, q) > 1`, giving multiply covered orbits.
    pub allow_multiples: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { tolerance: 1e-11, max_iterations: 200, n_starts: 3, allow_multiples: false }
    }
}

/// Action, gradient and Hessian of a periodic configuration, optionally with
/// `x₀` pinned.
struct Objective<'a> {
    curve: &'a BoundaryCurve,
    p: i64,
    pinned: bool,
}

struct Evaluation {
    action: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

impl Objective<'_> {
    fn frames(&self, lift: &[f64]) -> Vec<CurvePoint> {
        lift.iter().map(|&x| self.curve.frame(x)).collect()
    }

    fn jets(&self, lift: &[f64]) -> Vec<ChordJet> {
        let frames = self.frames(lift);
        let q = lift.len();
        (0..q).map(|i| chord_jet(&frames[i], &frames[(i + 1) % q])).collect()
    }

    fn action(&self, lift: &[f64]) -> f64 {
        let q = lift.len();
        let frames = self.frames(lift);
        (0..q).map(|i| chord_jet(&frames[i], &frames[(i + 1) % q]).action).sum()
    }

    fn evaluate(&self, lift: &[f64]) -> Evaluation {
        let q = lift.len();
        let jets = self.jets(lift);
        let mut gradient = DVector::zeros(q);
        let mut hessian = DMatrix::zeros(q, q);
        for i in 0..q {
            let prev = &jets[(i + q - 1) % q];
            let next = &jets[i];
            gradient[i] = prev.d2 + next.d1;
            hessian[(i, i)] = prev.hessian.h22 + next.hessian.h11;
            let j = (i + 1) % q;
            hessian[(i, j)] += next.hessian.h12;
            hessian[(j, i)] += next.hessian.h12;
        }
        let action = jets.iter().map(|j| j.action).sum();
        if self.pinned {
            gradient[0] = 0.0;
            for k in 0..q {
                hessian[(0, k)] = 0.0;
                hessian[(k, 0)] = 0.0;
            }
            hessian[(0, 0)] = 1.0;
        }
        Evaluation { action, gradient, hessian }
    }

    fn residual(&self, gradient: &DVector<f64>) -> f64 {
        gradient.amax()
    }
}

fn solve_shifted(hessian: &DMatrix<f64>, gradient: &DVector<f64>, shift: f64) -> Option<DVector<f64>> {
    let n = hessian.nrows();
    let shifted = hessian + DMatrix::identity(n, n) * shift;
    shifted.cholesky().map(|c| -c.solve(gradient))
}

/// Damped Newton from `start`; returns the lift, iteration count and whether
/// the residual reached the tolerance.
fn descend(objective: &Objective, start: Vec<f64>, options: &OrbitOptions) -> Result<(Vec<f64>, usize, bool)> {
    let mut lift = start;
    let mut escapes = 0;
    let mut iteration = 0;
    while iteration < options.max_iterations {
        iteration += 1;
        let eval = objective.evaluate(&lift);
        let residual = objective.residual(&eval.gradient);
        if residual < options.tolerance {
            match escape_direction(objective, &eval) {
                Some(dir) if escapes < 8 => {
                    escapes += 1;
                    lift = escape(objective, &lift, &dir, eval.action)?;
                    continue;
                }
                _ => return Ok((lift, iteration, true)),
            }
        }
        let scale = eval.hessian.diagonal().amax().max(1.0);
        let mut shift = 0.0;
        let mut accepted = false;
        let mut blocked = true;
        while shift < 1e16 * scale {
            if let Some(delta) = solve_shifted(&eval.hessian, &eval.gradient, shift) {
                let mut t = 1.0;
                let mut candidate = None;
                for _ in 0..60 {
                    let trial: Vec<f64> = lift.iter().zip(delta.iter()).map(|(x, d)| x + t * d).collect();
                    if monotone(&trial, objective.p) {
                        candidate = Some(trial);
                        break;
                    }
                    t *= 0.5;
                }
                if let Some(trial) = candidate {
                    blocked = false;
                    let trial_eval = objective.evaluate(&trial);
                    let improves = |e: &Evaluation| {
                        let slack = 1e-14 * eval.action.abs();
                        e.action < eval.action
                            || (e.action <= eval.action + slack && objective.residual(&e.gradient) < residual)
                    };
                    if improves(&trial_eval) {
                        lift = trial;
                        accepted = true;
                        break;
                    }
                    // In a curved valley the step leaves the floor; pull it
                    // back along the stiff directions before judging it.
                    if let Some((back, back_eval)) = correct(objective, &trial, &trial_eval, scale) {
                        if improves(&back_eval) {
                            lift = back;
                            accepted = true;
                            break;
                        }
                    }
                }
            }
            shift = if shift == 0.0 { 1e-10 * scale } else { shift * 10.0 };
        }
        if !accepted {
            if blocked {
                return Err(Error::OrderViolation);
            }
            return Ok((lift, iteration, false));
        }
    }
    Ok((lift, iteration, false))
}

/// One Newton step with a shift large enough to freeze soft modes.
fn correct(objective: &Objective, trial: &[f64], eval: &Evaluation, scale: f64) -> Option<(Vec<f64>, Evaluation)> {
    let delta = solve_shifted(&eval.hessian, &eval.gradient, 1e-6 * scale)?;
    let back: Vec<f64> = trial.iter().zip(delta.iter()).map(|(x, d)| x + d).collect();
    if !monotone(&back, objective.p) {
        return None;
    }
    let back_eval = objective.evaluate(&back);
    Some((back, back_eval))
}

/// Unit eigenvector of a clearly negative Hessian eigenvalue, if any.
fn escape_direction(objective: &Objective, eval: &Evaluation) -> Option<DVector<f64>> {
    let eigen = SymmetricEigen::new(eval.hessian.clone());
    let scale = eigen.eigenvalues.amax().max(1.0);
    let (index, value) = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    if value >= -1e-9 * scale {
        return None;
    }
    let mut dir = eigen.eigenvectors.column(index).into_owned();
    if objective.pinned {
        dir[0] = 0.0;
    }
    Some(dir)
}

/// Leaves a saddle along `dir`, taking whichever side lowers the action.
fn escape(objective: &Objective, lift: &[f64], dir: &DVector<f64>, action: f64) -> Result<Vec<f64>> {
    let mut step = 1e-2;
    for _ in 0..30 {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for sign in [1.0, -1.0] {
            let trial: Vec<f64> = lift.iter().zip(dir.iter()).map(|(x, d)| x + sign * step * d).collect();
            if monotone(&trial, objective.p) {
                let a = objective.action(&trial);
                if a < action && best.as_ref().is_none_or(|b| a < b.0) {
                    best = Some((a, trial));
                }
            }
        }
        if let Some((_, trial)) = best {
            return Ok(trial);
        }
        step *= 0.5;
    }
    Ok(lift.to_vec())
}

fn finish(objective: &Objective, lift: Vec<f64>, p: i64, q: i64, iterations: usize, converged: bool) -> OrbitResult {
    let eval = objective.evaluate(&lift);
    let el_residual = objective.residual(&eval.gradient);
    OrbitResult {
        config: Configuration { lift, p, q, gcd: gcd(p, q) },
        action: eval.action,
        el_residual,
        converged,
        iterations,
    }
}

fn run(
    objective: &Objective,
    p: i64,
    q: i64,
    starts: Vec<Vec<f64>>,
    options: &OrbitOptions,
) -> Result<OrbitResult> {
    let mut best: Option<OrbitResult> = None;
    let mut failure = None;
    for start in starts {
        match descend(objective, start, options) {
            Ok((lift, iterations, converged)) => {
                let result = finish(objective, lift, p, q, iterations, converged);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (result.converged && !b.converged)
                            || (result.converged == b.converged
                                && result.action < b.action - 1e-13 * b.action.abs().max(1.0))
                    }
                };
                if better {
                    best = Some(result);
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    match best {
        Some(b) if b.converged => Ok(b),
        Some(b) => Err(Error::NoConvergence { iterations: b.iterations, residual: b.el_residual }),
        None => Err(failure.unwrap_or(Error::OrderViolation)),
    }
}

/// Minimizes `Σᵢ h(xᵢ, xᵢ₊₁)` over monotone `p/q` configurations.
pub fn minimize_action(
    curve: &BoundaryCurve,
    p: i64,
    q: i64,
    init: Option<&Configuration>,
    options: &OrbitOptions,
) -> Result<OrbitResult> {
    let (p, q) = fold_rotation(p, q, options.allow_multiples)?;
    let objective = Objective { curve, p, pinned: false };
    let starts = match init {
        Some(c) => {
            if c.p != p || c.q != q {
                return Err(Error::InvalidRotation { p: c.p, q: c.q, reason: "initial configuration has another rotation number" });
            }
            if !monotone(&c.lift, p) {
                return Err(Error::OrderViolation);
            }
            vec![c.lift.clone()]
        }
        None => {
            let n = options.n_starts.max(1);
            (0..n)
                .map(|j| Configuration::equispaced(p, q, j as f64 / (n as f64 * q as f64)).lift)
                .collect()
        }
    };
    run(&objective, p, q, starts, options)
}

/// The barrier `B(s, p/q)`: minimal action with `x₀ = s`.
pub fn barrier(curve: &BoundaryCurve, s: f64, p: i64, q: i64, options: &OrbitOptions) -> Result<OrbitResult> {
    let (p, q) = fold_rotation(p, q, options.allow_multiples)?;
    let objective = Objective { curve, p, pinned: true };
    // x₀ stays at s; the free points start on and beside the equispaced
    // positions since the constrained problem can have several local minima.
    let n = options.n_starts.max(1);
    let starts = (0..n)
        .map(|j| {
            let shift = if j == 0 { 0.0 } else { (j as f64 - 0.5 * n as f64) / (n as f64 * q as f64) };
            let mut lift = Configuration::equispaced(p, q, s + shift).lift;
            lift[0] = s;
            lift
        })
        .filter(|lift| monotone(lift, p))
        .collect();
    run(&objective, p, q, starts, options)
}

/// `β(p/q)`, the minimal average action; multiples of a lowest-terms pair
/// are accepted.
pub fn beta_rational(curve: &BoundaryCurve, p: i64, q: i64) -> Result<f64> {
    let options = OrbitOptions { allow_multiples: true, ..OrbitOptions::default() };
    Ok(minimize_action(curve, p, q, None, &options)?.action / q as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub p: i64,
    pub q: i64,
    pub result: Result<OrbitResult>,
}

impl SpectrumEntry {
    /// `q·β(p/q)`, the minimal periodic action.
    pub fn length(&self) -> Option<f64> {
        self.result.as_ref().ok().map(|r| r.action)
    }
}

/// Lowest-terms `p/q ∈ (0, 1/2]` with `2 ≤ q ≤ q_max`, ordered by `q` then `p`.
pub fn spectrum_rotations(q_max: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for q in 2..=q_max {
        for p in 1..=q / 2 {
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

/// The marked length spectrum up to period `q_max`; failures are reported
/// per entry.
pub fn marked_length_spectrum(curve: &BoundaryCurve, q_max: i64, options: &OrbitOptions) -> Vec<SpectrumEntry> {
    spectrum_rotations(q_max)
        .into_iter()
        .map(|(p, q)| SpectrumEntry { p, q, result: minimize_action(curve, p, q, None, options) })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrrationalBeta {
    pub value: f64,
    /// `|β(pₙ/qₙ) − β(pₙ₋₁/qₙ₋₁)|` for the last two convergents.
    pub gap: f64,
    /// `(pₙ, qₙ, β(pₙ/qₙ))` along the continued fraction.
    pub convergents: Vec<(i64, i64, f64)>,
}

/// Convergents `p/q` of `omega` with `2 ≤ q ≤ q_max`.
pub fn convergents(omega: f64, q_max: i64) -> Result<Vec<(i64, i64)>> {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut x = omega;
    let mut out = Vec::new();
    loop {
        let a = x.floor();
        let (p2, q2) = (a as i64 * p1 + p0, a as i64 * q1 + q0);
        if q2 > q_max {
            break;
        }
        if (omega - p2 as f64 / q2 as f64).abs() < 1e-14 {
            return Err(Error::RationalInput(omega));
        }
        if q2 >= 2 {
            out.push((p2, q2));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        x = 1.0 / (x - a);
    }
    Ok(out)
}

/// `β(ω)` as the limit along continued-fraction convergents.
pub fn beta_irrational(curve: &BoundaryCurve, omega: f64, q_max: i64) -> Result<IrrationalBeta> {
    if !(omega > 0.0 && omega < 0.5) {
        return Err(Error::InvalidRotation { p: 0, q: 0, reason: "rotation number must lie in (0, 1/2)" });
    }
    let pairs = convergents(omega, q_max)?;
    if pairs.len() < 2 {
        return Err(Error::InvalidRotation { p: 0, q: q_max, reason: "fewer than two convergents below q_max" });
    }
    let mut values = Vec::with_capacity(pairs.len());
    for (p, q) in pairs {
        values.push((p, q, beta_rational(curve, p, q)?));
    }
    let n = values.len();
    Ok(IrrationalBeta { value: values[n - 1].2, gap: (values[n - 1].2 - values[n - 2].2).abs(), convergents: values })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaFit {
    /// `(β₁, β₃, β₅, …)`.
    pub coeffs: Vec<f64>,
    /// Root mean square misfit.
    pub residual: f64,
    /// Condition number of the column-normalized design matrix.
    pub condition: f64,
}

/// Fits `β(1/q)`, `q = 3..=q_max`, by odd powers of `h = 1/q`.
pub fn beta_fit(curve: &BoundaryCurve, q_max: i64, n_coeffs: usize) -> Result<BetaFit> {
    beta_fit_range(curve, 3, q_max, n_coeffs)
}

/// As [`beta_fit`] over `q = q_min..=q_max`. Periods comparable to the
/// dominant harmonic of the boundary sit outside the asymptotic regime;
/// raising `q_min` keeps them out of the fit.
pub fn beta_fit_range(curve: &BoundaryCurve, q_min: i64, q_max: i64, n_coeffs: usize) -> Result<BetaFit> {
    let mut samples = Vec::new();
    for q in q_min.max(2)..=q_max {
        samples.push((1.0 / q as f64, beta_rational(curve, 1, q)?));
    }
    fit_odd_powers(&samples, n_coeffs)
}

/// Least-squares fit of odd powers to `(h, β)` samples with
/// [`FIT_GUARD_TERMS`] extra terms that are not reported.
pub fn fit_odd_powers(samples: &[(f64, f64)], n_coeffs: usize) -> Result<BetaFit> {
    let terms = n_coeffs + FIT_GUARD_TERMS;
    if samples.len() < terms {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    let mut design = DMatrix::from_fn(samples.len(), terms, |i, j| samples[i].0.powi(2 * j as i32 + 1));
    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    for (j, n) in norms.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / n);
    }
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if condition.is_nan() || condition >= MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let scaled = svd.solve(&rhs, 0.0).map_err(|_| Error::IllConditioned(condition))?;
    let misfit = &design * &scaled - &rhs;
    let coeffs = (0..n_coeffs).map(|j| scaled[j] / norms[j]).collect();
    Ok(BetaFit { coeffs, residual: misfit.norm() / (samples.len() as f64).sqrt(), condition })
}
