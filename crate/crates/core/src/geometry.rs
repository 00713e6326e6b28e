//! Strictly convex boundaries described by their curvature radius.
//!
//! A domain is given by `r(φ) = a₀ + Σ aₖ cos kφ + bₖ sin kφ`, the radius of
//! curvature as a function of the tangent angle. The boundary is then
//! `ξ(φ) = ∫₀^φ r(ψ) e^{iψ} dψ`, which closes iff `a₁ = b₁ = 0`, and is convex
//! iff `r > 0`. [`BoundaryCurve`] rescales it to perimeter one and
//! parametrizes it by arc length.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::Float;

use crate::dft;
use crate::{Error, Result};

/// Relative tolerance on the first harmonic for a profile to count as closed.
pub const CLOSURE_TOL: f64 = 1e-12;

/// Smallest table accepted by [`BoundaryCurve::build`].
pub const MIN_SAMPLES: usize = 64;

/// Harmonic budget of [`CurvatureProfile::ellipse`].
pub const ELLIPSE_HARMONICS: usize = 64;

/// Curvature radius as a trigonometric polynomial in the tangent angle.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureProfile {
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

/// One harmonic added to the unit circle by [`CurvatureProfile::perturbed_circle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation {
    pub harmonic: usize,
    pub cos_amplitude: f64,
    pub sin_amplitude: f64,
}

impl Perturbation {
    pub fn cosine(harmonic: usize, amplitude: f64) -> Self {
        Self { harmonic, cos_amplitude: amplitude, sin_amplitude: 0.0 }
    }
}

/// An ellipse profile together with the sup-norm error of its truncation.
#[derive(Clone, Debug)]
pub struct TruncatedProfile {
    pub profile: CurvatureProfile,
    pub truncation_error: f64,
}

impl CurvatureProfile {
    /// `cos_coeffs = [a₀, a₁, …]`, `sin_coeffs = [b₁, b₂, …]`. Shorter lists
    /// are padded with zeros. Closure and convexity are checked when the
    /// boundary is built.
    pub fn new(cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        if cos_coeffs.is_empty() {
            return Err(Error::InvalidProfile("cos_coeffs needs at least a0"));
        }
        if cos_coeffs.iter().chain(&sin_coeffs).any(|c| !c.is_finite()) {
            return Err(Error::InvalidProfile("coefficients must be finite"));
        }
        let k = (cos_coeffs.len() - 1).max(sin_coeffs.len());
        let mut cos_coeffs = cos_coeffs;
        let mut sin_coeffs = sin_coeffs;
        cos_coeffs.resize(k + 1, 0.0);
        sin_coeffs.resize(k, 0.0);
        Ok(Self { cos_coeffs, sin_coeffs })
    }

    pub fn circle() -> Self {
        Self { cos_coeffs: alloc::vec![1.0], sin_coeffs: Vec::new() }
    }

    /// Ellipse with semi-axes `1` and `axis_ratio`, truncated to
    /// [`ELLIPSE_HARMONICS`] harmonics.
    pub fn ellipse(axis_ratio: f64) -> Result<Self> {
        Ok(Self::ellipse_truncated(axis_ratio, ELLIPSE_HARMONICS)?.profile)
    }

    /// Ellipse profile `r(φ) = a²b² / (a² sin²φ + b² cos²φ)^{3/2}` with
    /// `a = 1`, `b = axis_ratio`. Only even cosine harmonics are present; the
    /// reported error is the sup-norm gap to the exact radius on a grid four
    /// times finer than the one used for the coefficients.
    pub fn ellipse_truncated(axis_ratio: f64, harmonics: usize) -> Result<TruncatedProfile> {
        if !(axis_ratio > 0.0 && axis_ratio <= 1.0) {
            return Err(Error::BadAxisRatio(axis_ratio));
        }
        let b = axis_ratio;
        let exact = |phi: f64| {
            let (s, c) = phi.sin_cos();
            b * b / (s * s + b * b * c * c).powf(1.5)
        };
        let m = (8 * harmonics).max(512);
        let samples: Vec<f64> = (0..m).map(|j| exact(TAU * j as f64 / m as f64)).collect();
        let (mut cos, sin) = dft::trig_coefficients(&samples, harmonics);
        for (k, c) in cos.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = 0.0;
            }
        }
        let profile = Self { cos_coeffs: cos, sin_coeffs: alloc::vec![0.0; sin.len()] };
        let fine = 4 * m;
        let truncation_error = (0..fine)
            .map(|j| {
                let phi = TAU * j as f64 / fine as f64;
                (profile.radius(phi) - exact(phi)).abs()
            })
            .fold(0.0, f64::max);
        Ok(TruncatedProfile { profile, truncation_error })
    }

    /// `r(φ) = 1 + Σ (cₘ cos mφ + sₘ sin mφ)` over the given perturbations.
    pub fn perturbed_circle(perturbations: &[Perturbation]) -> Result<Self> {
        let k = perturbations.iter().map(|p| p.harmonic).max().unwrap_or(0);
        let mut cos = alloc::vec![0.0; k + 1];
        let mut sin = alloc::vec![0.0; k];
        cos[0] = 1.0;
        for p in perturbations {
            match p.harmonic {
                0 => return Err(Error::InvalidProfile("perturbation harmonic must be at least 2")),
                1 => return Err(Error::NotClosed { a1: p.cos_amplitude, b1: p.sin_amplitude }),
                m => {
                    cos[m] += p.cos_amplitude;
                    sin[m - 1] += p.sin_amplitude;
                }
            }
        }
        Self::new(cos, sin)
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    pub fn harmonics(&self) -> usize {
        self.sin_coeffs.len()
    }

    /// `(aₖ, bₖ)` for `k ≥ 1`.
    fn pair(&self, k: usize) -> (f64, f64) {
        (self.cos_coeffs[k], self.sin_coeffs[k - 1])
    }

    pub fn radius(&self, phi: f64) -> f64 {
        self.derivative(phi, 0)
    }

    /// `r⁽ʲ⁾(φ)`.
    pub fn derivative(&self, phi: f64, order: usize) -> f64 {
        let shift = order as f64 * PI / 2.0;
        let mut total = if order == 0 { self.cos_coeffs[0] } else { 0.0 };
        for k in 1..=self.harmonics() {
            let (a, b) = self.pair(k);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let kf = k as f64;
            let arg = kf * phi + shift;
            total += kf.powi(order as i32) * (a * arg.cos() + b * arg.sin());
        }
        total
    }

    /// Taylor coefficients `r⁽ʲ⁾(φ)/j!`, `j = 0..=order`, of `χ ↦ r(φ + χ)`.
    pub fn taylor(&self, phi: f64, order: usize) -> Vec<f64> {
        let mut factorial = 1.0;
        (0..=order)
            .map(|j| {
                if j > 0 {
                    factorial *= j as f64;
                }
                self.derivative(phi, j) / factorial
            })
            .collect()
    }

    /// Raw perimeter `∫₀^{2π} r dφ = 2π a₀`.
    pub fn raw_length(&self) -> f64 {
        TAU * self.cos_coeffs[0]
    }

    /// `(a₁, b₁)`, which must vanish for the curve to close.
    pub fn closure_defect(&self) -> (f64, f64) {
        if self.harmonics() == 0 {
            (0.0, 0.0)
        } else {
            self.pair(1)
        }
    }

    /// Minimum of `r` and the angle where it is attained: dense scan then
    /// golden-section refinement around the best sample.
    pub fn min_radius(&self) -> (f64, f64) {
        let m = (64 * self.harmonics()).max(256);
        let h = TAU / m as f64;
        let (mut best_phi, mut best) = (0.0, self.radius(0.0));
        for j in 1..m {
            let phi = j as f64 * h;
            let r = self.radius(phi);
            if r < best {
                best = r;
                best_phi = phi;
            }
        }
        let (phi, r) = golden_min(|phi| self.radius(phi), best_phi - h, best_phi + h);
        if r < best {
            (r, TAU * crate::wrap_unit(phi / TAU))
        } else {
            (best, best_phi)
        }
    }

    /// The profile of the same domain rotated by `theta`: `r̃(φ) = r(φ + θ)`.
    pub fn rotated(&self, theta: f64) -> Self {
        let mut out = self.clone();
        for k in 1..=self.harmonics() {
            let (a, b) = self.pair(k);
            let (s, c) = (k as f64 * theta).sin_cos();
            out.cos_coeffs[k] = a * c + b * s;
            out.sin_coeffs[k - 1] = b * c - a * s;
        }
        out
    }

    /// Checks closure and strict convexity.
    pub fn validate(&self) -> Result<()> {
        let (a1, b1) = self.closure_defect();
        let scale = self.cos_coeffs[0].abs().max(1.0);
        if a1.abs() > CLOSURE_TOL * scale || b1.abs() > CLOSURE_TOL * scale {
            return Err(Error::NotClosed { a1, b1 });
        }
        let (min_radius, angle) = self.min_radius();
        if min_radius <= 0.0 {
            return Err(Error::NonConvex { min_radius, angle });
        }
        Ok(())
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// How [`BoundaryCurve`] maps arc length to tangent angle between samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Interpolation {
    /// Newton inversion of the closed-form arc length `s(φ)`, seeded from
    /// the table. Accurate to rounding.
    #[default]
    Exact,
    /// Trigonometric interpolation of `φ(s) − 2πs` on the uniform table.
    /// Converges spectrally in the table size.
    Trigonometric,
}

/// One row of the arc-length table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample {
    pub s: f64,
    pub tangent_angle: f64,
    pub position: [f64; 2],
    pub curvature_radius: f64,
}

/// Position, unit tangent, inward normal and curvature at one footpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub position: [f64; 2],
    pub tangent: [f64; 2],
    pub normal: [f64; 2],
    pub curvature: f64,
}

/// Perimeter-one, arc-length parametrized, counterclockwise boundary.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    profile: CurvatureProfile,
    raw_length: f64,
    /// `ξ(φ) = Σ dₘ (e^{imφ} − 1)` in raw units, as a complex number.
    position_modes: Vec<(i64, Complex64)>,
    samples: Vec<BoundarySample>,
    phi_modes: Vec<Complex64>,
    interpolation: Interpolation,
}

impl BoundaryCurve {
    /// Realizes the profile, rescales to perimeter one and tabulates
    /// `n_samples` uniformly spaced arc-length samples.
    pub fn build(profile: &CurvatureProfile, n_samples: usize) -> Result<Self> {
        Self::build_with(profile, n_samples, Interpolation::Exact)
    }

    pub fn build_with(profile: &CurvatureProfile, n_samples: usize, interpolation: Interpolation) -> Result<Self> {
        if n_samples < MIN_SAMPLES {
            return Err(Error::InvalidProfile("n_samples must be at least 64"));
        }
        profile.validate()?;
        let mut profile = profile.clone();
        if profile.harmonics() >= 1 {
            profile.cos_coeffs[1] = 0.0;
            profile.sin_coeffs[0] = 0.0;
        }
        let raw_length = profile.raw_length();

        // r(ψ) = Σ ĉₖ e^{ikψ}; r e^{iψ} integrates to Σ ĉₖ (e^{i(k+1)φ} − 1)/(i(k+1)).
        let kk = profile.harmonics() as i64;
        let mut position_modes = Vec::new();
        for k in -kk..=kk {
            let c = if k == 0 {
                Complex64::new(profile.cos_coeffs[0], 0.0)
            } else {
                let (a, b) = profile.pair(k.unsigned_abs() as usize);
                if k > 0 {
                    Complex64::new(a / 2.0, -b / 2.0)
                } else {
                    Complex64::new(a / 2.0, b / 2.0)
                }
            };
            let m = k + 1;
            if m == 0 || c == Complex64::new(0.0, 0.0) {
                continue;
            }
            position_modes.push((m, c / Complex64::new(0.0, m as f64) / raw_length));
        }

        let mut curve = Self {
            profile,
            raw_length,
            position_modes,
            samples: Vec::with_capacity(n_samples),
            phi_modes: Vec::new(),
            interpolation: Interpolation::Exact,
        };
        let mut phi = 0.0;
        for j in 0..n_samples {
            let s = j as f64 / n_samples as f64;
            phi = curve.newton_angle(s, if j == 0 { 0.0 } else { phi + TAU / n_samples as f64 });
            let z = curve.position_at_angle(phi);
            curve.samples.push(BoundarySample {
                s,
                tangent_angle: phi,
                position: z,
                curvature_radius: curve.profile.radius(phi) / raw_length,
            });
        }
        let offsets: Vec<Complex64> =
            curve.samples.iter().map(|p| Complex64::new(p.tangent_angle - TAU * p.s, 0.0)).collect();
        curve.phi_modes = dft::harmonics_of_samples(&offsets, (n_samples - 1) / 2);
        curve.interpolation = interpolation;
        Ok(curve)
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    /// Always one.
    pub fn perimeter(&self) -> f64 {
        1.0
    }

    /// Length of the boundary before rescaling.
    pub fn raw_length(&self) -> f64 {
        self.raw_length
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Arc length (perimeter units) of the point with tangent angle `phi`,
    /// lifted: `s(φ + 2π) = s(φ) + 1`.
    pub fn arc_length_at_angle(&self, phi: f64) -> f64 {
        let p = &self.profile;
        let mut total = p.cos_coeffs[0] * phi;
        for k in 2..=p.harmonics() {
            let (a, b) = p.pair(k);
            let kf = k as f64;
            let (s, c) = (kf * phi).sin_cos();
            total += (a * s + b * (1.0 - c)) / kf;
        }
        total / self.raw_length
    }

    fn newton_angle(&self, s: f64, guess: f64) -> f64 {
        let mut phi = guess;
        for _ in 0..50 {
            let f = self.arc_length_at_angle(phi) - s;
            let step = f * self.raw_length / self.profile.radius(phi);
            phi -= step;
            if step.abs() < 1e-15 * phi.abs().max(1.0) {
                break;
            }
        }
        phi
    }

    /// Tangent angle at arc length `s`, lifted so that `φ(s + 1) = φ(s) + 2π`.
    pub fn tangent_angle(&self, s: f64) -> f64 {
        let turns = s.floor();
        let frac = s - turns;
        let base = match self.interpolation {
            Interpolation::Exact => {
                let n = self.samples.len();
                let pos = frac * n as f64;
                let j = (pos.floor() as usize).min(n - 1);
                let t = pos - j as f64;
                let lo = self.samples[j].tangent_angle;
                let hi = if j + 1 < n { self.samples[j + 1].tangent_angle } else { TAU };
                self.newton_angle(frac, lo + t * (hi - lo))
            }
            Interpolation::Trigonometric => {
                let kk = (self.phi_modes.len() / 2) as i64;
                let mut acc = 0.0;
                for (i, c) in self.phi_modes.iter().enumerate() {
                    let k = i as i64 - kk;
                    let (sn, cs) = (TAU * k as f64 * frac).sin_cos();
                    acc += c.re * cs - c.im * sn;
                }
                TAU * frac + acc
            }
        };
        base + TAU * turns
    }

    fn position_at_angle(&self, phi: f64) -> [f64; 2] {
        let mut z = Complex64::new(0.0, 0.0);
        for &(m, d) in &self.position_modes {
            let e = Complex64::from_polar(1.0, m as f64 * phi);
            z += d * (e - 1.0);
        }
        [z.re, z.im]
    }

    /// Position and unit tangent at arc length `s` (taken mod 1).
    pub fn point(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        let phi = self.tangent_angle(s);
        (self.position_at_angle(phi), [phi.cos(), phi.sin()])
    }

    pub fn frame(&self, s: f64) -> CurvePoint {
        let phi = self.tangent_angle(s);
        let (sn, cs) = phi.sin_cos();
        CurvePoint {
            position: self.position_at_angle(phi),
            tangent: [cs, sn],
            normal: [-sn, cs],
            curvature: self.raw_length / self.profile.radius(phi),
        }
    }

    /// `ρ(s)` in perimeter units.
    pub fn curvature_radius(&self, s: f64) -> f64 {
        self.profile.radius(self.tangent_angle(s)) / self.raw_length
    }

    /// `∫₀¹ ρ(s)^{-1} ds`, trapezoid rule on the arc-length table.
    pub fn total_turning(&self) -> f64 {
        let n = self.samples.len() as f64;
        self.samples.iter().map(|p| 1.0 / p.curvature_radius).sum::<f64>() / n
    }

    /// `∫₀¹ ρ(s)^{α} ds` computed in the tangent angle,
    /// `L^{-1-α} ∫₀^{2π} r^{1+α} dφ`, with the trapezoid rule.
    pub fn radius_power_integral(&self, alpha: f64) -> f64 {
        let m = (64 * self.profile.harmonics()).max(2048);
        let sum: f64 = (0..m)
            .map(|j| self.profile.radius(TAU * j as f64 / m as f64).powf(1.0 + alpha))
            .sum();
        sum * TAU / m as f64 / self.raw_length.powf(1.0 + alpha)
    }

    /// `∫₀¹ ρ^{-2/3} ds`, whose inverse is the Lazutkin constant.
    pub fn lazutkin_integral(&self) -> f64 {
        self.radius_power_integral(-2.0 / 3.0)
    }

    /// Perimeter recomputed by quadrature of `|ξ'(φ)| = r(φ)/L`.
    pub fn measured_perimeter(&self) -> f64 {
        self.radius_power_integral(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }

    #[test]
    fn circle_has_constant_radius() {
        let c = BoundaryCurve::build(&CurvatureProfile::circle(), 128).unwrap();
        for j in 0..17 {
            let s = j as f64 / 17.0;
            assert!((c.curvature_radius(s) - 1.0 / TAU).abs() < 1e-15);
        }
        let (p0, _) = c.point(0.0);
        let (p1, _) = c.point(1.0);
        assert!(dist(p0, p1) < 1e-15);
        let (ph, _) = c.point(0.5);
        assert!((dist(p0, ph) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn first_harmonic_is_rejected() {
        let p = CurvatureProfile::new(alloc::vec![1.0, 0.5], alloc::vec![]).unwrap();
        assert!(matches!(BoundaryCurve::build(&p, 128), Err(Error::NotClosed { .. })));
        assert!(matches!(
            CurvatureProfile::perturbed_circle(&[Perturbation::cosine(1, 0.1)]),
            Err(Error::NotClosed { .. })
        ));
    }

    #[test]
    fn non_convex_profile_is_rejected() {
        let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(3, 1.2)]).unwrap();
        assert!(matches!(BoundaryCurve::build(&p, 128), Err(Error::NonConvex { .. })));
    }

    #[test]
    fn small_tables_are_rejected() {
        assert!(BoundaryCurve::build(&CurvatureProfile::circle(), 32).is_err());
    }

    #[test]
    fn bad_axis_ratio() {
        assert_eq!(CurvatureProfile::ellipse(0.0), Err(Error::BadAxisRatio(0.0)));
        assert_eq!(CurvatureProfile::ellipse(1.5), Err(Error::BadAxisRatio(1.5)));
    }

    #[test]
    fn degenerate_ellipse_is_circle() {
        let e = CurvatureProfile::ellipse(1.0).unwrap();
        assert!((e.cos_coeffs()[0] - 1.0).abs() < 1e-14);
        assert!(e.cos_coeffs()[1..].iter().chain(e.sin_coeffs()).all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn ellipse_has_even_harmonics_only() {
        let t = CurvatureProfile::ellipse_truncated(0.5, 64).unwrap();
        assert!(t.truncation_error < 1e-12, "{}", t.truncation_error);
        let p = &t.profile;
        for (k, c) in p.cos_coeffs().iter().enumerate() {
            if k % 2 == 1 {
                assert_eq!(*c, 0.0);
            }
        }
        assert!(p.sin_coeffs().iter().all(|&b| b == 0.0));
        assert!(p.cos_coeffs()[2].abs() > 0.1);
    }

    #[test]
    fn rotation_shifts_the_profile() {
        let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(3, 0.2), Perturbation::cosine(5, 0.05)]).unwrap();
        let r = p.rotated(0.7);
        for j in 0..10 {
            let phi = 0.3 * j as f64;
            assert!((r.radius(phi) - p.radius(phi + 0.7)).abs() < 1e-14);
        }
    }

    #[test]
    fn taylor_coefficients_match_finite_differences() {
        let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(3, 0.2)]).unwrap();
        let t = p.taylor(0.4, 3);
        let h = 1e-4;
        let fd1 = (p.radius(0.4 + h) - p.radius(0.4 - h)) / (2.0 * h);
        let fd2 = (p.radius(0.4 + h) - 2.0 * p.radius(0.4) + p.radius(0.4 - h)) / (h * h);
        assert!((t[1] - fd1).abs() < 1e-7);
        assert!((2.0 * t[2] - fd2).abs() < 1e-5);
    }

    #[test]
    fn trigonometric_interpolation_agrees_with_exact() {
        let p = CurvatureProfile::ellipse(0.7).unwrap();
        let exact = BoundaryCurve::build(&p, 256).unwrap();
        let trig = BoundaryCurve::build_with(&p, 256, Interpolation::Trigonometric).unwrap();
        for j in 0..41 {
            let s = j as f64 / 41.0 + 0.003;
            assert!(dist(exact.point(s).0, trig.point(s).0) < 1e-10);
        }
    }
}
