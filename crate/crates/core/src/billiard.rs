//! The billiard map `(s, v) ↦ (s̄, v̄)` and its generating function
//! `h(x, x̄) = −‖ξ(x) − ξ(x̄)‖`.

use core::f64::consts::PI;

use num_traits::Float;

use crate::geometry::{BoundaryCurve, CurvePoint};
use crate::{Error, Result};

/// Rays closer than this to the tangent are refused by [`step`].
pub const GLANCING_LIMIT: f64 = 1e-6;

/// Parameter tolerance of the intersection search.
pub const STEP_TOL: f64 = 1e-12;

/// Chords shorter than this are flagged by [`twist_certificate`].
pub const SHORT_CHORD: f64 = 1e-3;

/// A footpoint `s ∈ [0, 1)` and the angle `v ∈ (0, π)` between the outgoing
/// ray and the positively oriented tangent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub s: f64,
    pub v: f64,
}

impl PhasePoint {
    pub fn new(s: f64, v: f64) -> Result<Self> {
        if !(v > 0.0 && v < PI) {
            return Err(Error::SolverFailure { reason: "angle outside (0, pi)", lo: v, hi: v });
        }
        Ok(Self { s: crate::wrap_unit(s), v })
    }

    /// The reversor `R(s, v) = (s, π − v)`.
    pub fn reflected(self) -> Self {
        Self { s: self.s, v: PI - self.v }
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn check_chord(x: f64, x_bar: f64) -> Result<()> {
    let gap = crate::wrap_unit(x_bar - x);
    if gap.min(1.0 - gap) < 1e-13 {
        return Err(Error::DegenerateChord { x, x_bar });
    }
    Ok(())
}

/// `h(x, x̄) = −‖ξ([x]) − ξ([x̄])‖`.
pub fn chord_action(curve: &BoundaryCurve, x: f64, x_bar: f64) -> Result<f64> {
    check_chord(x, x_bar)?;
    let (a, _) = curve.point(x);
    let (b, _) = curve.point(x_bar);
    Ok(-norm(sub(b, a)))
}

/// `(∂₁h, ∂₂h) = (cos v, −cos v̄)`.
pub fn chord_partials(curve: &BoundaryCurve, x: f64, x_bar: f64) -> Result<(f64, f64)> {
    check_chord(x, x_bar)?;
    let (a, ta) = curve.point(x);
    let (b, tb) = curve.point(x_bar);
    let d = sub(b, a);
    let len = norm(d);
    let u = [d[0] / len, d[1] / len];
    Ok((dot(u, ta), -dot(u, tb)))
}

/// Second derivatives of the generating function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordHessian {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

/// Value and derivatives of `h` along one chord.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordJet {
    pub action: f64,
    pub d1: f64,
    pub d2: f64,
    pub hessian: ChordHessian,
}

/// Jet of `h` between two boundary frames; the chord must be nondegenerate.
pub fn chord_jet(a: &CurvePoint, b: &CurvePoint) -> ChordJet {
    let d = sub(b.position, a.position);
    let len = norm(d);
    let u = [d[0] / len, d[1] / len];
    let ut = dot(u, a.tangent);
    let ut_bar = dot(u, b.tangent);
    let l11 = (1.0 - ut * ut) / len - a.curvature * dot(u, a.normal);
    let l22 = (1.0 - ut_bar * ut_bar) / len + b.curvature * dot(u, b.normal);
    let l12 = -(dot(a.tangent, b.tangent) - ut * ut_bar) / len;
    ChordJet {
        action: -len,
        d1: ut,
        d2: -ut_bar,
        hessian: ChordHessian { h11: -l11, h12: -l12, h22: -l22 },
    }
}

/// Analytic second derivatives of `h`; `−h₁₂ = sin v sin v̄ / ‖chord‖`.
pub fn chord_hessian(curve: &BoundaryCurve, x: f64, x_bar: f64) -> Result<ChordHessian> {
    check_chord(x, x_bar)?;
    Ok(chord_jet(&curve.frame(x), &curve.frame(x_bar)).hessian)
}

/// Angle of the chord `ξ(t) − ξ(s)` measured from the tangent at `s`.
fn chord_angle(curve: &BoundaryCurve, origin: [f64; 2], tangent: [f64; 2], t: f64) -> (f64, f64) {
    let (p, tp) = curve.point(t);
    let d = sub(p, origin);
    let angle = cross(tangent, d).atan2(dot(tangent, d));
    // dψ/dt = (d × ξ'(t)) / |d|²
    let slope = cross(d, tp) / dot(d, d);
    (angle, slope)
}

/// One bounce returning the lifted arrival footpoint `s̄ ∈ (s, s + 1)` and
/// the arrival angle.
pub fn step_lifted(curve: &BoundaryCurve, s: f64, v: f64) -> Result<(f64, f64)> {
    if v < GLANCING_LIMIT || PI - v < GLANCING_LIMIT {
        return Err(Error::SolverFailure { reason: "glancing ray", lo: s, hi: s + 1.0 });
    }
    let (origin, tangent) = curve.point(s);
    // The chord angle increases monotonically from 0 to π over (s, s + 1).
    let (mut lo, mut hi) = (s, s + 1.0);
    while hi - lo > STEP_TOL {
        let mid = 0.5 * (lo + hi);
        let (angle, _) = chord_angle(curve, origin, tangent, mid);
        if angle < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let (angle, slope) = chord_angle(curve, origin, tangent, t);
        if slope <= 0.0 {
            break;
        }
        let next = t - (angle - v) / slope;
        if !(next > s && next < s + 1.0) || (next - t).abs() > 4.0 * STEP_TOL {
            break;
        }
        t = next;
    }
    let (angle, _) = chord_angle(curve, origin, tangent, t);
    if (angle - v).abs() > 1e-9 {
        return Err(Error::SolverFailure { reason: "intersection bracket not certified", lo, hi });
    }
    let (p, tp) = curve.point(t);
    let d = sub(p, origin);
    let u = [d[0] / norm(d), d[1] / norm(d)];
    let v_bar = cross(u, tp).atan2(dot(u, tp));
    Ok((t, v_bar))
}

/// The billiard map.
pub fn step(curve: &BoundaryCurve, p: PhasePoint) -> Result<PhasePoint> {
    let (t, v_bar) = step_lifted(curve, p.s, p.v)?;
    Ok(PhasePoint { s: crate::wrap_unit(t), v: v_bar })
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = crate::wrap_unit(a - b);
    d.min(1.0 - d)
}

/// `‖φ(R(φ(p))) − R(p)‖`, zero for an exact billiard map.
pub fn reversibility_defect(curve: &BoundaryCurve, p: PhasePoint) -> Result<f64> {
    let forward = step(curve, p)?;
    let back = step(curve, forward.reflected())?;
    let target = p.reflected();
    Ok(circle_distance(back.s, target.s).hypot(back.v - target.v))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwistCertificate {
    /// `−∂₁₂h`, positive for a strictly convex boundary.
    pub value: f64,
    /// Set when the chord is shorter than [`SHORT_CHORD`]; the twist then
    /// degenerates linearly with the chord length.
    pub near_degenerate: bool,
}

/// `−∂₁₂h` from central differences of [`chord_partials`].
pub fn twist_certificate(curve: &BoundaryCurve, x: f64, x_bar: f64) -> Result<TwistCertificate> {
    let length = -chord_action(curve, x, x_bar)?;
    let eps = (1e-6f64).min(0.25 * length);
    let (plus, _) = chord_partials(curve, x, x_bar + eps)?;
    let (minus, _) = chord_partials(curve, x, x_bar - eps)?;
    Ok(TwistCertificate { value: -(plus - minus) / (2.0 * eps), near_degenerate: length < SHORT_CHORD })
}

/// Determinant of the Jacobian of `(s, cos v) ↦ (s̄, cos v̄)` by central
/// differences with step `eps`; one for an area-preserving map.
pub fn area_jacobian(curve: &BoundaryCurve, p: PhasePoint, eps: f64) -> Result<f64> {
    let image = |s: f64, c: f64| -> Result<(f64, f64)> {
        let (t, v_bar) = step_lifted(curve, s, c.acos())?;
        Ok((t, v_bar.cos()))
    };
    let c = p.v.cos();
    let (sp, cp) = image(p.s + eps, c)?;
    let (sm, cm) = image(p.s - eps, c)?;
    let (sq, cq) = image(p.s, c + eps)?;
    let (sr, cr) = image(p.s, c - eps)?;
    let ds_ds = (sp - sm) / (2.0 * eps);
    let dc_ds = (cp - cm) / (2.0 * eps);
    let ds_dc = (sq - sr) / (2.0 * eps);
    let dc_dc = (cq - cr) / (2.0 * eps);
    Ok(ds_ds * dc_dc - ds_dc * dc_ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurvatureProfile, Perturbation};

    fn circle() -> BoundaryCurve {
        BoundaryCurve::build(&CurvatureProfile::circle(), 256).unwrap()
    }

    fn ellipse() -> BoundaryCurve {
        BoundaryCurve::build(&CurvatureProfile::ellipse(0.5).unwrap(), 512).unwrap()
    }

    #[test]
    fn circle_diameter() {
        let c = circle();
        assert!((chord_action(&c, 0.0, 0.5).unwrap() + 1.0 / PI).abs() < 1e-15);
        let (d1, d2) = chord_partials(&c, 0.0, 0.5).unwrap();
        assert!(d1.abs() < 1e-15 && d2.abs() < 1e-15);
    }

    #[test]
    fn circle_chords_follow_sine_law() {
        let c = circle();
        for (p, q) in [(1, 3), (2, 5), (1, 7), (3, 8)] {
            let r = p as f64 / q as f64;
            let want = -(PI * r).sin() / PI;
            assert!((chord_action(&c, 0.0, r).unwrap() - want).abs() < 1e-15);
            assert!((chord_action(&c, 2.3, 2.3 + r).unwrap() - chord_action(&c, 3.3, 3.3 + r).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_chord_is_an_error() {
        let c = circle();
        assert!(matches!(chord_action(&c, 0.2, 1.2), Err(Error::DegenerateChord { .. })));
        assert!(matches!(chord_partials(&c, 0.2, 0.2), Err(Error::DegenerateChord { .. })));
    }

    #[test]
    fn partials_match_geometric_angles_and_differences() {
        let e = ellipse();
        for (x, xb) in [(0.1, 0.45), (0.3, 0.95), (0.77, 1.02)] {
            let (d1, d2) = chord_partials(&e, x, xb).unwrap();
            let (a, ta) = e.point(x);
            let (b, tb) = e.point(xb);
            let d = sub(b, a);
            let cos_v = dot(d, ta) / norm(d);
            let cos_vb = dot(d, tb) / norm(d);
            assert!((d1 - cos_v).abs() < 1e-12);
            assert!((d2 + cos_vb).abs() < 1e-12);
            let h = 1e-6;
            let fd1 = (chord_action(&e, x + h, xb).unwrap() - chord_action(&e, x - h, xb).unwrap()) / (2.0 * h);
            let fd2 = (chord_action(&e, x, xb + h).unwrap() - chord_action(&e, x, xb - h).unwrap()) / (2.0 * h);
            assert!((fd1 - d1).abs() < 1e-6 && (fd2 - d2).abs() < 1e-6);
        }
    }

    #[test]
    fn analytic_hessian_matches_differences() {
        let e = ellipse();
        let (x, xb) = (0.13, 0.58);
        let hs = chord_hessian(&e, x, xb).unwrap();
        let eps = 1e-5;
        let d = |x: f64, xb: f64| chord_partials(&e, x, xb).unwrap();
        let h11 = (d(x + eps, xb).0 - d(x - eps, xb).0) / (2.0 * eps);
        let h12 = (d(x, xb + eps).0 - d(x, xb - eps).0) / (2.0 * eps);
        let h22 = (d(x, xb + eps).1 - d(x, xb - eps).1) / (2.0 * eps);
        assert!((hs.h11 - h11).abs() < 1e-6);
        assert!((hs.h12 - h12).abs() < 1e-6);
        assert!((hs.h22 - h22).abs() < 1e-6);
    }

    #[test]
    fn circle_step_is_rotation() {
        let c = circle();
        let q = step(&c, PhasePoint::new(0.0, PI / 2.0).unwrap()).unwrap();
        assert!((q.s - 0.5).abs() < 1e-12 && (q.v - PI / 2.0).abs() < 1e-12);
        let q = step(&c, PhasePoint::new(0.0, PI / 3.0).unwrap()).unwrap();
        assert!((q.s - 1.0 / 3.0).abs() < 1e-12 && (q.v - PI / 3.0).abs() < 1e-12);
        for j in 1..20 {
            let v = 0.15 * j as f64;
            let s = 0.37;
            let q = step(&c, PhasePoint::new(s, v).unwrap()).unwrap();
            assert!(circle_distance(q.s, s + v / PI) < 1e-10);
            assert!((q.v - v).abs() < 1e-10);
        }
    }

    #[test]
    fn glancing_rays_are_refused() {
        let c = circle();
        let p = PhasePoint { s: 0.0, v: 1e-7 };
        assert!(matches!(step(&c, p), Err(Error::SolverFailure { .. })));
        let p = PhasePoint { s: 0.0, v: PI - 1e-7 };
        assert!(matches!(step(&c, p), Err(Error::SolverFailure { .. })));
    }

    #[test]
    fn step_satisfies_generating_identity() {
        let e = ellipse();
        let p = PhasePoint::new(0.21, 1.1).unwrap();
        let (t, v_bar) = step_lifted(&e, p.s, p.v).unwrap();
        let (d1, d2) = chord_partials(&e, p.s, t).unwrap();
        assert!((d1 - p.v.cos()).abs() < 1e-10);
        assert!((d2 + v_bar.cos()).abs() < 1e-10);
    }

    #[test]
    fn reversibility_on_circle_and_ellipse() {
        let c = circle();
        let e = ellipse();
        for j in 1..10 {
            let p = PhasePoint::new(0.1 * j as f64, 0.3 * j as f64).unwrap();
            assert!(reversibility_defect(&c, p).unwrap() < 1e-12);
            assert!(reversibility_defect(&e, p).unwrap() < 1e-8);
        }
    }

    #[test]
    fn twist_is_positive_and_degenerates_linearly() {
        let e = ellipse();
        for j in 0..25 {
            let x = 0.04 * j as f64;
            let t = twist_certificate(&e, x, x + 0.05 + 0.035 * j as f64).unwrap();
            assert!(t.value > 0.0 && !t.near_degenerate);
        }
        let c = circle();
        let t = twist_certificate(&c, 0.0, 0.5).unwrap();
        assert!((t.value - PI).abs() < 1e-6);
        // −h₁₂ = π sin(πΔ) on the circle
        let small = twist_certificate(&c, 0.0, 1e-4).unwrap();
        assert!(small.near_degenerate && small.value.is_finite());
        assert!((small.value - PI * (PI * 1e-4).sin()).abs() < 1e-6);
    }

    #[test]
    fn area_is_preserved() {
        let p = CurvatureProfile::perturbed_circle(&[Perturbation::cosine(3, 0.1)]).unwrap();
        let c = BoundaryCurve::build(&p, 256).unwrap();
        for j in 1..6 {
            let q = PhasePoint::new(0.17 * j as f64, 0.5 * j as f64).unwrap();
            assert!((area_jacobian(&c, q, 1e-5).unwrap() - 1.0).abs() < 1e-6);
        }
    }
}
