//! Spectral invariants of strictly convex planar billiards.
//!
//! The crate computes the same invariant along two independent routes:
//!
//! * the variational route: minimizing `p/q` periodic configurations of the
//!   chord action, the barrier function, the marked length spectrum and
//!   Mather's β-function evaluated on rationals ([`orbits`]);
//! * the normal-form route: the billiard map expanded near the boundary in
//!   Lazutkin coordinates, driven to Birkhoff normal form
//!   `x̄ = x + ζ∞(y), ȳ = y` by explicit exact-symplectic coordinate changes,
//!   and the Taylor coefficients of β recovered from `ζ∞` by a formal
//!   Legendre transform ([`normal_form`], [`beta`]).
//!
//! Domains are given by the curvature radius as a trigonometric polynomial in
//! the tangent angle ([`geometry::CurvatureProfile`]) and are always rescaled
//! to perimeter one.
//!
//! The crate is `no_std` and only needs an allocator.
#![no_std]
// `num_traits::Float` is shadowed by inherent float methods whenever std is linked.
#![allow(unused_imports)]

extern crate alloc;

pub mod beta;
pub mod billiard;
mod error;
pub mod geometry;
pub mod normal_form;
pub mod orbits;
pub mod series;

mod dft;

pub use error::{Error, Result};
pub use geometry::{BoundaryCurve, CurvatureProfile, Interpolation};

/// Fractional part in `[0, 1)`.
pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x - num_traits::Float::floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}
