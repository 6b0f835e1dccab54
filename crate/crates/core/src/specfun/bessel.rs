//! Bessel functions of the first kind for the orders ν = n/2 − 1 that the
//! kernels need, i.e. 2ν ∈ {0, 1, …, 10}.
//!
//! Branch layout, chosen so the absolute error stays below 1e-12 everywhere
//! the criterion scans reach:
//!
//! * `s ≤ 9` — ascending power series. Beyond s ≈ 9 the alternating terms
//!   grow past 1e3 and cancellation starts eating into the 1e-12 budget.
//! * half-integer ν, `s > 9` — exact spherical closed forms via the upward
//!   recurrence (stable here because s exceeds every order we support).
//! * integer ν, `9 < s < 25` — trapezoidal evaluation of the integral
//!   representation J_m(s) = (1/π)∫₀^π cos(mθ − s sin θ) dθ, which converges
//!   geometrically for equispaced nodes once N exceeds s.
//! * integer ν, `s ≥ 25` — Hankel's large-argument expansion, truncated at
//!   the smallest term (≲ e^{−2s} ≈ 2e-22 at the switchover).

use super::gamma::gamma_half_integer;
use crate::error::{Error, Result};
use std::f64::consts::PI;

pub(crate) const SERIES_CUTOFF: f64 = 9.0;
pub(crate) const ASYMPTOTIC_CUTOFF: f64 = 25.0;
const TRAPEZOID_PANELS: usize = 72;

/// J_ν(s) for 2ν ∈ {0, …, 10} and s ≥ 0.
pub fn bessel_j(nu: f64, s: f64) -> Result<f64> {
    let two_nu = 2.0 * nu;
    if two_nu.fract() != 0.0 || !(0.0..=10.0).contains(&two_nu) {
        return Err(Error::Domain(format!(
            "unsupported Bessel order nu = {nu}; need 2*nu an integer in [0, 10]"
        )));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "Bessel argument must be non-negative, got {s}"
        )));
    }
    Ok(bessel_value(nu, s))
}

pub(crate) fn bessel_value(nu: f64, s: f64) -> f64 {
    if s == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if s <= SERIES_CUTOFF {
        return ascending_series(nu, s);
    }
    let two_nu = (2.0 * nu) as i64;
    if two_nu % 2 != 0 {
        return spherical_closed_form((two_nu / 2) as u32, s);
    }
    if s < ASYMPTOTIC_CUTOFF {
        integral_representation(nu as i64, s)
    } else {
        hankel_asymptotic(nu, s)
    }
}

/// J_ν(s) = (s/2)^ν / Γ(ν+1) · Σ_k (−1)^k (s²/4)^k / (k! (ν+1)_k)
fn ascending_series(nu: f64, s: f64) -> f64 {
    let q = s * s / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..80 {
        term *= -q / ((k as f64 + 1.0) * (nu + k as f64 + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    let prefactor = (s / 2.0).powf(nu) / gamma_half_integer((2.0 * nu) as i64 + 2);
    prefactor * sum
}

/// J_{l+1/2}(s) = √(2s/π) j_l(s) with the spherical Bessel recurrence
/// j_{l+1} = ((2l+1)/s) j_l − j_{l−1}. For l ≤ 4 and s > 9 the upward sweep
/// is stable.
fn spherical_closed_form(l: u32, s: f64) -> f64 {
    let (sin_s, cos_s) = s.sin_cos();
    let mut jm = sin_s / s;
    if l == 0 {
        return (2.0 * s / PI).sqrt() * jm;
    }
    let mut j = sin_s / (s * s) - cos_s / s;
    for m in 1..l {
        let next = (2 * m + 1) as f64 / s * j - jm;
        jm = j;
        j = next;
    }
    (2.0 * s / PI).sqrt() * j
}

/// Trapezoidal rule on J_m(s) = (1/π)∫₀^π cos(mθ − s sin θ) dθ. The
/// integrand extends to an entire periodic function, so the equispaced rule
/// errs by O(J_{2N−m}(s)), utterly negligible for N = 72 and s < 25.
fn integral_representation(m: i64, s: f64) -> f64 {
    let n = TRAPEZOID_PANELS;
    let h = PI / n as f64;
    let mf = m as f64;
    // endpoints: cos(0) = 1 and cos(mπ − 0) = (−1)^m
    let mut sum = 0.5 * (1.0 + if m % 2 == 0 { 1.0 } else { -1.0 });
    for j in 1..n {
        let theta = j as f64 * h;
        sum += (mf * theta - s * theta.sin()).cos();
    }
    sum / n as f64
}

/// Hankel's expansion J_ν(s) ≈ √(2/(πs)) (P cos ω − Q sin ω),
/// ω = s − (2ν+1)π/4, truncated at the smallest term.
fn hankel_asymptotic(nu: f64, s: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let omega = s - (0.5 * nu + 0.25) * PI;
    let mut term = 1.0_f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut prev = f64::INFINITY;
    for k in 1..=40u32 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * s);
        if term.abs() > prev {
            break; // past the smallest term, the tail diverges
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * s)).sqrt() * (p * omega.cos() - q * omega.sin())
}
