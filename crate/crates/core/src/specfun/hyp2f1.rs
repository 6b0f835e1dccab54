//! Gauss hypergeometric function ₂F₁ on [0, 1], restricted to the two
//! parameter families the closed-form deforming functions use:
//!
//! * family one: (1/2, (3−n)/2; 3/2)
//! * family two: ((3−n)/2, (n−1)/2; (n+1)/2)
//!
//! for an ambient dimension n ∈ [3, 12]. For odd n the series terminates and
//! is summed exactly as a polynomial. For even n the direct series is used up
//! to s = 3/4; beyond that the standard linear transformation in 1 − s takes
//! over, anchored at s = 1 by the Gauss summation value (legitimate here
//! because c − a − b = (n−1)/2 > 0 for both families).

use super::gamma::{gamma_positive, gamma_signed};
use super::{AccuracyBudget, Dimension};
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 0.75;
const FAMILY_MATCH_TOL: f64 = 1e-9;

/// ₂F₁(a, b; c; s) for s ∈ [0, 1] and a parameter triple belonging to one of
/// the two supported families. Relative error ≤ 1e-12.
pub fn hyp2f1(a: f64, b: f64, c: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!(
            "hyp2f1 argument must lie in [0, 1], got {s}"
        )));
    }
    if !is_supported_family(a, b, c) {
        return Err(Error::Domain(format!(
            "unsupported hypergeometric parameter family ({a}, {b}; {c})"
        )));
    }
    let budget = AccuracyBudget::default();

    // A non-positive integer upper parameter terminates the series; evaluate
    // the polynomial exactly regardless of s.
    if let Some(degree) = terminating_degree(a).or(terminating_degree(b)) {
        return Ok(terminating_sum(a, b, c, s, degree));
    }
    if s == 1.0 {
        return Ok(gauss_value(a, b, c));
    }
    if s <= SERIES_LIMIT {
        return direct_series(a, b, c, s, &budget);
    }
    linear_transformation(a, b, c, s, &budget)
}

fn is_supported_family(a: f64, b: f64, c: f64) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= FAMILY_MATCH_TOL;
    (Dimension::MIN..=Dimension::MAX).any(|n| {
        let nf = n as f64;
        let first = close(a, 0.5) && close(b, (3.0 - nf) / 2.0) && close(c, 1.5);
        let second = close(a, (3.0 - nf) / 2.0)
            && close(b, (nf - 1.0) / 2.0)
            && close(c, (nf + 1.0) / 2.0);
        first || second
    })
}

fn terminating_degree(x: f64) -> Option<usize> {
    if x <= 0.0 && x.fract() == 0.0 {
        Some(-x as usize)
    } else {
        None
    }
}

fn terminating_sum(a: f64, b: f64, c: f64, s: f64, degree: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..degree {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * s;
        sum += term;
    }
    sum
}

fn direct_series(a: f64, b: f64, c: f64, s: f64, budget: &AccuracyBudget) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..budget.max_terms {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * s;
        sum += term;
        if term.abs() <= budget.rel_tol * sum.abs() + budget.abs_tol {
            return Ok(sum);
        }
    }
    Err(Error::BudgetExhausted {
        max_terms: budget.max_terms,
        last_term: term,
    })
}

/// ₂F₁(a, b; c; 1) = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b)); needs c − a − b > 0,
/// which both families satisfy.
fn gauss_value(a: f64, b: f64, c: f64) -> f64 {
    gamma_positive(c) * gamma_positive(c - a - b)
        / (gamma_positive(c - a) * gamma_positive(c - b))
}

/// DLMF 15.8.4 connection in w = 1 − s, valid because c − a − b is a
/// positive half-integer for even n (never an integer, so no degenerate
/// logarithmic case arises).
fn linear_transformation(a: f64, b: f64, c: f64, s: f64, budget: &AccuracyBudget) -> Result<f64> {
    let w = 1.0 - s;
    let cab = c - a - b;
    let lead = gauss_value(a, b, c);
    let mirror =
        gamma_positive(c) * gamma_signed(-cab) / (gamma_signed(a) * gamma_signed(b));
    let f1 = direct_series(a, b, 1.0 - cab, w, budget)?;
    let f2 = direct_series(c - a, c - b, cab + 1.0, w, budget)?;
    Ok(lead * f1 + mirror * w.powf(cab) * f2)
}
