//! Special functions backing every kernel formula: Γ, Bessel J_ν, the
//! normalized spherical kernel ρ_n, its first zero, unit-sphere areas, and
//! the Gauss hypergeometric function on [0, 1].
//!
//! ρ_n is the Fourier transform of the normalized uniform measure on the
//! unit sphere S^{n−1},
//!
//! ```text
//! ρ_n(s) = Γ(n/2) (s/2)^{1−n/2} J_{n/2−1}(s),   ρ_n(0) = 1,
//! ```
//!
//! evaluated through a dedicated power series below the Bessel series
//! cutoff (the prefactor and J_{n/2−1} would meet in a 0/0 at the origin)
//! and through Γ·(s/2)^{1−n/2}·J beyond it.
//!
//! All operations are pure; nothing here caches observable state.

mod bessel;
mod gamma;
mod hyp2f1;

pub use bessel::bessel_j;
pub use gamma::gamma;
pub use hyp2f1::hyp2f1;

pub(crate) use bessel::bessel_value;
pub(crate) use gamma::gamma_half_integer;

use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;
use serde::Serialize;
use std::f64::consts::PI;

/// Switchover between the ρ_n power series and the Γ·J composition; the two
/// branches agree to well under 1e-12 here (exercised in the tests).
pub(crate) const RHO_SERIES_CUTOFF: f64 = 9.0;

/// A validated ambient dimension n ≥ 3 with the cached area of the unit
/// sphere S^{n−1} ⊂ R^n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dimension {
    n: u32,
    surface_area: f64,
}

impl Dimension {
    pub const MIN: u32 = 3;
    pub const MAX: u32 = 12;

    /// Rejects n outside [3, 12]. The lower bound is structural (the kernel
    /// |x|^{2−n}/(n−2) degenerates at n = 2); the upper bound keeps every
    /// Bessel order inside the windows the accuracy analysis covers.
    pub fn new(n: u32) -> Result<Self> {
        if !(Self::MIN..=Self::MAX).contains(&n) {
            return Err(Error::Config(format!(
                "dimension must lie in [{}, {}], got {n}",
                Self::MIN,
                Self::MAX
            )));
        }
        Ok(Self {
            n,
            surface_area: sphere_surface_area(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// |S^{n−1}| = 2 π^{n/2} / Γ(n/2).
    pub fn surface_area(&self) -> f64 {
        self.surface_area
    }

    /// |S^{n−2}|, the sphere area one dimension down; appears in the
    /// closed-form deforming functions and the smeared Laplacian density.
    pub fn lower_surface_area(&self) -> f64 {
        sphere_surface_area(self.n - 1)
    }

    /// (n−2)·|S^{n−1}|, the normalization of the fundamental solution.
    pub(crate) fn green_norm(&self) -> f64 {
        (self.n as f64 - 2.0) * self.surface_area
    }
}

/// Area of the unit sphere S^{d−1} ⊂ R^d.
pub fn sphere_surface_area(ambient: u32) -> f64 {
    2.0 * PI.powf(ambient as f64 / 2.0) / gamma_half_integer(ambient as i64)
}

/// Convergence contract for the series evaluations in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyBudget {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl AccuracyBudget {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) || !(abs_tol > 0.0 && abs_tol < 1.0) {
            return Err(Error::Config(format!(
                "tolerances must lie in (0, 1): rel_tol = {rel_tol}, abs_tol = {abs_tol}"
            )));
        }
        if max_terms < 16 {
            return Err(Error::Config(format!(
                "max_terms must be at least 16, got {max_terms}"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_terms,
        })
    }
}

impl Default for AccuracyBudget {
    fn default() -> Self {
        Self {
            rel_tol: 1e-15,
            abs_tol: 1e-16,
            max_terms: 256,
        }
    }
}

/// ρ_n(s) for s ≥ 0, with the removable singularity at s = 0 handled by the
/// series branch. |ρ_n| ≤ 1 everywhere; absolute error ≤ 1e-12 on [0, 500].
pub fn rho(dim: &Dimension, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "rho argument must be non-negative, got {s}"
        )));
    }
    Ok(rho_value(dim.n, s))
}

pub(crate) fn rho_value(n: u32, s: f64) -> f64 {
    if s <= RHO_SERIES_CUTOFF {
        return rho_series(n, s);
    }
    let nu = n as f64 / 2.0 - 1.0;
    gamma_half_integer(n as i64) * (s / 2.0).powf(-nu) * bessel_value(nu, s)
}

/// ρ_n(s) = Σ_k (−1)^k (s²/4)^k / (k! (n/2)_k) — the Bessel series with the
/// (s/2)^ν prefactor cancelled analytically, entire in s.
fn rho_series(n: u32, s: f64) -> f64 {
    let q = s * s / 4.0;
    let half_n = n as f64 / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..80 {
        let kf = k as f64;
        term *= -q / ((kf + 1.0) * (half_n + kf));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

/// Independent quadrature oracle for ρ_n: the sphere-measure Fourier
/// integral reduced to one polar angle,
///
/// ```text
/// ρ_n(s) = (|S^{n−2}|/|S^{n−1}|) ∫₀^π sin^{n−2}φ cos(s cos φ) dφ,
/// ```
///
/// evaluated with a fixed Gauss–Legendre rule. Meant as a cross-check for
/// `rho`, not as its production path.
pub fn rho_sphere_oracle(dim: &Dimension, s: f64, quad_nodes: usize) -> Result<f64> {
    if quad_nodes < 8 {
        return Err(Error::Config(format!(
            "sphere oracle needs at least 8 quadrature nodes, got {quad_nodes}"
        )));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "rho argument must be non-negative, got {s}"
        )));
    }
    let rule = GaussLegendre::new(quad_nodes);
    let exponent = dim.n as i32 - 2;
    let integral = rule.integrate(0.0, PI, |phi| {
        phi.sin().powi(exponent) * (s * phi.cos()).cos()
    });
    Ok(dim.lower_surface_area() / dim.surface_area() * integral)
}

/// Smallest θ > 0 with ρ_n(θ) = 0: a 0.1-step scan for the first sign
/// change followed by bisection to 1e-13. The zeros of ρ_n are the zeros of
/// J_{n/2−1}, simple and separated by more than 0.1.
pub fn rho_first_zero(dim: &Dimension) -> f64 {
    let mut a = 0.0;
    let mut b = 0.1;
    while rho_value(dim.n, b) > 0.0 {
        a = b;
        b += 0.1;
        debug_assert!(b < 20.0, "first zero scan ran away");
    }
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if rho_value(dim.n, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dimension_validation_and_surface_areas() {
        assert!(Dimension::new(2).is_err());
        assert!(Dimension::new(13).is_err());
        // closed forms: S_2 = 4π, S_3 = 2π², S_4 = 8π²/3, S_5 = π³, S_11 = π⁶/60
        let cases = [
            (3, 4.0 * PI),
            (4, 2.0 * PI * PI),
            (5, 8.0 * PI * PI / 3.0),
            (6, PI.powi(3)),
            (7, 16.0 * PI.powi(3) / 15.0),
            (8, PI.powi(4) / 3.0),
            (9, 32.0 * PI.powi(4) / 105.0),
            (10, PI.powi(5) / 12.0),
            (11, 64.0 * PI.powi(5) / 945.0),
            (12, PI.powi(6) / 60.0),
        ];
        for (n, want) in cases {
            let dim = Dimension::new(n).unwrap();
            assert_relative_eq!(dim.surface_area(), want, max_relative = 1e-14);
        }
        // S_{n−2} consistency: lower area of R^n equals the area cached for R^{n−1}.
        let d4 = Dimension::new(4).unwrap();
        assert_relative_eq!(
            d4.lower_surface_area(),
            Dimension::new(3).unwrap().surface_area(),
            max_relative = 1e-14
        );
        assert_relative_eq!(d4.lower_surface_area(), 4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn accuracy_budget_validation() {
        assert!(AccuracyBudget::new(1e-12, 1e-14, 64).is_ok());
        assert!(AccuracyBudget::new(0.0, 1e-14, 64).is_err());
        assert!(AccuracyBudget::new(1e-12, 1.5, 64).is_err());
        assert!(AccuracyBudget::new(1e-12, 1e-14, 8).is_err());
    }

    #[test]
    fn rho_normalization_and_closed_forms() {
        for n in Dimension::MIN..=Dimension::MAX {
            let dim = Dimension::new(n).unwrap();
            assert_eq!(rho(&dim, 0.0).unwrap(), 1.0);
        }
        // ρ_3(s) = sin(s)/s
        let d3 = Dimension::new(3).unwrap();
        assert!(rho(&d3, PI).unwrap().abs() < 1e-14);
        assert_relative_eq!(
            rho(&d3, PI / 2.0).unwrap(),
            2.0 / PI,
            max_relative = 1e-14
        );
        for s in [0.2, 1.7, 8.0, 14.2, 60.0] {
            assert_relative_eq!(
                rho(&d3, s).unwrap(),
                s.sin() / s,
                max_relative = 1e-12,
                epsilon = 1e-14
            );
        }
        // ρ_4(s) = 2 J_1(s)/s
        let d4 = Dimension::new(4).unwrap();
        assert_relative_eq!(
            rho(&d4, 1.0).unwrap(),
            2.0 * 0.44005058574493351596,
            max_relative = 1e-13
        );
    }

    #[test]
    fn rho_reference_values() {
        let refs = [
            (3, 0.5, 0.95885107720840600055),
            (4, 8.9, 0.057506150886286716284),
            (4, 9.1, 0.051083680221067347154),
            (5, 17.3, -0.00079216717279666397368),
            (6, 30.0, 0.00069734440954013643468),
            (7, 2.0, 0.74417980896429966871),
            (8, 4.2, 0.28143458139760335751),
            (12, 100.0, -2.84911629943733456e-8),
            (6, 450.0, 1.4853143194594592147e-6),
        ];
        for (n, s, want) in refs {
            let dim = Dimension::new(n).unwrap();
            let got = rho(&dim, s).unwrap();
            assert!(
                (got - want).abs() < 1e-12,
                "rho_{n}({s}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn rho_branches_agree_at_switchover() {
        for n in Dimension::MIN..=Dimension::MAX {
            let nu = n as f64 / 2.0 - 1.0;
            let series = rho_series(n, RHO_SERIES_CUTOFF);
            let composed = gamma_half_integer(n as i64)
                * (RHO_SERIES_CUTOFF / 2.0).powf(-nu)
                * bessel_value(nu, RHO_SERIES_CUTOFF);
            assert!(
                (series - composed).abs() < 1e-13,
                "branch mismatch at n = {n}: {series} vs {composed}"
            );
        }
    }

    #[test]
    fn sphere_oracle_matches_direct_evaluation() {
        let d3 = Dimension::new(3).unwrap();
        assert_relative_eq!(
            rho_sphere_oracle(&d3, 0.0, 64).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        assert!(rho_sphere_oracle(&d3, PI, 64).unwrap().abs() < 1e-12);
        let d4 = Dimension::new(4).unwrap();
        assert!(
            (rho_sphere_oracle(&d4, 1.0, 64).unwrap() - rho(&d4, 1.0).unwrap()).abs() < 1e-10
        );
        assert!(rho_sphere_oracle(&d3, 1.0, 4).is_err());
    }

    #[test]
    fn first_zeros_match_bessel_zeros() {
        // First positive zeros of J_{n/2−1}, 20-digit references.
        let refs = [
            (3, PI),
            (4, 3.8317059702075123156),
            (5, 4.4934094579090641753),
            (6, 5.1356223018406825563),
            (7, 5.7634591968945497914),
            (8, 6.3801618959239835062),
            (9, 6.987932000500519959),
            (10, 7.5883424345038043851),
            (11, 8.1825614525712427017),
            (12, 8.7714838159599540191),
        ];
        for (n, want) in refs {
            let dim = Dimension::new(n).unwrap();
            let got = rho_first_zero(&dim);
            assert!(
                (got - want).abs() <= 1e-12,
                "first zero for n = {n}: {got} vs {want}"
            );
            // strictly positive below the zero, on a fine grid
            for k in 1..200 {
                let s = got * k as f64 / 200.0;
                assert!(rho(&dim, s).unwrap() > 0.0, "rho_{n}({s}) not positive");
            }
        }
    }

    #[test]
    fn first_zero_sign_change_agrees_with_sphere_oracle() {
        for n in [4u32, 6] {
            let dim = Dimension::new(n).unwrap();
            let zero = rho_first_zero(&dim);
            let before = rho_sphere_oracle(&dim, zero - 1e-3, 96).unwrap();
            let after = rho_sphere_oracle(&dim, zero + 1e-3, 96).unwrap();
            assert!(before > 0.0 && after < 0.0);
        }
    }
}
