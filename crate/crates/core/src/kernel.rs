//! The fundamental solution G_n of the (sign-negative) Laplacian, the bare
//! cutoff kernel, deformed kernels, the closed-form deforming functions, and
//! the convex-series deformation.
//!
//! A deformed kernel at cutoff Λ is
//!
//! ```text
//! G_n^{Λ,f}(x) = Λ^{n−2}/((n−2)|S^{n−1}|) · f(|x|²Λ²) + G_n^{Λ,0}(x),
//! ```
//!
//! where the bare kernel G^{Λ,0} freezes G_n to the plateau Λ^{n−2} inside
//! the closed ball of radius 1/Λ and the deforming function f is continuous
//! with support in [0, 1]. Everything here is immutable after construction
//! and safe to evaluate concurrently.

use crate::error::{Error, Result};
use crate::homogenize::{extract_deforming, MultiIndexScheme};
use crate::numerics::RngStream;
use crate::specfun::{hyp2f1, Dimension};
use serde::Serialize;

/// Endpoint window where the explicit n = 4 and n = 6 closed forms switch to
/// the hypergeometric representation: the 1/√s and 1/s² prefactors cancel
/// against arcsin there and would shed digits if evaluated literally.
const ENDPOINT_WINDOW: f64 = 1e-3;

/// G_n at |x| = radius: radius^{2−n} / ((n−2)|S^{n−1}|).
///
/// Strictly positive and strictly decreasing in the radius.
pub fn green(dim: &Dimension, radius: f64) -> Result<f64> {
    if radius == 0.0 {
        return Err(Error::Singularity(
            "fundamental solution diverges at the origin".into(),
        ));
    }
    if !(radius > 0.0) {
        return Err(Error::Domain(format!(
            "radius must be positive, got {radius}"
        )));
    }
    Ok(radius.powi(2 - dim.n() as i32) / dim.green_norm())
}

/// The bare cutoff kernel G^{Λ,0}: the plateau Λ^{n−2}/((n−2)|S^{n−1}|) on
/// the closed ball |x| ≤ 1/Λ, the fundamental solution outside. The two
/// branches agree at |x| = 1/Λ, so the closed-ball convention is
/// observationally irrelevant; it is fixed here for bit-exactness.
pub fn green_cut(dim: &Dimension, cutoff: f64, radius: f64) -> Result<f64> {
    if !(cutoff > 0.0) {
        return Err(Error::Config(format!(
            "cutoff must be positive, got {cutoff}"
        )));
    }
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!(
            "radius must be non-negative, got {radius}"
        )));
    }
    Ok(green_cut_value(dim, cutoff, radius))
}

pub(crate) fn green_cut_value(dim: &Dimension, cutoff: f64, radius: f64) -> f64 {
    let scale = if radius <= 1.0 / cutoff {
        cutoff.powi(dim.n() as i32 - 2)
    } else {
        radius.powi(2 - dim.n() as i32)
    };
    scale / dim.green_norm()
}

/// The closed-form deforming function f_n of the half-radius double
/// homogenization, evaluated on its natural branches:
///
/// * the explicit radical/arcsin forms for n ∈ {3, 4, 5, 6} away from the
///   endpoint windows,
/// * the general hypergeometric form everywhere else,
/// * exactly 0 for s > 1.
pub fn deforming_f_closed(dim: &Dimension, s: f64) -> f64 {
    assert!(s >= 0.0, "deforming function argument must be non-negative");
    if s > 1.0 {
        return 0.0;
    }
    match dim.n() {
        3 => 1.0 - s.sqrt(),
        5 => 7.0 - 9.0 * s.sqrt() + 2.0 * s * s.sqrt(),
        4 if (ENDPOINT_WINDOW..=1.0 - ENDPOINT_WINDOW).contains(&s) => {
            let root = ((1.0 - s) / s).sqrt();
            let asn = s.sqrt().asin();
            3.0 - (4.0 * s + 2.0) / std::f64::consts::PI * root
                + 2.0 / std::f64::consts::PI * (1.0 / s - 4.0) * asn
        }
        6 if (ENDPOINT_WINDOW..=1.0 - ENDPOINT_WINDOW).contains(&s) => {
            let root = ((1.0 - s) / (s * s * s)).sqrt();
            let asn = s.sqrt().asin();
            let poly = 16.0 * s.powi(3) - 56.0 * s * s - 2.0 * s - 3.0;
            15.0 + 2.0 / (3.0 * std::f64::consts::PI) * poly * root
                + 2.0 / std::f64::consts::PI * (1.0 / (s * s) - 16.0) * asn
        }
        _ => deforming_f_general(dim, s),
    }
}

/// The general hypergeometric form of f_n:
///
/// ```text
/// f_n(s) = 2^{n−2} − 1 − c √s ₂F₁(1/2, (3−n)/2; 3/2; s)
///                      + (c/(n−1)) √s ₂F₁((3−n)/2, (n−1)/2; (n+1)/2; s)
/// ```
///
/// with c = 2^{n−1}|S^{n−2}|/|S^{n−1}|, valid on [0, 1] and zero beyond.
pub fn deforming_f_general(dim: &Dimension, s: f64) -> f64 {
    assert!(s >= 0.0, "deforming function argument must be non-negative");
    if s > 1.0 {
        return 0.0;
    }
    let n = dim.n();
    let nf = n as f64;
    let c = 2f64.powi(n as i32 - 1) * dim.lower_surface_area() / dim.surface_area();
    let f1 = hyp2f1(0.5, (3.0 - nf) / 2.0, 1.5, s)
        .expect("first-family parameters are supported by construction");
    let f2 = hyp2f1((3.0 - nf) / 2.0, (nf - 1.0) / 2.0, (nf + 1.0) / 2.0, s)
        .expect("second-family parameters are supported by construction");
    let root = s.sqrt();
    2f64.powi(n as i32 - 2) - 1.0 - c * root * f1 + c / (nf - 1.0) * root * f2
}

/// Weights κ_i and radii r_i of the convex-series deformation: positive
/// weights renormalized to sum to one over the retained terms, radii
/// strictly decreasing, and Σ κ_i r_i^{−n} finite (which buys the limit two
/// derivatives).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesScheme {
    n: u32,
    weights: Vec<f64>,
    radii: Vec<f64>,
    r_max: f64,
    kappa_bound: f64,
    tail_weight: f64,
}

impl SeriesScheme {
    /// Truncation rule for canonical infinite families: retain the smallest
    /// N whose dropped weight stays below this, then renormalize.
    pub const TAIL_CUTOFF: f64 = 1e-12;

    pub fn new(
        dim: &Dimension,
        weights: Vec<f64>,
        radii: Vec<f64>,
        tail_weight: f64,
    ) -> Result<Self> {
        if weights.is_empty() || weights.len() != radii.len() {
            return Err(Error::Config(format!(
                "series scheme needs matching non-empty weight/radius lists, got {} and {}",
                weights.len(),
                radii.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::Config(format!(
                "series weights must be positive, got {w}"
            )));
        }
        if let Some(r) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::Config(format!(
                "series radii must be positive, got {r}"
            )));
        }
        if radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(
                "series radii must decrease strictly".into(),
            ));
        }
        if !(0.0..1.0).contains(&tail_weight) {
            return Err(Error::Config(format!(
                "tail weight must lie in [0, 1), got {tail_weight}"
            )));
        }
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let kappa_bound: f64 = weights
            .iter()
            .zip(&radii)
            .map(|(w, r)| w * r.powi(-(dim.n() as i32)))
            .sum();
        if !kappa_bound.is_finite() {
            return Err(Error::Config(
                "series scheme has a divergent Σ κ_i r_i^{−n}".into(),
            ));
        }
        Ok(Self {
            n: dim.n(),
            r_max: radii[0],
            weights,
            radii,
            kappa_bound,
            tail_weight,
        })
    }

    /// The example sequences κ_i = 2^{−i}, r_i = 2^{−i/(2n)}, truncated by
    /// the tail rule (40 terms).
    pub fn remark(dim: &Dimension) -> Self {
        let terms = (-Self::TAIL_CUTOFF.log2()).ceil() as usize; // 2^{−N} < cutoff
        Self::remark_with_terms(dim, terms)
    }

    /// The example sequences at explicit depth; deeper truncations extend the
    /// frequency range the strictness certificate covers.
    pub fn remark_with_terms(dim: &Dimension, terms: usize) -> Self {
        assert!(terms >= 1 && terms <= 4096, "unreasonable truncation depth");
        let weights: Vec<f64> = (1..=terms).map(|i| 2f64.powi(-(i as i32))).collect();
        let radii: Vec<f64> = (1..=terms)
            .map(|i| 2f64.powf(-(i as f64) / (2.0 * dim.n() as f64)))
            .collect();
        let tail = 2f64.powi(-(terms as i32));
        Self::new(dim, weights, radii, tail).expect("remark sequences are valid by construction")
    }

    pub fn ambient_n(&self) -> u32 {
        self.n
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Σ κ_i r_i^{−n} over the retained, renormalized terms.
    pub fn kappa_bound(&self) -> f64 {
        self.kappa_bound
    }

    /// Weight dropped by the truncation, before renormalization.
    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }
}

/// The deforming function f̃_n of the series deformation: the convex
/// combination Σ κ_i G^{Λ/r_i, f_n} is itself a deformation at cutoff
/// Λ/r_max, and inverting the deformed-kernel form at that cutoff gives
///
/// ```text
/// f̃_n(s) = Σ_i κ_i [ (r/r_i)^{n−2} f_n(s (r/r_i)²) + b_i(s) ] − b_0(s),
/// ```
///
/// where b_i is the bare-kernel profile at cutoff r/r_i and b_0 at cutoff 1.
/// The scale Λ drops out. Zero for s > 1.
pub fn series_deforming_f(scheme: &SeriesScheme, dim: &Dimension, s: f64) -> Result<f64> {
    if scheme.ambient_n() != dim.n() {
        return Err(Error::Config(format!(
            "scheme built for n = {}, evaluated at n = {}",
            scheme.ambient_n(),
            dim.n()
        )));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!(
            "deforming argument must be non-negative, got {s}"
        )));
    }
    if s > 1.0 {
        return Ok(0.0);
    }
    let n = dim.n() as i32;
    let outside = s.powf(1.0 - n as f64 / 2.0);
    let mut acc = 0.0;
    for (kappa, r_i) in scheme.weights.iter().zip(&scheme.radii) {
        let ratio = scheme.r_max / r_i; // ≥ 1
        let scale = ratio.powi(n - 2);
        let bare = if s <= (r_i / scheme.r_max).powi(2) {
            scale
        } else {
            outside
        };
        acc += kappa * (scale * deforming_f_closed(dim, s * ratio * ratio) + bare);
    }
    Ok(acc - 1.0)
}

/// A continuous deforming profile on [0, ∞) with support in [0, 1].
#[derive(Debug, Clone)]
pub enum DeformingFunction {
    /// f ≡ 0: the bare cutoff.
    Zero,
    /// The closed-form f_n of the half-radius double homogenization.
    ClosedForm(Dimension),
    /// The convex-series deformation f̃_n.
    Series(SeriesScheme),
    /// Monte Carlo extraction from a multi-index homogenization scheme;
    /// each evaluation runs a deterministic sub-stream derived from s.
    Extracted {
        dim: Dimension,
        scheme: MultiIndexScheme,
        samples: usize,
        stream: RngStream,
    },
}

impl DeformingFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::ClosedForm(dim) => deforming_f_closed(dim, s),
            Self::Series(scheme) => {
                let dim = Dimension::new(scheme.ambient_n())
                    .expect("scheme dimension was validated at construction");
                series_deforming_f(scheme, &dim, s)
                    .expect("dimension match holds by construction")
            }
            Self::Extracted {
                dim,
                scheme,
                samples,
                stream,
            } => extract_deforming(scheme, dim, s, *samples, stream.substream(s.to_bits()))
                .expect("extraction inputs were validated at construction"),
        }
    }

    pub fn dimension(&self) -> Option<Dimension> {
        match self {
            Self::Zero => None,
            Self::ClosedForm(dim) => Some(*dim),
            Self::Series(scheme) => Dimension::new(scheme.ambient_n()).ok(),
            Self::Extracted { dim, .. } => Some(*dim),
        }
    }

    /// Interior points of [0, 1] where the evaluation switches branches;
    /// quadratures split their panels here.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Series(scheme) => scheme
                .radii()
                .iter()
                .map(|r| (r / scheme.r_max()).powi(2))
                .filter(|b| *b > 0.0 && *b < 1.0)
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Self::Zero => "zero".into(),
            Self::ClosedForm(dim) => format!("closed_form(n={})", dim.n()),
            Self::Series(scheme) => format!(
                "series(n={}, terms={})",
                scheme.ambient_n(),
                scheme.truncation()
            ),
            Self::Extracted {
                scheme, samples, ..
            } => format!(
                "extracted(alphas={:?}, samples={samples})",
                scheme
                    .entries()
                    .iter()
                    .map(|e| e.alpha.clone())
                    .collect::<Vec<_>>()
            ),
        }
    }
}

/// A deformed fundamental solution (dimension, cutoff Λ, deforming f),
/// evaluated pointwise by radius. Coincides with G_n outside the ball of
/// radius 1/Λ because the deformation is supported in the ball.
#[derive(Debug, Clone)]
pub struct DeformedGreen {
    dim: Dimension,
    cutoff: f64,
    f: DeformingFunction,
}

impl DeformedGreen {
    pub fn new(dim: Dimension, cutoff: f64, f: DeformingFunction) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::Config(format!(
                "cutoff must be positive, got {cutoff}"
            )));
        }
        if let Some(fdim) = f.dimension() {
            if fdim.n() != dim.n() {
                return Err(Error::Config(format!(
                    "deforming function built for n = {}, kernel for n = {}",
                    fdim.n(),
                    dim.n()
                )));
            }
        }
        Ok(Self { dim, cutoff, f })
    }

    pub fn dim(&self) -> &Dimension {
        &self.dim
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn deforming(&self) -> &DeformingFunction {
        &self.f
    }

    /// G^{Λ,f} at |x| = radius.
    pub fn eval(&self, radius: f64) -> f64 {
        assert!(radius >= 0.0, "radius must be non-negative");
        let bare = green_cut_value(&self.dim, self.cutoff, radius);
        match &self.f {
            DeformingFunction::Zero => bare,
            f => {
                let arg = radius * radius * self.cutoff * self.cutoff;
                let amp = self.cutoff.powi(self.dim.n() as i32 - 2) / self.dim.green_norm();
                amp * f.eval(arg) + bare
            }
        }
    }
}
