//! Quadrature, reproducible random streams, uniform sphere sampling, and the
//! radial finite-difference Laplacian shared by the higher modules.

use crate::error::{Error, Result};
use crate::specfun::Dimension;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Quadrature strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuadMethod {
    /// One pass of the fixed Gauss–Legendre rule (plus a single refinement
    /// for the error estimate).
    GaussLegendreFixed,
    /// Recursive interval bisection with a fixed-order rule per panel.
    AdaptiveBisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub nodes: usize,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(4..=512).contains(&self.nodes) {
            return Err(Error::Config(format!(
                "quadrature nodes must lie in [4, 512], got {}",
                self.nodes
            )));
        }
        if self.max_depth > 40 {
            return Err(Error::Config(format!(
                "quadrature max_depth must not exceed 40, got {}",
                self.max_depth
            )));
        }
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Config(format!(
                "quadrature abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }

    /// Same spec with a different absolute tolerance.
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadMethod::AdaptiveBisection,
            nodes: 32,
            abs_tol: 1e-12,
            max_depth: 30,
        }
    }
}

/// A Gauss–Legendre rule on [−1, 1]. Nodes are the Legendre roots found by
/// Newton iteration from the Chebyshev initial guess; exact for polynomials
/// of degree ≤ 2k − 1.
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2, "Gauss-Legendre order must be at least 2");
        let k = order;
        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        for i in 0..k {
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(k, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 1..k {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = k as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// ∫_a^b f, returning (value, error estimate). The estimate is the summed
/// panel defect |whole − split|; for the adaptive method the recursion
/// halves the tolerance with the interval, so the total stays below
/// `spec.abs_tol` whenever the recursion converges. Integrable endpoint
/// singularities must be transformed away by the caller.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    spec.validate()?;
    if !(a <= b) {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let rule = GaussLegendre::new(spec.nodes);
    match spec.method {
        QuadMethod::GaussLegendreFixed => {
            let whole = rule.integrate(a, b, &f);
            let mid = 0.5 * (a + b);
            let split = rule.integrate(a, mid, &f) + rule.integrate(mid, b, &f);
            Ok((split, (whole - split).abs()))
        }
        QuadMethod::AdaptiveBisection => {
            adaptive_panel(&f, &rule, a, b, spec.abs_tol, spec.max_depth)
        }
    }
}

fn adaptive_panel<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    tol: f64,
    depth_left: u32,
) -> Result<(f64, f64)> {
    let whole = rule.integrate(a, b, f);
    let mid = 0.5 * (a + b);
    let split = rule.integrate(a, mid, f) + rule.integrate(mid, b, f);
    let defect = (whole - split).abs();
    if defect <= tol || b - a < 1e-14 * (1.0 + a.abs() + b.abs()) {
        return Ok((split, defect));
    }
    if depth_left == 0 {
        return Err(Error::QuadratureNonConvergence {
            partial: split,
            err_est: defect,
            abs_tol: tol,
        });
    }
    let (left, el) = adaptive_panel(f, rule, a, mid, 0.5 * tol, depth_left - 1)?;
    let (right, er) = adaptive_panel(f, rule, mid, b, 0.5 * tol, depth_left - 1)?;
    Ok((left + right, el + er))
}

/// A reproducible random stream: identical (seed, stream_id) pairs replay
/// identical draw sequences across runs and thread schedules. Parallel
/// consumers take disjoint `stream_id`s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Derive a child stream from a tag (splitmix-style mixing keeps
    /// siblings statistically unrelated).
    pub fn substream(self, tag: u64) -> Self {
        let mut z = self.stream_id ^ tag.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        Self {
            seed: self.seed,
            stream_id: z ^ (z >> 31),
        }
    }
}

/// A uniform draw from S^{n−1}: normalize a vector of independent standard
/// normal components. Exactly uniform in every dimension.
pub fn sample_unit_sphere<R: Rng + ?Sized>(dim: &Dimension, rng: &mut R) -> Vec<f64> {
    let n = dim.n() as usize;
    let mut v = vec![0.0_f64; n];
    loop {
        let mut norm_sq: f64 = 0.0;
        for x in v.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm_sq += *x * *x;
        }
        // a degenerate draw is a ~1e-8^n event; redraw rather than divide by ~0
        if norm_sq.sqrt() > 1e-8 {
            let inv = 1.0 / norm_sq.sqrt();
            for x in v.iter_mut() {
                *x *= inv;
            }
            return v;
        }
    }
}

/// Central-difference approximation of the radial (sign-negative) Laplacian
///
/// ```text
/// (A_n g)(r) = −(g'' + (n−1)/r · g') = −r^{1−n} ∂_r (r^{n−1} ∂_r g),
/// ```
///
/// with O(h²) error for g four times differentiable near r.
pub fn radial_laplacian_fd<F: Fn(f64) -> f64>(
    g: F,
    r: f64,
    h: f64,
    dim: &Dimension,
) -> Result<f64> {
    if !(h > 0.0 && r > h) {
        return Err(Error::Domain(format!(
            "radial stencil requires r > h > 0, got r = {r}, h = {h}"
        )));
    }
    let up = g(r + h);
    let center = g(r);
    let down = g(r - h);
    let second = (up - 2.0 * center + down) / (h * h);
    let first = (up - down) / (2.0 * h);
    Ok(-(second + (dim.n() as f64 - 1.0) / r * first))
}
