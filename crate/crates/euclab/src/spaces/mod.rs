//! Test functions with factorial-weighted norms, cone-weighted complex
//! norms, the mollifier decomposition, and flatness estimates.
//!
//! The central objects are analytic test functions of Gaussian type,
//! `f(w) = P(w)·exp(Q(w))` with polynomial `P` and low-degree polynomial
//! `Q`, together with two families of norms:
//!
//! * the **real-grid norm**: a supremum of `|p^μ ∂^λ f(p)|` over real points
//!   and multi-indices, weighted by `A^{|λ|} B^{|μ|} |λ|^{α|λ|} |μ|^{β|μ|}`,
//!   with derivatives obtained by Cauchy contour quadrature;
//! * the **cone norm**: a supremum of `|f(w)|` over complex points weighted
//!   by `exp(|p/B|^{1/β} − |Aq|^{1/(1−α)} − δ_U(Ap)^{1/(1−α)})`, where
//!   `δ_U` is the sup-norm distance to a closed cone `U` and `w = p + iq`.
//!
//! Both norms are reported as certified truncations: a supremum over a
//! noncompact region can never be certified numerically, so every report
//! carries three nested truncation levels and flags divergence only when the
//! level values grow by more than a configured ratio at each step.

pub mod decompose;
pub mod parse;
pub mod poly;

pub use decompose::{decompose, DecomposeOptions, Decomposition, DecompositionCertificate, Fragment};
pub use parse::parse_test_function;
pub use poly::{Poly, PolyParseError};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cones::{Cone, ConeError};
use crate::quad::{integrate_real, QuadTol};
use crate::util::{factorial_f64, grid_product, linspace, sup_norm};

/// Errors from norm evaluation and the decomposition machinery.
#[derive(Debug, Error)]
pub enum SpaceError {
    /// Parameter values outside the admissible region.
    #[error("invalid parameters: {0}")]
    Params(String),
    /// Mismatched dimensions between a function and another argument.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// An operation requiring an entire function received one with a
    /// support restriction.
    #[error("operation requires an entire function")]
    NotEntire,
    /// Inputs violate a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A shape of cone or function the implementation does not handle.
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    /// A quadrature or other numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// An underlying cone-geometry error.
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// A map from complex points to complex values, evaluable on grids.
///
/// Implemented by [`TestFunction`] and by the fragment evaluators returned
/// from [`decompose`]; the cone norm accepts any implementor. `log_abs`
/// exists so that functions with huge envelopes can report `ln|f|` without
/// overflowing the exponential.
pub trait ComplexMap: Sync {
    /// Number of complex variables.
    fn dim(&self) -> usize;
    /// The value at a complex point (length must equal `dim`).
    fn eval(&self, w: &[Complex64]) -> Complex64;
    /// `ln |f(w)|`; the default goes through `eval` and may overflow for
    /// rapidly growing functions.
    fn log_abs(&self, w: &[Complex64]) -> f64 {
        self.eval(w).norm().ln()
    }
}

/// Weight parameters of the factorial-type norms.
///
/// `alpha` controls the derivative weights `|λ|^{α|λ|}` (alpha < 1 keeps the
/// family analytic), `beta` the moment weights `|μ|^{β|μ|}`; `a` and `b`
/// scale the geometric factors. Admissible: `0 ≤ alpha < 1`, `beta > 0`,
/// and `alpha + beta > 1`, or `alpha > 0` with `alpha + beta = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSParams {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl GSParams {
    /// Validates and constructs the parameter set.
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self, SpaceError> {
        if !(0.0..1.0).contains(&alpha) || !alpha.is_finite() {
            return Err(SpaceError::Params(format!("alpha must lie in [0,1), got {alpha}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(SpaceError::Params(format!("beta must be positive, got {beta}")));
        }
        if !(a > 0.0) || !(b > 0.0) {
            return Err(SpaceError::Params(format!("A and B must be positive, got A={a}, B={b}")));
        }
        let sum = alpha + beta;
        let nontrivial = sum > 1.0 + 1e-12 || (alpha > 0.0 && (sum - 1.0).abs() <= 1e-12);
        if !nontrivial {
            return Err(SpaceError::Params(format!(
                "weights admit only the zero function: alpha+beta = {sum} with alpha = {alpha}"
            )));
        }
        Ok(GSParams { alpha, beta, a, b })
    }

    /// The same weights with different geometric constants.
    pub fn with_scales(&self, a: f64, b: f64) -> Result<Self, SpaceError> {
        GSParams::new(self.alpha, self.beta, a, b)
    }
}

/// A support restriction for non-analytic family members: the function is
/// multiplied by the flat factor `exp(c/ℓ(x))` inside the open region and
/// declared identically zero (with all derivatives) outside. Here `ℓ(x)` is
/// the sup-norm distance from `x` to the complement of the region and the
/// coefficient `c` must be negative, so the factor vanishes to all orders at
/// the boundary.
#[derive(Debug, Clone)]
pub struct SupportRestriction {
    /// The open region carrying the function (a cone with a complement
    /// distance, e.g. an open halfspace).
    pub region: Cone,
    /// Negative coefficient of the flat factor `exp(c/ℓ(x))`.
    pub flat_coeff: f64,
}

/// An analytic test function `P(w)·exp(Q(w))`, optionally cut down to an
/// open region by a flat factor.
///
/// `P` is an arbitrary polynomial; the envelope exponent `Q` is restricted
/// to per-variable degree ≤ 4 so that every member has at worst
/// quartic-exponential growth along real directions and the contour
/// machinery stays uniformly applicable.
#[derive(Debug, Clone)]
pub struct TestFunction {
    dim: usize,
    poly: Poly,
    expo: Poly,
    support: Option<SupportRestriction>,
}

impl TestFunction {
    /// Builds an entire test function from prefactor and exponent.
    pub fn new(poly: Poly, expo: Poly) -> Result<Self, SpaceError> {
        if poly.dim() != expo.dim() {
            return Err(SpaceError::DimensionMismatch { expected: poly.dim(), got: expo.dim() });
        }
        if expo.max_degree_per_var().iter().any(|&d| d > 4) {
            return Err(SpaceError::Params(
                "envelope exponent degree per variable must be at most 4".into(),
            ));
        }
        Ok(TestFunction { dim: poly.dim(), poly, expo, support: None })
    }

    /// Parses both polynomials from expression text.
    pub fn from_exprs(dim: usize, poly: &str, expo: &str) -> Result<Self, SpaceError> {
        let p = Poly::parse(poly, dim).map_err(|e| SpaceError::Params(e.to_string()))?;
        let q = Poly::parse(expo, dim).map_err(|e| SpaceError::Params(e.to_string()))?;
        TestFunction::new(p, q)
    }

    /// Restricts the function to an open region with a flat factor
    /// `exp(c/ℓ)`; `c` must be negative and the region must support
    /// complement distances.
    pub fn with_support(mut self, region: Cone, flat_coeff: f64) -> Result<Self, SpaceError> {
        if region.dim != self.dim {
            return Err(SpaceError::DimensionMismatch { expected: self.dim, got: region.dim });
        }
        if !(flat_coeff < 0.0) {
            return Err(SpaceError::Params(format!(
                "flat coefficient must be negative for boundary flatness, got {flat_coeff}"
            )));
        }
        // Fail early if the region cannot answer complement distances.
        region.distance_to_complement(&vec![0.0; self.dim])?;
        self.support = Some(SupportRestriction { region, flat_coeff });
        Ok(self)
    }

    /// Whether the function is entire (no support restriction).
    pub fn is_entire(&self) -> bool {
        self.support.is_none()
    }

    /// The prefactor polynomial.
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// The envelope exponent polynomial.
    pub fn expo(&self) -> &Poly {
        &self.expo
    }

    /// The support restriction, if any.
    pub fn support(&self) -> Option<&SupportRestriction> {
        self.support.as_ref()
    }

    /// The value at a real point (the natural domain for restricted
    /// members).
    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let w: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval(&w)
    }

    /// The flat-factor exponent `c/ℓ(x)` at a real point, `None` when the
    /// point is outside the region (value 0) or there is no restriction.
    /// Logarithm of the flat boundary factor: the coefficient times the sum
    /// of reciprocal face distances, one term per bounding face, so the
    /// factor over a product region factorizes into per-face factors.
    /// `-∞` encodes a point outside the region.
    fn flat_log(&self, x: &[f64]) -> Option<f64> {
        let s = self.support.as_ref()?;
        let mut total = 0.0;
        for n in s.region.halfspaces() {
            let d = crate::util::dot(n, x) / crate::util::l1_norm(n);
            if d <= 0.0 {
                return Some(f64::NEG_INFINITY);
            }
            total += s.flat_coeff / d;
        }
        Some(total)
    }
}

impl ComplexMap for TestFunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, w: &[Complex64]) -> Complex64 {
        let base = self.poly.eval(w) * self.expo.eval(w).exp();
        match &self.support {
            None => base,
            Some(_) => {
                // Restricted members live on real points; the flat factor is
                // applied to the real part.
                let x: Vec<f64> = w.iter().map(|z| z.re).collect();
                match self.flat_log(&x) {
                    Some(l) if l.is_finite() => base * l.exp(),
                    _ => Complex64::new(0.0, 0.0),
                }
            }
        }
    }

    fn log_abs(&self, w: &[Complex64]) -> f64 {
        let mut l = self.expo.eval(w).re + self.poly.eval(w).norm().ln();
        if self.support.is_some() {
            let x: Vec<f64> = w.iter().map(|z| z.re).collect();
            l += self.flat_log(&x).unwrap_or(0.0);
        }
        l
    }
}

/// Truncation policy for norm suprema: maximal multi-index order, grid
/// radius, grid resolution, the nested-level scales, the divergence ratio,
/// and the number of contour nodes for derivatives.
#[derive(Debug, Clone, Copy)]
pub struct TruncationSpec {
    /// Largest multi-index order `|λ|, |μ|` at the top level.
    pub max_order: usize,
    /// Grid radius (sup norm) at the top level.
    pub radius: f64,
    /// Points per real axis across `[-radius, radius]`.
    pub points_per_axis: usize,
    /// Scale factors of the three nested truncation levels.
    pub level_scales: [f64; 3],
    /// A norm is flagged divergent when successive level values grow by
    /// more than this ratio at both steps.
    pub divergence_ratio: f64,
    /// Trapezoid nodes per contour circle (clamped to 64..=256).
    pub contour_nodes: usize,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        TruncationSpec {
            max_order: 12,
            radius: 8.0,
            points_per_axis: 129,
            level_scales: [0.5, 0.75, 1.0],
            divergence_ratio: 1.5,
            contour_nodes: 128,
        }
    }
}

impl TruncationSpec {
    /// The three nested `(max_order, radius)` levels.
    pub fn levels(&self) -> [(usize, f64); 3] {
        let mut out = [(0usize, 0.0f64); 3];
        for (i, s) in self.level_scales.iter().enumerate() {
            out[i] = (
                (self.max_order as f64 * s).ceil() as usize,
                self.radius * s,
            );
        }
        out
    }

    fn nodes(&self) -> usize {
        self.contour_nodes.clamp(64, 256)
    }
}

/// One truncation level of a norm report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormLevel {
    /// Multi-index order bound at this level.
    pub max_order: usize,
    /// Grid radius at this level.
    pub radius: f64,
    /// Natural log of the truncated supremum (`-inf` for the zero
    /// function).
    pub log_value: f64,
}

/// A certified truncated norm: the top-level value, the nested levels it
/// was derived from, and the divergence flag.
#[derive(Debug, Clone)]
pub struct NormReport {
    /// Natural log of the top-level truncated supremum.
    pub log_value: f64,
    /// The three nested levels, smallest first.
    pub levels: Vec<NormLevel>,
    /// Set when the level values grow by more than the configured ratio at
    /// both steps; the supremum is then treated as `+∞`.
    pub diverges: bool,
}

impl NormReport {
    fn from_levels(levels: Vec<NormLevel>, ratio: f64) -> Self {
        let log_value = levels.last().map_or(f64::NEG_INFINITY, |l| l.log_value);
        let diverges = levels.len() == 3
            && levels[1].log_value - levels[0].log_value > ratio.ln()
            && levels[2].log_value - levels[1].log_value > ratio.ln();
        NormReport { log_value, levels, diverges }
    }

    /// The truncated norm value (`+∞` when the log overflows).
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    /// Ratios of successive level values, as `(v2/v1, v3/v2)`.
    pub fn growth_ratios(&self) -> (f64, f64) {
        (
            (self.levels[1].log_value - self.levels[0].log_value).exp(),
            (self.levels[2].log_value - self.levels[1].log_value).exp(),
        )
    }

    /// Serializes as `{value, truncation: {M, R}, diverges}`; a value too
    /// large for floating point appears as the string `"inf"`.
    pub fn to_json(&self) -> serde_json::Value {
        let top = self.levels.last().expect("report has levels");
        let value = self.value();
        serde_json::json!({
            "value": if value.is_finite() { serde_json::json!(value) } else { serde_json::json!("inf") },
            "truncation": {"M": top.max_order, "R": top.radius},
            "diverges": self.diverges,
        })
    }
}

/// All partial derivatives `∂^λ f(p)` for `|λ| ≤ max_order` by trapezoid
/// quadrature of the Cauchy integral on polydisc contours.
///
/// The contour radius is `max(1, |λ|^alpha)` in every coordinate, so higher
/// shells look farther afield, matching the `|λ|^{α|λ|}` weight scale. The
/// trapezoid rule on a circle is spectrally accurate for analytic
/// integrands. Returns `(λ, ∂^λ f(p))` pairs.
pub fn contour_derivatives<F: ComplexMap>(
    f: &F,
    p: &[f64],
    max_order: usize,
    alpha: f64,
    nodes: usize,
) -> Vec<(Vec<usize>, Complex64)> {
    let k = p.len();
    let n = nodes;
    let mut out = Vec::new();
    // Shell 0 is the plain value.
    let w0: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    out.push((vec![0usize; k], f.eval(&w0)));

    let phases: Vec<f64> = (0..n).map(|t| 2.0 * std::f64::consts::PI * t as f64 / n as f64).collect();
    let rot: Vec<Complex64> = phases.iter().map(|&ph| Complex64::new(0.0, ph).exp()).collect();

    for shell in 1..=max_order {
        let r = (shell as f64).powf(alpha).max(1.0);
        // Evaluate f once on the product contour for this shell.
        let tuples = node_tuples(k, n);
        let values: Vec<Complex64> = tuples
            .iter()
            .map(|t| {
                let w: Vec<Complex64> = (0..k)
                    .map(|j| Complex64::new(p[j], 0.0) + r * rot[t[j]])
                    .collect();
                f.eval(&w)
            })
            .collect();
        for lam in crate::util::multi_indices_of_order(k, shell) {
            let lam_fact: f64 = lam.iter().map(|&l| factorial_f64(l)).product();
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, v) in tuples.iter().zip(&values) {
                // Conjugate phase e^{-i λ·φ} divided by r^λ.
                let mut ph = Complex64::new(1.0, 0.0);
                for j in 0..k {
                    ph *= Complex64::new(0.0, -(lam[j] as f64) * phases[t[j]]).exp();
                }
                acc += *v * ph;
            }
            let scale = lam_fact / (n.pow(k as u32) as f64) / r.powi(shell as i32);
            out.push((lam, acc * scale));
        }
    }
    out
}

/// All tuples in `[0, n)^k`, lexicographic.
fn node_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for v in 0..n {
                let mut t2 = t.clone();
                t2.push(v);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// The truncated factorial-weighted real-grid norm
/// `sup |p^μ ∂^λ f(p)| / (A^{|λ|} B^{|μ|} |λ|^{α|λ|} |μ|^{β|μ|})`.
///
/// The supremum runs over the master real grid and all multi-indices up to
/// the truncation order; three nested levels share the master grid so level
/// values are monotone by construction.
pub fn real_norm(
    f: &TestFunction,
    params: &GSParams,
    trunc: &TruncationSpec,
) -> Result<NormReport, SpaceError> {
    if !f.is_entire() {
        return Err(SpaceError::NotEntire);
    }
    let k = f.dim;
    let levels = trunc.levels();
    let (m_top, _) = levels[2];
    let axis = linspace(-trunc.radius, trunc.radius, trunc.points_per_axis);
    let points = grid_product(&vec![axis; k]);
    let ln_a = params.a.ln();
    let ln_b = params.b.ln();
    let alpha = params.alpha;
    let beta = params.beta;
    let nodes = trunc.nodes();

    // Per point: the best weighted derivative by shell prefix and the best
    // weighted moment by order cap, combined per level.
    let per_level = points
        .par_iter()
        .map(|p| {
            let derivs = contour_derivatives(f, p, m_top, alpha, nodes);
            // Max weighted derivative among |λ| = s, then prefix maxima.
            let mut shell_best = vec![f64::NEG_INFINITY; m_top + 1];
            for (lam, d) in &derivs {
                let s: usize = lam.iter().sum();
                let w = d.norm().ln()
                    - s as f64 * ln_a
                    - if s > 0 { alpha * s as f64 * (s as f64).ln() } else { 0.0 };
                shell_best[s] = shell_best[s].max(w);
            }
            for s in 1..=m_top {
                shell_best[s] = shell_best[s].max(shell_best[s - 1]);
            }
            // Moment part: all weight on the largest coordinate.
            let a_star = p.iter().map(|v| v.abs().ln()).fold(f64::NEG_INFINITY, f64::max);
            let moment_best = |cap: usize| -> f64 {
                let mut best = 0.0f64; // m = 0 term
                for m in 1..=cap {
                    let mf = m as f64;
                    let t = mf * (a_star - ln_b) - beta * mf * mf.ln();
                    best = best.max(t);
                }
                best
            };
            let r = sup_norm(p);
            let mut out = [f64::NEG_INFINITY; 3];
            for (i, (mi, ri)) in levels.iter().enumerate() {
                if r <= ri + 1e-12 {
                    out[i] = shell_best[*mi] + moment_best(*mi);
                }
            }
            out
        })
        .reduce(
            || [f64::NEG_INFINITY; 3],
            |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])],
        );

    let report_levels = levels
        .iter()
        .zip(per_level.iter())
        .map(|((m, r), &lv)| NormLevel { max_order: *m, radius: *r, log_value: lv })
        .collect();
    Ok(NormReport::from_levels(report_levels, trunc.divergence_ratio))
}

/// The truncated cone-weighted complex norm
/// `sup |f(w)| · exp(|p/B|^{1/β} − |Aq|^{1/(1−α)} − δ_U(Ap)^{1/(1−α)})`
/// over `w = p + iq` on the complex grid, with `δ_U` the sup-norm distance
/// to the cone.
pub fn cone_norm<F: ComplexMap>(
    f: &F,
    u: &Cone,
    params: &GSParams,
    trunc: &TruncationSpec,
) -> Result<NormReport, SpaceError> {
    let k = f.dim();
    if u.dim != k {
        return Err(SpaceError::DimensionMismatch { expected: k, got: u.dim });
    }
    let levels = trunc.levels();
    let inv_beta = 1.0 / params.beta;
    let inv_gamma = 1.0 / (1.0 - params.alpha);
    let axis = linspace(-trunc.radius, trunc.radius, trunc.points_per_axis);
    let p_points = grid_product(&vec![axis.clone(); k]);
    let q_points = grid_product(&vec![axis; k]);

    let per_level = p_points
        .par_iter()
        .map(|p| {
            let rp = sup_norm(p);
            let delta = u.distance(p).unwrap_or(f64::INFINITY);
            let p_part = (rp / params.b).powf(inv_beta)
                - (params.a * delta).powf(inv_gamma);
            let mut out = [f64::NEG_INFINITY; 3];
            let mut w: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            for q in &q_points {
                let rq = sup_norm(q);
                for j in 0..k {
                    w[j] = Complex64::new(p[j], q[j]);
                }
                let term = f.log_abs(&w) + p_part - (params.a * rq).powf(inv_gamma);
                for (i, (_, ri)) in levels.iter().enumerate() {
                    if rp <= ri + 1e-12 && rq <= ri + 1e-12 {
                        out[i] = out[i].max(term);
                    }
                }
            }
            out
        })
        .reduce(
            || [f64::NEG_INFINITY; 3],
            |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2])],
        );

    let report_levels = levels
        .iter()
        .zip(per_level.iter())
        .map(|((m, r), &lv)| NormLevel { max_order: *m, radius: *r, log_value: lv })
        .collect();
    Ok(NormReport::from_levels(report_levels, trunc.divergence_ratio))
}

/// The truncated region integral of `exp(−p₁² − p₂³)` over the part of the
/// square `max(|p₁|,|p₂|) ≤ R` lying above the curve `p₂ = −|p₁|^{2/3}`.
///
/// The integrand equals 1 at the origin and the integral grows without
/// bound as `R → ∞`: along the lower boundary the cubic growth of
/// `exp(−p₂³)` exactly balances the Gaussian falloff, so the region keeps
/// accumulating mass.
pub fn example1_divergence(radius: f64) -> Result<f64, SpaceError> {
    if !(radius > 0.0) {
        return Err(SpaceError::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    let inner_tol = QuadTol::new(1e-13, 2.5e-10);
    let outer_tol = QuadTol::new(1e-12, 1e-9);
    let result = integrate_real(
        |p1: f64| {
            let lo = (-radius).max(-p1.abs().powf(2.0 / 3.0));
            let inner = integrate_real(|p2: f64| (-p2 * p2 * p2).exp(), lo, radius, inner_tol);
            inner.value.re * (-p1 * p1).exp()
        },
        -radius,
        radius,
        outer_tol,
    );
    if !result.converged {
        return Err(SpaceError::Numerical(format!(
            "region integral did not converge at radius {radius} (error {:.2e})",
            result.abs_err
        )));
    }
    Ok(result.value.re)
}

/// The unbounded-sequence witness `g_n(p) = p₂ⁿ e^{−p₁}`: its truncated
/// norm over a complex strip neighborhood versus its supremum along an
/// inclined ray.
///
/// The strip norm is `sup |g_n(w)| exp(|p|/B)` over the `1/A`-neighborhood
/// in `C²` of `(−ε, ∞) × (−ε, ε)`; since `|w₂|` stays below 1 for small
/// `ε` and `1/A`, the norms decrease geometrically in `n`. The ray
/// supremum along `p₂ = λ p₁`, `p₁ ≥ 0` is `λⁿ nⁿ e⁻ⁿ` in closed form
/// (attained at `p₁ = n`), which grows superexponentially: no single strip
/// controls every inclined ray.
pub fn hyperfunction_example(
    n: usize,
    epsilon: f64,
    a: f64,
    b: f64,
    lambda: f64,
) -> Result<(f64, f64), SpaceError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(SpaceError::InvalidInput(format!(
            "epsilon must lie in (0, 1/2), got {epsilon}"
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(SpaceError::InvalidInput(format!("A and B must be positive, got {a}, {b}")));
    }
    if !(lambda > 0.0) {
        return Err(SpaceError::InvalidInput(format!("lambda must be positive, got {lambda}")));
    }

    // Closed-form ray supremum: sup_{t ≥ 0} (λt)^n e^{−t} at t = n.
    let ray_sup = if n == 0 {
        1.0
    } else {
        let nf = n as f64;
        (nf * (lambda.ln() + nf.ln() - 1.0)).exp()
    };

    // Truncated strip supremum on a fixed grid (log domain). The domain is
    // open; grid points are inset by half a step.
    let half = epsilon + 1.0 / a;
    let imag = 1.0 / a;
    let p1_max = 50.0;
    let n1 = 600;
    let n2 = 101;
    let p1s = linspace(-half + half / n1 as f64, p1_max, n1);
    let p2s = linspace(-half * (1.0 - 0.5 / n2 as f64), half * (1.0 - 0.5 / n2 as f64), n2);
    let q2s = linspace(-imag * (1.0 - 0.5 / n2 as f64), imag * (1.0 - 0.5 / n2 as f64), n2);
    let mut best = f64::NEG_INFINITY;
    for &p1 in &p1s {
        for &p2 in &p2s {
            for &q2 in &q2s {
                let mod2 = (p2 * p2 + q2 * q2).sqrt();
                let lg = if n == 0 {
                    0.0
                } else if mod2 == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    n as f64 * mod2.ln()
                };
                let term = lg - p1 + p1.abs().max(p2.abs()) / b;
                best = best.max(term);
            }
        }
    }
    Ok((best.exp(), ray_sup))
}

/// Report of the flatness estimate at a point: the measured value against
/// the calibrated decay bound.
#[derive(Debug, Clone)]
pub struct FlatBound {
    /// `|f(x)|`.
    pub lhs: f64,
    /// `C · exp(−A′ · depth^{−1/(β−1)})` with the fitted constant.
    pub rhs: f64,
    /// Whether `lhs ≤ rhs` (with a tiny relative slack).
    pub ok: bool,
    /// The constant fitted over the calibration grid.
    pub c_fitted: f64,
    /// The decay-rate constant `A′ = (β−1)/(2e) · (B·k·e)^{−1/(β−1)}`.
    pub a_prime: f64,
    /// Sup-norm distance from `x` to the complement of the region.
    pub depth: f64,
}

/// Checks the boundary flatness estimate
/// `|f(x)| ≤ C · exp(−A′ · δ(x)^{−1/(β−1)})` for a support-restricted
/// member, where `δ` is the depth inside the region.
///
/// The constant `C` is fitted once per function by maximizing the ratio over
/// a calibration grid along the region's generator rays; `A′` follows the
/// closed form `(β−1)/(2e) · (B·k·e)^{−1/(β−1)}`.
pub fn taylor_flat_bound(
    f: &TestFunction,
    params: &GSParams,
    x: &[f64],
) -> Result<FlatBound, SpaceError> {
    let support = f
        .support
        .as_ref()
        .ok_or_else(|| SpaceError::InvalidInput("function has no support restriction".into()))?;
    if x.len() != f.dim {
        return Err(SpaceError::DimensionMismatch { expected: f.dim, got: x.len() });
    }
    if !(params.beta > 1.0) {
        return Err(SpaceError::Params(format!(
            "flatness estimate requires beta > 1, got {}",
            params.beta
        )));
    }
    let depth = support.region.distance_to_complement(x)?;
    if depth <= 0.0 {
        return Err(SpaceError::InvalidInput("point lies outside the open region".into()));
    }
    let k = f.dim as f64;
    let e = std::f64::consts::E;
    let inv_exp = 1.0 / (params.beta - 1.0);
    let a_prime = (params.beta - 1.0) / (2.0 * e) * (params.b * k * e).powf(-inv_exp);

    // Calibration: along each generator ray of the region, scan radii and
    // take the worst ratio |f| / exp(−A′ δ^{−1/(β−1)}). Regions given only
    // by half-space data fall back to the coordinate directions that lie
    // inside them.
    let mut rays: Vec<Vec<f64>> = support.region.generators().to_vec();
    if rays.is_empty() {
        for j in 0..f.dim {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; f.dim];
                e[j] = s;
                if support.region.distance_to_complement(&e).unwrap_or(0.0) > 0.0 {
                    rays.push(e);
                }
            }
        }
    }
    let mut c_fitted: f64 = 0.0;
    for g in &rays {
        let s = sup_norm(g);
        if s <= 0.0 {
            continue;
        }
        for t in linspace(0.05, 2.0, 200) {
            let xc: Vec<f64> = g.iter().map(|v| v / s * t).collect();
            let d = support.region.distance_to_complement(&xc)?;
            if d <= 0.0 {
                continue;
            }
            let val = f.eval_real(&xc).norm();
            let envelope = (-a_prime * d.powf(-inv_exp)).exp();
            if envelope > 0.0 {
                c_fitted = c_fitted.max(val / envelope);
            }
        }
    }

    let lhs = f.eval_real(x).norm();
    let rhs = c_fitted * (-a_prime * depth.powf(-inv_exp)).exp();
    Ok(FlatBound { lhs, rhs, ok: lhs <= rhs * (1.0 + 1e-9), c_fitted, a_prime, depth })
}

/// Brute-force check value for the weighted-power infimum
/// `inf_m ξ^{−m} m^{αm}` over `0 ≤ m ≤ m_max`, together with the closed
/// bound `exp(−(α/e) ξ^{1/α} + αe/2)` that dominates it.
pub fn inf_weighted_power(xi: f64, alpha: f64, m_max: usize) -> (f64, f64) {
    let mut inf = 1.0f64; // m = 0 term: ξ^0 · 0^0 = 1
    for m in 1..=m_max {
        let mf = m as f64;
        let log_term = -mf * xi.ln() + alpha * mf * mf.ln();
        inf = inf.min(log_term.exp());
    }
    let e = std::f64::consts::E;
    let bound = (-(alpha / e) * xi.powf(1.0 / alpha) + alpha * e / 2.0).exp();
    (inf, bound)
}
