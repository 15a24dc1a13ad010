//! Splitting a test function across a pair of separated direction cones.
//!
//! Given `f` carried by `U × V` and two cones `U₁, U₂` whose closures meet
//! only at the origin, the function is written as `f = f₁ + f₂` with `f₁`
//! carried by `(U ∪ U₁) × V` and `f₂` by `(U ∪ U₂) × V`. The splitting
//! multiplies `f` by a smooth partition pair built from a normalized
//! Gaussian `g₀`:
//!
//! ```text
//!   g₁(w) = ∫_{W₂} g₀(w' − η) dη,    g₂(w) = ∫_{W₁} g₀(w' − η) dη,
//! ```
//!
//! where `W₁` is a slightly widened copy of `U₁` and `W₂` its closed
//! complement, so `g₁ + g₂ = 1` identically and each factor decays at a
//! Gaussian rate away from its region. On half-lines the integrals reduce
//! to complementary error functions; planar regions are triangulated into
//! sectors and integrated by adaptive quadrature. Both factors are computed
//! by their own region integral — the partition identity is a genuine
//! cross-check of two quadratures, not an algebraic tautology.
//!
//! The certificate reports the measured separation rates `θ` (how fast
//! `U₁`-distance grows off the widened cone) and `θ₁` (how fast
//! `W₂`-distance grows inside it), the derived scale constant
//! `A′ = 2(A₀ + A) + A/θ`, the truncated cone-norm reports of both
//! fragments on their carriers, and the sampled partition error.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::cones::Cone;
use crate::quad::{integrate_axes, Axis, QuadTol};
use crate::special::{erfc, erfcx};
use crate::util::{grid_product, linspace, sup_norm};

use super::{cone_norm, ComplexMap, GSParams, NormReport, SpaceError, TestFunction, TruncationSpec};

/// Tuning knobs for the decomposition and its certificate.
#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    /// Truncation policy for the two certificate cone norms.
    pub trunc: TruncationSpec,
    /// Quadrature tolerance of planar mollifier integrals.
    pub quad_tol: QuadTol,
    /// Points per axis of the sampled partition-identity grid.
    pub partition_points: usize,
    /// Radius of the partition-identity grid.
    pub partition_radius: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            trunc: TruncationSpec {
                max_order: 4,
                radius: 6.0,
                points_per_axis: 25,
                ..TruncationSpec::default()
            },
            quad_tol: QuadTol::new(1e-12, 1e-10),
            partition_points: 1000,
            partition_radius: 5.0,
        }
    }
}

/// The direction content of a one- or two-dimensional closed cone, reduced
/// to a form the Gaussian integrals handle directly.
#[derive(Debug, Clone)]
enum Directions {
    /// Nothing but the origin: zero measure.
    Origin,
    /// One-dimensional: the closed positive or negative half-line.
    HalfLine { negative: bool },
    /// The whole line or plane.
    Everything,
    /// Planar angular interval `[lo, hi]` with `hi − lo ≤ π`.
    Arc { lo: f64, hi: f64 },
}

/// Classifies a cone in dimension 1 or 2 by its directions.
fn classify(cone: &Cone) -> Result<Directions, SpaceError> {
    match cone.dim {
        1 => {
            let plus = cone.contains(&[1.0]);
            let minus = cone.contains(&[-1.0]);
            Ok(match (plus, minus) {
                (true, true) => Directions::Everything,
                (true, false) => Directions::HalfLine { negative: false },
                (false, true) => Directions::HalfLine { negative: true },
                (false, false) => Directions::Origin,
            })
        }
        2 => {
            if cone.is_degenerate() {
                return Ok(Directions::Origin);
            }
            // Probe directions; a convex planar cone is an angular interval.
            let n = 720;
            let inside: Vec<bool> = (0..n)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / n as f64;
                    cone.contains(&[th.cos(), th.sin()])
                })
                .collect();
            if inside.iter().all(|&b| b) {
                return Ok(Directions::Everything);
            }
            if inside.iter().all(|&b| !b) {
                return Ok(Directions::Origin);
            }
            // Find the maximal run of inside directions (wrapping).
            let first_out = inside.iter().position(|&b| !b).unwrap();
            let mut runs: Vec<(usize, usize)> = Vec::new(); // (start, len)
            let mut i = first_out;
            let mut seen = 0;
            while seen < n {
                if inside[(i) % n] {
                    let start = i % n;
                    let mut len = 0;
                    while inside[(start + len) % n] && len < n {
                        len += 1;
                    }
                    runs.push((start, len));
                    i += len;
                    seen += len;
                } else {
                    i += 1;
                    seen += 1;
                }
            }
            if runs.len() != 1 {
                return Err(SpaceError::Unsupported(
                    "cone directions form more than one angular run".into(),
                ));
            }
            let (start, len) = runs[0];
            let step = 2.0 * PI / n as f64;
            let lo = start as f64 * step;
            let hi = (start + len - 1) as f64 * step;
            // Refine both edges by bisection on membership.
            let lo = refine_edge(cone, lo, lo - step);
            let hi = refine_edge(cone, hi, hi + step);
            Ok(Directions::Arc { lo, hi })
        }
        d => Err(SpaceError::Unsupported(format!(
            "mollifier integrals are implemented for direction dimension 1 and 2, got {d}"
        ))),
    }
}

/// Bisects between an inside angle and an outside angle to the boundary.
fn refine_edge(cone: &Cone, mut good: f64, mut bad: f64) -> f64 {
    for _ in 0..50 {
        let mid = 0.5 * (good + bad);
        if cone.contains(&[mid.cos(), mid.sin()]) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// A region of directions for the Gaussian integral, already simplicial.
#[derive(Debug, Clone)]
enum Region {
    Empty,
    Full,
    HalfLine { negative: bool },
    /// Planar sectors, each spanned by two unit columns.
    Sectors(Vec<[[f64; 2]; 2]>),
}

impl Region {
    /// Splits an angular interval into sectors of at most a quarter turn.
    fn from_arc(lo: f64, hi: f64) -> Region {
        let span = hi - lo;
        if span <= 1e-12 {
            return Region::Empty;
        }
        if span >= 2.0 * PI - 1e-12 {
            return Region::Full;
        }
        let pieces = (span / (PI / 2.0)).ceil() as usize;
        let mut sectors = Vec::with_capacity(pieces);
        for i in 0..pieces {
            let a = lo + span * i as f64 / pieces as f64;
            let b = lo + span * (i + 1) as f64 / pieces as f64;
            sectors.push([[a.cos(), a.sin()], [b.cos(), b.sin()]]);
        }
        Region::Sectors(sectors)
    }

    /// The cone of this region's directions (union of sector cones), used
    /// for the `θ₁` measurement. `None` for empty or full regions.
    fn as_cone(&self, dim: usize) -> Option<Cone> {
        match self {
            Region::Empty | Region::Full => None,
            Region::HalfLine { negative } => {
                let g = if *negative { vec![-1.0] } else { vec![1.0] };
                Some(Cone::from_generators(1, &[g]).unwrap())
            }
            Region::Sectors(sectors) => {
                let mut acc: Option<Cone> = None;
                for s in sectors {
                    let c = Cone::from_generators(dim, &[s[0].to_vec(), s[1].to_vec()]).unwrap();
                    acc = Some(match acc {
                        None => c,
                        Some(a) => a.union(&c).unwrap(),
                    });
                }
                acc
            }
        }
    }
}

/// One factor of the partition pair: the normalized Gaussian integrated
/// over a fixed direction region, as an entire function of the first `k₁`
/// complex variables.
#[derive(Debug)]
pub struct MollifierFactor {
    k1: usize,
    region: Region,
    tol: QuadTol,
}

impl MollifierFactor {
    /// The factor value at the first `k₁` complex coordinates.
    pub fn eval(&self, wp: &[Complex64]) -> Complex64 {
        debug_assert_eq!(wp.len(), self.k1);
        match &self.region {
            Region::Empty => Complex64::new(0.0, 0.0),
            Region::Full => Complex64::new(1.0, 0.0),
            Region::HalfLine { negative } => {
                // ∫ over R̄₊ of π^{-1/2} e^{-(w-η)²} dη = erfc(-w)/2; the
                // negative half-line mirrors the argument.
                let w = wp[0];
                if *negative {
                    erfc(w) * 0.5
                } else {
                    erfc(-w) * 0.5
                }
            }
            Region::Sectors(sectors) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in sectors {
                    acc += sector_gaussian(wp, s, self.tol);
                }
                acc
            }
        }
    }
}

/// `|det T|/π · ∫_{R₊²} exp(−Σ_j (w_j − (Tc)_j)²) dc` for one sector with
/// unit generator columns.
///
/// The leg along the second generator is integrated in closed form: with
/// `v = w − c₁t₁`, `β = v·t₂` and `v⊥² = v·v − β²`,
///
/// ```text
///   ∫₀^∞ e^{−(v − c₂t₂)²} dc₂ = (√π/2)·e^{−v⊥²}·erfc(−β),
/// ```
///
/// which leaves a single half-line quadrature over `c₁`. Deep in the decayed
/// regime the complement is folded into the exponent through its scaled
/// variant so neither factor under- or overflows.
fn sector_gaussian(w: &[Complex64], t: &[[f64; 2]; 2], tol: QuadTol) -> Complex64 {
    let det = (t[0][0] * t[1][1] - t[0][1] * t[1][0]).abs();
    if det < 1e-14 {
        return Complex64::new(0.0, 0.0);
    }
    let r = integrate_axes(
        |c: &[f64]| {
            let v0 = w[0] - c[0] * t[0][0];
            let v1 = w[1] - c[0] * t[0][1];
            let beta = v0 * t[1][0] + v1 * t[1][1];
            let v_sq = v0 * v0 + v1 * v1;
            let z = -beta;
            if z.re >= 4.0 {
                (-v_sq).exp() * erfcx(z)
            } else {
                (beta * beta - v_sq).exp() * erfc(z)
            }
        },
        &[Axis::ToPlusInf(0.0)],
        tol,
    );
    r.value * det / (2.0 * PI.sqrt())
}

/// The same sector integral by direct two-dimensional tensor quadrature,
/// kept as an independent route for cross-checks.
#[cfg(test)]
fn sector_gaussian_direct(w: &[Complex64], t: &[[f64; 2]; 2], tol: QuadTol) -> Complex64 {
    let det = (t[0][0] * t[1][1] - t[0][1] * t[1][0]).abs();
    if det < 1e-14 {
        return Complex64::new(0.0, 0.0);
    }
    let r = integrate_axes(
        |c: &[f64]| {
            let x0 = c[0] * t[0][0] + c[1] * t[1][0];
            let x1 = c[0] * t[0][1] + c[1] * t[1][1];
            let d0 = w[0] - x0;
            let d1 = w[1] - x1;
            (-(d0 * d0 + d1 * d1)).exp()
        },
        &[Axis::ToPlusInf(0.0), Axis::ToPlusInf(0.0)],
        tol,
    );
    r.value * det / PI
}

/// One fragment of the decomposition: the original function times one
/// mollifier factor. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Fragment {
    base: Arc<TestFunction>,
    factor: Arc<MollifierFactor>,
}

impl Fragment {
    /// The partition factor alone (used by identity cross-checks).
    pub fn mollifier_value(&self, wp: &[Complex64]) -> Complex64 {
        self.factor.eval(wp)
    }

    /// Number of leading coordinates the factor acts on.
    pub fn split_dim(&self) -> usize {
        self.factor.k1
    }
}

impl ComplexMap for Fragment {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, w: &[Complex64]) -> Complex64 {
        self.base.eval(w) * self.factor.eval(&w[..self.factor.k1])
    }

    fn log_abs(&self, w: &[Complex64]) -> f64 {
        self.base.log_abs(w) + self.factor.eval(&w[..self.factor.k1]).norm().ln()
    }
}

/// The separation bookkeeping and finiteness evidence for a decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionCertificate {
    /// Measured lower rate of `δ_{U₁}(p')/|p'|` outside the widened cone.
    pub theta: f64,
    /// Measured lower rate of `δ_{W₂}(p')/|p'|` inside the widened cone.
    pub theta1: f64,
    /// The Gaussian mollifier's scale constants.
    pub a0: f64,
    pub b0: f64,
    /// Derived carrier scale `A′ = 2(A₀ + A) + A/θ` used for both
    /// certificate norms.
    pub a_prime: f64,
    /// Whether the working scale satisfies `A ≤ θ₁/(2B₀)`.
    pub scale_within_mollifier_rate: bool,
    /// Truncated cone norm of `f₁` on `(U ∪ U₁) × V`.
    pub f1_report: NormReport,
    /// Truncated cone norm of `f₂` on `(U ∪ U₂) × V`.
    pub f2_report: NormReport,
    /// Largest `|f₁ + f₂ − f|` over the sampled grid.
    pub partition_sup_error: f64,
}

/// The result of [`decompose`].
#[derive(Debug)]
pub struct Decomposition {
    pub f1: Fragment,
    pub f2: Fragment,
    pub certificate: DecompositionCertificate,
}

/// Scale constants of the normalized Gaussian mollifier within the
/// `α = 1/2` family (certified finite by the real-norm oracle at 4).
const MOLLIFIER_A0: f64 = 4.0;
const MOLLIFIER_B0: f64 = 4.0;

/// Splits `f` (carried by `U × V`) into fragments carried by
/// `(U ∪ U₁) × V` and `(U ∪ U₂) × V`.
///
/// `U`, `U₁`, `U₂` live in the first `k₁` coordinates, `V` (when present)
/// in the remaining ones; `f.dim() = k₁ + k₂`. Preconditions: `α > 0` and
/// the closures of `U₁` and `U₂` meet only at the origin.
pub fn decompose(
    f: &TestFunction,
    u: &Cone,
    v: Option<&Cone>,
    u1: &Cone,
    u2: &Cone,
    params: &GSParams,
    options: &DecomposeOptions,
) -> Result<Decomposition, SpaceError> {
    let k1 = u.dim;
    if u1.dim != k1 || u2.dim != k1 {
        return Err(SpaceError::DimensionMismatch { expected: k1, got: u1.dim.max(u2.dim) });
    }
    let k2 = f.dim().checked_sub(k1).ok_or(SpaceError::DimensionMismatch {
        expected: k1,
        got: f.dim(),
    })?;
    match (k2, v) {
        (0, None) => {}
        (n, Some(c)) if n > 0 && c.dim == n => {}
        (n, got) => {
            return Err(SpaceError::DimensionMismatch {
                expected: n,
                got: got.map_or(0, |c| c.dim),
            })
        }
    }
    if !(params.alpha > 0.0) {
        return Err(SpaceError::Unsupported(
            "splitting requires alpha > 0; the alpha = 0 branch has no computable construction here"
                .into(),
        ));
    }

    let d1 = classify(u1)?;
    let d2 = classify(u2)?;
    check_separation(&d1, &d2)?;
    // Cross-distances through cone geometry as an independent guard.
    for g in u1.generators() {
        if sup_norm(g) > 0.0 && u2.distance(g)? <= 1e-12 * (1.0 + sup_norm(g)) {
            return Err(SpaceError::InvalidInput(
                "direction cones share a nonzero direction".into(),
            ));
        }
    }

    // Widen U₁ into W₁; the closed complement is W₂.
    let (w1_region, w2_region, v1_arc) = build_regions(&d1, &d2)?;

    let factor1 = Arc::new(MollifierFactor { k1, region: w2_region.clone(), tol: options.quad_tol });
    let factor2 = Arc::new(MollifierFactor { k1, region: w1_region.clone(), tol: options.quad_tol });
    let base = Arc::new(f.clone());
    let f1 = Fragment { base: base.clone(), factor: factor1 };
    let f2 = Fragment { base, factor: factor2 };

    // Measured separation rates on the unit circle/pair of unit points.
    let (theta, theta1) = measure_rates(u1, &w2_region, &v1_arc, k1)?;
    let a_prime = 2.0 * (MOLLIFIER_A0 + params.a) + params.a / theta;
    let scale_ok = params.a <= theta1 / (2.0 * MOLLIFIER_B0);

    // Certificate norms on the union carriers.
    let carrier1 = carrier(u, u1, v)?;
    let carrier2 = carrier(u, u2, v)?;
    let cert_params = GSParams::new(params.alpha, params.beta, a_prime, params.b)?;
    let f1_report = cone_norm(&f1, &carrier1, &cert_params, &options.trunc)?;
    let f2_report = cone_norm(&f2, &carrier2, &cert_params, &options.trunc)?;

    // Partition identity on a sampled real grid.
    let axis = linspace(
        -options.partition_radius,
        options.partition_radius,
        options.partition_points.max(2),
    );
    let axes = vec![axis; f.dim()];
    let mut partition_sup_error = 0.0f64;
    for x in grid_product(&axes) {
        let w: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let lhs = f1.eval(&w) + f2.eval(&w);
        let rhs = f.eval(&w);
        partition_sup_error = partition_sup_error.max((lhs - rhs).norm());
    }

    Ok(Decomposition {
        f1,
        f2,
        certificate: DecompositionCertificate {
            theta,
            theta1,
            a0: MOLLIFIER_A0,
            b0: MOLLIFIER_B0,
            a_prime,
            scale_within_mollifier_rate: scale_ok,
            f1_report,
            f2_report,
            partition_sup_error,
        },
    })
}

/// Verifies that the two direction sets only meet at the origin.
fn check_separation(d1: &Directions, d2: &Directions) -> Result<(), SpaceError> {
    let bad = match (d1, d2) {
        (Directions::Origin, _) | (_, Directions::Origin) => false,
        (Directions::Everything, _) | (_, Directions::Everything) => true,
        (Directions::HalfLine { negative: a }, Directions::HalfLine { negative: b }) => a == b,
        (Directions::Arc { lo: a, hi: b }, Directions::Arc { lo: c, hi: d }) => {
            arcs_overlap(*a, *b, *c, *d)
        }
        _ => true, // mixed dimensions cannot reach here
    };
    if bad {
        Err(SpaceError::InvalidInput(
            "the closures of the two direction cones meet away from the origin".into(),
        ))
    } else {
        Ok(())
    }
}

/// Whether closed angular intervals intersect on the circle.
fn arcs_overlap(a: f64, b: f64, c: f64, d: f64) -> bool {
    let tau = 2.0 * PI;
    // Compare on the circle: shift one interval by multiples of 2π.
    for shift in [-tau, 0.0, tau] {
        let (c, d) = (c + shift, d + shift);
        if c <= b && a <= d {
            return true;
        }
    }
    false
}

/// Builds the widened region `W₁`, its complement `W₂`, and the mid-widened
/// arc used for the rate measurement.
fn build_regions(
    d1: &Directions,
    d2: &Directions,
) -> Result<(Region, Region, Option<(f64, f64)>), SpaceError> {
    match d1 {
        Directions::Origin => Ok((Region::Empty, Region::Full, None)),
        Directions::Everything => Ok((Region::Full, Region::Empty, None)),
        Directions::HalfLine { negative } => Ok((
            Region::HalfLine { negative: *negative },
            Region::HalfLine { negative: !*negative },
            None,
        )),
        Directions::Arc { lo, hi } => {
            // Widen by just under half the angular gap to the other cone.
            let gap = match d2 {
                Directions::Arc { lo: c, hi: d } => {
                    let tau = 2.0 * PI;
                    let mut best = f64::INFINITY;
                    for shift in [-tau, 0.0, tau] {
                        best = best.min(((c + shift) - hi).abs()).min(((d + shift) - lo).abs());
                        best = best.min(((c + shift) - lo).abs()).min(((d + shift) - hi).abs());
                    }
                    best
                }
                _ => PI / 2.0,
            };
            let eps = (0.45 * gap).min(0.9 * (2.0 * PI - (hi - lo)) / 2.0).max(1e-6);
            let (wlo, whi) = (lo - eps, hi + eps);
            let w1 = Region::from_arc(wlo, whi);
            let w2 = Region::from_arc(whi, wlo + 2.0 * PI);
            let half = 0.5 * eps;
            Ok((w1, w2, Some((lo - half, hi + half))))
        }
    }
}

/// Measures the separation rates `θ` and `θ₁` over unit directions.
fn measure_rates(
    u1: &Cone,
    w2_region: &Region,
    v1_arc: &Option<(f64, f64)>,
    k1: usize,
) -> Result<(f64, f64), SpaceError> {
    let w2_cone = w2_region.as_cone(k1);
    let mut theta = f64::INFINITY;
    let mut theta1 = f64::INFINITY;
    let dirs: Vec<Vec<f64>> = if k1 == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..720)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / 720.0;
                vec![th.cos(), th.sin()]
            })
            .collect()
    };
    for p in &dirs {
        let in_v1 = match (k1, v1_arc) {
            (1, _) => u1.contains(p),
            (2, Some((lo, hi))) => {
                let th = p[1].atan2(p[0]);
                in_arc(th, *lo, *hi)
            }
            (2, None) => u1.contains(p),
            _ => unreachable!(),
        };
        let s = sup_norm(p);
        if !in_v1 {
            theta = theta.min(u1.distance(p)? / s);
        } else if let Some(w2) = &w2_cone {
            theta1 = theta1.min(w2.distance(p)? / s);
        }
    }
    // Degenerate situations (everything inside or outside) fall back to the
    // perfect rate.
    if !theta.is_finite() {
        theta = 1.0;
    }
    if !theta1.is_finite() {
        theta1 = 1.0;
    }
    Ok((theta.max(1e-9), theta1.max(1e-9)))
}

/// Whether angle `th` lies in `[lo, hi]` on the circle.
fn in_arc(th: f64, lo: f64, hi: f64) -> bool {
    let tau = 2.0 * PI;
    for shift in [-tau, 0.0, tau] {
        let t = th + shift;
        if t >= lo && t <= hi {
            return true;
        }
    }
    false
}

/// The carrier `(U ∪ U₁) × V` as a cone (union distributes over the
/// product).
fn carrier(u: &Cone, u1: &Cone, v: Option<&Cone>) -> Result<Cone, SpaceError> {
    let union = u.union(u1)?;
    match v {
        None => Ok(union),
        Some(v) => {
            // (A ∪ B) × V = (A × V) ∪ (B × V): build per piece to keep the
            // product well-formed.
            let left = u.product(v)?;
            let right = u1.product(v)?;
            Ok(left.union(&right)?)
        }
    }
}
