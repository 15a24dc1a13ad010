//! Laplace transforms of cone-carried functionals and their boundary
//! behaviour.
//!
//! A [`Functional`] is a finite sum of atoms — point masses, first-order
//! derivative point masses, and densities — each declared on a closed cone
//! carrier. Its Laplace transform
//!
//! ```text
//!   (ℒu)(z) = u(e^{i⟨·,z⟩}),    z = x + iy,  y interior to the dual tube cone,
//! ```
//!
//! is analytic on the tube and decays because `⟨p, y⟩ > 0` on the carrier.
//! [`boundary_value_check`] follows the transform down to the tube boundary
//! and compares `∫(ℒu)(x+iy)·f(x)dx` against the direct pairing `u(f̂)`,
//! row by row along a given sequence of interior points. [`a_norm`]
//! computes the truncated weighted supremum that measures membership of an
//! analytic function in the boundary-growth class, and [`check_transform`]
//! is the reflected-kernel integral transform used by the reconstruction
//! pipeline: real-exponential in time components, imaginary in space
//! components, with the `(2π)^{-dn}` normalization.
//!
//! All pairings go through one sign convention object, [`PairingForm`], so
//! every identity in the tests is anchored to a single constant.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::cones::{Cone, ConeError};
use crate::quad::{integrate_axes, Axis, QuadTol};
use crate::spaces::{ComplexMap, SpaceError, TestFunction};
use crate::util::{dot, l2_norm, linspace, sup_norm};

pub mod parse;

pub use parse::parse_functional;

/// Errors from transform assembly and evaluation.
#[derive(Debug, Error)]
pub enum LaplaceError {
    #[error("tube violation: {0}")]
    TubeViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Sign convention of the duality pairing `⟨p, x⟩`.
///
/// Everything downstream — kernels, Fourier transforms, boundary pairings —
/// derives its signs from this one choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingForm {
    /// `⟨p, x⟩ = Σ_j p_j x_j`.
    Standard,
    /// `⟨p, x⟩ = −Σ_j p_j x_j`, the reconstruction pipeline's convention.
    Reflected,
}

impl PairingForm {
    fn sign(self) -> f64 {
        match self {
            PairingForm::Standard => 1.0,
            PairingForm::Reflected => -1.0,
        }
    }

    /// The pairing of two real vectors.
    pub fn dot(self, p: &[f64], x: &[f64]) -> f64 {
        self.sign() * dot(p, x)
    }

    /// The pairing extended to a complex second argument.
    pub fn dot_complex(self, p: &[f64], z: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in p.iter().zip(z) {
            acc += b * *a;
        }
        acc * self.sign()
    }
}

/// One summand of a functional.
#[derive(Debug, Clone)]
pub enum AtomKind {
    /// Evaluation at a point: `φ ↦ φ(p)`.
    PointMass { location: Vec<f64> },
    /// First directional derivative at a point: `φ ↦ (∂_e φ)(p)`.
    DerivativePointMass { location: Vec<f64>, direction: Vec<f64> },
    /// Integration against a density over the carrier.
    Density { density: TestFunction },
}

/// An atom together with the closed cone it is declared on.
#[derive(Debug, Clone)]
pub struct Atom {
    pub kind: AtomKind,
    pub carrier: Cone,
}

/// A cone-carried functional: a finite list of atoms in a common dimension.
#[derive(Debug, Clone)]
pub struct Functional {
    dim: usize,
    atoms: Vec<Atom>,
}

impl Functional {
    /// Builds a functional, checking each atom against its carrier:
    /// point-mass locations must be members, derivative directions nonzero,
    /// and a restricted density's support region must sit inside the
    /// carrier (sampled on its generators and their midpoints).
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self, LaplaceError> {
        if dim == 0 {
            return Err(LaplaceError::InvalidInput("dimension must be positive".into()));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if atom.carrier.dim != dim {
                return Err(LaplaceError::DimensionMismatch {
                    expected: dim,
                    got: atom.carrier.dim,
                });
            }
            match &atom.kind {
                AtomKind::PointMass { location } => {
                    if location.len() != dim {
                        return Err(LaplaceError::DimensionMismatch {
                            expected: dim,
                            got: location.len(),
                        });
                    }
                    if !atom.carrier.contains(location) {
                        return Err(LaplaceError::InvalidInput(format!(
                            "atom {i}: point mass at {location:?} lies outside its carrier"
                        )));
                    }
                }
                AtomKind::DerivativePointMass { location, direction } => {
                    if location.len() != dim || direction.len() != dim {
                        return Err(LaplaceError::DimensionMismatch {
                            expected: dim,
                            got: location.len().max(direction.len()),
                        });
                    }
                    if sup_norm(direction) == 0.0 {
                        return Err(LaplaceError::InvalidInput(format!(
                            "atom {i}: zero derivative direction"
                        )));
                    }
                    if !atom.carrier.contains(location) {
                        return Err(LaplaceError::InvalidInput(format!(
                            "atom {i}: derivative point mass outside its carrier"
                        )));
                    }
                }
                AtomKind::Density { density } => {
                    if density.dim() != dim {
                        return Err(LaplaceError::DimensionMismatch {
                            expected: dim,
                            got: density.dim(),
                        });
                    }
                    if let Some(support) = density.support() {
                        let gens = support.region.generators();
                        let mut probes: Vec<Vec<f64>> = gens.to_vec();
                        for a in 0..gens.len() {
                            for b in (a + 1)..gens.len() {
                                probes.push(
                                    gens[a]
                                        .iter()
                                        .zip(&gens[b])
                                        .map(|(u, v)| 0.5 * (u + v))
                                        .collect(),
                                );
                            }
                        }
                        for p in probes.iter().filter(|p| sup_norm(p) > 0.0) {
                            if !atom.carrier.contains(p) {
                                return Err(LaplaceError::InvalidInput(format!(
                                    "atom {i}: density support direction {p:?} leaves the carrier"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(Functional { dim, atoms })
    }

    /// The point mass `δ_p` on the given carrier.
    pub fn delta(location: Vec<f64>, carrier: Cone) -> Result<Self, LaplaceError> {
        let dim = location.len();
        Functional::new(dim, vec![Atom { kind: AtomKind::PointMass { location }, carrier }])
    }

    /// A single density atom on the given carrier.
    pub fn density(density: TestFunction, carrier: Cone) -> Result<Self, LaplaceError> {
        let dim = density.dim();
        Functional::new(dim, vec![Atom { kind: AtomKind::Density { density }, carrier }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

/// A point `z = x + iy` of a tube domain, with `y` strictly interior to
/// the tube cone.
#[derive(Debug, Clone)]
pub struct TubePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub cone: Cone,
}

impl TubePoint {
    /// Validates strict interiority of `y`. Half-space-form cones answer
    /// exactly through their face distances; generator-form cones are
    /// certified by membership of a small coordinate ball around `y`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, cone: Cone) -> Result<Self, LaplaceError> {
        if x.len() != cone.dim || y.len() != cone.dim {
            return Err(LaplaceError::DimensionMismatch {
                expected: cone.dim,
                got: x.len().max(y.len()),
            });
        }
        let interior = match cone.distance_to_complement(&y) {
            Ok(depth) => depth > 0.0,
            Err(_) => {
                let h = 1e-7 * (1.0 + sup_norm(&y));
                cone.contains(&y)
                    && (0..y.len()).all(|j| {
                        let mut up = y.clone();
                        let mut down = y.clone();
                        up[j] += h;
                        down[j] -= h;
                        cone.contains(&up) && cone.contains(&down)
                    })
            }
        };
        if !interior {
            return Err(LaplaceError::TubeViolation(format!(
                "imaginary part {y:?} is not interior to the tube cone"
            )));
        }
        Ok(TubePoint { x, y, cone })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The complex coordinates `x + iy`.
    pub fn z(&self) -> Vec<Complex64> {
        self.x.iter().zip(&self.y).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }
}

const DENSITY_TOL: QuadTol = QuadTol { abs: 1e-13, rel: 1e-10, max_subdiv: 2000 };
const PAIRING_TOL: QuadTol = QuadTol { abs: 1e-11, rel: 1e-8, max_subdiv: 2000 };

/// Per-axis reach of a carrier: the smallest axis-aligned product of
/// half-lines and lines containing it, read off the generators (or probed
/// by membership of `±e_j` for half-space-form cones).
pub(crate) fn axes_for_carrier(carrier: &Cone) -> Result<Vec<Axis>, LaplaceError> {
    let dim = carrier.dim;
    let mut axes = Vec::with_capacity(dim);
    for j in 0..dim {
        let (pos, neg) = if !carrier.generators().is_empty() {
            let pos = carrier.generators().iter().any(|g| g[j] > 1e-12 * (1.0 + sup_norm(g)));
            let neg = carrier.generators().iter().any(|g| g[j] < -1e-12 * (1.0 + sup_norm(g)));
            (pos, neg)
        } else {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            let pos = carrier.contains(&e);
            e[j] = -1.0;
            (pos, carrier.contains(&e))
        };
        axes.push(match (pos, neg) {
            (true, true) => Axis::Real,
            (true, false) => Axis::ToPlusInf(0.0),
            (false, true) => Axis::ToMinusInf(0.0),
            (false, false) => {
                return Err(LaplaceError::InvalidInput(format!(
                    "carrier has zero extent along axis {}; density integration needs \
                     a solid carrier",
                    j + 1
                )))
            }
        });
    }
    Ok(axes)
}

/// Whether the carrier fills its axis bounding box (probed at fixed
/// sign-pattern points). When it does not, a density must carry its own
/// support restriction to zero the box–carrier gap.
fn carrier_fills_box(carrier: &Cone, axes: &[Axis]) -> bool {
    let mut probes: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let choices: &[f64] = match axis {
            Axis::Real => &[-1.0, 1.0],
            Axis::ToPlusInf(_) => &[0.5, 1.5],
            Axis::ToMinusInf(_) => &[-0.5, -1.5],
            Axis::Finite(_, _) => &[0.5],
        };
        let mut next = Vec::new();
        for p in &probes {
            for &c in choices {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        probes = next;
    }
    probes.iter().all(|p| carrier.contains(p))
}

/// Evaluates one atom's transform at complex coordinates without tube
/// revalidation (the caller checks compatibility once per `y`).
fn atom_transform(
    atom: &Atom,
    z: &[Complex64],
    form: PairingForm,
) -> Result<Complex64, LaplaceError> {
    match &atom.kind {
        AtomKind::PointMass { location } => {
            Ok((Complex64::i() * form.dot_complex(location, z)).exp())
        }
        AtomKind::DerivativePointMass { location, direction } => {
            let kernel = (Complex64::i() * form.dot_complex(location, z)).exp();
            Ok(Complex64::i() * form.dot_complex(direction, z) * kernel)
        }
        AtomKind::Density { density } => {
            let axes = axes_for_carrier(&atom.carrier)?;
            if density.is_entire() && !carrier_fills_box(&atom.carrier, &axes) {
                return Err(LaplaceError::InvalidInput(
                    "entire density on a non-product carrier; restrict the density's \
                     support to the carrier instead"
                        .into(),
                ));
            }
            let r = integrate_axes(
                |p: &[f64]| {
                    density.eval_real(p) * (Complex64::i() * form.dot_complex(p, z)).exp()
                },
                &axes,
                DENSITY_TOL,
            );
            if !r.converged {
                return Err(LaplaceError::Numerical(format!(
                    "density transform quadrature did not converge (error {:.3e})",
                    r.abs_err
                )));
            }
            Ok(r.value)
        }
    }
}

/// Checks that the kernel decays (or at least stays bounded) on an atom's
/// carrier for the given imaginary part.
fn atom_tube_compatible(atom: &Atom, y: &[f64], form: PairingForm) -> Result<(), LaplaceError> {
    let slack = -1e-12 * (1.0 + sup_norm(y));
    match &atom.kind {
        AtomKind::PointMass { location } | AtomKind::DerivativePointMass { location, .. } => {
            if form.dot(location, y) < slack * (1.0 + sup_norm(location)) {
                return Err(LaplaceError::TubeViolation(format!(
                    "kernel grows at the atom location {location:?}"
                )));
            }
        }
        AtomKind::Density { .. } => {
            for g in atom.carrier.generators() {
                if form.dot(g, y) < slack * (1.0 + sup_norm(g)) {
                    return Err(LaplaceError::TubeViolation(format!(
                        "kernel grows along carrier direction {g:?}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The Laplace transform `u(e^{i⟨·,z⟩})` at a tube point.
pub fn laplace_transform(
    u: &Functional,
    z: &TubePoint,
    form: PairingForm,
) -> Result<Complex64, LaplaceError> {
    if u.dim != z.dim() {
        return Err(LaplaceError::DimensionMismatch { expected: u.dim, got: z.dim() });
    }
    let zc = z.z();
    let mut total = Complex64::new(0.0, 0.0);
    for atom in &u.atoms {
        atom_tube_compatible(atom, &z.y, form)?;
        total += atom_transform(atom, &zc, form)?;
    }
    Ok(total)
}

/// The Fourier transform `f̂(p) = ∫ f(x) e^{i⟨p,x⟩} dx` under the given
/// pairing convention.
pub fn fourier_transform(
    f: &TestFunction,
    p: &[f64],
    form: PairingForm,
) -> Result<Complex64, LaplaceError> {
    if f.dim() != p.len() {
        return Err(LaplaceError::DimensionMismatch { expected: f.dim(), got: p.len() });
    }
    let axes = vec![Axis::Real; p.len()];
    let r = integrate_axes(
        |x: &[f64]| f.eval_real(x) * Complex64::new(0.0, form.dot(p, x)).exp(),
        &axes,
        DENSITY_TOL,
    );
    if !r.converged {
        return Err(LaplaceError::Numerical("Fourier quadrature did not converge".into()));
    }
    Ok(r.value)
}

/// The directional derivative `(∂_e f̂)(p)`, by differentiation under the
/// integral sign.
pub fn fourier_directional(
    f: &TestFunction,
    p: &[f64],
    direction: &[f64],
    form: PairingForm,
) -> Result<Complex64, LaplaceError> {
    if f.dim() != p.len() || f.dim() != direction.len() {
        return Err(LaplaceError::DimensionMismatch { expected: f.dim(), got: p.len() });
    }
    let axes = vec![Axis::Real; p.len()];
    let r = integrate_axes(
        |x: &[f64]| {
            f.eval_real(x)
                * Complex64::new(0.0, form.dot(direction, x))
                * Complex64::new(0.0, form.dot(p, x)).exp()
        },
        &axes,
        DENSITY_TOL,
    );
    if !r.converged {
        return Err(LaplaceError::Numerical("Fourier quadrature did not converge".into()));
    }
    Ok(r.value)
}

/// The direct pairing `u(f̂)`: the boundary value the transform must
/// converge to.
pub fn pair_with_fourier(
    u: &Functional,
    f: &TestFunction,
    form: PairingForm,
) -> Result<Complex64, LaplaceError> {
    if u.dim != f.dim() {
        return Err(LaplaceError::DimensionMismatch { expected: u.dim, got: f.dim() });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for atom in &u.atoms {
        total += match &atom.kind {
            AtomKind::PointMass { location } => fourier_transform(f, location, form)?,
            AtomKind::DerivativePointMass { location, direction } => {
                fourier_directional(f, location, direction, form)?
            }
            AtomKind::Density { density } => {
                let axes = axes_for_carrier(&atom.carrier)?;
                let r = integrate_axes(
                    |p: &[f64]| {
                        let weight = density.eval_real(p);
                        if weight.norm() == 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        weight * fourier_transform(f, p, form).unwrap_or(Complex64::new(f64::NAN, 0.0))
                    },
                    &axes,
                    PAIRING_TOL,
                );
                if !r.converged || !r.value.re.is_finite() {
                    return Err(LaplaceError::Numerical(
                        "density boundary pairing did not converge".into(),
                    ));
                }
                r.value
            }
        };
    }
    Ok(total)
}

/// One row of a boundary-convergence report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryRow {
    /// The interior point the transform was followed down at.
    pub y: Vec<f64>,
    /// `∫ (ℒu)(x+iy) f(x) dx` as `[re, im]`.
    pub lhs: [f64; 2],
    /// `u(f̂)` as `[re, im]`.
    pub rhs: [f64; 2],
    /// `|lhs − rhs|`.
    pub gap: f64,
}

/// The outcome of following a transform to the tube boundary.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub rows: Vec<BoundaryRow>,
    /// The gap at the last (deepest) point of the sequence.
    pub final_gap: f64,
    /// Whether the gaps are nonincreasing over the tail half of the
    /// sequence.
    pub tail_monotone: bool,
}

/// Follows `∫(ℒu)(x+iy)f(x)dx` along a sequence of interior points and
/// compares each value against the direct pairing `u(f̂)`.
pub fn boundary_value_check(
    u: &Functional,
    f: &TestFunction,
    y_sequence: &[Vec<f64>],
    form: PairingForm,
) -> Result<BoundaryReport, LaplaceError> {
    if u.dim != f.dim() {
        return Err(LaplaceError::DimensionMismatch { expected: u.dim, got: f.dim() });
    }
    if y_sequence.is_empty() {
        return Err(LaplaceError::InvalidInput("empty boundary sequence".into()));
    }
    let rhs = pair_with_fourier(u, f, form)?;
    let axes = vec![Axis::Real; u.dim];
    let mut rows = Vec::with_capacity(y_sequence.len());
    for y in y_sequence {
        if y.len() != u.dim {
            return Err(LaplaceError::DimensionMismatch { expected: u.dim, got: y.len() });
        }
        if sup_norm(y) == 0.0 {
            return Err(LaplaceError::TubeViolation(
                "boundary sequence touches the boundary itself".into(),
            ));
        }
        for atom in &u.atoms {
            atom_tube_compatible(atom, y, form)?;
        }
        let r = integrate_axes(
            |x: &[f64]| {
                let z: Vec<Complex64> =
                    x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect();
                let mut v = Complex64::new(0.0, 0.0);
                for atom in &u.atoms {
                    match atom_transform(atom, &z, form) {
                        Ok(t) => v += t,
                        Err(_) => return Complex64::new(f64::NAN, 0.0),
                    }
                }
                v * f.eval_real(x)
            },
            &axes,
            PAIRING_TOL,
        );
        if !r.converged || !r.value.re.is_finite() {
            return Err(LaplaceError::Numerical(format!(
                "boundary pairing quadrature failed at y = {y:?}"
            )));
        }
        let gap = (r.value - rhs).norm();
        rows.push(BoundaryRow {
            y: y.clone(),
            lhs: [r.value.re, r.value.im],
            rhs: [rhs.re, rhs.im],
            gap,
        });
    }
    let final_gap = rows.last().map(|r| r.gap).unwrap_or(f64::NAN);
    let tail = rows.len() / 2;
    let tail_monotone = rows[tail..]
        .windows(2)
        .all(|w| w[1].gap <= w[0].gap * (1.0 + 1e-9) + 1e-14);
    Ok(BoundaryReport { rows, final_gap, tail_monotone })
}

/// Sampling policy for the boundary-growth norm.
#[derive(Debug, Clone)]
pub struct ANormSpec {
    /// Weight strength `ε > 0`.
    pub epsilon: f64,
    /// Real-part radius bound — required exactly when `α = 0`.
    pub radius: Option<f64>,
    /// Coordinates per block: `|z_j|` and `|y_j|` are block norms.
    pub block_dim: usize,
    /// Compact subcones of the tube cone; the supremum runs over rays
    /// through their generators.
    pub subcones: Vec<Cone>,
    /// Real-part grid radius (α > 0 branch) and per-axis resolution.
    pub x_radius: f64,
    pub x_points: usize,
    /// Ray parameters `t` run log-spaced from `t_min` up to `t_max`; the
    /// levels of the report restrict to `t ≥ t_min^{s}` for scales `s`.
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
}

impl ANormSpec {
    pub fn new(epsilon: f64, block_dim: usize, subcones: Vec<Cone>) -> Self {
        ANormSpec {
            epsilon,
            radius: None,
            block_dim,
            subcones,
            x_radius: 6.0,
            x_points: 9,
            t_min: 1e-3,
            t_max: 2.0,
            t_points: 25,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }
}

/// The computed boundary-growth norm with its level trend.
#[derive(Debug, Clone, Serialize)]
pub struct ANorm {
    pub epsilon: f64,
    pub radius: Option<f64>,
    /// Truncated weighted supremum (logarithm and value).
    pub log_value: f64,
    pub value: f64,
    /// `(smallest t sampled, log sup)` per level, boundary-approaching.
    pub levels: Vec<(f64, f64)>,
    /// Whether the sup keeps growing as the sampling approaches the
    /// boundary — the blow-up trend flag.
    pub diverges: bool,
}

/// Truncated weighted supremum of `|v|` over tubes above compact subcones:
///
/// ```text
///   sup |v(z)| · ∏_j exp(−ε|z_j|^{1/α} − ε|y_j|^{−1/(β−1)})       (α > 0)
///   sup_{|x|≤R} |v(z)| · ∏_j exp(−ε|y_j|^{−1/(β−1)})              (α = 0)
/// ```
///
/// with `j` running over blocks of `block_dim` coordinates and `|·|` the
/// Euclidean block norm. The imaginary parts run along rays through the
/// subcone generators; levels restrict the smallest ray parameter, so a
/// growing level sequence flags boundary blow-up.
pub fn a_norm<V>(
    v: V,
    spec: &ANormSpec,
    alpha: f64,
    beta: f64,
) -> Result<ANorm, LaplaceError>
where
    V: Fn(&[Complex64]) -> Complex64,
{
    if !(beta > 1.0) {
        return Err(LaplaceError::InvalidInput(format!(
            "the boundary-growth class needs beta > 1, got {beta}"
        )));
    }
    if !(alpha >= 0.0) || !(spec.epsilon > 0.0) {
        return Err(LaplaceError::InvalidInput("alpha must be ≥ 0 and epsilon > 0".into()));
    }
    match (alpha == 0.0, spec.radius) {
        (true, None) => {
            return Err(LaplaceError::InvalidInput(
                "alpha = 0 branch needs the radius bound".into(),
            ))
        }
        (false, Some(_)) => {
            return Err(LaplaceError::InvalidInput(
                "radius bound is only part of the alpha = 0 branch".into(),
            ))
        }
        _ => {}
    }
    if spec.subcones.is_empty() {
        return Err(LaplaceError::InvalidInput("no subcones to sample".into()));
    }

    let dim = spec.subcones[0].dim;
    if dim % spec.block_dim != 0 {
        return Err(LaplaceError::InvalidInput(format!(
            "dimension {dim} is not a multiple of the block size {}",
            spec.block_dim
        )));
    }
    // Ray directions: the generators of every subcone plus their mean.
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for c in &spec.subcones {
        if c.dim != dim {
            return Err(LaplaceError::DimensionMismatch { expected: dim, got: c.dim });
        }
        let gens = c.generators();
        if gens.is_empty() {
            return Err(LaplaceError::InvalidInput(
                "subcones must be given by generators for ray sampling".into(),
            ));
        }
        let mut mean = vec![0.0; dim];
        for g in gens {
            let n = sup_norm(g);
            if n == 0.0 {
                continue;
            }
            let unit: Vec<f64> = g.iter().map(|x| x / n).collect();
            for (m, u) in mean.iter_mut().zip(&unit) {
                *m += u;
            }
            dirs.push(unit);
        }
        if sup_norm(&mean) > 0.0 {
            dirs.push(mean);
        }
    }

    // Log-spaced ray parameters.
    let lt = linspace(spec.t_min.ln(), spec.t_max.ln(), spec.t_points.max(2));
    let x_radius = spec.radius.unwrap_or(spec.x_radius);
    let x_axis = linspace(-x_radius, x_radius, spec.x_points.max(2));
    let x_grid = crate::util::grid_product(&vec![x_axis; dim]);

    let mut best = f64::NEG_INFINITY;
    // Levels restrict the smallest sampled t to t_min^(1/2), ^(3/4), ^1.
    let level_fracs = [0.5, 0.75, 1.0];
    let mut level_best = [f64::NEG_INFINITY; 3];
    let mut level_mins = [f64::INFINITY; 3];
    for dir in &dirs {
        for &l in &lt {
            let t = l.exp();
            let y: Vec<f64> = dir.iter().map(|d| d * t).collect();
            let mut weight_y = 0.0;
            for block in y.chunks(spec.block_dim) {
                let ny = l2_norm(block);
                if ny <= 0.0 {
                    weight_y = f64::NEG_INFINITY;
                    break;
                }
                weight_y -= spec.epsilon * ny.powf(-1.0 / (beta - 1.0));
            }
            if weight_y == f64::NEG_INFINITY {
                continue;
            }
            for x in &x_grid {
                let z: Vec<Complex64> =
                    x.iter().zip(&y).map(|(&a, &b)| Complex64::new(a, b)).collect();
                let mut log_weight = weight_y;
                if alpha > 0.0 {
                    for block in z.chunks(spec.block_dim) {
                        let nz = block.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                        log_weight -= spec.epsilon * nz.powf(1.0 / alpha);
                    }
                }
                let value = v(&z).norm();
                if value == 0.0 {
                    continue;
                }
                let term = value.ln() + log_weight;
                best = best.max(term);
                for (i, frac) in level_fracs.iter().enumerate() {
                    let cutoff = spec.t_min.powf(*frac);
                    if t >= cutoff {
                        level_best[i] = level_best[i].max(term);
                        level_mins[i] = level_mins[i].min(t);
                    }
                }
            }
        }
    }
    let levels: Vec<(f64, f64)> =
        level_mins.iter().zip(&level_best).map(|(&m, &b)| (m, b)).collect();
    let growth = |a: f64, b: f64| b - a;
    let diverges = levels.len() == 3
        && growth(levels[0].1, levels[1].1) > std::f64::consts::LN_2
        && growth(levels[1].1, levels[2].1) > std::f64::consts::LN_2;
    Ok(ANorm {
        epsilon: spec.epsilon,
        radius: spec.radius,
        log_value: best,
        value: best.exp(),
        levels,
        diverges,
    })
}

/// The reflected-kernel transform of the reconstruction pipeline:
///
/// ```text
///   (2π)^{-dn} ∫_{time ≤ 0} f(ξ) exp[Σ_j (p_j⁰ξ_j⁰ − i p⃗_j·ξ⃗_j)] dξ,
/// ```
///
/// with coordinates grouped as `n` blocks of `d` (time component first in
/// each block). Requires every time component of `p` positive and `f`
/// supported in the time-negative region.
pub fn check_transform(
    f: &TestFunction,
    p: &[f64],
    d: usize,
) -> Result<Complex64, LaplaceError> {
    let dn = f.dim();
    if p.len() != dn {
        return Err(LaplaceError::DimensionMismatch { expected: dn, got: p.len() });
    }
    if f.support().is_none() {
        return Err(LaplaceError::InvalidInput(
            "the transform needs f supported in the time-negative region".into(),
        ));
    }
    // Sampled support check: a positive time component must kill f.
    if d == 0 || dn % d != 0 {
        return Err(LaplaceError::InvalidInput(format!(
            "dimension {dn} is not a multiple of the block size {d}"
        )));
    }
    for j in 0..dn / d {
        let mut probe = vec![-1.0; dn];
        probe[j * d] = 0.5;
        if f.eval_real(&probe).norm() != 0.0 {
            return Err(LaplaceError::InvalidInput(format!(
                "f does not vanish for positive time component {}",
                j + 1
            )));
        }
    }
    check_transform_with(|xi| f.eval_real(xi), dn, d, p)
}

/// [`check_transform`] for an arbitrary weight in place of a test function.
/// The caller is responsible for the weight vanishing on positive time
/// components and decaying fast enough for the half-line quadratures; only
/// the kernel-side preconditions (block shape, positive time components of
/// `p`) are validated here.
pub fn check_transform_with<F>(
    weight: F,
    dn: usize,
    d: usize,
    p: &[f64],
) -> Result<Complex64, LaplaceError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if p.len() != dn {
        return Err(LaplaceError::DimensionMismatch { expected: dn, got: p.len() });
    }
    if d == 0 || dn % d != 0 {
        return Err(LaplaceError::InvalidInput(format!(
            "dimension {dn} is not a multiple of the block size {d}"
        )));
    }
    let n = dn / d;
    for j in 0..n {
        if !(p[j * d] > 0.0) {
            return Err(LaplaceError::InvalidInput(format!(
                "time component {} of p must be positive, got {}",
                j + 1,
                p[j * d]
            )));
        }
    }
    let axes: Vec<Axis> = (0..dn)
        .map(|c| if c % d == 0 { Axis::ToMinusInf(0.0) } else { Axis::Real })
        .collect();
    let r = integrate_axes(
        |xi: &[f64]| {
            let value = weight(xi);
            if value.norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut exponent = Complex64::new(0.0, 0.0);
            for j in 0..n {
                exponent += Complex64::new(p[j * d] * xi[j * d], 0.0);
                for c in 1..d {
                    exponent -= Complex64::new(0.0, p[j * d + c] * xi[j * d + c]);
                }
            }
            value * exponent.exp()
        },
        &axes,
        DENSITY_TOL,
    );
    if !r.converged {
        return Err(LaplaceError::Numerical(
            "reflected-kernel quadrature did not converge".into(),
        ));
    }
    let norm = (2.0 * std::f64::consts::PI).powi(dn as i32);
    Ok(r.value / norm)
}

/// Largest finite-difference residual of the Cauchy–Riemann equations,
/// `max_j |∂v/∂x_j + i·∂v/∂y_j| / 2`, at a point.
pub fn cauchy_riemann_residual<V>(v: &V, z: &[Complex64], h: f64) -> f64
where
    V: Fn(&[Complex64]) -> Complex64,
{
    let mut worst = 0.0f64;
    for j in 0..z.len() {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[j] += Complex64::new(h, 0.0);
        zm[j] -= Complex64::new(h, 0.0);
        let dx = (v(&zp) - v(&zm)) / (2.0 * h);
        zp[j] = z[j] + Complex64::new(0.0, h);
        zm[j] = z[j] - Complex64::new(0.0, h);
        let dy = (v(&zp) - v(&zm)) / (2.0 * h);
        worst = worst.max(((dx + Complex64::i() * dy) * 0.5).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half_line() -> Cone {
        Cone::from_generators(1, &[vec![1.0]]).unwrap()
    }

    fn exp_density() -> Functional {
        let tf = TestFunction::from_exprs(1, "1", "-w1").unwrap();
        Functional::density(tf, half_line()).unwrap()
    }

    fn tube_point(x: f64, y: f64) -> TubePoint {
        TubePoint::new(vec![x], vec![y], half_line()).unwrap()
    }

    /// ∫₀^∞ e^{-p} e^{ipz} dp = 1/(1 - iz) on the upper half-plane.
    fn closed_form(z: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - Complex64::i() * z).inv()
    }

    #[test]
    fn point_mass_transform_is_the_kernel() {
        let u = Functional::delta(vec![2.0, 0.5], Cone::orthant(2)).unwrap();
        let z = TubePoint::new(vec![0.3, -0.4], vec![1.0, 2.0], Cone::orthant(2)).unwrap();
        let got = laplace_transform(&u, &z, PairingForm::Standard).unwrap();
        let zc = z.z();
        let expected = (Complex64::i() * (zc[0] * 2.0 + zc[1] * 0.5)).exp();
        assert_relative_eq!(got.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, expected.im, max_relative = 1e-14);
    }

    #[test]
    fn exponential_density_matches_closed_form() {
        let u = exp_density();
        for (x, y) in [(0.0, 0.5), (1.3, 0.2), (-2.0, 1.5), (0.7, 3.0)] {
            let z = tube_point(x, y);
            let got = laplace_transform(&u, &z, PairingForm::Standard).unwrap();
            let want = closed_form(Complex64::new(x, y));
            assert!(
                (got - want).norm() <= 1e-8 * want.norm(),
                "at {x}+{y}i: {got} vs {want}"
            );
        }
    }

    #[test]
    fn derivative_point_mass_matches_finite_differences() {
        let carrier = half_line();
        let z = TubePoint::new(vec![0.4], vec![0.9], half_line()).unwrap();
        let p = 1.0;
        let u = Functional::new(
            1,
            vec![Atom {
                kind: AtomKind::DerivativePointMass {
                    location: vec![p],
                    direction: vec![1.0],
                },
                carrier: carrier.clone(),
            }],
        )
        .unwrap();
        let got = laplace_transform(&u, &z, PairingForm::Standard).unwrap();
        // i·z·e^{ipz} directly.
        let zc = z.z()[0];
        let want = Complex64::i() * zc * (Complex64::i() * zc * p).exp();
        assert!((got - want).norm() < 1e-12 * want.norm());
        // Independent route: centered difference of point-mass transforms
        // in the mass location.
        let h = 1e-5;
        let plus = Functional::delta(vec![p + h], carrier.clone()).unwrap();
        let minus = Functional::delta(vec![p - h], carrier).unwrap();
        let fd = (laplace_transform(&plus, &z, PairingForm::Standard).unwrap()
            - laplace_transform(&minus, &z, PairingForm::Standard).unwrap())
            / (2.0 * h);
        assert!((got - fd).norm() < 1e-6, "analytic {got} vs difference {fd}");
    }

    #[test]
    fn pairing_sign_flips_with_the_form() {
        let u = Functional::delta(vec![1.0], Cone::full_space(1)).unwrap();
        let z = TubePoint::new(vec![0.0], vec![0.3], half_line()).unwrap();
        let std = laplace_transform(&u, &z, PairingForm::Standard).unwrap();
        // Reflected pairing at location p needs −⟨p,y⟩ ≥ 0, i.e. y ≤ 0 here.
        let z2 = TubePoint::new(vec![0.0], vec![-0.3], half_line().negated()).unwrap();
        let refl = laplace_transform(&u, &z2, PairingForm::Reflected).unwrap();
        assert!((std - refl).norm() < 1e-14);
    }

    #[test]
    fn tube_violations_are_rejected() {
        // Point mass where the kernel grows: ⟨p, y⟩ < 0.
        let u = Functional::delta(vec![1.0], Cone::full_space(1)).unwrap();
        let z = TubePoint::new(vec![0.0], vec![-0.5], half_line().negated()).unwrap();
        assert!(matches!(
            laplace_transform(&u, &z, PairingForm::Standard),
            Err(LaplaceError::TubeViolation(_))
        ));
        // Density carrier direction with growing kernel.
        let u = exp_density();
        let z = TubePoint::new(vec![0.0], vec![-0.5], half_line().negated()).unwrap();
        assert!(matches!(
            laplace_transform(&u, &z, PairingForm::Standard),
            Err(LaplaceError::TubeViolation(_))
        ));
        // Interiority is enforced at construction.
        assert!(matches!(
            TubePoint::new(vec![0.0], vec![0.0], half_line()),
            Err(LaplaceError::TubeViolation(_))
        ));
    }

    #[test]
    fn functional_invariants_are_checked() {
        // Point mass outside its carrier.
        assert!(matches!(
            Functional::delta(vec![-1.0], half_line()),
            Err(LaplaceError::InvalidInput(_))
        ));
        // Entire density on a non-product carrier.
        let lc = Cone::forward_light_cone(2, 0).unwrap();
        let tf = TestFunction::from_exprs(2, "1", "-w1^2 - w2^2").unwrap();
        let u = Functional::density(tf, lc).unwrap();
        let z = TubePoint::new(vec![0.0, 0.0], vec![1.0, 0.0], Cone::halfspace(2, 0).unwrap())
            .unwrap();
        assert!(matches!(
            laplace_transform(&u, &z, PairingForm::Standard),
            Err(LaplaceError::InvalidInput(_))
        ));
        // Restricted density support escaping the carrier.
        let tf = TestFunction::from_exprs(1, "1", "-w1^2")
            .unwrap()
            .with_support(Cone::halfspace(1, 0).unwrap().negated(), -1.0)
            .unwrap();
        assert!(matches!(
            Functional::density(tf, half_line()),
            Err(LaplaceError::InvalidInput(_))
        ));
    }

    #[test]
    fn transforms_satisfy_cauchy_riemann() {
        let u = exp_density();
        let delta = Functional::delta(vec![1.5], half_line()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let x = rng.gen_range(-3.0..3.0);
            let y = rng.gen_range(0.2..2.5);
            let z = [Complex64::new(x, y)];
            let density_eval =
                |w: &[Complex64]| match atom_transform(&u.atoms[0], w, PairingForm::Standard) {
                    Ok(v) => v,
                    Err(_) => Complex64::new(f64::NAN, 0.0),
                };
            let delta_eval = |w: &[Complex64]| {
                atom_transform(&delta.atoms[0], w, PairingForm::Standard).unwrap()
            };
            assert!(cauchy_riemann_residual(&density_eval, &z, 1e-4) < 1e-6);
            assert!(cauchy_riemann_residual(&delta_eval, &z, 1e-4) < 1e-6);
        }
    }

    #[test]
    fn boundary_values_converge_for_the_exponential_density() {
        let u = exp_density();
        let f = TestFunction::from_exprs(1, "1", "-w1^2").unwrap();
        let ys: Vec<Vec<f64>> =
            [1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3].iter().map(|&t| vec![t]).collect();
        let report = boundary_value_check(&u, &f, &ys, PairingForm::Standard).unwrap();
        // Frozen 50-digit value of ∫₀^∞ e^{-p}·√π·e^{-p²/4} dp.
        let rhs = report.rows[0].rhs[0];
        assert_relative_eq!(rhs, 1.3432934216467351704, max_relative = 1e-8);
        assert!(report.tail_monotone);
        assert!(report.final_gap < 1e-2);
        assert!(report.rows[0].gap > report.final_gap);
    }

    #[test]
    fn boundary_gap_vanishes_identically_for_delta_at_zero() {
        let u = Functional::delta(vec![0.0], half_line()).unwrap();
        let f = TestFunction::from_exprs(1, "1", "-w1^2").unwrap();
        let ys: Vec<Vec<f64>> = [0.5, 0.1, 0.01].iter().map(|&t| vec![t]).collect();
        let report = boundary_value_check(&u, &f, &ys, PairingForm::Standard).unwrap();
        for row in &report.rows {
            assert!(row.gap < 1e-10, "gap {} at y {:?}", row.gap, row.y);
        }
    }

    #[test]
    fn boundary_gap_shrinks_linearly_for_shifted_delta() {
        let p = 2.0;
        let u = Functional::delta(vec![p], half_line()).unwrap();
        let f = TestFunction::from_exprs(1, "1", "-w1^2").unwrap();
        let ys: Vec<Vec<f64>> = [0.2, 0.1, 0.05, 0.025].iter().map(|&t| vec![t]).collect();
        let report = boundary_value_check(&u, &f, &ys, PairingForm::Standard).unwrap();
        // Closed form: gap = |e^{-p·y} − 1| · |f̂(p)| with f̂(p) = √π e^{-p²/4}.
        let fhat = std::f64::consts::PI.sqrt() * (-p * p / 4.0).exp();
        for row in &report.rows {
            let want = (1.0 - (-p * row.y[0]).exp()).abs() * fhat;
            assert_relative_eq!(row.gap, want, max_relative = 1e-5);
        }
        // Halving y roughly halves the gap.
        let ratio = report.rows[2].gap / report.rows[3].gap;
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn constant_function_has_bounded_growth_norm() {
        let spec = ANormSpec::new(0.5, 1, vec![half_line()]);
        let norm = a_norm(|_| Complex64::new(1.0, 0.0), &spec, 0.5, 2.0).unwrap();
        assert!(norm.value <= 1.0 + 1e-12);
        assert!(!norm.diverges);
    }

    #[test]
    fn exponential_density_transform_has_stable_growth_norm() {
        let spec = ANormSpec::new(0.5, 1, vec![half_line()]);
        let norm = a_norm(|z| closed_form(z[0]), &spec, 0.5, 2.0).unwrap();
        assert!(norm.value.is_finite());
        assert!(!norm.diverges, "levels {:?}", norm.levels);
    }

    #[test]
    fn boundary_blowup_is_flagged() {
        // Grows toward the boundary faster than the weight can damp:
        // |v| = exp(2ε/|y|) against weight exp(−ε/|y|) at β = 2.
        let spec = ANormSpec::new(0.5, 1, vec![half_line()]);
        let norm = a_norm(
            |z| Complex64::new((2.0 * 0.5 / z[0].im.abs()).exp(), 0.0),
            &spec,
            0.5,
            2.0,
        )
        .unwrap();
        assert!(norm.diverges, "levels {:?}", norm.levels);
    }

    #[test]
    fn growth_norm_is_monotone_in_subcones() {
        let inner = Cone::from_generators(1, &[vec![1.0]]).unwrap();
        let spec_small = ANormSpec::new(0.5, 1, vec![inner.clone()]);
        let both = vec![inner, Cone::from_generators(1, &[vec![0.5]]).unwrap()];
        let spec_large = ANormSpec::new(0.5, 1, both);
        let v = |z: &[Complex64]| closed_form(z[0]);
        let small = a_norm(v, &spec_small, 0.5, 2.0).unwrap();
        let large = a_norm(v, &spec_large, 0.5, 2.0).unwrap();
        assert!(large.log_value >= small.log_value - 1e-12);
    }

    #[test]
    fn growth_norm_envelope_bounds_the_transform_pointwise() {
        let spec = ANormSpec::new(0.5, 1, vec![half_line()]);
        let norm = a_norm(|z| closed_form(z[0]), &spec, 0.5, 2.0).unwrap();
        // Fresh ray points between grid nodes must respect the envelope
        // |v(z)| ≤ value · exp(+ε|z|^{1/α} + ε|y|^{−1/(β−1)}) with slack.
        for &t in &[0.0137, 0.19, 0.77, 1.31] {
            let z = Complex64::new(0.0, t);
            let envelope =
                norm.value * (0.5 * z.norm().powf(2.0) + 0.5 * t.powf(-1.0)).exp();
            assert!(
                closed_form(z).norm() <= envelope * 1.1,
                "envelope violated at t = {t}"
            );
        }
    }

    #[test]
    fn reflected_kernel_matches_frozen_oracle() {
        // d = 1, n = 1 exemplar: f(ξ) = exp(1/ξ − ξ²) for ξ < 0, p = 1;
        // 50-digit reference for (2π)^{-1}∫ f(ξ)e^{ξ}dξ.
        let f = TestFunction::from_exprs(1, "1", "-w1^2")
            .unwrap()
            .with_support(Cone::halfspace(1, 0).unwrap().negated(), -1.0)
            .unwrap();
        let got = check_transform(&f, &[1.0], 1).unwrap();
        assert_relative_eq!(got.re, 0.0097074455932458431935, max_relative = 1e-8);
        assert!(got.im.abs() < 1e-15);
    }

    #[test]
    fn reflected_kernel_is_linear() {
        // (2 − ½w²)e^{-w²} = 2·e^{-w²} − ½·w²e^{-w²}: transform the
        // combination directly and as a weighted sum of the pieces.
        let region = Cone::halfspace(1, 0).unwrap().negated();
        let restricted = |poly: &str, expo: &str| {
            TestFunction::from_exprs(1, poly, expo)
                .unwrap()
                .with_support(region.clone(), -1.0)
                .unwrap()
        };
        let f = restricted("1", "-w1^2");
        let g = restricted("w1^2", "-w1^2");
        let combined = restricted("2 - 0.5w1^2", "-w1^2");
        let direct = check_transform(&combined, &[1.2], 1).unwrap();
        let sum = check_transform(&f, &[1.2], 1).unwrap() * 2.0
            + check_transform(&g, &[1.2], 1).unwrap() * (-0.5);
        assert!((direct - sum).norm() < 1e-10, "direct {direct} vs sum {sum}");
    }

    #[test]
    fn reflected_kernel_factorizes_over_tensor_products() {
        // d = 1, n = 2: the flat support factor sums per face, so the 2-D
        // restricted Gaussian is exactly the product of two 1-D ones.
        let f2 = TestFunction::from_exprs(2, "1", "-w1^2 - w2^2")
            .unwrap()
            .with_support(Cone::orthant(2).negated(), -1.0)
            .unwrap();
        let f1 = TestFunction::from_exprs(1, "1", "-w1^2")
            .unwrap()
            .with_support(Cone::halfspace(1, 0).unwrap().negated(), -1.0)
            .unwrap();
        let p = [1.0, 1.3];
        let joint = check_transform(&f2, &p, 1).unwrap();
        let left = check_transform(&f1, &[p[0]], 1).unwrap();
        let right = check_transform(&f1, &[p[1]], 1).unwrap();
        let product = left * right;
        assert!(
            (joint - product).norm() <= 1e-8 * product.norm(),
            "joint {joint} vs product {product}"
        );
    }

    #[test]
    fn reflected_kernel_rejects_bad_input() {
        let f = TestFunction::from_exprs(1, "1", "-w1^2")
            .unwrap()
            .with_support(Cone::halfspace(1, 0).unwrap().negated(), -1.0)
            .unwrap();
        assert!(matches!(
            check_transform(&f, &[-1.0], 1),
            Err(LaplaceError::InvalidInput(_))
        ));
        let entire = TestFunction::from_exprs(1, "1", "-w1^2").unwrap();
        assert!(matches!(
            check_transform(&entire, &[1.0], 1),
            Err(LaplaceError::InvalidInput(_))
        ));
    }

    #[test]
    fn reflected_kernel_space_components_oscillate() {
        // d = 2, n = 1: one time and one space coordinate; the space
        // component enters through a phase, so the modulus at ±p⃗ agrees
        // while the values conjugate.
        let f = TestFunction::from_exprs(2, "1", "-w1^2 - w2^2")
            .unwrap()
            .with_support(Cone::halfspace(2, 0).unwrap().negated(), -1.0)
            .unwrap();
        let plus = check_transform(&f, &[1.0, 0.7], 2).unwrap();
        let minus = check_transform(&f, &[1.0, -0.7], 2).unwrap();
        assert!((plus - minus.conj()).norm() < 1e-12);
        assert!(plus.im.abs() > 1e-12 || plus.re.abs() > 1e-12);
    }
}
