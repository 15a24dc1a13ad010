//! Polyhedral cone geometry under the sup norm.
//!
//! Cones here are finite unions of polyhedral pieces in `R^k`, each piece
//! described by generators (conic hull), by inward half-space normals, or by
//! both. They are the geometric substrate for carrier statements and for
//! the weighted norms elsewhere in the crate:
//!
//! - **distance** `δ_U(p) = inf_{p'∈U} |p − p'|` in the sup norm, computed
//!   exactly by a small linear program ([`Cone::distance`]);
//! - **duality** under a nondegenerate symmetric pairing
//!   ([`Cone::dual_under`]): a generator of the cone maps to a half-space
//!   normal of the dual, and a half-space normal maps to a generator via the
//!   inverse form, so double duals recover generator sets exactly — no
//!   double-description machinery is needed;
//! - **compact containment** `U ⋐ V` (the closure of `U` minus the origin
//!   lies in the interior of `V`), certified through interior margins of
//!   normalized generators ([`compact_containment`]);
//! - **interior depth** [`Cone::distance_to_complement`], the sup-norm
//!   distance to the complement — the quantity that weights membership in
//!   the cone-adapted norms;
//! - **algebra**: products, intersections (half-space forms), unions
//!   (stored as multiple pieces), and pointwise negation.
//!
//! The sup norm is used throughout; with it, every distance query is a
//! linear program (see [`simplex`]) and polyhedral answers are exact to
//! solver tolerance (`~1e-11`).
//!
//! Light cones: the planar one `{p : p⁰ ≥ |p¹|}` is exactly polyhedral; in
//! three dimensions the spherical section is approximated by a regular
//! `N`-gon (error `O(N⁻²)`); in four, by a Fibonacci-sphere generator cloud
//! with no half-space form.

pub mod parse;
pub mod simplex;

use crate::util::{l1_norm, sup_norm};
use simplex::{Constraint, Lp, LpError, Rel};
use thiserror::Error;

/// Errors from cone construction and queries.
#[derive(Debug, Error)]
pub enum ConeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed cone: {0}")]
    Malformed(String),
    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

// ───────────────────────────── pairing forms ─────────────────────────────

/// A nondegenerate symmetric bilinear form `⟨p, x⟩ = pᵀ M x` on `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingForm {
    pub dim: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl PairingForm {
    /// The standard Euclidean pairing (`M = I`).
    pub fn euclidean(dim: usize) -> Self {
        let mut matrix = vec![vec![0.0; dim]; dim];
        for (j, row) in matrix.iter_mut().enumerate() {
            row[j] = 1.0;
        }
        PairingForm { dim, matrix }
    }

    /// The Minkowski pairing `diag(1, -1, …, -1)` (time component first).
    pub fn minkowski(dim: usize) -> Self {
        let mut form = PairingForm::euclidean(dim);
        for j in 1..dim {
            form.matrix[j][j] = -1.0;
        }
        form
    }

    /// The same form with the overall sign flipped.
    pub fn negated(mut self) -> Self {
        for row in &mut self.matrix {
            for v in row {
                *v = -*v;
            }
        }
        self
    }

    /// Evaluate `⟨p, x⟩`.
    pub fn apply(&self, p: &[f64], x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                acc += p[i] * m * x[j];
            }
        }
        acc
    }

    /// The image `M g` of a vector under the form matrix.
    pub fn image(&self, g: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(g).map(|(m, v)| m * v).sum())
            .collect()
    }

    /// The image `M⁻¹ n` under the inverse form matrix.
    pub fn preimage(&self, n: &[f64]) -> Result<Vec<f64>, ConeError> {
        let inv = invert(&self.matrix)
            .ok_or_else(|| ConeError::Malformed("pairing form is degenerate".into()))?;
        Ok(inv
            .iter()
            .map(|row| row.iter().zip(n).map(|(m, v)| m * v).sum())
            .collect())
    }
}

/// Dense Gauss–Jordan inverse for the tiny form matrices used here.
fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().cloned().collect();
    let mut inv = vec![vec![0.0; n]; n];
    for (j, row) in inv.iter_mut().enumerate() {
        row[j] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for v in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *v /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

// ─────────────────────────────── the cones ───────────────────────────────

/// One polyhedral piece: the conic hull of `generators`, the intersection
/// of the half-spaces `{p : n·p ≥ 0}`, or — when both are present — the
/// intersection of the two descriptions (builders keep them consistent).
#[derive(Debug, Clone, PartialEq)]
pub struct ConePiece {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
    pub halfspaces: Vec<Vec<f64>>,
}

/// A finite union of polyhedral cones in `R^k`, closed under positive
/// scaling and containing the origin. Ordinary cones have one piece.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    pub dim: usize,
    pub pieces: Vec<ConePiece>,
    /// Marks cones meant as open (interiors); metadata used by containment
    /// and Σ-domain bookkeeping, not by the distance queries (which always
    /// see the closure).
    pub open_projection: bool,
}

impl Cone {
    // ── constructors ──

    /// Conic hull of the given nonzero generators.
    pub fn from_generators(dim: usize, gens: &[Vec<f64>]) -> Result<Self, ConeError> {
        for g in gens {
            if g.len() != dim {
                return Err(ConeError::DimensionMismatch { expected: dim, got: g.len() });
            }
            if sup_norm(g) == 0.0 {
                return Err(ConeError::Malformed("zero generator".into()));
            }
        }
        Ok(Cone {
            dim,
            pieces: vec![ConePiece { dim, generators: gens.to_vec(), halfspaces: Vec::new() }],
            open_projection: false,
        })
    }

    /// Intersection of half-spaces `{p : n_i · p ≥ 0}` with inward normals.
    pub fn from_halfspaces(dim: usize, normals: &[Vec<f64>]) -> Result<Self, ConeError> {
        for n in normals {
            if n.len() != dim {
                return Err(ConeError::DimensionMismatch { expected: dim, got: n.len() });
            }
            if sup_norm(n) == 0.0 {
                return Err(ConeError::Malformed("zero half-space normal".into()));
            }
        }
        Ok(Cone {
            dim,
            pieces: vec![ConePiece { dim, generators: Vec::new(), halfspaces: normals.to_vec() }],
            open_projection: false,
        })
    }

    /// Both descriptions at once (builders that know the pair use this).
    pub fn from_both(
        dim: usize,
        gens: &[Vec<f64>],
        normals: &[Vec<f64>],
    ) -> Result<Self, ConeError> {
        let mut c = Cone::from_generators(dim, gens)?;
        let h = Cone::from_halfspaces(dim, normals)?;
        c.pieces[0].halfspaces = h.pieces[0].halfspaces.clone();
        Ok(c)
    }

    /// The degenerate cone `{0}` in `R^k`.
    pub fn origin(dim: usize) -> Self {
        let mut normals = Vec::new();
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            normals.push(e.clone());
            e[j] = -1.0;
            normals.push(e);
        }
        Cone {
            dim,
            pieces: vec![ConePiece { dim, generators: Vec::new(), halfspaces: normals }],
            open_projection: false,
        }
    }

    /// The nonnegative orthant `R̄₊^k` (self-described by the basis both ways).
    pub fn orthant(dim: usize) -> Self {
        let basis: Vec<Vec<f64>> = (0..dim)
            .map(|j| {
                let mut e = vec![0.0; dim];
                e[j] = 1.0;
                e
            })
            .collect();
        Cone::from_both(dim, &basis, &basis).expect("orthant data is well-formed")
    }

    /// All of `R^k` (generated by the signed basis; no half-space cuts).
    pub fn full_space(dim: usize) -> Self {
        let mut gens = Vec::new();
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            gens.push(e.clone());
            e[j] = -1.0;
            gens.push(e);
        }
        Cone::from_generators(dim, &gens).expect("basis generators are well-formed")
    }

    /// The half-space `{p ∈ R^k : p_axis ≥ 0}` as a polyhedral cone
    /// (for example `R × R̄₊` for `dim = 2, axis = 1`).
    pub fn halfspace(dim: usize, axis: usize) -> Result<Self, ConeError> {
        if axis >= dim {
            return Err(ConeError::Malformed(format!("axis {axis} out of range for dim {dim}")));
        }
        let mut gens = Vec::new();
        for j in 0..dim {
            let mut e = vec![0.0; dim];
            e[j] = 1.0;
            gens.push(e.clone());
            if j != axis {
                e[j] = -1.0;
                gens.push(e);
            }
        }
        let mut n = vec![0.0; dim];
        n[axis] = 1.0;
        Cone::from_both(dim, &gens, &[n])
    }

    /// The closed forward light cone `{p : p⁰ ≥ |p⃗|₂}` (time component
    /// first). Exact for `dim = 2`; a regular `facets`-gon approximation of
    /// the spherical section for `dim = 3`; a Fibonacci generator cloud
    /// (no half-space form) for `dim = 4`.
    pub fn forward_light_cone(dim: usize, facets: usize) -> Result<Self, ConeError> {
        match dim {
            2 => Cone::from_both(
                2,
                &[vec![1.0, 1.0], vec![1.0, -1.0]],
                &[vec![1.0, -1.0], vec![1.0, 1.0]],
            ),
            3 => {
                if facets < 3 {
                    return Err(ConeError::Malformed("need at least 3 facets".into()));
                }
                let gens: Vec<Vec<f64>> = (0..facets)
                    .map(|j| {
                        let th = 2.0 * std::f64::consts::PI * j as f64 / facets as f64;
                        vec![1.0, th.cos(), th.sin()]
                    })
                    .collect();
                let mut normals = Vec::with_capacity(facets);
                for j in 0..facets {
                    let a = &gens[j];
                    let b = &gens[(j + 1) % facets];
                    // Inward normal of the face spanned by adjacent generators.
                    let mut n = vec![
                        a[1] * b[2] - a[2] * b[1],
                        a[2] * b[0] - a[0] * b[2],
                        a[0] * b[1] - a[1] * b[0],
                    ];
                    if n[0] < 0.0 {
                        for v in &mut n {
                            *v = -*v;
                        }
                    }
                    normals.push(n);
                }
                Cone::from_both(3, &gens, &normals)
            }
            4 => {
                if facets < 4 {
                    return Err(ConeError::Malformed("need at least 4 generators".into()));
                }
                // Golden-angle spiral on S²: near-uniform spatial directions.
                let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
                let gens: Vec<Vec<f64>> = (0..facets)
                    .map(|i| {
                        let z = 1.0 - 2.0 * (i as f64 + 0.5) / facets as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let th = golden * i as f64;
                        vec![1.0, r * th.cos(), r * th.sin(), z]
                    })
                    .collect();
                Cone::from_generators(4, &gens)
            }
            d => Err(ConeError::Malformed(format!("light cone not provided in dimension {d}"))),
        }
    }

    /// The pointwise negation `-C`.
    pub fn negated(&self) -> Self {
        let neg = |vs: &[Vec<f64>]| -> Vec<Vec<f64>> {
            vs.iter().map(|v| v.iter().map(|x| -x).collect()).collect()
        };
        Cone {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| ConePiece {
                    dim: p.dim,
                    generators: neg(&p.generators),
                    halfspaces: neg(&p.halfspaces),
                })
                .collect(),
            open_projection: self.open_projection,
        }
    }

    /// Mark the cone as an open projection (metadata; see the type docs).
    pub fn open(mut self) -> Self {
        self.open_projection = true;
        self
    }

    // ── algebra ──

    /// The product cone `A × B ⊂ R^{k_A + k_B}`.
    pub fn product(&self, other: &Cone) -> Result<Cone, ConeError> {
        if self.pieces.len() != 1 || other.pieces.len() != 1 {
            return Err(ConeError::UnsupportedRepresentation(
                "product of union cones is not supported".into(),
            ));
        }
        let (a, b) = (&self.pieces[0], &other.pieces[0]);
        let dim = self.dim + other.dim;
        let embed_left = |v: &[f64]| {
            let mut w = v.to_vec();
            w.extend(std::iter::repeat(0.0).take(other.dim));
            w
        };
        let embed_right = |v: &[f64]| {
            let mut w = vec![0.0; self.dim];
            w.extend_from_slice(v);
            w
        };
        // A product needs both factors in a common representation: use
        // whichever both sides have; keep both when possible.
        let both_have_gens = !a.generators.is_empty() && !b.generators.is_empty();
        let both_have_halfspaces = !a.halfspaces.is_empty() && !b.halfspaces.is_empty();
        let a_origin_like = a.generators.is_empty() && !a.halfspaces.is_empty();
        let b_origin_like = b.generators.is_empty() && !b.halfspaces.is_empty();
        if !both_have_gens && !both_have_halfspaces && !(a_origin_like || b_origin_like) {
            return Err(ConeError::UnsupportedRepresentation(
                "product factors lack a common representation".into(),
            ));
        }
        let mut generators = Vec::new();
        if both_have_gens {
            generators.extend(a.generators.iter().map(|g| embed_left(g)));
            generators.extend(b.generators.iter().map(|g| embed_right(g)));
        }
        let mut halfspaces = Vec::new();
        if both_have_halfspaces || a_origin_like || b_origin_like {
            halfspaces.extend(a.halfspaces.iter().map(|n| embed_left(n)));
            halfspaces.extend(b.halfspaces.iter().map(|n| embed_right(n)));
        }
        Ok(Cone {
            dim,
            pieces: vec![ConePiece { dim, generators, halfspaces }],
            open_projection: self.open_projection && other.open_projection,
        })
    }

    /// `n`-fold product of the cone with itself.
    pub fn power(&self, n: usize) -> Result<Cone, ConeError> {
        assert!(n >= 1, "power needs n ≥ 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// Intersection; exact for half-space forms (normals are pooled).
    pub fn intersection(&self, other: &Cone) -> Result<Cone, ConeError> {
        if self.dim != other.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.pieces.len() != 1 || other.pieces.len() != 1 {
            return Err(ConeError::UnsupportedRepresentation(
                "intersection of union cones is not supported".into(),
            ));
        }
        let (a, b) = (&self.pieces[0], &other.pieces[0]);
        if a.halfspaces.is_empty() || b.halfspaces.is_empty() {
            return Err(ConeError::UnsupportedRepresentation(
                "intersection needs half-space forms on both sides".into(),
            ));
        }
        let mut halfspaces = a.halfspaces.clone();
        halfspaces.extend(b.halfspaces.iter().cloned());
        Ok(Cone {
            dim: self.dim,
            pieces: vec![ConePiece { dim: self.dim, generators: Vec::new(), halfspaces }],
            open_projection: false,
        })
    }

    /// Set-level union, stored as the concatenated piece list.
    pub fn union(&self, other: &Cone) -> Result<Cone, ConeError> {
        if self.dim != other.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Ok(Cone { dim: self.dim, pieces, open_projection: false })
    }

    // ── duality ──

    /// Dual under the Euclidean pairing; see [`Cone::dual_under`].
    pub fn dual(&self) -> Cone {
        self.dual_under(&PairingForm::euclidean(self.dim))
            .expect("euclidean dual of a representable cone")
    }

    /// The dual cone `{p : ⟨p, y⟩ ≥ 0 for all y ∈ C}` under a nondegenerate
    /// symmetric pairing.
    ///
    /// Generators of `C` become half-space normals of the dual (their images
    /// under the form matrix); half-space normals of `C` become generators
    /// of the dual (their images under the inverse matrix). For a union the
    /// generator route applies to the pooled generators, because the dual of
    /// a union is the dual of its convex hull.
    pub fn dual_under(&self, form: &PairingForm) -> Result<Cone, ConeError> {
        if form.dim != self.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, got: form.dim });
        }
        let pooled: Vec<&Vec<f64>> = self.pieces.iter().flat_map(|p| p.generators.iter()).collect();
        let halfspaces: Vec<Vec<f64>> = pooled.iter().map(|g| form.image(g)).collect();
        let mut generators = Vec::new();
        if self.pieces.len() == 1 && !self.pieces[0].halfspaces.is_empty() {
            for n in &self.pieces[0].halfspaces {
                generators.push(form.preimage(n)?);
            }
        }
        if halfspaces.is_empty() && generators.is_empty() {
            return Err(ConeError::UnsupportedRepresentation(
                "dual needs generators or a single half-space piece".into(),
            ));
        }
        // The dual of the full space is {0}: representable, but only via
        // half-spaces that pin every coordinate; detect the empty normal
        // list case where the cone was given by half-spaces alone.
        if halfspaces.is_empty() {
            // dual given purely by generators (from C's half-space form)
            return Ok(Cone {
                dim: self.dim,
                pieces: vec![ConePiece { dim: self.dim, generators, halfspaces: Vec::new() }],
                open_projection: false,
            });
        }
        Ok(Cone {
            dim: self.dim,
            pieces: vec![ConePiece { dim: self.dim, generators, halfspaces }],
            open_projection: false,
        })
    }

    // ── queries ──

    fn check_dim(&self, p: &[f64]) -> Result<(), ConeError> {
        if p.len() != self.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(ConeError::Malformed("non-finite point".into()));
        }
        Ok(())
    }

    /// Sup-norm distance `δ_C(p)` from `p` to (the closure of) the cone,
    /// exact for polyhedral pieces via a linear program; a union takes the
    /// minimum over pieces.
    pub fn distance(&self, p: &[f64]) -> Result<f64, ConeError> {
        self.check_dim(p)?;
        let mut best = f64::INFINITY;
        for piece in &self.pieces {
            best = best.min(piece_distance(piece, p)?);
        }
        Ok(best)
    }

    /// Membership in the closure, decided as `distance ≤ 1e-9·(1 + |p|)`.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self.distance(p) {
            Ok(d) => d <= 1e-9 * (1.0 + sup_norm(p)),
            Err(_) => false,
        }
    }

    /// Sup-norm distance from `p` to the complement of the cone: zero
    /// outside the closure, and `min_i (n_i·p) / ‖n_i‖₁` over the
    /// half-space faces inside (the sup-norm distance to the nearest face
    /// plane). Requires a single piece with a half-space form.
    pub fn distance_to_complement(&self, p: &[f64]) -> Result<f64, ConeError> {
        self.check_dim(p)?;
        if self.pieces.len() != 1 || self.pieces[0].halfspaces.is_empty() {
            return Err(ConeError::UnsupportedRepresentation(
                "interior depth needs a single half-space piece".into(),
            ));
        }
        let mut depth = f64::INFINITY;
        for n in &self.pieces[0].halfspaces {
            let signed = crate::util::dot(n, p) / l1_norm(n);
            if signed <= 0.0 {
                return Ok(0.0);
            }
            depth = depth.min(signed);
        }
        Ok(depth)
    }

    /// True iff the cone is the degenerate `{0}`, probed by maximizing each
    /// signed coordinate over the cone's unit sup-ball section.
    pub fn is_degenerate(&self) -> bool {
        for piece in &self.pieces {
            for g in &piece.generators {
                // A piece with a nonzero generator that satisfies the
                // half-space form is nondegenerate.
                if piece.halfspaces.iter().all(|n| crate::util::dot(n, g) >= -1e-12) {
                    return false;
                }
            }
            if piece.generators.is_empty() {
                // Half-space-only piece: {0} iff no signed coordinate can be
                // pushed above zero within the unit box.
                for j in 0..self.dim {
                    for sign in [1.0, -1.0] {
                        let mut objective = vec![0.0; self.dim];
                        objective[j] = -sign; // maximize sign·p_j
                        let mut constraints: Vec<Constraint> = piece
                            .halfspaces
                            .iter()
                            .map(|n| Constraint { coeffs: n.clone(), rel: Rel::Ge, rhs: 0.0 })
                            .collect();
                        for jj in 0..self.dim {
                            let mut c = vec![0.0; self.dim];
                            c[jj] = 1.0;
                            constraints.push(Constraint { coeffs: c.clone(), rel: Rel::Le, rhs: 1.0 });
                            c[jj] = -1.0;
                            constraints.push(Constraint { coeffs: c, rel: Rel::Le, rhs: 1.0 });
                        }
                        let lp = Lp {
                            n_vars: self.dim,
                            objective,
                            constraints,
                            free: vec![true; self.dim],
                        };
                        if let Ok(s) = simplex::solve(&lp) {
                            if -s.value > 1e-9 {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Generators of the single piece (empty if none are stored).
    pub fn generators(&self) -> &[Vec<f64>] {
        &self.pieces[0].generators
    }

    /// Half-space normals of the single piece (empty if none are stored).
    pub fn halfspaces(&self) -> &[Vec<f64>] {
        &self.pieces[0].halfspaces
    }
}

/// Distance from `p` to one polyhedral piece: minimize `t` subject to
/// `−t ≤ p − p′ ≤ t` with `p′` ranging over the piece (half-space rows,
/// conic-combination rows, or both when both descriptions are stored).
///
/// The program is posed in the deviation `q = p − p′` rather than `p′`
/// itself: half-space rows then read `N q ≤ N p` with generically nonzero
/// right-hand sides, which avoids the massive degeneracy (and the resulting
/// roundoff churn) of an all-zero-rhs formulation on many-faceted cones.
fn piece_distance(piece: &ConePiece, p: &[f64]) -> Result<f64, ConeError> {
    let k = piece.dim;
    let m = piece.generators.len();
    let use_gens = m > 0;
    let use_halfspaces = !piece.halfspaces.is_empty();
    if !use_gens && !use_halfspaces {
        return Err(ConeError::Malformed("piece with no description".into()));
    }

    // Variables: q (k, free), c (m, ≥0 — only when generators present),
    // t (1, ≥0). Objective: t.
    let n_vars = k + m + 1;
    let t_col = k + m;
    let mut objective = vec![0.0; n_vars];
    objective[t_col] = 1.0;
    let mut free = vec![false; n_vars];
    for f in free.iter_mut().take(k) {
        *f = true;
    }

    let mut constraints = Vec::new();
    if use_halfspaces {
        // n·p′ ≥ 0 ⇔ n·q ≤ n·p.
        for n in &piece.halfspaces {
            let mut coeffs = vec![0.0; n_vars];
            coeffs[..k].copy_from_slice(n);
            constraints.push(Constraint { coeffs, rel: Rel::Le, rhs: crate::util::dot(n, p) });
        }
    }
    if use_gens {
        // p′ = Σ c_i g_i ⇔ q_j + Σ c_i g_i[j] = p_j componentwise.
        for j in 0..k {
            let mut coeffs = vec![0.0; n_vars];
            coeffs[j] = 1.0;
            for (i, g) in piece.generators.iter().enumerate() {
                coeffs[k + i] = g[j];
            }
            constraints.push(Constraint { coeffs, rel: Rel::Eq, rhs: p[j] });
        }
    }
    for j in 0..k {
        // |q_j| ≤ t.
        let mut up = vec![0.0; n_vars];
        up[j] = 1.0;
        up[t_col] = -1.0;
        constraints.push(Constraint { coeffs: up, rel: Rel::Le, rhs: 0.0 });
        let mut down = vec![0.0; n_vars];
        down[j] = -1.0;
        down[t_col] = -1.0;
        constraints.push(Constraint { coeffs: down, rel: Rel::Le, rhs: 0.0 });
    }

    let lp = Lp { n_vars, objective, constraints, free };
    let s = simplex::solve(&lp)?;
    Ok(s.value.max(0.0))
}

/// Compact containment `U ⋐ V`: the closure of `U` minus the origin lies in
/// the interior of `V`. Certified by checking that every sup-normalized
/// generator of `U` — plus, for pieces with more generators than the
/// dimension, a dense deterministic sample of normalized conic combinations
/// — has interior depth in `V` above `margin`.
pub fn compact_containment(u: &Cone, v: &Cone, margin: f64) -> Result<bool, ConeError> {
    if u.dim != v.dim {
        return Err(ConeError::DimensionMismatch { expected: u.dim, got: v.dim });
    }
    let mut probes: Vec<Vec<f64>> = Vec::new();
    for piece in &u.pieces {
        if piece.generators.is_empty() && !piece.halfspaces.is_empty() {
            // Half-space-only piece: a degenerate {0} piece contributes no
            // probes; anything larger is unsupported here.
            let alone = Cone { dim: u.dim, pieces: vec![piece.clone()], open_projection: false };
            if alone.is_degenerate() {
                continue;
            }
            return Err(ConeError::UnsupportedRepresentation(
                "compact containment needs generator form for the inner cone".into(),
            ));
        }
        probes.extend(piece.generators.iter().cloned());
        if piece.generators.len() > piece.dim {
            // Deterministic pairwise midpoints cover the simplicial fan
            // between adjacent generators well enough at desk scale.
            for i in 0..piece.generators.len() {
                for j in (i + 1)..piece.generators.len() {
                    let mid: Vec<f64> = piece.generators[i]
                        .iter()
                        .zip(&piece.generators[j])
                        .map(|(a, b)| a + b)
                        .collect();
                    if sup_norm(&mid) > 0.0 {
                        probes.push(mid);
                    }
                }
            }
        }
    }
    for probe in &probes {
        let unit: Vec<f64> = {
            let s = sup_norm(probe);
            probe.iter().map(|x| x / s).collect()
        };
        if v.distance_to_complement(&unit)? <= margin {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrant_distances_match_hand_projection() {
        let q = Cone::orthant(2);
        assert!((q.distance(&[-1.0, -2.0]).unwrap() - 2.0).abs() < 1e-10);
        assert!((q.distance(&[3.0, -1.0]).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(q.distance(&[0.5, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn planar_light_cone_distance_below_the_tip() {
        // Frozen against a dense brute-force sample over cone points: the
        // nearest cone point to (0, -1) in the sup norm is (1/2, -1/2).
        let lc = Cone::forward_light_cone(2, 0).unwrap();
        assert!((lc.distance(&[0.0, -1.0]).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn generator_form_and_halfspace_form_agree_on_the_light_cone() {
        let both = Cone::forward_light_cone(2, 0).unwrap();
        let gens_only = Cone::from_generators(2, both.generators()).unwrap();
        let hs_only = Cone::from_halfspaces(2, both.halfspaces()).unwrap();
        for p in [[1.0, 0.3], [0.2, 1.0], [-0.5, 0.1], [2.0, -1.9]] {
            let d1 = gens_only.distance(&p).unwrap();
            let d2 = hs_only.distance(&p).unwrap();
            assert!((d1 - d2).abs() < 1e-9, "mismatch at {p:?}: {d1} vs {d2}");
        }
    }

    #[test]
    fn light_cone_is_self_dual_under_minkowski_pairing() {
        let lc = Cone::forward_light_cone(2, 0).unwrap();
        let dual = lc.dual_under(&PairingForm::minkowski(2)).unwrap();
        for p in [[1.0, 0.5], [1.0, -0.99], [1.0, 1.0]] {
            assert!(dual.contains(&p), "{p:?} should be in the dual");
        }
        assert!(!dual.contains(&[0.5, 1.0]));
        assert!(!dual.contains(&[-1.0, 0.0]));
    }

    #[test]
    fn backward_cone_dualizes_to_forward_under_negated_pairings() {
        let back = Cone::forward_light_cone(2, 0).unwrap().negated();
        for form in [PairingForm::minkowski(2).negated(), PairingForm::euclidean(2).negated()] {
            let dual = back.dual_under(&form).unwrap();
            assert!(dual.contains(&[1.0, 0.5]));
            assert!(dual.contains(&[1.0, -1.0]));
            assert!(!dual.contains(&[-1.0, 0.0]));
            assert!(!dual.contains(&[0.0, 1.0]));
        }
    }

    #[test]
    fn full_space_dualizes_to_origin() {
        let dual = Cone::full_space(3).dual();
        assert!(dual.is_degenerate());
        assert!(dual.contains(&[0.0, 0.0, 0.0]));
        assert!(!dual.contains(&[1e-3, 0.0, 0.0]));
    }

    #[test]
    fn double_dual_recovers_generators() {
        let v = Cone::from_generators(2, &[vec![1.0, 0.2], vec![0.3, 1.0]]).unwrap();
        let dd = v.dual().dual();
        for g in v.generators() {
            assert!(dd.contains(g));
        }
        for g in dd.generators() {
            assert!(v.contains(g));
        }
    }

    #[test]
    fn interior_depth_is_positive_only_inside() {
        let q = Cone::orthant(2);
        assert!(q.distance_to_complement(&[2.0, 3.0]).unwrap() > 0.0);
        assert_eq!(q.distance_to_complement(&[2.0, 0.0]).unwrap(), 0.0);
        assert_eq!(q.distance_to_complement(&[-1.0, 5.0]).unwrap(), 0.0);
        // Depth of (2, 3) in the quadrant: nearest face is p₂ = 0 at
        // sup-distance 2 (normals are basis vectors with ‖·‖₁ = 1).
        assert!((q.distance_to_complement(&[2.0, 3.0]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn compact_containment_of_angular_nesting() {
        // Narrow cone about (1, 0) inside a wider one, both polyhedral.
        let tan10 = (10.0f64).to_radians().tan();
        let tan20 = (20.0f64).to_radians().tan();
        let narrow =
            Cone::from_generators(2, &[vec![1.0, tan10], vec![1.0, -tan10]]).unwrap();
        let wide = Cone::from_both(
            2,
            &[vec![1.0, tan20], vec![1.0, -tan20]],
            &[vec![tan20, -1.0], vec![tan20, 1.0]],
        )
        .unwrap();
        assert!(compact_containment(&narrow, &wide, 1e-9).unwrap());
        assert!(!compact_containment(&wide, &wide, 1e-9).unwrap());
        // {0} is compactly contained in anything nonempty (vacuously).
        assert!(compact_containment(&Cone::origin(2), &wide, 1e-9).unwrap());
    }

    #[test]
    fn product_membership_is_componentwise() {
        let lc = Cone::forward_light_cone(2, 0).unwrap();
        let prod = lc.power(2).unwrap();
        assert_eq!(prod.dim, 4);
        assert!(prod.contains(&[1.0, 0.5, 2.0, -1.5]));
        assert!(!prod.contains(&[1.0, 0.5, 1.0, 1.5]));
    }

    #[test]
    fn intersection_of_adjacent_quadrants_is_an_axis() {
        let first = Cone::orthant(2);
        let second = Cone::from_halfspaces(2, &[vec![-1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let axis = first.intersection(&second).unwrap();
        assert!(axis.contains(&[0.0, 3.0]));
        assert!(!axis.contains(&[0.5, 3.0]));
        assert!(!axis.contains(&[-0.5, 3.0]));
        assert!(!axis.contains(&[0.0, -0.5]));
    }

    #[test]
    fn union_membership_is_either() {
        let right = Cone::from_generators(1, &[vec![1.0]]).unwrap();
        let left = Cone::from_generators(1, &[vec![-1.0]]).unwrap();
        let line = right.union(&left).unwrap();
        assert!(line.contains(&[5.0]));
        assert!(line.contains(&[-5.0]));
        let right_only = Cone::from_generators(1, &[vec![1.0]]).unwrap();
        assert!(!right_only.contains(&[-5.0]));
    }

    #[test]
    fn three_dimensional_light_cone_approximation() {
        let lc = Cone::forward_light_cone(3, 64).unwrap();
        // Inside, away from the mantle by more than the N-gon sagitta.
        assert!(lc.contains(&[1.0, 0.3, 0.4]));
        assert!(!lc.contains(&[1.0, 0.9, 0.9]));
        // The two representations agree on sample points.
        let gens_only = Cone::from_generators(3, lc.generators()).unwrap();
        let hs_only = Cone::from_halfspaces(3, lc.halfspaces()).unwrap();
        for p in [[1.0, 0.2, -0.3], [0.5, 0.6, 0.0], [2.0, 1.2, 1.2]] {
            assert!(
                (gens_only.distance(&p).unwrap() - hs_only.distance(&p).unwrap()).abs() < 1e-8,
                "representation mismatch at {p:?}"
            );
        }
    }

    #[test]
    fn distance_is_one_lipschitz_in_the_sup_norm() {
        let lc = Cone::forward_light_cone(2, 0).unwrap();
        let pts = [[0.3, -0.8], [1.0, 1.4], [-2.0, 0.5], [0.1, 0.0]];
        for a in &pts {
            for b in &pts {
                let da = lc.distance(a).unwrap();
                let db = lc.distance(b).unwrap();
                let step = sup_norm(&crate::util::sub(a, b));
                assert!((da - db).abs() <= step + 1e-10);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let q = Cone::orthant(2);
        assert!(matches!(
            q.distance(&[1.0, 2.0, 3.0]),
            Err(ConeError::DimensionMismatch { expected: 2, got: 3 })
        ));
    }
}
