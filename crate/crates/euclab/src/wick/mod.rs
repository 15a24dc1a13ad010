//! Pair-multiplicity combinatorics and truncated series evaluation.
//!
//! This module handles products of `n` field-like factors expanded over
//! *pair-multiplicity profiles*: symmetric matrices `K = (k_{jm})`,
//! `1 ≤ j < m ≤ n`, recording how many two-point contractions link the
//! vertices `j` and `m`. The ingredients, bottom to top:
//!
//! - [`MultiIndexK`] — a profile with its valences
//!   `κ_j = Σ_{m≠j} k_{jm}` (contractions meeting vertex `j`); the leg
//!   count identity `Σ_j κ_j = 2|K|` is structural.
//! - [`enumerate_k`] — all profiles with `|K| = Σ k_{jm} ≤ N`, ordered by
//!   `|K|` and then lexicographically in the slot order
//!   `(1,2), (1,3), …, (n−1,n)`.
//! - [`pairing_factor`] — the exact number `κ!/K!` of perfect matchings
//!   on labeled legs that realize a profile, cross-checkable against the
//!   brute-force [`pairing_oracle`].
//! - [`CoefficientSequence`] — the scalar sequences `d_k` entering vertex
//!   weights; [`coefficient_d_k`] assembles the profile coefficient
//!   `D_K = (κ!/K!)·Π_j d_{κ_j}`, exactly (as a rational) whenever the
//!   sequence has a closed form.
//! - [`check_coefficient_condition`] — searches small constants `(A, h)`
//!   with `|d_k·d_l| ≤ A·h^{k+l}·|d_{k+l}|` for all scanned `k, l`; the
//!   factorially decaying families satisfy it with `(A, h) = (1, 2)`
//!   (their ratio `d_k d_l / d_{k+l}` is a binomial coefficient, at most
//!   `2^{k+l}`), while Gaussian-type decay `d_k = e^{−k²}` fails with the
//!   ratio `e^{2kl}` as witness.
//! - [`weighted_series`] / [`convergence_bound_check`] — the scalar
//!   series `Σ_k L^k k! |d_{2k}| w^k` with a rigorous remainder, fitted
//!   against stretched-exponential comparison weights: the series stays
//!   below `C·exp(ε·r^{1/α})` for slowly growing `w` and below
//!   `C·exp(ε·t^{−1/(β−1)})` for power-bounded blow-up at small scale.
//! - [`c_tilde_log`] — `ln sup_k L^k k! |d_{2k}|`, the best constant in
//!   the decay statement `k!|d_{2k}| ≤ C̃_L·L^{−k}`, computed in log scale
//!   by a ratio scan (for the closed forms, the term ratio
//!   `L(k+1)|d_{2k+2}|/|d_{2k}|` is strictly decreasing, so the scan is a
//!   proof; for finite lists the supremum is over finitely many terms).
//! - [`combinatorial_inequalities`] — exact big-integer verification of
//!   the two counting bounds used by every tail estimate:
//!   `|K|!/K! ≤ (n(2n−1))^{|K|}` (distributing `|K|` draws over the slots)
//!   and `κ! ≤ (2|K|)! ≤ 4^{|K|}(|K|!)²` (central binomial growth).
//! - [`lambda_constant`] — the smallest achievable norm of a sum of cone
//!   vectors with unit total norm,
//!   `λ = min_{2 ≤ r ≤ m} inf {|Σ η_i| : η_i ∈ cone, Σ|η_i| = 1}`,
//!   positive exactly when the cone is proper; certified by seeded
//!   sampling plus coordinate-descent refinement. For the backward cone
//!   in the sup norm `λ = 1` ([`BACKWARD_SUP_LAMBDA`]), because the time
//!   components of cone members add up with one sign and dominate.
//! - [`wightman_eval`] — the truncated profile series
//!   `Σ_{|K| ≤ N} D_K Π_{j<m} 𝐰(ζ_j + … + ζ_{m−1})^{k_{jm}}` for a
//!   registered two-point model, summed by a deterministic chunked
//!   reduction (bit-for-bit reproducible across thread counts), together
//!   with a rigorous bound on everything beyond the truncation.
//!
//! ### The tail bound
//!
//! For a profile of size `|K| = t`, the matching count obeys
//! `κ!/K! ≤ 4^t t! (n(2n−1))^t` (both checked inequalities combined), and
//! merging the coefficient bound across the valence profile `n−1` times
//! gives `Π_j |d_{κ_j}| ≤ A^{n−1} h^{2(n−1)t} |d_{2t}|`; together,
//!
//! ```text
//!   |D_K| ≤ A′ · h′ᵗ · t! · |d_{2t}|,   A′ = A^{n−1},
//!                                       h′ = 4·n(2n−1)·h^{2(n−1)}.
//! ```
//!
//! The model's certified growth bound controls the product of two-point
//! values by `(n+1)^t C^t (1 + w_IR(2n|ζ|)^t + Σ_i w_UV(λ|η_i|)^t)`,
//! which is at most `(n+1)·ĝ^t` up to the same geometric data, with
//! `ĝ = max(1, w_IR(2n|ζ|), max_i w_UV(λ|η_i|))` the *envelope gauge* of
//! the evaluation point. Abbreviating `X = h′(n+1)Cĝ` and applying the
//! decay constant `C̃_L` at `L = 2X`, the order-`t` stratum is at most
//! `A′(n+1)·C̃_{2X}·#K(t)·2^{−t}` with `#K(t) = C(t+s−1, s−1)` profiles
//! (`s = n(n−1)/2` slots), and the tail is the elementary series
//! `Σ_{t>N} #K(t) 2^{−t}`, summed with a geometric closure. The bound is
//! strictly decreasing in `N` and fully rigorous; it is loose (often by
//! many orders of magnitude — `C̃_{2X}` can be astronomically large), so
//! it certifies convergence rather than predicting accuracy, and the
//! computation carries it in log scale to survive the magnitudes.

pub mod models;

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use models::{
    backward_cone_interior, lorentz_square, BoundCertificate, MajorantProbe, ModelKind,
    TwoPointModel,
};

use crate::cones::Cone;
use crate::util::{factorial_big, l2_norm, multi_indices_up_to, scale, sup_norm};

/// Errors from the combinatorial and series layer.
#[derive(Debug, Error)]
pub enum WickError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tube violation: {0}")]
    TubeViolation(String),
    #[error("cone is not proper: {0}")]
    ImproperCone(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("tail bound unavailable: {0}")]
    TailUnavailable(String),
    #[error(transparent)]
    Cone(#[from] crate::cones::ConeError),
}

// ─────────────────────── pair-multiplicity profiles ──────────────────────

/// A pair-multiplicity profile `(k_{jm})_{1 ≤ j < m ≤ n}` for `n` vertices,
/// stored in the slot order `(1,2), (1,3), …, (1,n), (2,3), …, (n−1,n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndexK {
    n: usize,
    entries: Vec<usize>,
}

/// Number of slots `n(n−1)/2` of an `n`-vertex profile.
pub fn profile_slots(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Slot index of the (0-based) vertex pair `a < b`.
fn slot_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < n);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

impl MultiIndexK {
    /// Wraps raw slot entries for `n` vertices (`n ≥ 2`, correct length).
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self, WickError> {
        if n < 2 {
            return Err(WickError::InvalidInput("profiles need at least two vertices".into()));
        }
        if entries.len() != profile_slots(n) {
            return Err(WickError::InvalidInput(format!(
                "{n}-vertex profiles have {} slots, got {}",
                profile_slots(n),
                entries.len()
            )));
        }
        Ok(MultiIndexK { n, entries })
    }

    /// The empty profile (no contractions).
    pub fn zero(n: usize) -> Self {
        MultiIndexK { n, entries: vec![0; profile_slots(n)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Multiplicity of the pair `(j, m)`, `1 ≤ j < m ≤ n` (1-based).
    pub fn get(&self, j: usize, m: usize) -> usize {
        assert!(1 <= j && j < m && m <= self.n, "pair ({j},{m}) out of range");
        self.entries[slot_index(self.n, j - 1, m - 1)]
    }

    /// The vertex pairs `(j, m)` (1-based) in slot order.
    pub fn slot_pairs(n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(profile_slots(n));
        for j in 1..=n {
            for m in (j + 1)..=n {
                out.push((j, m));
            }
        }
        out
    }

    /// Valences `κ_j = Σ_{m≠j} k_{jm}` (contraction legs at each vertex).
    pub fn valences(&self) -> Vec<usize> {
        let mut kappa = vec![0usize; self.n];
        for (slot, &k) in self.entries.iter().enumerate() {
            let (a, b) = Self::pair_of_slot(self.n, slot);
            kappa[a] += k;
            kappa[b] += k;
        }
        kappa
    }

    /// Total multiplicity `|K| = Σ_{j<m} k_{jm}`.
    pub fn total(&self) -> usize {
        self.entries.iter().sum()
    }

    fn pair_of_slot(n: usize, slot: usize) -> (usize, usize) {
        let mut s = slot;
        for a in 0..n {
            let row = n - a - 1;
            if s < row {
                return (a, a + 1 + s);
            }
            s -= row;
        }
        unreachable!("slot {slot} out of range for n = {n}")
    }
}

/// All profiles with `|K| ≤ nmax`, ordered by `|K|` and then
/// lexicographically in slot order.
pub fn enumerate_k(n: usize, nmax: usize) -> Result<Vec<MultiIndexK>, WickError> {
    if n < 2 {
        return Err(WickError::InvalidInput("profiles need at least two vertices".into()));
    }
    Ok(multi_indices_up_to(profile_slots(n), nmax)
        .into_iter()
        .map(|entries| MultiIndexK { n, entries })
        .collect())
}

// ───────────────────────── exact matching counts ─────────────────────────

/// The exact number `κ!/K! = (Π_j κ_j!)/(Π_{j<m} k_{jm}!)` of perfect
/// matchings on labeled legs realizing the profile (an integer: group the
/// legs of each vertex by partner, then pair the groups).
pub fn pairing_factor(k: &MultiIndexK) -> BigUint {
    let mut num = BigUint::one();
    for kappa in k.valences() {
        num *= factorial_big(kappa);
    }
    let mut den = BigUint::one();
    for &s in k.entries() {
        den *= factorial_big(s);
    }
    debug_assert!((&num % &den).is_zero(), "matching count must divide exactly");
    num / den
}

/// Brute-force matching census: given valences `κ_j` (legs per vertex),
/// enumerates every perfect matching of the labeled legs that never pairs
/// two legs of the same vertex, and tallies the resulting profiles.
/// Returns the empty map when no matching exists (odd total, or a vertex
/// holding more than half the legs). Desk scale: `Σκ ≤ 16`.
pub fn pairing_oracle(
    n: usize,
    kappa: &[usize],
) -> Result<BTreeMap<Vec<usize>, BigUint>, WickError> {
    if n < 2 || kappa.len() != n {
        return Err(WickError::InvalidInput(format!(
            "valence list must have length n = {n} ≥ 2, got {}",
            kappa.len()
        )));
    }
    let total: usize = kappa.iter().sum();
    if total > 16 {
        return Err(WickError::InvalidInput(format!(
            "matching census is exponential; {total} legs exceeds the desk-scale cap 16"
        )));
    }
    let mut legs = Vec::with_capacity(total);
    for (v, &count) in kappa.iter().enumerate() {
        legs.extend(std::iter::repeat(v).take(count));
    }
    let mut matched = vec![false; total];
    let mut counts = vec![0usize; profile_slots(n)];
    let mut census = BTreeMap::new();

    fn walk(
        legs: &[usize],
        n: usize,
        matched: &mut [bool],
        counts: &mut [usize],
        census: &mut BTreeMap<Vec<usize>, BigUint>,
    ) {
        let Some(i) = matched.iter().position(|&m| !m) else {
            *census.entry(counts.to_vec()).or_insert_with(BigUint::zero) += BigUint::one();
            return;
        };
        matched[i] = true;
        for j in (i + 1)..legs.len() {
            if matched[j] || legs[j] == legs[i] {
                continue;
            }
            matched[j] = true;
            let (a, b) = (legs[i].min(legs[j]), legs[i].max(legs[j]));
            let s = slot_index(n, a, b);
            counts[s] += 1;
            walk(legs, n, matched, counts, census);
            counts[s] -= 1;
            matched[j] = false;
        }
        matched[i] = false;
    }

    walk(&legs, n, &mut matched, &mut counts, &mut census);
    Ok(census)
}

// ───────────────────────── coefficient sequences ─────────────────────────

/// A scalar vertex-weight sequence `d_k`, either in closed form (exact
/// rational values available at every order) or as a finite list
/// (`d_k = 0` beyond the end).
#[derive(Debug, Clone)]
pub enum CoefficientSequence {
    /// `d_k = 1/k!`.
    InverseFactorial,
    /// `d_k = g^k/k!` for a rational `g`.
    Exponential { g: BigRational },
    /// Explicit leading values; zero beyond the list.
    Custom { values: Vec<f64> },
}

impl CoefficientSequence {
    pub fn inverse_factorial() -> Self {
        CoefficientSequence::InverseFactorial
    }

    /// `d_k = (num/den)^k / k!`.
    pub fn exponential(num: i64, den: i64) -> Result<Self, WickError> {
        if den == 0 {
            return Err(WickError::InvalidInput("rational coupling needs den ≠ 0".into()));
        }
        Ok(CoefficientSequence::Exponential {
            g: BigRational::new(BigInt::from(num), BigInt::from(den)),
        })
    }

    /// `d_k = g^k / k!` with `g` taken exactly as the binary value of the
    /// given float.
    pub fn exponential_from_f64(g: f64) -> Result<Self, WickError> {
        let g = BigRational::from_float(g)
            .ok_or_else(|| WickError::InvalidInput(format!("coupling {g} is not finite")))?;
        Ok(CoefficientSequence::Exponential { g })
    }

    pub fn custom(values: Vec<f64>) -> Self {
        CoefficientSequence::Custom { values }
    }

    /// True for the families with exact values at every order.
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, CoefficientSequence::Custom { .. })
    }

    /// Exact `d_k` when the sequence has a closed form.
    pub fn d_exact(&self, k: usize) -> Option<BigRational> {
        match self {
            CoefficientSequence::InverseFactorial => {
                Some(BigRational::new(BigInt::one(), BigInt::from(factorial_big(k))))
            }
            CoefficientSequence::Exponential { g } => {
                let mut p = BigRational::one();
                for _ in 0..k {
                    p *= g;
                }
                Some(p / BigRational::from_integer(BigInt::from(factorial_big(k))))
            }
            CoefficientSequence::Custom { .. } => None,
        }
    }

    /// `d_k` as a float (closed forms by stable recursion `d_{k+1} =
    /// d_k·g/(k+1)`, underflowing gracefully to zero; lists directly).
    pub fn d(&self, k: usize) -> f64 {
        match self {
            CoefficientSequence::InverseFactorial => Self::recursive_d(1.0, k),
            CoefficientSequence::Exponential { g } => {
                Self::recursive_d(g.to_f64().unwrap_or(f64::NAN), k)
            }
            CoefficientSequence::Custom { values } => values.get(k).copied().unwrap_or(0.0),
        }
    }

    fn recursive_d(g: f64, k: usize) -> f64 {
        let mut d = 1.0;
        for i in 0..k {
            d *= g / (i + 1) as f64;
        }
        d
    }

    /// `|d_{2k+2}| / |d_{2k}|` for the closed forms (None for lists).
    fn even_ratio(&self, k: usize) -> Option<f64> {
        let q = match self {
            CoefficientSequence::InverseFactorial => 1.0,
            CoefficientSequence::Exponential { g } => {
                let gf = g.to_f64().unwrap_or(f64::NAN);
                gf * gf
            }
            CoefficientSequence::Custom { .. } => return None,
        };
        Some(q / ((2 * k + 1) as f64 * (2 * k + 2) as f64))
    }

    /// Index of the last stored value (lists only).
    pub fn max_index(&self) -> Option<usize> {
        match self {
            CoefficientSequence::Custom { values } => Some(values.len().saturating_sub(1)),
            _ => None,
        }
    }
}

/// A profile coefficient `D_K = (κ!/K!)·Π_j d_{κ_j}`: the exact matching
/// count, the exact rational value when the sequence has one, and the
/// float value used by series evaluation.
#[derive(Debug, Clone)]
pub struct CoefficientValue {
    pub matchings: BigUint,
    pub exact: Option<BigRational>,
    pub value: f64,
}

/// Assembles `D_K` for a profile and a vertex-weight sequence.
pub fn coefficient_d_k(k: &MultiIndexK, seq: &CoefficientSequence) -> CoefficientValue {
    let matchings = pairing_factor(k);
    let kappa = k.valences();
    let value = kappa
        .iter()
        .fold(matchings.to_f64().unwrap_or(f64::INFINITY), |acc, &kj| acc * seq.d(kj));
    let exact = if seq.is_closed_form() {
        let mut r = BigRational::from_integer(BigInt::from(matchings.clone()));
        for &kj in &kappa {
            r *= seq.d_exact(kj).expect("closed form has exact values");
        }
        Some(r)
    } else {
        None
    };
    CoefficientValue { matchings, exact, value }
}

// ─────────────────── the two-index coefficient condition ──────────────────

/// A violating pair for the coefficient condition, reported at the
/// largest constants tried.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionWitness {
    pub k: usize,
    pub l: usize,
    /// `|d_k·d_l / d_{k+l}|` (infinite when `d_{k+l} = 0`).
    pub ratio: f64,
    /// The bound `A·h^{k+l}` it had to stay under.
    pub bound: f64,
}

/// Outcome of searching constants for
/// `|d_k·d_l| ≤ A·h^{k+l}·|d_{k+l}|` over `k + l ≤ kmax`.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientCondition {
    pub ok: bool,
    /// Accepted constants (meaningful when `ok`).
    pub a: f64,
    pub h: f64,
    pub kmax: usize,
    pub witness: Option<ConditionWitness>,
}

/// Searches `A ∈ {1, 10, 100}` (outer) and `h ∈ {2, 4, 8}` (inner) for
/// constants validating the product condition on all pairs with
/// `k + l ≤ kmax` (`kmax ≤ 64`). Closed forms are compared exactly in
/// rational arithmetic; lists in floats. On total failure the witness
/// records the first violating pair at `(A, h) = (100, 8)`.
pub fn check_coefficient_condition(
    seq: &CoefficientSequence,
    kmax: usize,
) -> Result<CoefficientCondition, WickError> {
    if kmax == 0 || kmax > 64 {
        return Err(WickError::InvalidInput(format!(
            "condition scan expects 1 ≤ kmax ≤ 64, got {kmax}"
        )));
    }
    // Tabulate |d_0..d_kmax| once; the scan only multiplies and compares.
    let exact: Option<Vec<BigRational>> = if seq.is_closed_form() {
        Some((0..=kmax).map(|k| seq.d_exact(k).expect("closed form").abs()).collect())
    } else {
        None
    };
    let floats: Vec<f64> = (0..=kmax).map(|k| seq.d(k).abs()).collect();
    let first_violation = |a: u32, h: u32| -> Option<(usize, usize)> {
        let hpow: Vec<BigRational> = exact.as_ref().map_or_else(Vec::new, |_| {
            let mut cur = BigRational::from_integer(BigInt::from(a));
            let h_rat = BigRational::from_integer(BigInt::from(h));
            (0..=kmax)
                .map(|i| {
                    if i > 0 {
                        cur *= &h_rat;
                    }
                    cur.clone()
                })
                .collect()
        });
        for k in 0..=kmax {
            for l in k..=(kmax - k) {
                let bad = match &exact {
                    Some(d) => &d[k] * &d[l] > &hpow[k + l] * &d[k + l],
                    None => {
                        floats[k] * floats[l]
                            > (a as f64) * (h as f64).powi((k + l) as i32) * floats[k + l]
                    }
                };
                if bad {
                    return Some((k, l));
                }
            }
        }
        None
    };
    for a in [1u32, 10, 100] {
        for h in [2u32, 4, 8] {
            if first_violation(a, h).is_none() {
                return Ok(CoefficientCondition {
                    ok: true,
                    a: a as f64,
                    h: h as f64,
                    kmax,
                    witness: None,
                });
            }
        }
    }
    let (k, l) = first_violation(100, 8).expect("total failure has a witness");
    let dkl = seq.d(k + l).abs();
    let ratio =
        if dkl == 0.0 { f64::INFINITY } else { (seq.d(k) * seq.d(l) / dkl).abs() };
    Ok(CoefficientCondition {
        ok: false,
        a: 100.0,
        h: 8.0,
        kmax,
        witness: Some(ConditionWitness { k, l, ratio, bound: 100.0 * 8f64.powi((k + l) as i32) }),
    })
}

// ─────────────────── weighted series and decay constants ──────────────────

/// A summed weighted series with its rigorous remainder.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesValue {
    pub sum: f64,
    /// Bound on everything beyond the summed terms (exactly zero for
    /// finite lists, which are summed in full).
    pub remainder: f64,
    pub terms: usize,
}

/// Sums `Σ_k L^k·k!·|d_{2k}|·w^k` with a certified remainder.
///
/// Closed forms iterate on the term ratio `L·w·(k+1)·|d_{2k+2}|/|d_{2k}|`,
/// which is strictly decreasing, so once it drops below one half the
/// remaining mass is bounded by the geometric closure `term·ρ/(1−ρ)`.
/// Finite lists are summed to the end; a list whose terms grow through
/// `10¹⁰⁰` is reported divergent with the offending order.
pub fn weighted_series(
    seq: &CoefficientSequence,
    l_value: f64,
    w: f64,
) -> Result<SeriesValue, WickError> {
    if !(l_value > 0.0) || !(w >= 0.0) {
        return Err(WickError::InvalidInput(format!(
            "series needs L > 0 and w ≥ 0, got L = {l_value}, w = {w}"
        )));
    }
    match seq {
        CoefficientSequence::Custom { values } => {
            let mut sum = 0.0f64;
            let mut base = 1.0f64; // L^k·k!·w^k
            let mut prev = f64::NEG_INFINITY;
            let mut terms = 0usize;
            for k in 0..=(values.len().saturating_sub(1)) / 2 {
                if k > 0 {
                    base *= l_value * k as f64 * w;
                }
                let d = values.get(2 * k).copied().unwrap_or(0.0).abs();
                let term = if d == 0.0 { 0.0 } else { base * d };
                if term > 1e100 && term >= prev {
                    return Err(WickError::Divergent(format!(
                        "list terms grow through 1e100 at order {k} (term ≈ {term:.3e})"
                    )));
                }
                prev = term;
                sum += term;
                terms += 1;
            }
            Ok(SeriesValue { sum, remainder: 0.0, terms })
        }
        _ => {
            let mut sum = 0.0f64;
            let mut term = seq.d(0).abs();
            for k in 0..100_000usize {
                sum += term;
                let ratio = l_value * w * (k + 1) as f64 * seq.even_ratio(k).expect("closed form");
                if ratio < 0.5 && term <= 1e-16 * sum.max(f64::MIN_POSITIVE) {
                    return Ok(SeriesValue {
                        sum,
                        remainder: term * ratio / (1.0 - ratio),
                        terms: k + 1,
                    });
                }
                term *= ratio;
                if !term.is_finite() {
                    return Ok(SeriesValue { sum: f64::INFINITY, remainder: 0.0, terms: k + 1 });
                }
            }
            Err(WickError::Divergent("no convergence within 100000 terms".into()))
        }
    }
}

/// `ln sup_k L^k·k!·|d_{2k}|` — the log of the best constant `C̃_L` in
/// `k!·|d_{2k}| ≤ C̃_L·L^{−k}`. Closed forms scan while the (strictly
/// decreasing) term ratio exceeds one; lists take the max over their
/// finite support. `None` when the scan cannot close.
pub fn c_tilde_log(seq: &CoefficientSequence, l_value: f64) -> Option<f64> {
    if !(l_value > 0.0) || !l_value.is_finite() {
        return None;
    }
    match seq {
        CoefficientSequence::Custom { values } => {
            let mut best = f64::NEG_INFINITY;
            let mut ln_base = 0.0f64; // ln(L^k·k!)
            for k in 0..=(values.len().saturating_sub(1)) / 2 {
                if k > 0 {
                    ln_base += l_value.ln() + (k as f64).ln();
                }
                let d = values.get(2 * k).copied().unwrap_or(0.0).abs();
                if d > 0.0 {
                    best = best.max(ln_base + d.ln());
                }
            }
            Some(best)
        }
        _ => {
            let mut ln_term = seq.d(0).abs().ln(); // = 0 for the closed forms
            let mut best = ln_term;
            for k in 0..10_000_000usize {
                let ratio = l_value * (k + 1) as f64 * seq.even_ratio(k).expect("closed form");
                if ratio < 1.0 {
                    return Some(best);
                }
                ln_term += ratio.ln();
                best = best.max(ln_term);
            }
            None
        }
    }
}

/// Which stretched-exponential comparison weight a series is fitted
/// against.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum GrowthRegime {
    /// Compare to `exp(ε·r^{1/α})` as the argument grows (`α > 0`).
    Infrared { alpha: f64 },
    /// Compare to `exp(ε·t^{−1/(β−1)})` as the argument shrinks (`β > 1`).
    Ultraviolet { beta: f64 },
}

impl GrowthRegime {
    fn comparison(&self, x: f64, epsilon: f64) -> f64 {
        match self {
            GrowthRegime::Infrared { alpha } => (epsilon * x.powf(1.0 / alpha)).exp(),
            GrowthRegime::Ultraviolet { beta } => (epsilon * x.powf(-1.0 / (beta - 1.0))).exp(),
        }
    }

    fn validate(&self) -> Result<(), WickError> {
        match self {
            GrowthRegime::Infrared { alpha } if !(*alpha > 0.0) => Err(WickError::InvalidInput(
                format!("infrared comparison needs α > 0, got {alpha}"),
            )),
            GrowthRegime::Ultraviolet { beta } if !(*beta > 1.0) => Err(WickError::InvalidInput(
                format!("ultraviolet comparison needs β > 1, got {beta}"),
            )),
            _ => Ok(()),
        }
    }
}

/// One grid row of a convergence fit.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub point: f64,
    pub weight: f64,
    pub series: f64,
    pub remainder: f64,
    pub comparison: f64,
    pub ratio: f64,
}

/// A fitted convergence bound: the series stayed below
/// `c_fit·(comparison weight)` across the grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub l_value: f64,
    pub epsilon: f64,
    pub c_fit: f64,
    pub ok: bool,
    pub rows: Vec<ConvergenceRow>,
}

/// Evaluates `Σ_k L^k·k!·|d_{2k}|·w(x)^k` on a grid and fits the constant
/// against the regime's comparison weight. Divergent lists surface as
/// [`WickError::Divergent`].
pub fn convergence_bound_check(
    seq: &CoefficientSequence,
    weight: &dyn Fn(f64) -> f64,
    regime: GrowthRegime,
    l_value: f64,
    epsilon: f64,
    grid: &[f64],
) -> Result<ConvergenceReport, WickError> {
    regime.validate()?;
    if !(epsilon > 0.0) {
        return Err(WickError::InvalidInput(format!("comparison needs ε > 0, got {epsilon}")));
    }
    if grid.is_empty() {
        return Err(WickError::InvalidInput("empty evaluation grid".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut c_fit = 0.0f64;
    for &x in grid {
        let w = weight(x);
        let series = weighted_series(seq, l_value, w)?;
        let comparison = regime.comparison(x, epsilon);
        let ratio = (series.sum + series.remainder) / comparison;
        c_fit = c_fit.max(ratio);
        rows.push(ConvergenceRow {
            point: x,
            weight: w,
            series: series.sum,
            remainder: series.remainder,
            comparison,
            ratio,
        });
    }
    Ok(ConvergenceReport { l_value, epsilon, c_fit, ok: c_fit.is_finite(), rows })
}

// ─────────────────── exact combinatorial inequalities ─────────────────────

/// Summary of the exact verification of the counting bounds.
#[derive(Debug, Clone, Serialize)]
pub struct CombinatorialReport {
    pub n: usize,
    pub nmax: usize,
    pub profiles_checked: usize,
    /// Largest `(|K|!/K!) / (n(2n−1))^{|K|}` seen (must be ≤ 1).
    pub max_distribution_ratio: f64,
    /// Largest `(2|K|)! / (4^{|K|}(|K|!)²)` seen (must be ≤ 1).
    pub max_central_ratio: f64,
}

/// Verifies, in exact integer arithmetic over every profile with
/// `|K| ≤ nmax`, that `|K|! ≤ (n(2n−1))^{|K|}·K!` and that
/// `κ! ≤ (2|K|)! ≤ 4^{|K|}·(|K|!)²`. Panics on a violation — these are
/// theorems, and a failure means the enumeration itself is broken.
pub fn combinatorial_inequalities(n: usize, nmax: usize) -> Result<CombinatorialReport, WickError> {
    let profiles = enumerate_k(n, nmax)?;
    let base = BigUint::from(n * (2 * n - 1));
    let mut max_distribution = 0.0f64;
    let mut max_central = 0.0f64;
    for k in &profiles {
        let t = k.total();
        let t_fact = factorial_big(t);
        let mut k_fact = BigUint::one();
        for &s in k.entries() {
            k_fact *= factorial_big(s);
        }
        let distribution_rhs = base.pow(t as u32) * &k_fact;
        assert!(
            t_fact <= distribution_rhs,
            "distribution bound failed at K = {:?}",
            k.entries()
        );
        max_distribution = max_distribution.max(ratio_f64(&t_fact, &distribution_rhs));

        let mut kappa_fact = BigUint::one();
        for kj in k.valences() {
            kappa_fact *= factorial_big(kj);
        }
        let central = factorial_big(2 * t);
        let central_rhs = BigUint::from(4u32).pow(t as u32) * &t_fact * &t_fact;
        assert!(kappa_fact <= central, "valence factorial exceeded (2|K|)! at {:?}", k.entries());
        assert!(central <= central_rhs, "central bound failed at |K| = {t}");
        max_central = max_central.max(ratio_f64(&central, &central_rhs));
    }
    Ok(CombinatorialReport {
        n,
        nmax,
        profiles_checked: profiles.len(),
        max_distribution_ratio: max_distribution,
        max_central_ratio: max_central,
    })
}

fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    let (nf, df) = (num.to_f64().unwrap_or(f64::INFINITY), den.to_f64().unwrap_or(f64::INFINITY));
    if df.is_finite() {
        nf / df
    } else {
        // Shift both by a common power of two to stay in range.
        let shift = den.bits().saturating_sub(900);
        let n2 = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
        let d2 = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
        n2 / d2
    }
}

// ───────────────────────── the collapse constant ──────────────────────────

/// Norm used by [`lambda_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LambdaNorm {
    Sup,
    Euclidean,
}

impl LambdaNorm {
    fn eval(&self, v: &[f64]) -> f64 {
        match self {
            LambdaNorm::Sup => sup_norm(v),
            LambdaNorm::Euclidean => l2_norm(v),
        }
    }
}

/// Result of estimating the collapse constant of a proper cone.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub lambda: f64,
    /// Number of summands at which the minimum was found.
    pub terms_at_min: usize,
    pub max_terms: usize,
    pub samples: usize,
    pub norm: LambdaNorm,
}

/// The collapse constant
/// `λ = min_{2 ≤ r ≤ max_terms} inf {|η_1 + … + η_r| : η_i ∈ cone,
/// Σ|η_i| = 1}` — how much of the total mass of a cone-supported sum can
/// cancel. Positive for proper cones; a cone containing a line (some
/// generator with its negation inside) is rejected. Estimated by seeded
/// sampling over sparse and dense generator combinations followed by
/// coordinate-descent refinement; the objective is scale-invariant, so
/// the normalization is exact.
pub fn lambda_constant(
    cone: &Cone,
    max_terms: usize,
    norm: LambdaNorm,
    seed: u64,
) -> Result<LambdaReport, WickError> {
    if max_terms < 2 {
        return Err(WickError::InvalidInput("collapse needs at least two summands".into()));
    }
    if cone.pieces.len() != 1 {
        return Err(WickError::InvalidInput("collapse constant needs a single-piece cone".into()));
    }
    let gens = cone.generators();
    if gens.is_empty() {
        return Err(WickError::InvalidInput(
            "collapse constant needs a generator description".into(),
        ));
    }
    for g in gens {
        if cone.contains(&scale(-1.0, g)) {
            return Err(WickError::ImproperCone(format!(
                "generator {g:?} and its negation both lie in the cone"
            )));
        }
    }
    let dim = cone.dim;
    let n_gens = gens.len();
    let value_of = |coeffs: &[Vec<f64>]| -> f64 {
        let mut total = vec![0.0; dim];
        let mut mass = 0.0;
        for row in coeffs {
            let mut eta = vec![0.0; dim];
            for (u, g) in row.iter().zip(gens) {
                if *u != 0.0 {
                    for (e, gc) in eta.iter_mut().zip(g) {
                        *e += u * gc;
                    }
                }
            }
            mass += norm.eval(&eta);
            for (t, e) in total.iter_mut().zip(&eta) {
                *t += e;
            }
        }
        if mass < 1e-12 {
            return f64::INFINITY;
        }
        norm.eval(&total) / mass
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_r = (120_000 / (max_terms - 1)).max(20_000);
    let mut best = f64::INFINITY;
    let mut terms_at_min = 2;
    let mut samples = 0usize;
    for r in 2..=max_terms {
        let mut best_r = f64::INFINITY;
        let mut best_coeffs: Vec<Vec<f64>> = Vec::new();
        for _ in 0..per_r {
            samples += 1;
            let coeffs: Vec<Vec<f64>> = (0..r)
                .map(|_| {
                    let mut row = vec![0.0; n_gens];
                    match rng.gen_range(0..3u8) {
                        0 => row[rng.gen_range(0..n_gens)] = 1.0,
                        1 => {
                            row[rng.gen_range(0..n_gens)] = rng.gen_range(0.05..1.0);
                            row[rng.gen_range(0..n_gens)] = rng.gen_range(0.05..1.0);
                        }
                        _ => {
                            for u in row.iter_mut() {
                                *u = rng.gen_range(0.0..1.0);
                            }
                        }
                    }
                    row
                })
                .collect();
            let v = value_of(&coeffs);
            if v < best_r {
                best_r = v;
                best_coeffs = coeffs;
            }
        }
        // Coordinate-descent refinement of the best sampled configuration.
        let mut step = 0.3f64;
        for _ in 0..60 {
            for i in 0..r {
                for a in 0..n_gens {
                    for sign in [1.0, -1.0] {
                        let old = best_coeffs[i][a];
                        let trial = (old + sign * step * (0.1 + old)).max(0.0);
                        best_coeffs[i][a] = trial;
                        let v = value_of(&best_coeffs);
                        if v < best_r {
                            best_r = v;
                        } else {
                            best_coeffs[i][a] = old;
                        }
                    }
                }
            }
            step *= 0.85;
        }
        if best_r < best {
            best = best_r;
            terms_at_min = r;
        }
    }
    Ok(LambdaReport { lambda: best, terms_at_min, max_terms, samples, norm })
}

/// The collapse constant of the backward cone in the sup norm is exactly
/// one, in any dimension and for any number of summands: every member has
/// `|η|_sup = |η⁰|`, and the time components add with a single sign.
/// Certified numerically by the [`lambda_constant`] tests.
pub const BACKWARD_SUP_LAMBDA: f64 = 1.0;

// ───────────────────── truncated series evaluation ────────────────────────

/// A rigorous bound on the sum of all profile strata beyond a truncation.
#[derive(Debug, Clone, Serialize)]
pub struct TailBound {
    /// The bound itself (may round to infinity; see `ln_value`).
    pub value: f64,
    /// Its natural log, always finite and the monotone quantity.
    pub ln_value: f64,
    /// The decay scale `L = 2X` the bound was assembled at.
    pub l_used: f64,
    /// `ln C̃_L` of the coefficient sequence at that scale.
    pub c_tilde_ln: f64,
    /// Envelope gauge `ĝ` of the evaluation point.
    pub gauge: f64,
    /// The constants accepted by the coefficient condition.
    pub a: f64,
    pub h: f64,
}

/// A truncated evaluation: the chunk-reduced sum over `|K| ≤ truncation`
/// and the tail bound for everything beyond.
#[derive(Debug, Clone)]
pub struct WightmanValue {
    pub n: usize,
    pub truncation: usize,
    pub value: Complex64,
    pub terms: usize,
    pub tail: TailBound,
}

/// Per-slot two-point values `𝐰(ζ_j + … + ζ_{m−1})` in slot order.
/// Relative coordinates `ζ_1..ζ_{n−1}` must each have imaginary part
/// interior to the backward cone (their partial sums then do too).
pub fn slot_values(
    model: &TwoPointModel,
    zeta: &[Vec<Complex64>],
) -> Result<Vec<Complex64>, WickError> {
    let n = zeta.len() + 1;
    if n < 2 {
        return Err(WickError::InvalidInput("need at least one relative coordinate".into()));
    }
    let mut out = Vec::with_capacity(profile_slots(n));
    for (j, m) in MultiIndexK::slot_pairs(n) {
        let mut arg = vec![Complex64::new(0.0, 0.0); model.dim];
        for l in j..m {
            let z = &zeta[l - 1];
            if z.len() != model.dim {
                return Err(WickError::InvalidInput(format!(
                    "coordinate {l} has {} components, model {} expects {}",
                    z.len(),
                    model.name,
                    model.dim
                )));
            }
            for (a, c) in arg.iter_mut().zip(z) {
                *a += c;
            }
        }
        out.push(model.eval(&arg)?);
    }
    Ok(out)
}

/// The per-profile contributions `D_K·Π_{j<m} w_{jm}^{k_{jm}}` for given
/// per-slot two-point values, in enumeration order (`|K|` first, then
/// slot-lexicographic). `w` must have one entry per slot of an `n`-vertex
/// profile.
pub fn profile_series_terms(
    seq: &CoefficientSequence,
    n: usize,
    w: &[Complex64],
    truncation: usize,
) -> Result<Vec<Complex64>, WickError> {
    if w.len() != profile_slots(n) {
        return Err(WickError::InvalidInput(format!(
            "{} slot values supplied, {} vertices need {}",
            w.len(),
            n,
            profile_slots(n)
        )));
    }
    let profiles = enumerate_k(n, truncation)?;
    // Valences stay ≤ 2·truncation; tabulating d once keeps the per-profile
    // work to lookups and multiplications.
    let d_table: Vec<f64> = (0..=2 * truncation).map(|k| seq.d(k)).collect();
    Ok(profiles
        .iter()
        .map(|k| {
            let factor = pairing_factor(k).to_f64().unwrap_or(f64::INFINITY);
            let d = k.valences().iter().fold(factor, |acc, &kj| acc * d_table[kj]);
            let mut term = Complex64::new(d, 0.0);
            for (slot, &pow) in k.entries().iter().enumerate() {
                if pow > 0 {
                    term *= w[slot].powi(pow as i32);
                }
            }
            term
        })
        .collect())
}

/// The per-profile contributions at a tube point: slot values from the
/// model, then [`profile_series_terms`].
pub fn wightman_terms(
    model: &TwoPointModel,
    seq: &CoefficientSequence,
    zeta: &[Vec<Complex64>],
    truncation: usize,
) -> Result<Vec<Complex64>, WickError> {
    let n = zeta.len() + 1;
    let w = slot_values(model, zeta)?;
    profile_series_terms(seq, n, &w, truncation)
}

/// Chunk-reduced complex sum: fixed-size chunks are summed in parallel and
/// their partial sums folded in order, so the result is bit-for-bit
/// identical for every thread count.
pub fn chunked_sum(terms: &[Complex64]) -> Complex64 {
    let partials: Vec<Complex64> =
        terms.par_chunks(256).map(|chunk| chunk.iter().sum::<Complex64>()).collect();
    partials.iter().sum()
}

/// Envelope gauge `ĝ = max(1, w_IR(2n·|ζ|_sup), max_i w_UV(λ·|η_i|_sup))`
/// of an evaluation point under a model's growth envelopes.
pub fn envelope_gauge(model: &TwoPointModel, zeta: &[Vec<Complex64>], lambda: f64) -> f64 {
    let n = zeta.len() + 1;
    let z_sup = zeta
        .iter()
        .flat_map(|z| z.iter())
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let mut g = 1.0f64.max(model.w_ir(2.0 * n as f64 * z_sup));
    for z in zeta {
        let eta_sup = z.iter().map(|c| c.im.abs()).fold(0.0f64, f64::max);
        g = g.max(model.w_uv(lambda * eta_sup));
    }
    g
}

/// `C(t+s−1, s−1)` — the number of profiles of exact size `t` over `s`
/// slots.
fn stratum_count(t: usize, s: usize) -> f64 {
    let mut c = 1.0f64;
    for i in 1..s {
        c *= (t + i) as f64 / i as f64;
    }
    c
}

/// Assembles the rigorous tail bound for a truncated evaluation (see the
/// module docs for the derivation and the constants `A′, h′, X`).
pub fn truncation_tail(
    model: &TwoPointModel,
    seq: &CoefficientSequence,
    zeta: &[Vec<Complex64>],
    truncation: usize,
) -> Result<TailBound, WickError> {
    let n = zeta.len() + 1;
    let s = profile_slots(n);
    let condition = check_coefficient_condition(seq, 64)?;
    if !condition.ok {
        return Err(WickError::TailUnavailable(format!(
            "coefficient condition fails on the scanned range (witness {:?})",
            condition.witness
        )));
    }
    let (a, h) = (condition.a, condition.h);
    let a_prime = a.powi(n as i32 - 1);
    let h_prime = 4.0 * (n * (2 * n - 1)) as f64 * h.powi(2 * (n as i32 - 1));
    let gauge = envelope_gauge(model, zeta, BACKWARD_SUP_LAMBDA);
    let x = h_prime * (n + 1) as f64 * model.bound_constant * gauge;
    let l_used = 2.0 * x;
    let c_tilde_ln = c_tilde_log(seq, l_used).ok_or_else(|| {
        WickError::TailUnavailable(format!("no finite decay constant at L = {l_used:.3e}"))
    })?;
    // T(N) = Σ_{t>N} C(t+s−1, s−1)·2^{−t}, summed directly with a
    // geometric closure (the term ratio tends to 1/2 from above).
    let mut t_sum = 0.0f64;
    let mut t = truncation + 1;
    let mut term = stratum_count(t, s) * 0.5f64.powi(t as i32);
    for _ in 0..400 {
        t_sum += term;
        term *= 0.5 * (t + s) as f64 / (t + 1) as f64;
        t += 1;
    }
    let rho = 0.5 * (t + s) as f64 / (t + 1) as f64;
    t_sum += term * rho / (1.0 - rho);
    let ln_value = a_prime.ln() + ((n + 1) as f64).ln() + c_tilde_ln + t_sum.ln();
    Ok(TailBound { value: ln_value.exp(), ln_value, l_used, c_tilde_ln, gauge, a, h })
}

/// Evaluates the profile series truncated at `|K| ≤ truncation`, with a
/// rigorous tail bound. The sum is reduced in fixed-size chunks whose
/// partial sums are folded in enumeration order, so the result is
/// bit-for-bit identical for every thread count.
pub fn wightman_eval(
    model: &TwoPointModel,
    seq: &CoefficientSequence,
    zeta: &[Vec<Complex64>],
    truncation: usize,
) -> Result<WightmanValue, WickError> {
    let terms = wightman_terms(model, seq, zeta, truncation)?;
    let tail = truncation_tail(model, seq, zeta, truncation)?;
    let value = chunked_sum(&terms);
    Ok(WightmanValue { n: zeta.len() + 1, truncation, value, terms: terms.len(), tail })
}

/// Closed form of the full series for the coupling sequence
/// `d_k = g^k/k!`: the profile coefficient collapses to `g^{2|K|}/K!`,
/// and the sum factorizes as `Π_{j<m} exp(g²·w_{jm})`.
pub fn exponential_closed_form(
    model: &TwoPointModel,
    g: f64,
    zeta: &[Vec<Complex64>],
) -> Result<Complex64, WickError> {
    let w = slot_values(model, zeta)?;
    Ok(w.iter().map(|wv| (wv * g * g).exp()).product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::factorial_f64;
    use approx::assert_relative_eq;

    fn frozen_zeta() -> Vec<Vec<Complex64>> {
        vec![
            vec![Complex64::new(0.3, -1.0), Complex64::new(-0.2, 0.2)],
            vec![Complex64::new(-0.5, -0.8), Complex64::new(0.4, -0.1)],
        ]
    }

    #[test]
    fn slot_order_and_valences() {
        assert_eq!(MultiIndexK::slot_pairs(4), vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        let k = MultiIndexK::new(4, vec![1, 0, 2, 3, 0, 1]).unwrap();
        assert_eq!(k.get(1, 2), 1);
        assert_eq!(k.get(1, 4), 2);
        assert_eq!(k.get(2, 3), 3);
        // κ_1 = 1+0+2, κ_2 = 1+3+0, κ_3 = 0+3+1, κ_4 = 2+0+1.
        assert_eq!(k.valences(), vec![3, 4, 4, 3]);
        assert_eq!(k.total(), 7);
        assert_eq!(k.valences().iter().sum::<usize>(), 2 * k.total());
    }

    #[test]
    fn enumeration_is_ordered_and_complete() {
        let two = enumerate_k(2, 3).unwrap();
        let flat: Vec<Vec<usize>> = two.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(flat, vec![vec![0], vec![1], vec![2], vec![3]]);

        let three = enumerate_k(3, 1).unwrap();
        let flat: Vec<Vec<usize>> = three.iter().map(|k| k.entries().to_vec()).collect();
        assert_eq!(flat, vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);

        // Σ_{t ≤ 6} C(t+2, 2) = C(9, 3) = 84 profiles on three slots.
        assert_eq!(enumerate_k(3, 6).unwrap().len(), 84);
        for k in enumerate_k(4, 3).unwrap() {
            assert_eq!(k.valences().iter().sum::<usize>(), 2 * k.total());
        }
        assert!(enumerate_k(1, 3).is_err());
    }

    #[test]
    fn pairing_factor_counts_simple_cases() {
        // Two vertices, k contractions: k! ways to match k legs to k legs.
        for k in 0..=6usize {
            let profile = MultiIndexK::new(2, vec![k]).unwrap();
            assert_eq!(pairing_factor(&profile), factorial_big(k));
        }
        // The triangle profile (1,1,1) on valences (2,2,2): 2³ = 8.
        let triangle = MultiIndexK::new(3, vec![1, 1, 1]).unwrap();
        assert_eq!(pairing_factor(&triangle), BigUint::from(8u32));
        assert_eq!(pairing_factor(&MultiIndexK::zero(4)), BigUint::one());
    }

    #[test]
    fn brute_force_census_agrees_with_the_closed_count() {
        // Every profile with |K| ≤ 3 on three vertices, and |K| ≤ 2 on
        // four: the labeled-leg census must reproduce κ!/K! exactly.
        for (n, nmax) in [(3usize, 3usize), (4, 2)] {
            for k in enumerate_k(n, nmax).unwrap() {
                let census = pairing_oracle(n, &k.valences()).unwrap();
                let count = census.get(k.entries()).cloned().unwrap_or_else(BigUint::zero);
                assert_eq!(count, pairing_factor(&k), "profile {:?}", k.entries());
                // And every profile in the census matches its own count.
                for (entries, c) in &census {
                    let p = MultiIndexK::new(n, entries.clone()).unwrap();
                    assert_eq!(c, &pairing_factor(&p));
                }
            }
        }
    }

    #[test]
    fn census_rejects_unmatchable_valences() {
        // Odd totals and same-vertex surpluses admit no matching.
        assert!(pairing_oracle(2, &[1, 2]).unwrap().is_empty());
        assert!(pairing_oracle(2, &[2, 0]).unwrap().is_empty());
        assert!(pairing_oracle(2, &[3, 1]).unwrap().is_empty());
        let single = pairing_oracle(2, &[1, 1]).unwrap();
        assert_eq!(single.get(&vec![1usize][..]), Some(&BigUint::one()));
        assert!(pairing_oracle(2, &[20, 20]).is_err());
    }

    #[test]
    fn profile_coefficients_are_exact() {
        let seq = CoefficientSequence::inverse_factorial();
        // Triangle: 8·d₂³ = 8/8 = 1.
        let triangle = MultiIndexK::new(3, vec![1, 1, 1]).unwrap();
        let c = coefficient_d_k(&triangle, &seq);
        assert_eq!(c.exact.unwrap(), BigRational::one());
        assert_relative_eq!(c.value, 1.0, max_relative = 1e-14);
        // Two vertices: k!·d_k² = 1/k!.
        let k4 = MultiIndexK::new(2, vec![4]).unwrap();
        let c = coefficient_d_k(&k4, &seq);
        assert_eq!(
            c.exact.unwrap(),
            BigRational::new(BigInt::from(1), BigInt::from(24))
        );
        // Coupled closed form: D_K = g^{2|K|}/K!.
        let g = CoefficientSequence::exponential(3, 10).unwrap();
        let c = coefficient_d_k(&triangle, &g);
        let expected = BigRational::new(BigInt::from(3u32.pow(6)), BigInt::from(10u32.pow(6)));
        assert_eq!(c.exact.unwrap(), expected);
    }

    #[test]
    fn coefficient_condition_accepts_factorial_decay() {
        for seq in [
            CoefficientSequence::inverse_factorial(),
            CoefficientSequence::exponential(2, 1).unwrap(),
            CoefficientSequence::exponential(7, 2).unwrap(),
        ] {
            let c = check_coefficient_condition(&seq, 48).unwrap();
            assert!(c.ok);
            // The product ratio is the binomial coefficient C(k+l, k) ≤
            // 2^{k+l}: already the smallest constants work, for any
            // coupling strength.
            assert_eq!((c.a, c.h), (1.0, 2.0));
        }
    }

    #[test]
    fn coefficient_condition_rejects_gaussian_decay() {
        let values: Vec<f64> = (0..=20).map(|k| (-((k * k) as f64)).exp()).collect();
        let seq = CoefficientSequence::custom(values);
        let c = check_coefficient_condition(&seq, 20).unwrap();
        assert!(!c.ok);
        let w = c.witness.expect("failure carries a witness");
        // The ratio d_k·d_l/d_{k+l} = e^{2kl} outruns every A·h^{k+l}.
        assert_relative_eq!(w.ratio, (2.0 * (w.k * w.l) as f64).exp(), max_relative = 1e-9);
        assert!(w.ratio > w.bound);
    }

    #[test]
    fn condition_scan_bounds_are_enforced() {
        let seq = CoefficientSequence::inverse_factorial();
        assert!(check_coefficient_condition(&seq, 0).is_err());
        assert!(check_coefficient_condition(&seq, 65).is_err());
    }

    #[test]
    fn weighted_series_matches_direct_summation() {
        let seq = CoefficientSequence::exponential(3, 10).unwrap();
        let (l_value, w): (f64, f64) = (2.5, 0.8);
        let direct: f64 = (0..40)
            .map(|k| l_value.powi(k) * factorial_f64(k as usize) * seq.d(2 * k as usize).abs() * w.powi(k))
            .sum();
        let series = weighted_series(&seq, l_value, w).unwrap();
        assert_relative_eq!(series.sum, direct, max_relative = 1e-12);
        // k!/(2k)! ≤ 1/(2^k·k!) gives the closed-form ceiling e^{Lwg²/2}.
        let g2 = 0.09;
        assert!(series.sum <= (l_value * w * g2 / 2.0).exp() + 1e-12);
        assert!(series.remainder >= 0.0 && series.remainder < 1e-12 * series.sum);
    }

    #[test]
    fn weighted_series_flags_growing_lists() {
        let ones = CoefficientSequence::custom(vec![1.0; 300]);
        match weighted_series(&ones, 2.0, 1.0) {
            Err(WickError::Divergent(msg)) => assert!(msg.contains("1e100")),
            other => panic!("expected divergence, got {other:?}"),
        }
        // A decaying list sums finitely.
        let decaying = CoefficientSequence::custom((0..40).map(|k| 0.5f64.powi(k)).collect());
        assert!(weighted_series(&decaying, 2.0, 0.1).unwrap().sum.is_finite());
    }

    #[test]
    fn convergence_fit_stays_under_the_comparison_weight() {
        let seq = CoefficientSequence::inverse_factorial();
        let model = TwoPointModel::by_name("dipole2").unwrap();
        let grid: Vec<f64> = (1..=12).map(|i| i as f64 * 2.0).collect();
        let report = convergence_bound_check(
            &seq,
            &|r| model.w_ir(r),
            GrowthRegime::Infrared { alpha: 0.7 },
            3.0,
            0.5,
            &grid,
        )
        .unwrap();
        assert!(report.ok && report.c_fit.is_finite());
        for pair in report.rows.windows(2) {
            assert!(pair[1].point > pair[0].point);
        }
        let uv = convergence_bound_check(
            &seq,
            &|t| model.w_uv(t),
            GrowthRegime::Ultraviolet { beta: 2.0 },
            3.0,
            0.5,
            &(1..=10).map(|i| 0.05 * i as f64).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(uv.ok);
        assert!(convergence_bound_check(
            &seq,
            &|r| r,
            GrowthRegime::Infrared { alpha: 0.0 },
            1.0,
            0.1,
            &[1.0]
        )
        .is_err());
    }

    #[test]
    fn decay_constant_certifies_the_even_subsequence() {
        let seq = CoefficientSequence::inverse_factorial();
        let l_value = 10.0;
        let c_ln = c_tilde_log(&seq, l_value).unwrap();
        for k in 0..=40usize {
            let lhs = (factorial_f64(k) / factorial_f64(2 * k)).ln();
            assert!(
                lhs <= c_ln - (k as f64) * l_value.ln() + 1e-12,
                "decay failed at k = {k}"
            );
        }
        // The supremum is attained, not just bounded: some k comes close.
        let attained = (0..=40).any(|k| {
            let lhs = (factorial_f64(k) / factorial_f64(2 * k)).ln() + (k as f64) * l_value.ln();
            (c_ln - lhs).abs() < 1e-9
        });
        assert!(attained);
    }

    #[test]
    fn combinatorial_bounds_hold_exactly() {
        for n in 2..=4usize {
            let report = combinatorial_inequalities(n, 6).unwrap();
            assert!(report.max_distribution_ratio <= 1.0);
            assert!(report.max_central_ratio <= 1.0);
            assert_eq!(report.n, n);
        }
        // The central bound at |K| = 3 reads 720 ≤ 4³·(3!)² = 2304.
        assert!(factorial_big(6) <= BigUint::from(2304u32));
        // Spot distribution bound: the triangle has |K|!/K! = 6 ≤ 15³.
        let triangle = MultiIndexK::new(3, vec![1, 1, 1]).unwrap();
        let mut k_fact = BigUint::one();
        for &s in triangle.entries() {
            k_fact *= factorial_big(s);
        }
        assert!(factorial_big(3) <= BigUint::from(15u32).pow(3) * k_fact);
    }

    #[test]
    fn collapse_constant_of_the_backward_cone_is_one() {
        let backward2 = Cone::forward_light_cone(2, 8).unwrap().negated();
        let r = lambda_constant(&backward2, 3, LambdaNorm::Sup, 11).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-9, "got {}", r.lambda);
        assert!(r.samples >= 100_000);

        let backward4 = Cone::forward_light_cone(4, 32).unwrap().negated();
        let r = lambda_constant(&backward4, 2, LambdaNorm::Sup, 11).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-9, "got {}", r.lambda);
    }

    #[test]
    fn collapse_constant_sees_cancellation_in_other_geometries() {
        // Orthant, sup norm: mass split across the two axes collapses to ½.
        let r = lambda_constant(&Cone::orthant(2), 3, LambdaNorm::Sup, 13).unwrap();
        assert!((r.lambda - 0.5).abs() < 1e-3, "got {}", r.lambda);
        // Backward cone, Euclidean norm: opposite light rays collapse to
        // 1/√2.
        let backward2 = Cone::forward_light_cone(2, 8).unwrap().negated();
        let r = lambda_constant(&backward2, 3, LambdaNorm::Euclidean, 13).unwrap();
        assert!((r.lambda - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4, "got {}", r.lambda);
        // A single ray cannot cancel at all.
        let ray = Cone::from_generators(2, &[vec![1.0, 2.0]]).unwrap();
        let r = lambda_constant(&ray, 4, LambdaNorm::Sup, 13).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collapse_constant_rejects_improper_cones() {
        assert!(matches!(
            lambda_constant(&Cone::full_space(2), 2, LambdaNorm::Sup, 7),
            Err(WickError::ImproperCone(_))
        ));
        assert!(matches!(
            lambda_constant(&Cone::halfspace(2, 1).unwrap(), 2, LambdaNorm::Sup, 7),
            Err(WickError::ImproperCone(_))
        ));
        assert!(lambda_constant(&Cone::orthant(2), 1, LambdaNorm::Sup, 7).is_err());
    }

    #[test]
    fn truncated_sum_matches_the_factorized_closed_form() {
        // d_k = g^k/k! with g = 3/10 factorizes as Π exp(g²·w_jm); the
        // reference values are 40-digit evaluations at the frozen point.
        let model = TwoPointModel::by_name("dipole2").unwrap();
        let seq = CoefficientSequence::exponential(3, 10).unwrap();
        let zeta = frozen_zeta();
        let eval = wightman_eval(&model, &seq, &zeta, 20).unwrap();
        assert_relative_eq!(eval.value.re, 0.8899282531788984753821415, max_relative = 1e-8);
        assert_relative_eq!(eval.value.im, 0.05684425876938902054694881, max_relative = 1e-8);
        let closed = exponential_closed_form(&model, 0.3, &zeta).unwrap();
        assert_relative_eq!(eval.value.re, closed.re, max_relative = 1e-8);
        assert!((eval.value - closed).norm() <= eval.tail.value);

        // Two vertices against exp(g²·w(ζ₁)), logarithmic and inverse
        // square models.
        let one = vec![zeta[0].clone()];
        let eval2 = wightman_eval(&model, &seq, &one, 16).unwrap();
        assert_relative_eq!(eval2.value.re, 0.9946946470215086581299126, max_relative = 1e-9);
        assert_relative_eq!(eval2.value.im, -0.04650911635603874009800895, max_relative = 1e-9);
        let massless = TwoPointModel::by_name("massless2").unwrap();
        let evalm = wightman_eval(&massless, &seq, &one, 16).unwrap();
        assert_relative_eq!(evalm.value.re, 1.076428274415155904863229, max_relative = 1e-9);
        assert_relative_eq!(evalm.value.im, -0.045887432341452652838055, max_relative = 1e-9);

        // Truncation zero keeps only the empty profile: d₀ⁿ = 1.
        let zero = wightman_eval(&model, &seq, &zeta, 0).unwrap();
        assert_relative_eq!(zero.value.re, 1.0, max_relative = 1e-14);
        assert_eq!(zero.terms, 1);
    }

    #[test]
    fn tail_bound_shrinks_and_controls_stabilization() {
        let model = TwoPointModel::by_name("dipole2").unwrap();
        let seq = CoefficientSequence::exponential(3, 10).unwrap();
        let zeta = frozen_zeta();
        let mut previous_ln = f64::INFINITY;
        for trunc in [4usize, 9, 14, 19] {
            let a = wightman_eval(&model, &seq, &zeta, trunc).unwrap();
            let b = wightman_eval(&model, &seq, &zeta, trunc + 5).unwrap();
            assert!((a.value - b.value).norm() <= a.tail.value);
            assert!(a.tail.ln_value < previous_ln, "tail must shrink with the truncation");
            previous_ln = a.tail.ln_value;
        }
    }

    #[test]
    fn chunked_reduction_is_reordering_safe() {
        use rand::seq::SliceRandom;
        let model = TwoPointModel::by_name("dipole2").unwrap();
        let seq = CoefficientSequence::exponential(3, 10).unwrap();
        let zeta = frozen_zeta();
        let eval = wightman_eval(&model, &seq, &zeta, 12).unwrap();
        let again = wightman_eval(&model, &seq, &zeta, 12).unwrap();
        assert_eq!(eval.value, again.value, "chunked reduction must be deterministic");

        let terms = wightman_terms(&model, &seq, &zeta, 12).unwrap();
        for s in 0..3u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut shuffled = terms.clone();
            shuffled.shuffle(&mut rng);
            let permuted: Complex64 = shuffled.iter().sum();
            let gap = (permuted - eval.value).norm();
            assert!(gap <= 2.0 * eval.tail.value + 1e-12 * eval.value.norm());
            assert!(gap <= 1e-10, "floating-point reordering noise only, got {gap}");
        }
    }

    #[test]
    fn evaluation_rejects_bad_tubes_and_unbounded_tails() {
        let model = TwoPointModel::by_name("dipole2").unwrap();
        let seq = CoefficientSequence::exponential(3, 10).unwrap();
        // Imaginary part outside the backward cone.
        let outside = vec![vec![Complex64::new(0.1, 1.0), Complex64::new(0.0, 0.0)]];
        assert!(matches!(
            wightman_eval(&model, &seq, &outside, 4),
            Err(WickError::TubeViolation(_))
        ));
        // A sequence violating the coefficient condition has no certified
        // tail.
        let gauss = CoefficientSequence::custom((0..=20).map(|k| (-((k * k) as f64)).exp()).collect());
        let zeta = frozen_zeta();
        assert!(matches!(
            wightman_eval(&model, &gauss, &zeta, 4),
            Err(WickError::TailUnavailable(_))
        ));
    }
}
