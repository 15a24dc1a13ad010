//! Small numeric helpers shared across the crate.
//!
//! Everything here is deliberately tiny: slice reductions, grids, factorials
//! and multi-index walks. Dimensions never exceed a handful, so `Vec<f64>`
//! vectors and explicit loops are the right tool.

use num_bigint::BigUint;
use num_traits::One;

// ─────────────────────────── slice reductions ───────────────────────────

/// Maximum of `|x_i|` over the slice (sup norm); 0 for an empty slice.
pub fn sup_norm(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

/// Euclidean norm of the slice.
pub fn l2_norm(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sum of `|x_i|` over the slice (ℓ¹ norm).
pub fn l1_norm(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.abs()).sum()
}

/// Standard dot product `Σ x_i y_i`; panics if lengths differ.
pub fn dot(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "dot of mismatched lengths");
    xs.iter().zip(ys).map(|(x, y)| x * y).sum()
}

/// Componentwise `xs - ys`.
pub fn sub(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len(), "sub of mismatched lengths");
    xs.iter().zip(ys).map(|(x, y)| x - y).collect()
}

/// Componentwise `xs + ys`.
pub fn add(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len(), "add of mismatched lengths");
    xs.iter().zip(ys).map(|(x, y)| x + y).collect()
}

/// Scalar multiple `c · xs`.
pub fn scale(c: f64, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| c * x).collect()
}

/// Relative gap `|a - b| / max(scale, |a|, |b|)`.
pub fn rel_gap(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(a.abs()).max(b.abs())
}

// ─────────────────────────────── grids ──────────────────────────────────

/// `n` evenly spaced points from `a` to `b` inclusive (`n ≥ 2`).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + h * i as f64).collect()
}

/// Cartesian product of per-axis grids, row-major (last axis fastest).
pub fn grid_product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &x in axis {
                let mut row = prefix.clone();
                row.push(x);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

// ──────────────────────── factorials & multi-indices ────────────────────

/// Exact factorial as a big integer.
pub fn factorial_big(n: usize) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// Factorial as `f64` (exact through 22!, then rounded).
pub fn factorial_f64(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `n^{γ·n}` with the `0^0 = 1` convention used by weight denominators.
pub fn pow_self(n: usize, gamma: f64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (n as f64).powf(gamma * n as f64)
    }
}

/// All multi-indices `λ ∈ ℕ^dim` with `|λ| = Σ λ_i = total`, lexicographic.
pub fn multi_indices_of_order(dim: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    fill(&mut out, &mut cur, 0, total);
    fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, pos: usize, left: usize) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for take in (0..=left).rev() {
            cur[pos] = take;
            fill(out, cur, pos + 1, left - take);
        }
        cur[pos] = 0;
    }
    out
}

/// All multi-indices with `|λ| ≤ max_total`, ordered by `|λ|` then lex.
pub fn multi_indices_up_to(dim: usize, max_total: usize) -> Vec<Vec<usize>> {
    (0..=max_total)
        .flat_map(|t| multi_indices_of_order(dim, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_and_l1_norms() {
        assert_eq!(sup_norm(&[1.0, -3.0, 2.0]), 3.0);
        assert_eq!(l1_norm(&[1.0, -3.0, 2.0]), 6.0);
        assert_eq!(sup_norm(&[]), 0.0);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.0, 1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_product_counts() {
        let g = grid_product(&[vec![0.0, 1.0], vec![5.0, 6.0, 7.0]]);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![0.0, 5.0]);
        assert_eq!(g[5], vec![1.0, 7.0]);
    }

    #[test]
    fn factorials_agree() {
        assert_eq!(factorial_big(6), BigUint::from(720u32));
        assert_eq!(factorial_f64(6), 720.0);
        assert_eq!(factorial_f64(0), 1.0);
    }

    #[test]
    fn multi_index_counts_match_stars_and_bars() {
        // #\{λ ∈ ℕ^3 : |λ| = 4\} = C(4+2, 2) = 15.
        assert_eq!(multi_indices_of_order(3, 4).len(), 15);
        // Σ_{t≤4} C(t+2, 2) = C(7, 3) = 35.
        assert_eq!(multi_indices_up_to(3, 4).len(), 35);
        // Ordering: first by total order, then lexicographic.
        let idx = multi_indices_up_to(2, 2);
        assert_eq!(idx[0], vec![0, 0]);
        assert_eq!(idx[1], vec![1, 0]);
        assert_eq!(idx[2], vec![0, 1]);
    }

    #[test]
    fn pow_self_zero_convention() {
        assert_eq!(pow_self(0, 0.5), 1.0);
        assert_eq!(pow_self(4, 0.5), 16.0); // 4^{0.5·4} = 4² = 16
    }
}
