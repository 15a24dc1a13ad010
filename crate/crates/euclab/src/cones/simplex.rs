//! A small dense linear-programming solver (two-phase primal simplex).
//!
//! Every geometric query in this crate reduces to a linear program with at
//! most a few dozen variables and constraints: sup-norm distances to
//! polyhedral cones, membership as zero distance, conic-combination
//! feasibility. At that size a dense tableau with Bland's anti-cycling rule
//! is exact (up to rounding), dependency-free and easy to audit — which
//! matters more here than speed.
//!
//! The interface accepts the natural mixed form — free or nonnegative
//! variables, `≤ / = / ≥` rows — and standardizes internally (free
//! variables split, slack and artificial columns appended).

use thiserror::Error;

/// Relation of one linear constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

/// One constraint `coeffs · x  rel  rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rel: Rel,
    pub rhs: f64,
}

/// A linear program `min objective · x` subject to constraints, with each
/// variable either free or restricted to `x_j ≥ 0`.
#[derive(Debug, Clone)]
pub struct Lp {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// `free[j]` ⇒ variable `j` is unrestricted; otherwise `x_j ≥ 0`.
    pub free: Vec<bool>,
}

/// Solution of a feasible bounded program.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded below")]
    Unbounded,
    #[error("malformed program: {0}")]
    Malformed(String),
}

/// Reduced-cost optimality threshold.
const TOL: f64 = 1e-9;
/// Smallest tableau entry accepted as a pivot: pivoting on tiny elements
/// divides a whole row by them and amplifies roundoff catastrophically.
const PIVOT_TOL: f64 = 1e-9;

/// Solve `lp` with the two-phase primal simplex method (Bland's rule).
pub fn solve(lp: &Lp) -> Result<LpSolution, LpError> {
    if lp.objective.len() != lp.n_vars || lp.free.len() != lp.n_vars {
        return Err(LpError::Malformed("objective/free length mismatch".into()));
    }
    for c in &lp.constraints {
        if c.coeffs.len() != lp.n_vars {
            return Err(LpError::Malformed("constraint length mismatch".into()));
        }
    }

    // ── standardize ──
    // Column map: for each original variable, one column (x ≥ 0) or a
    // (plus, minus) pair (free: x = x⁺ − x⁻).
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(lp.n_vars);
    let mut n_cols = 0usize;
    for j in 0..lp.n_vars {
        if lp.free[j] {
            col_of.push((n_cols, Some(n_cols + 1)));
            n_cols += 2;
        } else {
            col_of.push((n_cols, None));
            n_cols += 1;
        }
    }
    let n_struct = n_cols;

    let m = lp.constraints.len();
    // Rows with rhs sign-normalized to ≥ 0.
    let mut rows: Vec<(Vec<f64>, Rel, f64)> = Vec::with_capacity(m);
    for c in &lp.constraints {
        let (mut coeffs, mut rel, mut rhs) = (c.coeffs.clone(), c.rel, c.rhs);
        if rhs < 0.0 {
            for a in &mut coeffs {
                *a = -*a;
            }
            rhs = -rhs;
            rel = match rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
        }
        rows.push((coeffs, rel, rhs));
    }

    // Count slack and artificial columns.
    let n_slack = rows.iter().filter(|(_, rel, _)| *rel != Rel::Eq).count();
    let n_art = rows.iter().filter(|(_, rel, _)| *rel != Rel::Le).count();
    let total = n_struct + n_slack + n_art;

    // Tableau: m rows × (total + 1) with the rhs in the last column.
    let mut t = vec![vec![0.0; total + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut slack_at = n_struct;
    let mut art_at = n_struct + n_slack;
    let mut artificial_cols = Vec::new();

    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        for j in 0..lp.n_vars {
            let (plus, minus) = col_of[j];
            t[i][plus] += coeffs[j];
            if let Some(mi) = minus {
                t[i][mi] -= coeffs[j];
            }
        }
        t[i][total] = *rhs;
        match rel {
            Rel::Le => {
                t[i][slack_at] = 1.0;
                basis[i] = slack_at;
                slack_at += 1;
            }
            Rel::Ge => {
                t[i][slack_at] = -1.0;
                slack_at += 1;
                t[i][art_at] = 1.0;
                basis[i] = art_at;
                artificial_cols.push(art_at);
                art_at += 1;
            }
            Rel::Eq => {
                t[i][art_at] = 1.0;
                basis[i] = art_at;
                artificial_cols.push(art_at);
                art_at += 1;
            }
        }
    }

    let is_artificial = {
        let mut mask = vec![false; total];
        for &c in &artificial_cols {
            mask[c] = true;
        }
        mask
    };

    // ── phase 1: minimize the sum of artificials ──
    if !artificial_cols.is_empty() {
        let mut cost1 = vec![0.0; total];
        for &c in &artificial_cols {
            cost1[c] = 1.0;
        }
        let feasible = run_simplex(&mut t, &mut basis, &cost1, &vec![false; total])?;
        let phase1_value: f64 = basis
            .iter()
            .enumerate()
            .map(|(i, &b)| if is_artificial[b] { t[i][total] } else { 0.0 })
            .sum();
        debug_assert!(feasible, "phase 1 cannot be unbounded");
        if phase1_value > 1e-8 {
            return Err(LpError::Infeasible);
        }
        // Pivot lingering artificials (basic at zero) out of the basis.
        for i in 0..m {
            if is_artificial[basis[i]] {
                if let Some(j) = (0..total).find(|&j| !is_artificial[j] && t[i][j].abs() > 1e-9) {
                    pivot(&mut t, &mut basis, i, j);
                }
                // A row with no non-artificial entry is redundant; its
                // artificial stays basic at zero and is harmless because the
                // artificial columns are banned from entering in phase 2.
            }
        }
    }

    // ── phase 2 ──
    let mut cost2 = vec![0.0; total];
    for j in 0..lp.n_vars {
        let (plus, minus) = col_of[j];
        cost2[plus] += lp.objective[j];
        if let Some(mi) = minus {
            cost2[mi] -= lp.objective[j];
        }
    }
    let bounded = run_simplex(&mut t, &mut basis, &cost2, &is_artificial)?;
    if !bounded {
        return Err(LpError::Unbounded);
    }

    // Read off the solution.
    let mut xs = vec![0.0; total];
    for (i, &b) in basis.iter().enumerate() {
        xs[b] = t[i][total];
    }
    let mut x = vec![0.0; lp.n_vars];
    for j in 0..lp.n_vars {
        let (plus, minus) = col_of[j];
        x[j] = xs[plus] - minus.map_or(0.0, |mi| xs[mi]);
    }
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { x, value })
}

/// Run the simplex loop to optimality for the given cost vector.
/// Returns `Ok(true)` at an optimum, `Ok(false)` when unbounded.
fn run_simplex(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    banned: &[bool],
) -> Result<bool, LpError> {
    let m = t.len();
    let total = cost.len();
    let max_iter = 500 * (total + m + 1);
    for _ in 0..max_iter {
        // Reduced costs r_j = c_j − c_B · column_j (recomputed each pivot:
        // cheaper to audit than objective-row maintenance, and these
        // tableaus are tiny).
        let mut entering = None;
        for j in 0..total {
            if banned[j] || basis.contains(&j) {
                continue;
            }
            let mut r = cost[j];
            for i in 0..m {
                r -= cost[basis[i]] * t[i][j];
            }
            if r < -TOL {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(j) = entering else { return Ok(true) };

        // Ratio test, ties broken by smallest basis column (Bland).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][j] > PIVOT_TOL {
                let ratio = t[i][total] / t[i][j];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - TOL || (ratio < lr + TOL && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else { return Ok(false) };
        pivot(t, basis, i, j);
    }
    Err(LpError::Malformed("simplex iteration limit exceeded".into()))
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let m = t.len();
    let width = t[row].len();
    let p = t[row][col];
    for v in &mut t[row] {
        *v /= p;
    }
    for i in 0..m {
        if i != row && t[i][col].abs() > 0.0 {
            let factor = t[i][col];
            for j in 0..width {
                t[i][j] -= factor * t[row][j];
            }
            t[i][col] = 0.0;
        }
    }
    basis[row] = col;
}
