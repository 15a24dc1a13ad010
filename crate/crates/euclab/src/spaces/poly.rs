//! Sparse multivariate polynomials with complex coefficients.
//!
//! Polynomials appear in two roles: as the prefactor of a test function and
//! as the exponent of its Gaussian-type envelope. Both are written in the
//! variables `w1, ..., wk` and evaluated at complex points. A small
//! expression parser accepts the textual form used by the literal grammar,
//! e.g. `"-w1^2 - w2^3"` or `"2.5*w1*w2^2 + i*w1"`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Errors from [`Poly::parse`].
#[derive(Debug, Error)]
pub enum PolyParseError {
    /// A character that fits no token.
    #[error("unexpected character {found:?} at byte {at}")]
    Unexpected { found: char, at: usize },
    /// The input ended where a factor or exponent was required.
    #[error("unexpected end of input")]
    UnexpectedEnd,
    /// A variable index outside `1..=dim`.
    #[error("variable w{index} outside dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    /// A malformed number literal.
    #[error("malformed number at byte {at}")]
    BadNumber { at: usize },
}

/// A sparse polynomial in `dim` variables over the complex numbers.
///
/// Terms are kept in a canonical order (graded lexicographic exponents) with
/// like terms combined and exact-zero coefficients dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: Vec::new() }
    }

    /// The constant polynomial `1`.
    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// A constant polynomial.
    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// Number of variables.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the polynomial is identically zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The terms as `(exponents, coefficient)` pairs in canonical order.
    pub fn terms(&self) -> &[(Vec<u32>, Complex64)] {
        &self.terms
    }

    /// Adds `c * w^exps`, combining with an existing term when present.
    pub fn add_term(&mut self, exps: Vec<u32>, c: Complex64) {
        assert_eq!(exps.len(), self.dim, "exponent tuple length");
        match self.terms.binary_search_by(|(e, _)| cmp_graded(e, &exps)) {
            Ok(i) => {
                self.terms[i].1 += c;
                if self.terms[i].1 == Complex64::new(0.0, 0.0) {
                    self.terms.remove(i);
                }
            }
            Err(i) => {
                if c != Complex64::new(0.0, 0.0) {
                    self.terms.insert(i, (exps, c));
                }
            }
        }
    }

    /// The largest exponent of each variable across all terms.
    pub fn max_degree_per_var(&self) -> Vec<u32> {
        let mut d = vec![0; self.dim];
        for (e, _) in &self.terms {
            for (j, x) in e.iter().enumerate() {
                d[j] = d[j].max(*x);
            }
        }
        d
    }

    /// Evaluates at a complex point.
    pub fn eval(&self, w: &[Complex64]) -> Complex64 {
        debug_assert_eq!(w.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (j, &k) in e.iter().enumerate() {
                t *= w[j].powu(k);
            }
            acc += t;
        }
        acc
    }

    /// Evaluates at a real point.
    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let w: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.eval(&w)
    }

    /// Parses an expression in the variables `w1..=w{dim}`.
    ///
    /// Grammar: a sum of terms, each term a product of factors joined by an
    /// optional `*`; a factor is a decimal number, the imaginary unit `i`,
    /// or `w<j>` optionally raised by `^<uint>`. No parentheses.
    pub fn parse(src: &str, dim: usize) -> Result<Self, PolyParseError> {
        let bytes = src.as_bytes();
        let mut pos = 0usize;
        let mut poly = Poly::zero(dim);

        skip_ws(bytes, &mut pos);
        let mut first = true;
        while pos < bytes.len() {
            // Term sign: optional for the first term, required separator after.
            let mut sign = 1.0;
            let mut saw_sign = false;
            loop {
                skip_ws(bytes, &mut pos);
                match bytes.get(pos).copied() {
                    Some(b'+') => {
                        pos += 1;
                        saw_sign = true;
                    }
                    Some(b'-') => {
                        sign = -sign;
                        pos += 1;
                        saw_sign = true;
                    }
                    Some(found) => {
                        // A term must be preceded by + or - unless it is the first.
                        if !first && !saw_sign {
                            return Err(PolyParseError::Unexpected {
                                found: found as char,
                                at: pos,
                            });
                        }
                        break;
                    }
                    None => {
                        if !saw_sign {
                            break;
                        }
                        return Err(PolyParseError::UnexpectedEnd);
                    }
                }
            }
            skip_ws(bytes, &mut pos);
            if pos >= bytes.len() {
                break;
            }
            first = false;

            let (exps, coeff) = parse_term(bytes, &mut pos, dim)?;
            poly.add_term(exps, coeff * sign);
            skip_ws(bytes, &mut pos);
        }
        Ok(poly)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (j, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*w{}", j + 1)?,
                    _ => write!(f, "*w{}^{}", j + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Graded lexicographic comparison of exponent tuples.
fn cmp_graded(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let sa: u32 = a.iter().sum();
    let sb: u32 = b.iter().sum();
    sa.cmp(&sb).then_with(|| a.cmp(b))
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

/// One product of factors; returns the combined exponents and coefficient.
fn parse_term(
    bytes: &[u8],
    pos: &mut usize,
    dim: usize,
) -> Result<(Vec<u32>, Complex64), PolyParseError> {
    let mut exps = vec![0u32; dim];
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut any = false;
    loop {
        skip_ws(bytes, pos);
        match bytes.get(*pos).copied() {
            Some(b'w') => {
                *pos += 1;
                let idx = parse_uint(bytes, pos)?;
                if idx < 1 || idx > dim {
                    return Err(PolyParseError::VariableOutOfRange { index: idx, dim });
                }
                let mut power = 1u32;
                skip_ws(bytes, pos);
                if bytes.get(*pos).copied() == Some(b'^') {
                    *pos += 1;
                    skip_ws(bytes, pos);
                    power = parse_uint(bytes, pos)? as u32;
                }
                exps[idx - 1] += power;
                any = true;
            }
            Some(b'i')
                if bytes
                    .get(*pos + 1)
                    .map_or(true, |c| !c.is_ascii_alphanumeric()) =>
            {
                *pos += 1;
                coeff *= Complex64::new(0.0, 1.0);
                any = true;
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = parse_number(bytes, pos)?;
                coeff *= v;
                any = true;
            }
            Some(found) => {
                if any {
                    break;
                }
                return Err(PolyParseError::Unexpected {
                    found: found as char,
                    at: *pos,
                });
            }
            None => {
                if any {
                    break;
                }
                return Err(PolyParseError::UnexpectedEnd);
            }
        }
        // Optional explicit multiplication sign between factors; adjacency
        // of two factors also reads as multiplication.
        skip_ws(bytes, pos);
        match bytes.get(*pos).copied() {
            Some(b'*') => *pos += 1,
            Some(c) if c == b'w' || c == b'i' || c == b'.' || c.is_ascii_digit() => {}
            _ => break,
        }
    }
    Ok((exps, coeff))
}

fn parse_uint(bytes: &[u8], pos: &mut usize) -> Result<usize, PolyParseError> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return match bytes.get(*pos) {
            Some(c) => Err(PolyParseError::Unexpected { found: *c as char, at: *pos }),
            None => Err(PolyParseError::UnexpectedEnd),
        };
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| PolyParseError::BadNumber { at: start })
}

fn parse_number(bytes: &[u8], pos: &mut usize) -> Result<f64, PolyParseError> {
    let start = *pos;
    while *pos < bytes.len() && (bytes[*pos].is_ascii_digit() || bytes[*pos] == b'.') {
        *pos += 1;
    }
    if matches!(bytes.get(*pos), Some(b'e') | Some(b'E')) {
        *pos += 1;
        if matches!(bytes.get(*pos), Some(b'+') | Some(b'-')) {
            *pos += 1;
        }
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
    }
    std::str::from_utf8(&bytes[start..*pos])
        .unwrap()
        .parse()
        .map_err(|_| PolyParseError::BadNumber { at: start })
}
