//! The test-function literal grammar used by configuration files and the
//! CLI.
//!
//! ```text
//! tf{ dim=K, P="<poly>", Q="<poly>" [, support="<cone literal>" [, flat=C]] }
//! ```
//!
//! `P` is the polynomial prefactor and `Q` the exponent polynomial, both in
//! variables `w1 … wK` (see [`super::poly::Poly::parse`] for their grammar);
//! the function is `P(w)·exp(Q(w))`. `P` may be omitted and defaults to
//! `"1"`. `support` restricts the carrier to a cone (its value is a cone
//! literal in quotes) and multiplies in the flat boundary factor
//! `exp(C·Σᵢ 1/dᵢ(x))` — one reciprocal-distance term per bounding face —
//! with strength `flat = C < 0`; `flat` defaults to `-1` and is only
//! meaningful together with `support`.
//!
//! ```
//! use euclab::spaces::parse::parse_test_function;
//! use euclab::spaces::ComplexMap;
//!
//! let f = parse_test_function(r#"tf{dim=2, P="1", Q="-w1^2 - w2^3"}"#).unwrap();
//! assert_eq!(f.dim(), 2);
//! assert!(f.is_entire());
//!
//! let g = parse_test_function(
//!     r#"tf{dim=1, Q="-w1^2", support="halfspace{dim=1, axis=1}", flat=-0.5}"#,
//! )
//! .unwrap();
//! assert!(!g.is_entire());
//! assert_eq!(g.eval_real(&[-1.0]).norm(), 0.0);
//! ```

use thiserror::Error;

use crate::cones::parse::{parse_cone, ConeParseError};

use super::{SpaceError, TestFunction};

/// Errors from test-function literal parsing.
#[derive(Debug, Error)]
pub enum TfParseError {
    #[error("tf literal: unexpected end of input")]
    UnexpectedEnd,
    #[error("tf literal: unexpected `{found}` at byte {at}")]
    Unexpected { found: String, at: usize },
    #[error("tf literal: unknown key `{0}`")]
    UnknownKey(String),
    #[error("tf literal: missing key `{0}`")]
    MissingKey(String),
    #[error("tf literal: bad value for `{0}`")]
    BadValue(String),
    #[error("tf literal: {0}")]
    Cone(#[from] ConeParseError),
    #[error("tf literal: {0}")]
    Construction(#[from] SpaceError),
}

/// Parse a test-function literal (see the module docs for the grammar).
pub fn parse_test_function(input: &str) -> Result<TestFunction, TfParseError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0 };
    let ctor = p.ident()?;
    if ctor != "tf" {
        return Err(TfParseError::Unexpected { found: ctor, at: 0 });
    }
    p.eat(b'{')?;
    let mut pairs: Vec<(String, Value)> = Vec::new();
    if p.peek() != Some(b'}') {
        loop {
            let key = p.ident()?;
            p.eat(b'=')?;
            let value = p.value()?;
            pairs.push((key, value));
            match p.peek() {
                Some(b',') => {
                    p.pos += 1;
                }
                _ => break,
            }
        }
    }
    p.eat(b'}')?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.unexpected());
    }
    build(&pairs)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Str(String),
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn unexpected(&self) -> TfParseError {
        match self.src.get(self.pos) {
            None => TfParseError::UnexpectedEnd,
            Some(&c) => TfParseError::Unexpected { found: (c as char).to_string(), at: self.pos },
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), TfParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn ident(&mut self) -> Result<String, TfParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.unexpected());
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<f64, TfParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit()
                || self.src[self.pos] == b'.'
                || self.src[self.pos] == b'e'
                || self.src[self.pos] == b'E'
                || (self.pos > start
                    && matches!(self.src[self.pos], b'+' | b'-')
                    && matches!(self.src[self.pos - 1], b'e' | b'E')))
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.unexpected())
    }

    fn value(&mut self) -> Result<Value, TfParseError> {
        match self.peek() {
            Some(b'"') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != b'"' {
                    self.pos += 1;
                }
                if self.pos == self.src.len() {
                    return Err(TfParseError::UnexpectedEnd);
                }
                let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.pos += 1;
                Ok(Value::Str(s))
            }
            _ => Ok(Value::Number(self.number()?)),
        }
    }
}

fn build(pairs: &[(String, Value)]) -> Result<TestFunction, TfParseError> {
    for (k, _) in pairs {
        if !["dim", "P", "Q", "support", "flat"].contains(&k.as_str()) {
            return Err(TfParseError::UnknownKey(k.clone()));
        }
    }
    let find = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    let dim = match find("dim") {
        Some(Value::Number(x)) if *x >= 1.0 && x.fract() == 0.0 => *x as usize,
        Some(_) => return Err(TfParseError::BadValue("dim".into())),
        None => return Err(TfParseError::MissingKey("dim".into())),
    };
    let poly = match find("P") {
        Some(Value::Str(s)) => s.as_str(),
        Some(_) => return Err(TfParseError::BadValue("P".into())),
        None => "1",
    };
    let expo = match find("Q") {
        Some(Value::Str(s)) => s.as_str(),
        Some(_) => return Err(TfParseError::BadValue("Q".into())),
        None => return Err(TfParseError::MissingKey("Q".into())),
    };
    let mut f = TestFunction::from_exprs(dim, poly, expo)?;
    match (find("support"), find("flat")) {
        (None, None) => {}
        (None, Some(_)) => return Err(TfParseError::BadValue("flat (needs support)".into())),
        (Some(Value::Str(lit)), flat) => {
            let region = parse_cone(lit)?;
            let coeff = match flat {
                None => -1.0,
                Some(Value::Number(c)) => *c,
                Some(_) => return Err(TfParseError::BadValue("flat".into())),
            };
            f = f.with_support(region, coeff)?;
        }
        (Some(_), _) => return Err(TfParseError::BadValue("support".into())),
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn literal_matches_builder() {
        let parsed = parse_test_function(r#"tf{dim=2, P="w1", Q="-w1^2 - w2^2"}"#).unwrap();
        let built = TestFunction::from_exprs(2, "w1", "-w1^2 - w2^2").unwrap();
        for x in [[0.0, 0.0], [1.0, -2.0], [0.3, 0.7]] {
            assert_relative_eq!(
                parsed.eval_real(&x).re,
                built.eval_real(&x).re,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn prefactor_defaults_to_one() {
        let f = parse_test_function(r#"tf{dim=1, Q="-w1^2"}"#).unwrap();
        assert_relative_eq!(f.eval_real(&[0.0]).re, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn support_literal_restricts_the_carrier() {
        let f = parse_test_function(
            r#"tf{dim=1, Q="-w1^2", support="halfspace{dim=1, axis=1}", flat=-2.0}"#,
        )
        .unwrap();
        assert!(!f.is_entire());
        assert_eq!(f.eval_real(&[-0.5]).norm(), 0.0);
        assert!(f.eval_real(&[1.0]).norm() > 0.0);
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(matches!(
            parse_test_function(r#"tf{dim=1, Q="-w1^2", spin=3}"#),
            Err(TfParseError::UnknownKey(_))
        ));
        assert!(matches!(
            parse_test_function(r#"tf{Q="-w1^2"}"#),
            Err(TfParseError::MissingKey(_))
        ));
        assert!(matches!(
            parse_test_function(r#"tf{dim=1, Q="-w1^2", flat=-1.0}"#),
            Err(TfParseError::BadValue(_))
        ));
        assert!(matches!(
            parse_test_function(r#"tf{dim=1, Q="-w1^2", flat=1.0, support="orthant{dim=1}"}"#),
            Err(TfParseError::Construction(_))
        ));
        assert!(parse_test_function(r#"tf{dim=1, Q="-w1^2"} trailing"#).is_err());
        assert!(matches!(
            parse_test_function(r#"cone{dim=1}"#),
            Err(TfParseError::Unexpected { .. })
        ));
    }
}
