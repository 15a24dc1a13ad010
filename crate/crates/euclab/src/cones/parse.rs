//! The cone literal grammar used by configuration files and the CLI.
//!
//! ```text
//! expr  := term ( 'x' term )*            products concatenate dimensions
//! term  := [ '-' ] atom                  '-' negates the cone pointwise
//! atom  := cone{ dim=K, gens=[[..],..] [, halfspaces=[[..],..]] [, open=true] }
//!        | orthant{ dim=K }              nonnegative orthant of R^K
//!        | halfspace{ dim=K, axis=J }    { p : p_J ≥ 0 }   (J is 1-based)
//!        | lightcone{ dim=D [, facets=N] }   forward cone, D ∈ {2, 3, 4}
//!        | origin{ dim=K }               the degenerate cone {0}
//!        | full{ dim=K }                 all of R^K
//! ```
//!
//! Numbers are plain decimals; whitespace is free. Examples:
//!
//! ```
//! use euclab::cones::parse::parse_cone;
//!
//! let lc = parse_cone("cone{dim=2, gens=[[1,1],[1,-1]]}").unwrap();
//! assert!(lc.contains(&[1.0, 0.5]));
//!
//! let tube = parse_cone("lightcone{dim=2} x lightcone{dim=2}").unwrap();
//! assert_eq!(tube.dim, 4);
//!
//! let backward = parse_cone("-lightcone{dim=2}").unwrap();
//! assert!(backward.contains(&[-1.0, 0.5]));
//! ```

use super::{Cone, ConeError};
use thiserror::Error;

/// Errors from cone literal parsing.
#[derive(Debug, Error)]
pub enum ConeParseError {
    #[error("cone literal: unexpected end of input")]
    UnexpectedEnd,
    #[error("cone literal: unexpected `{found}` at byte {at}")]
    Unexpected { found: String, at: usize },
    #[error("cone literal: unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("cone literal: unknown key `{key}` for `{ctor}`")]
    UnknownKey { ctor: String, key: String },
    #[error("cone literal: missing key `{key}` for `{ctor}`")]
    MissingKey { ctor: String, key: String },
    #[error("cone literal: bad value for `{0}`")]
    BadValue(String),
    #[error("cone construction failed: {0}")]
    Construction(#[from] ConeError),
}

/// Parse a cone literal (see the module docs for the grammar).
pub fn parse_cone(input: &str) -> Result<Cone, ConeParseError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0 };
    let cone = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.unexpected());
    }
    Ok(cone)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Bool(bool),
    Matrix(Vec<Vec<f64>>),
}

impl Value {
    fn as_usize(&self, key: &str) -> Result<usize, ConeParseError> {
        match self {
            Value::Number(x) if *x >= 0.0 && x.fract() == 0.0 => Ok(*x as usize),
            _ => Err(ConeParseError::BadValue(key.to_string())),
        }
    }
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

    fn unexpected(&self) -> ConeParseError {
        match self.src.get(self.pos) {
            None => ConeParseError::UnexpectedEnd,
            Some(&c) => ConeParseError::Unexpected { found: (c as char).to_string(), at: self.pos },
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), ConeParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn ident(&mut self) -> Result<String, ConeParseError> {
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

    fn number(&mut self) -> Result<f64, ConeParseError> {
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

    fn expr(&mut self) -> Result<Cone, ConeParseError> {
        let mut acc = self.term()?;
        loop {
            // A product operator is a lone `x` followed by `-` or a letter.
            let save = self.pos;
            self.skip_ws();
            if self.src.get(self.pos) == Some(&b'x') {
                self.pos += 1;
                let rhs = self.term()?;
                acc = acc.product(&rhs)?;
            } else {
                self.pos = save;
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Cone, ConeParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.atom()?.negated());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Cone, ConeParseError> {
        let ctor = self.ident()?;
        self.eat(b'{')?;
        let mut pairs: Vec<(String, Value)> = Vec::new();
        if self.peek() != Some(b'}') {
            loop {
                let key = self.ident()?;
                self.eat(b'=')?;
                let value = self.value()?;
                pairs.push((key, value));
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
        }
        self.eat(b'}')?;
        build(&ctor, &pairs)
    }

    fn value(&mut self) -> Result<Value, ConeParseError> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut rows = Vec::new();
                if self.peek() != Some(b']') {
                    loop {
                        self.eat(b'[')?;
                        let mut row = Vec::new();
                        if self.peek() != Some(b']') {
                            loop {
                                row.push(self.number()?);
                                match self.peek() {
                                    Some(b',') => {
                                        self.pos += 1;
                                    }
                                    _ => break,
                                }
                            }
                        }
                        self.eat(b']')?;
                        rows.push(row);
                        match self.peek() {
                            Some(b',') => {
                                self.pos += 1;
                            }
                            _ => break,
                        }
                    }
                }
                self.eat(b']')?;
                Ok(Value::Matrix(rows))
            }
            Some(b't') | Some(b'f') => {
                let word = self.ident()?;
                match word.as_str() {
                    "true" => Ok(Value::Bool(true)),
                    "false" => Ok(Value::Bool(false)),
                    other => Err(ConeParseError::BadValue(other.to_string())),
                }
            }
            _ => Ok(Value::Number(self.number()?)),
        }
    }
}

fn build(ctor: &str, pairs: &[(String, Value)]) -> Result<Cone, ConeParseError> {
    let find = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v);
    let require = |key: &str| {
        find(key).ok_or_else(|| ConeParseError::MissingKey {
            ctor: ctor.to_string(),
            key: key.to_string(),
        })
    };
    let allow = |keys: &[&str]| -> Result<(), ConeParseError> {
        for (k, _) in pairs {
            if !keys.contains(&k.as_str()) {
                return Err(ConeParseError::UnknownKey { ctor: ctor.to_string(), key: k.clone() });
            }
        }
        Ok(())
    };

    match ctor {
        "cone" => {
            allow(&["dim", "gens", "halfspaces", "open"])?;
            let dim = require("dim")?.as_usize("dim")?;
            let gens = match find("gens") {
                Some(Value::Matrix(m)) => m.clone(),
                Some(_) => return Err(ConeParseError::BadValue("gens".into())),
                None => Vec::new(),
            };
            let halfspaces = match find("halfspaces") {
                Some(Value::Matrix(m)) => m.clone(),
                Some(_) => return Err(ConeParseError::BadValue("halfspaces".into())),
                None => Vec::new(),
            };
            if gens.is_empty() && halfspaces.is_empty() {
                return Err(ConeParseError::MissingKey { ctor: ctor.into(), key: "gens".into() });
            }
            let mut cone = if halfspaces.is_empty() {
                Cone::from_generators(dim, &gens)?
            } else if gens.is_empty() {
                Cone::from_halfspaces(dim, &halfspaces)?
            } else {
                Cone::from_both(dim, &gens, &halfspaces)?
            };
            if let Some(Value::Bool(true)) = find("open") {
                cone = cone.open();
            }
            Ok(cone)
        }
        "orthant" => {
            allow(&["dim"])?;
            Ok(Cone::orthant(require("dim")?.as_usize("dim")?))
        }
        "halfspace" => {
            allow(&["dim", "axis"])?;
            let dim = require("dim")?.as_usize("dim")?;
            let axis = require("axis")?.as_usize("axis")?;
            if axis == 0 {
                return Err(ConeParseError::BadValue("axis (1-based)".into()));
            }
            Ok(Cone::halfspace(dim, axis - 1)?)
        }
        "lightcone" => {
            allow(&["dim", "facets"])?;
            let dim = require("dim")?.as_usize("dim")?;
            let facets = match find("facets") {
                Some(v) => v.as_usize("facets")?,
                None => 64,
            };
            Ok(Cone::forward_light_cone(dim, facets)?)
        }
        "origin" => {
            allow(&["dim"])?;
            Ok(Cone::origin(require("dim")?.as_usize("dim")?))
        }
        "full" => {
            allow(&["dim"])?;
            Ok(Cone::full_space(require("dim")?.as_usize("dim")?))
        }
        other => Err(ConeParseError::UnknownConstructor(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_light_cone_matches_builder() {
        let parsed = parse_cone("cone{dim=2, gens=[[1,1],[1,-1]]}").unwrap();
        let built = Cone::forward_light_cone(2, 0).unwrap();
        for p in [[1.0, 0.5], [0.5, 1.0], [-1.0, 0.0], [2.0, -2.0]] {
            assert_eq!(parsed.contains(&p), built.contains(&p), "at {p:?}");
        }
    }

    #[test]
    fn product_concatenates_dimensions() {
        let c = parse_cone("orthant{dim=1} x orthant{dim=1}").unwrap();
        assert_eq!(c.dim, 2);
        assert!(c.contains(&[1.0, 2.0]));
        assert!(!c.contains(&[1.0, -2.0]));
    }

    #[test]
    fn negation_prefix() {
        let back = parse_cone("-lightcone{dim=2}").unwrap();
        assert!(back.contains(&[-1.0, 0.5]));
        assert!(!back.contains(&[1.0, 0.5]));
    }

    #[test]
    fn halfspace_literal_is_one_based() {
        let c = parse_cone("halfspace{dim=2, axis=2}").unwrap();
        assert!(c.contains(&[-7.0, 1.0]));
        assert!(!c.contains(&[-7.0, -1.0]));
    }

    #[test]
    fn whitespace_is_free() {
        assert!(parse_cone("  cone{ dim = 2 ,\n gens = [ [ 1 , 1 ] , [ 1 , -1 ] ] }  ").is_ok());
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(matches!(
            parse_cone("cone{dim=2, gens=[[1,1]], spin=3}"),
            Err(ConeParseError::UnknownKey { .. })
        ));
        assert!(matches!(
            parse_cone("blob{dim=2}"),
            Err(ConeParseError::UnknownConstructor(_))
        ));
        assert!(matches!(
            parse_cone("cone{gens=[[1,1]]}"),
            Err(ConeParseError::MissingKey { .. })
        ));
        assert!(parse_cone("cone{dim=2, gens=[[1,1]]} trailing").is_err());
    }
}
