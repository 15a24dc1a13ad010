//! The functional literal grammar used by configuration files and the CLI.
//!
//! ```text
//! fn{ [dim=K,] atoms=[ {kind=point_mass, at=[…], cone=<cone literal>},
//!                      {kind=derivative_point_mass, at=[…], dir=[…], cone=<cone literal>},
//!                      {kind=density, tf=<tf literal>, cone=<cone literal>} ] }
//! ```
//!
//! Nested cone and test-function literals appear inline, unquoted; the
//! parser captures them by balanced-brace scanning (double-quoted strings
//! inside a literal may contain braces) and hands them to the cone and
//! test-function parsers. `dim` may be omitted, in which case it is read
//! off the first atom.
//!
//! ```
//! use euclab::laplace::parse_functional;
//!
//! let u = parse_functional(
//!     r#"fn{atoms=[{kind=point_mass, at=[1.0, 0.5], cone=orthant{dim=2}}]}"#,
//! )
//! .unwrap();
//! assert_eq!(u.dim(), 2);
//!
//! let v = parse_functional(
//!     r#"fn{dim=1, atoms=[{kind=density,
//!                          tf=tf{dim=1, Q="-w1", support="halfspace{dim=1, axis=1}"},
//!                          cone=halfspace{dim=1, axis=1}}]}"#,
//! )
//! .unwrap();
//! assert_eq!(v.atoms().len(), 1);
//! ```

use thiserror::Error;

use crate::cones::parse::{parse_cone, ConeParseError};
use crate::spaces::parse::{parse_test_function, TfParseError};

use super::{Atom, AtomKind, Functional, LaplaceError};

/// Errors from functional literal parsing.
#[derive(Debug, Error)]
pub enum FnParseError {
    #[error("fn literal: unexpected end of input")]
    UnexpectedEnd,
    #[error("fn literal: unexpected `{found}` at byte {at}")]
    Unexpected { found: String, at: usize },
    #[error("fn literal: unknown key `{0}`")]
    UnknownKey(String),
    #[error("fn literal: missing key `{0}`")]
    MissingKey(String),
    #[error("fn literal: bad value for `{0}`")]
    BadValue(String),
    #[error("fn literal: {0}")]
    Cone(#[from] ConeParseError),
    #[error("fn literal: {0}")]
    TestFunction(#[from] TfParseError),
    #[error("fn literal: {0}")]
    Construction(#[from] LaplaceError),
}

/// Parse a functional literal (see the module docs for the grammar).
pub fn parse_functional(input: &str) -> Result<Functional, FnParseError> {
    let mut p = Parser { src: input.as_bytes(), pos: 0 };
    let ctor = p.ident()?;
    if ctor != "fn" {
        return Err(FnParseError::Unexpected { found: ctor, at: 0 });
    }
    p.eat(b'{')?;
    let mut dim: Option<usize> = None;
    let mut atoms: Option<Vec<Atom>> = None;
    if p.peek() != Some(b'}') {
        loop {
            let key = p.ident()?;
            p.eat(b'=')?;
            match key.as_str() {
                "dim" => {
                    let x = p.number()?;
                    if x < 1.0 || x.fract() != 0.0 {
                        return Err(FnParseError::BadValue("dim".into()));
                    }
                    dim = Some(x as usize);
                }
                "atoms" => atoms = Some(p.atom_list()?),
                other => return Err(FnParseError::UnknownKey(other.into())),
            }
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
    let atoms = atoms.ok_or_else(|| FnParseError::MissingKey("atoms".into()))?;
    if atoms.is_empty() {
        return Err(FnParseError::BadValue("atoms (must be nonempty)".into()));
    }
    let dim = match dim {
        Some(d) => d,
        None => atoms[0].carrier.dim,
    };
    Ok(Functional::new(dim, atoms)?)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
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

    fn unexpected(&self) -> FnParseError {
        match self.src.get(self.pos) {
            None => FnParseError::UnexpectedEnd,
            Some(&c) => FnParseError::Unexpected { found: (c as char).to_string(), at: self.pos },
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), FnParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn ident(&mut self) -> Result<String, FnParseError> {
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

    fn number(&mut self) -> Result<f64, FnParseError> {
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

    fn vector(&mut self) -> Result<Vec<f64>, FnParseError> {
        self.eat(b'[')?;
        let mut xs = Vec::new();
        if self.peek() != Some(b']') {
            loop {
                xs.push(self.number()?);
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
        }
        self.eat(b']')?;
        Ok(xs)
    }

    /// Captures one inline `ident{ … }` block with balanced braces,
    /// skipping over double-quoted strings.
    fn braced_block(&mut self) -> Result<(), FnParseError> {
        self.ident()?;
        self.eat(b'{')?;
        let mut depth = 1usize;
        while self.pos < self.src.len() && depth > 0 {
            match self.src[self.pos] {
                b'"' => {
                    self.pos += 1;
                    while self.pos < self.src.len() && self.src[self.pos] != b'"' {
                        self.pos += 1;
                    }
                    if self.pos == self.src.len() {
                        return Err(FnParseError::UnexpectedEnd);
                    }
                }
                b'{' => depth += 1,
                b'}' => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        if depth > 0 {
            return Err(FnParseError::UnexpectedEnd);
        }
        Ok(())
    }

    /// Captures an inline test-function literal and returns its full text.
    fn literal(&mut self) -> Result<String, FnParseError> {
        self.skip_ws();
        let start = self.pos;
        self.braced_block()?;
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    /// Captures an inline cone expression — terms are `[-]ident{ … }`,
    /// joined by the product operator `x` — and returns its full text.
    fn cone_expr(&mut self) -> Result<String, FnParseError> {
        self.skip_ws();
        let start = self.pos;
        loop {
            if self.peek() == Some(b'-') {
                self.pos += 1;
            }
            self.braced_block()?;
            // A lone `x` continues the product; anything else ends the
            // expression (keys are always followed by `=`).
            let mark = self.pos;
            self.skip_ws();
            let ident_start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            if &self.src[ident_start..self.pos] != b"x" {
                self.pos = mark;
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn atom_list(&mut self) -> Result<Vec<Atom>, FnParseError> {
        self.eat(b'[')?;
        let mut atoms = Vec::new();
        if self.peek() != Some(b']') {
            loop {
                atoms.push(self.atom()?);
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
        }
        self.eat(b']')?;
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<Atom, FnParseError> {
        self.eat(b'{')?;
        let mut kind: Option<String> = None;
        let mut at: Option<Vec<f64>> = None;
        let mut dir: Option<Vec<f64>> = None;
        let mut tf: Option<String> = None;
        let mut cone: Option<String> = None;
        if self.peek() != Some(b'}') {
            loop {
                let key = self.ident()?;
                self.eat(b'=')?;
                match key.as_str() {
                    "kind" => kind = Some(self.ident()?),
                    "at" => at = Some(self.vector()?),
                    "dir" => dir = Some(self.vector()?),
                    "tf" => tf = Some(self.literal()?),
                    "cone" => cone = Some(self.cone_expr()?),
                    other => return Err(FnParseError::UnknownKey(other.into())),
                }
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
        }
        self.eat(b'}')?;
        let kind = kind.ok_or_else(|| FnParseError::MissingKey("kind".into()))?;
        let carrier = parse_cone(&cone.ok_or_else(|| FnParseError::MissingKey("cone".into()))?)?;
        let kind = match kind.as_str() {
            "point_mass" => {
                if dir.is_some() || tf.is_some() {
                    return Err(FnParseError::BadValue("point_mass atom keys".into()));
                }
                AtomKind::PointMass {
                    location: at.ok_or_else(|| FnParseError::MissingKey("at".into()))?,
                }
            }
            "derivative_point_mass" => {
                if tf.is_some() {
                    return Err(FnParseError::BadValue("derivative_point_mass atom keys".into()));
                }
                AtomKind::DerivativePointMass {
                    location: at.ok_or_else(|| FnParseError::MissingKey("at".into()))?,
                    direction: dir.ok_or_else(|| FnParseError::MissingKey("dir".into()))?,
                }
            }
            "density" => {
                if at.is_some() || dir.is_some() {
                    return Err(FnParseError::BadValue("density atom keys".into()));
                }
                let density =
                    parse_test_function(&tf.ok_or_else(|| FnParseError::MissingKey("tf".into()))?)?;
                AtomKind::Density { density }
            }
            _ => return Err(FnParseError::BadValue("kind".into())),
        };
        Ok(Atom { kind, carrier })
    }
}
