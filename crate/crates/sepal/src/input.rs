//! Text grammar for maps, vector fields and directions.
//!
//! ```text
//! # Astorg-type polynomial map over Q(c)
//! param c
//! F.x = x + c*y + x^2
//! F.y = y - y^2
//! blowup [1:0]
//! ```
//!
//! `param NAME` adjoins a free generator; `F.x`/`F.y` define a map,
//! `X.dx`/`X.dy` a vector field (one object per file). `blowup [a:b]`
//! (repeatable, maps only) makes the commands operate on the blow-up
//! transform at that direction. Coefficients are exact: integers, rationals
//! `p/q` and parameter names combined with `+ - * / ^` and parentheses; no
//! floating literals.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::jet::{Jet2, Prec};
use crate::algebra::roots::ProjPoint;
use crate::algebra::tower::{FieldElement, Tower};
use crate::blowup::{blow_up_diffeo, DivisorPoint};
use crate::error::{Error, Result};
use crate::germs::{Diffeo, VectorField};

#[derive(Clone, Debug)]
pub enum GermObject {
    Map(Diffeo),
    Field(VectorField),
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub tower: Tower,
    pub params: Vec<String>,
    pub object: GermObject,
    pub blowups: Vec<ProjPoint>,
}

impl SourceFile {
    /// The map with all `blowup` directives applied, certified to total
    /// degree `target`.
    pub fn prepared_map(&self, target: u32) -> Result<Diffeo> {
        let GermObject::Map(f) = &self.object else {
            return Err(Error::Internal("input file defines a vector field".into()));
        };
        let mut cur = f.clone();
        let n = self.blowups.len() as u32;
        for (i, p) in self.blowups.iter().enumerate() {
            let point = DivisorPoint::from_projective(p)?;
            let step_target = target + (n - 1 - i as u32);
            cur = blow_up_diffeo(&cur, &point, step_target)?;
        }
        Ok(cur)
    }

    pub fn field(&self) -> Result<VectorField> {
        match &self.object {
            GermObject::Field(x) => Ok(x.clone()),
            GermObject::Map(_) => Err(Error::Internal("input file defines a map".into())),
        }
    }
}

// ---- Expression parsing ----------------------------------------------------

struct Lexer<'a> {
    text: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, line: usize, col0: usize) -> Lexer<'a> {
        Lexer {
            text: text.as_bytes(),
            pos: 0,
            line,
            col: col0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col + self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek_byte(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while matches!(self.peek_byte(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
        let Some(b) = self.peek_byte() else {
            return Ok(Tok::End);
        };
        let t = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos;
                while matches!(self.peek_byte(), Some(b'0'..=b'9')) {
                    self.pos += 1;
                }
                if self.peek_byte() == Some(b'.') {
                    return Err(self.err("floating literals are not allowed in symbolic mode"));
                }
                let s = std::str::from_utf8(&self.text[start..self.pos]).expect("digits");
                return Ok(Tok::Int(s.parse().expect("integer")));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = self.pos;
                while matches!(
                    self.peek_byte(),
                    Some(b'a'..=b'z') | Some(b'A'..=b'Z') | Some(b'0'..=b'9') | Some(b'_')
                ) {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ident");
                return Ok(Tok::Ident(s.to_string()));
            }
            _ => return Err(self.err(&format!("unexpected character '{}'", b as char))),
        };
        self.pos += 1;
        Ok(t)
    }
}

struct ExprParser<'a> {
    lexer: Lexer<'a>,
    cur: Tok,
    tower: Tower,
    vars: (String, String),
}

impl<'a> ExprParser<'a> {
    fn new(text: &'a str, line: usize, col0: usize, tower: &Tower, vars: (&str, &str)) -> Result<Self> {
        let mut lexer = Lexer::new(text, line, col0);
        let cur = lexer.next_tok()?;
        Ok(ExprParser {
            lexer,
            cur,
            tower: tower.clone(),
            vars: (vars.0.to_string(), vars.1.to_string()),
        })
    }

    fn bump(&mut self) -> Result<()> {
        self.cur = self.lexer.next_tok()?;
        Ok(())
    }

    fn err(&self, msg: &str) -> Error {
        self.lexer.err(msg)
    }

    fn vars_pair(&self) -> (&str, &str) {
        (&self.vars.0, &self.vars.1)
    }

    fn parse_expr(&mut self) -> Result<Jet2> {
        let mut acc = self.parse_term()?;
        loop {
            match self.cur {
                Tok::Plus => {
                    self.bump()?;
                    acc = acc.add(&self.parse_term()?)?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = acc.sub(&self.parse_term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Jet2> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.cur {
                Tok::Star => {
                    self.bump()?;
                    acc = acc.mul(&self.parse_factor()?)?;
                }
                Tok::Slash => {
                    self.bump()?;
                    let rhs = self.parse_factor()?;
                    if !rhs.is_constant_unit() {
                        return Err(self.err("division only by nonzero constants"));
                    }
                    let c = rhs.coeff(0, 0)?;
                    acc = acc.scale(&c.inv()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Jet2> {
        match self.cur.clone() {
            Tok::Minus => {
                self.bump()?;
                Ok(self.parse_factor()?.neg())
            }
            _ => self.parse_power(),
        }
    }

    fn parse_power(&mut self) -> Result<Jet2> {
        let base = self.parse_atom()?;
        if self.cur == Tok::Caret {
            self.bump()?;
            let Tok::Int(e) = self.cur.clone() else {
                return Err(self.err("exponent must be a nonnegative integer"));
            };
            self.bump()?;
            let e: u32 = e
                .try_into()
                .map_err(|_| self.err("exponent out of range"))?;
            let mut acc = Jet2::constant(FieldElement::one(&self.tower), self.vars_pair(), Prec::EXACT);
            for _ in 0..e {
                acc = acc.mul(&base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Jet2> {
        match self.cur.clone() {
            Tok::Int(n) => {
                self.bump()?;
                Ok(Jet2::constant(
                    FieldElement::from_rational(&self.tower, BigRational::from_integer(n)),
                    self.vars_pair(),
                    Prec::EXACT,
                ))
            }
            Tok::Ident(name) => {
                self.bump()?;
                if name == self.vars.0 {
                    return Ok(Jet2::var1(&self.tower, self.vars_pair(), Prec::EXACT));
                }
                if name == self.vars.1 {
                    return Ok(Jet2::var2(&self.tower, self.vars_pair(), Prec::EXACT));
                }
                if self.tower.find_generator(&name).is_some() {
                    let g = FieldElement::generator(&self.tower, &name)?;
                    return Ok(Jet2::constant(g, self.vars_pair(), Prec::EXACT));
                }
                Err(self.err(&format!("unknown identifier '{name}'")))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.parse_expr()?;
                if self.cur != Tok::RParen {
                    return Err(self.err("expected ')'"));
                }
                self.bump()?;
                Ok(inner)
            }
            _ => Err(self.err("expected a value")),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.cur != Tok::End {
            return Err(self.err("trailing input after expression"));
        }
        Ok(())
    }
}

fn parse_polynomial(
    text: &str,
    line: usize,
    col0: usize,
    tower: &Tower,
    vars: (&str, &str),
) -> Result<Jet2> {
    let mut p = ExprParser::new(text, line, col0, tower, vars)?;
    let e = p.parse_expr()?;
    p.finish()?;
    Ok(e)
}

/// Parse a projective direction literal `[a:b]` over the tower (entries may
/// contain parameter names).
pub fn parse_direction(text: &str, tower: &Tower) -> Result<ProjPoint> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse {
            line: 0,
            col: 0,
            msg: format!("direction '{t}' must look like [a:b]"),
        })?;
    let (a, b) = inner.split_once(':').ok_or_else(|| Error::Parse {
        line: 0,
        col: 0,
        msg: "direction must contain ':'".into(),
    })?;
    let pa = parse_polynomial(a, 0, 1, tower, ("x", "y"))?;
    let pb = parse_polynomial(b, 0, 1, tower, ("x", "y"))?;
    let ca = constant_of(&pa)?;
    let cb = constant_of(&pb)?;
    ProjPoint::from_homogeneous(ca, cb)
}

fn constant_of(j: &Jet2) -> Result<FieldElement> {
    if j.terms().any(|(&(a, b), _)| a + b > 0) {
        return Err(Error::Parse {
            line: 0,
            col: 0,
            msg: "direction entries must be constant expressions".into(),
        });
    }
    j.coeff(0, 0)
}

/// Parse a source file.
pub fn parse_source(text: &str) -> Result<SourceFile> {
    let mut tower = Tower::rationals();
    let mut params = Vec::new();
    let mut fx: Option<(usize, String)> = None;
    let mut fy: Option<(usize, String)> = None;
    let mut xdx: Option<(usize, String)> = None;
    let mut xdy: Option<(usize, String)> = None;
    let mut blowup_lines: Vec<(usize, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let stripped = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let s = stripped.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix("param ") {
            let name = rest.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::Parse {
                    line,
                    col: 7,
                    msg: format!("bad parameter name '{name}'"),
                });
            }
            if name == "x" || name == "y" || name == "t" || name == "s" {
                return Err(Error::Parse {
                    line,
                    col: 7,
                    msg: format!("'{name}' is reserved"),
                });
            }
            tower = tower.adjoin_transcendental(name)?;
            params.push(name.to_string());
            continue;
        }
        if let Some(rest) = s.strip_prefix("blowup ") {
            blowup_lines.push((line, rest.trim().to_string()));
            continue;
        }
        let Some((lhs, rhs)) = s.split_once('=') else {
            return Err(Error::Parse {
                line,
                col: 1,
                msg: format!("cannot parse line '{s}'"),
            });
        };
        let lhs = lhs.trim();
        let col0 = raw.find('=').map(|i| i + 2).unwrap_or(1);
        let entry = Some((line, rhs.trim().to_string()));
        let _ = col0;
        match lhs {
            "F.x" => fx = entry,
            "F.y" => fy = entry,
            "X.dx" => xdx = entry,
            "X.dy" => xdy = entry,
            _ => {
                return Err(Error::Parse {
                    line,
                    col: 1,
                    msg: format!("unknown assignment target '{lhs}'"),
                })
            }
        }
    }
    let object = match (fx, fy, xdx, xdy) {
        (Some(ax), Some(ay), None, None) => {
            let m1 = parse_polynomial(&ax.1, ax.0, 1, &tower, ("x", "y"))?;
            let m2 = parse_polynomial(&ay.1, ay.0, 1, &tower, ("x", "y"))?;
            GermObject::Map(Diffeo::from_exact(m1, m2)?)
        }
        (None, None, Some(ax), Some(ay)) => {
            let c1 = parse_polynomial(&ax.1, ax.0, 1, &tower, ("x", "y"))?;
            let c2 = parse_polynomial(&ay.1, ay.0, 1, &tower, ("x", "y"))?;
            GermObject::Field(VectorField::new(c1, c2)?)
        }
        _ => {
            return Err(Error::Parse {
                line: 0,
                col: 0,
                msg: "file must define exactly F.x and F.y, or X.dx and X.dy".into(),
            })
        }
    };
    if !blowup_lines.is_empty() && matches!(object, GermObject::Field(_)) {
        return Err(Error::Parse {
            line: blowup_lines[0].0,
            col: 1,
            msg: "blowup directives apply to maps only".into(),
        });
    }
    let mut blowups = Vec::new();
    for (line, text) in blowup_lines {
        let p = parse_direction(&text, &tower).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line, col: 8, msg },
            other => other,
        })?;
        blowups.push(p);
    }
    Ok(SourceFile {
        tower,
        params,
        object,
        blowups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_astorg_example() {
        let src = "\
# the wandering-domain family
param c
F.x = x + c*y + x^2
F.y = y - y^2
blowup [1:0]
";
        let file = parse_source(src).unwrap();
        assert_eq!(file.params, ["c"]);
        assert_eq!(file.blowups.len(), 1);
        let GermObject::Map(f) = &file.object else {
            panic!("expected a map")
        };
        assert_eq!(f.map1().coeff(0, 1).unwrap().to_string(), "c");
        assert_eq!(f.map2().coeff(0, 2).unwrap().to_string(), "-1");
    }

    #[test]
    fn parse_vector_field() {
        let src = "X.dx = x^2\nX.dy = y^2\n";
        let file = parse_source(src).unwrap();
        let x = file.field().unwrap();
        assert_eq!(x.order().unwrap(), 2);
    }

    #[test]
    fn rational_coefficients() {
        let src = "F.x = x + 1/2*y^2\nF.y = y - 3*y^2/4\n";
        let file = parse_source(src).unwrap();
        let GermObject::Map(f) = &file.object else {
            panic!()
        };
        assert_eq!(f.map1().coeff(0, 2).unwrap().to_string(), "1/2");
        assert_eq!(f.map2().coeff(0, 2).unwrap().to_string(), "-3/4");
    }

    #[test]
    fn float_literals_rejected() {
        let src = "F.x = x + 0.5*y\nF.y = y\n";
        assert!(matches!(parse_source(src), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_errors_carry_location() {
        let src = "F.x = x + $\nF.y = y\n";
        match parse_source(src) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn direction_with_parameter() {
        let t = Tower::rationals().adjoin_transcendental("c").unwrap();
        let p = parse_direction("[-c:1]", &t).unwrap();
        assert_eq!(p.to_string(), "[-c:1]");
        let q = parse_direction("[1:0]", &t).unwrap();
        assert_eq!(q.to_string(), "[1:0]");
    }
}
