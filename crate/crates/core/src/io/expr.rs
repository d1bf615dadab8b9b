//! Text form of polynomials.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := power ('*' power)*
//! power  := atom ['^' INT]
//! atom   := INT ['/' INT] | VAR | '(' expr ')' | '-' atom
//! VAR    := ('xi' | 'xip' | 'lam' | 'pi') '[' INT ']' | ('P' | 'C') '[' INT ',' INT ']'
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{Coeff, GradedPoly, Sector, Space};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// Deterministic text form: terms in canonical monomial order, rationals as
/// `p/q`, `0` for the zero polynomial.
pub fn serialize(space: &Space, p: &GradedPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = m.render(space);
        if m.is_one() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    out
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
    LBracket,
    RBracket,
    Comma,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    end: (usize, usize),
}

fn lex(src: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            toks.push((t, start.0, start.1));
            i += 1;
            col += 1;
        } else if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c.is_ascii_digit() {
            let j = (i..chars.len()).find(|&j| !chars[j].is_ascii_digit()).unwrap_or(chars.len());
            let s: String = chars[i..j].iter().collect();
            toks.push((Tok::Int(s.parse().expect("digits")), start.0, start.1));
            col += j - i;
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let j = (i..chars.len()).find(|&j| !(chars[j].is_ascii_alphanumeric() || chars[j] == '_')).unwrap_or(chars.len());
            let s: String = chars[i..j].iter().collect();
            toks.push((Tok::Ident(s), start.0, start.1));
            col += j - i;
            i = j;
        } else {
            return Err(ParseError { line, column: col, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(Lexer { toks, end: (line, col) })
}

struct Parser<'a> {
    space: &'a Space,
    lx: Lexer,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.lx.toks.get(self.pos).map(|t| (t.1, t.2)).unwrap_or(self.lx.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError { line, column, message: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected integer"),
        }
    }

    fn small_int(&mut self) -> Result<usize, ParseError> {
        let at = self.here();
        let n = self.int()?;
        usize::try_from(n).map_err(|_| ParseError { line: at.0, column: at.1, message: "index too large".into() })
    }

    fn expr(&mut self) -> Result<GradedPoly, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc += &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GradedPoly, ParseError> {
        let mut acc = self.power()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.power()?;
            acc = acc.mul(&rhs, self.space);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<GradedPoly, ParseError> {
        let (base, odd_var) = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let at = self.here();
            let e = self.small_int()?;
            if let Some(name) = odd_var {
                if e >= 2 {
                    return Err(ParseError {
                        line: at.0,
                        column: at.1,
                        message: format!("Grassmann-odd variable {name} raised to power {e}"),
                    });
                }
            }
            let e = u32::try_from(e).map_err(|_| ParseError { line: at.0, column: at.1, message: "exponent too large".into() })?;
            return Ok(base.pow(e, self.space));
        }
        Ok(base)
    }

    /// Returns the atom and, when it is a single odd generator, its name.
    fn atom(&mut self) -> Result<(GradedPoly, Option<String>), ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut c = BigRational::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.int()?;
                    if d.is_zero() {
                        return Err(ParseError { line: at.0, column: at.1, message: "zero denominator".into() });
                    }
                    c /= BigRational::from_integer(d);
                }
                Ok((GradedPoly::constant(self.space, c), None))
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let (a, _) = self.atom()?;
                Ok((-a, None))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok((e, None))
            }
            Some(Tok::Ident(name)) => {
                let at = self.here();
                self.pos += 1;
                let Some(sector) = Sector::from_token(&name) else {
                    return self.err_at(at, format!("unknown variable '{name}'"));
                };
                self.expect(Tok::LBracket, "'['")?;
                let alpha = self.small_int()?;
                let sp2 = if sector.has_sp2_index() {
                    self.expect(Tok::Comma, "','")?;
                    Some(self.small_int()?)
                } else {
                    None
                };
                self.expect(Tok::RBracket, "']'")?;
                let label = match sp2 {
                    Some(a) => format!("{name}[{alpha},{a}]"),
                    None => format!("{name}[{alpha}]"),
                };
                let Some(idx) = self.space.lookup(sector, alpha, sp2) else {
                    return self.err_at(at, format!("variable {label} out of range"));
                };
                let odd = self.space.is_odd(idx).then_some(label);
                Ok((GradedPoly::var(self.space, idx), odd))
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of expression"),
        }
    }

    fn err_at<T>(&self, at: (usize, usize), msg: String) -> Result<T, ParseError> {
        Err(ParseError { line: at.0, column: at.1, message: msg })
    }
}

/// Parses an expression over the generators of `space`.
pub fn parse_expr(space: &Space, src: &str) -> Result<GradedPoly, ParseError> {
    let lx = lex(src)?;
    let mut p = Parser { space, lx, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.lx.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a coefficient such as `-3/4`.
pub fn parse_coeff(src: &str) -> Option<Coeff> {
    let s = src.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    (!d.is_zero()).then(|| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn space() -> Space {
        Space::new(vec![0, 1], vec![0]).unwrap()
    }

    #[test]
    fn serializes_zero_and_constants() {
        let s = space();
        assert_eq!(serialize(&s, &GradedPoly::zero()), "0");
        assert_eq!(serialize(&s, &GradedPoly::constant(&s, rat(-3, 4))), "-3/4");
    }

    #[test]
    fn parses_arithmetic() {
        let s = space();
        let x = parse_expr(&s, "2*xi[1]^2 - 1/2*(xi[1] + xip[1])*C[1,2] + 3").unwrap();
        let xi = GradedPoly::var(&s, s.xi(1));
        let xp = GradedPoly::var(&s, s.xip(1));
        let c = GradedPoly::var(&s, s.ghost(1, 2));
        let expected = xi.mul(&xi, &s).scale(&int(2)) - (&xi + &xp).mul(&c, &s).scale(&rat(1, 2)) + GradedPoly::constant(&s, int(3));
        assert_eq!(x, expected);
        assert_eq!(parse_expr(&s, &serialize(&s, &x)).unwrap(), x);
    }

    #[test]
    fn odd_products_anticommute_in_text() {
        let s = space();
        let a = parse_expr(&s, "C[1,1]*P[1,1]").unwrap();
        let b = parse_expr(&s, "-P[1,1]*C[1,1]").unwrap();
        assert_eq!(a, b);
        assert!(parse_expr(&s, "C[1,1]*C[1,1]").unwrap().is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let s = space();
        let e = parse_expr(&s, "xi[1] + C[1,1]^2").unwrap_err();
        assert_eq!((e.line, e.column), (1, 16));
        let e = parse_expr(&s, "xi[3]").unwrap_err();
        assert_eq!(e.column, 1);
        assert!(e.message.contains("out of range"));
        let e = parse_expr(&s, "xi[1] +").unwrap_err();
        assert!(e.message.contains("end"));
        let e = parse_expr(&s, "foo[1]").unwrap_err();
        assert!(e.message.contains("unknown"));
        // ξ_2 is odd here
        assert!(parse_expr(&s, "xi[2]^2").is_err());
        assert!(parse_expr(&s, "xi[1]^2").is_ok());
        assert!(parse_expr(&s, "1/0").is_err());
    }

    #[test]
    fn coefficients() {
        assert_eq!(parse_coeff("-3/4"), Some(rat(-3, 4)));
        assert_eq!(parse_coeff("7"), Some(int(7)));
        assert_eq!(parse_coeff("1/0"), None);
    }
}
