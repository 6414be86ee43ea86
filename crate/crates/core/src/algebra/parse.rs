//! Polynomial text syntax: rationals, variable names, `+ - * / ^` and
//! parentheses. Division is only allowed by nonzero constants.
//!
//! Printing uses descending graded-lex order and re-parses to the same value.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::context::Ctx;
use super::poly::{MultiPoly, Rational};
use crate::error::{Error, Result};

pub fn parse_poly(text: &str, ctx: &Ctx) -> Result<MultiPoly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        ctx,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty expression"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses `a`, `-a` or `a/b` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("not a rational number: `{text}`"),
    };
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a Ctx,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(Error::Parse {
                            pos: at,
                            msg: "division only by nonzero constants".into(),
                        });
                    }
                    acc = acc.scale(&d.constant_term().recip());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a non-negative integer exponent"));
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| Error::Parse {
                    pos: start,
                    msg: "exponent too large".into(),
                })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let Some(c) = self.peek() else {
            return Err(self.err("unexpected end of input"));
        };
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: BigInt = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .unwrap();
            return Ok(MultiPoly::constant(self.ctx, Rational::from_integer(n)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return match self.ctx.index_of(name) {
                Some(i) => Ok(MultiPoly::var(self.ctx, i)),
                None => Err(Error::UnknownVariable {
                    name: name.to_string(),
                    pos: start,
                }),
            };
        }
        Err(self.err(&format!("unexpected character `{}`", c as char)))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.ctx().names();
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{}", names[v], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", a, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::context::VarContext;
    use crate::algebra::monomial::Monomial;
    use crate::algebra::poly::{rat, ratio};

    fn xy() -> Ctx {
        VarContext::new(&["x", "y"]).unwrap()
    }

    #[test]
    fn reads_rational_coefficients() {
        let p = parse_poly("x^2 - 1/2*y", &xy()).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&Monomial::from_exps(&[2, 0])), rat(1));
        assert_eq!(p.coeff(&Monomial::from_exps(&[0, 1])), ratio(-1, 2));
    }

    #[test]
    fn binomial_square() {
        let p = parse_poly("(x+y)^2", &xy()).unwrap();
        assert_eq!(p.coeff(&Monomial::from_exps(&[2, 0])), rat(1));
        assert_eq!(p.coeff(&Monomial::from_exps(&[1, 1])), rat(2));
        assert_eq!(p.coeff(&Monomial::from_exps(&[0, 2])), rat(1));
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn cancellation_gives_zero() {
        assert!(parse_poly("x - x", &xy()).unwrap().is_zero());
    }

    #[test]
    fn print_then_parse_is_identity() {
        let c = xy();
        for s in ["x^2 - 1/2*y", "-3*x*y^2 + 7", "0", "-x", "(2/3*x - y)^3 + 5/7"] {
            let p = parse_poly(s, &c).unwrap();
            assert_eq!(parse_poly(&p.to_string(), &c).unwrap(), p, "{s}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        let c = xy();
        assert!(matches!(
            parse_poly("x + z", &c),
            Err(Error::UnknownVariable { pos: 4, .. })
        ));
        assert!(matches!(parse_poly("x + * y", &c), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse_poly("x / y", &c), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("(x", &c), Err(Error::Parse { .. })));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert!(parse_rational("1/0").is_err());
    }
}
