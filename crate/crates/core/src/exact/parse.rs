//! Parser for radical expressions such as `-1/4-1/4*sqrt(5)` or
//! `sqrt((3+sqrt(5))/2)`.

use num_bigint::BigInt;

use super::{Rational, TowerBuilder, TowerElement};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    /// Evaluates in the builder's tower, adjoining square roots as needed.
    pub fn eval(&self, b: &mut TowerBuilder) -> Result<TowerElement> {
        Ok(match self {
            Expr::Int(n) => TowerElement::from_rational(b.tower(), Rational::from_integer(n.clone())),
            Expr::Neg(x) => -x.eval(b)?,
            Expr::Add(x, y) => {
                let x = x.eval(b)?;
                let y = y.eval(b)?;
                x.checked_add(&y)?
            }
            Expr::Sub(x, y) => {
                let x = x.eval(b)?;
                let y = y.eval(b)?;
                x.checked_sub(&y)?
            }
            Expr::Mul(x, y) => {
                let x = x.eval(b)?;
                let y = y.eval(b)?;
                x.checked_mul(&y)?
            }
            Expr::Div(x, y) => {
                let x = x.eval(b)?;
                let y = y.eval(b)?;
                x.checked_div(&y)?
            }
            Expr::Sqrt(x) => {
                let x = x.eval(b)?;
                b.sqrt(&x)?
            }
        })
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

/// Parses a single expression; column numbers in errors are 1-based.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::parse(1, self.pos + 1, msg)
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                Ok(Expr::Int(digits.parse().expect("decimal digits")))
            }
            Some(b's') if self.src[self.pos..].starts_with(b"sqrt") => {
                self.pos += 4;
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::Sqrt(Box::new(e)))
            }
            Some(_) => Err(self.error("expected a number, 'sqrt(' or '('")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let mut b = TowerBuilder::default();
        let x = b.eval_str("1+2*3-4/2").unwrap();
        assert_eq!(x.as_rational(), Some(Rational::from_integer(5.into())));
        let y = b.eval_str("-1/4-1/4*sqrt(5)").unwrap();
        assert_eq!(y.to_string(), "-1/4-1/4*sqrt(5)");
    }

    #[test]
    fn round_trip_of_display() {
        let mut b = TowerBuilder::default();
        let x = b.eval_str("sqrt(sqrt(5)/(2*sqrt(5)-3))*3/7+sqrt(2)").unwrap();
        let mut b2 = TowerBuilder::new(b.tower().clone());
        let y = b2.eval_str(&x.to_string()).unwrap();
        assert_eq!(x, y);
        assert_eq!(b2.tower().num_generators(), b.tower().num_generators());
    }

    #[test]
    fn errors_carry_columns() {
        match parse_expr("1+*2") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("sqrt(2").is_err());
        assert!(parse_expr("2)").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn negative_radicand_is_rejected() {
        let mut b = TowerBuilder::default();
        assert!(matches!(b.eval_str("sqrt(1-sqrt(5))"), Err(Error::NotPositive(_))));
        assert_eq!(b.eval_str("sqrt(0)"), Err(Error::ZeroRadicand));
    }
}
