//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (("+"|"-") term)* ;
//! term     := unary (("*"|"/") unary)* ;
//! unary    := "-" unary | factor ;
//! factor   := base ("^" exponent)? ;
//! base     := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")" | "|" expr "|" ;
//! exponent := ("-")? (INTEGER | "(" ("-")? INTEGER ("/" INTEGER)? ")") ;
//! NUMBER   := INTEGER | INTEGER "/" INTEGER | DECIMAL ;
//! IDENT    := letter (letter|digit|"_")* ;
//! ```
//!
//! Whitespace-insensitive. `x`, `y` are the coordinates and `t` is time;
//! `exp`, `ln`, `sqrt`, `abs`, `sin`, `cos` are the builtin functions and
//! `|e|` is sugar for `abs(e)`. Every other identifier is a named parameter.
//! `sqrt(e)` is folded to `e^(1/2)`.

use super::{Builtin, Expr, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(position: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError::new(
            p.pos,
            format!("unexpected character '{}'", p.src[p.pos] as char),
        ));
    }
    Ok(e)
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

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::new(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::neg(self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = match acc {
                    Expr::Product(mut fs) => {
                        fs.push(rhs);
                        Expr::Product(fs)
                    }
                    other => Expr::mul(other, rhs),
                };
            } else if self.eat(b'/') {
                acc = Expr::div(acc, self.unary()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.factor()
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let q = self.exponent_value()?;
            Ok(Expr::Power(Box::new(base), q))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.eat(b'(');
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'|') => {
                self.eat(b'|');
                let e = self.expr()?;
                self.expect(b'|')?;
                Ok(Expr::call(Builtin::Abs, e))
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(ParseError::new(self.pos, "expected a number, symbol or '('")),
        }
    }

    fn integer_digits(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::new(self.pos, "expected digits"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let int = self.integer_digits()?;
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let start = self.pos;
            let frac = self.integer_digits()?;
            let digits = self.pos - start;
            let den = BigInt::from(10u32).pow(digits as u32);
            let v = BigRational::from_integer(int) + BigRational::new(frac, den);
            self.skip_ws();
            return Ok(Expr::Number(v));
        }
        self.skip_ws();
        Ok(Expr::Number(BigRational::from_integer(int)))
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        self.skip_ws();
        if self.peek() == Some(b'(') {
            // function application: builtins only
            self.eat(b'(');
            let arg = self.expr()?;
            // The grammar admits argument lists; every builtin is unary.
            if self.eat(b',') {
                return Err(ParseError::new(
                    self.pos,
                    format!("function '{name}' takes exactly one argument"),
                ));
            }
            self.expect(b')')?;
            if name == "sqrt" {
                return Ok(Expr::pow(arg, 1, 2));
            }
            match Builtin::from_name(&name) {
                Some(b) => Ok(Expr::call(b, arg)),
                None => Err(ParseError::new(start, format!("unknown function '{name}'"))),
            }
        } else {
            Ok(match name.as_str() {
                "x" => Expr::x(),
                "y" => Expr::y(),
                "t" => Expr::t(),
                _ => Expr::Symbol(Symbol::param(&name)),
            })
        }
    }

    /// A bare exponent is a single (optionally negated) integer; rational
    /// exponents must be parenthesized, `x^(1/2)`. A following `/` therefore
    /// always divides at the term level: `x^2/2` is `(x^2)/2`. Magnitudes
    /// are capped so pathological powers fail here instead of exhausting
    /// memory during normalization.
    fn exponent_value(&mut self) -> Result<BigRational, ParseError> {
        let mut neg = false;
        if self.eat(b'-') {
            neg = true;
        }
        let q = if self.eat(b'(') {
            let inner_neg = self.eat(b'-');
            let n = self.integer_digits()?;
            self.skip_ws();
            let v = if self.eat(b'/') {
                let d = self.integer_digits()?;
                self.skip_ws();
                if d.is_zero() {
                    return Err(ParseError::new(self.pos, "zero denominator in exponent"));
                }
                BigRational::new(n, d)
            } else {
                BigRational::from_integer(n)
            };
            self.expect(b')')?;
            if inner_neg {
                -v
            } else {
                v
            }
        } else {
            let n = self.integer_digits()?;
            self.skip_ws();
            BigRational::from_integer(n)
        };
        let cap = BigInt::from(1_000_000u32);
        if q.numer().magnitude() > cap.magnitude() || q.denom().magnitude() > cap.magnitude() {
            return Err(ParseError::new(self.pos, "exponent magnitude exceeds 10^6"));
        }
        Ok(if neg { -q } else { q })
    }
}
