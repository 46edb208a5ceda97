//! Display rendering that round-trips through the parser for every
//! closed-form expression. Quadrature nodes render as `name(arg)` for
//! reporting; they have no concrete syntax.

use super::{Expr, Symbol};
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::fmt;

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Sum(_) => 1,
            Expr::Product(_) | Expr::Quotient(_, _) => 2,
            Expr::Power(_, _) => 3,
            Expr::Number(n) => {
                if n.is_negative() || !n.is_integer() {
                    2
                } else {
                    4
                }
            }
            _ => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min_prec {
            write!(f, "(")?;
            self.write_raw(f)?;
            write!(f, ")")
        } else {
            self.write_raw(f)
        }
    }

    fn write_raw(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write_rational(f, n),
            Expr::Symbol(s) => write!(f, "{s}"),
            Expr::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i == 0 {
                        t.write_at(f, 1)?;
                        continue;
                    }
                    if let Some(neg) = negated_view(t) {
                        write!(f, " - ")?;
                        neg.write_at(f, 2)?;
                    } else {
                        write!(f, " + ")?;
                        t.write_at(f, 2)?;
                    }
                }
                Ok(())
            }
            Expr::Product(factors) => {
                if let Some(pos) = negated_view(self) {
                    write!(f, "-")?;
                    return pos.write_at(f, 2);
                }
                for (i, x) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    x.write_at(f, 3)?;
                }
                Ok(())
            }
            Expr::Quotient(a, b) => {
                a.write_at(f, 2)?;
                write!(f, "/")?;
                b.write_at(f, 3)?;
                Ok(())
            }
            Expr::Power(base, q) => {
                base.write_at(f, 4)?;
                if q.is_integer() && !q.is_negative() {
                    write!(f, "^{}", q.numer())
                } else if q.is_integer() {
                    write!(f, "^({})", q.numer())
                } else if q.is_negative() {
                    write!(f, "^(-{}/{})", -q.numer(), q.denom())
                } else {
                    write!(f, "^({}/{})", q.numer(), q.denom())
                }
            }
            Expr::Call(b, arg) => write!(f, "{}({})", b.name(), arg),
            Expr::Integral(fun, arg) => write!(f, "{}({})", fun.name, arg),
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, n: &BigRational) -> fmt::Result {
    if n.denom().is_one() {
        write!(f, "{}", n.numer())
    } else {
        write!(f, "{}/{}", n.numer(), n.denom())
    }
}

/// If the term is `(-c) * rest` or a negative number, return the negated view
/// so sums print with a binary minus.
fn negated_view(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Number(n) if n.is_negative() => Some(Expr::Number(-n.clone())),
        Expr::Product(fs) => match fs.first() {
            Some(Expr::Number(n)) if n.is_negative() => {
                let mut out = fs.clone();
                let m = -n.clone();
                if m.is_one() && out.len() > 1 {
                    out.remove(0);
                } else {
                    out[0] = Expr::Number(m);
                }
                Some(if out.len() == 1 {
                    out.pop().unwrap()
                } else {
                    Expr::Product(out)
                })
            }
            _ => None,
        },
        Expr::Quotient(a, b) => {
            let neg = negated_view(a)?;
            Some(Expr::div(neg, (**b).clone()))
        }
        _ => None,
    }
}
