//! Immutable symbolic expressions over the plane coordinates `x`, `y`, time `t`
//! and named parameters, with exact rational coefficients.
//!
//! Expressions normalize to a reduced quotient of multivariate polynomials in
//! which transcendental subterms (`exp`, `ln`, `abs`, `sin`, `cos`, fractional
//! powers, quadrature-defined functions) are treated as opaque indeterminates.
//! Equality on normal forms is therefore decidable on the rational layer; a
//! seeded numeric sampler covers the rest.

mod calculus;
mod equiv;
mod eval;
mod normal;
mod parse;
mod poly;
mod print;

pub use calculus::DiffError;
pub use equiv::{EquivError, EquivOptions, Equivalence, DEFAULT_SEED, EQUAL_REL_TOL, UNEQUAL_REL_TOL};
pub use eval::{Bindings, EvalError, RationalBindings};
pub use parse::ParseError;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::sync::Arc;

/// Reserved name of the bound integration variable inside quadrature nodes.
/// It starts with an underscore so the parser can never produce it, which
/// keeps user symbols from colliding with the bound variable.
pub const INTEGRATION_DUMMY: &str = "_s";

/// A symbol: one of the two plane coordinates, time, or a named parameter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    X,
    Y,
    T,
    Param(Arc<str>),
}

impl Symbol {
    pub fn param(name: &str) -> Self {
        Symbol::Param(Arc::from(name))
    }

    /// The bound variable used by quadrature-defined functions.
    pub fn dummy() -> Self {
        Symbol::param(INTEGRATION_DUMMY)
    }

    pub fn name(&self) -> &str {
        match self {
            Symbol::X => "x",
            Symbol::Y => "y",
            Symbol::T => "t",
            Symbol::Param(p) => p,
        }
    }
}

/// Builtin unary functions. `sqrt` is folded to `Power(_, 1/2)` at parse time
/// so that fractional powers of a common base share one indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Exp,
    Ln,
    Abs,
    Sin,
    Cos,
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::Abs => "abs",
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        Some(match s {
            "exp" => Builtin::Exp,
            "ln" => Builtin::Ln,
            "abs" => Builtin::Abs,
            "sin" => Builtin::Sin,
            "cos" => Builtin::Cos,
            _ => return None,
        })
    }
}

/// A function defined by a definite integral with a variable upper limit:
/// `F(u) = ∫_lower^u integrand(s) ds`, the integrand being an expression in
/// the reserved dummy symbol (other free symbols act as parameters).
///
/// The `name` is cosmetic and excluded from equality and ordering.
#[derive(Clone, Debug)]
pub struct IntegralFn {
    pub name: String,
    pub integrand: Expr,
    pub lower: BigRational,
}

impl PartialEq for IntegralFn {
    fn eq(&self, other: &Self) -> bool {
        self.integrand == other.integrand && self.lower == other.lower
    }
}
impl Eq for IntegralFn {}
impl PartialOrd for IntegralFn {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for IntegralFn {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.integrand, &self.lower).cmp(&(&other.integrand, &other.lower))
    }
}

/// Immutable symbolic expression AST.
///
/// `Power` exponents are always rational; general `e^{g ln h}` forms do not
/// exist in this language. `Integral(f, arg)` is the quadrature-defined
/// function `f` applied to `arg`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    Number(BigRational),
    Symbol(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, BigRational),
    Call(Builtin, Box<Expr>),
    Integral(Arc<IntegralFn>, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Number(BigRational::zero())
    }

    pub fn one() -> Expr {
        Expr::Number(BigRational::one())
    }

    pub fn integer(n: i64) -> Expr {
        Expr::Number(BigRational::from_integer(n.into()))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::Number(BigRational::new(num.into(), den.into()))
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::Symbol(s)
    }

    pub fn x() -> Expr {
        Expr::Symbol(Symbol::X)
    }

    pub fn y() -> Expr {
        Expr::Symbol(Symbol::Y)
    }

    pub fn t() -> Expr {
        Expr::Symbol(Symbol::T)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, Expr::neg(b)])
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Product(vec![a, b])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Quotient(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Product(vec![Expr::integer(-1), a])
    }

    pub fn pow(base: Expr, num: i64, den: i64) -> Expr {
        Expr::Power(Box::new(base), BigRational::new(num.into(), den.into()))
    }

    pub fn call(b: Builtin, arg: Expr) -> Expr {
        Expr::Call(b, Box::new(arg))
    }

    /// Quadrature-defined function `name(arg) = ∫_lower^arg integrand ds`,
    /// the integrand written in [`Symbol::dummy`].
    pub fn integral(name: &str, integrand: Expr, lower: BigRational, arg: Expr) -> Expr {
        Expr::Integral(
            Arc::new(IntegralFn {
                name: name.to_string(),
                integrand: integrand.normalize(),
                lower,
            }),
            Box::new(arg),
        )
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Number(n) if n.is_zero())
    }

    pub fn as_number(&self) -> Option<&BigRational> {
        match self {
            Expr::Number(n) => Some(n),
            _ => None,
        }
    }

    /// Free symbols of the expression. The integration dummy is bound inside
    /// quadrature nodes and never reported.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out.remove(&Symbol::dummy());
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Number(_) => {}
            Expr::Symbol(s) => {
                out.insert(s.clone());
            }
            Expr::Sum(es) | Expr::Product(es) => {
                for e in es {
                    e.collect_symbols(out);
                }
            }
            Expr::Quotient(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Power(b, _) => b.collect_symbols(out),
            Expr::Call(_, a) => a.collect_symbols(out),
            Expr::Integral(f, arg) => {
                let mut inner = BTreeSet::new();
                f.integrand.collect_symbols(&mut inner);
                inner.remove(&Symbol::dummy());
                out.extend(inner);
                arg.collect_symbols(out);
            }
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.free_symbols().contains(s)
    }

    /// Simultaneous substitution of symbols by expressions. Occurrences of
    /// the integration dummy bound by a quadrature node are shielded.
    pub fn substitute(&self, map: &[(Symbol, Expr)]) -> Expr {
        match self {
            Expr::Number(_) => self.clone(),
            Expr::Symbol(s) => map
                .iter()
                .find(|(k, _)| k == s)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Sum(es) => Expr::Sum(es.iter().map(|e| e.substitute(map)).collect()),
            Expr::Product(es) => Expr::Product(es.iter().map(|e| e.substitute(map)).collect()),
            Expr::Quotient(a, b) => Expr::div(a.substitute(map), b.substitute(map)),
            Expr::Power(b, q) => Expr::Power(Box::new(b.substitute(map)), q.clone()),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(map)),
            Expr::Integral(f, arg) => {
                let dummy = Symbol::dummy();
                let shielded: Vec<(Symbol, Expr)> =
                    map.iter().filter(|(k, _)| *k != dummy).cloned().collect();
                let integrand = f.integrand.substitute(&shielded);
                let fun = if integrand == f.integrand {
                    f.clone()
                } else {
                    Arc::new(IntegralFn {
                        name: f.name.clone(),
                        integrand,
                        lower: f.lower.clone(),
                    })
                };
                Expr::Integral(fun, Box::new(arg.substitute(map)))
            }
        }
    }

    /// Canonical normal form: a single reduced quotient of multivariate
    /// polynomials over the symbol-and-atom set. Idempotent.
    pub fn normalize(&self) -> Expr {
        normal::Nf::from_expr(self).to_expr()
    }

    /// Parse an expression from the grammar in the module documentation.
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }

    /// Exact partial derivative with respect to `var`, normalized.
    pub fn diff(&self, var: &Symbol) -> Result<Expr, DiffError> {
        calculus::diff(self, var).map(|d| d.normalize())
    }

    /// Numeric evaluation under the given bindings (IEEE double).
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        eval::eval(self, b)
    }

    /// Exact rational evaluation; `None` when a transcendental atom is hit.
    pub fn eval_exact(&self, b: &RationalBindings) -> Option<BigRational> {
        eval::eval_exact(self, b)
    }

    /// Semi-decidable equivalence test: exact on the rational layer with a
    /// seeded numeric fallback.
    pub fn equivalent(&self, other: &Expr, opts: &EquivOptions) -> Result<Equivalence, EquivError> {
        equiv::equivalent(self, other, opts)
    }

    /// Antiderivative in `var` for the table-integrable class: generalized
    /// monomials in `var` plus polynomial-times-`exp(linear)` terms.
    /// `None` when the integrand falls outside the table.
    pub fn antiderivative(&self, var: &Symbol, positive_domain: bool) -> Option<Expr> {
        calculus::antiderivative(self, var, positive_domain)
    }
}

/// A domain restriction attached to fields, forms and maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guard {
    pub expr: Expr,
    pub kind: GuardKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardKind {
    NonZero,
    Positive,
}

impl Guard {
    pub fn nonzero(e: Expr) -> Guard {
        Guard {
            expr: e,
            kind: GuardKind::NonZero,
        }
    }

    pub fn positive(e: Expr) -> Guard {
        Guard {
            expr: e,
            kind: GuardKind::Positive,
        }
    }

    /// Parse `"<expr> != 0"` or `"<expr> > 0"`.
    pub fn parse(text: &str) -> Result<Guard, ParseError> {
        let t = text.trim();
        if let Some(head) = t.strip_suffix("!= 0").or_else(|| t.strip_suffix("!=0")) {
            Ok(Guard::nonzero(Expr::parse(head)?))
        } else if let Some(head) = t.strip_suffix("> 0").or_else(|| t.strip_suffix(">0")) {
            Ok(Guard::positive(Expr::parse(head)?))
        } else {
            Err(ParseError::new(text.len(), "guard must end in '!= 0' or '> 0'"))
        }
    }

    /// True when the guard holds with the given margin at the point.
    pub fn holds(&self, b: &Bindings, margin: f64) -> bool {
        match self.expr.eval(b) {
            Ok(v) => match self.kind {
                GuardKind::NonZero => v.abs() > margin,
                GuardKind::Positive => v > margin,
            },
            Err(_) => false,
        }
    }
}

impl std::fmt::Display for Guard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            GuardKind::NonZero => write!(f, "{} != 0", self.expr),
            GuardKind::Positive => write!(f, "{} > 0", self.expr),
        }
    }
}

/// Render a rational as `p` or `p/q`.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p`, `p/q`, or a decimal literal into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-BigRational::one(), rest.trim()),
        None => (BigRational::one(), s),
    };
    let r = if let Some((n, d)) = body.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().ok()?;
        let d: num_bigint::BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        let n: num_bigint::BigInt = format!("{int}{frac}").parse().ok()?;
        let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        BigRational::new(n, den)
    } else {
        let n: num_bigint::BigInt = body.parse().ok()?;
        BigRational::from_integer(n)
    };
    Some(sign * r)
}

/// Exact rational from a double (every finite f64 is rational).
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    num_traits::FromPrimitive::from_f64(v)
}

/// Nearest rational with denominator at most `max_den`, by continued
/// fractions. Used to lift float linear-solve output back to exact
/// coefficients before symbolic re-verification.
pub fn rationalize(v: f64, max_den: u64) -> Option<BigRational> {
    if !v.is_finite() {
        return None;
    }
    let negative = v < 0.0;
    let mut x = v.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e17 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 as u64 > max_den && q1 != 0 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac.abs() < 1e-12 * (1.0 + a.abs()) {
            break;
        }
        x = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let mut r = BigRational::new((p1).into(), (q1).into());
    if negative {
        r = -r;
    }
    // Accept only if the reconstruction is genuinely close.
    let back = num_traits::ToPrimitive::to_f64(&r)?;
    if (back - v).abs() <= 1e-9 * (1.0 + v.abs()) {
        Some(r)
    } else {
        None
    }
}

/// Sign-aware absolute value helper for rationals.
pub fn rational_abs(r: &BigRational) -> BigRational {
    r.abs()
}
