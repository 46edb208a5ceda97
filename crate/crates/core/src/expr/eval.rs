//! Numeric evaluation (IEEE double) with loud failures on unbound symbols
//! and guard violations, plus exact rational evaluation for the sampling
//! machinery. Quadrature-defined functions are evaluated by adaptive
//! bisection quadrature with an embedded error estimate.

use super::{Builtin, Expr, Symbol};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Relative accuracy target for quadrature-defined functions.
pub const QUADRATURE_REL_TOL: f64 = 1e-12;
/// Cap on the number of subintervals (2^20).
pub const QUADRATURE_MAX_DEPTH: u32 = 20;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol '{0}'")]
    Unbound(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("ln of a non-positive value {0}")]
    NonPositiveLog(f64),
    #[error("even root of a negative value {0}")]
    NegativeRoot(f64),
    #[error("zero raised to a non-positive power")]
    ZeroToNonPositive,
    #[error("quadrature failed to converge")]
    QuadratureNonConvergence,
}

/// Float bindings for symbols. Evaluation fails loudly on unbound symbols.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    map: BTreeMap<Symbol, f64>,
}

impl Bindings {
    pub fn new() -> Bindings {
        Bindings::default()
    }

    pub fn point(x: f64, y: f64) -> Bindings {
        Bindings::new().with(Symbol::X, x).with(Symbol::Y, y)
    }

    pub fn with(mut self, s: Symbol, v: f64) -> Bindings {
        self.map.insert(s, v);
        self
    }

    pub fn with_t(self, t: f64) -> Bindings {
        self.with(Symbol::T, t)
    }

    pub fn with_param(self, name: &str, v: f64) -> Bindings {
        self.with(Symbol::param(name), v)
    }

    pub fn set(&mut self, s: Symbol, v: f64) {
        self.map.insert(s, v);
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.map.get(s).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &f64)> {
        self.map.iter()
    }
}

/// Exact rational bindings used by the point-sampling linear solvers.
#[derive(Clone, Debug, Default)]
pub struct RationalBindings {
    map: BTreeMap<Symbol, BigRational>,
}

impl RationalBindings {
    pub fn new() -> RationalBindings {
        RationalBindings::default()
    }

    pub fn point(x: BigRational, y: BigRational) -> RationalBindings {
        RationalBindings::new()
            .with(Symbol::X, x)
            .with(Symbol::Y, y)
    }

    pub fn with(mut self, s: Symbol, v: BigRational) -> RationalBindings {
        self.map.insert(s, v);
        self
    }

    pub fn get(&self, s: &Symbol) -> Option<&BigRational> {
        self.map.get(s)
    }

    pub fn to_f64(&self) -> Bindings {
        let mut b = Bindings::new();
        for (s, v) in &self.map {
            b.set(s.clone(), v.to_f64().unwrap_or(f64::NAN));
        }
        b
    }
}

pub fn eval(e: &Expr, b: &Bindings) -> Result<f64, EvalError> {
    match e {
        Expr::Number(n) => Ok(n.to_f64().unwrap_or(f64::NAN)),
        Expr::Symbol(s) => b
            .get(s)
            .ok_or_else(|| EvalError::Unbound(s.name().to_string())),
        Expr::Sum(es) => {
            let mut acc = 0.0;
            for x in es {
                acc += eval(x, b)?;
            }
            Ok(acc)
        }
        Expr::Product(es) => {
            let mut acc = 1.0;
            for x in es {
                acc *= eval(x, b)?;
            }
            Ok(acc)
        }
        Expr::Quotient(p, q) => {
            let den = eval(q, b)?;
            if den == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            Ok(eval(p, b)? / den)
        }
        Expr::Power(base, q) => {
            let v = eval(base, b)?;
            eval_power(v, q)
        }
        Expr::Call(f, arg) => {
            let v = eval(arg, b)?;
            Ok(match f {
                Builtin::Exp => v.exp(),
                Builtin::Ln => {
                    if v <= 0.0 {
                        return Err(EvalError::NonPositiveLog(v));
                    }
                    v.ln()
                }
                Builtin::Abs => v.abs(),
                Builtin::Sin => v.sin(),
                Builtin::Cos => v.cos(),
            })
        }
        Expr::Integral(f, arg) => {
            let upper = eval(arg, b)?;
            let lower = f.lower.to_f64().unwrap_or(f64::NAN);
            let dummy = Symbol::dummy();
            let g = |s: f64| -> Result<f64, EvalError> {
                let mut inner = b.clone();
                inner.set(dummy.clone(), s);
                eval(&f.integrand, &inner)
            };
            adaptive_simpson(&g, lower, upper)
        }
    }
}

fn eval_power(v: f64, q: &BigRational) -> Result<f64, EvalError> {
    if q.is_integer() {
        let e = q.to_integer().to_i64().unwrap_or(0);
        if v == 0.0 && e <= 0 {
            return Err(EvalError::ZeroToNonPositive);
        }
        if e.unsigned_abs() <= i32::MAX as u64 {
            return Ok(v.powi(e as i32));
        }
        return Ok(v.powf(e as f64));
    }
    let qe = q.to_f64().unwrap_or(f64::NAN);
    if v > 0.0 {
        Ok(v.powf(qe))
    } else if v == 0.0 {
        if qe > 0.0 {
            Ok(0.0)
        } else {
            Err(EvalError::ZeroToNonPositive)
        }
    } else {
        // negative base: only odd-denominator rational exponents are real
        if (q.denom() % num_bigint::BigInt::from(2)).is_zero() {
            return Err(EvalError::NegativeRoot(v));
        }
        let mag = (-v).powf(qe);
        let num_odd = !(q.numer() % num_bigint::BigInt::from(2)).is_zero();
        Ok(if num_odd { -mag } else { mag })
    }
}

/// Adaptive Simpson with the classic embedded (Richardson) error estimate.
/// Bisects until the local estimate passes its share of the relative target
/// or the depth cap (2^20 subintervals) is hit.
fn adaptive_simpson<F>(f: &F, a: f64, b: f64) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-10);
    let tol = QUADRATURE_REL_TOL * scale;
    step(f, a, b, fa, fm, fb, whole, tol, QUADRATURE_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, EvalError>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(EvalError::QuadratureNonConvergence);
    }
    let lv = step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let rv = step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(lv + rv)
}

/// Exact rational evaluation. Returns `None` when the expression contains a
/// transcendental atom or a fractional power without an exact rational root.
pub fn eval_exact(e: &Expr, b: &RationalBindings) -> Option<BigRational> {
    match e {
        Expr::Number(n) => Some(n.clone()),
        Expr::Symbol(s) => b.get(s).cloned(),
        Expr::Sum(es) => {
            let mut acc = BigRational::zero();
            for x in es {
                acc += eval_exact(x, b)?;
            }
            Some(acc)
        }
        Expr::Product(es) => {
            let mut acc = BigRational::from_integer(1.into());
            for x in es {
                acc *= eval_exact(x, b)?;
            }
            Some(acc)
        }
        Expr::Quotient(p, q) => {
            let den = eval_exact(q, b)?;
            if den.is_zero() {
                return None;
            }
            Some(eval_exact(p, b)? / den)
        }
        Expr::Power(base, q) => {
            let v = eval_exact(base, b)?;
            if q.is_integer() {
                let e = q.to_integer().to_i32()?;
                if v.is_zero() && e <= 0 {
                    return None;
                }
                return Some(v.pow(e));
            }
            // fractional power: exact only for perfect roots of positives
            if !v.is_positive() {
                return None;
            }
            let r = q.denom().to_u32()?;
            let p = q.numer().to_i64()?;
            let rn = nth_root_exact(v.numer(), r)?;
            let rd = nth_root_exact(v.denom(), r)?;
            let root = BigRational::new(rn, rd);
            let mut acc = BigRational::from_integer(1.into());
            for _ in 0..p.unsigned_abs() {
                acc *= &root;
            }
            Some(if p < 0 { acc.recip() } else { acc })
        }
        Expr::Call(_, _) | Expr::Integral(_, _) => None,
    }
}

fn nth_root_exact(n: &num_bigint::BigInt, r: u32) -> Option<num_bigint::BigInt> {
    if n.is_negative() {
        return None;
    }
    let root = n.nth_root(r);
    if root.pow(r) == *n {
        Some(root)
    } else {
        None
    }
}
