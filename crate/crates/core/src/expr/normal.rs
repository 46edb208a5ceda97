//! Normal form: a reduced quotient of multivariate polynomials whose
//! indeterminates are the symbols plus opaque atoms (builtin calls with a
//! canonical argument, d-th roots of a canonical base, quadrature nodes).
//!
//! No transcendental rewriting happens here: `exp(a)·exp(a)` becomes the atom
//! `exp(a)` squared, never `exp(2a)`. Roots of a common base do share one
//! atom, and a root raised to its full degree folds back onto the base (valid
//! wherever the root itself is defined).

use super::poly::{gcd, MPoly};
use super::{Builtin, Expr, IntegralFn, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::Arc;

/// An indeterminate of the polynomial layer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Indet {
    Sym(Symbol),
    /// `base^(1/degree)` with `base` a canonical (normalized) expression and
    /// `degree >= 2`. Integer powers of the same root share this atom, so
    /// `(x-y)^(1/2)` and its derivative's `(x-y)^(-3/2)` stay comparable.
    Root { base: Expr, degree: u32 },
    /// A builtin applied to a canonical argument.
    Func(Builtin, Expr),
    /// A quadrature-defined function applied to a canonical argument.
    Quad(Arc<IntegralFn>, Expr),
}

impl Indet {
    pub fn to_expr(&self) -> Expr {
        match self {
            Indet::Sym(s) => Expr::Symbol(s.clone()),
            Indet::Root { base, degree } => Expr::Power(
                Box::new(base.clone()),
                BigRational::new(BigInt::one(), BigInt::from(*degree)),
            ),
            Indet::Func(b, arg) => Expr::call(*b, arg.clone()),
            Indet::Quad(f, arg) => Expr::Integral(f.clone(), Box::new(arg.clone())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Nf {
    pub ctx: Vec<Indet>,
    pub num: MPoly,
    pub den: MPoly,
}

impl Nf {
    pub fn constant(c: BigRational) -> Nf {
        Nf {
            ctx: Vec::new(),
            num: MPoly::constant(0, c),
            den: MPoly::one(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn var(v: Indet) -> Nf {
        Nf {
            ctx: vec![v],
            num: MPoly::var(1, 0),
            den: MPoly::one(1),
        }
    }

    /// Merge two contexts; returns the merged context and the remap tables
    /// (index, exponent multiplier) for each side. Root atoms with the same
    /// base unify to the lcm of their degrees.
    fn merge(a: &[Indet], b: &[Indet]) -> (Vec<Indet>, Vec<(usize, u16)>, Vec<(usize, u16)>) {
        let mut merged: Vec<Indet> = Vec::new();
        let unify = |merged: &mut Vec<Indet>, v: &Indet| {
            if let Indet::Root { base, degree } = v {
                if let Some(pos) = merged
                    .iter()
                    .position(|m| matches!(m, Indet::Root { base: mb, .. } if mb == base))
                {
                    if let Indet::Root { degree: md, .. } = &mut merged[pos] {
                        *md = lcm_u32(*md, *degree);
                    }
                    return;
                }
            }
            if !merged.contains(v) {
                merged.push(v.clone());
            }
        };
        for v in a.iter().chain(b.iter()) {
            unify(&mut merged, v);
        }
        merged.sort();
        merged.dedup();
        let locate = |v: &Indet| -> (usize, u16) {
            if let Indet::Root { base, degree } = v {
                let pos = merged
                    .iter()
                    .position(|m| matches!(m, Indet::Root { base: mb, .. } if mb == base))
                    .expect("merged root");
                if let Indet::Root { degree: md, .. } = &merged[pos] {
                    return (pos, (md / degree) as u16);
                }
                unreachable!()
            }
            (merged.iter().position(|m| m == v).expect("merged indet"), 1)
        };
        let map_a: Vec<(usize, u16)> = a.iter().map(&locate).collect();
        let map_b: Vec<(usize, u16)> = b.iter().map(&locate).collect();
        (merged, map_a, map_b)
    }

    fn align(a: &Nf, b: &Nf) -> (Vec<Indet>, MPoly, MPoly, MPoly, MPoly) {
        let (ctx, ma, mb) = Nf::merge(&a.ctx, &b.ctx);
        let n = ctx.len();
        (
            ctx,
            a.num.remap(n, &ma),
            a.den.remap(n, &ma),
            b.num.remap(n, &mb),
            b.den.remap(n, &mb),
        )
    }

    pub fn add(&self, other: &Nf) -> Nf {
        let (ctx, an, ad, bn, bd) = Nf::align(self, other);
        Nf {
            ctx,
            num: an.mul(&bd).add(&bn.mul(&ad)),
            den: ad.mul(&bd),
        }
        .reduce()
    }

    pub fn mul(&self, other: &Nf) -> Nf {
        let (ctx, an, ad, bn, bd) = Nf::align(self, other);
        Nf {
            ctx,
            num: an.mul(&bn),
            den: ad.mul(&bd),
        }
        .reduce()
    }

    pub fn div(&self, other: &Nf) -> Nf {
        let (ctx, an, ad, bn, bd) = Nf::align(self, other);
        Nf {
            ctx,
            num: an.mul(&bd),
            den: ad.mul(&bn),
        }
        .reduce()
    }

    fn pow_int(&self, e: i64) -> Nf {
        if e == 0 {
            return Nf::constant(BigRational::one());
        }
        let (num, den) = if e > 0 {
            (self.num.pow(e as u32), self.den.pow(e as u32))
        } else {
            (self.den.pow((-e) as u32), self.num.pow((-e) as u32))
        };
        Nf {
            ctx: self.ctx.clone(),
            num,
            den,
        }
        .reduce()
    }

    fn reduce(self) -> Nf {
        let mut nf = self;
        // Fold roots raised past their degree back onto the base. Each pass
        // strictly lowers the excess; the cap is a safety net.
        for _ in 0..32 {
            if !nf.has_root_excess() {
                break;
            }
            nf = nf.fold_roots();
        }
        nf.reduce_plain()
    }

    fn reduce_plain(self) -> Nf {
        let mut nf = self;
        if nf.num.is_zero() {
            return Nf {
                ctx: Vec::new(),
                num: MPoly::zero(0),
                den: MPoly::one(0),
            };
        }
        let g = gcd(&nf.num, &nf.den);
        if let (Some(n), Some(d)) = (nf.num.exact_div(&g), nf.den.exact_div(&g)) {
            nf.num = n;
            nf.den = d;
        }
        // Canonical scaling: denominator monic in its lex-leading term.
        if let Some(lc) = nf.den.terms.values().next_back().cloned() {
            let inv = BigRational::one() / lc;
            nf.num = nf.num.scale(&inv);
            nf.den = nf.den.scale(&inv);
        }
        nf.prune_ctx()
    }

    fn has_root_excess(&self) -> bool {
        for (i, v) in self.ctx.iter().enumerate() {
            if let Indet::Root { degree, .. } = v {
                let d = *degree as u16;
                for p in [&self.num, &self.den] {
                    if p.terms.keys().any(|m| m[i] >= d) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Rewrite every monomial with a root exponent `e >= degree` as
    /// `base^(e div degree) * root^(e mod degree)`.
    fn fold_roots(&self) -> Nf {
        let num = fold_poly(&self.num, &self.ctx);
        let den = fold_poly(&self.den, &self.ctx);
        num.div(&den)
    }

    pub fn from_expr(e: &Expr) -> Nf {
        match e {
            Expr::Number(n) => Nf::constant(n.clone()),
            Expr::Symbol(s) => Nf::var(Indet::Sym(s.clone())),
            Expr::Sum(es) => es
                .iter()
                .map(Nf::from_expr)
                .fold(Nf::constant(BigRational::zero()), |a, b| a.add(&b)),
            Expr::Product(es) => es
                .iter()
                .map(Nf::from_expr)
                .fold(Nf::constant(BigRational::one()), |a, b| a.mul(&b)),
            Expr::Quotient(a, b) => Nf::from_expr(a).div(&Nf::from_expr(b)),
            Expr::Power(base, q) => Nf::from_power(base, q),
            Expr::Call(b, arg) => {
                let canon = Nf::from_expr(arg).to_expr();
                if let (Builtin::Exp, true) = (b, canon.is_zero()) {
                    return Nf::constant(BigRational::one());
                }
                if let (Builtin::Ln, Expr::Number(n)) = (b, &canon) {
                    if n.is_one() {
                        return Nf::constant(BigRational::zero());
                    }
                }
                Nf::var(Indet::Func(*b, canon))
            }
            Expr::Integral(f, arg) => {
                let canon = Nf::from_expr(arg).to_expr();
                Nf::var(Indet::Quad(f.clone(), canon))
            }
        }
    }

    fn from_power(base: &Expr, q: &BigRational) -> Nf {
        let b = Nf::from_expr(base);
        if q.is_integer() {
            let e = q.to_integer().to_i64().expect("power exponent fits i64");
            return b.pow_int(e);
        }
        let p = q.numer().to_i64().expect("power numerator fits i64");
        let r = q.denom().to_u32().expect("power denominator fits u32");
        // Exact rational roots: 4^(1/2) -> 2.
        if let Some(c) = b.as_constant_rational() {
            if c.is_positive() {
                if let (Some(n), Some(d)) = (nth_root(c.numer(), r), nth_root(c.denom(), r)) {
                    let root = BigRational::new(n, d);
                    let mut acc = BigRational::one();
                    for _ in 0..p.unsigned_abs() {
                        acc *= &root;
                    }
                    if p < 0 {
                        acc = acc.recip();
                    }
                    return Nf::constant(acc);
                }
            }
        }
        // A root of a root shares the base: (b^(1/d))^(p/r) = b^(p/(d r)).
        if let Some((Indet::Root { base, degree }, k)) = b.as_pure_power() {
            let eff_num = k as i64 * p;
            let eff_degree = degree * r;
            let g = gcd_i64(eff_num, eff_degree as i64);
            let (rn, rd) = (eff_num / g, (eff_degree as i64 / g) as u32);
            if rd == 1 {
                return Nf::from_power(&base, &BigRational::from_integer(rn.into()));
            }
            return Nf::var(Indet::Root { base, degree: rd }).pow_int(rn);
        }
        let canon = b.to_expr();
        Nf::var(Indet::Root {
            base: canon,
            degree: r,
        })
        .pow_int(p)
    }

    fn as_constant_rational(&self) -> Option<BigRational> {
        if self.ctx.is_empty() {
            let n = self.num.as_constant()?;
            let d = self.den.as_constant()?;
            if d.is_zero() {
                return None;
            }
            return Some(n / d);
        }
        None
    }

    /// If the value is exactly `v^k` for a single indeterminate and positive
    /// integer k with unit coefficient, return it.
    fn as_pure_power(&self) -> Option<(Indet, u16)> {
        if self.ctx.len() != 1 || !self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            return None;
        }
        if self.num.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.num.terms.iter().next()?;
        if !c.is_one() || m[0] == 0 {
            return None;
        }
        Some((self.ctx[0].clone(), m[0]))
    }

    /// Drop indeterminates no longer present in either polynomial.
    fn prune_ctx(self) -> Nf {
        let mut used = vec![false; self.ctx.len()];
        for p in [&self.num, &self.den] {
            for v in p.vars_present() {
                used[v] = true;
            }
        }
        if used.iter().all(|&u| u) {
            return self;
        }
        let mut new_ctx = Vec::new();
        let mut map = Vec::with_capacity(self.ctx.len());
        for (i, v) in self.ctx.iter().enumerate() {
            if used[i] {
                map.push((new_ctx.len(), 1u16));
                new_ctx.push(v.clone());
            } else {
                map.push((0, 1));
            }
        }
        let n = new_ctx.len();
        Nf {
            num: self.num.remap(n, &map),
            den: self.den.remap(n, &map),
            ctx: new_ctx,
        }
    }

    /// Render back to a canonical AST. Terms are emitted in a fixed order, so
    /// structural equality of rendered forms matches normal-form equality.
    pub fn to_expr(&self) -> Expr {
        let num = poly_to_expr(&self.num, &self.ctx);
        if self.den.as_constant().map(|c| c.is_one()).unwrap_or(false) {
            num
        } else {
            Expr::div(num, poly_to_expr(&self.den, &self.ctx))
        }
    }
}

fn fold_poly(p: &MPoly, ctx: &[Indet]) -> Nf {
    let mut acc = Nf::constant(BigRational::zero());
    'terms: for (m, c) in &p.terms {
        for (i, v) in ctx.iter().enumerate() {
            if let Indet::Root { base, degree } = v {
                let d = *degree as u16;
                if m[i] >= d {
                    // split this term: base^(e/d) * root^(e%d) * rest
                    let (q, rem) = (m[i] / d, m[i] % d);
                    let mut rest = m.clone();
                    rest[i] = rem;
                    let mut rest_poly = MPoly::zero(p.nvars);
                    rest_poly.add_term(rest, c.clone());
                    let rest_nf = Nf {
                        ctx: ctx.to_vec(),
                        num: rest_poly,
                        den: MPoly::one(p.nvars),
                    }
                    .prune_ctx();
                    let base_pow = Nf::from_expr(base).pow_int(q as i64);
                    acc = acc.add(&rest_nf.mul(&base_pow));
                    continue 'terms;
                }
            }
        }
        let mut keep = MPoly::zero(p.nvars);
        keep.add_term(m.clone(), c.clone());
        let keep_nf = Nf {
            ctx: ctx.to_vec(),
            num: keep,
            den: MPoly::one(p.nvars),
        }
        .prune_ctx();
        acc = acc.add(&keep_nf);
    }
    acc
}

fn poly_to_expr(p: &MPoly, ctx: &[Indet]) -> Expr {
    if p.is_zero() {
        return Expr::zero();
    }
    let mut terms: Vec<Expr> = Vec::with_capacity(p.terms.len());
    for (m, c) in p.terms.iter().rev() {
        let mut factors: Vec<Expr> = Vec::new();
        if !c.is_one() || m.iter().all(|&e| e == 0) {
            factors.push(Expr::Number(c.clone()));
        }
        for (i, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let v = ctx[i].to_expr();
            if e == 1 {
                factors.push(v);
            } else if let Expr::Power(base, q) = &v {
                // Root atom to a power: (b^(1/2))^3 prints as b^(3/2).
                factors.push(Expr::Power(
                    base.clone(),
                    q * BigRational::from_integer(BigInt::from(e)),
                ));
            } else {
                factors.push(Expr::Power(
                    Box::new(v),
                    BigRational::from_integer(BigInt::from(e)),
                ));
            }
        }
        terms.push(match factors.len() {
            1 => factors.pop().unwrap(),
            _ => Expr::Product(factors),
        });
    }
    match terms.len() {
        1 => terms.pop().unwrap(),
        _ => Expr::Sum(terms),
    }
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a / gcd_u32(a, b) * b
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn nth_root(n: &BigInt, r: u32) -> Option<BigInt> {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(s: &str) -> Expr {
        Expr::parse(s).unwrap().normalize()
    }

    #[test]
    fn common_denominator() {
        assert_eq!(norm("x/y + 1/y"), norm("(x+1)/y"));
    }

    #[test]
    fn cancellation() {
        assert_eq!(norm("(x^2-y^2)/(x-y)"), norm("x+y"));
    }

    #[test]
    fn atoms_multiply_without_merging() {
        // exp(x)*exp(x) is the atom squared, not exp(2x).
        let e = norm("exp(x)*exp(x)");
        assert_eq!(e, norm("exp(x)^2"));
        assert_ne!(e, norm("exp(2*x)"));
    }

    #[test]
    fn idempotent() {
        for s in [
            "x^2 - y^2",
            "1/y^2",
            "(1+x^2+y^2)^(-2)",
            "exp(x)*y + sin(t)/x",
            "abs(x-y)^(1/2)",
            "(x - y)^(3/2) * (x-y)^(-1/2)",
            "(x-y)^(1/2) * (x-y)^(1/3)",
        ] {
            let once = norm(s);
            assert_eq!(once.normalize(), once, "normalize not idempotent on {s}");
        }
    }

    #[test]
    fn root_atoms_share_base() {
        assert_eq!(norm("(x - y)^(3/2) * (x-y)^(-1/2)"), norm("x - y"));
        assert_eq!(norm("(x-y)^(1/2) * (x-y)^(1/2)"), norm("x - y"));
    }

    #[test]
    fn rational_root_folds() {
        assert_eq!(norm("4^(1/2)"), Expr::integer(2));
        assert_eq!(norm("(1/9)^(1/2)"), Expr::rational(1, 3));
    }

    #[test]
    fn zero_quotient() {
        assert!(norm("(x - x)/y").is_zero());
    }
}
