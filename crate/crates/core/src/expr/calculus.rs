//! Exact differentiation and the table antiderivative used by the
//! Hamiltonian-function line integral.

use super::normal::{Indet, Nf};
use super::poly::MPoly;
use super::{Builtin, Expr, Symbol};
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiffError {
    #[error("cannot differentiate {0} symbolically")]
    Unsupported(&'static str),
    #[error("quadrature-defined function depends on '{0}' through its integrand, not its argument")]
    QuadratureParameter(String),
}

pub fn diff(e: &Expr, var: &Symbol) -> Result<Expr, DiffError> {
    Ok(match e {
        Expr::Number(_) => Expr::zero(),
        Expr::Symbol(s) => {
            if s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(es) => Expr::Sum(es.iter().map(|x| diff(x, var)).collect::<Result<_, _>>()?),
        Expr::Product(es) => {
            let mut terms = Vec::with_capacity(es.len());
            for (i, x) in es.iter().enumerate() {
                let dx = diff(x, var)?;
                if dx.is_zero() {
                    continue;
                }
                let mut fs = Vec::with_capacity(es.len());
                for (j, y) in es.iter().enumerate() {
                    fs.push(if i == j { dx.clone() } else { y.clone() });
                }
                terms.push(Expr::Product(fs));
            }
            if terms.is_empty() {
                Expr::zero()
            } else {
                Expr::Sum(terms)
            }
        }
        Expr::Quotient(a, b) => {
            let da = diff(a, var)?;
            let db = diff(b, var)?;
            // (a/b)' = (a'b - ab')/b^2
            Expr::div(
                Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                Expr::Power(b.clone(), BigRational::from_integer(2.into())),
            )
        }
        Expr::Power(base, q) => {
            if q.is_zero() {
                return Ok(Expr::zero());
            }
            let db = diff(base, var)?;
            if db.is_zero() {
                return Ok(Expr::zero());
            }
            let qm1 = q - BigRational::one();
            let pow = if qm1.is_zero() {
                Expr::one()
            } else {
                Expr::Power(base.clone(), qm1)
            };
            Expr::Product(vec![Expr::Number(q.clone()), pow, db])
        }
        Expr::Call(b, arg) => {
            let da = diff(arg, var)?;
            if da.is_zero() {
                return Ok(Expr::zero());
            }
            let outer = match b {
                Builtin::Exp => Expr::call(Builtin::Exp, (**arg).clone()),
                Builtin::Ln => Expr::div(Expr::one(), (**arg).clone()),
                Builtin::Sin => Expr::call(Builtin::Cos, (**arg).clone()),
                Builtin::Cos => Expr::neg(Expr::call(Builtin::Sin, (**arg).clone())),
                Builtin::Abs => return Err(DiffError::Unsupported("abs")),
            };
            Expr::mul(outer, da)
        }
        Expr::Integral(f, arg) => {
            // Fundamental theorem plus the chain rule on the argument. A free
            // occurrence of `var` inside the integrand is a parameter the
            // symbolic layer cannot move under the integral sign.
            let mut integrand_syms = f.integrand.free_symbols();
            integrand_syms.remove(&Symbol::dummy());
            if integrand_syms.contains(var) {
                return Err(DiffError::QuadratureParameter(var.name().to_string()));
            }
            let da = diff(arg, var)?;
            if da.is_zero() {
                return Ok(Expr::zero());
            }
            let at_arg = f.integrand.substitute(&[(Symbol::dummy(), (**arg).clone())]);
            Expr::mul(at_arg, da)
        }
    })
}

/// What the table integrator knows about the integration variable's presence
/// in the normal form.
struct VarLayout {
    var_idx: Option<usize>,
    root: Option<(usize, u32)>,
    exp: Option<(usize, Expr, Expr)>,
}

/// Antiderivative of `e` in `var` for the table-integrable class:
/// sums of generalized monomials `c * var^q` (q rational, coefficients free
/// of `var`) over a monomial-in-`var` denominator, plus
/// `p(var) * exp(a*var + b)` terms with `p` polynomial and `a`, `b` free of
/// `var`. Returns `None` outside the table.
///
/// `positive_domain` selects `ln(var)` over `ln(abs(var))` for the `1/var`
/// case; the latter is evaluation-only (abs has no symbolic derivative).
pub fn antiderivative(e: &Expr, var: &Symbol, positive_domain: bool) -> Option<Expr> {
    let nf = Nf::from_expr(e);
    if nf.is_zero() {
        return Some(Expr::zero());
    }
    let layout = classify(&nf, var)?;

    // Denominator: either free of var, or a single monomial whose var part is
    // var^k * root^j.
    let den_q = den_var_exponent(&nf, &layout)?;
    if !den_q.is_zero() && layout.exp.is_some() {
        return None;
    }
    if layout.root.is_some() && layout.exp.is_some() {
        return None;
    }

    let mut pieces: Vec<Expr> = Vec::new();
    if let Some((ei, alpha, beta)) = &layout.exp {
        let mut groups: std::collections::BTreeMap<u16, Vec<(Vec<u16>, BigRational)>> =
            Default::default();
        for (m, c) in &nf.num.terms {
            groups.entry(m[*ei]).or_default().push((m.clone(), c.clone()));
        }
        for (epow, terms) in groups {
            if epow == 0 {
                for (m, c) in &terms {
                    pieces.push(power_rule(&nf, &layout, &den_q, m, c, var, positive_domain)?);
                }
                continue;
            }
            pieces.push(exp_by_parts(
                &nf, &layout, *ei, epow, alpha, beta, &terms, var,
            )?);
        }
    } else {
        for (m, c) in &nf.num.terms {
            pieces.push(power_rule(&nf, &layout, &den_q, m, c, var, positive_domain)?);
        }
    }
    let den_rest = den_var_free_part(&nf, &layout);
    Some(Expr::div(Expr::Sum(pieces), den_rest).normalize())
}

fn classify(nf: &Nf, var: &Symbol) -> Option<VarLayout> {
    let mut layout = VarLayout {
        var_idx: None,
        root: None,
        exp: None,
    };
    for (i, v) in nf.ctx.iter().enumerate() {
        match v {
            Indet::Sym(s) if s == var => layout.var_idx = Some(i),
            Indet::Sym(_) => {}
            Indet::Root { base, degree } => {
                if base == &Expr::Symbol(var.clone()) {
                    layout.root = Some((i, *degree));
                } else if base.contains(var) {
                    return None;
                }
            }
            Indet::Func(Builtin::Exp, arg) if arg.contains(var) => {
                if layout.exp.is_some() {
                    return None;
                }
                let (alpha, beta) = split_linear(arg, var)?;
                layout.exp = Some((i, alpha, beta));
            }
            Indet::Func(_, arg) => {
                if arg.contains(var) {
                    return None;
                }
            }
            Indet::Quad(f, arg) => {
                if arg.contains(var) {
                    return None;
                }
                let mut syms = f.integrand.free_symbols();
                syms.remove(&Symbol::dummy());
                if syms.contains(var) {
                    return None;
                }
            }
        }
    }
    Some(layout)
}

/// Total rational exponent of `var` in the denominator, or `None` when the
/// denominator involves `var` in a non-monomial way.
fn den_var_exponent(nf: &Nf, layout: &VarLayout) -> Option<BigRational> {
    let touches_var = |i: usize| -> bool {
        Some(i) == layout.var_idx
            || layout.root.map(|(ri, _)| ri == i).unwrap_or(false)
            || layout.exp.as_ref().map(|(ei, _, _)| *ei == i).unwrap_or(false)
    };
    let var_monomials: Vec<&Vec<u16>> = nf
        .den
        .terms
        .keys()
        .filter(|m| m.iter().enumerate().any(|(i, &e)| e > 0 && touches_var(i)))
        .collect();
    if var_monomials.is_empty() {
        return Some(BigRational::zero());
    }
    if nf.den.terms.len() != 1 {
        return None;
    }
    let m = nf.den.terms.keys().next().unwrap();
    if layout.exp.as_ref().map(|(ei, _, _)| m[*ei] > 0).unwrap_or(false) {
        return None;
    }
    let mut q = BigRational::zero();
    if let Some(vi) = layout.var_idx {
        q += BigRational::from_integer((m[vi] as i64).into());
    }
    if let Some((ri, d)) = layout.root {
        q += BigRational::new((m[ri] as i64).into(), (d as i64).into());
    }
    Some(q)
}

/// Rebuild the var-free part of a monomial (with its coefficient) as an
/// expression.
fn monomial_coeff_expr(nf: &Nf, m: &[u16], c: &BigRational, layout: &VarLayout) -> Expr {
    let mut fs = vec![Expr::Number(c.clone())];
    for (i, &e) in m.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let is_var_part = Some(i) == layout.var_idx
            || layout.root.map(|(ri, _)| ri == i).unwrap_or(false)
            || layout.exp.as_ref().map(|(ei, _, _)| *ei == i).unwrap_or(false);
        if is_var_part {
            continue;
        }
        let v = nf.ctx[i].to_expr();
        fs.push(if e == 1 {
            v
        } else {
            match v {
                Expr::Power(base, q) => {
                    Expr::Power(base, q * BigRational::from_integer((e as i64).into()))
                }
                other => {
                    Expr::Power(Box::new(other), BigRational::from_integer((e as i64).into()))
                }
            }
        });
    }
    Expr::Product(fs)
}

fn power_rule(
    nf: &Nf,
    layout: &VarLayout,
    den_q: &BigRational,
    m: &[u16],
    c: &BigRational,
    var: &Symbol,
    positive_domain: bool,
) -> Option<Expr> {
    let mut q = -den_q.clone();
    if let Some(vi) = layout.var_idx {
        q += BigRational::from_integer((m[vi] as i64).into());
    }
    if let Some((ri, d)) = layout.root {
        q += BigRational::new((m[ri] as i64).into(), (d as i64).into());
    }
    let coeff = monomial_coeff_expr(nf, m, c, layout);
    if q == -BigRational::one() {
        let log = if positive_domain {
            Expr::call(Builtin::Ln, Expr::Symbol(var.clone()))
        } else {
            Expr::call(
                Builtin::Ln,
                Expr::call(Builtin::Abs, Expr::Symbol(var.clone())),
            )
        };
        return Some(Expr::mul(coeff, log));
    }
    let q1 = q + BigRational::one();
    let pow = if q1.is_one() {
        Expr::Symbol(var.clone())
    } else {
        Expr::Power(Box::new(Expr::Symbol(var.clone())), q1.clone())
    };
    Some(Expr::div(Expr::mul(coeff, pow), Expr::Number(q1)))
}

/// ∫ p(var) E^k dvar with E = exp(alpha·var + beta):
/// E^k · Σ_j (−1)^j p^(j)(var) / (k·alpha)^(j+1).
#[allow(clippy::too_many_arguments)]
fn exp_by_parts(
    nf: &Nf,
    layout: &VarLayout,
    exp_idx: usize,
    epow: u16,
    alpha: &Expr,
    beta: &Expr,
    terms: &[(Vec<u16>, BigRational)],
    var: &Symbol,
) -> Option<Expr> {
    // p(var) may only involve plain integer powers of var.
    if layout.root.is_some() && terms.iter().any(|(m, _)| {
        layout.root.map(|(ri, _)| m[ri] > 0).unwrap_or(false)
    }) {
        return None;
    }
    let mut by_deg: std::collections::BTreeMap<u16, Vec<Expr>> = Default::default();
    for (m, c) in terms {
        debug_assert_eq!(m[exp_idx], epow);
        let vdeg = layout.var_idx.map(|vi| m[vi]).unwrap_or(0);
        by_deg
            .entry(vdeg)
            .or_default()
            .push(monomial_coeff_expr(nf, m, c, layout));
    }
    let maxdeg = *by_deg.keys().next_back().unwrap_or(&0);
    let coeffs: Vec<Expr> = (0..=maxdeg)
        .map(|d| {
            by_deg
                .get(&d)
                .map(|v| Expr::Sum(v.clone()))
                .unwrap_or_else(Expr::zero)
        })
        .collect();
    let eff_alpha = Expr::mul(Expr::integer(epow as i64), alpha.clone()).normalize();
    if eff_alpha.is_zero() {
        return None;
    }
    let mut sum_terms: Vec<Expr> = Vec::new();
    let mut deriv = coeffs;
    let mut sign = 1i64;
    let mut alpha_pow = eff_alpha.clone();
    for _ in 0..=maxdeg {
        let pj = poly_expr(&deriv, var);
        sum_terms.push(Expr::div(
            Expr::mul(Expr::integer(sign), pj),
            alpha_pow.clone(),
        ));
        deriv = poly_derivative(&deriv);
        if deriv.iter().all(|c| c.normalize().is_zero()) {
            break;
        }
        sign = -sign;
        alpha_pow = Expr::mul(alpha_pow, eff_alpha.clone());
    }
    let e_expr = Expr::Power(
        Box::new(Expr::call(
            Builtin::Exp,
            Expr::add(
                Expr::mul(alpha.clone(), Expr::Symbol(var.clone())),
                beta.clone(),
            ),
        )),
        BigRational::from_integer((epow as i64).into()),
    );
    Some(Expr::mul(e_expr, Expr::Sum(sum_terms)))
}

fn den_var_free_part(nf: &Nf, layout: &VarLayout) -> Expr {
    if nf.den.terms.len() == 1 {
        let (m, c) = nf.den.terms.iter().next().unwrap();
        return monomial_coeff_expr(nf, m, c, layout);
    }
    let den_nf = Nf {
        ctx: nf.ctx.clone(),
        num: nf.den.clone(),
        den: MPoly::one(nf.den.nvars),
    };
    den_nf.to_expr()
}

/// p(var) from coefficient expressions, lowest degree first.
fn poly_expr(coeffs: &[Expr], var: &Symbol) -> Expr {
    let mut terms = Vec::new();
    for (d, c) in coeffs.iter().enumerate() {
        if c.normalize().is_zero() {
            continue;
        }
        let t = match d {
            0 => c.clone(),
            1 => Expr::mul(c.clone(), Expr::Symbol(var.clone())),
            _ => Expr::mul(
                c.clone(),
                Expr::Power(
                    Box::new(Expr::Symbol(var.clone())),
                    BigRational::from_integer((d as i64).into()),
                ),
            ),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        Expr::zero()
    } else {
        Expr::Sum(terms)
    }
}

fn poly_derivative(coeffs: &[Expr]) -> Vec<Expr> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, c)| Expr::mul(Expr::integer(d as i64), c.clone()))
        .collect()
}

/// Decompose `arg = alpha*var + beta` with `alpha`, `beta` free of `var`.
fn split_linear(arg: &Expr, var: &Symbol) -> Option<(Expr, Expr)> {
    let alpha = diff(arg, var).ok()?.normalize();
    if alpha.contains(var) || alpha.is_zero() {
        return None;
    }
    let beta =
        Expr::sub(arg.clone(), Expr::mul(alpha.clone(), Expr::Symbol(var.clone()))).normalize();
    if beta.contains(var) {
        return None;
    }
    Some((alpha, beta))
}
