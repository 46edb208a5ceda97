//! Sparse multivariate polynomials over the rationals, with the recursive
//! primitive-PRS gcd needed to keep normal forms reduced.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Exponent vector aligned with a variable context owned by the caller.
pub type Monomial = Vec<u16>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    pub nvars: usize,
    /// Lex-ordered terms; zero coefficients are never stored.
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> MPoly {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> MPoly {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> MPoly {
        MPoly::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, idx: usize) -> MPoly {
        let mut m = vec![0; nvars];
        m[idx] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(m, BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            // remove the now-zero coefficient
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Remap variables into a larger context: `map[i] = (new_index, exp_multiplier)`.
    pub fn remap(&self, new_nvars: usize, map: &[(usize, u16)]) -> MPoly {
        let mut out = MPoly::zero(new_nvars);
        for (m, c) in &self.terms {
            let mut nm = vec![0u16; new_nvars];
            for (i, &e) in m.iter().enumerate() {
                if e != 0 {
                    let (j, mult) = map[i];
                    nm[j] += e * mult;
                }
            }
            out.add_term(nm, c.clone());
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn vars_present(&self) -> Vec<usize> {
        let mut present = vec![false; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    present[i] = true;
                }
            }
        }
        present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| i)
            .collect()
    }

    /// Coefficients as polynomials in the remaining variables, indexed by the
    /// degree in `var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<MPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![MPoly::zero(self.nvars); deg + 1];
        for (m, c) in &self.terms {
            let d = m[var] as usize;
            let mut rm = m.clone();
            rm[var] = 0;
            out[d].add_term(rm, c.clone());
        }
        out
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn exact_div(&self, other: &MPoly) -> Option<MPoly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.as_constant() {
            return Some(self.scale(&(BigRational::one() / c)));
        }
        let mut rem = self.clone();
        let mut quo = MPoly::zero(self.nvars);
        let (lead_m, lead_c) = other.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        while !rem.is_zero() {
            let (rm, rc) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
            let mut qm = vec![0u16; self.nvars];
            for i in 0..self.nvars {
                if rm[i] < lead_m[i] {
                    return None;
                }
                qm[i] = rm[i] - lead_m[i];
            }
            let qc = rc / lead_c.clone();
            let mut t = MPoly::zero(self.nvars);
            t.terms.insert(qm, qc);
            quo = quo.add(&t);
            rem = rem.sub(&t.mul(other));
        }
        Some(quo)
    }

    /// Pseudo-remainder of `self` by `other` with respect to `var`
    /// (`other` must have positive degree in `var`).
    fn pseudo_rem(&self, other: &MPoly, var: usize) -> MPoly {
        let d = other.degree_in(var);
        let other_coeffs = other.coeffs_in(var);
        let lead = other_coeffs[d as usize].clone();
        let mut r = self.clone();
        let mut steps = self.degree_in(var) as i32 - d as i32 + 1;
        while !r.is_zero() && r.degree_in(var) >= d && steps >= 0 {
            let rdeg = r.degree_in(var);
            let r_coeffs = r.coeffs_in(var);
            let r_lead = r_coeffs[rdeg as usize].clone();
            // r := lead*r - r_lead * x^(rdeg-d) * other
            let shift = rdeg - d;
            let mut shifted = MPoly::zero(self.nvars);
            for (m, c) in &other.terms {
                let mut nm = m.clone();
                nm[var] += shift;
                shifted.add_term(nm, c.clone());
            }
            r = r.mul(&lead).sub(&r_lead.mul(&shifted));
            steps -= 1;
        }
        r
    }

    /// Content with respect to `var`: gcd of the coefficient polynomials.
    fn content_in(&self, var: usize) -> MPoly {
        let coeffs = self.coeffs_in(var);
        let mut acc = MPoly::zero(self.nvars);
        for c in coeffs {
            if c.is_zero() {
                continue;
            }
            acc = if acc.is_zero() { c } else { gcd(&acc, &c) };
            if acc.is_constant() {
                return MPoly::one(self.nvars);
            }
        }
        if acc.is_zero() {
            MPoly::one(self.nvars)
        } else {
            acc
        }
    }

    /// Divide out the leading coefficient's sign and make the polynomial
    /// primitive-normalized for use as a canonical gcd representative.
    fn normalized_sign(&self) -> MPoly {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

}

/// Polynomial gcd by the primitive Euclidean algorithm, recursing on the
/// number of live variables. Returns a sign-normalized representative; the
/// constant gcd of nonzero constants is 1 (rational coefficients are units).
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.normalized_sign();
    }
    if b.is_zero() {
        return a.normalized_sign();
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one(a.nvars);
    }
    let vars_a = a.vars_present();
    let vars_b = b.vars_present();
    // Main variable: prefer one live in both, else fall back to gcd of the
    // content with the whole other polynomial.
    let common: Vec<usize> = vars_a.iter().copied().filter(|v| vars_b.contains(v)).collect();
    let var = match common.last() {
        Some(&v) => v,
        None => {
            // a is free of every variable of b; gcd divides both, hence is a
            // constant unless contents share structure.
            return MPoly::one(a.nvars);
        }
    };
    let cont_a = a.content_in(var);
    let cont_b = b.content_in(var);
    let cont = gcd(&cont_a, &cont_b);
    let prim_a = a.exact_div(&cont_a).unwrap_or_else(|| a.clone());
    let prim_b = b.exact_div(&cont_b).unwrap_or_else(|| b.clone());

    let (mut p, mut q) = if prim_a.degree_in(var) >= prim_b.degree_in(var) {
        (prim_a, prim_b)
    } else {
        (prim_b, prim_a)
    };
    loop {
        let r = p.pseudo_rem(&q, var);
        if r.is_zero() {
            break;
        }
        let rc = r.content_in(var);
        let rp = r.exact_div(&rc).unwrap_or(r);
        p = q;
        q = rp;
        if q.degree_in(var) == 0 {
            q = MPoly::one(a.nvars);
            break;
        }
    }
    cont.mul(&q).normalized_sign()
}
