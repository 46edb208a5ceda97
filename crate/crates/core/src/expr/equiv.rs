//! Semi-decidable equivalence: exact zero test on normal forms first, then a
//! seeded, guard-respecting random sample comparison. The seed is fixed so CI
//! runs are reproducible.

use super::{Bindings, Expr, Guard, Symbol};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Default seed for all randomized equivalence checks.
pub const DEFAULT_SEED: u64 = 0x4C49_4548_414D; // "LIEHAM"

/// Relative difference above which two expressions are declared unequal.
pub const UNEQUAL_REL_TOL: f64 = 1e-6;
/// Relative agreement required of every sample for `NumericallyEqual`.
pub const EQUAL_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    /// The difference has the zero normal form.
    ProvedEqual,
    /// Some sample point differs beyond the coarse tolerance (the witness
    /// carries the point and both values). Sample disagreements inside the
    /// (1e-9, 1e-6] gap are also reported here, conservatively.
    ProvedUnequal {
        point: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
    },
    /// Normal forms differ but all seeded samples agree to 1e-9 relative.
    NumericallyEqual,
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        !matches!(self, Equivalence::ProvedUnequal { .. })
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Equivalence::ProvedEqual)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EquivError {
    #[error("sampling region is empty: no admissible point found in {0} attempts")]
    EmptyRegion(usize),
}

/// Options for the sampling fallback.
#[derive(Clone, Debug)]
pub struct EquivOptions {
    pub seed: u64,
    pub samples: usize,
    pub guards: Vec<Guard>,
    /// Inclusive sampling ranges per symbol; symbols not listed use the
    /// default box.
    pub ranges: Vec<(Symbol, (f64, f64))>,
    pub default_range: (f64, f64),
    /// Margin used when testing guards at candidate points.
    pub guard_margin: f64,
    /// Fixed values for symbols that must not be sampled.
    pub fixed: Vec<(Symbol, f64)>,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            seed: DEFAULT_SEED,
            samples: 200,
            guards: Vec::new(),
            ranges: Vec::new(),
            default_range: (-2.0, 2.0),
            guard_margin: 0.05,
            fixed: Vec::new(),
        }
    }
}

impl EquivOptions {
    pub fn with_guards(mut self, guards: Vec<Guard>) -> Self {
        self.guards = guards;
        self
    }

    pub fn with_range(mut self, s: Symbol, lo: f64, hi: f64) -> Self {
        self.ranges.push((s, (lo, hi)));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn range_for(&self, s: &Symbol) -> (f64, f64) {
        self.ranges
            .iter()
            .find(|(k, _)| k == s)
            .map(|(_, r)| *r)
            .unwrap_or(self.default_range)
    }
}

pub fn equivalent(e1: &Expr, e2: &Expr, opts: &EquivOptions) -> Result<Equivalence, EquivError> {
    let diff = Expr::sub(e1.clone(), e2.clone()).normalize();
    if diff.is_zero() {
        return Ok(Equivalence::ProvedEqual);
    }
    let mut syms = e1.free_symbols();
    syms.extend(e2.free_symbols());
    for g in &opts.guards {
        syms.extend(g.expr.free_symbols());
    }
    for (s, _) in &opts.fixed {
        syms.remove(s);
    }
    let symbols: Vec<Symbol> = syms.into_iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let max_attempts = opts.samples.max(1) * 1000;
    let mut worst: Option<(BTreeMap<String, f64>, f64, f64, f64)> = None;
    while accepted < opts.samples {
        if attempts >= max_attempts {
            if accepted == 0 {
                return Err(EquivError::EmptyRegion(max_attempts));
            }
            break;
        }
        attempts += 1;
        let mut b = Bindings::new();
        for (s, v) in &opts.fixed {
            b.set(s.clone(), *v);
        }
        for s in &symbols {
            let (lo, hi) = opts.range_for(s);
            b.set(s.clone(), rng.gen_range(lo..hi));
        }
        if !opts.guards.iter().all(|g| g.holds(&b, opts.guard_margin)) {
            continue;
        }
        let (v1, v2) = match (e1.eval(&b), e2.eval(&b)) {
            (Ok(a), Ok(c)) => (a, c),
            // evaluation errors mean the point violates an implicit guard
            _ => continue,
        };
        if !v1.is_finite() || !v2.is_finite() {
            continue;
        }
        accepted += 1;
        let rel = (v1 - v2).abs() / v1.abs().max(v2.abs()).max(1.0);
        if worst.as_ref().map(|(_, _, _, w)| rel > *w).unwrap_or(true) {
            let point: BTreeMap<String, f64> = b
                .iter()
                .map(|(s, v)| (s.name().to_string(), *v))
                .collect();
            worst = Some((point, v1, v2, rel));
        }
    }
    match worst {
        Some((point, lhs, rhs, rel)) if rel > EQUAL_REL_TOL => {
            Ok(Equivalence::ProvedUnequal { point, lhs, rhs })
        }
        Some(_) => Ok(Equivalence::NumericallyEqual),
        None => Err(EquivError::EmptyRegion(max_attempts)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn ring_identity_proved() {
        let v = e("x^2-y^2")
            .equivalent(&e("(x-y)*(x+y)"), &EquivOptions::default())
            .unwrap();
        assert_eq!(v, Equivalence::ProvedEqual);
    }

    #[test]
    fn constant_offset_unequal() {
        let v = e("-1/y")
            .equivalent(&e("-1/y + 1"), &EquivOptions::default())
            .unwrap();
        assert!(matches!(v, Equivalence::ProvedUnequal { .. }));
    }

    #[test]
    fn quadrature_vs_closed_form_numeric() {
        // int_1^y s^-2 ds vs 1 - 1/y on y > 0
        let s = Expr::Symbol(Symbol::dummy());
        let integrand = Expr::div(
            Expr::one(),
            Expr::Power(Box::new(s), BigRational::from_integer(2.into())),
        );
        let h = Expr::integral("H", integrand, BigRational::from_integer(1.into()), Expr::y());
        let closed = e("1 - 1/y");
        let opts = EquivOptions::default()
            .with_guards(vec![Guard::positive(Expr::y())])
            .with_range(Symbol::Y, 0.2, 3.0);
        let v = h.equivalent(&closed, &opts).unwrap();
        assert_eq!(v, Equivalence::NumericallyEqual);
    }

    #[test]
    fn transcendental_identities_are_numeric_only() {
        // atoms never merge: exp(x)*exp(y) = exp(x+y) holds numerically but
        // is not provable on the rational layer
        let v = e("exp(x)*exp(y)")
            .equivalent(&e("exp(x+y)"), &EquivOptions::default())
            .unwrap();
        assert_eq!(v, Equivalence::NumericallyEqual);
    }

    #[test]
    fn argument_order_is_canonical() {
        assert_eq!(
            e("y + x").normalize(),
            e("x + y").normalize()
        );
        assert_eq!(
            e("y*x*2").normalize(),
            e("2*x*y").normalize()
        );
    }

    #[test]
    fn verdicts_symmetric() {
        let pairs = [("x^2", "x*x"), ("x", "x+1"), ("exp(x)*exp(x)", "exp(x)^2")];
        for (a, b) in pairs {
            let v1 = e(a).equivalent(&e(b), &EquivOptions::default()).unwrap();
            let v2 = e(b).equivalent(&e(a), &EquivOptions::default()).unwrap();
            assert_eq!(v1.is_equal(), v2.is_equal());
            assert_eq!(v1.is_proved(), v2.is_proved());
        }
    }

    #[test]
    fn empty_region_reported() {
        let opts = EquivOptions::default().with_guards(vec![Guard::positive(
            Expr::sub(Expr::x(), Expr::integer(100)),
        )]);
        assert!(matches!(
            e("x").equivalent(&e("x+1"), &opts),
            Err(EquivError::EmptyRegion(_))
        ));
    }
}
