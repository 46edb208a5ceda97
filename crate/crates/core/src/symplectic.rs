//! Symplectic forms `ω = f dx∧dy` on planar domains: Hamiltonian-ness
//! verification through the integrating-factor identity `Xf = −f div X`,
//! ansatz-based integrating-factor search with uniqueness detection,
//! Hamiltonian function construction by line integrals, Poisson brackets,
//! and bracket tables with central-extension detection.
//!
//! Sign convention, frozen here and exercised by the tests: `ι_X ω = dh`
//! with `ω = f dx∧dy` gives `∂x h = −f X^y` and `∂y h = f X^x`, so the
//! reconstruction is `X_h = (∂y h / f, −∂x h / f)` and
//! `applyTo(X_h, g) = {g, h}_ω`.

use crate::expr::{
    rational_from_f64, rationalize, Bindings, EquivError, EquivOptions, Equivalence, Expr, Guard,
    RationalBindings, Symbol,
};
use crate::liealg::{sample_points, AlgebraName, LieAlgebra, ModularCheck, StructureConstants};
use crate::linalg;
use crate::vfield::{union_guards, VectorField};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `ω = f dx∧dy` with a non-vanishing coefficient on the guarded domain.
#[derive(Clone, Debug)]
pub struct SymplecticForm {
    pub f: Expr,
    pub guards: Vec<Guard>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum SymplecticError {
    #[error("form coefficient is the zero normal form")]
    ZeroForm,
    #[error("map Jacobian determinant is the zero normal form")]
    SingularPullback,
    #[error("ansatz factor {0} vanishes identically")]
    VanishingAnsatz(usize),
    #[error("integration path crosses a guard zero: {0}")]
    PathCrossesGuard(String),
    #[error("bracket {{h{i}, h{j}}} leaves span(h's, 1): residual {residual}")]
    BracketNotClosed { i: usize, j: usize, residual: String },
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error("differentiation failed: {0}")]
    Diff(String),
}

impl From<crate::expr::DiffError> for SymplecticError {
    fn from(e: crate::expr::DiffError) -> Self {
        SymplecticError::Diff(e.to_string())
    }
}

impl From<crate::liealg::AlgebraError> for SymplecticError {
    fn from(e: crate::liealg::AlgebraError) -> Self {
        SymplecticError::Sampling(e.to_string())
    }
}

impl SymplecticForm {
    pub fn new(f: Expr) -> Result<SymplecticForm, SymplecticError> {
        let fnorm = f.normalize();
        if fnorm.is_zero() {
            return Err(SymplecticError::ZeroForm);
        }
        let guards = if fnorm.as_number().is_some() {
            Vec::new()
        } else {
            vec![Guard::nonzero(fnorm.clone())]
        };
        Ok(SymplecticForm { f: fnorm, guards })
    }

    pub fn standard() -> SymplecticForm {
        SymplecticForm {
            f: Expr::one(),
            guards: Vec::new(),
        }
    }

    pub fn parse(s: &str) -> Result<SymplecticForm, SymplecticError> {
        let f = Expr::parse(s).map_err(|e| SymplecticError::Sampling(e.to_string()))?;
        SymplecticForm::new(f)
    }

    pub fn with_guards(mut self, guards: Vec<Guard>) -> SymplecticForm {
        self.guards = union_guards(&self.guards, &guards);
        self
    }
}

/// Verdict plus the residual `Xf + f div X` for a single field.
#[derive(Clone, Debug)]
pub struct HamiltonianCheck {
    pub verdict: Equivalence,
    pub residual: Expr,
}

/// Lemma-level check: `X` is Hamiltonian for `ω = f dx∧dy` iff
/// `Xf + f div X ≡ 0`.
pub fn is_hamiltonian(
    x: &VectorField,
    omega: &SymplecticForm,
    opts: &EquivOptions,
) -> Result<HamiltonianCheck, SymplecticError> {
    let residual = Expr::add(
        x.apply_to(&omega.f)?,
        Expr::mul(omega.f.clone(), x.divergence()?),
    )
    .normalize();
    let mut opts = opts.clone();
    opts.guards = union_guards(&opts.guards, &omega.guards);
    opts.guards = union_guards(&opts.guards, &x.guards);
    let verdict = if residual.is_zero() {
        Equivalence::ProvedEqual
    } else {
        residual.equivalent(&Expr::zero(), &opts)?
    };
    Ok(HamiltonianCheck { verdict, residual })
}

/// Solution of the multiplicative integrating-factor ansatz
/// `f = Π p_i^{e_i}`.
#[derive(Clone, Debug)]
pub struct FactorSolution {
    /// A particular exponent vector; the full solution set is this vector
    /// plus the span of `homogeneous_basis`.
    pub exponents: Vec<BigRational>,
    /// Basis of the homogeneous part of the affine solution set; empty
    /// means the factor is unique within the ansatz (up to the constant).
    pub homogeneous_basis: Vec<Vec<BigRational>>,
    pub homogeneous_dim: usize,
    pub form: SymplecticForm,
}

/// Search `f = Π p_i^{e_i}` with `X_g f + f div X_g = 0` for every
/// generator: the condition is affine in the exponents,
/// `Σ_i e_i (X p_i)/p_i + div X = 0`. Solved exactly at sample points, then
/// re-verified symbolically.
pub fn find_integrating_factor(
    generators: &[VectorField],
    ansatz: &[Expr],
    opts: &EquivOptions,
) -> Result<Option<FactorSolution>, SymplecticError> {
    if generators.is_empty() || ansatz.is_empty() {
        return Ok(None);
    }
    for (i, p) in ansatz.iter().enumerate() {
        if p.normalize().is_zero() {
            return Err(SymplecticError::VanishingAnsatz(i));
        }
    }
    // Per generator g: terms_i = (g p_i)/p_i, rhs = -div g, all symbolic.
    let mut term_rows: Vec<(Vec<Expr>, Expr)> = Vec::new();
    for g in generators {
        let terms: Vec<Expr> = ansatz
            .iter()
            .map(|p| g.apply_to(p).map(|gp| Expr::div(gp, p.clone()).normalize()))
            .collect::<Result<_, _>>()?;
        let rhs = Expr::neg(g.divergence()?).normalize();
        term_rows.push((terms, rhs));
    }
    // Stack numeric equations at rational sample points.
    let pts = sample_points(generators, ansatz.len() + 3)?;
    let mut matrix: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs_vec: Vec<BigRational> = Vec::new();
    for (terms, rhs) in &term_rows {
        for p in &pts {
            let mut row = Vec::with_capacity(terms.len());
            let mut ok = true;
            for t in terms {
                match exact_or_float(t, p) {
                    Some(v) => row.push(v),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            let Some(r) = exact_or_float(rhs, p) else {
                continue;
            };
            if ok {
                matrix.push(row);
                rhs_vec.push(r);
            }
        }
    }
    if matrix.len() < ansatz.len() {
        return Err(SymplecticError::Sampling(
            "not enough admissible sample points for the ansatz solve".to_string(),
        ));
    }
    let Some((exponents, nullspace)) = linalg::solve_exact(&matrix, &rhs_vec) else {
        return Ok(None);
    };
    // Symbolic re-verification per generator.
    let mut opts = opts.clone();
    for g in generators {
        opts.guards = union_guards(&opts.guards, &g.guards);
    }
    for p in ansatz {
        opts.guards = union_guards(&opts.guards, &[Guard::nonzero(p.normalize())]);
    }
    for (terms, rhs) in &term_rows {
        let mut sum = Vec::new();
        for (t, e) in terms.iter().zip(&exponents) {
            sum.push(Expr::mul(Expr::Number(e.clone()), t.clone()));
        }
        let lhs = Expr::Sum(sum).normalize();
        let resid = Expr::sub(lhs, rhs.clone()).normalize();
        let ok = resid.is_zero()
            || resid
                .equivalent(&Expr::zero(), &opts)
                .map(|v| v.is_equal())
                .unwrap_or(false);
        if !ok {
            return Ok(None);
        }
    }
    let form = form_from_exponents(ansatz, &exponents)?;
    Ok(Some(FactorSolution {
        exponents,
        homogeneous_dim: nullspace.len(),
        homogeneous_basis: nullspace,
        form,
    }))
}

fn exact_or_float(e: &Expr, p: &RationalBindings) -> Option<BigRational> {
    if let Some(v) = e.eval_exact(p) {
        return Some(v);
    }
    let v = e.eval(&p.to_f64()).ok()?;
    rational_from_f64(v)
}

fn form_from_exponents(
    ansatz: &[Expr],
    exponents: &[BigRational],
) -> Result<SymplecticForm, SymplecticError> {
    let mut factors = Vec::new();
    for (p, e) in ansatz.iter().zip(exponents) {
        if e.is_zero() {
            continue;
        }
        factors.push(Expr::Power(Box::new(p.clone()), e.clone()));
    }
    if factors.is_empty() {
        return SymplecticForm::new(Expr::one());
    }
    SymplecticForm::new(Expr::Product(factors).normalize())
}

/// Outcome of the no-go analysis on an algebra with modular generators.
#[derive(Clone, Debug)]
pub enum NoGoOutcome {
    /// Divergence-free generators but a basis element with nonzero
    /// divergence: Hamiltonian-ness is impossible on any subdomain.
    DivergenceWitness { index: usize, divergence: Expr },
    /// The modular-divergence condition fails for this element.
    ModularWitness {
        index: usize,
        lhs: String,
        rhs: String,
    },
    Inconclusive,
}

impl NoGoOutcome {
    pub fn is_obstruction(&self) -> bool {
        !matches!(self, NoGoOutcome::Inconclusive)
    }
}

/// Corollary-level obstruction: if every modular generator is divergence
/// free and some basis element is not, that element is a witness; otherwise
/// fall back to the modular-divergence condition.
pub fn no_go_witness(algebra: &LieAlgebra) -> Result<NoGoOutcome, SymplecticError> {
    let gens_div_free = algebra
        .generators
        .iter()
        .map(|&i| algebra.basis[i].divergence())
        .collect::<Result<Vec<_>, _>>()?
        .iter()
        .all(|d| d.is_zero());
    if gens_div_free {
        for (i, f) in algebra.basis.iter().enumerate() {
            let d = f.divergence()?;
            if !d.is_zero() {
                return Ok(NoGoOutcome::DivergenceWitness {
                    index: i,
                    divergence: d,
                });
            }
        }
        return Ok(NoGoOutcome::Inconclusive);
    }
    match algebra.modular_divergence_check()? {
        ModularCheck::Counterexample { index, lhs, rhs } => {
            Ok(NoGoOutcome::ModularWitness { index, lhs, rhs })
        }
        _ => Ok(NoGoOutcome::Inconclusive),
    }
}

/// Hamiltonian function by the two-segment axis-aligned line integral of
/// `ι_X ω = f(X^x dy − X^y dx)` from the base point, pinned by
/// `h(base) = 0`. Closed form when both segment integrands fall in the
/// table-integrable class, else a quadrature-defined expression.
pub fn hamiltonian_function(
    x: &VectorField,
    omega: &SymplecticForm,
    base: (BigRational, BigRational),
) -> Result<Expr, SymplecticError> {
    let (x0, y0) = base;
    let guards = union_guards(&omega.guards, &x.guards);
    let base_b = Bindings::point(
        x0.to_f64().unwrap_or(f64::NAN),
        y0.to_f64().unwrap_or(f64::NAN),
    );
    for g in &guards {
        if !g.holds(&base_b, 0.0) {
            return Err(SymplecticError::PathCrossesGuard(format!(
                "base point violates {g}"
            )));
        }
    }
    // Segment 1: y frozen at y0, integrate -f X^y in x from x0 to x.
    let seg1_integrand = Expr::neg(Expr::mul(omega.f.clone(), x.y.clone()))
        .substitute(&[(Symbol::Y, Expr::Number(y0.clone()))])
        .normalize();
    // Segment 2: x free as a parameter, integrate f X^x in y from y0 to y.
    let seg2_integrand = Expr::mul(omega.f.clone(), x.x.clone()).normalize();

    let positive_x = x0.is_positive() && guards_imply_positive(&guards, &Symbol::X);
    let positive_y = y0.is_positive() && guards_imply_positive(&guards, &Symbol::Y);

    let seg1 = segment_integral(&seg1_integrand, &Symbol::X, &x0, positive_x, "h_seg_x");
    let seg2 = segment_integral(&seg2_integrand, &Symbol::Y, &y0, positive_y, "h_seg_y");
    Ok(Expr::add(seg1, seg2).normalize())
}

fn guards_imply_positive(guards: &[Guard], s: &Symbol) -> bool {
    guards.iter().any(|g| {
        matches!(g.kind, crate::expr::GuardKind::Positive) && g.expr == Expr::Symbol(s.clone())
    })
}

/// `∫_base^var integrand(s) ds` in closed form when possible, else as a
/// quadrature node (the integrand rewritten in the reserved dummy).
fn segment_integral(
    integrand: &Expr,
    var: &Symbol,
    base: &BigRational,
    positive_domain: bool,
    name: &str,
) -> Expr {
    if integrand.is_zero() {
        return Expr::zero();
    }
    if let Some(anti) = integrand.antiderivative(var, positive_domain) {
        if let Ok(check) = anti.diff(var) {
            // accept the closed form only if it certifiably differentiates back
            if Expr::sub(check, integrand.clone()).normalize().is_zero() {
                let at_base = anti
                    .substitute(&[(var.clone(), Expr::Number(base.clone()))])
                    .normalize();
                return Expr::sub(anti, at_base).normalize();
            }
        }
    }
    let in_dummy = integrand.substitute(&[(var.clone(), Expr::Symbol(Symbol::dummy()))]);
    Expr::integral(name, in_dummy, base.clone(), Expr::Symbol(var.clone()))
}

/// `{h, g}_ω = (∂x h ∂y g − ∂y h ∂x g)/f`, normalized.
pub fn poisson_bracket(
    h: &Expr,
    g: &Expr,
    omega: &SymplecticForm,
) -> Result<Expr, SymplecticError> {
    let hx = h.diff(&Symbol::X)?;
    let hy = h.diff(&Symbol::Y)?;
    let gx = g.diff(&Symbol::X)?;
    let gy = g.diff(&Symbol::Y)?;
    Ok(Expr::div(
        Expr::sub(Expr::mul(hx, gy), Expr::mul(hy, gx)),
        omega.f.clone(),
    )
    .normalize())
}

/// Numeric Poisson bracket at a point; partials fall back to high-order
/// finite differences for quadrature-defined functions.
pub fn poisson_bracket_value(
    h: &Expr,
    g: &Expr,
    omega: &SymplecticForm,
    b: &Bindings,
) -> Result<f64, SymplecticError> {
    let hx = numeric_partial(h, &Symbol::X, b)?;
    let hy = numeric_partial(h, &Symbol::Y, b)?;
    let gx = numeric_partial(g, &Symbol::X, b)?;
    let gy = numeric_partial(g, &Symbol::Y, b)?;
    let f = omega
        .f
        .eval(b)
        .map_err(|e| SymplecticError::Sampling(e.to_string()))?;
    Ok((hx * gy - hy * gx) / f)
}

/// Partial derivative value: exact route when the symbolic derivative
/// exists, else a centered 5-point finite difference.
pub fn numeric_partial(e: &Expr, var: &Symbol, b: &Bindings) -> Result<f64, SymplecticError> {
    if let Ok(d) = e.diff(var) {
        return d
            .eval(b)
            .map_err(|err| SymplecticError::Sampling(err.to_string()));
    }
    let v0 = b
        .get(var)
        .ok_or_else(|| SymplecticError::Sampling(format!("unbound {var}")))?;
    let h = 1e-3 * (1.0 + v0.abs());
    let f = |dv: f64| -> Result<f64, SymplecticError> {
        let mut bb = b.clone();
        bb.set(var.clone(), v0 + dv);
        e.eval(&bb)
            .map_err(|err| SymplecticError::Sampling(err.to_string()))
    };
    // 5-point stencil, O(h^4)
    let d = (f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h);
    Ok(d)
}

/// Reconstruct the Hamiltonian vector field `X_h = (∂y h/f, −∂x h/f)`.
pub fn hamiltonian_field(
    h: &Expr,
    omega: &SymplecticForm,
) -> Result<VectorField, SymplecticError> {
    let hx = h.diff(&Symbol::X)?;
    let hy = h.diff(&Symbol::Y)?;
    Ok(VectorField::new(
        Expr::div(hy, omega.f.clone()).normalize(),
        Expr::neg(Expr::div(hx, omega.f.clone())).normalize(),
    )
    .with_guards(omega.guards.clone()))
}

/// Verify `dh = ι_X ω` for a constructed Hamiltonian: symbolic when `h` is
/// differentiable, else numeric at seeded sample points (tolerance 1e-6,
/// 100 points).
pub fn verify_hamiltonian_function(
    x: &VectorField,
    omega: &SymplecticForm,
    h: &Expr,
    opts: &EquivOptions,
) -> Result<Equivalence, SymplecticError> {
    let want_x = Expr::neg(Expr::mul(omega.f.clone(), x.y.clone())).normalize();
    let want_y = Expr::mul(omega.f.clone(), x.x.clone()).normalize();
    let mut opts = opts.clone();
    opts.guards = union_guards(&opts.guards, &omega.guards);
    opts.guards = union_guards(&opts.guards, &x.guards);
    let diffable = h.diff(&Symbol::X).is_ok() && h.diff(&Symbol::Y).is_ok();
    if diffable {
        let hx = h.diff(&Symbol::X)?;
        let hy = h.diff(&Symbol::Y)?;
        let vx = hx.equivalent(&want_x, &opts)?;
        if !vx.is_equal() {
            return Ok(vx);
        }
        let vy = hy.equivalent(&want_y, &opts)?;
        if !vy.is_equal() {
            return Ok(vy);
        }
        return Ok(match (vx, vy) {
            (Equivalence::ProvedEqual, Equivalence::ProvedEqual) => Equivalence::ProvedEqual,
            _ => Equivalence::NumericallyEqual,
        });
    }
    // Numeric fallback for quadrature-defined h.
    let points = sample_bindings(&opts, 100)?;
    let mut worst: Option<(std::collections::BTreeMap<String, f64>, f64, f64, f64)> = None;
    for b in &points {
        let hx = numeric_partial(h, &Symbol::X, b)?;
        let hy = numeric_partial(h, &Symbol::Y, b)?;
        let wx = want_x
            .eval(b)
            .map_err(|e| SymplecticError::Sampling(e.to_string()))?;
        let wy = want_y
            .eval(b)
            .map_err(|e| SymplecticError::Sampling(e.to_string()))?;
        let scale = wx.abs().max(wy.abs()).max(1.0);
        let rel = ((hx - wx).abs() / scale).max((hy - wy).abs() / scale);
        if worst.as_ref().map(|w| rel > w.3).unwrap_or(true) {
            let point = b
                .iter()
                .map(|(s, v)| (s.name().to_string(), *v))
                .collect();
            worst = Some((point, hx, wx, rel));
        }
    }
    match worst {
        Some((_, _, _, rel)) if rel <= 1e-6 => Ok(Equivalence::NumericallyEqual),
        Some((point, lhs, rhs, _)) => Ok(Equivalence::ProvedUnequal { point, lhs, rhs }),
        None => Err(SymplecticError::Sampling("no sample points".to_string())),
    }
}

/// Draw guard-satisfying sample bindings per the options.
pub fn sample_bindings(
    opts: &EquivOptions,
    count: usize,
) -> Result<Vec<Bindings>, SymplecticError> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    let range = |opts: &EquivOptions, s: &Symbol| -> (f64, f64) {
        opts.ranges
            .iter()
            .find(|(k, _)| k == s)
            .map(|(_, r)| *r)
            .unwrap_or(opts.default_range)
    };
    while out.len() < count && attempts < count * 1000 {
        attempts += 1;
        let mut b = Bindings::new();
        for (s, v) in &opts.fixed {
            b.set(s.clone(), *v);
        }
        for s in [Symbol::X, Symbol::Y] {
            if b.get(&s).is_none() {
                let (lo, hi) = range(opts, &s);
                b.set(s, rng.gen_range(lo..hi));
            }
        }
        if opts.guards.iter().all(|g| g.holds(&b, opts.guard_margin)) {
            out.push(b);
        }
    }
    if out.len() < count {
        return Err(SymplecticError::Sampling(format!(
            "only {} admissible points found",
            out.len()
        )));
    }
    Ok(out)
}

/// Bracket table of Hamiltonian functions over span(h's ∪ {1}): coefficient
/// tensor, central-extension flag, and the Lie-Hamilton algebra name.
#[derive(Clone, Debug)]
pub struct HamiltonianTable {
    pub functions: Vec<Expr>,
    /// `coeffs[i][j]` has length n+1: coefficients on (h_1..h_n, 1) of
    /// `{h_i, h_j}`.
    pub coeffs: Vec<Vec<Vec<BigRational>>>,
    pub central_flag: bool,
    pub name: AlgebraName,
}

impl HamiltonianTable {
    /// Extended structure constants over the basis (h_1..h_n, h_0 = 1).
    pub fn extended_constants(&self) -> StructureConstants {
        let n = self.functions.len();
        let mut sc = StructureConstants::zero(n + 1);
        for i in 0..n {
            for j in (i + 1)..n {
                sc.set(i, j, &self.coeffs[i][j]);
            }
        }
        sc
    }

    /// Structure constants of the quotient by the center coordinate
    /// (coefficients on 1 dropped).
    pub fn quotient_constants(&self) -> StructureConstants {
        let n = self.functions.len();
        let mut sc = StructureConstants::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let row: Vec<BigRational> = self.coeffs[i][j][..n].to_vec();
                sc.set(i, j, &row);
            }
        }
        sc
    }

    /// Try to remove the central terms by the shift `h_i -> h_i + c_i`:
    /// solvable iff `d_ij = Σ_k c^k_ij c_k` has a solution. On success
    /// returns the shifts and the re-tabulated (flag-false) table.
    pub fn trivialize(&self) -> Option<(Vec<BigRational>, HamiltonianTable)> {
        let n = self.functions.len();
        if !self.central_flag {
            return Some((vec![BigRational::zero(); n], self.clone()));
        }
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                rows.push(self.coeffs[i][j][..n].to_vec());
                rhs.push(self.coeffs[i][j][n].clone());
            }
        }
        let (shift, _) = linalg::solve_exact(&rows, &rhs)?;
        let functions: Vec<Expr> = self
            .functions
            .iter()
            .zip(&shift)
            .map(|(h, c)| Expr::add(h.clone(), Expr::Number(c.clone())).normalize())
            .collect();
        let mut coeffs = self.coeffs.clone();
        for i in 0..n {
            for j in 0..n {
                // d'_ij = d_ij - sum_k c^k_ij c_k = 0 by construction
                let mut d = coeffs[i][j][n].clone();
                for k in 0..n {
                    d -= &coeffs[i][j][k] * &shift[k];
                }
                coeffs[i][j][n] = d;
            }
        }
        let mut table = HamiltonianTable {
            functions,
            coeffs,
            central_flag: false,
            name: AlgebraName::Unrecognized,
        };
        table.central_flag = table
            .coeffs
            .iter()
            .flatten()
            .any(|row| !row[n].is_zero());
        table.name = table.quotient_constants().fingerprint().name;
        Some((shift, table))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.functions.len();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                brackets.push(serde_json::json!({
                    "i": i,
                    "j": j,
                    "coefficients": self.coeffs[i][j]
                        .iter()
                        .map(crate::expr::rational_string)
                        .collect::<Vec<_>>(),
                }));
            }
        }
        serde_json::json!({
            "functions": self.functions.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
            "basis_order": "h_1..h_n then the central 1",
            "brackets": brackets,
            "central_extension": self.central_flag,
            "lie_hamilton_algebra": self.name.to_string(),
        })
    }
}

/// Compute all pairwise Poisson brackets and express each in
/// span(h's ∪ {1}) by exact point-sampled solve plus symbolic
/// re-verification. The central flag is set iff some bracket carries a
/// nonzero coefficient on 1.
pub fn bracket_table(
    hs: &[Expr],
    omega: &SymplecticForm,
    opts: &EquivOptions,
) -> Result<HamiltonianTable, SymplecticError> {
    let n = hs.len();
    if n == 0 {
        return Err(SymplecticError::Sampling("empty function list".to_string()));
    }
    let mut opts = opts.clone();
    opts.guards = union_guards(&opts.guards, &omega.guards);
    // quadrature-defined functions have no symbolic brackets: solve their
    // table from finite-difference bracket values instead
    let mut brackets = vec![vec![None; n]; n];
    let mut all_symbolic = true;
    for i in 0..n {
        for j in (i + 1)..n {
            match poisson_bracket(&hs[i], &hs[j], omega) {
                Ok(pb) => brackets[i][j] = Some(pb),
                Err(SymplecticError::Diff(_)) => {
                    all_symbolic = false;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if !all_symbolic {
        return bracket_table_numeric(hs, omega, &opts);
    }
    let all_exprs: Vec<&Expr> = hs
        .iter()
        .chain(brackets.iter().flatten().flatten())
        .collect();
    let pts = bracket_sample_points(&all_exprs, omega, &opts, n + 3)?;
    let matrix: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|p| {
            let mut row: Vec<BigRational> = hs
                .iter()
                .map(|h| exact_or_float(h, p).expect("sample admissible"))
                .collect();
            row.push(BigRational::from_integer(1.into()));
            row
        })
        .collect();
    let mut coeffs = vec![vec![vec![BigRational::zero(); n + 1]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let pb = brackets[i][j].as_ref().unwrap();
            let rhs: Vec<BigRational> = pts
                .iter()
                .map(|p| exact_or_float(pb, p).expect("sample admissible"))
                .collect();
            let raw = linalg::solve_exact(&matrix, &rhs);
            let sol = match raw {
                Some((sol, _)) => sol,
                None => {
                    // floats may have crept in; retry with rounded entries
                    let mf: Vec<Vec<f64>> = matrix
                        .iter()
                        .map(|r| r.iter().map(|v| v.to_f64().unwrap()).collect())
                        .collect();
                    let rf: Vec<f64> = rhs.iter().map(|v| v.to_f64().unwrap()).collect();
                    let approx = linalg::solve_f64(&mf, &rf, 1e-9).and_then(|x| {
                        x.into_iter()
                            .map(|v| rationalize(v, 1_000_000))
                            .collect::<Option<Vec<_>>>()
                    });
                    match approx {
                        Some(s) => s,
                        None => {
                            return Err(SymplecticError::BracketNotClosed {
                                i,
                                j,
                                residual: pb.to_string(),
                            })
                        }
                    }
                }
            };
            // symbolic re-verification
            let mut combo = vec![Expr::Number(sol[n].clone())];
            for (h, c) in hs.iter().zip(&sol[..n]) {
                combo.push(Expr::mul(Expr::Number(c.clone()), h.clone()));
            }
            let resid = Expr::sub(pb.clone(), Expr::Sum(combo)).normalize();
            let ok = resid.is_zero()
                || resid
                    .equivalent(&Expr::zero(), &opts)
                    .map(|v| v.is_equal())
                    .unwrap_or(false);
            if !ok {
                return Err(SymplecticError::BracketNotClosed {
                    i,
                    j,
                    residual: resid.to_string(),
                });
            }
            coeffs[i][j] = sol.clone();
            coeffs[j][i] = sol.iter().map(|v| -v.clone()).collect();
        }
    }
    let central_flag = coeffs.iter().flatten().any(|row| !row[n].is_zero());
    let mut table = HamiltonianTable {
        functions: hs.to_vec(),
        coeffs,
        central_flag,
        name: AlgebraName::Unrecognized,
    };
    table.name = lie_hamilton_name(&table);
    Ok(table)
}

/// Float fallback for function lists with quadrature-defined members:
/// bracket values by finite-difference partials at seeded points, exact
/// reconstruction of small-rational coefficients, then numeric
/// re-verification at held-out points (tolerance 1e-6 relative).
fn bracket_table_numeric(
    hs: &[Expr],
    omega: &SymplecticForm,
    opts: &EquivOptions,
) -> Result<HamiltonianTable, SymplecticError> {
    let n = hs.len();
    let solve_pts = sample_bindings(opts, n + 6)?;
    let mut verify_opts = opts.clone();
    verify_opts.seed = opts.seed.wrapping_add(1);
    let verify_pts = sample_bindings(&verify_opts, 20)?;
    let value = |h: &Expr, b: &Bindings| -> Result<f64, SymplecticError> {
        h.eval(b).map_err(|e| SymplecticError::Sampling(e.to_string()))
    };
    let matrix: Vec<Vec<f64>> = solve_pts
        .iter()
        .map(|b| {
            let mut row = hs
                .iter()
                .map(|h| value(h, b))
                .collect::<Result<Vec<_>, _>>()?;
            row.push(1.0);
            Ok(row)
        })
        .collect::<Result<_, SymplecticError>>()?;
    let mut coeffs = vec![vec![vec![BigRational::zero(); n + 1]; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let rhs: Vec<f64> = solve_pts
                .iter()
                .map(|b| poisson_bracket_value(&hs[i], &hs[j], omega, b))
                .collect::<Result<_, _>>()?;
            let approx = crate::linalg::solve_f64(&matrix, &rhs, 1e-7).and_then(|x| {
                x.into_iter()
                    .map(|v| rationalize(v, 1_000_000))
                    .collect::<Option<Vec<_>>>()
            });
            let Some(sol) = approx else {
                return Err(SymplecticError::BracketNotClosed {
                    i,
                    j,
                    residual: "numeric solve failed".to_string(),
                });
            };
            // held-out verification
            for b in &verify_pts {
                let pb = poisson_bracket_value(&hs[i], &hs[j], omega, b)?;
                let mut combo = sol[n].to_f64().unwrap_or(f64::NAN);
                for (h, c) in hs.iter().zip(&sol[..n]) {
                    combo += c.to_f64().unwrap_or(f64::NAN) * value(h, b)?;
                }
                let scale = pb.abs().max(1.0);
                if (pb - combo).abs() / scale > 1e-6 {
                    return Err(SymplecticError::BracketNotClosed {
                        i,
                        j,
                        residual: format!("numeric residual {:.3e}", (pb - combo).abs()),
                    });
                }
            }
            coeffs[i][j] = sol.clone();
            coeffs[j][i] = sol.iter().map(|v| -v.clone()).collect();
        }
    }
    let central_flag = coeffs.iter().flatten().any(|row| !row[n].is_zero());
    let mut table = HamiltonianTable {
        functions: hs.to_vec(),
        coeffs,
        central_flag,
        name: AlgebraName::Unrecognized,
    };
    table.name = lie_hamilton_name(&table);
    Ok(table)
}

/// Naming per the extension logic: a flag-false table is named by its own
/// fingerprint; a trivializable extension is `base ⊕ R`; a genuine central
/// extension gets the overline name, with the classical aliases h4 and h6.
fn lie_hamilton_name(table: &HamiltonianTable) -> AlgebraName {
    if !table.central_flag {
        return table.quotient_constants().fingerprint().name;
    }
    let base = table.quotient_constants().fingerprint().name;
    if let Some((_, reduced)) = table.trivialize() {
        if !reduced.central_flag {
            return match base {
                AlgebraName::So3 => AlgebraName::So3PlusR,
                AlgebraName::Sl2 => AlgebraName::Sl2PlusR,
                other => AlgebraName::Ext(Box::new(other)),
            };
        }
    }
    match base {
        AlgebraName::Iso2 => AlgebraName::ExtIso2,
        AlgebraName::Iso11 => AlgebraName::H4,
        AlgebraName::Sl2SemiR2 => AlgebraName::H6,
        AlgebraName::H2SemiR2 => AlgebraName::ExtH2SemiR2,
        AlgebraName::BAlpha(_)
        | AlgebraName::H2PlusR
        | AlgebraName::Rn(_)
        | AlgebraName::R2Jordan => AlgebraName::ExtRSemiR2,
        other => AlgebraName::Ext(Box::new(other)),
    }
}

fn bracket_sample_points(
    exprs: &[&Expr],
    omega: &SymplecticForm,
    opts: &EquivOptions,
    count: usize,
) -> Result<Vec<RationalBindings>, SymplecticError> {
    let mut pts = Vec::new();
    let mut k: i64 = 0;
    let mut attempts = 0;
    while pts.len() < count && attempts < 2000 {
        attempts += 1;
        k += 1;
        let x = BigRational::new((3 * k * k - 2 * k + 7).into(), (6 + (k % 9)).into());
        let y = BigRational::new((k * k + 5 * k + 3).into(), (4 + (k % 7)).into());
        // alternate quadrant coverage
        let x = if k % 2 == 0 { -x } else { x };
        let y = if k % 3 == 0 { -y } else { y };
        let b = RationalBindings::point(x, y);
        let fb = b.to_f64();
        if !opts.guards.iter().all(|g| g.holds(&fb, 1e-6)) {
            continue;
        }
        if omega.f.eval(&fb).map(|v| v.abs() < 1e-9).unwrap_or(true) {
            continue;
        }
        if exprs.iter().all(|h| exact_or_float(h, &b).is_some()) {
            pts.push(b);
        }
    }
    if pts.len() < count {
        return Err(SymplecticError::Sampling(format!(
            "only {} bracket sample points found",
            pts.len()
        )));
    }
    Ok(pts)
}

/// Pullback `φ*ω`: coefficient `(f ∘ φ) · det Jφ`, normalized.
pub fn pullback(
    omega: &SymplecticForm,
    map: &crate::vfield::PlanarMap,
) -> Result<SymplecticForm, SymplecticError> {
    let det = map.jacobian_determinant()?;
    if det.is_zero() {
        return Err(SymplecticError::SingularPullback);
    }
    let composed = map.compose(&omega.f);
    let mut form = SymplecticForm::new(Expr::mul(composed, det).normalize())?;
    form.guards = union_guards(&form.guards, &map.guards);
    Ok(form)
}
