//! Finite-dimensional Lie algebras of planar vector fields: closure,
//! structure constants, algebraic fingerprinting, distribution rank, and
//! imprimitivity witnesses.

mod fingerprint;

pub use fingerprint::{AlgebraName, Fingerprint};

use crate::expr::{
    rational_from_f64, rationalize, Bindings, EquivOptions, Expr, Guard, RationalBindings,
};
use crate::linalg;
use crate::vfield::VectorField;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

/// A finite basis of planar vector fields with its modular generators.
/// The basis is linearly independent over the reals (checked by
/// point-evaluation rank when built through [`LieAlgebra::new`]).
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub basis: Vec<VectorField>,
    /// Indices of the modular generating system (valid on a dense subset).
    pub generators: Vec<usize>,
    pub label: Option<String>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum AlgebraError {
    #[error("basis is linearly dependent at the sample points")]
    DependentBasis,
    #[error("sample points failed to reach full rank after {0} draws")]
    DegenerateSampling(usize),
    #[error("bracket [X{i}, X{j}] leaves the span: residual ({rx}; {ry})")]
    NotClosed {
        i: usize,
        j: usize,
        rx: String,
        ry: String,
    },
    #[error("closure exceeded the cap {cap}: {reached} independent fields and growing")]
    CapExceeded { cap: usize, reached: usize },
    #[error("cap {cap} is smaller than the seed count {seeds}")]
    CapTooSmall { cap: usize, seeds: usize },
    #[error("guard violated at the evaluation point")]
    GuardViolation,
    #[error("empty admissible grid")]
    EmptyGrid,
    #[error("differentiation failed: {0}")]
    Diff(String),
}

impl From<crate::expr::DiffError> for AlgebraError {
    fn from(e: crate::expr::DiffError) -> Self {
        AlgebraError::Diff(e.to_string())
    }
}

/// Structure constants `c[i][j][k]`: the coefficient of `X_k` in `[X_i, X_j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub dim: usize,
    pub c: Vec<Vec<Vec<BigRational>>>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> StructureConstants {
        StructureConstants {
            dim,
            c: vec![vec![vec![BigRational::zero(); dim]; dim]; dim],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, coeffs: &[BigRational]) {
        self.c[i][j] = coeffs.to_vec();
        self.c[j][i] = coeffs.iter().map(|v| -v.clone()).collect();
    }

    /// Bracket of coordinate vectors under the tensor.
    pub fn bracket_vec(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.dim];
        for i in 0..self.dim {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if b[j].is_zero() {
                    continue;
                }
                for (k, out_k) in out.iter_mut().enumerate() {
                    *out_k += &a[i] * &b[j] * &self.c[i][j][k];
                }
            }
        }
        out
    }

    /// Max absolute Jacobi residual over all basis triples (exact zero for a
    /// genuine Lie algebra).
    pub fn jacobi_residual(&self) -> BigRational {
        let mut worst = BigRational::zero();
        let n = self.dim;
        let e = |i: usize| -> Vec<BigRational> {
            let mut v = vec![BigRational::zero(); n];
            v[i] = BigRational::from_integer(1.into());
            v
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let t1 = self.bracket_vec(&self.bracket_vec(&e(i), &e(j)), &e(k));
                    let t2 = self.bracket_vec(&self.bracket_vec(&e(j), &e(k)), &e(i));
                    let t3 = self.bracket_vec(&self.bracket_vec(&e(k), &e(i)), &e(j));
                    for idx in 0..n {
                        let r = (&t1[idx] + &t2[idx] + &t3[idx]).abs();
                        if r > worst {
                            worst = r;
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn fingerprint(&self) -> Fingerprint {
        fingerprint::fingerprint(self)
    }

    /// Nested arrays with rationals rendered `p/q`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self
            .c
            .iter()
            .map(|plane| {
                plane
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(crate::expr::rational_string)
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>())
    }
}

/// Deterministic guard-avoiding rational sample points.
pub fn sample_points(
    fields: &[VectorField],
    count: usize,
) -> Result<Vec<RationalBindings>, AlgebraError> {
    let mut pts = Vec::new();
    // A fixed walk over small rationals; denominators vary so coincidental
    // relations between fields are unlikely to survive several points.
    let mut k: i64 = 0;
    let mut attempts = 0;
    while pts.len() < count && attempts < 500 {
        attempts += 1;
        k += 1;
        let x = BigRational::new((2 * k * k + 3 * k + 5).into(), (7 + (k % 11)).into());
        let y = BigRational::new((k * k - 4 * k + 9).into(), (5 + (k % 13)).into());
        let b = RationalBindings::point(x, y);
        let fb = b.to_f64();
        let ok = fields.iter().all(|f| {
            f.guards.iter().all(|g| g.holds(&fb, 1e-6))
                && f.x.eval(&fb).is_ok()
                && f.y.eval(&fb).is_ok()
        });
        if ok {
            pts.push(b);
        }
    }
    if pts.len() < count {
        return Err(AlgebraError::DegenerateSampling(attempts));
    }
    Ok(pts)
}

/// Evaluate a field at a rational point: exact when possible, else float
/// converted exactly back to a rational.
fn eval_field(f: &VectorField, b: &RationalBindings) -> Option<(BigRational, BigRational)> {
    let ex = f
        .x
        .eval_exact(b)
        .or_else(|| f.x.eval(&b.to_f64()).ok().and_then(rational_from_f64))?;
    let ey = f
        .y
        .eval_exact(b)
        .or_else(|| f.y.eval(&b.to_f64()).ok().and_then(rational_from_f64))?;
    Some((ex, ey))
}

/// True when every component evaluates exactly at the rational points.
fn all_rational(fields: &[VectorField], pts: &[RationalBindings]) -> bool {
    fields.iter().all(|f| {
        pts.iter()
            .all(|p| f.x.eval_exact(p).is_some() && f.y.eval_exact(p).is_some())
    })
}

impl LieAlgebra {
    /// Build an algebra, checking linear independence of the basis by
    /// point-evaluation rank.
    pub fn new(
        basis: Vec<VectorField>,
        generators: Vec<usize>,
    ) -> Result<LieAlgebra, AlgebraError> {
        let n = basis.len();
        let pts = sample_points(&basis, n + 3)?;
        let rank = span_rank(&basis, &pts);
        if rank < n {
            return Err(AlgebraError::DependentBasis);
        }
        Ok(LieAlgebra {
            basis,
            generators,
            label: None,
        })
    }

    pub fn with_label(mut self, label: &str) -> LieAlgebra {
        self.label = Some(label.to_string());
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn equiv_options(&self) -> EquivOptions {
        let mut guards: Vec<Guard> = Vec::new();
        for f in &self.basis {
            guards = crate::vfield::union_guards(&guards, &f.guards);
        }
        EquivOptions::default().with_guards(guards)
    }

    /// Solve `[X_i, X_j] = Σ_k c_k X_k` by exact linear solve at rational
    /// sample points, then confirm each expansion symbolically (numeric
    /// fallback). Sampling alone is never trusted.
    pub fn structure_constants(&self) -> Result<StructureConstants, AlgebraError> {
        let n = self.dim();
        let mut sc = StructureConstants::zero(n);
        if n == 0 {
            return Ok(sc);
        }
        let pts = sample_points(&self.basis, (2 * n).max(n + 2))?;
        let exact = all_rational(&self.basis, &pts);
        let rows = 2 * pts.len();
        let mut matrix: Vec<Vec<BigRational>> = vec![Vec::with_capacity(n); rows];
        for f in &self.basis {
            for (pi, p) in pts.iter().enumerate() {
                let (ex, ey) = eval_field(f, p).ok_or(AlgebraError::DegenerateSampling(0))?;
                matrix[2 * pi].push(ex);
                matrix[2 * pi + 1].push(ey);
            }
        }
        let opts = self.equiv_options();
        for i in 0..n {
            for j in (i + 1)..n {
                let br = self.basis[i].lie_bracket(&self.basis[j])?;
                let mut rhs = Vec::with_capacity(rows);
                for p in &pts {
                    let (ex, ey) =
                        eval_field(&br, p).ok_or(AlgebraError::DegenerateSampling(0))?;
                    rhs.push(ex);
                    rhs.push(ey);
                }
                let solved: Option<Vec<BigRational>> = if exact {
                    linalg::solve_exact(&matrix, &rhs).map(|(x, _)| x)
                } else {
                    let mf: Vec<Vec<f64>> = matrix
                        .iter()
                        .map(|r| r.iter().map(|v| v.to_f64().unwrap()).collect())
                        .collect();
                    let rf: Vec<f64> = rhs.iter().map(|v| v.to_f64().unwrap()).collect();
                    linalg::solve_f64(&mf, &rf, 1e-10)
                        .and_then(|x| x.into_iter().map(|v| rationalize(v, 1_000_000)).collect())
                };
                let Some(coeffs) = solved else {
                    return Err(AlgebraError::NotClosed {
                        i,
                        j,
                        rx: br.x.to_string(),
                        ry: br.y.to_string(),
                    });
                };
                // symbolic re-verification of the expansion
                let combo = exact_combination(&self.basis, &coeffs);
                let rx = Expr::sub(br.x.clone(), combo.x.clone()).normalize();
                let ry = Expr::sub(br.y.clone(), combo.y.clone()).normalize();
                let ok_x = rx.is_zero()
                    || rx
                        .equivalent(&Expr::zero(), &opts)
                        .map(|v| v.is_equal())
                        .unwrap_or(false);
                let ok_y = ry.is_zero()
                    || ry
                        .equivalent(&Expr::zero(), &opts)
                        .map(|v| v.is_equal())
                        .unwrap_or(false);
                if !(ok_x && ok_y) {
                    return Err(AlgebraError::NotClosed {
                        i,
                        j,
                        rx: rx.to_string(),
                        ry: ry.to_string(),
                    });
                }
                sc.set(i, j, &coeffs);
            }
        }
        Ok(sc)
    }

    /// Numeric rank of the n×2 evaluation matrix at a point
    /// (singular-value threshold 1e-10).
    pub fn rank_at(&self, x: f64, y: f64) -> Result<u8, AlgebraError> {
        let b = Bindings::point(x, y);
        for f in &self.basis {
            if !f.guards.iter().all(|g| g.holds(&b, 0.0)) {
                return Err(AlgebraError::GuardViolation);
            }
        }
        let mut m = Vec::with_capacity(self.dim());
        for f in &self.basis {
            let (ex, ey) = f.eval(x, y).map_err(|_| AlgebraError::GuardViolation)?;
            m.push(vec![ex, ey]);
        }
        Ok(linalg::rank_f64(&m, 1e-10) as u8)
    }

    /// Rank map over a rectangular grid; a point is generic when all its
    /// in-grid 8-neighbors share its rank.
    pub fn generic_scan(
        &self,
        x_range: (f64, f64),
        y_range: (f64, f64),
        grid: usize,
    ) -> Result<ScanReport, AlgebraError> {
        if grid < 2 {
            return Err(AlgebraError::EmptyGrid);
        }
        let mut ranks: Vec<Vec<Option<u8>>> = vec![vec![None; grid]; grid];
        let mut any = false;
        for (i, row) in ranks.iter_mut().enumerate() {
            let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / (grid - 1) as f64;
            for (j, cell) in row.iter_mut().enumerate() {
                let y = y_range.0 + (y_range.1 - y_range.0) * j as f64 / (grid - 1) as f64;
                if let Ok(r) = self.rank_at(x, y) {
                    *cell = Some(r);
                    any = true;
                }
            }
        }
        if !any {
            return Err(AlgebraError::EmptyGrid);
        }
        let mut generic = Vec::new();
        let mut singular = Vec::new();
        let at = |i: f64, axis: (f64, f64)| axis.0 + (axis.1 - axis.0) * i / (grid - 1) as f64;
        for i in 0..grid {
            for j in 0..grid {
                let Some(r) = ranks[i][j] else { continue };
                let mut is_generic = true;
                for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ni, nj) = (i as i64 + di, j as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= grid as i64 || nj >= grid as i64 {
                            continue;
                        }
                        if let Some(nr) = ranks[ni as usize][nj as usize] {
                            if nr != r {
                                is_generic = false;
                            }
                        }
                    }
                }
                let pt = (at(i as f64, x_range), at(j as f64, y_range));
                if is_generic {
                    generic.push(pt);
                } else {
                    singular.push(pt);
                }
            }
        }
        Ok(ScanReport {
            grid,
            ranks,
            generic,
            singular,
        })
    }

    /// True iff the line distribution spanned by `y_field` is invariant under
    /// every basis bracket; returns the multiplier functions `g_i` with
    /// `[X_i, Y] = g_i Y` on success.
    pub fn invariant_distribution(
        &self,
        y_field: &VectorField,
    ) -> Result<Option<Vec<Expr>>, AlgebraError> {
        if y_field.is_zero() {
            return Ok(None);
        }
        let mut multipliers = Vec::with_capacity(self.dim());
        for f in &self.basis {
            let br = f.lie_bracket(y_field)?;
            let wedge = br.wedge(y_field);
            if !wedge.is_zero() {
                return Ok(None);
            }
            // [X, Y] = g Y with g from whichever component of Y is nonzero.
            let yx = y_field.x.normalize();
            let g = if !yx.is_zero() {
                Expr::div(br.x.clone(), y_field.x.clone()).normalize()
            } else {
                Expr::div(br.y.clone(), y_field.y.clone()).normalize()
            };
            multipliers.push(g);
        }
        Ok(Some(multipliers))
    }

    /// Modular-divergence condition: every non-generator `X = Σ ff_i X_i`
    /// over the function field must satisfy `div X = Σ ff_i div X_i`.
    pub fn modular_divergence_check(&self) -> Result<ModularCheck, AlgebraError> {
        let gens: Vec<&VectorField> = self.generators.iter().map(|&i| &self.basis[i]).collect();
        if gens.is_empty() || gens.len() > 2 {
            return Ok(ModularCheck::NotModular {
                index: 0,
                reason: format!("{} generators: only 1 or 2 are supported", gens.len()),
            });
        }
        for (idx, f) in self.basis.iter().enumerate() {
            if self.generators.contains(&idx) {
                continue;
            }
            let Some(ffs) = solve_over_functions(&gens, f) else {
                return Ok(ModularCheck::NotModular {
                    index: idx,
                    reason: "field is not a function-linear combination of the generators"
                        .to_string(),
                });
            };
            let mut rhs_terms = Vec::new();
            for (ff, g) in ffs.iter().zip(&gens) {
                rhs_terms.push(Expr::mul(ff.clone(), g.divergence()?));
            }
            let rhs = Expr::Sum(rhs_terms).normalize();
            let lhs = f.divergence()?;
            let resid = Expr::sub(lhs.clone(), rhs.clone()).normalize();
            let equal = resid.is_zero()
                || resid
                    .equivalent(&Expr::zero(), &self.equiv_options())
                    .map(|v| v.is_equal())
                    .unwrap_or(false);
            if !equal {
                return Ok(ModularCheck::Counterexample {
                    index: idx,
                    lhs: lhs.to_string(),
                    rhs: rhs.to_string(),
                });
            }
        }
        Ok(ModularCheck::Pass)
    }
}

/// Solve `X = Σ ff_i G_i` over the expression field for 1 or 2 generators.
fn solve_over_functions(gens: &[&VectorField], x: &VectorField) -> Option<Vec<Expr>> {
    match gens {
        [g] => {
            let gx = g.x.normalize();
            let ff = if !gx.is_zero() {
                Expr::div(x.x.clone(), g.x.clone()).normalize()
            } else {
                Expr::div(x.y.clone(), g.y.clone()).normalize()
            };
            let rx = Expr::sub(x.x.clone(), Expr::mul(ff.clone(), g.x.clone())).normalize();
            let ry = Expr::sub(x.y.clone(), Expr::mul(ff.clone(), g.y.clone())).normalize();
            if rx.is_zero() && ry.is_zero() {
                Some(vec![ff])
            } else {
                None
            }
        }
        [g1, g2] => {
            let det = g1.wedge(g2);
            if det.is_zero() {
                return None;
            }
            // Cramer over the function field.
            let ff1 = Expr::div(
                Expr::sub(
                    Expr::mul(x.x.clone(), g2.y.clone()),
                    Expr::mul(x.y.clone(), g2.x.clone()),
                ),
                det.clone(),
            )
            .normalize();
            let ff2 = Expr::div(
                Expr::sub(
                    Expr::mul(g1.x.clone(), x.y.clone()),
                    Expr::mul(g1.y.clone(), x.x.clone()),
                ),
                det,
            )
            .normalize();
            Some(vec![ff1, ff2])
        }
        _ => None,
    }
}

/// Exact linear combination of fields with rational coefficients.
pub fn exact_combination(fields: &[VectorField], coeffs: &[BigRational]) -> VectorField {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (f, c) in fields.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        xs.push(Expr::mul(Expr::Number(c.clone()), f.x.clone()));
        ys.push(Expr::mul(Expr::Number(c.clone()), f.y.clone()));
    }
    if xs.is_empty() {
        return VectorField::zero();
    }
    VectorField::new(Expr::Sum(xs).normalize(), Expr::Sum(ys).normalize())
}

/// Rank of the span of fields by evaluation at the given points.
fn span_rank(fields: &[VectorField], pts: &[RationalBindings]) -> usize {
    if fields.is_empty() {
        return 0;
    }
    if all_rational(fields, pts) {
        let m: Vec<Vec<BigRational>> = fields
            .iter()
            .map(|f| {
                let mut row = Vec::with_capacity(2 * pts.len());
                for p in pts {
                    let (ex, ey) = eval_field(f, p).expect("rational eval");
                    row.push(ex);
                    row.push(ey);
                }
                row
            })
            .collect();
        linalg::rank_exact(&m)
    } else {
        let m: Vec<Vec<f64>> = fields
            .iter()
            .map(|f| {
                pts.iter()
                    .flat_map(|p| {
                        let b = p.to_f64();
                        let x = f.x.eval(&b).unwrap_or(f64::NAN);
                        let y = f.y.eval(&b).unwrap_or(f64::NAN);
                        [x, y]
                    })
                    .collect()
            })
            .collect();
        linalg::rank_f64(&m, 1e-10)
    }
}

/// Iteratively bracket and extend an independent spanning set. Stops at a
/// closed basis or fails with `CapExceeded` carrying the count reached.
pub fn lie_closure(seeds: &[VectorField], cap: usize) -> Result<LieAlgebra, AlgebraError> {
    if cap < seeds.len() {
        return Err(AlgebraError::CapTooSmall {
            cap,
            seeds: seeds.len(),
        });
    }
    let mut basis: Vec<VectorField> = Vec::new();
    for s in seeds {
        let s = s.normalize();
        if s.is_zero() {
            continue;
        }
        let mut candidate = basis.clone();
        candidate.push(s.clone());
        let pts = sample_points(&candidate, candidate.len() + 3)?;
        if span_rank(&candidate, &pts) == candidate.len() {
            basis.push(s);
        }
    }
    if basis.len() > cap {
        return Err(AlgebraError::CapExceeded {
            cap,
            reached: basis.len(),
        });
    }
    let mut frontier_start = 0usize;
    loop {
        let mut grew = false;
        let end = basis.len();
        for i in 0..end {
            for j in frontier_start.max(i + 1)..end {
                let br = basis[i].lie_bracket(&basis[j])?;
                if br.is_zero() {
                    continue;
                }
                let mut candidate = basis.clone();
                candidate.push(br.clone());
                let pts = sample_points(&candidate, candidate.len() + 3)?;
                if span_rank(&candidate, &pts) == candidate.len() {
                    if basis.len() + 1 > cap {
                        return Err(AlgebraError::CapExceeded {
                            cap,
                            reached: basis.len() + 1,
                        });
                    }
                    basis.push(br);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
        frontier_start = end;
    }
    let generators = (0..basis.len().min(2)).collect();
    LieAlgebra::new(basis, generators)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub grid: usize,
    pub ranks: Vec<Vec<Option<u8>>>,
    pub generic: Vec<(f64, f64)>,
    pub singular: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModularCheck {
    Pass,
    Counterexample {
        index: usize,
        lhs: String,
        rhs: String,
    },
    NotModular {
        index: usize,
        reason: String,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vf(x: &str, y: &str) -> VectorField {
        VectorField::parse(x, y).unwrap()
    }

    fn p2() -> LieAlgebra {
        LieAlgebra::new(
            vec![vf("1", "0"), vf("x", "y"), vf("x^2 - y^2", "2*x*y")],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn p2_structure_constants() {
        let sc = p2().structure_constants().unwrap();
        // [X1,X2] = X1, [X1,X3] = 2 X2, [X2,X3] = X3
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        assert_eq!(sc.c[0][1][0], one);
        assert_eq!(sc.c[0][2][1], two);
        assert_eq!(sc.c[1][2][2], one);
        assert!(sc.jacobi_residual().is_zero());
    }

    #[test]
    fn single_field_all_zero() {
        let a = LieAlgebra::new(vec![vf("1", "0")], vec![0]).unwrap();
        let sc = a.structure_constants().unwrap();
        assert!(sc.c[0][0].iter().all(|v| v.is_zero()));
    }

    #[test]
    fn milne_pinney_constants() {
        // X1 = -x ∂y, X2 = (y∂y - x∂x)/2, X3 = y∂x + c/x^3 ∂y at c = 1
        let a = LieAlgebra::new(
            vec![vf("0", "-x"), vf("-x/2", "y/2"), vf("y", "1/x^3")],
            vec![0, 1],
        )
        .unwrap();
        let sc = a.structure_constants().unwrap();
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        assert_eq!(sc.c[0][1][0], one, "[X1,X2] = X1");
        assert_eq!(sc.c[0][2][1], two, "[X1,X3] = 2X2");
        assert_eq!(sc.c[1][2][2], one, "[X2,X3] = X3");
    }

    #[test]
    fn transcendental_components_close() {
        // ∂x and e^x ∂y
        let a = LieAlgebra::new(vec![vf("1", "0"), vf("0", "exp(x)")], vec![0, 1]).unwrap();
        let sc = a.structure_constants().unwrap();
        assert_eq!(sc.c[0][1][1], BigRational::from_integer(1.into()));
    }

    #[test]
    fn not_closed_detected() {
        // {∂x, x^2 ∂x} brackets to 2x∂x outside the span
        let a = LieAlgebra::new(vec![vf("1", "0"), vf("x^2", "0")], vec![0]).unwrap();
        assert!(matches!(
            a.structure_constants(),
            Err(AlgebraError::NotClosed { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn closure_of_sl2_seeds() {
        // {∂x, x^2∂x} closes to sl(2) on the line
        let got = lie_closure(&[vf("1", "0"), vf("x^2", "0")], 5).unwrap();
        assert_eq!(got.dim(), 3);
        let one = lie_closure(&[vf("1", "0")], 1).unwrap();
        assert_eq!(one.dim(), 1);
    }

    #[test]
    fn closure_cap_exceeded() {
        // {x^2∂x, xy∂x, y∂y} grows the chain x^2 y^n ∂x
        let seeds = [vf("x^2", "0"), vf("x*y", "0"), vf("0", "y")];
        assert!(matches!(
            lie_closure(&seeds, 10),
            Err(AlgebraError::CapExceeded { cap: 10, .. })
        ));
    }

    #[test]
    fn buchdahl_closure_h2() {
        let got = lie_closure(&[vf("y", "y^2"), vf("0", "y")], 4).unwrap();
        assert_eq!(got.dim(), 2);
    }

    #[test]
    fn empty_algebra_has_rank_zero() {
        let a = LieAlgebra::new(vec![], vec![]).unwrap();
        assert_eq!(a.rank_at(1.0, 2.0).unwrap(), 0);
    }

    #[test]
    fn rank_examples() {
        let i4 = LieAlgebra::new(
            vec![vf("1", "1"), vf("x", "y"), vf("x^2", "y^2")],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(i4.rank_at(1.0, 0.0).unwrap(), 2);
        assert_eq!(i4.rank_at(1.0, 1.0).unwrap(), 1);
        let p3 = LieAlgebra::new(
            vec![
                vf("y", "-x"),
                vf("1 + x^2 - y^2", "2*x*y"),
                vf("2*x*y", "1 + y^2 - x^2"),
            ],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(p3.rank_at(0.0, 0.0).unwrap(), 2);
    }

    #[test]
    fn i4_scan_singular_on_diagonal() {
        let i4 = LieAlgebra::new(
            vec![vf("1", "1"), vf("x", "y"), vf("x^2", "y^2")],
            vec![0, 1],
        )
        .unwrap();
        let scan = i4.generic_scan((-2.0, 2.0), (-2.0, 2.0), 41).unwrap();
        // flagged points hug the diagonal: an 8-neighbor of a diagonal cell
        // can sit two cells away in |x - y|
        let cell = 4.0 / 40.0;
        for (x, y) in &scan.singular {
            assert!(
                (x - y).abs() <= 2.0 * cell + 1e-12,
                "({x},{y}) flagged far from diagonal"
            );
        }
        assert!(!scan.generic.is_empty());
        assert!(scan.singular.iter().any(|(x, y)| x == y));
    }

    #[test]
    fn i4_invariant_distribution() {
        let i4 = LieAlgebra::new(
            vec![vf("1", "1"), vf("x", "y"), vf("x^2", "y^2")],
            vec![0, 1],
        )
        .unwrap();
        let mult = i4.invariant_distribution(&vf("1", "0")).unwrap().unwrap();
        assert!(mult[0].is_zero());
        assert_eq!(mult[1], Expr::parse("-1").unwrap().normalize());
        assert_eq!(mult[2], Expr::parse("-2*x").unwrap().normalize());
    }

    #[test]
    fn p1_alpha0_not_invariant_along_x() {
        let p1 = LieAlgebra::new(vec![vf("1", "0"), vf("0", "1"), vf("y", "-x")], vec![0, 1])
            .unwrap();
        assert!(p1.invariant_distribution(&vf("1", "0")).unwrap().is_none());
    }

    #[test]
    fn invariant_distribution_rescaling() {
        let i4 = LieAlgebra::new(
            vec![vf("1", "1"), vf("x", "y"), vf("x^2", "y^2")],
            vec![0, 1],
        )
        .unwrap();
        for scaled in [vf("y", "0"), vf("exp(x)", "0")] {
            assert!(
                i4.invariant_distribution(&scaled).unwrap().is_some(),
                "rescaled witness rejected"
            );
        }
    }

    #[test]
    fn milne_pinney_imprimitivity_witness() {
        // c = -1/4: Y = ∂x + (y/x + 1/x^2) ∂y spans an invariant distribution
        let mp = LieAlgebra::new(
            vec![vf("0", "-x"), vf("-x/2", "y/2"), vf("y", "-1/(4*x^3)")],
            vec![0, 1],
        )
        .unwrap();
        let y = vf("1", "y/x + 1/x^2");
        assert!(mp.invariant_distribution(&y).unwrap().is_some());
    }

    #[test]
    fn modular_check_i15_counterexample() {
        let i15 = LieAlgebra::new(
            vec![vf("1", "0"), vf("0", "y"), vf("0", "exp(x)")],
            vec![0, 1],
        )
        .unwrap();
        assert!(matches!(
            i15.modular_divergence_check().unwrap(),
            ModularCheck::Counterexample { index: 2, .. }
        ));
    }

    #[test]
    fn modular_check_p3_passes() {
        let p3 = LieAlgebra::new(
            vec![
                vf("y", "-x"),
                vf("1 + x^2 - y^2", "2*x*y"),
                vf("2*x*y", "1 + y^2 - x^2"),
            ],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(p3.modular_divergence_check().unwrap(), ModularCheck::Pass);
    }

    #[test]
    fn vacuous_modular_pass() {
        let a = LieAlgebra::new(vec![vf("1", "0"), vf("0", "1")], vec![0, 1]).unwrap();
        assert_eq!(a.modular_divergence_check().unwrap(), ModularCheck::Pass);
    }

    #[test]
    fn jacobi_on_catalog_triple() {
        let sc = p2().structure_constants().unwrap();
        assert!(sc.jacobi_residual().is_zero());
    }
}
