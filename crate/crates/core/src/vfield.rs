//! Planar vector fields and planar maps: Lie brackets, divergence,
//! directional derivatives, Jacobians, and φ-relatedness.

use crate::expr::{
    Bindings, DiffError, EquivError, EquivOptions, Equivalence, EvalError, Expr, Guard, ParseError,
    Symbol,
};
use serde::{Deserialize, Serialize};

/// A vector field `X = X^x ∂x + X^y ∂y` on a guarded planar domain.
/// Components never involve `t`; time enters only through the coefficient
/// functions of a nonautonomous system.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub x: Expr,
    pub y: Expr,
    pub guards: Vec<Guard>,
}

impl VectorField {
    pub fn new(x: Expr, y: Expr) -> VectorField {
        VectorField {
            x,
            y,
            guards: Vec::new(),
        }
    }

    pub fn with_guards(mut self, guards: Vec<Guard>) -> VectorField {
        self.guards = guards;
        self
    }

    /// Parse from component strings, e.g. `("x^2 - y^2", "2*x*y")`.
    pub fn parse(x: &str, y: &str) -> Result<VectorField, ParseError> {
        Ok(VectorField::new(Expr::parse(x)?, Expr::parse(y)?))
    }

    pub fn zero() -> VectorField {
        VectorField::new(Expr::zero(), Expr::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.normalize().is_zero() && self.y.normalize().is_zero()
    }

    pub fn normalize(&self) -> VectorField {
        VectorField {
            x: self.x.normalize(),
            y: self.y.normalize(),
            guards: self.guards.clone(),
        }
    }

    /// Lie bracket `[X, Y] = (X·∇)Y − (Y·∇)X`, guards unioned.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField, DiffError> {
        let dx = Symbol::X;
        let dy = Symbol::Y;
        let bx = Expr::Sum(vec![
            Expr::mul(self.x.clone(), other.x.diff(&dx)?),
            Expr::mul(self.y.clone(), other.x.diff(&dy)?),
            Expr::neg(Expr::mul(other.x.clone(), self.x.diff(&dx)?)),
            Expr::neg(Expr::mul(other.y.clone(), self.x.diff(&dy)?)),
        ]);
        let by = Expr::Sum(vec![
            Expr::mul(self.x.clone(), other.y.diff(&dx)?),
            Expr::mul(self.y.clone(), other.y.diff(&dy)?),
            Expr::neg(Expr::mul(other.x.clone(), self.y.diff(&dx)?)),
            Expr::neg(Expr::mul(other.y.clone(), self.y.diff(&dy)?)),
        ]);
        Ok(VectorField {
            x: bx.normalize(),
            y: by.normalize(),
            guards: union_guards(&self.guards, &other.guards),
        })
    }

    /// `div X = ∂x X^x + ∂y X^y`.
    pub fn divergence(&self) -> Result<Expr, DiffError> {
        Ok(Expr::add(self.x.diff(&Symbol::X)?, self.y.diff(&Symbol::Y)?).normalize())
    }

    /// Directional derivative `X h = X^x ∂x h + X^y ∂y h`.
    pub fn apply_to(&self, h: &Expr) -> Result<Expr, DiffError> {
        Ok(Expr::add(
            Expr::mul(self.x.clone(), h.diff(&Symbol::X)?),
            Expr::mul(self.y.clone(), h.diff(&Symbol::Y)?),
        )
        .normalize())
    }

    /// Numeric evaluation at a point.
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, f64), EvalError> {
        let b = Bindings::point(x, y);
        Ok((self.x.eval(&b)?, self.y.eval(&b)?))
    }

    /// Linear combination with float coefficients (folded in exactly).
    pub fn linear_combination(fields: &[VectorField], coeffs: &[f64]) -> VectorField {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut guards = Vec::new();
        for (f, &c) in fields.iter().zip(coeffs) {
            if c == 0.0 {
                continue;
            }
            let r = crate::expr::rational_from_f64(c).expect("finite coefficient");
            xs.push(Expr::mul(Expr::Number(r.clone()), f.x.clone()));
            ys.push(Expr::mul(Expr::Number(r), f.y.clone()));
            guards = union_guards(&guards, &f.guards);
        }
        if xs.is_empty() {
            return VectorField::zero();
        }
        VectorField {
            x: Expr::Sum(xs).normalize(),
            y: Expr::Sum(ys).normalize(),
            guards,
        }
    }

    /// The 2D wedge `X ∧ Y = X^x Y^y − X^y Y^x`.
    pub fn wedge(&self, other: &VectorField) -> Expr {
        Expr::sub(
            Expr::mul(self.x.clone(), other.y.clone()),
            Expr::mul(self.y.clone(), other.x.clone()),
        )
        .normalize()
    }
}

pub fn union_guards(a: &[Guard], b: &[Guard]) -> Vec<Guard> {
    let mut out = a.to_vec();
    for g in b {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    out
}

/// Wire format for vector fields.
#[derive(Serialize, Deserialize)]
pub struct VectorFieldJson {
    pub x: String,
    pub y: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guards: Vec<String>,
}

impl VectorField {
    pub fn to_json(&self) -> VectorFieldJson {
        VectorFieldJson {
            x: self.x.to_string(),
            y: self.y.to_string(),
            guards: self.guards.iter().map(|g| g.to_string()).collect(),
        }
    }

    pub fn from_json(j: &VectorFieldJson) -> Result<VectorField, ParseError> {
        let mut f = VectorField::parse(&j.x, &j.y)?;
        f.guards = j
            .guards
            .iter()
            .map(|s| Guard::parse(s))
            .collect::<Result<_, _>>()?;
        Ok(f)
    }
}

/// A planar map `(x, y) ↦ (u(x,y), v(x,y))` on an explicit branch region.
/// Branch guards are chosen so every `abs` is removable before
/// differentiation; the optional inverse is used by round-trip checks only.
#[derive(Clone, Debug)]
pub struct PlanarMap {
    pub u: Expr,
    pub v: Expr,
    pub guards: Vec<Guard>,
    pub inverse: Option<Box<(Expr, Expr)>>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("map Jacobian determinant is identically zero")]
    SingularJacobian,
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

impl PlanarMap {
    pub fn new(u: Expr, v: Expr) -> PlanarMap {
        PlanarMap {
            u,
            v,
            guards: Vec::new(),
            inverse: None,
        }
    }

    pub fn identity() -> PlanarMap {
        let m = PlanarMap::new(Expr::x(), Expr::y());
        PlanarMap {
            inverse: Some(Box::new((Expr::x(), Expr::y()))),
            ..m
        }
    }

    pub fn with_guards(mut self, guards: Vec<Guard>) -> PlanarMap {
        self.guards = guards;
        self
    }

    pub fn with_inverse(mut self, inv_u: Expr, inv_v: Expr) -> PlanarMap {
        self.inverse = Some(Box::new((inv_u, inv_v)));
        self
    }

    /// Exact Jacobian `[[∂u/∂x, ∂u/∂y], [∂v/∂x, ∂v/∂y]]`, normalized.
    pub fn jacobian(&self) -> Result<[[Expr; 2]; 2], DiffError> {
        Ok([
            [self.u.diff(&Symbol::X)?, self.u.diff(&Symbol::Y)?],
            [self.v.diff(&Symbol::X)?, self.v.diff(&Symbol::Y)?],
        ])
    }

    pub fn jacobian_determinant(&self) -> Result<Expr, DiffError> {
        let j = self.jacobian()?;
        Ok(Expr::sub(
            Expr::mul(j[0][0].clone(), j[1][1].clone()),
            Expr::mul(j[0][1].clone(), j[1][0].clone()),
        )
        .normalize())
    }

    /// Substitute the map into an expression over the target chart:
    /// `h(u(x,y), v(x,y))`.
    pub fn compose(&self, h: &Expr) -> Expr {
        h.substitute(&[(Symbol::X, self.u.clone()), (Symbol::Y, self.v.clone())])
    }

    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64), EvalError> {
        let b = Bindings::point(x, y);
        Ok((self.u.eval(&b)?, self.v.eval(&b)?))
    }

    /// φ-relatedness in the forward form `Jφ · X = Y ∘ φ`, checked
    /// componentwise (symbolic first, seeded numeric fallback).
    pub fn relates(
        &self,
        source: &VectorField,
        target: &VectorField,
        opts: &EquivOptions,
    ) -> Result<Equivalence, MapError> {
        let j = self.jacobian()?;
        let push_x = Expr::add(
            Expr::mul(j[0][0].clone(), source.x.clone()),
            Expr::mul(j[0][1].clone(), source.y.clone()),
        );
        let push_y = Expr::add(
            Expr::mul(j[1][0].clone(), source.x.clone()),
            Expr::mul(j[1][1].clone(), source.y.clone()),
        );
        let want_x = self.compose(&target.x);
        let want_y = self.compose(&target.y);
        let mut opts = opts.clone();
        opts.guards = union_guards(&opts.guards, &self.guards);
        opts.guards = union_guards(&opts.guards, &source.guards);
        let vx = push_x.equivalent(&want_x, &opts)?;
        if !vx.is_equal() {
            return Ok(vx);
        }
        let vy = push_y.equivalent(&want_y, &opts)?;
        if !vy.is_equal() {
            return Ok(vy);
        }
        Ok(match (vx, vy) {
            (Equivalence::ProvedEqual, Equivalence::ProvedEqual) => Equivalence::ProvedEqual,
            _ => Equivalence::NumericallyEqual,
        })
    }
}

/// Wire format for maps.
#[derive(Serialize, Deserialize)]
pub struct PlanarMapJson {
    pub u: String,
    pub v: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branch: Vec<String>,
}

impl PlanarMap {
    pub fn to_json(&self) -> PlanarMapJson {
        PlanarMapJson {
            u: self.u.to_string(),
            v: self.v.to_string(),
            branch: self.guards.iter().map(|g| g.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vf(x: &str, y: &str) -> VectorField {
        VectorField::parse(x, y).unwrap()
    }

    #[test]
    fn p2_brackets() {
        // [X1, X2] = X1 for X1 = ∂x, X2 = x∂x + y∂y
        let x1 = vf("1", "0");
        let x2 = vf("x", "y");
        let b = x1.lie_bracket(&x2).unwrap();
        assert_eq!(b.x, Expr::one());
        assert!(b.y.is_zero());
    }

    #[test]
    fn bracket_antisymmetry_on_self() {
        let x = vf("x^2 - y^2", "2*x*y");
        let b = x.lie_bracket(&x).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn buchdahl_bracket() {
        // X1 = y∂x + y^2∂y (a(x)=1), X2 = y∂y: [X1, X2] = -X1
        let x1 = vf("y", "y^2");
        let x2 = vf("0", "y");
        let b = x1.lie_bracket(&x2).unwrap();
        assert_eq!(b.x.normalize(), Expr::parse("-y").unwrap().normalize());
        assert_eq!(b.y.normalize(), Expr::parse("-y^2").unwrap().normalize());
    }

    #[test]
    fn divergences() {
        assert!(vf("1", "0").divergence().unwrap().is_zero());
        assert_eq!(
            vf("x^2 - y^2", "2*x*y").divergence().unwrap(),
            Expr::parse("4*x").unwrap().normalize()
        );
        assert_eq!(vf("0", "y").divergence().unwrap(), Expr::one());
    }

    #[test]
    fn apply_to_examples() {
        let x2 = vf("x", "y");
        let h = Expr::parse("1/y^2").unwrap();
        assert_eq!(
            x2.apply_to(&h).unwrap(),
            Expr::parse("-2/y^2").unwrap().normalize()
        );
        assert!(vf("x", "y").apply_to(&Expr::one()).unwrap().is_zero());
        // I5's X2 = 2x∂x + y∂y on y^-3: -3 y^-3 (div X2 = 3)
        let i5x2 = vf("2*x", "y");
        assert_eq!(
            i5x2.apply_to(&Expr::parse("y^(-3)").unwrap()).unwrap(),
            Expr::parse("-3*y^(-3)").unwrap().normalize()
        );
        assert_eq!(
            i5x2.divergence().unwrap(),
            Expr::integer(3)
        );
    }

    #[test]
    fn jacobian_examples() {
        let id = PlanarMap::identity();
        let j = id.jacobian().unwrap();
        assert_eq!(j[0][0], Expr::one());
        assert!(j[0][1].is_zero());
        assert!(j[1][0].is_zero());
        assert_eq!(j[1][1], Expr::one());

        // u = lambda(x-y), v = lambda(x^2-y^2)
        let m = PlanarMap::new(
            Expr::parse("lambda*(x-y)").unwrap(),
            Expr::parse("lambda*(x^2-y^2)").unwrap(),
        );
        let j = m.jacobian().unwrap();
        assert_eq!(j[0][0], Expr::parse("lambda").unwrap().normalize());
        assert_eq!(j[0][1], Expr::parse("-lambda").unwrap().normalize());
        assert_eq!(j[1][0], Expr::parse("2*lambda*x").unwrap().normalize());
        assert_eq!(j[1][1], Expr::parse("-2*lambda*y").unwrap().normalize());
    }

    #[test]
    fn identity_relates_field_to_itself() {
        let x = vf("x^2 - y^2", "2*x*y");
        let v = PlanarMap::identity()
            .relates(&x, &x, &EquivOptions::default())
            .unwrap();
        assert_eq!(v, Equivalence::ProvedEqual);
    }
}
