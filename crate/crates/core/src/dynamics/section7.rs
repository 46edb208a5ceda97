//! The explicit local diffeomorphisms between the sl(2) systems: the
//! classification charts map onto the Milne-Pinney and Kummer-Schwarz charts
//! (with the constraints λ⁴ = −4c, 4λ² = −1/c, λ⁴ = c respectively), plus
//! the composed Kummer-Schwarz → Milne-Pinney map. Each map is fixed on an
//! explicit branch chosen so the absolute values are removable before
//! differentiation; the mirror branches exist but are not shipped.

use super::DynamicsError;
use crate::expr::{Expr, Guard};
use crate::vfield::PlanarMap;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    /// x != y chart onto the Milne-Pinney chart, c < 0, λ⁴ = −4c,
    /// branch x > y.
    MpFromI4,
    /// y != 0 chart onto the Milne-Pinney chart, c = 0, branch y > 0. The
    /// bracket normalizations force the middle pairing X2 -> 2 X2.
    MpFromI5,
    /// x != y chart onto the Kummer-Schwarz chart, c < 0, 4λ² = −1/c.
    KsFromI4,
    /// y != 0 chart onto the Kummer-Schwarz chart, c = 0; middle pairing
    /// X2 -> 2 X2 as for the Milne-Pinney case.
    KsFromI5,
    /// Riccati (y != 0) chart onto the Milne-Pinney chart, c > 0, λ⁴ = c,
    /// branch y > 0.
    RiccatiToMp,
    /// Kummer-Schwarz chart onto the Milne-Pinney chart: the composition of
    /// the two x != y charts, realized in closed form on the branch x > 0.
    KsToMp,
}

impl MapKind {
    pub fn parse(s: &str) -> Option<MapKind> {
        Some(match s {
            "mp-from-i4" => MapKind::MpFromI4,
            "mp-from-i5" => MapKind::MpFromI5,
            "ks-from-i4" => MapKind::KsFromI4,
            "ks-from-i5" => MapKind::KsFromI5,
            "riccati-to-mp" => MapKind::RiccatiToMp,
            "ks-to-mp" => MapKind::KsToMp,
        _ => return None,
        })
    }
}

/// Parameters of a section-7 map. `c` is the source/target constant the
/// kind's constraint mentions; for the composed map `c` is the source
/// (Kummer-Schwarz) constant and `target_c` the Milne-Pinney one.
#[derive(Clone, Debug)]
pub struct MapParams {
    pub c: BigRational,
    pub lambda: BigRational,
    pub target_c: Option<BigRational>,
    pub target_lambda: Option<BigRational>,
}

impl MapParams {
    pub fn new(c: BigRational, lambda: BigRational) -> MapParams {
        MapParams {
            c,
            lambda,
            target_c: None,
            target_lambda: None,
        }
    }
}

fn num(r: &BigRational) -> Expr {
    Expr::Number(r.clone())
}

fn pow4(r: &BigRational) -> BigRational {
    r * r * r * r
}

fn check(cond: bool, msg: &str) -> Result<(), DynamicsError> {
    if cond {
        Ok(())
    } else {
        Err(DynamicsError::Regime(msg.to_string()))
    }
}

/// Build the documented map for the kind at the given parameters; the
/// stated λ-constraint is enforced exactly on the rationals.
pub fn section7_map(kind: MapKind, params: &MapParams) -> Result<PlanarMap, DynamicsError> {
    let c = &params.c;
    let l = &params.lambda;
    let four = BigRational::from_integer(4.into());
    match kind {
        MapKind::MpFromI4 => {
            check(c.is_negative(), "MpFromI4 needs c < 0")?;
            check(
                pow4(l) == -(&four * c),
                "MpFromI4 needs lambda^4 = -4c exactly",
            )?;
            // branch x > y: u = l (x-y)^{-1/2}, v = -l (x+y) (x-y)^{-1/2} / 2
            let root = Expr::Power(
                Box::new(Expr::parse("x - y").unwrap()),
                BigRational::new((-1).into(), 2.into()),
            );
            let u = Expr::mul(num(l), root.clone()).normalize();
            let v = Expr::div(
                Expr::neg(Expr::Product(vec![
                    num(l),
                    Expr::parse("x + y").unwrap(),
                    root,
                ])),
                Expr::integer(2),
            )
            .normalize();
            let l2 = l * l;
            // inverse: x = (l^2 - 2uv)/(2u^2)? written in map coordinates
            let inv_u = Expr::parse(&format!("({} - 2*x*y)/(2*x^2)", crate::expr::rational_string(&l2)))
                .unwrap();
            let inv_v = Expr::parse(&format!(
                "-({} + 2*x*y)/(2*x^2)",
                crate::expr::rational_string(&l2)
            ))
            .unwrap();
            Ok(PlanarMap::new(u, v)
                .with_guards(vec![Guard::positive(Expr::parse("x - y").unwrap())])
                .with_inverse(inv_u, inv_v))
        }
        MapKind::MpFromI5 => {
            check(c.is_zero(), "MpFromI5 needs c = 0")?;
            check(!l.is_zero(), "lambda must be nonzero")?;
            let u = Expr::div(num(l), Expr::y()).normalize();
            let v = Expr::neg(Expr::div(Expr::mul(num(l), Expr::x()), Expr::y())).normalize();
            let inv_u = Expr::parse("-y/x").unwrap();
            let inv_v = Expr::div(num(l), Expr::x()).normalize();
            Ok(PlanarMap::new(u, v)
                .with_guards(vec![Guard::positive(Expr::y())])
                .with_inverse(inv_u, inv_v))
        }
        MapKind::KsFromI4 => {
            check(c.is_negative(), "KsFromI4 needs c < 0")?;
            check(
                &four * l * l == -BigRational::one() / c,
                "KsFromI4 needs 4 lambda^2 = -1/c exactly",
            )?;
            let u = Expr::mul(num(l), Expr::parse("x - y").unwrap()).normalize();
            let v = Expr::mul(num(l), Expr::parse("x^2 - y^2").unwrap()).normalize();
            // inverse: x = (u/l + v/u)/2, y = (v/u - u/l)/2 in map coords
            let inv_u = Expr::div(
                Expr::add(Expr::div(Expr::x(), num(l)), Expr::parse("y/x").unwrap()),
                Expr::integer(2),
            )
            .normalize();
            let inv_v = Expr::div(
                Expr::sub(Expr::parse("y/x").unwrap(), Expr::div(Expr::x(), num(l))),
                Expr::integer(2),
            )
            .normalize();
            Ok(PlanarMap::new(u, v)
                .with_guards(vec![Guard::positive(Expr::parse("x - y").unwrap())])
                .with_inverse(inv_u, inv_v))
        }
        MapKind::KsFromI5 => {
            check(c.is_zero(), "KsFromI5 needs c = 0")?;
            check(!l.is_zero(), "lambda must be nonzero")?;
            let u = Expr::mul(num(l), Expr::parse("y^2").unwrap()).normalize();
            let v = Expr::mul(
                num(&(BigRational::from_integer(2.into()) * l)),
                Expr::parse("x*y^2").unwrap(),
            )
            .normalize();
            let inv_u = Expr::parse("y/(2*x)").unwrap();
            let inv_v = Expr::Power(
                Box::new(Expr::div(Expr::x(), num(l)).normalize()),
                BigRational::new(1.into(), 2.into()),
            );
            Ok(PlanarMap::new(u, v)
                .with_guards(vec![Guard::positive(Expr::y())])
                .with_inverse(inv_u, inv_v))
        }
        MapKind::RiccatiToMp => {
            check(c.is_positive(), "RiccatiToMp needs c > 0")?;
            check(pow4(l) == *c, "RiccatiToMp needs lambda^4 = c exactly")?;
            // branch y > 0: u = l y^{-1/2}, v = -l x y^{-1/2}
            let root = Expr::Power(
                Box::new(Expr::y()),
                BigRational::new((-1).into(), 2.into()),
            );
            let u = Expr::mul(num(l), root.clone()).normalize();
            let v = Expr::neg(Expr::Product(vec![num(l), Expr::x(), root])).normalize();
            let l2 = l * l;
            let inv_u = Expr::parse("-y/x").unwrap();
            let inv_v = Expr::div(num(&l2), Expr::parse("x^2").unwrap()).normalize();
            Ok(PlanarMap::new(u, v)
                .with_guards(vec![Guard::positive(Expr::y())])
                .with_inverse(inv_u, inv_v))
        }
        MapKind::KsToMp => {
            let c_mp = params
                .target_c
                .clone()
                .ok_or_else(|| DynamicsError::Regime("KsToMp needs target_c".to_string()))?;
            let l_mp = params
                .target_lambda
                .clone()
                .ok_or_else(|| DynamicsError::Regime("KsToMp needs target_lambda".to_string()))?;
            check(c.is_negative(), "KsToMp needs source c < 0")?;
            check(c_mp.is_negative(), "KsToMp needs target c < 0")?;
            check(
                &four * l * l == -BigRational::one() / c,
                "KsToMp needs 4 lambda^2 = -1/c for the source",
            )?;
            check(
                pow4(&l_mp) == -(&four * &c_mp),
                "KsToMp needs target_lambda^4 = -4 target_c",
            )?;
            check(l.is_positive(), "the shipped branch has lambda > 0")?;
            // on the branch x/lambda > 0 (so x > 0):
            // U = l_mp (x/l)^{-1/2}, V = -l_mp y (x/l)^{-1/2} / (2x)
            let root = Expr::Power(
                Box::new(Expr::div(Expr::x(), num(l)).normalize()),
                BigRational::new((-1).into(), 2.into()),
            );
            let u = Expr::mul(num(&l_mp), root.clone()).normalize();
            let v = Expr::neg(Expr::div(
                Expr::Product(vec![num(&l_mp), Expr::y(), root]),
                Expr::parse("2*x").unwrap(),
            ))
            .normalize();
            Ok(PlanarMap::new(u, v).with_guards(vec![Guard::positive(Expr::x())]))
        }
    }
}
