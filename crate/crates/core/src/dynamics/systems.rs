//! Named constructors for the applied systems: planar Riccati, Milne-Pinney,
//! second-order Kummer-Schwarz, generalised Buchdahl, Lotka-Volterra,
//! predator-prey, and the viral-infection model, each with its domain guards
//! and (where one exists) its Lie-Hamiltonian structure.

use super::{DynamicsError, LieHamiltonianStructure, System};
use crate::expr::{Bindings, Expr, Guard, Symbol};
use crate::symplectic::{hamiltonian_function, pullback, SymplecticForm};
use crate::vfield::PlanarMap;
use crate::vfield::VectorField;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn vf(x: &str, y: &str) -> VectorField {
    VectorField::parse(x, y).expect("constructor fields parse")
}

fn ex(s: &str) -> Expr {
    Expr::parse(s).expect("constructor expressions parse")
}

fn num(r: &BigRational) -> Expr {
    Expr::Number(r.clone())
}

/// Planar Riccati system `dx/dt = a0 + a1 x + a2 (x^2 - y^2)`,
/// `dy/dt = a1 y + 2 a2 x y` on `y != 0`, with the sl(2) structure
/// `omega = dx dy / y^2`.
pub fn riccati_planar(a0: Expr, a1: Expr, a2: Expr) -> Result<System, DynamicsError> {
    let basis = vec![vf("1", "0"), vf("x", "y"), vf("x^2 - y^2", "2*x*y")];
    let sys = System::new("riccati", basis, vec![a0, a1, a2])?
        .with_guards(vec![Guard::nonzero(Expr::y())])
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega: SymplecticForm::parse("1/y^2")
                .expect("riccati form")
                .with_guards(vec![Guard::nonzero(Expr::y())]),
            functions: vec![
                ex("-1/y").normalize(),
                ex("-x/y").normalize(),
                ex("-(x^2 + y^2)/y").normalize(),
            ],
        });
    Ok(sys)
}

/// Milne-Pinney in first-order form: `dx/dt = y`,
/// `dy/dt = -w2(t) x + c/x^3`, as `X_t = X_3 + w2(t) X_1` on the basis
/// `X_1 = -x dy`, `X_2 = (y dy - x dx)/2`, `X_3 = y dx + c/x^3 dy`.
/// The chart-native structure uses the standard form (all fields are
/// divergence free).
pub fn milne_pinney(c: BigRational, w2: Expr) -> Result<System, DynamicsError> {
    let x3 = VectorField::new(
        Expr::y(),
        Expr::div(num(&c), ex("x^3")).normalize(),
    );
    let basis = vec![vf("0", "-x"), vf("-x/2", "y/2"), x3];
    let guards = if c.is_zero() {
        Vec::new()
    } else {
        vec![Guard::nonzero(Expr::x())]
    };
    // h1 = x^2/2, h2 = -x y/2, h3 = y^2/2 + c/(2 x^2)
    let h3 = Expr::add(
        ex("y^2/2"),
        Expr::div(num(&c), ex("2*x^2")).normalize(),
    )
    .normalize();
    let sys = System::new("milne-pinney", basis, vec![w2, Expr::zero(), Expr::one()])?
        .with_guards(guards)
        .with_param("c", c)
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega: SymplecticForm::standard(),
            functions: vec![ex("x^2/2").normalize(), ex("-x*y/2").normalize(), h3],
        });
    Ok(sys)
}

/// Second-order Kummer-Schwarz in first-order form: `dx/dt = y`,
/// `dy/dt = 3y^2/(2x) - 2c x^3 + 2 b1(t) x`, as `X_t = X_3 + b1(t) X_1` on
/// `X_1 = 2x dy`, `X_2 = x dx + 2y dy`, `X_3 = y dx + (3y^2/(2x) - 2cx^3) dy`
/// with the chart form `omega = dx dy / x^3`.
pub fn kummer_schwarz(c: BigRational, b1: Expr) -> Result<System, DynamicsError> {
    let x3 = VectorField::new(
        Expr::y(),
        Expr::sub(
            ex("3*y^2/(2*x)"),
            Expr::mul(num(&(BigRational::from_integer(2.into()) * &c)), ex("x^3")),
        )
        .normalize(),
    );
    let basis = vec![vf("0", "2*x"), vf("x", "2*y"), x3];
    // h3 = y^2/(2x^3) + 2 c x
    let h3 = Expr::add(
        ex("y^2/(2*x^3)"),
        Expr::mul(num(&(BigRational::from_integer(2.into()) * &c)), Expr::x()),
    )
    .normalize();
    let sys = System::new("kummer-schwarz", basis, vec![b1, Expr::zero(), Expr::one()])?
        .with_guards(vec![Guard::nonzero(Expr::x())])
        .with_param("c", c)
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega: SymplecticForm::parse("1/x^3")
                .expect("ks form")
                .with_guards(vec![Guard::nonzero(Expr::x())]),
            functions: vec![ex("2/x").normalize(), ex("y/x^2").normalize(), h3],
        });
    Ok(sys)
}

/// Generalised Buchdahl equations: `dx/dt = y`, `dy/dt = a(x) y^2 + b(t) y`
/// as `X_t = X_1 + b(t) X_2` on `X_1 = y dx + a(x) y^2 dy`, `X_2 = y dy`,
/// with `omega = exp(-A(x))/y dx dy` for an antiderivative `A` of `a`.
/// Closed-form Hamiltonians when `a` is table-integrable, else
/// quadrature-defined ones (verified numerically).
pub fn buchdahl(a_of_x: Expr, b: Expr) -> Result<System, DynamicsError> {
    let syms = a_of_x.free_symbols();
    if syms.iter().any(|s| !matches!(s, Symbol::X)) {
        return Err(DynamicsError::Regime(
            "a(x) may only involve x".to_string(),
        ));
    }
    let x1 = VectorField::new(
        Expr::y(),
        Expr::mul(a_of_x.clone(), ex("y^2")).normalize(),
    );
    let basis = vec![x1, vf("0", "y")];
    // A(x) with A(0) = 0: closed form when the table covers it.
    let a_anti = a_of_x.antiderivative(&Symbol::X, false).map(|anti| {
        let at0 = anti
            .substitute(&[(Symbol::X, Expr::zero())])
            .normalize();
        Expr::sub(anti, at0).normalize()
    });
    let big_a = match a_anti {
        Some(closed) => closed,
        None => Expr::integral(
            "A",
            a_of_x.substitute(&[(Symbol::X, Expr::Symbol(Symbol::dummy()))]),
            BigRational::zero(),
            Expr::x(),
        ),
    };
    let f = Expr::div(Expr::call(crate::expr::Builtin::Exp, Expr::neg(big_a)), Expr::y())
        .normalize();
    let guards = vec![Guard::positive(Expr::y())];
    let omega = SymplecticForm::new(f)?.with_guards(guards.clone());
    let base = (BigRational::zero(), BigRational::one());
    let h1 = hamiltonian_function(&basis[0], &omega, base.clone())?;
    let h2 = hamiltonian_function(&basis[1], &omega, base)?;
    let sys = System::new("buchdahl", basis, vec![Expr::one(), b])?
        .with_guards(guards)
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega,
            functions: vec![h1, h2],
        });
    Ok(sys)
}

/// Lotka-Volterra with seasonal coupling: `dx/dt = a x - g(t)(x - a y) x`,
/// `dy/dt = a y - g(t)(b x - y) y` as `X_t = X_1 + g(t) X_2`. Requires
/// `a != 0`. The symplectic structure depends on the (a, b) regime; the
/// degenerate `a = b = 1` case carries none (rank-one distribution).
pub fn lotka_volterra(a: BigRational, b: BigRational, g: Expr) -> Result<System, DynamicsError> {
    if a.is_zero() {
        return Err(DynamicsError::Regime("a must be nonzero".to_string()));
    }
    let one = BigRational::one();
    let x1 = VectorField::new(
        Expr::mul(num(&a), Expr::x()).normalize(),
        Expr::mul(num(&a), Expr::y()).normalize(),
    );
    // X2 = -(x - a y) x dx - (b x - y) y dy
    let x2 = VectorField::new(
        Expr::neg(Expr::mul(
            Expr::sub(Expr::x(), Expr::mul(num(&a), Expr::y())),
            Expr::x(),
        ))
        .normalize(),
        Expr::neg(Expr::mul(
            Expr::sub(Expr::mul(num(&b), Expr::x()), Expr::y()),
            Expr::y(),
        ))
        .normalize(),
    );
    let basis = vec![x1, x2];
    let mut guards = vec![Guard::nonzero(Expr::x()), Guard::nonzero(Expr::y())];
    let mut sys = System::new("lotka-volterra", basis, vec![Expr::one(), g])?
        .with_param("a", a.clone())
        .with_param("b", b.clone());

    if a == one && b == one {
        // rank-one distribution; a Lie system but not Lie-Hamilton
        sys = sys.with_guards(guards);
        return Ok(sys);
    }
    // regime-dependent form
    let ratio = ex("x/y");
    let (f, base_point): (Expr, (BigRational, BigRational)) = if a != one && b != one {
        // f = y^-2 (x/y)^(a/(1-a)) (1-a + (1-b) x/y)^(1/(a-1) + 1/(b-1))
        let e1 = &a / (&one - &a);
        let e2 = BigRational::one() / (&a - &one) + BigRational::one() / (&b - &one);
        let lin = Expr::add(
            num(&(&one - &a)),
            Expr::mul(num(&(&one - &b)), ratio.clone()),
        )
        .normalize();
        if !e1.is_integer() {
            guards.push(Guard::positive(ratio.clone()));
        }
        if !e2.is_integer() {
            guards.push(Guard::positive(lin.clone()));
        }
        let f = Expr::Product(vec![
            ex("y^(-2)"),
            Expr::Power(Box::new(ratio.clone()), e1),
            Expr::Power(Box::new(lin.clone()), e2),
        ]);
        // base point in the admissible sign region
        let base = pick_base_point(&guards)?;
        (f, base)
    } else if a == one {
        // f = y^-2 (x/y)^(-(b-2)/(b-1)) exp(y/((b-1)x))
        let e1 = -(&b - BigRational::from_integer(2.into())) / (&b - &one);
        guards.push(Guard::positive(ratio.clone()));
        let arg = Expr::div(
            Expr::y(),
            Expr::mul(num(&(&b - &one)), Expr::x()),
        )
        .normalize();
        let f = Expr::Product(vec![
            ex("y^(-2)"),
            Expr::Power(Box::new(ratio.clone()), e1),
            Expr::call(crate::expr::Builtin::Exp, arg),
        ]);
        let base = pick_base_point(&guards)?;
        (f, base)
    } else {
        // b == 1, a != 1: f = y^-2 (x/y)^(a/(1-a)) exp(x/(y(a-1)))
        let e1 = &a / (&one - &a);
        if !e1.is_integer() {
            guards.push(Guard::positive(ratio.clone()));
        }
        let arg = Expr::div(
            Expr::x(),
            Expr::mul(Expr::y(), num(&(&a - &one))),
        )
        .normalize();
        let f = Expr::Product(vec![
            ex("y^(-2)"),
            Expr::Power(Box::new(ratio.clone()), e1),
            Expr::call(crate::expr::Builtin::Exp, arg),
        ]);
        let base = pick_base_point(&guards)?;
        (f, base)
    };
    let omega = SymplecticForm::new(f)?.with_guards(guards.clone());
    let h1 = hamiltonian_function(&sys.basis[0], &omega, base_point.clone())?;
    let h2 = hamiltonian_function(&sys.basis[1], &omega, base_point)?;
    sys = sys.with_guards(guards).with_structure(LieHamiltonianStructure {
        label: "chart-native".to_string(),
        omega,
        functions: vec![h1, h2],
    });
    Ok(sys)
}

/// First rational point from a fixed candidate list satisfying the guards.
fn pick_base_point(
    guards: &[Guard],
) -> Result<(BigRational, BigRational), DynamicsError> {
    let candidates: [(i64, i64); 6] = [(1, 1), (1, -1), (-1, 1), (-1, -1), (2, -1), (1, -3)];
    for (cx, cy) in candidates {
        let b = Bindings::point(cx as f64, cy as f64);
        if guards.iter().all(|g| g.holds(&b, 1e-6)) {
            return Ok((
                BigRational::from_integer(cx.into()),
                BigRational::from_integer(cy.into()),
            ));
        }
    }
    Err(DynamicsError::Regime(
        "no admissible base point for the regime's sign region".to_string(),
    ))
}

/// The full quadratic predator-prey right side
/// `dx/dt = b x + c y + d x^2 + e x y + f y^2`, `dy/dt = y`; not a Lie
/// system in general (the closure of `{x^2 dx, x y dx}` grows without
/// bound), so no structure is attached.
pub fn slv_general(
    b: Expr,
    c: Expr,
    d: Expr,
    e: Expr,
    f: Expr,
) -> Result<System, DynamicsError> {
    let basis = vec![
        vf("x", "0"),
        vf("y", "0"),
        vf("x^2", "0"),
        vf("x*y", "0"),
        vf("y^2", "0"),
        vf("0", "y"),
    ];
    let sys = System::new(
        "predator-prey-general",
        basis,
        vec![b, c, d, e, f, Expr::one()],
    )?
    .with_guards(vec![Guard::nonzero(Expr::y())]);
    Ok(sys)
}

/// Predator-prey Lie system `dx/dt = b(t) x + c(t) y + f(t) y^2`,
/// `dy/dt = y` on the basis `{y dy, x dx, y dx, y^2 dx}` (an instance of the
/// class that is not Hamiltonian for any symplectic form).
pub fn slv2(b: Expr, c: Expr, f: Expr) -> Result<System, DynamicsError> {
    let basis = vec![vf("0", "y"), vf("x", "0"), vf("y", "0"), vf("y^2", "0")];
    let sys = System::new("predator-prey", basis, vec![Expr::one(), b, c, f])?
        .with_guards(vec![Guard::nonzero(Expr::y())]);
    Ok(sys)
}

/// Predator-prey Lie-Hamilton system: constant `b`, `dx/dt = b x + c(t) y +
/// f(t) y^2`, `dy/dt = y`, with `omega = dx dy / y^(b+1)` and
/// `h = (-x/y^b, y^(1-b)/(1-b), y^(2-b)/(2-b))` away from b in {1, 2};
/// those two values need the central generator and logarithmic functions.
pub fn slv3(b: BigRational, c: Expr, f: Expr) -> Result<System, DynamicsError> {
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let x1 = VectorField::new(
        Expr::mul(num(&b), Expr::x()).normalize(),
        Expr::y(),
    );
    let basis = vec![x1, vf("y", "0"), vf("y^2", "0")];
    let needs_positive_y = !b.is_integer() || b == one || b == two;
    let guards = if needs_positive_y {
        vec![Guard::positive(Expr::y())]
    } else {
        vec![Guard::nonzero(Expr::y())]
    };
    let omega = SymplecticForm::new(Expr::Power(
        Box::new(Expr::y()),
        -(&b + &one),
    ))?
    .with_guards(guards.clone());
    let functions: Vec<Expr> = if b == one {
        vec![ex("-x/y").normalize(), ex("ln(y)").normalize(), Expr::y()]
    } else if b == two {
        vec![
            ex("-x/y^2").normalize(),
            ex("-1/y").normalize(),
            ex("ln(y)").normalize(),
        ]
    } else {
        let h1 = Expr::neg(Expr::mul(
            Expr::x(),
            Expr::Power(Box::new(Expr::y()), -b.clone()),
        ))
        .normalize();
        let h2 = Expr::div(
            Expr::Power(Box::new(Expr::y()), &one - &b),
            num(&(&one - &b)),
        )
        .normalize();
        let h3 = Expr::div(
            Expr::Power(Box::new(Expr::y()), &two - &b),
            num(&(&two - &b)),
        )
        .normalize();
        vec![h1, h2, h3]
    };
    let sys = System::new("predator-prey-lh", basis, vec![Expr::one(), c, f])?
        .with_guards(guards)
        .with_param("b", b)
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega,
            functions,
        });
    Ok(sys)
}

/// Viral infection model `dx/dt = (alpha(t) - delta) x`,
/// `dy/dt = beta(t) x y - gamma(t) y` on the positive quadrant, with
/// `omega = dx dy/(x y)` and `h = (ln y, ln x, -x)` (a central extension).
pub fn viral_infection(
    delta: BigRational,
    alpha: Expr,
    beta: Expr,
    gamma: Expr,
) -> Result<System, DynamicsError> {
    let basis = vec![vf("x", "0"), vf("0", "-y"), vf("0", "x*y")];
    let c1 = Expr::sub(alpha, num(&delta)).normalize();
    let guards = vec![Guard::positive(Expr::x()), Guard::positive(Expr::y())];
    let sys = System::new("viral-infection", basis, vec![c1, gamma, beta])?
        .with_guards(guards.clone())
        .with_param("delta", delta)
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega: SymplecticForm::parse("1/(x*y)")
                .expect("viral form")
                .with_guards(guards),
            functions: vec![
                ex("ln(y)").normalize(),
                ex("ln(x)").normalize(),
                ex("-x").normalize(),
            ],
        });
    Ok(sys)
}

/// The class-canonical symplectic form on the Milne-Pinney chart: the
/// classification chart's form pulled back through the inverse of the
/// documented diffeomorphism. By uniqueness it is a constant multiple of
/// the chart-native `dx dy`.
pub fn mp_class_canonical_form(
    c: &BigRational,
    lambda: &BigRational,
) -> Result<SymplecticForm, DynamicsError> {
    let l = num(lambda);
    if c.is_negative() {
        // inverse of the map from the x != y chart:
        // (x, y) -> ((l^2 - 2xy)/(2x^2), -(l^2 + 2xy)/(2x^2))
        let l2 = Expr::mul(l.clone(), l);
        let psi = PlanarMap::new(
            Expr::div(
                Expr::sub(l2.clone(), ex("2*x*y")),
                ex("2*x^2"),
            )
            .normalize(),
            Expr::neg(Expr::div(Expr::add(l2, ex("2*x*y")), ex("2*x^2"))).normalize(),
        )
        .with_guards(vec![Guard::nonzero(Expr::x())]);
        let class_form = SymplecticForm::parse("(x - y)^(-2)").expect("I4 form");
        Ok(pullback(&class_form, &psi)?)
    } else if c.is_zero() {
        // inverse of (x, y) -> (l/y, -l x/y): (x, y) -> (-y/x, l/x)
        let psi = PlanarMap::new(ex("-y/x"), Expr::div(l, Expr::x()).normalize())
            .with_guards(vec![Guard::nonzero(Expr::x())]);
        let class_form = SymplecticForm::parse("y^(-3)").expect("I5 form");
        Ok(pullback(&class_form, &psi)?)
    } else {
        // inverse of (x, y) -> (l/y^(1/2), -l x/y^(1/2)): (x, y) -> (-y/x, l^2/x^2)
        let l2 = Expr::mul(l.clone(), num(lambda));
        let psi = PlanarMap::new(
            ex("-y/x"),
            Expr::div(l2, ex("x^2")).normalize(),
        )
        .with_guards(vec![Guard::nonzero(Expr::x())]);
        let class_form = SymplecticForm::parse("y^(-2)").expect("P2 form");
        Ok(pullback(&class_form, &psi)?)
    }
}

/// The class-canonical form on the Kummer-Schwarz chart (c <= 0 cases).
pub fn ks_class_canonical_form(
    c: &BigRational,
    lambda: &BigRational,
) -> Result<SymplecticForm, DynamicsError> {
    let l = num(lambda);
    if c.is_negative() {
        // inverse of (x, y) -> (l(x-y), l(x^2-y^2)):
        // (x, y) -> ((x/l + y/x)/2, (y/x - x/l)/2)
        let u = Expr::div(
            Expr::add(Expr::div(Expr::x(), l.clone()), ex("y/x")),
            Expr::integer(2),
        )
        .normalize();
        let v = Expr::div(
            Expr::sub(ex("y/x"), Expr::div(Expr::x(), l)),
            Expr::integer(2),
        )
        .normalize();
        let psi = PlanarMap::new(u, v).with_guards(vec![Guard::nonzero(Expr::x())]);
        let class_form = SymplecticForm::parse("(x - y)^(-2)").expect("I4 form");
        Ok(pullback(&class_form, &psi)?)
    } else if c.is_zero() {
        // inverse of (x, y) -> (l y^2, 2 l x y^2): (x, y) -> (y/(2x), (x/l)^(1/2))
        let u = ex("y/(2*x)");
        let v = Expr::Power(
            Box::new(Expr::div(Expr::x(), l).normalize()),
            BigRational::new(1.into(), 2.into()),
        );
        let psi = PlanarMap::new(u, v).with_guards(vec![Guard::positive(Expr::x())]);
        let class_form = SymplecticForm::parse("y^(-3)").expect("I5 form");
        Ok(pullback(&class_form, &psi)?)
    } else {
        Err(DynamicsError::Regime(
            "no classification-chart map is shipped for c > 0 on the KS chart".to_string(),
        ))
    }
}

/// Dispatch by CLI name with `key=value` parameters and named coefficient
/// expressions.
pub fn by_name(
    name: &str,
    params: &[(String, String)],
    coeffs: &[(String, String)],
) -> Result<System, DynamicsError> {
    let param = |key: &str, default: Option<&str>| -> Result<BigRational, DynamicsError> {
        let raw = params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .or_else(|| default.map(|d| d.to_string()))
            .ok_or_else(|| DynamicsError::Regime(format!("missing parameter '{key}'")))?;
        crate::expr::parse_rational(&raw)
            .ok_or_else(|| DynamicsError::Regime(format!("bad rational '{raw}' for '{key}'")))
    };
    let coeff = |key: &str, default: &str| -> Result<Expr, DynamicsError> {
        let raw = coeffs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| default.to_string());
        Expr::parse(&raw).map_err(|e| DynamicsError::CoefficientEval(e.to_string()))
    };
    let param_expr = |key: &str, default: &str| -> Result<Expr, DynamicsError> {
        let raw = params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| default.to_string());
        Expr::parse(&raw).map_err(|e| DynamicsError::CoefficientEval(e.to_string()))
    };
    match name {
        "riccati" => riccati_planar(coeff("a0", "0")?, coeff("a1", "0")?, coeff("a2", "0")?),
        "milne-pinney" | "mp" => milne_pinney(param("c", Some("1"))?, coeff("w2", "1")?),
        "kummer-schwarz" | "ks" => kummer_schwarz(param("c", Some("1"))?, coeff("b1", "0")?),
        "buchdahl" => buchdahl(param_expr("a", "1")?, coeff("b", "0")?),
        "lotka-volterra" | "lv" => lotka_volterra(
            param("a", Some("2"))?,
            param("b", Some("3"))?,
            coeff("g", "1")?,
        ),
        "predator-prey-general" | "slv" => slv_general(
            coeff("b", "0")?,
            coeff("c", "0")?,
            coeff("d", "0")?,
            coeff("e", "0")?,
            coeff("f", "0")?,
        ),
        "predator-prey" | "slv2" => slv2(coeff("b", "0")?, coeff("c", "0")?, coeff("f", "0")?),
        "predator-prey-lh" | "slv3" => {
            slv3(param("b", Some("3"))?, coeff("c", "0")?, coeff("f", "0")?)
        }
        "viral-infection" | "viral" => viral_infection(
            param("delta", Some("1"))?,
            coeff("alpha", "1")?,
            coeff("beta", "1")?,
            coeff("gamma", "1")?,
        ),
        other => Err(DynamicsError::UnknownSystem(other.to_string())),
    }
}

/// Named coefficient slots per system, matching the source symbols.
pub fn coefficient_names(name: &str) -> &'static [&'static str] {
    match name {
        "riccati" => &["a0", "a1", "a2"],
        "milne-pinney" | "mp" => &["w2"],
        "kummer-schwarz" | "ks" => &["b1"],
        "buchdahl" => &["b"],
        "lotka-volterra" | "lv" => &["g"],
        "predator-prey-general" | "slv" => &["b", "c", "d", "e", "f"],
        "predator-prey" | "slv2" => &["b", "c", "f"],
        "predator-prey-lh" | "slv3" => &["c", "f"],
        "viral-infection" | "viral" => &["alpha", "beta", "gamma"],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::EquivOptions;
    use crate::symplectic::verify_hamiltonian_function;

    fn br(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn mp_structure_values() {
        let sys = milne_pinney(br(1, 1), Expr::one()).unwrap();
        let s = sys.structure.as_ref().unwrap();
        assert_eq!(s.functions[0], ex("x^2/2").normalize());
        assert_eq!(
            s.functions[2],
            ex("y^2/2 + 1/(2*x^2)").normalize()
        );
    }

    #[test]
    fn ks_structure_verified() {
        let sys = kummer_schwarz(br(-1, 1), ex("sin(t)")).unwrap();
        let s = sys.structure.as_ref().unwrap();
        let opts = EquivOptions::default();
        for (f, h) in sys.basis.iter().zip(&s.functions) {
            let v = verify_hamiltonian_function(f, &s.omega, h, &opts).unwrap();
            assert!(v.is_equal(), "KS {h} fails");
        }
    }

    #[test]
    fn buchdahl_closed_form_for_unit_a() {
        let sys = buchdahl(Expr::one(), ex("sin(t)")).unwrap();
        let s = sys.structure.as_ref().unwrap();
        // h1 = y e^{-x} + const, h2 = e^{-x} + const
        let d1 = Expr::sub(s.functions[0].clone(), ex("y*exp(-x)")).normalize();
        assert!(d1.diff(&Symbol::X).unwrap().is_zero());
        assert!(d1.diff(&Symbol::Y).unwrap().is_zero());
        let opts = EquivOptions::default().with_range(Symbol::Y, 0.2, 2.5);
        for (f, h) in sys.basis.iter().zip(&s.functions) {
            let v = verify_hamiltonian_function(f, &s.omega, h, &opts).unwrap();
            assert!(v.is_equal(), "Buchdahl {h} fails");
        }
    }

    #[test]
    fn buchdahl_general_a_is_quadrature() {
        // a(x) = 1/(1+x^2) has no table antiderivative: the structure must
        // still verify numerically
        let a = ex("1/(1 + x^2)");
        let sys = buchdahl(a, Expr::zero()).unwrap();
        let s = sys.structure.as_ref().unwrap();
        let opts = EquivOptions::default().with_range(Symbol::Y, 0.2, 2.5);
        for (f, h) in sys.basis.iter().zip(&s.functions) {
            let v = verify_hamiltonian_function(f, &s.omega, h, &opts).unwrap();
            assert!(v.is_equal(), "general Buchdahl fails");
        }
    }

    #[test]
    fn viral_structure_verified() {
        let sys = viral_infection(br(1, 1), Expr::one(), Expr::one(), Expr::one()).unwrap();
        let s = sys.structure.as_ref().unwrap();
        let opts = EquivOptions::default()
            .with_range(Symbol::X, 0.2, 2.5)
            .with_range(Symbol::Y, 0.2, 2.5);
        for (f, h) in sys.basis.iter().zip(&s.functions) {
            let v = verify_hamiltonian_function(f, &s.omega, h, &opts).unwrap();
            assert!(v.is_equal(), "viral {h} fails");
        }
    }

    #[test]
    fn slv3_structure_verified() {
        let sys = slv3(br(3, 1), Expr::zero(), Expr::zero()).unwrap();
        let s = sys.structure.as_ref().unwrap();
        assert_eq!(s.functions[0], ex("-x/y^3").normalize());
        let opts = EquivOptions::default();
        for (f, h) in sys.basis.iter().zip(&s.functions) {
            let v = verify_hamiltonian_function(f, &s.omega, h, &opts).unwrap();
            assert!(v.is_equal(), "slv3 {h} fails");
        }
    }

    #[test]
    fn lv_degenerate_has_no_structure() {
        let sys = lotka_volterra(br(1, 1), br(1, 1), Expr::t()).unwrap();
        assert!(sys.structure.is_none());
        // rank-one distribution
        let alg = crate::liealg::LieAlgebra::new(sys.basis.clone(), vec![0]).unwrap();
        assert_eq!(alg.rank_at(0.7, 1.3).unwrap(), 1);
    }

    #[test]
    fn lv_rejects_zero_a() {
        assert!(matches!(
            lotka_volterra(br(0, 1), br(2, 1), Expr::one()),
            Err(DynamicsError::Regime(_))
        ));
    }

    #[test]
    fn class_canonical_forms_are_constant_multiples() {
        // Milne-Pinney: chart-native is dx dy; the pullback of the class
        // form must be a nonzero constant
        for (c, lambda) in [(br(-1, 4), br(1, 1)), (br(0, 1), br(1, 1)), (br(1, 1), br(1, 1))] {
            let form = mp_class_canonical_form(&c, &lambda).unwrap();
            assert!(
                form.f.as_number().is_some(),
                "MP class form for c={c} is {f}, not constant",
                f = form.f
            );
        }
        // Kummer-Schwarz: chart-native is x^-3; the pullback divided by it
        // must be a constant
        for (c, lambda) in [(br(-1, 1), br(1, 2)), (br(0, 1), br(1, 1))] {
            let form = ks_class_canonical_form(&c, &lambda).unwrap();
            let ratio = Expr::div(form.f.clone(), ex("x^(-3)")).normalize();
            assert!(
                ratio.as_number().is_some(),
                "KS class form for c={c} over x^-3 is {ratio}"
            );
        }
    }

    #[test]
    fn by_name_dispatch() {
        assert!(by_name("riccati", &[], &[("a0".into(), "1".into())]).is_ok());
        assert!(by_name("mp", &[("c".into(), "1".into())], &[]).is_ok());
        assert!(matches!(
            by_name("unknown", &[], &[]),
            Err(DynamicsError::UnknownSystem(_))
        ));
    }
}
