//! Applied nonautonomous systems on catalog Lie algebras: named
//! constructors, numerical integration with conservation monitoring, the
//! explicit diffeomorphisms between the sl(2) systems, solution transport,
//! and minimal-algebra computation by Lie closure of time samples.

pub mod rk;
pub mod section7;
pub mod systems;

pub use rk::{integrate_fixed, StepperOptions, Termination, Trajectory};
pub use section7::{section7_map, MapKind};

use crate::expr::{Bindings, EquivOptions, Expr, Guard, Symbol};
use crate::liealg::{lie_closure, AlgebraError, LieAlgebra};
use crate::symplectic::SymplecticForm;
use crate::vfield::{PlanarMap, VectorField};
use num_rational::BigRational;
use std::collections::BTreeMap;

/// A nonautonomous system `X_t = sum b_i(t) X_i` on a finite basis of planar
/// vector fields, with an optional attached Lie-Hamiltonian structure.
#[derive(Clone, Debug)]
pub struct System {
    pub name: String,
    pub basis: Vec<VectorField>,
    /// Coefficient functions of t, one per basis field.
    pub coefficients: Vec<Expr>,
    /// Domain guards monitored during integration (trajectories terminate at
    /// their zero sets, never continue through).
    pub guards: Vec<Guard>,
    pub structure: Option<LieHamiltonianStructure>,
    pub params: BTreeMap<String, BigRational>,
}

/// A symplectic form together with Hamiltonian functions matching the basis
/// order; the composite Hamiltonian is `h(t,x,y) = sum b_i(t) h_i(x,y)`.
#[derive(Clone, Debug)]
pub struct LieHamiltonianStructure {
    /// Provenance label: "chart-native" for the form found directly in the
    /// system's own chart, "class-canonical" for a form pulled back from the
    /// classification chart.
    pub label: String,
    pub omega: SymplecticForm,
    pub functions: Vec<Expr>,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("unknown system '{0}'")]
    UnknownSystem(String),
    #[error("coefficient count {got} does not match basis size {want}")]
    CoefficientCount { got: usize, want: usize },
    #[error("coefficient '{0}' may only involve t")]
    CoefficientNotTime(String),
    #[error("parameter regime violated: {0}")]
    Regime(String),
    #[error("initial state violates guard {0}")]
    GuardAtStart(String),
    #[error("t1 must differ from t0")]
    EmptySpan,
    #[error("coefficient evaluation failed: {0}")]
    CoefficientEval(String),
    #[error("integration aborted: {0}")]
    Aborted(String),
    #[error("system has no attached Lie-Hamiltonian structure")]
    NoStructure,
    #[error("map does not relate basis field {0} to its target")]
    NotRelated(usize),
    #[error("coefficient lists differ at index {0}")]
    CoefficientMismatch(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symplectic(#[from] crate::symplectic::SymplecticError),
    #[error("map evaluation failed: {0}")]
    MapEval(String),
}

impl System {
    pub fn new(
        name: &str,
        basis: Vec<VectorField>,
        coefficients: Vec<Expr>,
    ) -> Result<System, DynamicsError> {
        if basis.len() != coefficients.len() {
            return Err(DynamicsError::CoefficientCount {
                got: coefficients.len(),
                want: basis.len(),
            });
        }
        for c in &coefficients {
            let syms = c.free_symbols();
            if syms.iter().any(|s| !matches!(s, Symbol::T)) {
                return Err(DynamicsError::CoefficientNotTime(c.to_string()));
            }
        }
        // time enters only through the coefficients
        for f in &basis {
            if f.x.contains(&Symbol::T) || f.y.contains(&Symbol::T) {
                return Err(DynamicsError::CoefficientNotTime(format!(
                    "basis field ({}; {}) involves t",
                    f.x, f.y
                )));
            }
        }
        Ok(System {
            name: name.to_string(),
            basis,
            coefficients,
            guards: Vec::new(),
            structure: None,
            params: BTreeMap::new(),
        })
    }

    pub fn with_guards(mut self, guards: Vec<Guard>) -> System {
        self.guards = guards;
        self
    }

    pub fn with_structure(mut self, s: LieHamiltonianStructure) -> System {
        self.structure = Some(s);
        self
    }

    pub fn with_param(mut self, name: &str, v: BigRational) -> System {
        self.params.insert(name.to_string(), v);
        self
    }

    /// Numeric coefficient vector at time t.
    pub fn coefficients_at(&self, t: f64) -> Result<Vec<f64>, DynamicsError> {
        let b = Bindings::new().with_t(t);
        self.coefficients
            .iter()
            .map(|c| {
                c.eval(&b)
                    .map_err(|e| DynamicsError::CoefficientEval(e.to_string()))
            })
            .collect()
    }

    /// The frozen field `X_t = sum b_i(t) X_i` with numeric coefficients
    /// folded in exactly.
    pub fn field_at(&self, t: f64) -> Result<VectorField, DynamicsError> {
        let coeffs = self.coefficients_at(t)?;
        Ok(VectorField::linear_combination(&self.basis, &coeffs))
    }

    /// Composite Hamiltonian value `h(t, x, y) = sum b_i(t) h_i(x, y)`.
    pub fn hamiltonian_value(&self, t: f64, x: f64, y: f64) -> Result<f64, DynamicsError> {
        let s = self.structure.as_ref().ok_or(DynamicsError::NoStructure)?;
        let coeffs = self.coefficients_at(t)?;
        let b = Bindings::point(x, y);
        let mut acc = 0.0;
        for (c, h) in coeffs.iter().zip(&s.functions) {
            if *c == 0.0 {
                continue;
            }
            acc += c
                * h.eval(&b)
                    .map_err(|e| DynamicsError::CoefficientEval(e.to_string()))?;
        }
        Ok(acc)
    }

    /// `dh/dt (t, x, y) = sum b_i'(t) h_i(x, y)` at frozen (x, y).
    pub fn hamiltonian_time_derivative(
        &self,
        t: f64,
        x: f64,
        y: f64,
    ) -> Result<f64, DynamicsError> {
        let s = self.structure.as_ref().ok_or(DynamicsError::NoStructure)?;
        let bt = Bindings::new().with_t(t);
        let b = Bindings::point(x, y);
        let mut acc = 0.0;
        for (c, h) in self.coefficients.iter().zip(&s.functions) {
            let dc = c
                .diff(&Symbol::T)
                .map_err(|e| DynamicsError::CoefficientEval(e.to_string()))?;
            let dcv = dc
                .eval(&bt)
                .map_err(|e| DynamicsError::CoefficientEval(e.to_string()))?;
            if dcv == 0.0 {
                continue;
            }
            acc += dcv
                * h.eval(&b)
                    .map_err(|e| DynamicsError::CoefficientEval(e.to_string()))?;
        }
        Ok(acc)
    }

    fn rhs(&self) -> impl rk::Rhs + '_ {
        move |t: f64, x: f64, y: f64| -> Result<(f64, f64), String> {
            let coeffs = self.coefficients_at(t).map_err(|e| e.to_string())?;
            let b = Bindings::point(x, y);
            let mut fx = 0.0;
            let mut fy = 0.0;
            for (c, f) in coeffs.iter().zip(&self.basis) {
                if *c == 0.0 {
                    continue;
                }
                fx += c * f.x.eval(&b).map_err(|e| e.to_string())?;
                fy += c * f.y.eval(&b).map_err(|e| e.to_string())?;
            }
            Ok((fx, fy))
        }
    }

    /// Integrate from `x0` over `[t0, t1]` (backward allowed), sampling the
    /// dense output at `samples + 1` evenly spaced times. A non-finite
    /// `max_step` means the default cap `(t1 - t0)/10`.
    pub fn integrate(
        &self,
        x0: (f64, f64),
        t0: f64,
        t1: f64,
        opts: &StepperOptions,
        samples: usize,
    ) -> Result<Trajectory, DynamicsError> {
        if t0 == t1 {
            return Err(DynamicsError::EmptySpan);
        }
        let mut opts = *opts;
        if !opts.max_step.is_finite() {
            opts.max_step = (t1 - t0).abs() / 10.0;
        }
        let opts = &opts;
        let b0 = Bindings::point(x0.0, x0.1);
        for g in &self.guards {
            if !g.holds(&b0, 0.0) {
                return Err(DynamicsError::GuardAtStart(g.to_string()));
            }
        }
        let times: Vec<f64> = if samples == 0 {
            Vec::new()
        } else {
            (0..=samples)
                .map(|i| t0 + (t1 - t0) * i as f64 / samples as f64)
                .collect()
        };
        Ok(rk::integrate(
            &self.rhs(),
            t0,
            x0,
            t1,
            &self.guards,
            &times,
            opts,
        ))
    }
}

/// Conservation monitoring along a trajectory's dense samples.
#[derive(Clone, Debug)]
pub struct ConservationReport {
    /// max over k of |dh/dt - pt_h(midpoint)|
    pub max_residual: f64,
    pub series: Vec<(f64, f64)>,
    /// For autonomous coefficients: max |h(x_k) - h(x_0)|.
    pub drift: Option<f64>,
}

/// Residuals `r_k = |dh/dt - dh/dt(midpoint)|` over consecutive dense
/// samples; for constant coefficients also the plain drift of `h`.
pub fn conservation_residual(
    system: &System,
    traj: &Trajectory,
) -> Result<ConservationReport, DynamicsError> {
    if system.structure.is_none() {
        return Err(DynamicsError::NoStructure);
    }
    let samples = &traj.samples;
    if samples.len() < 3 {
        return Err(DynamicsError::Aborted(
            "need at least 3 dense samples for residuals".to_string(),
        ));
    }
    let autonomous = system.coefficients.iter().all(|c| !c.contains(&Symbol::T));
    let mut max_residual = 0.0f64;
    let mut series = Vec::new();
    // consecutive pairs (k, k+2) with the recorded midpoint sample k+1 keep
    // everything on dense output
    let mut k = 0;
    while k + 2 < samples.len() {
        let (ta, xa, ya) = samples[k];
        let (tm, xm, ym) = samples[k + 1];
        let (tb, xb, yb) = samples[k + 2];
        let ha = system.hamiltonian_value(ta, xa, ya)?;
        let hb = system.hamiltonian_value(tb, xb, yb)?;
        let dhdt = (hb - ha) / (tb - ta);
        let pt = system.hamiltonian_time_derivative(tm, xm, ym)?;
        let r = (dhdt - pt).abs();
        series.push((tm, r));
        if r > max_residual {
            max_residual = r;
        }
        k += 2;
    }
    let drift = if autonomous {
        let (t0, x0, y0) = samples[0];
        let h0 = system.hamiltonian_value(t0, x0, y0)?;
        let mut worst = 0.0f64;
        for &(t, x, y) in samples {
            let h = system.hamiltonian_value(t, x, y)?;
            worst = worst.max((h - h0).abs());
        }
        Some(worst)
    } else {
        None
    };
    Ok(ConservationReport {
        max_residual,
        series,
        drift,
    })
}

/// Transport comparison: integrate the source, push its dense samples
/// through the map, integrate the target from the mapped start, and report
/// the max pointwise relative deviation over the common time range. Partial
/// trajectories (guard exits, escapes in finite time) shrink the common
/// range rather than fail: the mapped and native singular times agreeing is
/// itself evidence of correct transport.
#[derive(Clone, Debug)]
pub struct TransportReport {
    /// max over compared samples of |mapped - target| scaled by
    /// max(1, |target|) componentwise.
    pub max_deviation: f64,
    /// End of the common time range actually compared.
    pub common_t_end: f64,
    pub compared_samples: usize,
    pub source: Trajectory,
    pub target: Trajectory,
    pub relatedness: Vec<crate::expr::Equivalence>,
}

#[allow(clippy::too_many_arguments)]
pub fn transport_compare(
    source: &System,
    map: &PlanarMap,
    target: &System,
    x0: (f64, f64),
    t0: f64,
    t1: f64,
    opts: &StepperOptions,
    samples: usize,
) -> Result<TransportReport, DynamicsError> {
    if source.basis.len() != target.basis.len() {
        return Err(DynamicsError::CoefficientCount {
            got: target.basis.len(),
            want: source.basis.len(),
        });
    }
    // coefficient lists must agree as expressions in t
    for (i, (a, b)) in source
        .coefficients
        .iter()
        .zip(&target.coefficients)
        .enumerate()
    {
        if !Expr::sub(a.clone(), b.clone()).normalize().is_zero() {
            return Err(DynamicsError::CoefficientMismatch(i));
        }
    }
    // relatedness per basis pair
    let mut equiv = EquivOptions::default();
    equiv.guards = crate::vfield::union_guards(&equiv.guards, &map.guards);
    let mut relatedness = Vec::new();
    for (i, (sf, tf)) in source.basis.iter().zip(&target.basis).enumerate() {
        let v = map
            .relates(sf, tf, &equiv)
            .map_err(|e| DynamicsError::MapEval(e.to_string()))?;
        if !v.is_equal() {
            return Err(DynamicsError::NotRelated(i));
        }
        relatedness.push(v);
    }
    let src_traj = source.integrate(x0, t0, t1, opts, samples)?;
    if matches!(src_traj.termination, Termination::MaxStepsExceeded) {
        return Err(DynamicsError::Aborted("source ran out of steps".to_string()));
    }
    let y0 = map
        .apply(x0.0, x0.1)
        .map_err(|e| DynamicsError::MapEval(e.to_string()))?;
    let tgt_traj = target.integrate(y0, t0, t1, opts, samples)?;
    if matches!(tgt_traj.termination, Termination::MaxStepsExceeded) {
        return Err(DynamicsError::Aborted("target ran out of steps".to_string()));
    }
    let mut max_deviation = 0.0f64;
    let mut compared = 0usize;
    let mut common_t_end = t0;
    for (s, t) in src_traj.samples.iter().zip(&tgt_traj.samples) {
        if (s.0 - t.0).abs() > 1e-12 {
            break;
        }
        let mapped = map
            .apply(s.1, s.2)
            .map_err(|e| DynamicsError::MapEval(e.to_string()))?;
        let sx = t.1.abs().max(1.0);
        let sy = t.2.abs().max(1.0);
        let d = ((mapped.0 - t.1) / sx).abs().max(((mapped.1 - t.2) / sy).abs());
        max_deviation = max_deviation.max(d);
        compared += 1;
        common_t_end = s.0;
    }
    if compared == 0 {
        return Err(DynamicsError::Aborted(
            "no common samples to compare".to_string(),
        ));
    }
    Ok(TransportReport {
        max_deviation,
        common_t_end,
        compared_samples: compared,
        source: src_traj,
        target: tgt_traj,
        relatedness,
    })
}

/// Smallest Lie algebra containing the sampled fields `X_{t_j}` (by Lie
/// closure). At least basis size + 1 samples are required so coefficient
/// directions are exhausted.
pub fn minimal_algebra(
    system: &System,
    t_samples: &[f64],
    cap: usize,
) -> Result<LieAlgebra, DynamicsError> {
    if t_samples.is_empty() {
        return Err(DynamicsError::Aborted("no time samples".to_string()));
    }
    if t_samples.len() < system.basis.len() + 1 {
        return Err(DynamicsError::Aborted(format!(
            "need at least {} time samples for a basis of {}",
            system.basis.len() + 1,
            system.basis.len()
        )));
    }
    let mut seeds = Vec::new();
    for &t in t_samples {
        seeds.push(system.field_at(t)?);
    }
    Ok(lie_closure(&seeds, cap)?)
}

/// CSV rendering of a trajectory's dense samples: `t,x,y[,h,residual]`.
pub fn trajectory_csv(system: &System, traj: &Trajectory, precision: usize) -> String {
    let has_h = system.structure.is_some();
    let mut out = String::new();
    if has_h {
        out.push_str("t,x,y,h,residual\n");
    } else {
        out.push_str("t,x,y\n");
    }
    let report = if has_h {
        conservation_residual(system, traj).ok()
    } else {
        None
    };
    let p = precision.clamp(1, 17) - 1;
    for (idx, &(t, x, y)) in traj.samples.iter().enumerate() {
        if has_h {
            let h = system.hamiltonian_value(t, x, y).unwrap_or(f64::NAN);
            let r = report
                .as_ref()
                .and_then(|rep| rep.series.get(idx / 2).map(|(_, r)| *r))
                .unwrap_or(f64::NAN);
            out.push_str(&format!(
                "{t:.p$e},{x:.p$e},{y:.p$e},{h:.p$e},{r:.p$e}\n"
            ));
        } else {
            out.push_str(&format!("{t:.p$e},{x:.p$e},{y:.p$e}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::systems;
    use super::*;

    #[test]
    fn riccati_equilibrium() {
        // (a0, a1, a2) = (1, 0, 1): (0, 1) is a fixed point
        let sys = systems::riccati_planar(Expr::one(), Expr::zero(), Expr::one()).unwrap();
        let traj = sys
            .integrate((0.0, 1.0), 0.0, 3.0, &StepperOptions::default(), 10)
            .unwrap();
        for &(_, x, y) in &traj.samples {
            assert!(
                x.abs() < 1e-9 && (y - 1.0).abs() < 1e-9,
                "drifted to ({x},{y})"
            );
        }
    }

    #[test]
    fn zero_coefficients_constant_trajectory() {
        let sys = systems::riccati_planar(Expr::zero(), Expr::zero(), Expr::zero()).unwrap();
        let traj = sys
            .integrate((0.5, 2.0), 0.0, 1.0, &StepperOptions::default(), 4)
            .unwrap();
        let (_, x, y) = traj.last();
        assert_eq!((x, y), (0.5, 2.0));
    }

    #[test]
    fn mp_harmonic_oscillator() {
        // c = 0 and w2 = 1 is the harmonic oscillator: x(t) = cos t
        let sys = systems::milne_pinney(BigRational::from_integer(0.into()), Expr::one()).unwrap();
        let traj = sys
            .integrate(
                (1.0, 0.0),
                0.0,
                std::f64::consts::FRAC_PI_2,
                &StepperOptions::default(),
                4,
            )
            .unwrap();
        let (_, x, y) = traj.last();
        assert!(x.abs() < 1e-6, "x = {x}");
        assert!((y + 1.0).abs() < 1e-6, "y = {y}");
    }

    #[test]
    fn mp_autonomous_energy_drift() {
        let sys = systems::milne_pinney(BigRational::from_integer(1.into()), Expr::one()).unwrap();
        let opts = StepperOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..Default::default()
        };
        let traj = sys.integrate((1.0, 0.0), 0.0, 10.0, &opts, 400).unwrap();
        assert_eq!(traj.termination, Termination::ReachedEnd);
        let rep = conservation_residual(&sys, &traj).unwrap();
        let drift = rep.drift.unwrap();
        assert!(drift < 1e-8, "drift {drift}");
    }

    #[test]
    fn mp_structure_is_verified() {
        // dh_i = i_{X_i} omega for the chart-native structure
        let sys = systems::milne_pinney(BigRational::from_integer(1.into()), Expr::one()).unwrap();
        let s = sys.structure.as_ref().unwrap();
        for (f, h) in sys.basis.iter().zip(&s.functions) {
            let v = crate::symplectic::verify_hamiltonian_function(
                f,
                &s.omega,
                h,
                &EquivOptions::default(),
            )
            .unwrap();
            assert!(v.is_equal(), "{h} fails dh = i_X omega");
        }
    }

    #[test]
    fn guard_exit_terminates() {
        let down = System::new(
            "down",
            vec![VectorField::parse("0", "1").unwrap()],
            vec![Expr::integer(-1)],
        )
        .unwrap()
        .with_guards(vec![Guard::nonzero(Expr::y())]);
        let traj = down
            .integrate((0.0, 1.0), 0.0, 5.0, &StepperOptions::default(), 0)
            .unwrap();
        match traj.termination {
            Termination::GuardExit { .. } => {}
            ref other => panic!("expected guard exit, got {other:?}"),
        }
        let (t, _, y) = traj.last();
        assert!((t - 1.0).abs() < 1e-8);
        assert!(y.abs() < 1e-8);
    }

    #[test]
    fn time_symmetry() {
        let sys = systems::milne_pinney(BigRational::from_integer(1.into()), Expr::one()).unwrap();
        let opts = StepperOptions {
            rtol: 1e-9,
            atol: 1e-12,
            ..Default::default()
        };
        let fwd = sys.integrate((1.0, 0.0), 0.0, 5.0, &opts, 0).unwrap();
        let (_, xf, yf) = fwd.last();
        let back = sys.integrate((xf, yf), 5.0, 0.0, &opts, 0).unwrap();
        let (_, xb, yb) = back.last();
        let err = ((xb - 1.0).powi(2) + yb.powi(2)).sqrt();
        assert!(err < 10.0 * opts.rtol * 10.0, "round trip error {err}");
    }

    #[test]
    fn minimal_algebra_of_mp_sine() {
        let sys = systems::milne_pinney(
            BigRational::from_integer(1.into()),
            Expr::call(crate::expr::Builtin::Sin, Expr::t()),
        )
        .unwrap();
        let got = minimal_algebra(
            &sys,
            &[
                0.0,
                std::f64::consts::PI / 6.0,
                std::f64::consts::PI / 3.0,
                1.0,
            ],
            6,
        )
        .unwrap();
        assert_eq!(got.dim(), 3);
        let fp = got.structure_constants().unwrap().fingerprint();
        assert_eq!(fp.name.to_string(), "sl(2)");
    }

    #[test]
    fn field_at_folds_coefficients() {
        // KS with b1 = sin t at t = 0 is exactly X3
        let sys = systems::kummer_schwarz(
            BigRational::new((-1).into(), 1.into()),
            Expr::call(crate::expr::Builtin::Sin, Expr::t()),
        )
        .unwrap();
        let f = sys.field_at(0.0).unwrap();
        let x3 = &sys.basis[2];
        assert!(Expr::sub(f.x.clone(), x3.x.clone()).normalize().is_zero());
        assert!(Expr::sub(f.y.clone(), x3.y.clone()).normalize().is_zero());
    }

    #[test]
    fn constant_hamiltonian_zero_residual() {
        // a structure whose only function is the constant 1 conserves trivially
        let sys = System::new(
            "const",
            vec![VectorField::zero()],
            vec![Expr::one()],
        )
        .unwrap()
        .with_structure(LieHamiltonianStructure {
            label: "chart-native".to_string(),
            omega: crate::symplectic::SymplecticForm::standard(),
            functions: vec![Expr::one()],
        });
        let traj = sys
            .integrate((0.3, 0.7), 0.0, 1.0, &StepperOptions::default(), 10)
            .unwrap();
        let rep = conservation_residual(&sys, &traj).unwrap();
        assert_eq!(rep.max_residual, 0.0);
        assert_eq!(rep.drift, Some(0.0));
    }

    #[test]
    fn minimal_algebra_constant_coefficients() {
        let sys = systems::milne_pinney(BigRational::from_integer(0.into()), Expr::one()).unwrap();
        let got = minimal_algebra(&sys, &[0.0, 0.5, 1.0, 2.0], 6).unwrap();
        assert_eq!(got.dim(), 1);
    }

    #[test]
    fn transport_rejects_unrelated_map() {
        // the identity map does not relate the Riccati basis to the
        // Milne-Pinney basis
        let ric = systems::riccati_planar(Expr::one(), Expr::zero(), Expr::zero()).unwrap();
        let mp = systems::milne_pinney(BigRational::from_integer(1.into()), Expr::one()).unwrap();
        let tgt = System::new("mp", mp.basis.clone(), ric.coefficients.clone()).unwrap();
        let err = transport_compare(
            &ric,
            &PlanarMap::identity(),
            &tgt,
            (1.0, 0.5),
            0.0,
            1.0,
            &StepperOptions::default(),
            10,
        );
        assert!(matches!(err, Err(DynamicsError::NotRelated(_))), "{err:?}");
    }

    #[test]
    fn slv_general_not_a_lie_system() {
        let sys = systems::slv_general(
            Expr::zero(),
            Expr::zero(),
            Expr::t(),
            Expr::mul(Expr::t(), Expr::t()),
            Expr::zero(),
        )
        .unwrap();
        let err = minimal_algebra(&sys, &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5], 10);
        assert!(
            matches!(
                err,
                Err(DynamicsError::Algebra(AlgebraError::CapExceeded {
                    cap: 10,
                    ..
                }))
            ),
            "{err:?}"
        );
    }
}
