//! Embedded Dormand-Prince 5(4) pair with PI step-size control, 4th-order
//! dense output, guard monitoring with bisection localization of exits, and
//! a fixed-step fallback for order measurements.

use crate::expr::{Bindings, Guard};

/// Right-hand side of the planar nonautonomous system.
pub trait Rhs {
    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64), String>;
}

impl<F> Rhs for F
where
    F: Fn(f64, f64, f64) -> Result<(f64, f64), String>,
{
    fn eval(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64), String> {
        self(t, x, y)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepperOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepperOptions {
    fn default() -> Self {
        StepperOptions {
            rtol: 1e-9,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    /// A domain guard changed sign; `t` of the exit localized to 1e-10.
    GuardExit { guard: String },
    StepUnderflow,
    RhsFailure { message: String },
    MaxStepsExceeded,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Accepted-step knots (t, x, y), strictly monotone in t.
    pub knots: Vec<(f64, f64, f64)>,
    /// Dense-output samples at the requested times within the integrated span.
    pub samples: Vec<(f64, f64, f64)>,
    pub steps: usize,
    pub rejected: usize,
    pub max_error_estimate: f64,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> (f64, f64, f64) {
        *self.knots.last().expect("trajectory has at least the start")
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
/// 5th-minus-4th order error weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output quartic coefficients.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Copy)]
struct DenseSegment {
    t0: f64,
    h: f64,
    // rcont1..rcont5 per component
    c1: [f64; 2],
    c2: [f64; 2],
    c3: [f64; 2],
    c4: [f64; 2],
    c5: [f64; 2],
}

impl DenseSegment {
    fn eval(&self, t: f64) -> (f64, f64) {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = self.c1[i]
                + theta
                    * (self.c2[i]
                        + theta1 * (self.c3[i] + theta * (self.c4[i] + theta1 * self.c5[i])));
        }
        (out[0], out[1])
    }
}

/// One full DOPRI5 step from (t, y) with step h; returns (ynew, err_norm,
/// k1..k7) or the RHS failure.
#[allow(clippy::type_complexity)]
fn dopri_step<R: Rhs>(
    rhs: &R,
    t: f64,
    y: [f64; 2],
    h: f64,
    k1: [f64; 2],
    opts: &StepperOptions,
) -> Result<([f64; 2], f64, [[f64; 2]; 7]), String> {
    let mut k = [[0.0; 2]; 7];
    k[0] = k1;
    for stage in 0..6 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(stage + 1) {
            let a = A[stage][j];
            if a != 0.0 {
                yi[0] += h * a * kj[0];
                yi[1] += h * a * kj[1];
            }
        }
        let (fx, fy) = rhs.eval(t + C[stage] * h, yi[0], yi[1]).map_err(|e| e)?;
        k[stage + 1] = [fx, fy];
    }
    // FSAL: k[6] is f at the new point with the 5th-order solution.
    let mut ynew = y;
    for (j, kj) in k.iter().enumerate().take(6) {
        let a = A[5][j];
        if a != 0.0 {
            ynew[0] += h * a * kj[0];
            ynew[1] += h * a * kj[1];
        }
    }
    // k[6] computed at (t+h, ynew) by the stage loop above (C[5] = 1, A[5] row)
    let mut err = [0.0; 2];
    for (j, kj) in k.iter().enumerate() {
        if E[j] != 0.0 {
            err[0] += E[j] * kj[0];
            err[1] += E[j] * kj[1];
        }
    }
    let mut norm = 0.0;
    for i in 0..2 {
        let sk = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
        let e = h * err[i] / sk;
        norm += e * e;
    }
    Ok((ynew, (norm / 2.0).sqrt(), k))
}

fn dense_segment(t: f64, h: f64, y: [f64; 2], ynew: [f64; 2], k: &[[f64; 2]; 7]) -> DenseSegment {
    let mut seg = DenseSegment {
        t0: t,
        h,
        c1: y,
        c2: [0.0; 2],
        c3: [0.0; 2],
        c4: [0.0; 2],
        c5: [0.0; 2],
    };
    for i in 0..2 {
        let ydiff = ynew[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        seg.c2[i] = ydiff;
        seg.c3[i] = bspl;
        seg.c4[i] = ydiff - h * k[6][i] - bspl;
        seg.c5[i] = h * (D[0] * k[0][i]
            + D[2] * k[2][i]
            + D[3] * k[3][i]
            + D[4] * k[4][i]
            + D[5] * k[5][i]
            + D[6] * k[6][i]);
    }
    seg
}

/// Integrate with adaptive steps, recording dense output at `sample_times`
/// (must lie between t0 and t1 in integration order) and watching `guards`.
#[allow(clippy::too_many_arguments)]
pub fn integrate<R: Rhs>(
    rhs: &R,
    t0: f64,
    x0: (f64, f64),
    t1: f64,
    guards: &[Guard],
    sample_times: &[f64],
    opts: &StepperOptions,
) -> Trajectory {
    let posneg = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory {
        knots: vec![(t0, x0.0, x0.1)],
        samples: Vec::new(),
        steps: 0,
        rejected: 0,
        max_error_estimate: 0.0,
        termination: Termination::ReachedEnd,
    };
    let mut sample_iter = sample_times.iter().copied().peekable();
    let guard_sign = |x: f64, y: f64| -> Vec<f64> {
        guards
            .iter()
            .map(|g| {
                g.expr
                    .eval(&Bindings::point(x, y))
                    .map(|v| v.signum())
                    .unwrap_or(0.0)
            })
            .collect()
    };
    let start_signs = guard_sign(x0.0, x0.1);

    let mut t = t0;
    let mut y = [x0.0, x0.1];
    let mut k1 = match rhs.eval(t, y[0], y[1]) {
        Ok((fx, fy)) => [fx, fy],
        Err(e) => {
            traj.termination = Termination::RhsFailure { message: e };
            return traj;
        }
    };
    // initial step size guess
    let span = (t1 - t0).abs();
    let mut h = initial_step(rhs, t, y, k1, posneg, opts).unwrap_or(1e-6 * span.max(1.0));
    h = h.min(opts.max_step).max(1e-300);
    let mut facold: f64 = 1e-4;
    const BETA: f64 = 0.04;
    const SAFE: f64 = 0.9;
    let expo1 = 0.2 - BETA * 0.75;

    while posneg * (t1 - t) > 0.0 {
        if traj.steps + traj.rejected > opts.max_steps {
            traj.termination = Termination::MaxStepsExceeded;
            return traj;
        }
        let remaining = (t1 - t).abs();
        let mut hh = h.min(opts.max_step).min(remaining);
        if hh < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            traj.termination = Termination::StepUnderflow;
            return traj;
        }
        let step = dopri_step(rhs, t, y, posneg * hh, k1, opts);
        let (ynew, err, k) = match step {
            Ok(v) => v,
            Err(_) => {
                // RHS failed inside the step (domain exit): shrink
                hh *= 0.25;
                h = hh;
                traj.rejected += 1;
                if hh < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    traj.termination = Termination::StepUnderflow;
                    return traj;
                }
                continue;
            }
        };
        let fac11 = err.powf(expo1);
        if err <= 1.0 {
            // accepted
            traj.steps += 1;
            traj.max_error_estimate = traj.max_error_estimate.max(err);
            let tnew = t + posneg * hh;
            let seg = dense_segment(t, posneg * hh, y, ynew, &k);
            // guard monitoring along the dense output
            if let Some((texit, which)) =
                guard_exit(&seg, guards, &start_signs, t, tnew, posneg)
            {
                let (gx, gy) = seg.eval(texit);
                while let Some(&ts) = sample_iter.peek() {
                    if posneg * (ts - texit) <= 0.0 {
                        let (sx, sy) = seg.eval(ts);
                        traj.samples.push((ts, sx, sy));
                        sample_iter.next();
                    } else {
                        break;
                    }
                }
                traj.knots.push((texit, gx, gy));
                traj.termination = Termination::GuardExit {
                    guard: guards[which].to_string(),
                };
                return traj;
            }
            while let Some(&ts) = sample_iter.peek() {
                if posneg * (ts - tnew) <= 0.0 && posneg * (ts - t) >= 0.0 {
                    let (sx, sy) = seg.eval(ts);
                    traj.samples.push((ts, sx, sy));
                    sample_iter.next();
                } else if posneg * (ts - t) < 0.0 {
                    sample_iter.next();
                } else {
                    break;
                }
            }
            t = tnew;
            y = ynew;
            k1 = k[6]; // FSAL
            traj.knots.push((t, y[0], y[1]));
            // PI controller: h_new = h / clamp(err^expo1 / facold^beta / safe)
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(0.1, 5.0);
            h = hh / fac;
            facold = err.max(1e-4);
        } else {
            traj.rejected += 1;
            h = hh / (fac11 / SAFE).min(5.0);
        }
    }
    traj.termination = Termination::ReachedEnd;
    traj
}

/// Locate the first guard sign change inside a step by bisection on the
/// dense output, to 1e-10 in t.
fn guard_exit(
    seg: &DenseSegment,
    guards: &[Guard],
    start_signs: &[f64],
    t: f64,
    tnew: f64,
    posneg: f64,
) -> Option<(f64, usize)> {
    let violated = |tt: f64| -> Option<usize> {
        let (x, y) = seg.eval(tt);
        let b = Bindings::point(x, y);
        for (i, g) in guards.iter().enumerate() {
            let v = match g.expr.eval(&b) {
                Ok(v) => v,
                Err(_) => return Some(i),
            };
            let bad = match g.kind {
                crate::expr::GuardKind::Positive => v <= 0.0,
                crate::expr::GuardKind::NonZero => {
                    v == 0.0 || (start_signs[i] != 0.0 && v.signum() != start_signs[i])
                }
            };
            if bad {
                return Some(i);
            }
        }
        None
    };
    let which = violated(tnew)?;
    // bisect between t (valid) and tnew (violated)
    let mut lo = t;
    let mut hi = tnew;
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-10 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if violated(mid).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let _ = posneg;
    Some((hi, which))
}

fn initial_step<R: Rhs>(
    rhs: &R,
    t: f64,
    y: [f64; 2],
    k1: [f64; 2],
    posneg: f64,
    opts: &StepperOptions,
) -> Option<f64> {
    let sk = |v: f64| opts.atol + opts.rtol * v.abs();
    let d0 = ((y[0] / sk(y[0])).powi(2) + (y[1] / sk(y[1])).powi(2)).sqrt() / 2f64.sqrt();
    let d1 = ((k1[0] / sk(y[0])).powi(2) + (k1[1] / sk(y[1])).powi(2)).sqrt() / 2f64.sqrt();
    let h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = [y[0] + posneg * h0 * k1[0], y[1] + posneg * h0 * k1[1]];
    let (f1x, f1y) = rhs.eval(t + posneg * h0, y1[0], y1[1]).ok()?;
    let d2 = (((f1x - k1[0]) / sk(y[0])).powi(2) + ((f1y - k1[1]) / sk(y[1])).powi(2)).sqrt()
        / (2f64.sqrt() * h0);
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2)
    };
    Some(h1.min(100.0 * h0))
}

/// Fixed-step DOPRI5 (no adaptivity): used by the order-floor measurement.
pub fn integrate_fixed<R: Rhs>(
    rhs: &R,
    t0: f64,
    x0: (f64, f64),
    t1: f64,
    step: f64,
    opts: &StepperOptions,
) -> Result<(f64, f64), String> {
    let posneg = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = [x0.0, x0.1];
    let mut k1 = {
        let (fx, fy) = rhs.eval(t, y[0], y[1])?;
        [fx, fy]
    };
    while posneg * (t1 - t) > 1e-14 {
        let hh = step.min((t1 - t).abs());
        let (ynew, _, k) = dopri_step(rhs, t, y, posneg * hh, k1, opts)?;
        t += posneg * hh;
        y = ynew;
        k1 = k[6];
    }
    Ok((y[0], y[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> impl Rhs {
        |_t: f64, x: f64, y: f64| Ok((y, -x))
    }

    #[test]
    fn harmonic_oscillator_quarter_period() {
        let opts = StepperOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..Default::default()
        };
        let traj = integrate(
            &harmonic(),
            0.0,
            (1.0, 0.0),
            std::f64::consts::FRAC_PI_2,
            &[],
            &[],
            &opts,
        );
        assert_eq!(traj.termination, Termination::ReachedEnd);
        let (_, x, y) = traj.last();
        assert!((x - 0.0).abs() < 1e-6, "x = {x}");
        assert!((y + 1.0).abs() < 1e-6, "y = {y}");
    }

    #[test]
    fn straight_line() {
        // dx/dt = y, dy/dt = 0 from (0,1): x = t
        let rhs = |_t: f64, _x: f64, y: f64| Ok((y, 0.0));
        let traj = integrate(
            &rhs,
            0.0,
            (0.0, 1.0),
            3.0,
            &[],
            &[1.5],
            &StepperOptions::default(),
        );
        let (_, x, y) = traj.last();
        assert!((x - 3.0).abs() < 1e-9);
        assert!((y - 1.0).abs() < 1e-12);
        assert_eq!(traj.samples.len(), 1);
        assert!((traj.samples[0].1 - 1.5).abs() < 1e-9);
    }

    #[test]
    fn dense_output_accuracy() {
        let opts = StepperOptions {
            rtol: 1e-9,
            atol: 1e-12,
            ..Default::default()
        };
        let times: Vec<f64> = (1..40).map(|i| i as f64 * 0.05).collect();
        let traj = integrate(&harmonic(), 0.0, (1.0, 0.0), 2.0, &[], &times, &opts);
        assert_eq!(traj.samples.len(), times.len());
        for (t, x, y) in &traj.samples {
            assert!((x - t.cos()).abs() < 1e-7, "x({t}) = {x}");
            assert!((y + t.sin()).abs() < 1e-7, "y({t}) = {y}");
        }
    }

    #[test]
    fn guard_exit_localized() {
        // dx/dt = 1 crossing x = 1 at t = 1 with guard x - 1 != 0
        let rhs = |_t: f64, _x: f64, _y: f64| Ok((1.0, 0.0));
        let guard = Guard::nonzero(
            crate::expr::Expr::sub(crate::expr::Expr::x(), crate::expr::Expr::one()),
        );
        let traj = integrate(
            &rhs,
            0.0,
            (0.0, 0.0),
            5.0,
            &[guard],
            &[],
            &StepperOptions::default(),
        );
        match &traj.termination {
            Termination::GuardExit { .. } => {}
            other => panic!("expected guard exit, got {other:?}"),
        }
        let (t, _, _) = traj.last();
        assert!((t - 1.0).abs() < 1e-8, "exit t = {t}");
    }

    #[test]
    fn backward_integration() {
        let one: f64 = 1.0;
        let traj = integrate(
            &harmonic(),
            1.0,
            (one.cos(), -one.sin()),
            0.0,
            &[],
            &[],
            &StepperOptions::default(),
        );
        let (_, x, y) = traj.last();
        assert!((x - 1.0).abs() < 1e-7);
        assert!(y.abs() < 1e-7);
    }

    #[test]
    fn fixed_step_order_floor() {
        // halving the step must shrink the endpoint error by at least 2^4·0.8
        let opts = StepperOptions::default();
        let t1: f64 = 2.0;
        let exact = (t1.cos(), -t1.sin());
        let mut errs = Vec::new();
        for step in [0.2, 0.1, 0.05] {
            let (x, y) = integrate_fixed(&harmonic(), 0.0, (1.0, 0.0), t1, step, &opts).unwrap();
            errs.push(((x - exact.0).powi(2) + (y - exact.1).powi(2)).sqrt());
        }
        for w in errs.windows(2) {
            assert!(
                w[0] / w[1] >= 16.0 * 0.8,
                "order floor violated: ratio {}",
                w[0] / w[1]
            );
        }
    }
}
