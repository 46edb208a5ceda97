//! Command implementations. Each returns its exit code; reports go to
//! stdout or the requested file.

use crate::report;
use crate::{EXIT_ABORT, EXIT_INCONCLUSIVE, EXIT_NOT_RELATED, EXIT_OBSTRUCTION, EXIT_OK, EXIT_USAGE};
use lieplane::catalog;
use lieplane::dynamics::{
    self, conservation_residual, section7::MapParams, section7_map, systems, transport_compare,
    MapKind, StepperOptions, Termination,
};
use lieplane::expr::{parse_rational, EquivOptions, Expr};
use lieplane::liealg::{lie_closure, LieAlgebra};
use lieplane::symplectic::{
    bracket_table, find_integrating_factor, hamiltonian_function, is_hamiltonian, no_go_witness,
    NoGoOutcome,
};
use lieplane::vfield::{PlanarMap, VectorField};
use num_rational::BigRational;
use serde_json::json;
use std::path::Path;

pub struct Context {
    pub no_timestamp: bool,
    pub seed: Option<u64>,
}

impl Context {
    fn equiv_options(&self) -> EquivOptions {
        let mut opts = EquivOptions::default();
        if let Some(s) = self.seed {
            opts.seed = s;
        }
        opts
    }
}

/// Merge `key=value` lines from a config file as defaults: config pairs are
/// inserted before user flags so explicitly passed flags win.
pub fn merge_config(args: &mut Vec<String>, path: &str) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("config {path}: {e}"))?;
    let mut injected = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line '{line}' is not key=value"))?;
        let key = key.trim();
        let value = value.trim();
        let flag = format!("--{key}");
        // repeatable flags (param/coeff/fields) always inject; single-valued
        // flags only when absent
        let repeatable = matches!(key, "param" | "coeff" | "fields");
        let present = args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if repeatable || !present {
            injected.push(flag);
            injected.push(value.to_string());
        }
    }
    // insert after the subcommand tokens, i.e. append; clap accepts trailing
    // global/option flags
    args.extend(injected);
    Ok(())
}

fn parse_pairs(raw: &[String]) -> Result<Vec<(String, String)>, String> {
    raw.iter()
        .map(|s| {
            s.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| format!("'{s}' is not KEY=VALUE"))
        })
        .collect()
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("'{s}' is not X,Y"))?;
    let x: f64 = a.trim().parse().map_err(|_| format!("bad number '{a}'"))?;
    let y: f64 = b.trim().parse().map_err(|_| format!("bad number '{b}'"))?;
    Ok((x, y))
}

fn usage(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

pub fn catalog_list(
    ctx: &Context,
    hamiltonian_only: bool,
    primitive_only: bool,
    min_dim: Option<usize>,
    max_dim: Option<usize>,
    json_out: bool,
) -> u8 {
    let ids = catalog::list(catalog::ListFilter {
        hamiltonian_only,
        primitive_only,
        min_dim,
        max_dim,
    });
    if json_out {
        let body = json!({
            "ids": ids,
            "count": ids.len(),
            "inclusion_notes": catalog::inclusion_notes(),
        });
        let config = json!({
            "hamiltonian_only": hamiltonian_only,
            "primitive_only": primitive_only,
            "min_dim": min_dim,
            "max_dim": max_dim,
        });
        let rep = report::envelope("catalog list", config, body, ctx.no_timestamp);
        let _ = report::emit(&rep, None);
    } else {
        for id in &ids {
            println!("{id}");
        }
    }
    EXIT_OK
}

pub fn catalog_show(
    ctx: &Context,
    id: &str,
    params: &[String],
    json_out: bool,
    verify: bool,
) -> u8 {
    let pairs = match parse_pairs(params) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let over = match catalog::ParamOverrides::from_pairs(&pairs) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    let entry = match catalog::get_with_params(id, &over) {
        Ok(e) => e,
        Err(e) => return usage(e),
    };
    let report_body = if verify {
        Some(catalog::verify(&entry))
    } else {
        None
    };
    if json_out {
        let mut body = json!({
            "id": entry.id,
            "family": entry.family,
            "algebra": entry.algebra_label,
            "primitive": entry.primitive,
            "domain": entry.domain.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "basis": entry.algebra.basis.iter().map(|f| {
                json!({"x": f.x.to_string(), "y": f.y.to_string()})
            }).collect::<Vec<_>>(),
            "generators": entry.algebra.generators,
        });
        if let Some(h) = &entry.hamiltonian {
            body["hamiltonian"] = json!({
                "omega": h.omega.f.to_string(),
                "functions": h.functions.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "central_extension": h.central_extension,
                "lie_hamilton_algebra": h.lie_hamilton_algebra,
            });
        }
        if let Some(r) = &report_body {
            body["verification"] = r.to_json();
        }
        let config = json!({ "id": id, "params": params, "verify": verify });
        let rep = report::envelope("catalog show", config, body, ctx.no_timestamp);
        let _ = report::emit(&rep, None);
    } else {
        print!("{}", catalog::render(&entry));
        if let Some(r) = &report_body {
            println!(
                "  verification: {}",
                if r.pass { "pass" } else { "FAIL" }
            );
            for n in &r.notes {
                println!("    note: {n}");
            }
        }
    }
    if report_body.map(|r| !r.pass).unwrap_or(false) {
        return EXIT_INCONCLUSIVE;
    }
    EXIT_OK
}

/// Default integrating-factor vocabulary; user factors are appended.
fn default_ansatz() -> Vec<Expr> {
    [
        "x",
        "y",
        "x - y",
        "x + y",
        "1 + x^2 + y^2",
        "exp(x)",
        "exp(y)",
    ]
    .iter()
    .map(|s| Expr::parse(s).unwrap())
    .collect()
}

/// Pick modular generators when the user gave none: the shortest prefix of
/// one or two fields through which the remaining basis solves over the
/// function field.
fn default_generators(fields: &[VectorField]) -> Vec<usize> {
    if fields.len() <= 1 {
        return vec![0];
    }
    for gens in [vec![0], vec![0, 1]] {
        let algebra = LieAlgebra {
            basis: fields.to_vec(),
            generators: gens.clone(),
            label: None,
        };
        if matches!(
            algebra.modular_divergence_check(),
            Ok(lieplane::liealg::ModularCheck::Pass)
                | Ok(lieplane::liealg::ModularCheck::Counterexample { .. })
        ) {
            return gens;
        }
    }
    vec![0, 1]
}

#[allow(clippy::too_many_arguments)]
pub fn verify(
    ctx: &Context,
    fields: &[String],
    generators: Option<&str>,
    ansatz: Option<&str>,
    base: &str,
    json_path: Option<&Path>,
) -> u8 {
    // parse fields
    let mut parsed = Vec::new();
    for f in fields {
        let Some((fx, fy)) = f.split_once(';') else {
            return usage(format!("field '{f}' is not 'xexpr;yexpr'"));
        };
        match VectorField::parse(fx, fy) {
            Ok(v) => parsed.push(v),
            Err(e) => return usage(e),
        }
    }
    let base_pt = match parse_point(base) {
        Ok((a, b)) => (
            lieplane::expr::rational_from_f64(a).unwrap(),
            lieplane::expr::rational_from_f64(b).unwrap(),
        ),
        Err(e) => return usage(e),
    };
    let opts = ctx.equiv_options();
    let config = json!({
        "fields": fields,
        "generators": generators,
        "ansatz": ansatz,
        "base": base,
        "seed": opts.seed,
    });

    // closure
    let closure = match lie_closure(&parsed, 12) {
        Ok(a) => a,
        Err(e) => {
            let body = json!({ "stage": "closure", "error": e.to_string() });
            let rep = report::envelope("verify", config, body, ctx.no_timestamp);
            let _ = report::emit(&rep, json_path);
            return EXIT_INCONCLUSIVE;
        }
    };
    let gens: Vec<usize> = match generators {
        Some(g) => match g
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
        {
            Ok(v) if v.iter().all(|&i| i < closure.dim()) => v,
            _ => return usage("bad --generators"),
        },
        None => default_generators(&closure.basis),
    };
    let algebra = LieAlgebra {
        basis: closure.basis.clone(),
        generators: gens.clone(),
        label: None,
    };
    let sc = algebra.structure_constants();
    let fingerprint = sc.as_ref().ok().map(|sc| sc.fingerprint());

    let mut body = json!({
        "closure_dimension": algebra.dim(),
        "closed": sc.is_ok(),
        "generators": gens,
    });
    if let Some(fp) = &fingerprint {
        body["fingerprint"] = serde_json::to_value(fp).unwrap_or_default();
        body["algebra_name"] = json!(fp.name.to_string());
    }

    // obstruction
    match no_go_witness(&algebra) {
        Ok(NoGoOutcome::DivergenceWitness { index, divergence }) => {
            body["obstruction"] = json!({
                "kind": "divergence-witness",
                "field_index": index,
                "divergence": divergence.to_string(),
            });
            let rep = report::envelope("verify", config, body, ctx.no_timestamp);
            let _ = report::emit(&rep, json_path);
            return EXIT_OBSTRUCTION;
        }
        Ok(NoGoOutcome::ModularWitness { index, lhs, rhs }) => {
            body["obstruction"] = json!({
                "kind": "modular-divergence-failure",
                "field_index": index,
                "divergence": lhs,
                "generator_combination": rhs,
            });
            let rep = report::envelope("verify", config, body, ctx.no_timestamp);
            let _ = report::emit(&rep, json_path);
            return EXIT_OBSTRUCTION;
        }
        Ok(NoGoOutcome::Inconclusive) => {}
        Err(e) => {
            body["obstruction_error"] = json!(e.to_string());
        }
    }

    // integrating factor search over the generators
    let mut vocab = default_ansatz();
    if let Some(extra) = ansatz {
        for part in extra.split(',') {
            match Expr::parse(part.trim()) {
                Ok(e) => vocab.push(e),
                Err(e) => return usage(e),
            }
        }
    }
    let gen_fields: Vec<VectorField> =
        gens.iter().map(|&i| algebra.basis[i].clone()).collect();
    let factor = match find_integrating_factor(&gen_fields, &vocab, &opts) {
        Ok(f) => f,
        Err(e) => {
            body["factor_error"] = json!(e.to_string());
            let rep = report::envelope("verify", config, body, ctx.no_timestamp);
            let _ = report::emit(&rep, json_path);
            return EXIT_INCONCLUSIVE;
        }
    };
    let Some(solution) = factor else {
        body["integrating_factor"] = json!(null);
        body["conclusion"] =
            json!("no factor in the ansatz vocabulary; Hamiltonian-ness undecided");
        let rep = report::envelope("verify", config, body, ctx.no_timestamp);
        let _ = report::emit(&rep, json_path);
        return EXIT_INCONCLUSIVE;
    };
    let omega = solution.form.clone();
    body["integrating_factor"] = json!({
        "omega": omega.f.to_string(),
        "exponents": solution
            .exponents
            .iter()
            .map(lieplane::expr::rational_string)
            .collect::<Vec<_>>(),
        "homogeneous_dimension": solution.homogeneous_dim,
        "unique_up_to_constant": solution.homogeneous_dim == 0,
    });

    // residuals for the whole basis
    let mut residuals = Vec::new();
    let mut all_ok = true;
    for f in &algebra.basis {
        match is_hamiltonian(f, &omega, &opts) {
            Ok(check) => {
                all_ok &= check.verdict.is_equal();
                residuals.push(json!({
                    "residual": check.residual.to_string(),
                    "zero": check.verdict.is_equal(),
                }));
            }
            Err(e) => {
                all_ok = false;
                residuals.push(json!({ "error": e.to_string() }));
            }
        }
    }
    body["residuals"] = json!(residuals);
    if !all_ok {
        let rep = report::envelope("verify", config, body, ctx.no_timestamp);
        let _ = report::emit(&rep, json_path);
        return EXIT_INCONCLUSIVE;
    }

    // Hamiltonian functions and bracket table
    let mut hs = Vec::new();
    for f in &algebra.basis {
        match hamiltonian_function(f, &omega, (base_pt.0.clone(), base_pt.1.clone())) {
            Ok(h) => hs.push(h),
            Err(e) => {
                body["hamiltonian_error"] = json!(e.to_string());
                let rep = report::envelope("verify", config, body, ctx.no_timestamp);
                let _ = report::emit(&rep, json_path);
                return EXIT_INCONCLUSIVE;
            }
        }
    }
    body["hamiltonian_functions"] = json!(hs.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    match bracket_table(&hs, &omega, &opts) {
        Ok(table) => {
            body["bracket_table"] = table.to_json();
        }
        Err(e) => {
            body["bracket_table_error"] = json!(e.to_string());
            let rep = report::envelope("verify", config, body, ctx.no_timestamp);
            let _ = report::emit(&rep, json_path);
            return EXIT_INCONCLUSIVE;
        }
    }
    body["conclusion"] = json!("Hamiltonian structure found");
    let rep = report::envelope("verify", config, body, ctx.no_timestamp);
    let _ = report::emit(&rep, json_path);
    EXIT_OK
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    ctx: &Context,
    system: &str,
    params: &[String],
    coeffs: &[String],
    x0: &str,
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
    max_step: Option<f64>,
    samples: usize,
    precision: usize,
    csv_path: Option<&Path>,
    json_path: Option<&Path>,
) -> u8 {
    let params = match parse_pairs(params) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let coeffs = match parse_pairs(coeffs) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let x0 = match parse_point(x0) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    if t0 == t1 {
        return usage("t1 must differ from t0");
    }
    let sys = match systems::by_name(system, &params, &coeffs) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let opts = StepperOptions {
        rtol,
        atol,
        max_step: max_step.unwrap_or((t1 - t0).abs() / 10.0),
        ..Default::default()
    };
    let config = json!({
        "system": system,
        "params": params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
        "coefficients": coeffs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
        "x0": [x0.0, x0.1],
        "t0": t0,
        "t1": t1,
        "rtol": rtol,
        "atol": atol,
        "max_step": opts.max_step,
        "samples": samples,
        "precision": precision,
        "seed": ctx.equiv_options().seed,
    });
    let traj = match sys.integrate(x0, t0, t1, &opts, samples.max(2)) {
        Ok(t) => t,
        Err(e) => {
            let body = json!({ "error": e.to_string() });
            let rep = report::envelope("simulate", config, body, ctx.no_timestamp);
            let _ = report::emit(&rep, json_path);
            return EXIT_ABORT;
        }
    };
    let aborted = !matches!(traj.termination, Termination::ReachedEnd);
    let mut body = json!({
        "termination": format!("{:?}", traj.termination),
        "steps": traj.steps,
        "rejected_steps": traj.rejected,
        "max_error_estimate": traj.max_error_estimate,
        "end_state": traj.last(),
        "samples": traj.samples,
    });
    if sys.structure.is_some() && traj.samples.len() >= 3 {
        if let Ok(rep) = conservation_residual(&sys, &traj) {
            body["conservation"] = json!({
                "max_residual": rep.max_residual,
                "drift": rep.drift,
                "structure": sys.structure.as_ref().map(|s| json!({
                    "label": s.label,
                    "omega": s.omega.f.to_string(),
                    "functions": s.functions.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                })),
            });
        }
    }
    if let Some(p) = csv_path {
        let csv = dynamics::trajectory_csv(&sys, &traj, precision);
        if let Err(e) = std::fs::write(p, csv) {
            return usage(format!("writing {}: {e}", p.display()));
        }
        body["csv"] = json!(p.display().to_string());
    }
    let rep = report::envelope("simulate", config, body, ctx.no_timestamp);
    let _ = report::emit(&rep, json_path);
    if aborted {
        EXIT_ABORT
    } else {
        EXIT_OK
    }
}

#[allow(clippy::too_many_arguments)]
pub fn transport(
    ctx: &Context,
    from: &str,
    to: &str,
    params: &[String],
    coeffs: &[String],
    x0: &str,
    t0: f64,
    t1: f64,
    rtol: f64,
    tol: f64,
    samples: usize,
    json_path: Option<&Path>,
) -> u8 {
    let params = match parse_pairs(params) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let coeffs = match parse_pairs(coeffs) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let x0 = match parse_point(x0) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let get = |key: &str, dflt: &str| -> String {
        params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| dflt.to_string())
    };
    let rational = |s: &str| -> Option<BigRational> { parse_rational(s) };

    // build source, target, map
    let norm = |n: &str| -> String {
        match n {
            "mp" => "milne-pinney".to_string(),
            "ks" => "kummer-schwarz".to_string(),
            other => other.to_string(),
        }
    };
    let (source, target, map): (dynamics::System, dynamics::System, PlanarMap) =
        match (norm(from).as_str(), norm(to).as_str()) {
            (a, b) if a == b => {
                let sys = match systems::by_name(a, &params, &coeffs) {
                    Ok(s) => s,
                    Err(e) => return usage(e),
                };
                (sys.clone(), sys, PlanarMap::identity())
            }
            ("kummer-schwarz", "milne-pinney") => {
                let c_ks = match rational(&get("c", "-1")) {
                    Some(c) => c,
                    None => return usage("bad c"),
                };
                let c_mp = match rational(&get("target-c", "-1/4")) {
                    Some(c) => c,
                    None => return usage("bad target-c"),
                };
                let l_ks = match rational(&get("lambda", "1/2")) {
                    Some(l) => l,
                    None => return usage("bad lambda"),
                };
                let l_mp = match rational(&get("target-lambda", "1")) {
                    Some(l) => l,
                    None => return usage("bad target-lambda"),
                };
                let b1 = coeffs
                    .iter()
                    .find(|(k, _)| k == "b1")
                    .map(|(_, v)| v.clone())
                    .unwrap_or_else(|| "0".to_string());
                let b1 = match Expr::parse(&b1) {
                    Ok(e) => e,
                    Err(e) => return usage(e),
                };
                let src = match systems::kummer_schwarz(c_ks.clone(), b1.clone()) {
                    Ok(s) => s,
                    Err(e) => return usage(e),
                };
                let tgt = match systems::milne_pinney(c_mp.clone(), b1) {
                    Ok(s) => s,
                    Err(e) => return usage(e),
                };
                let map = match section7_map(
                    MapKind::KsToMp,
                    &MapParams {
                        c: c_ks,
                        lambda: l_ks,
                        target_c: Some(c_mp),
                        target_lambda: Some(l_mp),
                    },
                ) {
                    Ok(m) => m,
                    Err(e) => return usage(e),
                };
                (src, tgt, map)
            }
            ("riccati", "milne-pinney") => {
                let c = match rational(&get("c", "1")) {
                    Some(c) => c,
                    None => return usage("bad c"),
                };
                let lambda = match rational(&get("lambda", "1")) {
                    Some(l) => l,
                    None => return usage("bad lambda"),
                };
                let cexpr = |key: &str, dflt: &str| -> Result<Expr, u8> {
                    let raw = coeffs
                        .iter()
                        .find(|(k, _)| k == key)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(|| dflt.to_string());
                    Expr::parse(&raw).map_err(|e| usage(e))
                };
                let a0 = match cexpr("a0", "1") {
                    Ok(e) => e,
                    Err(code) => return code,
                };
                let a1 = match cexpr("a1", "0") {
                    Ok(e) => e,
                    Err(code) => return code,
                };
                let a2 = match cexpr("a2", "0") {
                    Ok(e) => e,
                    Err(code) => return code,
                };
                let src = match systems::riccati_planar(a0.clone(), a1.clone(), a2.clone()) {
                    Ok(s) => s,
                    Err(e) => return usage(e),
                };
                // target: the same coefficients against the Milne-Pinney basis
                let mp = match systems::milne_pinney(c.clone(), Expr::one()) {
                    Ok(s) => s,
                    Err(e) => return usage(e),
                };
                let tgt = match dynamics::System::new("milne-pinney-target", mp.basis.clone(), vec![a0, a1, a2]) {
                    Ok(s) => s.with_guards(mp.guards.clone()),
                    Err(e) => return usage(e),
                };
                let map = match section7_map(MapKind::RiccatiToMp, &MapParams::new(c, lambda)) {
                    Ok(m) => m,
                    Err(e) => return usage(e),
                };
                (src, tgt, map)
            }
            (a, b) => return usage(format!("no shipped map from '{a}' to '{b}'")),
        };
    let opts = StepperOptions {
        rtol,
        atol: 1e-12,
        ..Default::default()
    };
    let config = json!({
        "from": from,
        "to": to,
        "params": params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
        "coefficients": coeffs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>(),
        "x0": [x0.0, x0.1],
        "t0": t0,
        "t1": t1,
        "rtol": rtol,
        "tol": tol,
        "samples": samples,
        "map": { "u": map.u.to_string(), "v": map.v.to_string() },
        "seed": ctx.equiv_options().seed,
    });
    match transport_compare(&source, &map, &target, x0, t0, t1, &opts, samples) {
        Ok(rep) => {
            let pass = rep.max_deviation < tol;
            let body = json!({
                "max_deviation": rep.max_deviation,
                "common_t_end": rep.common_t_end,
                "compared_samples": rep.compared_samples,
                "source_termination": format!("{:?}", rep.source.termination),
                "target_termination": format!("{:?}", rep.target.termination),
                "pass": pass,
            });
            let envelope = report::envelope("transport", config, body, ctx.no_timestamp);
            let _ = report::emit(&envelope, json_path);
            if pass {
                EXIT_OK
            } else {
                EXIT_ABORT
            }
        }
        Err(dynamics::DynamicsError::NotRelated(i)) => {
            let body = json!({ "error": format!("basis field {i} is not related by the map") });
            let envelope = report::envelope("transport", config, body, ctx.no_timestamp);
            let _ = report::emit(&envelope, json_path);
            EXIT_NOT_RELATED
        }
        Err(e) => {
            let body = json!({ "error": e.to_string() });
            let envelope = report::envelope("transport", config, body, ctx.no_timestamp);
            let _ = report::emit(&envelope, json_path);
            EXIT_ABORT
        }
    }
}
