//! The machine-readable classification of finite-dimensional Lie algebras of
//! planar vector fields (28 families) and the Hamiltonian data for the
//! twelve classes that admit a symplectic structure: bases, domains, modular
//! generators, parameters, symplectic forms, Hamiltonian functions, bracket
//! tables, algebra labels, and self-verification.
//!
//! The catalog ships as a versioned JSON resource with one canonical
//! instance per parameterized family; `get_with_params` rebuilds a family at
//! user-chosen parameters. Verification runs on instances, never on symbolic
//! parameters.

use crate::expr::{parse_rational, rational_string, EquivOptions, Expr, Guard};
use crate::liealg::{AlgebraError, LieAlgebra};
use crate::symplectic::{
    bracket_table, is_hamiltonian, no_go_witness, NoGoOutcome, SymplecticError, SymplecticForm,
};
use crate::vfield::VectorField;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::sync::OnceLock;

const CATALOG_JSON: &str = include_str!("classification.json");

#[derive(Clone, Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog id '{0}'")]
    UnknownId(String),
    #[error("parameter '{name}' out of range for {id}: {reason}")]
    ParameterOutOfRange {
        id: String,
        name: String,
        reason: String,
    },
    #[error("unknown parameter '{0}'")]
    UnknownParameter(String),
    #[error("malformed catalog data: {0}")]
    Malformed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
}

#[derive(Deserialize)]
struct RawCatalog {
    version: u32,
    entries: Vec<RawEntry>,
}

#[derive(Deserialize)]
struct RawEntry {
    id: String,
    family: String,
    algebra_label: String,
    expected_fingerprint: Option<String>,
    #[serde(default)]
    params: BTreeMap<String, String>,
    primitive: bool,
    #[serde(default)]
    domain: Vec<String>,
    basis: Vec<crate::vfield::VectorFieldJson>,
    generators: Vec<usize>,
    invariant_line: Option<crate::vfield::VectorFieldJson>,
    hamiltonian: Option<RawHamiltonian>,
}

#[derive(Deserialize)]
struct RawHamiltonian {
    omega: String,
    #[serde(default)]
    omega_family: Option<String>,
    functions: Vec<String>,
    brackets: Vec<RawBracket>,
    central_extension: bool,
    lie_hamilton_algebra: String,
}

#[derive(Deserialize)]
struct RawBracket {
    i: usize,
    j: usize,
    c: Vec<String>,
}

/// A fully instantiated classification entry.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub family: String,
    pub algebra_label: String,
    pub expected_fingerprint: Option<String>,
    pub params: BTreeMap<String, BigRational>,
    pub primitive: bool,
    pub domain: Vec<Guard>,
    pub algebra: LieAlgebra,
    pub invariant_line: Option<VectorField>,
    pub hamiltonian: Option<HamiltonianData>,
}

/// Stored Hamiltonian data for one of the twelve symplectic classes.
#[derive(Clone, Debug)]
pub struct HamiltonianData {
    pub omega: SymplecticForm,
    /// Freedom left by the class (e.g. an arbitrary nonvanishing f(y)).
    pub omega_family: Option<String>,
    pub functions: Vec<Expr>,
    /// Expected `{h_i, h_j}` coefficients over (h_1..h_n, 1) for i < j.
    pub brackets: Vec<(usize, usize, Vec<BigRational>)>,
    pub central_extension: bool,
    pub lie_hamilton_algebra: String,
}

impl CatalogEntry {
    /// Equivalence options honoring the entry's domain guards.
    pub fn equiv_options(&self) -> EquivOptions {
        let mut opts = self.algebra.equiv_options();
        opts.guards = crate::vfield::union_guards(&opts.guards, &self.domain);
        opts
    }
}

fn load() -> &'static Vec<RawEntry> {
    static CACHE: OnceLock<Vec<RawEntry>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let raw: RawCatalog = serde_json::from_str(CATALOG_JSON).expect("bundled catalog parses");
        assert_eq!(raw.version, 1);
        raw.entries
    })
}

fn instantiate(raw: &RawEntry) -> Result<CatalogEntry, CatalogError> {
    let basis: Vec<VectorField> = raw
        .basis
        .iter()
        .map(VectorField::from_json)
        .collect::<Result<_, _>>()
        .map_err(|e| CatalogError::Malformed(e.to_string()))?;
    let algebra = LieAlgebra::new(basis, raw.generators.clone())?.with_label(&raw.algebra_label);
    let domain: Vec<Guard> = raw
        .domain
        .iter()
        .map(|s| Guard::parse(s))
        .collect::<Result<_, _>>()
        .map_err(|e| CatalogError::Malformed(e.to_string()))?;
    let invariant_line = raw
        .invariant_line
        .as_ref()
        .map(VectorField::from_json)
        .transpose()
        .map_err(|e| CatalogError::Malformed(e.to_string()))?;
    let hamiltonian = raw
        .hamiltonian
        .as_ref()
        .map(|h| -> Result<HamiltonianData, CatalogError> {
            let omega = SymplecticForm::parse(&h.omega)?.with_guards(domain.clone());
            let functions = h
                .functions
                .iter()
                .map(|s| Expr::parse(s).map(|e| e.normalize()))
                .collect::<Result<_, _>>()
                .map_err(|e| CatalogError::Malformed(e.to_string()))?;
            let brackets = h
                .brackets
                .iter()
                .map(|b| {
                    let c = b
                        .c
                        .iter()
                        .map(|s| {
                            parse_rational(s)
                                .ok_or_else(|| CatalogError::Malformed(format!("bad rational {s}")))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((b.i, b.j, c))
                })
                .collect::<Result<_, CatalogError>>()?;
            Ok(HamiltonianData {
                omega,
                omega_family: h.omega_family.clone(),
                functions,
                brackets,
                central_extension: h.central_extension,
                lie_hamilton_algebra: h.lie_hamilton_algebra.clone(),
            })
        })
        .transpose()?;
    let params = raw
        .params
        .iter()
        .map(|(k, v)| {
            parse_rational(v)
                .map(|r| (k.clone(), r))
                .ok_or_else(|| CatalogError::Malformed(format!("bad parameter {v}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(CatalogEntry {
        id: raw.id.clone(),
        family: raw.family.clone(),
        algebra_label: raw.algebra_label.clone(),
        expected_fingerprint: raw.expected_fingerprint.clone(),
        params,
        primitive: raw.primitive,
        domain,
        algebra,
        invariant_line,
        hamiltonian,
    })
}

/// Fetch an entry at its shipped default parameters. `I14` resolves to the
/// `I14A` instance; `I14A`/`I14B` select explicitly.
pub fn get(id: &str) -> Result<CatalogEntry, CatalogError> {
    let key = if id == "I14" { "I14A" } else { id };
    let raw = load()
        .iter()
        .find(|e| e.id == key)
        .ok_or_else(|| CatalogError::UnknownId(id.to_string()))?;
    instantiate(raw)
}

/// Parameter overrides for the families that have them.
#[derive(Clone, Debug, Default)]
pub struct ParamOverrides {
    pub alpha: Option<BigRational>,
    pub r: Option<usize>,
    /// Function slots (xi for I12/I13, eta for I14/I15) as expressions in x,
    /// semicolon-separated on the command line.
    pub functions: Vec<Expr>,
}

impl ParamOverrides {
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<ParamOverrides, CatalogError> {
        let mut p = ParamOverrides::default();
        for (k, v) in pairs {
            match k.as_str() {
                "alpha" => {
                    p.alpha = Some(parse_rational(v).ok_or_else(|| {
                        CatalogError::Malformed(format!("bad rational '{v}' for alpha"))
                    })?)
                }
                "r" => {
                    p.r = Some(
                        v.parse()
                            .map_err(|_| CatalogError::Malformed(format!("bad integer '{v}' for r")))?,
                    )
                }
                "xi" | "eta" => {
                    for part in v.split(';') {
                        p.functions.push(Expr::parse(part).map_err(|e| {
                            CatalogError::Malformed(format!("bad function '{part}': {e}"))
                        })?);
                    }
                }
                other => return Err(CatalogError::UnknownParameter(other.to_string())),
            }
        }
        Ok(p)
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_none() && self.r.is_none() && self.functions.is_empty()
    }
}

/// Fetch an entry with parameter overrides; verification data (expected
/// fingerprints, Hamiltonian tables) stays attached only when the override
/// reproduces the shipped instance.
pub fn get_with_params(id: &str, over: &ParamOverrides) -> Result<CatalogEntry, CatalogError> {
    if over.is_empty() {
        return get(id);
    }
    let base = get(id)?;
    let family = base.family.clone();
    let (basis, generators) = family_basis(&family, over, &base)?;
    let algebra = LieAlgebra::new(basis, generators)?.with_label(&base.algebra_label);
    let mut params = base.params.clone();
    if let Some(a) = &over.alpha {
        params.insert("alpha".to_string(), a.clone());
    }
    if let Some(r) = over.r {
        params.insert("r".to_string(), BigRational::from_integer((r as i64).into()));
    }
    let same = algebra.basis.len() == base.algebra.basis.len()
        && algebra
            .basis
            .iter()
            .zip(&base.algebra.basis)
            .all(|(a, b)| a.x.normalize() == b.x.normalize() && a.y.normalize() == b.y.normalize());
    Ok(CatalogEntry {
        id: id.to_string(),
        family,
        algebra_label: base.algebra_label.clone(),
        expected_fingerprint: if same {
            base.expected_fingerprint.clone()
        } else {
            None
        },
        params,
        primitive: base.primitive,
        domain: base.domain.clone(),
        algebra,
        invariant_line: base.invariant_line.clone(),
        hamiltonian: if same { base.hamiltonian.clone() } else { None },
    })
}

/// Rebuild a family basis at given parameters, enforcing the stated ranges:
/// P1 needs alpha >= 0, I8 needs 0 < |alpha| <= 1, the function families
/// need r >= 1 with matching slot counts.
fn family_basis(
    family: &str,
    over: &ParamOverrides,
    _base: &CatalogEntry,
) -> Result<(Vec<VectorField>, Vec<usize>), CatalogError> {
    let vf = |x: &str, y: &str| VectorField::parse(x, y).expect("builder fields parse");
    let alpha = over.alpha.clone();
    let r = over.r;
    let range_err = |name: &str, reason: &str| CatalogError::ParameterOutOfRange {
        id: family.to_string(),
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let need_r = |r: Option<usize>| -> Result<usize, CatalogError> {
        let r = r.unwrap_or(1);
        if r < 1 {
            Err(range_err("r", "r >= 1 required"))
        } else {
            Ok(r)
        }
    };
    let xpow = |j: usize| {
        Expr::Power(
            Box::new(Expr::x()),
            BigRational::from_integer((j as i64).into()),
        )
        .normalize()
    };
    match family {
        "P1" => {
            let a = alpha.unwrap_or_else(BigRational::zero);
            if a.is_negative() {
                return Err(range_err("alpha", "alpha >= 0 required"));
            }
            // X3 = alpha(x dx + y dy) + y dx - x dy
            let x3 = VectorField::new(
                Expr::add(Expr::mul(Expr::Number(a.clone()), Expr::x()), Expr::y()).normalize(),
                Expr::sub(Expr::mul(Expr::Number(a), Expr::y()), Expr::x()).normalize(),
            );
            Ok((vec![vf("1", "0"), vf("0", "1"), x3], vec![0, 1]))
        }
        "I8" => {
            let a = alpha.ok_or_else(|| range_err("alpha", "alpha required"))?;
            if a.is_zero() || a.abs() > BigRational::from_integer(1.into()) {
                return Err(range_err("alpha", "0 < |alpha| <= 1 required"));
            }
            let x3 = VectorField::new(Expr::x(), Expr::mul(Expr::Number(a), Expr::y()).normalize());
            Ok((vec![vf("1", "0"), vf("0", "1"), x3], vec![0, 1]))
        }
        "I16" => {
            let a = alpha.unwrap_or_else(|| -BigRational::from_integer(1.into()));
            let r = need_r(r)?;
            let mut basis = vec![
                vf("1", "0"),
                vf("0", "1"),
                VectorField::new(Expr::x(), Expr::mul(Expr::Number(a), Expr::y()).normalize()),
            ];
            for j in 1..=r {
                basis.push(VectorField::new(Expr::zero(), xpow(j)));
            }
            Ok((basis, vec![0, 1]))
        }
        "I12" | "I13" => {
            let r = need_r(r)?;
            let xi = slot_functions(&over.functions, r, "x")?;
            let mut basis = vec![vf("0", "1")];
            if family == "I13" {
                basis.push(vf("0", "y"));
            }
            for f in xi {
                basis.push(VectorField::new(Expr::zero(), f));
            }
            Ok((basis, vec![0]))
        }
        "I14" => {
            let r = need_r(r)?;
            let eta = slot_functions(&over.functions, r, "exp(x)")?;
            let mut basis = vec![vf("1", "0")];
            for f in eta {
                basis.push(VectorField::new(Expr::zero(), f));
            }
            Ok((basis, vec![0, 1]))
        }
        "I15" => {
            let r = need_r(r)?;
            let eta = slot_functions(&over.functions, r, "exp(x)")?;
            let mut basis = vec![vf("1", "0"), vf("0", "y")];
            for f in eta {
                basis.push(VectorField::new(Expr::zero(), f));
            }
            Ok((basis, vec![0, 1]))
        }
        "I17" => {
            let r = need_r(r)?;
            // x dx + (r y + x^r) dy, then x dy .. x^(r-1) dy
            let x3 = VectorField::new(
                Expr::x(),
                Expr::add(Expr::mul(Expr::integer(r as i64), Expr::y()), xpow(r)).normalize(),
            );
            let mut basis = vec![vf("1", "0"), vf("0", "1"), x3];
            for j in 1..r {
                basis.push(VectorField::new(Expr::zero(), xpow(j)));
            }
            Ok((basis, vec![0, 1]))
        }
        "I18" => {
            let r = need_r(r)?;
            let mut basis = vec![
                vf("1", "0"),
                vf("0", "1"),
                vf("x", "0"),
                vf("0", "x"),
                vf("0", "y"),
            ];
            for j in 2..=r {
                basis.push(VectorField::new(Expr::zero(), xpow(j)));
            }
            Ok((basis, vec![0, 1]))
        }
        "I19" => {
            let r = need_r(r)?;
            let x4 = VectorField::new(
                Expr::parse("2*x").unwrap(),
                Expr::mul(Expr::integer(r as i64), Expr::y()).normalize(),
            );
            let x5 = VectorField::new(
                Expr::parse("x^2").unwrap(),
                Expr::mul(Expr::integer(r as i64), Expr::parse("x*y").unwrap()).normalize(),
            );
            let mut basis = vec![vf("1", "0"), vf("0", "1"), vf("0", "x"), x4, x5];
            for j in 2..=r {
                basis.push(VectorField::new(Expr::zero(), xpow(j)));
            }
            Ok((basis, vec![0, 1]))
        }
        "I20" => {
            let r = need_r(r)?;
            let x6 = VectorField::new(
                Expr::parse("x^2").unwrap(),
                Expr::mul(Expr::integer(r as i64), Expr::parse("x*y").unwrap()).normalize(),
            );
            let mut basis = vec![
                vf("1", "0"),
                vf("0", "1"),
                vf("x", "0"),
                vf("0", "x"),
                vf("0", "y"),
                x6,
            ];
            for j in 2..=r {
                basis.push(VectorField::new(Expr::zero(), xpow(j)));
            }
            Ok((basis, vec![0, 1]))
        }
        _ => Err(range_err("params", "family takes no parameters")),
    }
}

fn slot_functions(
    given: &[Expr],
    r: usize,
    default_first: &str,
) -> Result<Vec<Expr>, CatalogError> {
    if given.is_empty() {
        if r == 1 {
            return Ok(vec![Expr::parse(default_first).unwrap()]);
        }
        return Err(CatalogError::Malformed(format!(
            "r = {r} needs {r} slot functions (semicolon-separated)"
        )));
    }
    if given.len() != r {
        return Err(CatalogError::Malformed(format!(
            "expected {r} slot functions, got {}",
            given.len()
        )));
    }
    Ok(given.to_vec())
}

/// Filters for [`list`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ListFilter {
    pub hamiltonian_only: bool,
    pub primitive_only: bool,
    pub min_dim: Option<usize>,
    pub max_dim: Option<usize>,
}

/// Deterministic listing: P classes then I classes, ascending. Without the
/// Hamiltonian filter the 28 family ids are returned (I14 once); with it,
/// the twelve Hamiltonian instances (I14A and I14B separately).
pub fn list(filter: ListFilter) -> Vec<String> {
    let hamiltonian_ids = [
        "P1", "P2", "P3", "P5", "I1", "I4", "I5", "I8", "I12", "I14A", "I14B", "I16",
    ];
    let ids: Vec<String> = if filter.hamiltonian_only {
        hamiltonian_ids.iter().map(|s| s.to_string()).collect()
    } else {
        let mut v: Vec<String> = (1..=8).map(|i| format!("P{i}")).collect();
        v.extend((1..=20).map(|i| format!("I{i}")));
        v
    };
    let mut out = Vec::new();
    for id in ids {
        let Ok(entry) = get(&id) else { continue };
        if filter.primitive_only && !entry.primitive {
            continue;
        }
        let dim = entry.algebra.dim();
        if filter.min_dim.map(|m| dim < m).unwrap_or(false) {
            continue;
        }
        if filter.max_dim.map(|m| dim > m).unwrap_or(false) {
            continue;
        }
        out.push(id);
    }
    out
}

/// The excluded instances: family id plus the parameter choice that puts the
/// family on the obstruction side of the classification.
pub fn no_go_instances() -> Vec<(String, ParamOverrides)> {
    let with_alpha = |n: i64, d: i64| ParamOverrides {
        alpha: Some(BigRational::new(n.into(), d.into())),
        ..Default::default()
    };
    let mut out: Vec<(String, ParamOverrides)> = vec![("P1".into(), with_alpha(1, 1))];
    for id in ["P4", "P6", "P7", "P8", "I2", "I3", "I6", "I7"] {
        out.push((id.into(), ParamOverrides::default()));
    }
    out.push(("I8".into(), with_alpha(1, 2)));
    for id in ["I9", "I10", "I11", "I13", "I15"] {
        out.push((id.into(), ParamOverrides::default()));
    }
    out.push(("I16".into(), with_alpha(0, 1)));
    for id in ["I17", "I18", "I19", "I20"] {
        out.push((id.into(), ParamOverrides::default()));
    }
    out
}

/// Verification report for one entry: closure, Jacobi, fingerprint vs label,
/// Hamiltonian residuals and bracket-table match where applicable, no-go
/// witness otherwise; failures are report content, not errors.
#[derive(Clone, Debug)]
pub struct EntryReport {
    pub id: String,
    pub closed: bool,
    pub jacobi_exact: bool,
    pub fingerprint_name: String,
    pub fingerprint_matches: Option<bool>,
    pub hamiltonian_residuals_zero: Option<bool>,
    pub bracket_table_matches: Option<bool>,
    pub central_flag_matches: Option<bool>,
    pub no_go: Option<String>,
    pub invariant_line_holds: Option<bool>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl EntryReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "id": self.id,
            "closed": self.closed,
            "jacobi_exact": self.jacobi_exact,
            "fingerprint": self.fingerprint_name,
            "fingerprint_matches": self.fingerprint_matches,
            "hamiltonian_residuals_zero": self.hamiltonian_residuals_zero,
            "bracket_table_matches": self.bracket_table_matches,
            "central_flag_matches": self.central_flag_matches,
            "no_go": self.no_go,
            "invariant_line_holds": self.invariant_line_holds,
            "pass": self.pass,
            "notes": self.notes,
        })
    }
}

/// Run the cross-module invariant suite on one instantiated entry.
pub fn verify(entry: &CatalogEntry) -> EntryReport {
    let mut notes = Vec::new();
    let opts = entry.equiv_options();
    let (closed, jacobi_exact, fingerprint_name) = match entry.algebra.structure_constants() {
        Ok(sc) => {
            let jac = sc.jacobi_residual().is_zero();
            let fp = sc.fingerprint();
            (true, jac, fp.name.to_string())
        }
        Err(e) => {
            notes.push(format!("closure failed: {e}"));
            (false, false, "unrecognized".to_string())
        }
    };
    let fingerprint_matches = entry
        .expected_fingerprint
        .as_ref()
        .map(|want| want == &fingerprint_name);

    let mut hamiltonian_residuals_zero = None;
    let mut bracket_table_matches = None;
    let mut central_flag_matches = None;
    let mut no_go = None;

    if let Some(h) = &entry.hamiltonian {
        let mut all_zero = true;
        for f in &entry.algebra.basis {
            match is_hamiltonian(f, &h.omega, &opts) {
                Ok(check) => {
                    if !check.residual.is_zero() {
                        all_zero = false;
                        notes.push(format!("nonzero residual: {}", check.residual));
                    }
                }
                Err(e) => {
                    all_zero = false;
                    notes.push(format!("residual check failed: {e}"));
                }
            }
        }
        hamiltonian_residuals_zero = Some(all_zero);
        match bracket_table(&h.functions, &h.omega, &opts) {
            Ok(table) => {
                let n = h.functions.len();
                let mut matches = true;
                for (i, j, want) in &h.brackets {
                    if table.coeffs[*i][*j] != *want {
                        matches = false;
                        notes.push(format!(
                            "bracket ({i},{j}) mismatch: got [{}] want [{}]",
                            table.coeffs[*i][*j]
                                .iter()
                                .map(rational_string)
                                .collect::<Vec<_>>()
                                .join(", "),
                            want.iter()
                                .map(rational_string)
                                .collect::<Vec<_>>()
                                .join(", "),
                        ));
                    }
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        if !h.brackets.iter().any(|(a, b, _)| *a == i && *b == j)
                            && table.coeffs[i][j].iter().any(|v| !v.is_zero())
                        {
                            matches = false;
                            notes.push(format!("bracket ({i},{j}) expected zero"));
                        }
                    }
                }
                bracket_table_matches = Some(matches);
                central_flag_matches = Some(table.central_flag == h.central_extension);
                if table.name.to_string() != h.lie_hamilton_algebra {
                    notes.push(format!(
                        "lie-hamilton algebra named {} (stored {})",
                        table.name, h.lie_hamilton_algebra
                    ));
                }
            }
            Err(e) => {
                bracket_table_matches = Some(false);
                notes.push(format!("bracket table failed: {e}"));
            }
        }
    } else {
        match no_go_witness(&entry.algebra) {
            Ok(NoGoOutcome::DivergenceWitness { index, divergence }) => {
                no_go = Some(format!("X{} has divergence {}", index + 1, divergence));
            }
            Ok(NoGoOutcome::ModularWitness { index, lhs, rhs }) => {
                no_go = Some(format!(
                    "modular divergence fails on X{}: div = {} vs sum = {}",
                    index + 1,
                    lhs,
                    rhs
                ));
            }
            Ok(NoGoOutcome::Inconclusive) => {
                notes.push("no-go analysis inconclusive".to_string());
            }
            Err(e) => notes.push(format!("no-go analysis failed: {e}")),
        }
    }

    let invariant_line_holds = entry.invariant_line.as_ref().map(|y| {
        entry
            .algebra
            .invariant_distribution(y)
            .map(|m| m.is_some())
            .unwrap_or(false)
    });

    let pass = closed
        && jacobi_exact
        && fingerprint_matches.unwrap_or(true)
        && hamiltonian_residuals_zero.unwrap_or(true)
        && bracket_table_matches.unwrap_or(true)
        && central_flag_matches.unwrap_or(true)
        && (entry.hamiltonian.is_some() || no_go.is_some())
        && invariant_line_holds.unwrap_or(true);

    EntryReport {
        id: entry.id.clone(),
        closed,
        jacobi_exact,
        fingerprint_name,
        fingerprint_matches,
        hamiltonian_residuals_zero,
        bracket_table_matches,
        central_flag_matches,
        no_go,
        invariant_line_holds,
        pass,
        notes,
    }
}

/// Human-readable one-entry rendering in the row format of the tables.
pub fn render(entry: &CatalogEntry) -> String {
    let mut out = String::new();
    let params = if entry.params.is_empty() {
        String::new()
    } else {
        let ps: Vec<String> = entry
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", rational_string(v)))
            .collect();
        format!(" [{}]", ps.join(", "))
    };
    out.push_str(&format!(
        "{}{}  {}  ({})\n",
        entry.id,
        params,
        entry.algebra_label,
        if entry.primitive {
            "primitive"
        } else {
            "imprimitive"
        }
    ));
    let domain = if entry.domain.is_empty() {
        "R^2".to_string()
    } else {
        entry
            .domain
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    out.push_str(&format!("  domain: {domain}\n"));
    for (i, f) in entry.algebra.basis.iter().enumerate() {
        let gen = if entry.algebra.generators.contains(&i) {
            "*"
        } else {
            " "
        };
        out.push_str(&format!("  X{}{}  ({}; {})\n", i + 1, gen, f.x, f.y));
    }
    if let Some(h) = &entry.hamiltonian {
        out.push_str(&format!("  omega: {}\n", h.omega.f));
        if let Some(fam) = &h.omega_family {
            out.push_str(&format!("  omega family: {fam}\n"));
        }
        for (i, f) in h.functions.iter().enumerate() {
            out.push_str(&format!("  h{}: {}\n", i + 1, f));
        }
        out.push_str(&format!(
            "  lie-hamilton algebra: {}  (central extension: {})\n",
            h.lie_hamilton_algebra, h.central_extension
        ));
    } else {
        out.push_str("  not a Lie algebra of Hamiltonian vector fields\n");
    }
    out
}

/// Every expression string used by the catalog (for round-trip coverage).
pub fn expression_corpus() -> Vec<String> {
    let mut out = Vec::new();
    for raw in load() {
        for f in &raw.basis {
            out.push(f.x.clone());
            out.push(f.y.clone());
        }
        if let Some(h) = &raw.hamiltonian {
            out.push(h.omega.clone());
            out.extend(h.functions.iter().cloned());
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Ids of every shipped instance (28 families with I14 split into A/B).
pub fn all_instances() -> Vec<String> {
    load().iter().map(|e| e.id.clone()).collect()
}

/// The individually stated inclusion facts between classes. The full
/// inclusion diagram is not machine-encoded; only these prose-level facts
/// are recorded.
pub fn inclusion_notes() -> &'static [&'static str] {
    &[
        "P6 embeds as a subalgebra of P8",
        "I3, I4 and I5 realize the same abstract algebra sl(2) without being locally diffeomorphic; likewise I6 and I7 for gl(2)",
        "I14 at r = 1 splits by the function slot: eta_1 = 1 gives R^2, eta_1 = exp(x) gives h2",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_and_counts() {
        assert_eq!(all_instances().len(), 29); // 28 families, I14 split A/B
        assert_eq!(list(ListFilter::default()).len(), 28);
        let ham = list(ListFilter {
            hamiltonian_only: true,
            ..Default::default()
        });
        assert_eq!(ham.len(), 12);
        assert_eq!(
            ham,
            vec!["P1", "P2", "P3", "P5", "I1", "I4", "I5", "I8", "I12", "I14A", "I14B", "I16"]
        );
        let prim_ham = list(ListFilter {
            hamiltonian_only: true,
            primitive_only: true,
            ..Default::default()
        });
        assert_eq!(prim_ham, vec!["P1", "P2", "P3", "P5"]);
    }

    #[test]
    fn p2_entry_shape() {
        let e = get("P2").unwrap();
        assert_eq!(e.algebra.dim(), 3);
        assert_eq!(e.domain[0].to_string(), "y != 0");
        let h = e.hamiltonian.as_ref().unwrap();
        assert_eq!(h.omega.f.to_string(), "1/y^2");
    }

    #[test]
    fn i16_instance_has_extension_flag() {
        let e = get("I16").unwrap();
        let h = e.hamiltonian.as_ref().unwrap();
        assert!(h.central_extension);
        assert_eq!(h.functions.len(), 4);
    }

    #[test]
    fn unknown_id_and_bad_params() {
        assert!(matches!(get("P9"), Err(CatalogError::UnknownId(_))));
        let bad = ParamOverrides {
            alpha: Some(BigRational::from_integer((-1).into())),
            ..Default::default()
        };
        assert!(matches!(
            get_with_params("P1", &bad),
            Err(CatalogError::ParameterOutOfRange { .. })
        ));
        let bad = ParamOverrides {
            alpha: Some(BigRational::zero()),
            ..Default::default()
        };
        assert!(matches!(
            get_with_params("I8", &bad),
            Err(CatalogError::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn builders_match_shipped_defaults() {
        let cases: Vec<(&str, ParamOverrides)> = vec![
            (
                "P1",
                ParamOverrides {
                    alpha: Some(BigRational::zero()),
                    ..Default::default()
                },
            ),
            (
                "I8",
                ParamOverrides {
                    alpha: Some(BigRational::from_integer((-1).into())),
                    ..Default::default()
                },
            ),
            (
                "I16",
                ParamOverrides {
                    alpha: Some(BigRational::from_integer((-1).into())),
                    r: Some(1),
                    ..Default::default()
                },
            ),
            (
                "I12",
                ParamOverrides {
                    r: Some(1),
                    functions: vec![Expr::parse("x").unwrap()],
                    ..Default::default()
                },
            ),
            (
                "I14A",
                ParamOverrides {
                    r: Some(1),
                    functions: vec![Expr::parse("exp(x)").unwrap()],
                    ..Default::default()
                },
            ),
            (
                "I14B",
                ParamOverrides {
                    r: Some(2),
                    functions: vec![Expr::parse("1").unwrap(), Expr::parse("exp(x)").unwrap()],
                    ..Default::default()
                },
            ),
            (
                "I17",
                ParamOverrides {
                    r: Some(1),
                    ..Default::default()
                },
            ),
            (
                "I19",
                ParamOverrides {
                    r: Some(1),
                    ..Default::default()
                },
            ),
            (
                "I20",
                ParamOverrides {
                    r: Some(1),
                    ..Default::default()
                },
            ),
        ];
        for (id, over) in cases {
            let built = get_with_params(id, &over).unwrap();
            let stored = get(id).unwrap();
            assert_eq!(
                built.algebra.basis.len(),
                stored.algebra.basis.len(),
                "{id} dim"
            );
            for (a, b) in built.algebra.basis.iter().zip(&stored.algebra.basis) {
                assert_eq!(a.x.normalize(), b.x.normalize(), "{id} x components");
                assert_eq!(a.y.normalize(), b.y.normalize(), "{id} y components");
            }
            assert!(built.hamiltonian.is_some() == stored.hamiltonian.is_some());
        }
    }

    #[test]
    fn i17_r2_closes() {
        let e = get_with_params(
            "I17",
            &ParamOverrides {
                r: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(e.algebra.dim(), 4);
        let sc = e.algebra.structure_constants().unwrap();
        assert!(sc.jacobi_residual().is_zero());
    }

    #[test]
    fn verify_i1_trivially() {
        let report = verify(&get("I1").unwrap());
        assert!(report.pass, "{:?}", report.notes);
    }

    #[test]
    fn verify_i9_finds_no_go() {
        let report = verify(&get("I9").unwrap());
        assert!(report.pass, "{:?}", report.notes);
        assert!(report.no_go.is_some());
    }

    #[test]
    fn verify_p5_full() {
        let report = verify(&get("P5").unwrap());
        assert!(report.pass, "{:?}", report.notes);
        assert_eq!(report.fingerprint_name, "sl(2) ltimes R^2");
    }
}
