//! Abstract invariants of a structure-constant tensor (derived and lower
//! central series, center, Killing signature) and a name lookup covering the
//! algebras that occur in the planar classification, plus R^n. Anything else
//! reports as unrecognized with its raw invariants.

use super::StructureConstants;
use crate::linalg;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fingerprint {
    pub dim: usize,
    pub derived_series: Vec<usize>,
    pub lower_central_series: Vec<usize>,
    pub center_dim: usize,
    /// (n_plus, n_minus, n_zero) of the Killing form, zero threshold 1e-9.
    pub killing_signature: (usize, usize, usize),
    pub abelian: bool,
    pub nilpotent: bool,
    pub solvable: bool,
    pub semisimple: bool,
    pub name: AlgebraName,
}

/// Canonical names for the algebras of the classification namespace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum AlgebraName {
    Rn(usize),
    H2,
    Sl2,
    So3,
    Iso2,
    Iso11,
    /// R ⋉ R² with rotational part α(x∂x+y∂y) + rotation; `alpha >= 0`.
    AAlpha(f64),
    /// R ⋉ R² with real distinct eigenvalue ratio `alpha`, |alpha| <= 1.
    BAlpha(f64),
    /// R ⋉ R² with a Jordan block action.
    R2Jordan,
    H2PlusR,
    Gl2,
    H2PlusH2,
    Sl2PlusH2,
    Sl2PlusSl2,
    So31,
    Sl3,
    R2SemiR2,
    Sl2SemiR2,
    Gl2SemiR2,
    /// C_alpha^r at alpha = -1, r = 1: h2 ⋉ R².
    H2SemiR2,
    /// I16 at alpha = 0, r = 1.
    C0R1,
    /// (h2 ⊕ R) ⋉ R² (I18 at r = 1).
    H2PlusRSemiR2,
    /// Central extensions that carry their own classical names.
    H4,
    H6,
    ExtIso2,
    ExtRSemiR2,
    ExtH2SemiR2,
    So3PlusR,
    Sl2PlusR,
    /// The extension namer wraps an unnamed base.
    Ext(Box<AlgebraName>),
    Unrecognized,
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AlgebraName::*;
        match self {
            Rn(1) => write!(f, "R"),
            Rn(n) => write!(f, "R^{n}"),
            H2 => write!(f, "h2"),
            Sl2 => write!(f, "sl(2)"),
            So3 => write!(f, "so(3)"),
            Iso2 => write!(f, "iso(2)"),
            Iso11 => write!(f, "iso(1,1)"),
            AAlpha(a) => write!(f, "A_alpha({})", trim(*a)),
            BAlpha(a) => write!(f, "B_alpha({})", trim(*a)),
            R2Jordan => write!(f, "R ltimes R^2 (Jordan)"),
            H2PlusR => write!(f, "h2 + R"),
            Gl2 => write!(f, "gl(2)"),
            H2PlusH2 => write!(f, "h2 + h2"),
            Sl2PlusH2 => write!(f, "sl(2) + h2"),
            Sl2PlusSl2 => write!(f, "sl(2) + sl(2)"),
            So31 => write!(f, "so(3,1)"),
            Sl3 => write!(f, "sl(3)"),
            R2SemiR2 => write!(f, "R^2 ltimes R^2"),
            Sl2SemiR2 => write!(f, "sl(2) ltimes R^2"),
            Gl2SemiR2 => write!(f, "gl(2) ltimes R^2"),
            H2SemiR2 => write!(f, "h2 ltimes R^2"),
            C0R1 => write!(f, "C_0^1"),
            H2PlusRSemiR2 => write!(f, "(h2 + R) ltimes R^2"),
            H4 => write!(f, "h4"),
            H6 => write!(f, "h6"),
            ExtIso2 => write!(f, "ext(iso(2))"),
            ExtRSemiR2 => write!(f, "ext(R ltimes R^2)"),
            ExtH2SemiR2 => write!(f, "ext(h2 ltimes R^2)"),
            So3PlusR => write!(f, "so(3) + R"),
            Sl2PlusR => write!(f, "sl(2) + R"),
            Ext(base) => write!(f, "ext({base})"),
            Unrecognized => write!(f, "unrecognized"),
        }
    }
}

fn trim(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.4}")
    }
}

type Subspace = Vec<Vec<BigRational>>;

fn basis_vec(dim: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); dim];
    v[i] = BigRational::from_integer(1.into());
    v
}

fn row_space(rows: &[Vec<BigRational>]) -> Subspace {
    if rows.is_empty() {
        return Vec::new();
    }
    let mut m = rows.to_vec();
    let cols = m[0].len();
    let mut out = Vec::new();
    let mut lead = 0usize;
    for col in 0..cols {
        let Some(p) = (lead..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(lead, p);
        let inv = BigRational::from_integer(1.into()) / m[lead][col].clone();
        for v in m[lead].iter_mut() {
            *v *= &inv;
        }
        for r in 0..m.len() {
            if r != lead && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    let d = &f * &m[lead][c];
                    m[r][c] -= d;
                }
            }
        }
        out.push(m[lead].clone());
        lead += 1;
        if lead == m.len() {
            break;
        }
    }
    out
}

fn bracket_span(sc: &StructureConstants, a: &Subspace, b: &Subspace) -> Subspace {
    let mut rows = Vec::new();
    for u in a {
        for v in b {
            let w = sc.bracket_vec(u, v);
            if w.iter().any(|x| !x.is_zero()) {
                rows.push(w);
            }
        }
    }
    row_space(&rows)
}

pub fn fingerprint(sc: &StructureConstants) -> Fingerprint {
    let n = sc.dim;
    let full: Subspace = (0..n).map(|i| basis_vec(n, i)).collect();

    let mut derived_series = vec![n];
    let mut cur = full.clone();
    loop {
        let next = bracket_span(sc, &cur, &cur);
        let d = next.len();
        if d == *derived_series.last().unwrap() {
            break;
        }
        derived_series.push(d);
        cur = next;
        if d == 0 {
            break;
        }
    }

    let mut lower_central_series = vec![n];
    let mut cur = full.clone();
    loop {
        let next = bracket_span(sc, &full, &cur);
        let d = next.len();
        if d == *lower_central_series.last().unwrap() {
            break;
        }
        lower_central_series.push(d);
        cur = next;
        if d == 0 {
            break;
        }
    }

    // Center: solve sum_i z_i c[i][j][k] = 0 for all j, k.
    let mut rows = Vec::new();
    for j in 0..n {
        for k in 0..n {
            rows.push((0..n).map(|i| sc.c[i][j][k].clone()).collect::<Vec<_>>());
        }
    }
    let center_dim = n - linalg::rank_exact(&rows);

    // Killing form K(a,b) = tr(ad_a ad_b), exact then eigen-signed in floats.
    let killing: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut tr = BigRational::zero();
                    for i in 0..n {
                        for j in 0..n {
                            tr += &sc.c[b][i][j] * &sc.c[a][j][i];
                        }
                    }
                    tr.to_f64().unwrap_or(f64::NAN)
                })
                .collect()
        })
        .collect();
    let killing_signature = if n == 0 {
        (0, 0, 0)
    } else {
        linalg::signature(&killing, 1e-9)
    };

    let solvable = *derived_series.last().unwrap() == 0;
    let nilpotent = *lower_central_series.last().unwrap() == 0;
    let abelian = n == 0 || bracket_span(sc, &full, &full).is_empty();
    let semisimple = killing_signature.2 == 0 && n > 0;

    let mut fp = Fingerprint {
        dim: n,
        derived_series,
        lower_central_series,
        center_dim,
        killing_signature,
        abelian,
        nilpotent,
        solvable,
        semisimple,
        name: AlgebraName::Unrecognized,
    };
    fp.name = lookup_name(sc, &fp);
    fp
}

fn lookup_name(sc: &StructureConstants, fp: &Fingerprint) -> AlgebraName {
    use AlgebraName::*;
    let n = fp.dim;
    if fp.abelian {
        return Rn(n);
    }
    let ds: &[usize] = &fp.derived_series;
    // dim of [g, g]; a length-1 series means the algebra is perfect
    let d1 = ds.get(1).copied().unwrap_or(n);
    let sig = fp.killing_signature;
    match n {
        2 => H2,
        3 => name_dim3(sc, fp),
        4 => {
            if fp.semisimple {
                return Unrecognized;
            }
            if !fp.solvable {
                // reductive: gl(2) = sl(2) + R
                if fp.center_dim == 1 && d1 == 3 {
                    let sl_part = sig;
                    return if sl_part.0 == 2 && sl_part.1 == 1 {
                        Gl2
                    } else if sl_part.1 == 3 {
                        So3PlusR
                    } else {
                        Unrecognized
                    };
                }
                return Unrecognized;
            }
            match (ds, fp.center_dim) {
                ([4, 2, 0], 0) => {
                    // P4 vs h2+h2 split by Killing signature
                    if sig == (2, 0, 2) {
                        H2PlusH2
                    } else if sig.0 == 1 && sig.1 == 1 {
                        R2SemiR2
                    } else {
                        Unrecognized
                    }
                }
                ([4, 2, 0], 1) => ExtRSemiR2,
                ([4, 3, 1, 0], 0) => H2SemiR2,
                ([4, 3, 1, 0], 1) => {
                    // C_0^1 vs the central extensions h4 / ext(iso(2))
                    if sig.0 == 1 && sig.1 == 0 {
                        H4
                    } else if sig.0 == 0 && sig.1 == 1 {
                        ExtIso2
                    } else {
                        C0R1
                    }
                }
                _ => Unrecognized,
            }
        }
        5 => {
            if !fp.solvable {
                if d1 == 5 {
                    return Sl2SemiR2;
                }
                if d1 == 4 && fp.center_dim == 0 {
                    return Sl2PlusH2;
                }
                return Unrecognized;
            }
            match (ds, fp.center_dim) {
                ([5, 3, 1, 0], 0) => H2PlusRSemiR2,
                ([5, 4, 2, 0], 1) => ExtH2SemiR2,
                _ => Unrecognized,
            }
        }
        6 => {
            if fp.semisimple {
                return match sig {
                    (3, 3, 0) => So31,
                    (4, 2, 0) => Sl2PlusSl2,
                    _ => Unrecognized,
                };
            }
            if !fp.solvable && d1 == 5 && fp.center_dim == 0 {
                return Gl2SemiR2;
            }
            if !fp.solvable && d1 == 6 && fp.center_dim == 1 {
                return H6;
            }
            Unrecognized
        }
        8 => {
            if fp.semisimple && sig == (5, 3, 0) {
                Sl3
            } else {
                Unrecognized
            }
        }
        _ => Unrecognized,
    }
}

/// Dimension 3: semisimple by Killing signature, else classify the action of
/// a complement element on the derived ideal.
fn name_dim3(sc: &StructureConstants, fp: &Fingerprint) -> AlgebraName {
    use AlgebraName::*;
    if fp.semisimple {
        return match fp.killing_signature {
            (2, 1, 0) => Sl2,
            (0, 3, 0) => So3,
            _ => Unrecognized,
        };
    }
    let n = 3;
    let full: Subspace = (0..n).map(|i| basis_vec(n, i)).collect();
    let derived = bracket_span(sc, &full, &full);
    match derived.len() {
        1 => {
            // h2 + R when the derived line is not central, h3 otherwise
            let z = &derived[0];
            let central = (0..n).all(|j| {
                sc.bracket_vec(z, &basis_vec(n, j))
                    .iter()
                    .all(|v| v.is_zero())
            });
            if central {
                Unrecognized // Heisenberg: outside the namespace
            } else {
                H2PlusR
            }
        }
        2 => {
            // Solvable with 2-dim abelian derived ideal: classify ad_X on it.
            // Pick a basis element outside the derived plane.
            let mut ext = derived.clone();
            let mut chosen = None;
            for i in 0..n {
                let mut cand = ext.clone();
                cand.push(basis_vec(n, i));
                if row_space(&cand).len() == 3 {
                    chosen = Some(i);
                    break;
                }
            }
            let Some(xi) = chosen else {
                return Unrecognized;
            };
            ext.push(basis_vec(n, xi));
            // matrix of ad_X restricted to the derived plane in its basis
            let b0 = sc.bracket_vec(&basis_vec(n, xi), &derived[0]);
            let b1 = sc.bracket_vec(&basis_vec(n, xi), &derived[1]);
            let Some(c0) = coords_in(&derived, &b0) else {
                return Unrecognized;
            };
            let Some(c1) = coords_in(&derived, &b1) else {
                return Unrecognized;
            };
            let a11 = c0[0].to_f64().unwrap();
            let a21 = c0[1].to_f64().unwrap();
            let a12 = c1[0].to_f64().unwrap();
            let a22 = c1[1].to_f64().unwrap();
            let tr = a11 + a22;
            let det = a11 * a22 - a12 * a21;
            let disc = tr * tr - 4.0 * det;
            let tol = 1e-9 * (1.0 + tr.abs() + det.abs());
            if disc < -tol {
                // complex pair alpha ± i beta, invariant ratio alpha/|beta|
                let alpha = tr / 2.0;
                let beta = (-disc).sqrt() / 2.0;
                let ratio = (alpha / beta).abs();
                if ratio < 1e-9 {
                    Iso2
                } else {
                    AAlpha(ratio)
                }
            } else if disc > tol {
                let l1 = (tr + disc.sqrt()) / 2.0;
                let l2 = (tr - disc.sqrt()) / 2.0;
                if l1.abs() < 1e-9 || l2.abs() < 1e-9 {
                    return H2PlusR; // degenerate action, decomposable
                }
                let (small, big) = if l1.abs() <= l2.abs() { (l1, l2) } else { (l2, l1) };
                let ratio = small / big;
                if (ratio + 1.0).abs() < 1e-9 {
                    Iso11
                } else {
                    BAlpha(ratio)
                }
            } else {
                // repeated eigenvalue: scalar action vs a Jordan block
                let scalar = (a12.abs() < 1e-9 && a21.abs() < 1e-9 && (a11 - a22).abs() < 1e-9)
                    || (a11 - a22).abs() + a12.abs() + a21.abs() < 1e-9;
                if scalar {
                    BAlpha(1.0)
                } else {
                    R2Jordan
                }
            }
        }
        3 => Unrecognized,
        _ => Unrecognized,
    }
}

/// Coordinates of `v` in the row space spanned by `basis` (exact).
fn coords_in(basis: &Subspace, v: &[BigRational]) -> Option<Vec<BigRational>> {
    let cols = basis.len();
    let rows = v.len();
    let a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| (0..cols).map(|c| basis[c][r].clone()).collect())
        .collect();
    linalg::solve_exact(&a, v).map(|(x, _)| x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc_from(dim: usize, brackets: &[(usize, usize, &[(usize, i64)])]) -> StructureConstants {
        let mut sc = StructureConstants::zero(dim);
        for (i, j, terms) in brackets {
            let mut row = vec![BigRational::zero(); dim];
            for (k, c) in *terms {
                row[*k] = BigRational::from_integer((*c).into());
            }
            sc.set(*i, *j, &row);
        }
        sc
    }

    #[test]
    fn sl2_canonical() {
        // [e0,e1]=e0, [e0,e2]=2e1, [e1,e2]=e2 (the catalog normalization)
        let sc = sc_from(3, &[(0, 1, &[(0, 1)]), (0, 2, &[(1, 2)]), (1, 2, &[(2, 1)])]);
        let fp = sc.fingerprint();
        assert!(fp.semisimple);
        assert_eq!(fp.killing_signature, (2, 1, 0));
        assert_eq!(fp.name, AlgebraName::Sl2);
    }

    #[test]
    fn so3_canonical() {
        // [e0,e1]=e2, [e1,e2]=e0, [e2,e0]=e1
        let sc = sc_from(
            3,
            &[(0, 1, &[(2, 1)]), (1, 2, &[(0, 1)]), (2, 0, &[(1, 1)])],
        );
        let fp = sc.fingerprint();
        assert!(fp.semisimple);
        assert_eq!(fp.killing_signature, (0, 3, 0));
        assert_eq!(fp.name, AlgebraName::So3);
    }

    #[test]
    fn abelian_rn() {
        let sc = StructureConstants::zero(2);
        let fp = sc.fingerprint();
        assert!(fp.abelian && fp.nilpotent && fp.solvable);
        assert_eq!(fp.name, AlgebraName::Rn(2));
    }

    #[test]
    fn h2_canonical() {
        let sc = sc_from(2, &[(0, 1, &[(1, 1)])]);
        assert_eq!(sc.fingerprint().name, AlgebraName::H2);
    }

    #[test]
    fn iso2_and_iso11() {
        // iso(2): [X1,X3] = -X2, [X2,X3] = X1
        let sc = sc_from(3, &[(0, 2, &[(1, -1)]), (1, 2, &[(0, 1)])]);
        let fp = sc.fingerprint();
        assert!(fp.solvable && !fp.nilpotent);
        assert_eq!(fp.name, AlgebraName::Iso2);
        // iso(1,1): [X1,X3] = X1, [X2,X3] = -X2
        let sc = sc_from(3, &[(0, 2, &[(0, 1)]), (1, 2, &[(1, -1)])]);
        assert_eq!(sc.fingerprint().name, AlgebraName::Iso11);
    }

    #[test]
    fn b_alpha_family() {
        // [X1,X3] = X1, [X2,X3] = alpha X2 at alpha = 1/2 -> ratio 1/2
        let mut sc = StructureConstants::zero(3);
        sc.set(0, 2, &[
            BigRational::from_integer(1.into()),
            BigRational::zero(),
            BigRational::zero(),
        ]);
        sc.set(1, 2, &[
            BigRational::zero(),
            BigRational::new(1.into(), 2.into()),
            BigRational::zero(),
        ]);
        match sc.fingerprint().name {
            AlgebraName::BAlpha(a) => assert!((a - 0.5).abs() < 1e-9),
            other => panic!("expected B_alpha, got {other}"),
        }
    }

    #[test]
    fn jordan_type() {
        // [X1,X3] = X1 + X2, [X2,X3] = X2: Jordan block
        let sc = sc_from(3, &[(0, 2, &[(0, 1), (1, 1)]), (1, 2, &[(1, 1)])]);
        assert_eq!(sc.fingerprint().name, AlgebraName::R2Jordan);
        // scalar action instead: B_alpha(1)
        let sc = sc_from(3, &[(0, 2, &[(0, 1)]), (1, 2, &[(1, 1)])]);
        assert_eq!(sc.fingerprint().name, AlgebraName::BAlpha(1.0));
    }

    #[test]
    fn h2_plus_r() {
        // [X1,X3] = X3 only: h2 + R (center X2... here X1+? center is <X2>)
        let sc = sc_from(3, &[(0, 2, &[(2, 1)])]);
        assert_eq!(sc.fingerprint().name, AlgebraName::H2PlusR);
    }

    #[test]
    fn gl2_reductive() {
        // sl(2) + central element
        let sc = sc_from(
            4,
            &[(0, 1, &[(0, 1)]), (0, 2, &[(1, 2)]), (1, 2, &[(2, 1)])],
        );
        let fp = sc.fingerprint();
        assert!(!fp.solvable && !fp.semisimple);
        assert_eq!(fp.center_dim, 1);
        assert_eq!(fp.name, AlgebraName::Gl2);
    }

    #[test]
    fn h2_plus_h2_vs_r2_semi_r2() {
        // h2 + h2
        let sc = sc_from(4, &[(0, 1, &[(1, 1)]), (2, 3, &[(3, 1)])]);
        assert_eq!(sc.fingerprint().name, AlgebraName::H2PlusH2);
        // P4: [X1,X3]=X1,[X2,X3]=X2,[X1,X4]=-X2,[X2,X4]=X1
        let sc = sc_from(
            4,
            &[
                (0, 2, &[(0, 1)]),
                (1, 2, &[(1, 1)]),
                (0, 3, &[(1, -1)]),
                (1, 3, &[(0, 1)]),
            ],
        );
        assert_eq!(sc.fingerprint().name, AlgebraName::R2SemiR2);
    }

    #[test]
    fn central_extension_names() {
        // h4 = ext(iso(1,1)): basis (h1, h2, h3, h0)
        // {h1,h2}=h0, {h1,h3}=-h1, {h2,h3}=h2
        let sc = sc_from(
            4,
            &[(0, 1, &[(3, 1)]), (0, 2, &[(0, -1)]), (1, 2, &[(1, 1)])],
        );
        assert_eq!(sc.fingerprint().name, AlgebraName::H4);
        // ext(iso(2)): {h1,h2}=h0, {h1,h3}=h2, {h2,h3}=-h1
        let sc = sc_from(
            4,
            &[(0, 1, &[(3, 1)]), (0, 2, &[(1, 1)]), (1, 2, &[(0, -1)])],
        );
        assert_eq!(sc.fingerprint().name, AlgebraName::ExtIso2);
    }

    #[test]
    fn h6_two_photon() {
        // P5 extended table: basis (h1..h5, h0)
        let sc = sc_from(
            6,
            &[
                (0, 1, &[(5, 1)]),
                (0, 2, &[(0, -1)]),
                (0, 4, &[(1, -1)]),
                (1, 2, &[(1, 1)]),
                (1, 3, &[(0, -1)]),
                (2, 3, &[(3, 2)]),
                (2, 4, &[(4, -2)]),
                (3, 4, &[(2, 1)]),
            ],
        );
        let fp = sc.fingerprint();
        assert_eq!(fp.center_dim, 1);
        assert_eq!(fp.name, AlgebraName::H6);
    }
}
