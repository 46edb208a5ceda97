//! Small dense linear algebra: exact rational elimination for the
//! point-sampling solvers and float helpers (rank, symmetric Jacobi
//! eigenvalues) for everything transcendental.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact row-reduced echelon solve of `A x = b` over the rationals.
/// Returns a particular solution and a basis of the homogeneous nullspace,
/// or `None` when the system is inconsistent.
pub fn solve_exact(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut row = r.clone();
            row.push(rhs.clone());
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut lead = 0usize;
    for col in 0..cols {
        let Some(p) = (lead..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(lead, p);
        let inv = BigRational::one() / m[lead][col].clone();
        for v in m[lead].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != lead && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=cols {
                    let delta = &f * &m[lead][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivot_cols.push(col);
        lead += 1;
        if lead == rows {
            break;
        }
    }
    // Inconsistency: zero row with nonzero rhs.
    for r in lead..rows {
        if m[r][..cols].iter().all(|v| v.is_zero()) && !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut particular = vec![BigRational::zero(); cols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        particular[pc] = m[i][cols].clone();
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut nullspace = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for (i, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[i][fc].clone();
        }
        nullspace.push(v);
    }
    Some((particular, nullspace))
}

/// Exact rank of a rational matrix.
pub fn rank_exact(a: &[Vec<BigRational>]) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = BigRational::one() / m[rank][col].clone();
        for v in m[rank].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..cols {
                    let delta = &f * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Float rank by column-pivoted elimination with a tolerance on pivots
/// relative to the largest entry.
pub fn rank_f64(a: &[Vec<f64>], tol: f64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut m = a.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let mut rank = 0usize;
    for col in 0..cols {
        let (p, best) = (rank..rows)
            .map(|r| (r, m[r][col].abs()))
            .fold((rank, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if best <= tol * scale {
            continue;
        }
        m.swap(rank, p);
        let inv = 1.0 / m[rank][col];
        for c in 0..cols {
            m[rank][c] *= inv;
        }
        for r in 0..rows {
            if r != rank {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..cols {
                        m[r][c] -= f * m[rank][c];
                    }
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Float least-norm-ish solve: row-reduce `A x = b`, returning any exact
/// solution of the reduced system (pivot tolerance relative). `None` when
/// inconsistent beyond `tol`.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let rows = a.len();
    if rows == 0 {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut row = r.clone();
            row.push(*rhs);
            row
        })
        .collect();
    let scale = m
        .iter()
        .flat_map(|r| r[..cols].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let rhs_scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(scale);
    let mut pivots = Vec::new();
    let mut lead = 0usize;
    for col in 0..cols {
        let (p, best) = (lead..rows)
            .map(|r| (r, m[r][col].abs()))
            .fold((lead, -1.0), |acc, it| if it.1 > acc.1 { it } else { acc });
        if best <= tol * scale {
            continue;
        }
        m.swap(lead, p);
        let inv = 1.0 / m[lead][col];
        for c in 0..=cols {
            m[lead][c] *= inv;
        }
        for r in 0..rows {
            if r != lead {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..=cols {
                        m[r][c] -= f * m[lead][c];
                    }
                }
            }
        }
        pivots.push(col);
        lead += 1;
        if lead == rows {
            break;
        }
    }
    for r in lead..rows {
        if m[r][cols].abs() > tol.max(1e-9) * rhs_scale {
            return None;
        }
    }
    let mut x = vec![0.0; cols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = m[i][cols];
    }
    Some(x)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Signature (n_plus, n_minus, n_zero) of a symmetric matrix with the given
/// zero threshold (relative to the largest eigenvalue magnitude).
pub fn signature(a: &[Vec<f64>], zero_tol: f64) -> (usize, usize, usize) {
    let eig = symmetric_eigenvalues(a);
    let scale = eig.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let mut sig = (0, 0, 0);
    for v in eig {
        if v.abs() <= zero_tol * scale {
            sig.2 += 1;
        } else if v > 0.0 {
            sig.0 += 1;
        } else {
            sig.1 += 1;
        }
    }
    sig
}
