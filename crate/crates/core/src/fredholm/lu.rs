//! Dense LU with partial pivoting, reduced to what a log-determinant needs.

use crate::error::{Error, Result};

const MIN_PIVOT: f64 = 1e-300;
const INVERSE_ITERATIONS: usize = 12;
/// Smallest eigenvalue of I - K accepted by [`positive_log_det`].
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuLogDet {
    /// log |det A|
    pub log_abs: f64,
    pub negative_pivots: usize,
    pub row_swaps: usize,
    pub min_pivot: f64,
}

impl LuLogDet {
    pub fn is_positive(&self) -> bool {
        (self.negative_pivots + self.row_swaps).is_multiple_of(2)
    }
}

/// Factorises the row-major `n x n` matrix in place.
pub fn lu_log_det(a: &mut [f64], n: usize) -> Result<LuLogDet> {
    factor(a, n).map(|(lu, _)| lu)
}

/// LU with the multipliers kept below the diagonal; returns the row swap of each step.
fn factor(a: &mut [f64], n: usize) -> Result<(LuLogDet, Vec<usize>)> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    let mut perm = Vec::with_capacity(n);
    let mut log_abs = 0.0;
    let mut negative_pivots = 0;
    let mut row_swaps = 0;
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            row_swaps += 1;
        }
        perm.push(p);
        let pivot = a[k * n + k];
        if !(pivot.abs() >= MIN_PIVOT) {
            return Err(Error::Conditioning { pivot: pivot.abs() });
        }
        min_pivot = min_pivot.min(pivot.abs());
        log_abs += pivot.abs().ln();
        if pivot < 0.0 {
            negative_pivots += 1;
        }
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let row_k = &upper[k * n..(k + 1) * n];
        for row in lower.chunks_exact_mut(n) {
            let factor = row[k] / pivot;
            row[k] = factor;
            if factor != 0.0 {
                for j in k + 1..n {
                    row[j] -= factor * row_k[j];
                }
            }
        }
    }
    Ok((LuLogDet { log_abs, negative_pivots, row_swaps, min_pivot }, perm))
}

fn lu_solve(lu: &[f64], n: usize, perm: &[usize], b: &mut [f64]) {
    for (k, &p) in perm.iter().enumerate() {
        b.swap(k, p);
    }
    for i in 0..n {
        let row = &lu[i * n..i * n + i];
        b[i] -= row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum::<f64>();
    }
    for i in (0..n).rev() {
        let row = &lu[i * n..(i + 1) * n];
        let tail: f64 = row[i + 1..].iter().zip(&b[i + 1..]).map(|(u, y)| u * y).sum();
        b[i] = (b[i] - tail) / row[i];
    }
}

/// Estimate of the smallest eigenvalue of a symmetric positive definite matrix
/// from its LU factors, by inverse iteration.
fn smallest_eigenvalue(lu: &[f64], n: usize, perm: &[usize]) -> f64 {
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut growth = 1.0;
    for _ in 0..INVERSE_ITERATIONS {
        lu_solve(lu, n, perm, &mut v);
        growth = v.iter().map(|y| y * y).sum::<f64>().sqrt();
        if !(growth.is_finite() && growth > 0.0) {
            return 0.0;
        }
        v.iter_mut().for_each(|y| *y /= growth);
    }
    1.0 / growth
}

/// log det for a matrix that must have positive determinant.
///
/// Fails with [`Error::Conditioning`] when the smallest eigenvalue of the
/// (symmetric) matrix falls to within [`EIGENVALUE_FLOOR`] of roundoff, where
/// double precision no longer resolves the factors of the determinant.
pub fn positive_log_det(a: &mut [f64], n: usize) -> Result<f64> {
    let (lu, perm) = factor(a, n)?;
    if !lu.is_positive() {
        return Err(Error::Sign { negative_pivots: lu.negative_pivots });
    }
    let lowest = smallest_eigenvalue(a, n, &perm);
    if !(lowest >= EIGENVALUE_FLOOR) {
        return Err(Error::Conditioning { pivot: lowest });
    }
    Ok(lu.log_abs)
}

/// Solves A x = b for each right-hand side by Cholesky factorisation of the
/// symmetric positive definite row-major `n x n` matrix `a` (overwritten).
pub fn cholesky_solve(a: &mut [f64], n: usize, rhs: &mut [Vec<f64>]) -> Result<()> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > MIN_PIVOT) {
            return Err(Error::Conditioning { pivot: d.abs() });
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    for b in rhs.iter_mut() {
        for i in 0..n {
            let mut v = b[i];
            for k in 0..i {
                v -= a[i * n + k] * b[k];
            }
            b[i] = v / a[i * n + i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for k in i + 1..n {
                v -= a[k * n + i] * b[k];
            }
            b[i] = v / a[i * n + i];
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrices() {
        let mut a = vec![4.0, 3.0, 6.0, 3.0];
        let lu = lu_log_det(&mut a, 2).unwrap();
        assert!((lu.log_abs - 6f64.ln()).abs() < 1e-15);
        assert!(!lu.is_positive());
        let mut b = vec![2.0, 1.0, 1.0, 2.0];
        assert!((positive_log_det(&mut b, 2).unwrap() - 3f64.ln()).abs() < 1e-15);
        let mut c = vec![0.0, 1.0, 1.0, 0.0];
        assert!(matches!(positive_log_det(&mut c, 2), Err(Error::Sign { .. })));
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(matches!(lu_log_det(&mut a, 2), Err(Error::Conditioning { .. })));
    }

    #[test]
    fn hilbert_like_spd() {
        // det of the 4x4 Hilbert matrix is 1/6048000
        let n = 4;
        let mut a: Vec<f64> = (0..n * n).map(|k| 1.0 / ((k / n + k % n + 1) as f64)).collect();
        let ld = positive_log_det(&mut a, n).unwrap();
        assert!((ld + 6_048_000f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn cholesky_matches_direct_solution() {
        let mut a = vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let orig = a.clone();
        let mut rhs = vec![vec![1.0, 2.0, 3.0]];
        cholesky_solve(&mut a, 3, &mut rhs).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| orig[i * 3 + j] * rhs[0][j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-14);
        }
        let mut bad = vec![1.0, 2.0, 2.0, 1.0];
        assert!(cholesky_solve(&mut bad, 2, &mut []).is_err());
    }
}
