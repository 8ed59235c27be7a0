//! Minimal dense linear algebra for the crate's internals: a cyclic Jacobi
//! eigensolver for the (small, symmetric) Gram matrices of the functional
//! PCA, and an LU solver with partial pivoting for the smoothing-spline
//! saddle-point systems. Matrices here are tiny (tens of rows), so the
//! O(n³) classics are the right tool; both are deterministic, which keeps
//! every downstream artifact byte-reproducible.

// Index-based loops mirror the textbook formulations these kernels follow;
// iterator rewrites obscure the pivot/rotation structure.
#![allow(clippy::needless_range_loop)]

use crate::{Error, Result};

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Sweeps the strict upper triangle in row-major order and applies Givens
/// rotations until the off-diagonal Frobenius norm drops below
/// `1e-12 · ‖A‖_F`. Returns `(eigenvalues, eigenvectors)` sorted by
/// descending eigenvalue, ties broken by original position; `eigenvectors[j]`
/// is the unit eigenvector for `eigenvalues[j]`.
pub(crate) fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    let norm: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[p][q] * a[p][q];
            }
        }
        s.sqrt()
    };

    if norm > 0.0 {
        for _sweep in 0..64 {
            if off(&a) <= 1e-12 * norm {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    // Rotation that annihilates a[p][q] (Golub & Van Loan §8.5).
                    let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut() {
                        let (vp, vq) = (row[p], row[q]);
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).expect("finite eigenvalues"));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| a[j][j]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| v[i][j]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}

/// Solves `A x = b` by LU factorization with partial pivoting.
pub(crate) fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("finite matrix entries")
            })
            .expect("non-empty column");
        if a[pivot_row][col].abs() < f64::MIN_POSITIVE {
            return Err(Error::SingularSystem(format!(
                "zero pivot in column {col} of a {n}x{n} system"
            )));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            a[row][col] = 0.0;
            for k in (col + 1)..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}
