//! Small-matrix numerical kernels: exact rank over rationals, singular
//! values and symmetric eigendecompositions over floats.
//!
//! All matrices here have at most a few dozen entries, so Jacobi-style
//! iterations are both accurate and fast enough; there is no need for
//! blocked or implicitly-shifted algorithms.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::matrix::Mat;
use crate::scalar::Rational;

/// Relative singular-value threshold for the float rank.
pub const RANK_SV_RTOL: f64 = 1e-9;

/// Exact matrix rank by fraction-free (Bareiss) elimination.
///
/// Denominators are cleared row by row first; row scaling by a positive
/// integer does not change the rank.
pub fn rank_exact(matrix: &Mat<Rational>) -> usize {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let lcm = matrix
            .row(r)
            .iter()
            .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
        m.push(
            matrix
                .row(r)
                .iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect(),
        );
    }

    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                m[r][c] = num / &prev; // exact by the Bareiss identity
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Singular values by one-sided Jacobi, descending order.
///
/// One-sided Jacobi orthogonalizes the columns directly and avoids forming
/// the Gram matrix, which keeps small singular values accurate enough for a
/// 1e-9 relative threshold.
pub fn singular_values(matrix: &Mat<f64>) -> Vec<f64> {
    let work = if matrix.rows() >= matrix.cols() { matrix.clone() } else { matrix.transpose() };
    let (m, n) = (work.rows(), work.cols());
    if n == 0 || m == 0 {
        return Vec::new();
    }
    // Column-major copy for cheap column access.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|c| (0..m).map(|r| *work.at(r, c)).collect()).collect();

    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for r in 0..m {
                    alpha += cols[i][r] * cols[i][r];
                    beta += cols[j][r] * cols[j][r];
                    gamma += cols[i][r] * cols[j][r];
                }
                if gamma * gamma <= 1e-60 + (1e-30) * alpha * beta {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + libm::sqrt(1.0 + zeta * zeta))
                } else {
                    -1.0 / (-zeta + libm::sqrt(1.0 + zeta * zeta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for r in 0..m {
                    let vi = cols[i][r];
                    let vj = cols[j][r];
                    cols[i][r] = c * vi - s * vj;
                    cols[j][r] = s * vi + c * vj;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| libm::sqrt(col.iter().map(|v| v * v).sum()))
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Float matrix rank: singular values above `RANK_SV_RTOL` times the largest.
pub fn rank_f64(matrix: &Mat<f64>) -> usize {
    let sv = singular_values(matrix);
    let Some(&max) = sv.first() else { return 0 };
    if max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_SV_RTOL * max).count()
}

/// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi.
///
/// Returns `(values, vectors)` with `vectors` column `k` the eigenvector of
/// `values[k]`; values are unsorted.
pub fn symmetric_eigen(matrix: &Mat<f64>) -> (Vec<f64>, Mat<f64>) {
    let n = matrix.rows();
    assert_eq!(n, matrix.cols(), "eigendecomposition needs a square matrix");
    let mut a = matrix.clone();
    let mut v = Mat::fill(n, n, 0.0);
    for i in 0..n {
        *v.at_mut(i, i) = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.at(p, q) * a.at(p, q);
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = *a.at(p, q);
                if libm::fabs(apq) < 1e-300 {
                    continue;
                }
                let theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = *a.at(k, p);
                    let akq = *a.at(k, q);
                    *a.at_mut(k, p) = c * akp - s * akq;
                    *a.at_mut(k, q) = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = *a.at(p, k);
                    let aqk = *a.at(q, k);
                    *a.at_mut(p, k) = c * apk - s * aqk;
                    *a.at_mut(q, k) = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = *v.at(k, p);
                    let vkq = *v.at(k, q);
                    *v.at_mut(k, p) = c * vkp - s * vkq;
                    *v.at_mut(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| *a.at(i, i)).collect();
    (values, v)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when the system is numerically singular.
pub fn solve_linear(a: &Mat<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut rhs = b.to_vec();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                libm::fabs(*m.at(i, col)).partial_cmp(&libm::fabs(*m.at(j, col))).unwrap()
            })
            .unwrap();
        if libm::fabs(*m.at(pivot, col)) < 1e-14 {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                let tmp = *m.at(col, c);
                *m.at_mut(col, c) = *m.at(pivot, c);
                *m.at_mut(pivot, c) = tmp;
            }
            rhs.swap(col, pivot);
        }
        for r in col + 1..n {
            let f = m.at(r, col) / m.at(col, col);
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                let v = f * m.at(col, c);
                *m.at_mut(r, c) -= v;
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m.at(r, c) * x[c];
        }
        x[r] = acc / m.at(r, r);
    }
    Some(x)
}
