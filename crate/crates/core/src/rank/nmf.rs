//! Exact-fit nonnegative matrix factorization search.
//!
//! Multiplicative updates drive the factors into the right support pattern
//! but stall near zeros, so each restart finishes with a projected
//! alternating-least-squares polish that can certify residuals at the
//! 1e-9 level. A restart either meets the residual tolerance or is
//! discarded; failure of all restarts proves nothing.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::solve_linear;
use crate::matrix::Mat;

use super::{FactorPair, NnFactorization};

/// Escape hatch for multiplicative-update zero locking.
const MU_EPS: f64 = 1e-12;

/// Seed for restart `index` of a width-`r` search, independent of how many
/// restarts run in total, so growing the restart budget only extends the
/// stream.
fn restart_seed(seed: u64, r: usize, index: usize) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [r as u64, index as u64] {
        h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    }
    h
}

/// Searches for a rank-`r` nonnegative factorization with relative
/// Frobenius residual at most `residual_tol`. Returns `None` when no
/// restart converges; absence is not a lower-bound certificate.
pub fn nmf_upper_bound(
    matrix: &Mat<f64>,
    r: usize,
    restarts: usize,
    max_iters: usize,
    residual_tol: f64,
    seed: u64,
) -> Option<NnFactorization> {
    assert!(r >= 1);
    let norm = matrix.frobenius_norm();
    if norm == 0.0 {
        return None;
    }
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r, restart));
        if let Some(fact) = run_restart(matrix, r, max_iters, residual_tol, norm, &mut rng) {
            return Some(fact);
        }
    }
    None
}

fn run_restart(
    matrix: &Mat<f64>,
    r: usize,
    max_iters: usize,
    residual_tol: f64,
    norm: f64,
    rng: &mut ChaCha8Rng,
) -> Option<NnFactorization> {
    let (n, m) = (matrix.rows(), matrix.cols());
    let mut w = Mat::fill(n, r, 0.0);
    let mut h = Mat::fill(r, m, 0.0);
    for v in [&mut w, &mut h] {
        for i in 0..v.rows() {
            for j in 0..v.cols() {
                *v.at_mut(i, j) = rng.gen::<f64>();
            }
        }
    }
    // Scale the initial factors so the reconstruction mass matches.
    let mass: f64 = matrix.values().iter().sum();
    let init_mass: f64 = w.matmul(&h).values().iter().sum();
    if init_mass > 0.0 && mass > 0.0 {
        let s = libm::sqrt(mass / init_mass);
        for v in [&mut w, &mut h] {
            for x in 0..v.rows() {
                for y in 0..v.cols() {
                    *v.at_mut(x, y) *= s;
                }
            }
        }
    }

    // `max_iters` caps the total work per restart; the polish phase gets
    // the tail of the budget and usually converges in a few dozen steps.
    let mu_iters = (max_iters * 4 / 5).min(800);
    let polish_iters = (max_iters - mu_iters).min(300);

    for iter in 0..mu_iters {
        mu_step(matrix, &mut w, &mut h);
        if iter % 25 == 24 && relative_residual(matrix, &w, &h, norm) <= residual_tol {
            break;
        }
    }
    let mut last = f64::INFINITY;
    for _ in 0..polish_iters {
        if !als_step(matrix, &mut w, &mut h) {
            break;
        }
        let res = relative_residual(matrix, &w, &h, norm);
        if res <= residual_tol {
            break;
        }
        if res > last - 1e-14 {
            break; // stalled above tolerance
        }
        last = res;
    }

    let residual = relative_residual(matrix, &w, &h, norm);
    if residual <= residual_tol {
        let pairs = (0..r)
            .map(|z| FactorPair {
                x: (0..n).map(|i| *w.at(i, z)).collect(),
                y: (0..m).map(|j| *h.at(z, j)).collect(),
            })
            .collect();
        Some(NnFactorization { r, pairs, residual })
    } else {
        None
    }
}

fn relative_residual(matrix: &Mat<f64>, w: &Mat<f64>, h: &Mat<f64>, norm: f64) -> f64 {
    matrix.sub(&w.matmul(h)).frobenius_norm() / norm
}

/// One round of Lee–Seung multiplicative updates for the Frobenius
/// objective, with entries floored at `MU_EPS` so zeroed coordinates can
/// re-enter.
fn mu_step(matrix: &Mat<f64>, w: &mut Mat<f64>, h: &mut Mat<f64>) {
    let wt = w.transpose();
    let numer_h = wt.matmul(matrix);
    let denom_h = wt.matmul(w).matmul(h);
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            let v = *h.at(i, j) * numer_h.at(i, j) / (denom_h.at(i, j) + MU_EPS);
            *h.at_mut(i, j) = if v.is_finite() { v.max(MU_EPS) } else { MU_EPS };
        }
    }
    let ht = h.transpose();
    let numer_w = matrix.matmul(&ht);
    let denom_w = w.matmul(&h.matmul(&ht));
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            let v = *w.at(i, j) * numer_w.at(i, j) / (denom_w.at(i, j) + MU_EPS);
            *w.at_mut(i, j) = if v.is_finite() { v.max(MU_EPS) } else { MU_EPS };
        }
    }
}

/// One projected alternating-least-squares step: exact normal-equation
/// solves clipped to the nonnegative orthant. Returns false when both
/// normal systems are singular beyond the ridge fallback.
fn als_step(matrix: &Mat<f64>, w: &mut Mat<f64>, h: &mut Mat<f64>) -> bool {
    let mut progressed = false;

    // Update H: for each column j of M solve (W^T W) h_j = W^T m_j.
    let wt = w.transpose();
    let wtw = wt.matmul(w);
    let wtm = wt.matmul(matrix);
    for j in 0..h.cols() {
        let rhs: Vec<f64> = (0..h.rows()).map(|i| *wtm.at(i, j)).collect();
        if let Some(x) = solve_with_ridge(&wtw, &rhs) {
            for i in 0..h.rows() {
                *h.at_mut(i, j) = x[i].max(0.0);
            }
            progressed = true;
        }
    }

    // Update W: for each row i of M solve (H H^T) w_i = H m_i^T.
    let ht = h.transpose();
    let hht = h.matmul(&ht);
    let mht = matrix.matmul(&ht);
    for i in 0..w.rows() {
        let rhs: Vec<f64> = (0..w.cols()).map(|j| *mht.at(i, j)).collect();
        if let Some(x) = solve_with_ridge(&hht, &rhs) {
            for j in 0..w.cols() {
                *w.at_mut(i, j) = x[j].max(0.0);
            }
            progressed = true;
        }
    }
    progressed
}

/// Normal-equation solve with a tiny ridge retry for singular systems.
fn solve_with_ridge(a: &Mat<f64>, b: &[f64]) -> Option<Vec<f64>> {
    if let Some(x) = solve_linear(a, b) {
        return Some(x);
    }
    let n = a.rows();
    let trace: f64 = (0..n).map(|i| a.at(i, i)).sum();
    let mut reg = a.clone();
    for i in 0..n {
        *reg.at_mut(i, i) += 1e-12 * trace.max(1.0);
    }
    solve_linear(&reg, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_product_found_at_r1() {
        let m = Mat::outer(&[0.3, 0.7], &[0.2, 0.5, 0.3]);
        let f = nmf_upper_bound(&m, 1, 8, 2000, 1e-9, 0).unwrap();
        assert_eq!(f.r, 1);
        assert!(f.residual <= 1e-9);
        let rec = f.reconstruct();
        assert!(rec.sub(&m).frobenius_norm() < 1e-8);
    }

    #[test]
    fn sum_of_two_rank_one_terms_found_at_r2() {
        let mut m = Mat::outer(&[0.1, 0.4, 0.0], &[0.3, 0.2]);
        m.add_assign(&Mat::outer(&[0.0, 0.2, 0.3], &[0.1, 0.9]));
        let f = nmf_upper_bound(&m, 2, 16, 3000, 1e-9, 0).unwrap();
        assert!(f.residual <= 1e-9);
    }

    #[test]
    fn table1_found_at_r3() {
        let s = 1.0 / 6.0;
        let m = Mat::from_rows(&[
            vec![0.0, s, s],
            vec![s, 0.0, s],
            vec![s, s, 0.0],
        ])
        .unwrap();
        let f = nmf_upper_bound(&m, 3, 32, 4000, 1e-9, 0).unwrap();
        assert!(f.residual <= 1e-9);
        for pair in &f.pairs {
            assert!(pair.x.iter().all(|&v| v >= 0.0));
            assert!(pair.y.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn zero_restarts_never_succeed() {
        let m = Mat::outer(&[0.5, 0.5], &[0.5, 0.5]);
        assert!(nmf_upper_bound(&m, 1, 0, 1000, 1e-9, 0).is_none());
    }

    #[test]
    fn restart_seeds_are_prefix_stable() {
        assert_eq!(restart_seed(0, 2, 5), restart_seed(0, 2, 5));
        assert_ne!(restart_seed(0, 2, 5), restart_seed(0, 2, 6));
        assert_ne!(restart_seed(0, 2, 5), restart_seed(0, 3, 5));
        assert_ne!(restart_seed(1, 2, 5), restart_seed(0, 2, 5));
    }
}
