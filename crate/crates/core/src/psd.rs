//! Positive semidefinite rank: bounds and certificate verification.
//!
//! No exact PSD-rank solver is attempted. The module reports an interval —
//! a dimension-counting lower bound and the nonnegative-rank upper bound —
//! and verifies explicit factorizations, which can tighten the upper side.
//! A best-effort numeric search produces candidate certificates for small
//! widths; its failure proves nothing and never affects the lower bound.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, symmetric_eigen};
use crate::matrix::Mat;
use crate::rank::RankBounds;
use crate::scalar::Scalar;

/// Eigenvalue slack: numeric eigensolvers on exactly-PSD inputs produce
/// tiny negative eigenvalues.
pub const PSD_EIG_TOL: f64 = 1e-10;

/// One r×r symmetric PSD factor per row index and per column index;
/// `P_ab = trace(E_a F_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdFactorization {
    pub r: usize,
    pub e_factors: Vec<Mat<f64>>,
    pub f_factors: Vec<Mat<f64>>,
}

impl PsdFactorization {
    pub fn reconstruct(&self) -> Mat<f64> {
        let mut out = Mat::fill(self.e_factors.len(), self.f_factors.len(), 0.0);
        for (a, e) in self.e_factors.iter().enumerate() {
            for (b, f) in self.f_factors.iter().enumerate() {
                *out.at_mut(a, b) = trace_product(e, f);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdRankBounds {
    pub lower: usize,
    pub upper: usize,
    pub upper_certificate: Option<PsdFactorization>,
    /// Provenance of each reported bound.
    pub notes: Vec<String>,
}

fn trace_product(e: &Mat<f64>, f: &Mat<f64>) -> f64 {
    let r = e.rows();
    let mut acc = 0.0;
    for i in 0..r {
        for j in 0..r {
            acc += e.at(i, j) * f.at(j, i);
        }
    }
    acc
}

/// Bounds on the PSD rank of a nonnegative matrix.
///
/// The upper bound is inherited from the nonnegative rank (every
/// nonnegative factorization yields a diagonal PSD one); a verified
/// certificate, when supplied, tightens it. The lower bound is the
/// smallest `k` with `k(k+1)/2 >=` linear rank, since `k×k` symmetric
/// factors span at most `k(k+1)/2` dimensions.
pub fn psd_rank_bounds<T: Scalar>(
    matrix: &Mat<T>,
    nn_bounds: &RankBounds,
    certificate: Option<&PsdFactorization>,
    tol: f64,
) -> PsdRankBounds {
    let lin = crate::rank::linear_rank(matrix);
    let mut notes = Vec::new();
    let lower = if lin == 0 {
        notes.push(String::from("lower: zero matrix"));
        0
    } else {
        let k = (1usize..).find(|k| k * (k + 1) / 2 >= lin).unwrap();
        notes.push(format!("lower: smallest k with k(k+1)/2 >= linear rank {lin}"));
        k
    };

    let mut upper = nn_bounds.upper;
    notes.push(format!("upper: nonnegative rank upper bound {}", nn_bounds.upper));
    let mut upper_certificate = None;
    if let Some(cert) = certificate {
        let float = matrix.map(Scalar::to_f64);
        if verify_psd_factorization(&float, cert, tol).unwrap_or(false) && cert.r < upper {
            upper = cert.r;
            notes.push(format!("upper: verified certificate of width {}", cert.r));
            upper_certificate = Some(cert.clone());
        }
    }
    PsdRankBounds { lower, upper, upper_certificate, notes }
}

/// True iff all factors are symmetric PSD (eigenvalues above
/// `-PSD_EIG_TOL`) and `trace(E_a F_b)` reproduces every entry within
/// `tol`.
pub fn verify_psd_factorization(
    matrix: &Mat<f64>,
    fact: &PsdFactorization,
    tol: f64,
) -> Result<bool> {
    if fact.e_factors.len() != matrix.rows() || fact.f_factors.len() != matrix.cols() {
        return Err(Error::ShapeMismatch {
            expected: matrix.rows() + matrix.cols(),
            got: fact.e_factors.len() + fact.f_factors.len(),
        });
    }
    for m in fact.e_factors.iter().chain(&fact.f_factors) {
        if m.rows() != fact.r || m.cols() != fact.r {
            return Err(Error::ShapeMismatch {
                expected: fact.r * fact.r,
                got: m.rows() * m.cols(),
            });
        }
        if !is_psd(m) {
            return Ok(false);
        }
    }
    for a in 0..matrix.rows() {
        for b in 0..matrix.cols() {
            let value = trace_product(&fact.e_factors[a], &fact.f_factors[b]);
            if libm::fabs(value - matrix.at(a, b)) > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn is_psd(m: &Mat<f64>) -> bool {
    let r = m.rows();
    for i in 0..r {
        for j in i + 1..r {
            if libm::fabs(m.at(i, j) - m.at(j, i)) > PSD_EIG_TOL {
                return false;
            }
        }
    }
    let (vals, _) = symmetric_eigen(&symmetrize(m));
    vals.into_iter().all(|v| v >= -PSD_EIG_TOL)
}

fn symmetrize(m: &Mat<f64>) -> Mat<f64> {
    let r = m.rows();
    let mut out = m.clone();
    for i in 0..r {
        for j in 0..r {
            *out.at_mut(i, j) = 0.5 * (m.at(i, j) + m.at(j, i));
        }
    }
    out
}

/// Projection onto the PSD cone: symmetrize, clip negative eigenvalues.
fn project_psd(m: &Mat<f64>) -> Mat<f64> {
    let sym = symmetrize(m);
    let r = sym.rows();
    let (vals, vecs) = symmetric_eigen(&sym);
    let mut out = Mat::fill(r, r, 0.0);
    for k in 0..r {
        let lambda = vals[k].max(0.0);
        if lambda == 0.0 {
            continue;
        }
        for i in 0..r {
            for j in 0..r {
                *out.at_mut(i, j) += lambda * vecs.at(i, k) * vecs.at(j, k);
            }
        }
    }
    out
}

/// Best-effort search for a width-`r` PSD factorization. Each restart
/// runs alternating PSD-cone-projected least squares to get near a
/// solution, then a Levenberg–Marquardt pass on the Gram parametrization
/// `E = G Gᵀ` to drive the fit below tolerance (the projected iteration
/// alone creeps once the optimum has rank-deficient factors). Success
/// certifies `rank_PSD <= r`; failure certifies nothing.
pub fn psd_search(
    matrix: &Mat<f64>,
    r: usize,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Option<PsdFactorization> {
    assert!(r >= 1);
    for restart in 0..restarts {
        let restart_seed = seed ^ 0xd1b5_4a32_d192_ed03u64.wrapping_mul(restart as u64 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed);
        if let Some(found) = psd_restart(matrix, r, max_iters, tol, &mut rng) {
            return Some(found);
        }
    }
    None
}

fn random_psd(r: usize, scale: f64, rng: &mut impl Rng) -> Mat<f64> {
    let mut g = Mat::fill(r, r, 0.0);
    for i in 0..r {
        for j in 0..r {
            *g.at_mut(i, j) = rng.gen::<f64>() - 0.2;
        }
    }
    g.matmul(&g.transpose()).map(|v| v * scale)
}

fn psd_restart(
    matrix: &Mat<f64>,
    r: usize,
    max_iters: usize,
    tol: f64,
    rng: &mut impl Rng,
) -> Option<PsdFactorization> {
    let (n, m) = (matrix.rows(), matrix.cols());
    let mean = matrix.values().iter().sum::<f64>() / (n * m) as f64;
    let scale = libm::sqrt(mean.max(1e-6)) / r as f64;
    let mut es: Vec<Mat<f64>> = (0..n).map(|_| random_psd(r, scale, rng)).collect();
    let mut fs: Vec<Mat<f64>> = (0..m).map(|_| random_psd(r, scale, rng)).collect();

    let als_iters = (max_iters / 2).clamp(20, 200);
    let mut last = f64::INFINITY;
    for _ in 0..als_iters {
        update_side(&mut es, &fs, matrix, false);
        update_side(&mut fs, &es, matrix, true);
        let fact = PsdFactorization { r, e_factors: es.clone(), f_factors: fs.clone() };
        let err = fact.reconstruct().max_abs_diff(matrix);
        if err <= tol * 0.5 {
            return Some(fact);
        }
        if err > last * 0.999 {
            break; // plateaued; hand over to the polish
        }
        last = err;
    }

    let mut gs: Vec<Mat<f64>> = es.iter().map(sqrt_psd).collect();
    let mut hs: Vec<Mat<f64>> = fs.iter().map(sqrt_psd).collect();
    if levenberg_marquardt(matrix, &mut gs, &mut hs, max_iters.min(120), tol) {
        let fact = PsdFactorization {
            r,
            e_factors: gs.iter().map(|g| g.matmul(&g.transpose())).collect(),
            f_factors: hs.iter().map(|h| h.matmul(&h.transpose())).collect(),
        };
        if fact.reconstruct().max_abs_diff(matrix) <= tol * 0.5 {
            return Some(fact);
        }
    }
    None
}

/// Symmetric square root of a PSD matrix via its eigendecomposition.
fn sqrt_psd(m: &Mat<f64>) -> Mat<f64> {
    let r = m.rows();
    let (vals, vecs) = symmetric_eigen(&symmetrize(m));
    let mut out = Mat::fill(r, r, 0.0);
    for k in 0..r {
        let lambda = libm::sqrt(vals[k].max(0.0));
        for i in 0..r {
            for j in 0..r {
                *out.at_mut(i, j) += lambda * vecs.at(i, k) * vecs.at(j, k);
            }
        }
    }
    out
}

/// Damped Gauss–Newton on the residuals `tr(G_aGᵀ_a H_bHᵀ_b) - P_ab`.
/// Returns true when the maximum absolute residual fell below `tol / 2`.
fn levenberg_marquardt(
    matrix: &Mat<f64>,
    gs: &mut Vec<Mat<f64>>,
    hs: &mut Vec<Mat<f64>>,
    max_iters: usize,
    tol: f64,
) -> bool {
    let (n, m) = (matrix.rows(), matrix.cols());
    let r = gs.first().map_or(0, Mat::rows);
    let per = r * r;
    let params = (n + m) * per;
    let mut lambda = 1e-4;

    let residuals = |gs: &[Mat<f64>], hs: &[Mat<f64>]| -> Vec<f64> {
        let es: Vec<Mat<f64>> = gs.iter().map(|g| g.matmul(&g.transpose())).collect();
        let fs: Vec<Mat<f64>> = hs.iter().map(|h| h.matmul(&h.transpose())).collect();
        let mut out = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                out.push(trace_product(&es[a], &fs[b]) - matrix.at(a, b));
            }
        }
        out
    };
    let sq = |e: &[f64]| e.iter().map(|v| v * v).sum::<f64>();

    let mut res = residuals(gs, hs);
    let mut cost = sq(&res);
    for _ in 0..max_iters {
        if res.iter().all(|v| libm::fabs(*v) <= tol * 0.5) {
            return true;
        }
        // Jacobian: d tr(E_a F_b)/dG_a = 2 F_b G_a, d/dH_b = 2 E_a H_b.
        let es: Vec<Mat<f64>> = gs.iter().map(|g| g.matmul(&g.transpose())).collect();
        let fs: Vec<Mat<f64>> = hs.iter().map(|h| h.matmul(&h.transpose())).collect();
        let mut jac = Mat::fill(n * m, params, 0.0);
        for a in 0..n {
            for b in 0..m {
                let row = a * m + b;
                let dg = fs[b].matmul(&gs[a]);
                for p in 0..per {
                    *jac.at_mut(row, a * per + p) = 2.0 * dg.values()[p];
                }
                let dh = es[a].matmul(&hs[b]);
                for p in 0..per {
                    *jac.at_mut(row, (n + b) * per + p) = 2.0 * dh.values()[p];
                }
            }
        }
        let jt = jac.transpose();
        let jtj = jt.matmul(&jac);
        let mut rhs = alloc::vec![0.0; params];
        for p in 0..params {
            for k in 0..n * m {
                rhs[p] -= jt.at(p, k) * res[k];
            }
        }

        let mut improved = false;
        for _ in 0..8 {
            let mut damped = jtj.clone();
            for i in 0..params {
                *damped.at_mut(i, i) += lambda * (1.0 + jtj.at(i, i));
            }
            if let Some(delta) = solve_linear(&damped, &rhs) {
                let apply = |ms: &[Mat<f64>], offset: usize| -> Vec<Mat<f64>> {
                    ms.iter()
                        .enumerate()
                        .map(|(idx, mat)| {
                            let mut out = mat.clone();
                            for p in 0..per {
                                let v = out.values()[p] + delta[(offset + idx) * per + p];
                                *out.at_mut(p / r, p % r) = v;
                            }
                            out
                        })
                        .collect()
                };
                let cand_g = apply(gs, 0);
                let cand_h = apply(hs, n);
                let cand_res = residuals(&cand_g, &cand_h);
                let cand_cost = sq(&cand_res);
                if cand_cost < cost {
                    *gs = cand_g;
                    *hs = cand_h;
                    res = cand_res;
                    cost = cand_cost;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 8.0;
        }
        if !improved {
            return res.iter().all(|v| libm::fabs(*v) <= tol * 0.5);
        }
    }
    res.iter().all(|v| libm::fabs(*v) <= tol * 0.5)
}

/// Least-squares update of one side's factors against the fixed other
/// side (the trace pairing is linear in each factor), followed by
/// projection onto the PSD cone. `transposed` selects whether the updated
/// factors index rows or columns of the matrix.
fn update_side(updating: &mut [Mat<f64>], fixed: &[Mat<f64>], matrix: &Mat<f64>, transposed: bool) {
    let r = fixed.first().map_or(0, Mat::rows);
    let dim = r * r;
    // Normal matrix G^T G of the design whose rows are vec(fixed_k); the
    // trace pairing of symmetric matrices is the flat dot product.
    let mut gram = Mat::fill(dim, dim, 0.0);
    for f in fixed {
        for p in 0..dim {
            for q in 0..dim {
                *gram.at_mut(p, q) += f.values()[p] * f.values()[q];
            }
        }
    }
    let trace: f64 = (0..dim).map(|i| *gram.at(i, i)).sum();
    for i in 0..dim {
        *gram.at_mut(i, i) += 1e-10 * trace.max(1e-12);
    }

    for (idx, target) in updating.iter_mut().enumerate() {
        let mut rhs = alloc::vec![0.0; dim];
        for (k, f) in fixed.iter().enumerate() {
            let p = if transposed { *matrix.at(k, idx) } else { *matrix.at(idx, k) };
            for q in 0..dim {
                rhs[q] += f.values()[q] * p;
            }
        }
        if let Some(x) = solve_linear(&gram, &rhs) {
            let solved = Mat::new(r, r, x).expect("square solve");
            *target = project_psd(&solved);
        }
    }
}
