//! Certified nonnegative-rank bounds and the latent-variable form of a
//! nonnegative factorization.
//!
//! Exact nonnegative rank is NP-hard in general, so the result is an
//! honest interval: certified lower bounds (linear rank, rectangle cover)
//! and a certified upper bound (an explicit factorization within the
//! residual tolerance, or the trivial per-row/per-column one). The
//! interval collapses to an exact value only when the two sides meet.

mod cover;
mod nmf;

pub use cover::{rectangle_cover_lower_bound, DEFAULT_MAX_SUPPORT};
pub use nmf::nmf_upper_bound;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Search configuration shared by the factorization-based bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RankConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub seed: u64,
    /// Nonzero-entry cap for the exact rectangle-cover search.
    pub max_support: usize,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            restarts: 32,
            max_iters: 5000,
            residual_tol: 1e-9,
            seed: 0,
            max_support: DEFAULT_MAX_SUPPORT,
        }
    }
}

/// One rank-1 term: a nonnegative row over X and column over Y.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// An explicit width-`r` nonnegative factorization with its certified
/// relative Frobenius residual.
#[derive(Debug, Clone, PartialEq)]
pub struct NnFactorization {
    pub r: usize,
    pub pairs: Vec<FactorPair>,
    pub residual: f64,
}

impl NnFactorization {
    pub fn reconstruct(&self) -> Mat<f64> {
        let rows = self.pairs.first().map_or(0, |p| p.x.len());
        let cols = self.pairs.first().map_or(0, |p| p.y.len());
        let mut out = Mat::fill(rows, cols, 0.0);
        for pair in &self.pairs {
            out.add_assign(&Mat::outer(&pair.x, &pair.y));
        }
        out
    }
}

/// Method names for lower-bound certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerBoundMethod {
    LinearRank,
    RectangleCover,
}

impl LowerBoundMethod {
    pub fn name(self) -> &'static str {
        match self {
            LowerBoundMethod::LinearRank => "linear_rank",
            LowerBoundMethod::RectangleCover => "rectangle_cover",
        }
    }
}

/// Certified interval for the nonnegative rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankBounds {
    pub lower: usize,
    pub upper: usize,
    pub lower_certificates: Vec<(LowerBoundMethod, usize)>,
    pub upper_certificate: Option<NnFactorization>,
    pub exact: bool,
}

/// The latent-variable triple `(P(Z), P(X|Z=z), P(Y|Z=z))` equivalent to a
/// nonnegative factorization of a distribution matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentDecomposition {
    pub p_z: Vec<f64>,
    pub cond_x: Vec<Vec<f64>>,
    pub cond_y: Vec<Vec<f64>>,
    /// Zero-mass components dropped during extraction.
    pub dropped: usize,
}

impl LatentDecomposition {
    pub fn r(&self) -> usize {
        self.p_z.len()
    }
}

/// Matrix rank as a lower bound on the nonnegative rank; exact elimination
/// for rational matrices, singular-value thresholding for float ones.
pub fn linear_rank<T: Scalar>(matrix: &Mat<T>) -> usize {
    T::linear_rank(matrix)
}

fn nonzero_rows<T: Scalar>(matrix: &Mat<T>) -> usize {
    (0..matrix.rows()).filter(|&r| matrix.row(r).iter().any(|v| !v.is_zero())).count()
}

/// Certified nonnegative-rank bounds.
///
/// Lower bound: the larger of the linear rank and (when the support is
/// small enough for the exact search) the rectangle-cover number. Upper
/// bound: the smallest width at which the factorization search succeeds,
/// scanning upward from the lower bound; the per-row/per-column trivial
/// factorization closes the scan when the search fails everywhere.
pub fn nonnegative_rank<T: Scalar>(matrix: &Mat<T>, config: &RankConfig) -> RankBounds {
    let lin = linear_rank(matrix);
    if lin == 0 {
        // Zero matrix: empty factorization.
        return RankBounds {
            lower: 0,
            upper: 0,
            lower_certificates: vec![(LowerBoundMethod::LinearRank, 0)],
            upper_certificate: None,
            exact: true,
        };
    }
    let mut lower_certificates = vec![(LowerBoundMethod::LinearRank, lin)];
    let mut lower = lin;
    if let Ok(cover) = rectangle_cover_lower_bound(matrix, config.max_support) {
        lower_certificates.push((LowerBoundMethod::RectangleCover, cover));
        lower = lower.max(cover);
    }

    let float = matrix.map(Scalar::to_f64);
    let trivial_rows = nonzero_rows(matrix);
    let trivial_cols = nonzero_rows(&matrix.transpose());
    let trivial = trivial_rows.min(trivial_cols);

    let mut upper = trivial;
    let mut upper_certificate = None;
    for r in lower..=trivial {
        if r == trivial {
            upper_certificate = Some(trivial_factorization(&float, trivial_rows <= trivial_cols));
            upper = r;
            break;
        }
        if config.restarts > 0 {
            if let Some(fact) = nmf_upper_bound(
                &float,
                r,
                config.restarts,
                config.max_iters,
                config.residual_tol,
                config.seed,
            ) {
                upper = r;
                upper_certificate = Some(fact);
                break;
            }
        }
    }

    RankBounds { lower, upper, lower_certificates, upper_certificate, exact: lower == upper }
}

/// Exact factorization with one rank-1 term per nonzero row (or column).
fn trivial_factorization(matrix: &Mat<f64>, by_rows: bool) -> NnFactorization {
    let m = if by_rows { matrix.clone() } else { matrix.transpose() };
    let mut pairs = Vec::new();
    for r in 0..m.rows() {
        if m.row(r).iter().all(|&v| v == 0.0) {
            continue;
        }
        let mut indicator = vec![0.0; m.rows()];
        indicator[r] = 1.0;
        let row = m.row(r).to_vec();
        if by_rows {
            pairs.push(FactorPair { x: indicator, y: row });
        } else {
            pairs.push(FactorPair { x: row, y: indicator });
        }
    }
    NnFactorization { r: pairs.len(), pairs, residual: 0.0 }
}

/// Converts a factorization of a distribution matrix into the latent
/// triple, normalizing each rank-1 term into a seed weight and two
/// conditional distributions. Zero-mass terms are dropped and counted.
pub fn factorization_to_latent(
    fact: &NnFactorization,
    mass_tol: f64,
) -> Result<LatentDecomposition> {
    let mut p_z = Vec::with_capacity(fact.pairs.len());
    let mut cond_x = Vec::with_capacity(fact.pairs.len());
    let mut cond_y = Vec::with_capacity(fact.pairs.len());
    let mut dropped = 0;
    let mut mass = 0.0;
    for pair in &fact.pairs {
        let q_x: f64 = pair.x.iter().sum();
        let q_y: f64 = pair.y.iter().sum();
        mass += q_x * q_y;
        if q_x == 0.0 || q_y == 0.0 {
            dropped += 1;
            continue;
        }
        p_z.push(q_x * q_y);
        cond_x.push(pair.x.iter().map(|v| v / q_x).collect());
        cond_y.push(pair.y.iter().map(|v| v / q_y).collect());
    }
    if p_z.is_empty() {
        return Err(Error::ZeroMassComponent);
    }
    if (mass - 1.0).abs() > mass_tol {
        return Err(Error::NotNormalized { sum: mass });
    }
    Ok(LatentDecomposition { p_z, cond_x, cond_y, dropped })
}

/// Reassembles the joint matrix `Σ_z P(z) · P(X|z) ⊗ P(Y|z)`.
pub fn latent_to_joint(dec: &LatentDecomposition) -> Mat<f64> {
    let rows = dec.cond_x.first().map_or(0, Vec::len);
    let cols = dec.cond_y.first().map_or(0, Vec::len);
    let mut out = Mat::fill(rows, cols, 0.0);
    for z in 0..dec.r() {
        let term = Mat::outer(&dec.cond_x[z], &dec.cond_y[z]);
        for i in 0..rows {
            for j in 0..cols {
                *out.at_mut(i, j) += dec.p_z[z] * term.at(i, j);
            }
        }
    }
    out
}

/// Human-readable summary of a bound interval, used by diagnostics.
pub fn describe_bounds(bounds: &RankBounds) -> String {
    if bounds.exact {
        alloc::format!("rank+ = {}", bounds.lower)
    } else {
        alloc::format!("rank+ in [{}, {}]", bounds.lower, bounds.upper)
    }
}
