//! Exact rectangle-cover lower bound on the nonnegative rank.
//!
//! Each rank-1 term of a nonnegative factorization is supported on a
//! combinatorial rectangle (a row set times a column set) lying inside the
//! support of the matrix, so the minimum number of such rectangles needed
//! to cover every nonzero entry is a lower bound on the nonnegative rank.
//!
//! The search is exact: enumerate the maximal rectangles of the support
//! (they are the closed row-set/column-set pairs), then branch-and-bound
//! over set covers. Refused above `max_entries` nonzeros to keep the worst
//! case bounded.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Default cap on the number of nonzero entries for the exact search.
pub const DEFAULT_MAX_SUPPORT: usize = 24;

/// Minimum number of support rectangles covering all nonzero entries.
pub fn rectangle_cover_lower_bound<T: Scalar>(matrix: &Mat<T>, max_entries: usize) -> Result<usize> {
    let support = Support::new(matrix);
    if support.cells.is_empty() {
        return Ok(0);
    }
    if support.cells.len() > max_entries {
        return Err(Error::TooLarge { entries: support.cells.len(), max: max_entries });
    }
    let rects = support.maximal_rectangles();
    Ok(min_cover(&support, &rects))
}

struct Support {
    /// (row, col) of each nonzero, in row-major order.
    cells: Vec<(usize, usize)>,
    /// Column bitmask of nonzeros per row.
    row_mask: Vec<u64>,
    rows: usize,
}

impl Support {
    fn new<T: Scalar>(matrix: &Mat<T>) -> Self {
        assert!(matrix.cols() <= 64, "support representation capped at 64 columns");
        let mut cells = Vec::new();
        let mut row_mask = vec![0u64; matrix.rows()];
        for r in 0..matrix.rows() {
            for c in 0..matrix.cols() {
                if !matrix.at(r, c).is_zero() {
                    cells.push((r, c));
                    row_mask[r] |= 1 << c;
                }
            }
        }
        Support { cells, row_mask, rows: matrix.rows() }
    }

    fn cell_bit(&self, r: usize, c: usize) -> Option<usize> {
        self.cells.iter().position(|&cell| cell == (r, c))
    }

    /// Maximal support rectangles as bitmasks over the cell list.
    ///
    /// Column sets of maximal rectangles are exactly the intersections of
    /// row supports, so close the row supports under pairwise intersection
    /// and expand each closed column set to all rows that contain it.
    fn maximal_rectangles(&self) -> Vec<u64> {
        assert!(self.cells.len() <= 64);
        let mut closed: Vec<u64> = Vec::new();
        for &mask in &self.row_mask {
            if mask != 0 && !closed.contains(&mask) {
                closed.push(mask);
            }
        }
        let mut frontier = closed.clone();
        while let Some(mask) = frontier.pop() {
            for i in 0..closed.len() {
                let inter = mask & closed[i];
                if inter != 0 && !closed.contains(&inter) {
                    closed.push(inter);
                    frontier.push(inter);
                }
            }
        }

        let mut rects: Vec<u64> = Vec::new();
        for &colset in &closed {
            let mut cellmask = 0u64;
            for r in 0..self.rows {
                if self.row_mask[r] & colset == colset {
                    for c in 0..64 {
                        if colset & (1 << c) != 0 {
                            let bit = self.cell_bit(r, c).expect("support cell");
                            cellmask |= 1 << bit;
                        }
                    }
                }
            }
            if cellmask != 0 && !rects.contains(&cellmask) {
                rects.push(cellmask);
            }
        }
        // Drop rectangles dominated by a strict superset.
        let snapshot = rects.clone();
        rects.retain(|&r| !snapshot.iter().any(|&o| o != r && o & r == r));
        rects
    }
}

/// Exact minimum set cover by branch and bound.
fn min_cover(support: &Support, rects: &[u64]) -> usize {
    let n = support.cells.len();
    let universe: u64 = if n == 64 { !0 } else { (1 << n) - 1 };

    // Greedy warm start for the initial upper bound.
    let mut best = {
        let mut covered = 0u64;
        let mut picks = 0;
        while covered != universe {
            let pick = rects
                .iter()
                .max_by_key(|&&r| (r & !covered).count_ones())
                .expect("rectangles cover the support");
            covered |= pick;
            picks += 1;
        }
        picks
    };

    let max_rect = rects.iter().map(|r| r.count_ones()).max().unwrap_or(1) as usize;
    branch(universe, 0, rects, max_rect, &mut best);
    best
}

fn branch(uncovered: u64, chosen: usize, rects: &[u64], max_rect: usize, best: &mut usize) {
    if uncovered == 0 {
        if chosen < *best {
            *best = chosen;
        }
        return;
    }
    let remaining = uncovered.count_ones() as usize;
    // Any cover needs at least ceil(remaining / max_rect) more rectangles.
    if chosen + remaining.div_ceil(max_rect) >= *best {
        return;
    }
    // Branch on the uncovered cell with the fewest candidate rectangles.
    let mut pivot = 0;
    let mut fewest = usize::MAX;
    for bit in 0..64u32 {
        if uncovered & (1 << bit) == 0 {
            continue;
        }
        let count = rects.iter().filter(|&&r| r & (1 << bit) != 0).count();
        if count < fewest {
            fewest = count;
            pivot = bit;
        }
    }
    for &r in rects.iter().filter(|&&r| r & (1 << pivot) != 0) {
        branch(uncovered & !r, chosen + 1, rects, max_rect, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn complement_of_identity_needs_three() {
        // Independent oracle for the frozen value 3: enumerate every
        // rectangle of the support directly (all row subsets x column
        // subsets that avoid the diagonal) and show no two of them cover
        // the six off-diagonal cells.
        let m = from_rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let mut all_rects: Vec<Vec<(usize, usize)>> = Vec::new();
        for rowset in 1u32..8 {
            for colset in 1u32..8 {
                let rows: Vec<usize> = (0..3).filter(|r| rowset & (1 << r) != 0).collect();
                let cols: Vec<usize> = (0..3).filter(|c| colset & (1 << c) != 0).collect();
                if rows.iter().all(|&r| cols.iter().all(|&c| *m.at(r, c) != 0.0)) {
                    all_rects.push(
                        rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).collect(),
                    );
                }
            }
        }
        let support: Vec<(usize, usize)> =
            (0..3).flat_map(|r| (0..3).map(move |c| (r, c))).filter(|&(r, c)| r != c).collect();
        let mut two_cover_exists = false;
        for a in &all_rects {
            for b in &all_rects {
                if support.iter().all(|cell| a.contains(cell) || b.contains(cell)) {
                    two_cover_exists = true;
                }
            }
        }
        assert!(!two_cover_exists);

        assert_eq!(rectangle_cover_lower_bound(&m, 24).unwrap(), 3);
    }

    #[test]
    fn all_positive_is_one_rectangle() {
        let m = from_rows(&[&[0.25, 0.25], &[0.25, 0.25]]);
        assert_eq!(rectangle_cover_lower_bound(&m, 24).unwrap(), 1);
    }

    #[test]
    fn diagonal_needs_isolated_cells() {
        let m = from_rows(&[&[0.5, 0.0], &[0.0, 0.5]]);
        assert_eq!(rectangle_cover_lower_bound(&m, 24).unwrap(), 2);
        let m4 = Mat::from_rows(&[
            vec![0.25, 0.0, 0.0, 0.0],
            vec![0.0, 0.25, 0.0, 0.0],
            vec![0.0, 0.0, 0.25, 0.0],
            vec![0.0, 0.0, 0.0, 0.25],
        ])
        .unwrap();
        assert_eq!(rectangle_cover_lower_bound(&m4, 24).unwrap(), 4);
    }

    #[test]
    fn zero_matrix_needs_nothing() {
        let m = from_rows(&[&[0.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(rectangle_cover_lower_bound(&m, 24).unwrap(), 0);
    }

    #[test]
    fn oversized_support_refused() {
        let m = Mat::fill(5, 5, 0.04);
        let err = rectangle_cover_lower_bound(&m, 24).unwrap_err();
        assert!(matches!(err, Error::TooLarge { entries: 25, max: 24 }));
    }
}
