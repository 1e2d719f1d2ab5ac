//! Eigenvalues of symmetric tridiagonal matrices by Sturm-sequence bisection.
//!
//! Bisection is preferred over QR-type iterations here because it is
//! bit-for-bit deterministic regardless of thread count, monotone in the
//! matrix entries, and lets individual eigenvalues be located independently —
//! which also makes the computation embarrassingly parallel.

use rayon::prelude::*;

/// Number of eigenvalues of the symmetric tridiagonal matrix
/// `(diag, offdiag)` that are strictly less than `x`, by the classic
/// LDLᵀ-based Sturm count with pivot safeguarding.
fn count_below(diag: &[f64], offdiag: &[f64], x: f64) -> usize {
    debug_assert_eq!(offdiag.len() + 1, diag.len());
    // Underflow-level pivot floor sized so that off²/pivot cannot overflow
    // (the matrices built here keep off-diagonals far below √MAX). It must
    // not scale with the diagonal: a matrix can combine huge diagonal
    // entries with eigenvalues of order one, and an entry-scaled floor
    // would swallow every pivot near those small eigenvalues.
    let pivmin = {
        let max_off_sq = offdiag.iter().map(|e| e * e).fold(0.0f64, f64::max);
        f64::MIN_POSITIVE * max_off_sq.max(1.0)
    };
    let mut count = 0usize;
    let mut d = diag[0] - x;
    for i in 1..=diag.len() {
        // A vanishing pivot is replaced by a tiny negative one (and counted),
        // matching the convention that keeps the count monotone in `x`.
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
        if i < diag.len() {
            d = (diag[i] - x) - offdiag[i - 1] * offdiag[i - 1] / d;
        }
    }
    count
}

/// Gershgorin bounds `(lo, hi)` enclosing the whole spectrum.
pub(crate) fn gershgorin_bounds(diag: &[f64], offdiag: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i < n - 1 { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// All eigenvalues of the symmetric tridiagonal matrix `(diag, offdiag)` in
/// ascending order, each paired with the width of its final bisection
/// enclosure. Every eigenvalue is refined to rounding level relative to its
/// own magnitude — not the overall spectral scale — so small eigenvalues of
/// a matrix with huge entries elsewhere still come out to full precision
/// (the midpoint-degeneration guard bounds the iteration count even for an
/// eigenvalue that is exactly zero).
pub(crate) fn eigenvalues_with_enclosures(diag: &[f64], offdiag: &[f64]) -> Vec<(f64, f64)> {
    assert!(!diag.is_empty(), "empty matrix");
    assert_eq!(
        offdiag.len() + 1,
        diag.len(),
        "off-diagonal length must be one less than the diagonal"
    );
    if diag.len() == 1 {
        return vec![(diag[0], 0.0)];
    }
    let (lo, hi) = gershgorin_bounds(diag, offdiag);
    let n = diag.len();
    (0..n)
        .into_par_iter()
        .map(|index| {
            // Bisect for the eigenvalue with `index` eigenvalues below it.
            let (mut a, mut b) = (lo, hi);
            while b - a > f64::EPSILON * a.abs().max(b.abs()) {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(diag, offdiag, mid) > index {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            (0.5 * (a + b), b - a)
        })
        .collect()
}

/// The eigenvalues alone, ascending.
pub(crate) fn eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    eigenvalues_with_enclosures(diag, offdiag)
        .into_iter()
        .map(|(value, _)| value)
        .collect()
}
