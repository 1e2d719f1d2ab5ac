//! Quadrature rules and inner products for the canonical measures.
//!
//! Continuous measures are integrated with Gauss rules whose nodes come from
//! the Sturm-bisection eigensolver applied to the monic Jacobi matrix of the
//! rule's weight (Golub–Welsch, with Christoffel weights evaluated through
//! the orthonormal recurrence). The q-lattice measure is summed directly
//! with compensated summation and an explicit geometric tail check; the
//! Wilson measure on [0, ∞) is integrated piecewise until the superexponential
//! weight decay makes further pieces negligible.

use crate::eigen;
use crate::error::{Error, Result};
use crate::families::{jacobi_monic_beta, jacobi_monic_diag, FamilyData};
use crate::specialfn::NeumaierSum;

/// Hard ceiling on the polynomial degree the quadrature layer will handle.
const MAX_DEGREE: usize = 4000;

/// Gauss rule for the Jacobi weight `(1−x)^α (1+x)^β` on (−1, 1):
/// returns `(nodes, weights)` with `n_nodes` points (exact to degree
/// `2·n_nodes − 1`).
pub(crate) fn gauss_jacobi_rule(
    alpha: f64,
    beta: f64,
    n_nodes: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    assert!(n_nodes >= 1);
    let diag: Vec<f64> = (0..n_nodes).map(|k| jacobi_monic_diag(alpha, beta, k)).collect();
    let off: Vec<f64> = (1..n_nodes)
        .map(|k| jacobi_monic_beta(alpha, beta, k).sqrt())
        .collect();
    let nodes = eigen::eigenvalues(&diag, &off);
    let mass = FamilyData::jacobi(alpha, beta)?.norm(0)?;
    let p0 = 1.0 / mass.sqrt();
    let weights = nodes
        .iter()
        .map(|&x| {
            // Christoffel weight: 1 / Σ_k p̂_k(x)² over the orthonormal family.
            let mut sum = p0 * p0;
            let mut prev = 0.0;
            let mut cur = p0;
            for k in 0..n_nodes - 1 {
                let next = ((x - diag[k]) * cur - if k > 0 { off[k - 1] } else { 0.0 } * prev)
                    / off[k];
                prev = cur;
                cur = next;
                sum += cur * cur;
            }
            1.0 / sum
        })
        .collect();
    Ok((nodes, weights))
}

/// Gauss–Legendre rule on [−1, 1].
pub(crate) fn gauss_legendre_rule(n_nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    gauss_jacobi_rule(0.0, 0.0, n_nodes)
}

/// Inner product against the canonical measure of `family`; see
/// [`FamilyData::inner_product`].
pub(crate) fn inner_product(
    family: &FamilyData,
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    degree_bound: usize,
) -> Result<f64> {
    if degree_bound > MAX_DEGREE {
        return Err(Error::QuadratureDegreeTooLow {
            degree: degree_bound,
            capacity: MAX_DEGREE,
        });
    }
    match *family {
        FamilyData::Jacobi { alpha, beta } => {
            let (nodes, weights) = gauss_jacobi_rule(alpha, beta, degree_bound / 2 + 9)?;
            Ok(nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| w * f(x) * g(x))
                .collect::<NeumaierSum>()
                .value())
        }
        FamilyData::LittleQJacobi { a, b, q } => {
            lattice_sum(a, b, q, &|x| f(x) * g(x))
        }
        FamilyData::Wilson { .. } => {
            // Integrate over x ∈ [0, ∞) piecewise; the polynomial variable is
            // y = x², doubling the polynomial degree per piece.
            let per_piece = (degree_bound + 12).clamp(40, 200);
            let (gl_nodes, gl_weights) = gauss_legendre_rule(per_piece)?;
            let mut total = NeumaierSum::new();
            let mut small_run = 0usize;
            let mut piece_abs = 0.0;
            for m in 0..400usize {
                let (lo, hi) = (m as f64, m as f64 + 1.0);
                let mut piece = NeumaierSum::new();
                for (&u, &w) in gl_nodes.iter().zip(&gl_weights) {
                    let x = lo + 0.5 * (u + 1.0) * (hi - lo);
                    let y = x * x;
                    piece.add(0.5 * (hi - lo) * w * f(y) * g(y) * family.weight(x)?);
                }
                let p = piece.value();
                total.add(p);
                piece_abs = p.abs();
                if piece_abs <= 1e-16 * total.value().abs().max(f64::MIN_POSITIVE) {
                    small_run += 1;
                    if small_run >= 3 {
                        return Ok(total.value());
                    }
                } else {
                    small_run = 0;
                }
            }
            Err(Error::LatticeTruncation {
                tail: piece_abs / total.value().abs().max(f64::MIN_POSITIVE),
                k_max: 400,
            })
        }
        FamilyData::AskeyWilson { .. } | FamilyData::AlSalamChihara { .. } => {
            let n_nodes = 300 + 4 * degree_bound;
            let (gl_nodes, gl_weights) = gauss_legendre_rule(n_nodes)?;
            let half_pi = 0.5 * std::f64::consts::PI;
            let mut total = NeumaierSum::new();
            for (&u, &w) in gl_nodes.iter().zip(&gl_weights) {
                let theta = half_pi * (u + 1.0);
                let x = theta.cos();
                total.add(half_pi * w * f(x) * g(x) * family.weight(theta)?);
            }
            Ok(total.value())
        }
    }
}

/// Compensated sum of `h(qᵏ)·w_k` over the q-lattice, with a geometric tail
/// check. The masses are accumulated by their exact step ratio
/// `w_{k+1}/w_k = aq·(1 − b q^{k+1})/(1 − q^{k+1})`.
pub(crate) fn lattice_sum(a: f64, b: f64, q: f64, h: &dyn Fn(f64) -> f64) -> Result<f64> {
    const K_CAP: usize = 600;
    const SMALL_RUN_NEEDED: usize = 8;
    let mut acc = NeumaierSum::new();
    let mut mass = 1.0;
    let mut point = 1.0;
    let mut small_run = 0usize;
    let mut last_rel = f64::INFINITY;
    for k in 0..K_CAP {
        let term = mass * h(point);
        acc.add(term);
        last_rel = term.abs() / acc.value().abs().max(f64::MIN_POSITIVE);
        if last_rel <= 1e-18 {
            small_run += 1;
            if small_run >= SMALL_RUN_NEEDED {
                return Ok(acc.value());
            }
        } else {
            small_run = 0;
        }
        mass *= a * q * (1.0 - b * q.powi(k as i32 + 1)) / (1.0 - q.powi(k as i32 + 1));
        point *= q;
    }
    Err(Error::LatticeTruncation {
        tail: last_rel,
        k_max: K_CAP,
    })
}
