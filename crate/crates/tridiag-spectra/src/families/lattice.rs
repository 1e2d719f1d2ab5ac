//! Double-double orthonormal little q-Jacobi values on the lattice {qᵏ}.
//!
//! Matrix elements of the q-difference operators are lattice sums whose
//! summands cancel to ten or more digits, so the basis values, point masses
//! and inner products are all carried in double-double precision.
//!
//! Direct series evaluation of `p_n(qᵏ)` is catastrophically ill-conditioned
//! for `k ≲ n` (the series terms exceed the value by far more than 32
//! digits), while the three-term recurrence *upward in n* is exponentially
//! unstable on the lattice. The stable scheme is Miller's algorithm: run the
//! recurrence *downward* in `n` from a starting index comfortably above the
//! turning point, where the orthonormal family is the minimal solution, then
//! normalise by the known degree-0 value. Deep lattice columns (`k ≥ n + 2`)
//! are instead evaluated by the series directly, which is well-conditioned
//! there; the crossover keeps both methods inside their stable regimes.

use crate::error::{Error, Result};
use crate::families::FamilyData;
use crate::specialfn::Dd;

/// Extra recurrence depth above the largest degree before Miller's downward
/// pass is trusted.
const MILLER_MARGIN: usize = 40;

/// Orthonormal little q-Jacobi basis tabulated on the truncated lattice.
///
/// `values[n][k]` holds `r_n(qᵏ)` where `r_n` is the orthonormal family with
/// positive off-diagonal recurrence (`r_n = (−1)ⁿ p_n/√h_n`).
pub(crate) struct LatticeBasis {
    /// Number of lattice points `q⁰ … q^{k_max−1}`.
    pub k_max: usize,
    /// Point masses `w_k`.
    pub masses: Vec<Dd>,
    /// Basis values, row per degree.
    pub values: Vec<Vec<Dd>>,
    /// Squared norms `h_n` of the series-normalised family (read by the
    /// consistency tests).
    #[allow(dead_code)]
    pub norms: Vec<Dd>,
}

impl LatticeBasis {
    /// Tabulates the basis for degrees `0..=n_max` on `k_max` lattice points.
    #[allow(clippy::needless_range_loop)] // column writes into row-major tables
    pub fn new(a: f64, b: f64, q: f64, n_max: usize, k_max: usize) -> Result<Self> {
        let family = FamilyData::little_q_jacobi(a, b, q)?;
        if k_max < 3 {
            return Err(Error::invalid(
                "k_max",
                format!("lattice needs at least 3 points, got {k_max}"),
            ));
        }
        let qd = Dd::from_f64(q);
        let (masses, h0) = masses_and_total(a, b, q, k_max);
        let norms = series_norms(a, b, q, n_max, h0);

        // Orthonormal recurrence tables deep enough for every Miller column.
        let miller_cols = k_max.min(n_max + 2);
        let depth = n_max + miller_cols + MILLER_MARGIN + 2;
        let (diag, off) = recurrence_tables(a, b, q, depth);

        let phi0 = Dd::ONE / h0.sqrt();
        let mut values = vec![vec![Dd::ZERO; k_max]; n_max + 1];

        // Miller columns: k < n_max + 2.
        let mut x = Dd::ONE;
        for k in 0..miller_cols {
            let col = miller_column(&diag, &off, x, n_max, n_max + k + MILLER_MARGIN)?;
            let scale = phi0 / col[0];
            for n in 0..=n_max {
                values[n][k] = col[n] * scale;
            }
            x = x * qd;
        }
        // Series columns: k ≥ n_max + 2 (the series argument q^{k+1} keeps
        // every term ratio below q³ there).
        for k in miller_cols..k_max {
            for n in 0..=n_max {
                let p = family.eval_dd(n, x)?;
                let signed = if n % 2 == 1 { -p } else { p };
                values[n][k] = signed / norms[n].sqrt();
            }
            x = x * qd;
        }

        Ok(LatticeBasis {
            k_max,
            masses,
            values,
            norms,
        })
    }

    /// Mass-weighted inner product `Σ_k f_k g_k w_k` over the tabulated
    /// lattice.
    pub fn inner_product(&self, f: &[Dd], g: &[Dd]) -> Dd {
        debug_assert_eq!(f.len(), self.k_max);
        debug_assert_eq!(g.len(), self.k_max);
        let mut acc = Dd::ZERO;
        for k in 0..self.k_max {
            acc = acc + f[k] * g[k] * self.masses[k];
        }
        acc
    }

    /// Row of basis values rounded to `f64`.
    #[cfg(test)]
    pub fn row_f64(&self, n: usize) -> Vec<f64> {
        self.values[n].iter().map(|v| v.to_f64()).collect()
    }
}

/// Point masses `w_0 … w_{k_max−1}` plus the total mass `h_0` (summed until
/// the geometric tail is negligible at double-double level).
fn masses_and_total(a: f64, b: f64, q: f64, k_max: usize) -> (Vec<Dd>, Dd) {
    let aq = Dd::from_f64(a) * Dd::from_f64(q);
    let qd = Dd::from_f64(q);
    let mut masses = Vec::with_capacity(k_max);
    let mut w = Dd::ONE;
    let mut total = Dd::ZERO;
    let mut qk1 = qd; // q^{k+1}
    let mut k = 0usize;
    loop {
        if k < k_max {
            masses.push(w);
        }
        total = total + w;
        // w_{k+1} = w_k · aq (1 − b q^{k+1})/(1 − q^{k+1})
        w = w * aq * (Dd::ONE - Dd::from_f64(b) * qk1) / (Dd::ONE - qk1);
        qk1 = qk1 * qd;
        k += 1;
        if k >= k_max && w.abs().to_f64() <= 1e-36 * total.to_f64() {
            break;
        }
        if k > 20_000 {
            break; // unreachable for valid parameters; aq < 1 forces decay
        }
    }
    (masses, total)
}

/// Squared norms `h_0 … h_{n_max}` from the step ratio
/// `h_n/h_{n−1} = aq (1−abq^{2n−1})(1−qⁿ)(1−bqⁿ) /
///               [(1−abq^{2n+1})(1−aqⁿ)(1−abqⁿ)]`.
fn series_norms(a: f64, b: f64, q: f64, n_max: usize, h0: Dd) -> Vec<Dd> {
    let (ad, bd, qd) = (Dd::from_f64(a), Dd::from_f64(b), Dd::from_f64(q));
    let abd = ad * bd;
    let aq = ad * qd;
    let mut norms = Vec::with_capacity(n_max + 1);
    norms.push(h0);
    let mut qn = Dd::ONE; // q^n
    for _ in 1..=n_max {
        qn = qn * qd;
        let q2n = qn * qn;
        let num = aq * (Dd::ONE - abd * q2n / qd) * (Dd::ONE - qn) * (Dd::ONE - bd * qn);
        let den =
            (Dd::ONE - abd * q2n * qd) * (Dd::ONE - ad * qn) * (Dd::ONE - abd * qn);
        let prev = *norms.last().expect("nonempty");
        norms.push(prev * num / den);
    }
    norms
}

/// Orthonormal recurrence tables `(diag, off)` in double-double precision,
/// `diag[n] = A_n + C_n` and `off[n] = √(A_n C_{n+1})`.
fn recurrence_tables(a: f64, b: f64, q: f64, depth: usize) -> (Vec<Dd>, Vec<Dd>) {
    let rates = |n: usize| -> (Dd, Dd) {
        let (ad, bd, qd) = (Dd::from_f64(a), Dd::from_f64(b), Dd::from_f64(q));
        let abd = ad * bd;
        let mut qn = Dd::ONE;
        for _ in 0..n {
            qn = qn * qd;
        }
        let q2n = qn * qn;
        let a_n = qn * (Dd::ONE - ad * qd * qn) * (Dd::ONE - abd * qd * qn)
            / ((Dd::ONE - abd * q2n * qd) * (Dd::ONE - abd * q2n * qd * qd));
        let c_n = ad * qn * (Dd::ONE - qn) * (Dd::ONE - bd * qn)
            / ((Dd::ONE - abd * q2n) * (Dd::ONE - abd * q2n * qd));
        (a_n, c_n)
    };
    let mut diag = Vec::with_capacity(depth + 1);
    let mut off = Vec::with_capacity(depth + 1);
    let mut prev = rates(0);
    for n in 0..=depth {
        let next = rates(n + 1);
        diag.push(prev.0 + prev.1);
        off.push((prev.0 * next.1).sqrt());
        prev = next;
    }
    (diag, off)
}

/// One Miller column: unnormalised orthonormal-recurrence values
/// `r_0(x) … r_{n_max}(x)` (up to a common factor), computed by a projective
/// downward pass from index `start` followed by a stored downward pass.
fn miller_column(
    diag: &[Dd],
    off: &[Dd],
    x: Dd,
    n_max: usize,
    start: usize,
) -> Result<Vec<Dd>> {
    debug_assert!(start > n_max);
    debug_assert!(start + 1 < diag.len());
    let mut u = Dd::ONE;
    let mut v = Dd::ZERO;
    for n in ((n_max + 1)..=start).rev() {
        let next = ((x - diag[n]) * u - off[n] * v) / off[n - 1];
        v = u;
        u = next;
        // Rescale every step so the projective pair never overflows.
        let s = u.abs().to_f64() + v.abs().to_f64();
        if s > 0.0 {
            let sd = Dd::from_f64(s);
            u = u / sd;
            v = v / sd;
        }
    }
    let mut vals = vec![Dd::ZERO; n_max + 1];
    let mut shifts = vec![0u32; n_max + 1];
    vals[n_max] = u;
    let mut cur = u;
    let mut above = v;
    let mut shift = 0u32;
    // The stored pass spans the full trench between the junk scale at
    // depth and the O(1) scale at degree 0, which can exceed the f64
    // exponent range for deep columns; rescale by an exact power of two
    // whenever the working pair grows past 2^512 and record the frame each
    // entry was stored in.
    const RESCALE: f64 = 7.458340731200207e-155; // 2^{-512}
    for n in (1..=n_max).rev() {
        let mut next = ((x - diag[n]) * cur - off[n] * above) / off[n - 1];
        above = cur;
        if next.abs().to_f64() > 1e150 {
            next = next * Dd::from_f64(RESCALE);
            above = above * Dd::from_f64(RESCALE);
            shift += 1;
        }
        cur = next;
        vals[n - 1] = cur;
        shifts[n - 1] = shift;
    }
    // Bring every entry into the degree-0 frame; entries whose true size
    // lies below the f64 range flush to zero.
    for n in 1..=n_max {
        for _ in shifts[n]..shifts[0] {
            vals[n] = vals[n] * Dd::from_f64(RESCALE);
        }
    }
    if vals[0].to_f64() == 0.0 {
        return Err(Error::IndeterminateNormalisation(
            "Miller column has vanishing degree-0 component".to_string(),
        ));
    }
    Ok(vals)
}
