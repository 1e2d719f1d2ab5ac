//! Spectral layer: closed-form spectral predictions, finite-section
//! (truncated) spectra of the tridiagonal operators, identification of the
//! coefficient sequences with Wilson/Askey–Wilson recurrences, direct
//! eigenfunctions on the q-lattice, and the q-transform identities that
//! realise the spectral decomposition of the bounded q-difference case.

use crate::error::{Error, Result};
use crate::families::measure::gauss_legendre_rule;
use crate::families::{askey_wilson_rates, wilson_rates, FamilyData};
use crate::operators::{
    apply_t_q, q1_down_coeff, q1_up_coeff, GridFunction, JacobiOperatorParams, QCase,
    QOperatorParams,
};
use crate::specialfn::series::basic_hypergeometric_terminating_dd;
use crate::specialfn::{
    q_pochhammer, q_pochhammer_inf, q_pochhammer_pair_inf, NeumaierSum, SeriesParam, SeriesParams,
};
use crate::tridiag::{closed_jacobi_coeffs, closed_q_coeffs};

/// Which closed-form description a prediction was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionSource {
    /// Differential operator: continuous half-line band plus at most one
    /// finite family of discrete points.
    JacobiOperator,
    /// Same operator at the deflation parameter, where the first basis
    /// vector splits off the eigenvalue 0.
    JacobiDeflated,
    /// Bounded q-difference operator: compact band plus finitely many
    /// discrete points outside it.
    BoundedQOperator,
    /// Unbounded q-difference operator: containment in `[0, ∞)` only.
    UnboundedQOperator,
}

/// Closed-form spectral prediction: continuous bands (with ±∞ endpoints
/// where unbounded) and finitely many discrete points.
#[derive(Debug, Clone)]
pub struct SpectralPrediction {
    pub continuous_bands: Vec<(f64, f64)>,
    pub discrete_points: Vec<f64>,
    pub source: PredictionSource,
}

/// All eigenvalues of a finite section, sorted ascending, with the
/// per-eigenvalue enclosure width guaranteed by the bisection solver.
#[derive(Debug, Clone)]
pub struct TruncatedSpectrum {
    pub eigenvalues: Vec<f64>,
    pub enclosure_widths: Vec<f64>,
}

/// Nearest finite-section eigenvalue to one predicted discrete point.
#[derive(Debug, Clone, Copy)]
pub struct DiscreteMatch {
    pub predicted: f64,
    pub nearest: f64,
    pub gap: f64,
}

/// Comparison of a prediction against a finite-section spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub discrete_matches: Vec<DiscreteMatch>,
    /// Fraction of truncated eigenvalues inside a predicted band dilated by
    /// the tolerance.
    pub inside_band_fraction: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub band_infimum: f64,
    pub band_supremum: f64,
}

/// Spectral prediction for the Jacobi-case operator at real shift
/// parameter δ: continuous band `(−∞, −(α+1)²/2)` and the discrete family
/// `−(α+1)²/2 + 2(w+k)²` over integers `k ≥ 0` with `w + k < 0`, where `w`
/// runs over `{(1+α)/2 + δ, (1−α)/2 + β − δ}` (at most one of the two
/// families is nonempty since the two `w` values sum to `1 + β > 0`).
pub fn predict_jacobi(alpha: f64, beta: f64, delta: f64) -> Result<SpectralPrediction> {
    check_jacobi_range(alpha, beta)?;
    let edge = -0.5 * (alpha + 1.0) * (alpha + 1.0);
    let mut points = Vec::new();
    for w in [
        0.5 * (1.0 + alpha) + delta,
        0.5 * (1.0 - alpha) + beta - delta,
    ] {
        let mut k = 0.0;
        while w + k < 0.0 {
            let shifted = w + k;
            points.push(edge + 2.0 * shifted * shifted);
            k += 1.0;
        }
    }
    points.sort_by(f64::total_cmp);
    Ok(SpectralPrediction {
        continuous_bands: vec![(f64::NEG_INFINITY, edge)],
        discrete_points: points,
        source: PredictionSource::JacobiOperator,
    })
}

/// Prediction at the deflation parameter δ = 1+β, where the constant term
/// vanishes and the first basis vector carries the exact eigenvalue 0 (it
/// arises as the `k = 0` member of the second discrete family).
pub fn predict_jacobi_deflated(alpha: f64, beta: f64) -> Result<SpectralPrediction> {
    let mut prediction = predict_jacobi(alpha, beta, 1.0 + beta)?;
    prediction.source = PredictionSource::JacobiDeflated;
    Ok(prediction)
}

/// Prediction from the constant term γ directly. Inverting
/// `γ = −(α+δ+1)(β−δ+1)` gives `δ = ½((β−α) ± √D)` with
/// `D = (β−α)² + 4(γ + (α+1)(β+1))`; the two roots swap the two discrete
/// families, so either yields the same prediction. `D < 0` is the
/// complex-shift branch, which has no discrete spectrum.
pub fn predict_jacobi_from_gamma(alpha: f64, beta: f64, gamma: f64) -> Result<SpectralPrediction> {
    check_jacobi_range(alpha, beta)?;
    let diff = beta - alpha;
    let discriminant = diff * diff + 4.0 * (gamma + (alpha + 1.0) * (beta + 1.0));
    if discriminant < 0.0 {
        return Ok(SpectralPrediction {
            continuous_bands: vec![(f64::NEG_INFINITY, -0.5 * (alpha + 1.0) * (alpha + 1.0))],
            discrete_points: Vec::new(),
            source: PredictionSource::JacobiOperator,
        });
    }
    predict_jacobi(alpha, beta, 0.5 * (diff + discriminant.sqrt()))
}

/// Spectral prediction for the bounded q-difference operator: band
/// `[(1−√(aq))², (1+√(aq))²]` plus the discrete points
/// `(1 − q^{−k}/c)(1 − acq^{1+k})` for `|q^k c √(aq)| > 1` and
/// `(1 − bq^{l+1}/c)(1 − acq^{−l}/b)` for `|q^l (b/c)√(q/a)| > 1`.
pub fn predict_q1(params: &QOperatorParams) -> Result<SpectralPrediction> {
    if params.case != QCase::ShiftA {
        return Err(Error::invalid("case", "prediction applies to the a-shift"));
    }
    let QOperatorParams { a, b, c, q, .. } = *params;
    let s = (a * q).sqrt();
    let mut points = Vec::new();
    let mut scale = c * s;
    let mut k = 0i32;
    while scale.abs() > 1.0 {
        points.push((1.0 - q.powi(-k) / c) * (1.0 - a * c * q.powi(1 + k)));
        scale *= q;
        k += 1;
    }
    if b != 0.0 {
        let mut scale = b / c * (q / a).sqrt();
        let mut l = 0i32;
        while scale.abs() > 1.0 {
            points.push((1.0 - b * q.powi(l + 1) / c) * (1.0 - a * c * q.powi(-l) / b));
            scale *= q;
            l += 1;
        }
    }
    points.sort_by(f64::total_cmp);
    Ok(SpectralPrediction {
        continuous_bands: vec![((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))],
        discrete_points: points,
        source: PredictionSource::BoundedQOperator,
    })
}

/// Containment prediction for the unbounded q-difference operator: when the
/// eigenvalue sequence is strictly positive the closed operator is
/// self-adjoint with spectrum in `[0, ∞)`. Fails with a sign-assumption
/// error when some `Λ_n^γ` is not positive.
pub fn predict_q2(params: &QOperatorParams) -> Result<SpectralPrediction> {
    if params.case != QCase::ShiftB {
        return Err(Error::invalid("case", "prediction applies to the b-shift"));
    }
    let mut n = 0i64;
    loop {
        let lam = params.lambda_gamma(n);
        if lam <= 0.0 {
            return Err(Error::SignAssumptionViolated(format!(
                "eigenvalue is not positive at n = {n}: {lam}"
            )));
        }
        // Both factors of q^n Λ_n^γ increase towards 1; once they clear 1/2
        // every later eigenvalue is positive.
        let qn1 = params.q.powi(n as i32 + 1);
        if (params.a * params.c * qn1).abs() < 0.5
            && (params.b * qn1 / params.c).abs() < 0.5
        {
            break;
        }
        n += 1;
    }
    Ok(SpectralPrediction {
        continuous_bands: vec![(0.0, f64::INFINITY)],
        discrete_points: Vec::new(),
        source: PredictionSource::UnboundedQOperator,
    })
}

/// Eigenvalues of the symmetric tridiagonal section with diagonal
/// `diag[0..n]` and off-diagonal `|off[0..n−1]|` (the spectrum is invariant
/// under the diagonal ±1 gauge, so signs of `off` are immaterial).
pub fn truncated_spectrum(off: &[f64], diag: &[f64], n: usize) -> Result<TruncatedSpectrum> {
    if n == 0 {
        return Err(Error::invalid("n", "section size must be at least 1"));
    }
    if diag.len() < n || off.len() + 1 < n {
        return Err(Error::invalid(
            "sequences",
            format!("need {n} diagonal and {} off-diagonal entries", n - 1),
        ));
    }
    let d: Vec<f64> = diag[..n].to_vec();
    let o: Vec<f64> = off[..n - 1].iter().map(|v| v.abs()).collect();
    let (eigenvalues, enclosure_widths) = crate::eigen::eigenvalues_with_enclosures(&d, &o)
        .into_iter()
        .unzip();
    Ok(TruncatedSpectrum {
        eigenvalues,
        enclosure_widths,
    })
}

/// Compares a closed-form prediction against a finite section: nearest
/// eigenvalue per predicted discrete point, fraction of eigenvalues inside
/// the dilated band, and the spectrum extremes against the band hull.
pub fn compare_spectrum(
    prediction: &SpectralPrediction,
    truncated: &TruncatedSpectrum,
    band_tolerance: f64,
) -> SpectrumReport {
    let eigenvalues = &truncated.eigenvalues;
    let discrete_matches = prediction
        .discrete_points
        .iter()
        .map(|&p| {
            let nearest = eigenvalues
                .iter()
                .copied()
                .min_by(|x, y| (x - p).abs().total_cmp(&(y - p).abs()))
                .unwrap_or(f64::NAN);
            DiscreteMatch {
                predicted: p,
                nearest,
                gap: (nearest - p).abs(),
            }
        })
        .collect();
    let inside = eigenvalues
        .iter()
        .filter(|&&ev| {
            prediction
                .continuous_bands
                .iter()
                .any(|&(lo, hi)| ev >= lo - band_tolerance && ev <= hi + band_tolerance)
        })
        .count();
    let band_infimum = prediction
        .continuous_bands
        .iter()
        .map(|&(lo, _)| lo)
        .fold(f64::INFINITY, f64::min);
    let band_supremum = prediction
        .continuous_bands
        .iter()
        .map(|&(_, hi)| hi)
        .fold(f64::NEG_INFINITY, f64::max);
    SpectrumReport {
        discrete_matches,
        inside_band_fraction: inside as f64 / eigenvalues.len() as f64,
        min_eigenvalue: eigenvalues.first().copied().unwrap_or(f64::NAN),
        max_eigenvalue: eigenvalues.last().copied().unwrap_or(f64::NAN),
        band_infimum,
        band_supremum,
    }
}

/// Matches the half-scaled Jacobi-case coefficients against the orthonormal
/// recurrence of the Wilson family with parameters
/// `((1+α)/2, (1+α)/2 + δ, (1−α)/2 + β − δ, (1+α)/2)`.
///
/// The identification sends multiplication by the Wilson argument `y` to
/// `−(w₀² + ·)` on the half-scaled side: with rates `(A_n, C_n)` of the
/// family, `|a_n^γ|/2 = √(A_n C_{n+1})` and `b_n^γ/2 = −(A_n + C_n)`.
/// Returns the maximum relative deviation over `n ≤ n_max`.
pub fn match_jacobi_recurrence(
    alpha: f64,
    beta: f64,
    delta: f64,
    n_max: usize,
) -> Result<f64> {
    check_jacobi_range(alpha, beta)?;
    let params = JacobiOperatorParams::from_delta(alpha, beta, delta)?;
    let w = [
        0.5 * (1.0 + alpha),
        0.5 * (1.0 + alpha) + delta,
        0.5 * (1.0 - alpha) + beta - delta,
        0.5 * (1.0 + alpha),
    ];
    let mut max_dev = 0.0f64;
    for n in 0..=n_max {
        let (a_n, b_n) = closed_jacobi_coeffs(&params, n)?;
        let (rate_a, rate_c) = wilson_rates(&w, n);
        let (_, next_c) = wilson_rates(&w, n + 1);
        let off_sq = rate_a * next_c;
        if !(off_sq > 0.0) {
            return Err(Error::SignAssumptionViolated(format!(
                "matched family loses positivity at n = {n}: {off_sq}"
            )));
        }
        max_dev = max_dev
            .max(relative_gap(0.5 * a_n.abs(), off_sq.sqrt()))
            .max(relative_gap(0.5 * b_n, -(rate_a + rate_c)));
    }
    Ok(max_dev)
}

/// Deflated variant at δ = 1+β: after splitting off the zero row the
/// remaining coefficients (shifted down by one index) match the Wilson
/// family `((1+α)/2, (1−α)/2, (3+α)/2, β + (3+α)/2)`.
pub fn match_jacobi_deflated_recurrence(alpha: f64, beta: f64, n_max: usize) -> Result<f64> {
    check_jacobi_range(alpha, beta)?;
    let params = JacobiOperatorParams::from_delta(alpha, beta, 1.0 + beta)?;
    let w = [
        0.5 * (1.0 + alpha),
        0.5 * (1.0 - alpha),
        0.5 * (3.0 + alpha),
        beta + 0.5 * (3.0 + alpha),
    ];
    let mut max_dev = 0.0f64;
    for n in 0..=n_max {
        let (a_n, b_n) = closed_jacobi_coeffs(&params, n + 1)?;
        let (rate_a, rate_c) = wilson_rates(&w, n);
        let (_, next_c) = wilson_rates(&w, n + 1);
        let off_sq = rate_a * next_c;
        if !(off_sq > 0.0) {
            return Err(Error::SignAssumptionViolated(format!(
                "matched family loses positivity at n = {n}: {off_sq}"
            )));
        }
        max_dev = max_dev
            .max(relative_gap(0.5 * a_n.abs(), off_sq.sqrt()))
            .max(relative_gap(0.5 * b_n, -(rate_a + rate_c)));
    }
    Ok(max_dev)
}

/// Matches the a-shift coefficients against the orthonormal Askey–Wilson
/// recurrence with parameters `(√(aq), c√(aq), (b/c)√(q/a), √(aq))` under
/// the affine eigenvalue map `λ = 1 + aq − 2√(aq)·x`: with rates
/// `(A_n, C_n)`, `|a_n^γ| = √(aq)·√(A_n C_{n+1})` and
/// `b_n^γ = √(aq)·(A_n + C_n)`. Returns the max relative deviation.
pub fn match_q_recurrence(params: &QOperatorParams, n_max: usize) -> Result<f64> {
    if params.case != QCase::ShiftA {
        return Err(Error::invalid("case", "matching applies to the a-shift"));
    }
    let QOperatorParams { a, b, c, q, .. } = *params;
    let s = (a * q).sqrt();
    let t = [s, c * s, b / c * (q / a).sqrt(), s];
    let mut max_dev = 0.0f64;
    for n in 0..=n_max {
        let (a_n, b_n) = closed_q_coeffs(params, n)?;
        let (rate_a, rate_c) = askey_wilson_rates(&t, q, n);
        let (_, next_c) = askey_wilson_rates(&t, q, n + 1);
        let off_sq = rate_a * next_c;
        if !(off_sq > 0.0) {
            return Err(Error::SignAssumptionViolated(format!(
                "matched family loses positivity at n = {n}: {off_sq}"
            )));
        }
        max_dev = max_dev
            .max(relative_gap(a_n.abs(), s * off_sq.sqrt()))
            .max(relative_gap(b_n, s * (rate_a + rate_c)));
    }
    Ok(max_dev)
}

/// Direct eigenfunction candidate of the a-shift operator at spectral
/// parameter λ: `y_λ(qᵏ) = p_k(λ)/√(w̃_k)` where `p_k` follows the
/// orthonormal recurrence with parameters `(c√(aq), (b/c)√(q/a))` in the
/// variable `2x = (aq + 1 − λ)/√(aq)` and `w̃_k = (aq)^k (bq;q)_k/(q;q)_k`
/// is the lattice mass normalised to `w̃_0 = 1`.
pub fn direct_eigenfunction_q1(
    params: &QOperatorParams,
    lambda: f64,
    k_count: usize,
) -> Result<GridFunction> {
    if params.case != QCase::ShiftA {
        return Err(Error::invalid("case", "construction applies to the a-shift"));
    }
    let QOperatorParams { a, b, c, q, .. } = *params;
    let s = (a * q).sqrt();
    let sum = c * s + b / c * (q / a).sqrt();
    let two_x = (a * q + 1.0 - lambda) / s;
    let mut values = Vec::with_capacity(k_count);
    // p_k via the three-term recurrence, w̃_k by its ratio; both upward
    // (stable: the candidate is the dominant direction in k).
    let mut p_prev = 0.0f64;
    let mut p = 1.0f64;
    let mut mass = 1.0f64;
    let mut q_pow = 1.0f64;
    for _ in 0..k_count {
        values.push(p / mass.sqrt());
        let q_pow_next = q_pow * q;
        let off_prev = ((1.0 - q_pow) * (1.0 - b * q_pow)).sqrt();
        let off_next = ((1.0 - q_pow_next) * (1.0 - b * q_pow_next)).sqrt();
        let p_next = ((two_x - sum * q_pow) * p - off_prev * p_prev) / off_next;
        p_prev = p;
        p = p_next;
        mass *= a * q * (1.0 - b * q_pow_next) / (1.0 - q_pow_next);
        q_pow = q_pow_next;
    }
    GridFunction::new(values, q)
}

/// Maximum scale-normalised residual `|(T^γ y)(qᵏ) − λ y(qᵏ)|` of an
/// eigenfunction candidate over interior lattice indices `1 ≤ k ≤ K−2`
/// (the last index is polluted by lattice truncation). The scale is
/// `max(1, Σ|stencil terms|)` so cancellation-heavy rows are judged against
/// the sizes actually subtracted.
pub fn eigenfunction_residual_q1(
    params: &QOperatorParams,
    y: &GridFunction,
    lambda: f64,
) -> f64 {
    let out = apply_t_q(params, y);
    let values = y.values();
    let q = y.q();
    let gamma = params.gamma();
    let mut worst = 0.0f64;
    let mut q_pow = 1.0;
    for k in 0..values.len().saturating_sub(1) {
        let q_pow_k1 = q_pow * q;
        if k >= 1 {
            let up = q1_up_coeff(params, q_pow_k1);
            let down = q1_down_coeff(q_pow);
            let scale = (up * (values[k + 1] - values[k])).abs()
                + (down * (values[k - 1] - values[k])).abs()
                + (gamma * q_pow * values[k]).abs()
                + (lambda * values[k]).abs();
            let residual = (out.values()[k] - lambda * values[k]).abs() / scale.max(1.0);
            worst = worst.max(residual);
        }
        q_pow = q_pow_k1;
    }
    worst
}

/// Truncated spectral transform
/// `(Vf)(x) = Σ_k f(qᵏ)·(√(aq))ᵏ/(q;q)_k · Q_k(x; c√(aq), (b/c)√(q/a) | q)`
/// summed over the grid of `f`; returns the value and the geometric tail
/// estimate `|last summand|·√(aq)/(1−√(aq))`.
pub fn v_transform(f: &GridFunction, params: &QOperatorParams, x: f64) -> Result<(f64, f64)> {
    let QOperatorParams { a, b, c, q, .. } = *params;
    if (f.q() - q) != 0.0 {
        return Err(Error::invalid("f", "grid base must match the operator"));
    }
    let s = (a * q).sqrt();
    let big_a = c * s;
    let big_b = b / c * (q / a).sqrt();
    let qs = basis_polynomials(x, big_a, big_b, q, f.len());
    let mut sum = NeumaierSum::new();
    let mut weight = 1.0f64; // (√(aq))^k/(q;q)_k
    let mut q_pow = 1.0f64;
    let mut last = 0.0f64;
    for (k, &fk) in f.values().iter().enumerate() {
        last = fk * weight * qs[k];
        sum.add(last);
        weight *= s / (1.0 - q * q_pow);
        q_pow *= q;
    }
    Ok((sum.value(), last.abs() * s / (1.0 - s)))
}

/// Closed form of the transform of a basis polynomial: `V p_n` equals the
/// Askey–Wilson polynomial with parameters
/// `(√(aq), c√(aq), (b/c)√(q/a), √(aq))` at `x = cos θ`, times
/// `(aq)^{n/2} (acq^{n+1};q)_∞ (bq^{n+1}/c;q)_∞ /
///  ((aq;q)_n · |(√(aq) e^{iθ};q)_∞|²)`.
pub fn v_transform_polynomial_closed_form(
    params: &QOperatorParams,
    n: usize,
    theta: f64,
) -> Result<f64> {
    let QOperatorParams { a, b, c, q, .. } = *params;
    let s = (a * q).sqrt();
    let t = [s, c * s, b / c * (q / a).sqrt(), s];
    let family = FamilyData::askey_wilson(t, q)?;
    let prefactor = (a * q).powf(0.5 * n as f64)
        * q_pochhammer_inf(a * c * q.powi(n as i32 + 1), q)?
        * q_pochhammer_inf(b * q.powi(n as i32 + 1) / c, q)?
        / (q_pochhammer(a * q, q, n)? * q_pochhammer_pair_inf(s, theta.cos(), q)?);
    Ok(prefactor * family.eval(n, theta.cos())?)
}

/// Both sides of the basis-polynomial transform against a free geometric
/// weight `tᵏ` and free second-family parameters `(c₂, d₂)`:
///
/// LHS: `Σ_k tᵏ/(q;q)_k · p_n(qᵏ; a, b; q) · Q_k(cos θ; c₂, d₂ | q)`,
///
/// RHS: `(tc₂, td₂;q)_∞ / (te^{iθ}, te^{−iθ};q)_∞ ·
///       4φ3(q^{−n}, abq^{n+1}, te^{iθ}, te^{−iθ}; aq, tc₂, td₂; q, q)`.
///
/// Returns `(lhs, rhs)` with the LHS truncated at `k_terms` summands.
#[allow(clippy::too_many_arguments)]
pub fn general_transform_sides(
    a: f64,
    b: f64,
    q: f64,
    c2: f64,
    d2: f64,
    t: f64,
    n: usize,
    theta: f64,
    k_terms: usize,
) -> Result<(f64, f64)> {
    if !(t.abs() < 1.0) {
        return Err(Error::invalid("t", format!("need |t| < 1, got {t}")));
    }
    let family = FamilyData::little_q_jacobi(a, b, q)?;
    let x = theta.cos();
    let qs = basis_polynomials(x, c2, d2, q, k_terms);
    let mut lhs = NeumaierSum::new();
    let mut weight = 1.0f64; // t^k/(q;q)_k
    let mut q_pow = 1.0f64;
    for &qk in &qs {
        lhs.add(weight * family.eval(n, q_pow)? * qk);
        weight *= t / (1.0 - q * q_pow);
        q_pow *= q;
    }
    let series = SeriesParams {
        degree: n,
        numerator: vec![
            SeriesParam::Real(a * b * q.powi(n as i32 + 1)),
            SeriesParam::QConjugatePair {
                modulus: t,
                cos_angle: x,
            },
        ],
        denominator: vec![
            SeriesParam::Real(a * q),
            SeriesParam::Real(t * c2),
            SeriesParam::Real(t * d2),
        ],
        argument: q,
    };
    // The terminating series at argument q cancels to q^{n(n−1)/2} of its
    // largest term, so it is summed in double-double precision.
    let rhs = q_pochhammer_inf(t * c2, q)? * q_pochhammer_inf(t * d2, q)?
        / q_pochhammer_pair_inf(t, x, q)?
        * basic_hypergeometric_terminating_dd(q, &series)?.to_f64();
    Ok((lhs.value(), rhs))
}

/// Pairing of the transforms of `f_n(qᵏ) = αᵏ p_n(qᵏ)` and
/// `g_m(qᵏ) = α^{−k} p_m(qᵏ)` against the continuous orthogonality measure:
/// returns `|⟨V f_n, V g_m⟩ − h_n δ_{nm}|` where `h_n` is the squared norm
/// in the lattice normalisation with unit mass at `k = 0`.
pub fn biorthogonal_pair_check(
    params: &QOperatorParams,
    alpha_scale: f64,
    n: usize,
    m: usize,
) -> Result<f64> {
    let QOperatorParams { a, b, c, q, .. } = *params;
    let s = (a * q).sqrt();
    if !(alpha_scale > s && alpha_scale < 1.0 / s) {
        return Err(Error::invalid(
            "alpha_scale",
            format!("need √(aq) < α < 1/√(aq), got {alpha_scale}"),
        ));
    }
    let big_a = c * s;
    let big_b = b / c * (q / a).sqrt();
    // The four-parameter family attached to the pairing must have a purely
    // continuous orthogonality measure for the quadrature below.
    for (name, value) in [
        ("α√(aq)", alpha_scale * s),
        ("c√(aq)", big_a),
        ("(b/c)√(q/a)", big_b),
        ("√(aq)/α", s / alpha_scale),
    ] {
        if value.abs() >= 1.0 {
            return Err(Error::invalid(
                "params",
                format!("|{name}| = {} puts mass outside the band", value.abs()),
            ));
        }
    }
    const K_TERMS: usize = 250;
    const THETA_NODES: usize = 300;
    let family = FamilyData::little_q_jacobi(a, b, q)?;
    let sigma = FamilyData::al_salam_chihara(big_a, big_b, q)?;
    let sigma_mass = sigma.norm(0)?;
    // Lattice data shared by both transforms.
    let mut p_n = Vec::with_capacity(K_TERMS);
    let mut p_m = Vec::with_capacity(K_TERMS);
    let mut q_pow = 1.0;
    for _ in 0..K_TERMS {
        p_n.push(family.eval(n, q_pow)?);
        p_m.push(family.eval(m, q_pow)?);
        q_pow *= q;
    }
    let (nodes, weights) = gauss_legendre_rule(THETA_NODES)?;
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut pairing = NeumaierSum::new();
    for (&u, &gl_w) in nodes.iter().zip(&weights) {
        let theta = half_pi * (u + 1.0);
        let x = theta.cos();
        let qs = basis_polynomials(x, big_a, big_b, q, K_TERMS);
        let mut vf = NeumaierSum::new();
        let mut vg = NeumaierSum::new();
        let mut weight = 1.0f64; // (√(aq))^k/(q;q)_k
        let mut alpha_pow = 1.0f64;
        let mut q_pow = 1.0f64;
        for k in 0..K_TERMS {
            vf.add(alpha_pow * p_n[k] * weight * qs[k]);
            vg.add(p_m[k] / alpha_pow * weight * qs[k]);
            weight *= s / (1.0 - q * q_pow);
            alpha_pow *= alpha_scale;
            q_pow *= q;
        }
        let density = sigma.weight(theta)? / sigma_mass;
        pairing.add(gl_w * half_pi * vf.value() * vg.value() * density);
    }
    let expected = if n == m {
        family.norm(n)? / family.weight(1.0)?
    } else {
        0.0
    };
    Ok((pairing.value() - expected).abs())
}

/// Coefficients of the dual recurrence in the lattice index for the b-shift
/// case, `(1−bq)·λ p_k = a_k p_{k+1} + b_k p_k + a_{k−1} p_{k−1}`:
///
/// `a_k = −√a · q^{−k−1/2} (1−bq^{k+2}) √((1−bq^{k+1})(1−q^{k+1}))`,
/// `b_k = q^{−k} (1−bq^{k+1}) (a(1−cq^{k+1}) + (1−bq^{k+1}/c))`.
pub fn direct_recurrence_q2(params: &QOperatorParams, k: usize) -> Result<(f64, f64)> {
    if params.case != QCase::ShiftB {
        return Err(Error::invalid("case", "recurrence applies to the b-shift"));
    }
    let QOperatorParams { a, b, c, q, .. } = *params;
    let k32 = k as i32;
    let qk1 = q.powi(k32 + 1);
    let a_k = -a.sqrt() * q.powi(-k32) / q.sqrt() * (1.0 - b * q * qk1)
        * ((1.0 - b * qk1) * (1.0 - qk1)).sqrt();
    let b_k = q.powi(-k32)
        * (1.0 - b * qk1)
        * (a * (1.0 - c * qk1) + (1.0 - b * qk1 / c));
    Ok((a_k, b_k))
}

/// Values `Q_0(x) … Q_{count−1}(x)` of the second-family basis polynomials
/// by their standard three-term recurrence
/// `Q_{k+1} = (2x − (c+d)qᵏ)Q_k − (1−qᵏ)(1−cdq^{k−1})Q_{k−1}`.
fn basis_polynomials(x: f64, c: f64, d: f64, q: f64, count: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(count);
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    let mut q_pow = 1.0f64;
    for _ in 0..count {
        values.push(cur);
        let next = (2.0 * x - (c + d) * q_pow) * cur
            - (1.0 - q_pow) * (1.0 - c * d * q_pow / q) * prev;
        prev = cur;
        cur = next;
        q_pow *= q;
    }
    values
}

fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(1.0)
}

fn check_jacobi_range(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > -1.0) {
        return Err(Error::invalid("alpha", format!("need α > −1, got {alpha}")));
    }
    if !(beta > -1.0) {
        return Err(Error::invalid("beta", format!("need β > −1, got {beta}")));
    }
    Ok(())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)] // index loops read clearest in assertions
mod tests {
    use super::*;

    fn q1_example() -> QOperatorParams {
        QOperatorParams::new(0.5, 0.0, 3.0, 0.5, QCase::ShiftA).unwrap()
    }

    #[test]
    fn jacobi_prediction_at_zero_parameters() {
        let pred = predict_jacobi(0.0, 0.0, 0.0).unwrap();
        assert_eq!(pred.continuous_bands, vec![(f64::NEG_INFINITY, -0.5)]);
        assert!(pred.discrete_points.is_empty());
    }

    #[test]
    fn deflated_prediction_contains_zero() {
        for (alpha, beta) in [(0.0, 0.0), (0.3, 0.7), (0.9, -0.2)] {
            let pred = predict_jacobi_deflated(alpha, beta).unwrap();
            assert!(
                pred.discrete_points.iter().any(|&p| p.abs() < 1e-14),
                "α={alpha}, β={beta}: {:?}",
                pred.discrete_points
            );
        }
    }

    #[test]
    fn gamma_form_of_the_prediction_inverts_the_shift_map() {
        // Real branch: both quadratic roots give the same prediction, so the
        // γ form must reproduce the δ form.
        for (alpha, beta, delta) in [(0.2, 0.7, -1.4), (0.0, 0.0, 1.0), (1.5, -0.3, 2.6)] {
            let gamma = -(alpha + delta + 1.0) * (beta - delta + 1.0);
            let via_gamma = predict_jacobi_from_gamma(alpha, beta, gamma).unwrap();
            let via_delta = predict_jacobi(alpha, beta, delta).unwrap();
            assert_eq!(via_gamma.continuous_bands, via_delta.continuous_bands);
            assert_eq!(
                via_gamma.discrete_points.len(),
                via_delta.discrete_points.len()
            );
            for (a, b) in via_gamma
                .discrete_points
                .iter()
                .zip(&via_delta.discrete_points)
            {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
        // Complex-shift branch: γ below the vertex of the quadratic leaves no
        // real δ and hence no discrete spectrum.
        let pred = predict_jacobi_from_gamma(0.0, 0.0, -2.0).unwrap();
        assert!(pred.discrete_points.is_empty());
        assert_eq!(pred.continuous_bands, vec![(f64::NEG_INFINITY, -0.5)]);
    }

    #[test]
    fn discrete_family_dichotomy_over_a_parameter_grid() {
        // The two membership thresholds sum to 1+β > 0, so at most one
        // family of discrete points can be nonempty.
        for alpha in [-0.5, 0.0, 0.7, 2.0] {
            for beta in [-0.5, 0.0, 1.3] {
                for delta in [-3.0, -1.5, -0.2, 0.0, 0.4, 1.0 + beta, 2.5] {
                    let first = 0.5 * (1.0 + alpha) + delta < 0.0;
                    let second = 0.5 * (1.0 - alpha) + beta - delta < 0.0;
                    assert!(!(first && second), "α={alpha} β={beta} δ={delta}");
                    let pred = predict_jacobi(alpha, beta, delta).unwrap();
                    assert_eq!(
                        !pred.discrete_points.is_empty(),
                        first || second,
                        "α={alpha} β={beta} δ={delta}"
                    );
                }
            }
        }
    }

    #[test]
    fn bounded_q_prediction_matches_the_worked_example() {
        let pred = predict_q1(&q1_example()).unwrap();
        assert_eq!(pred.continuous_bands, vec![(0.25, 2.25)]);
        assert_eq!(pred.discrete_points.len(), 1);
        assert!((pred.discrete_points[0] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn unbounded_q_prediction_checks_positivity() {
        let good = QOperatorParams::new(0.5, 0.5, 1.0, 0.5, QCase::ShiftB).unwrap();
        let pred = predict_q2(&good).unwrap();
        assert_eq!(pred.continuous_bands, vec![(0.0, f64::INFINITY)]);
        // acq > 1 makes the first factor of Λ_0^γ negative while the second
        // stays positive.
        let bad = QOperatorParams::new(0.5, 0.5, 3.0, 0.8, QCase::ShiftB).unwrap();
        assert!(matches!(
            predict_q2(&bad),
            Err(Error::SignAssumptionViolated(_))
        ));
    }

    #[test]
    fn tiny_truncations_are_exact() {
        let spec = truncated_spectrum(&[], &[0.75], 1).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.75]);
        let spec = truncated_spectrum(&[1.0], &[0.0, 0.0], 2).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn truncation_matches_characteristic_polynomial_roots() {
        // Independent oracle: the characteristic polynomial from the
        // determinant recursion, with sign-change bisection around each
        // computed eigenvalue.
        let diag = [0.3, -1.2, 0.8, 2.1, -0.4];
        let off = [1.1, 0.6, 1.7, 0.9];
        let spec = truncated_spectrum(&off, &diag, 5).unwrap();
        let char_poly = |lambda: f64| -> f64 {
            let mut p_prev = 1.0;
            let mut p = diag[0] - lambda;
            for k in 1..5 {
                let next = (diag[k] - lambda) * p - off[k - 1] * off[k - 1] * p_prev;
                p_prev = p;
                p = next;
            }
            p
        };
        for &ev in &spec.eigenvalues {
            let (mut lo, mut hi) = (ev - 1e-6, ev + 1e-6);
            assert!(
                char_poly(lo).signum() != char_poly(hi).signum(),
                "no sign change around {ev}"
            );
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if char_poly(lo).signum() == char_poly(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            assert!((root - ev).abs() < 1e-10, "{root} vs {ev}");
        }
    }

    #[test]
    fn finite_sections_interlace() {
        // Eigenvalues of the N-section interlace those of the (N+1)-section.
        let q1 = q1_example();
        let q2 = QOperatorParams::new(0.5, 0.5, 1.0, 0.5, QCase::ShiftB).unwrap();
        let jacobi = JacobiOperatorParams::from_delta(0.0, 0.0, 0.0).unwrap();
        let mut cases: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for params in [&q1, &q2] {
            let (off, diag) = (0..=200usize)
                .map(|n| closed_q_coeffs(params, n).unwrap())
                .unzip();
            cases.push((off, diag));
        }
        cases.push(
            (0..=200usize)
                .map(|n| closed_jacobi_coeffs(&jacobi, n).unwrap())
                .unzip(),
        );
        for (off, diag) in &cases {
            for n in [40usize, 200] {
                let small = truncated_spectrum(off, diag, n).unwrap().eigenvalues;
                let large = truncated_spectrum(off, diag, n + 1).unwrap().eigenvalues;
                let scale = large.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let slack = 1e3 * f64::EPSILON * scale;
                for i in 0..n {
                    assert!(large[i] <= small[i] + slack, "lower interlace at {i}");
                    assert!(small[i] <= large[i + 1] + slack, "upper interlace at {i}");
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_hold_at_unit_scale() {
        // Differential case against the four-parameter family.
        let dev = match_jacobi_recurrence(0.3, 0.7, 0.25, 12).unwrap();
        assert!(dev < 1e-13, "jacobi: {dev}");
        // Deflated variant, index shifted by one.
        let dev = match_jacobi_deflated_recurrence(0.3, 0.7, 12).unwrap();
        assert!(dev < 1e-13, "deflated: {dev}");
        // q-case, including the three-parameter degeneration at b = 0.
        let dev = match_q_recurrence(
            &QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftA).unwrap(),
            12,
        )
        .unwrap();
        assert!(dev < 1e-14, "q: {dev}");
        let dev = match_q_recurrence(&q1_example(), 30).unwrap();
        assert!(dev < 1e-11, "q at b=0: {dev}");
    }

    #[test]
    fn eigenvalue_map_endpoints() {
        // x = 1 ↦ (1−√(aq))² and x = −1 ↦ (1+√(aq))² under
        // λ = 1 + aq − 2√(aq)x.
        let QOperatorParams { a, q, .. } = q1_example();
        let s = (a * q).sqrt();
        let map = |x: f64| 1.0 + a * q - 2.0 * s * x;
        assert!((map(1.0) - (1.0 - s) * (1.0 - s)).abs() < 1e-15);
        assert!((map(-1.0) - (1.0 + s) * (1.0 + s)).abs() < 1e-15);
        let pred = predict_q1(&q1_example()).unwrap();
        assert_eq!(pred.continuous_bands[0], (map(1.0), map(-1.0)));
    }

    #[test]
    fn direct_eigenfunction_starts_at_one_and_solves_the_equation() {
        let params = q1_example();
        let k_count = 80usize;
        // One band point and the discrete point.
        for lambda in [1.0, 0.3, 1.0 / 6.0] {
            let y = direct_eigenfunction_q1(&params, lambda, k_count).unwrap();
            assert_eq!(y.values()[0], 1.0);
            let residual = eigenfunction_residual_q1(&params, &y, lambda);
            assert!(residual < 1e-12, "λ={lambda}: {residual:.3e}");
        }
        // k = 0 boundary row: the recurrence start has no p_{−1} term, and
        // the operator row at k = 0 likewise never reads a ghost value, so
        // the residual extends to k = 0.
        let lambda = 0.7;
        let y = direct_eigenfunction_q1(&params, lambda, 40).unwrap();
        let out = apply_t_q(&params, &y);
        assert!((out.values()[0] - lambda * y.values()[0]).abs() < 1e-13);
    }

    #[test]
    fn transform_of_the_first_lattice_indicator_is_constant_one() {
        let params = q1_example();
        let mut values = vec![0.0; 30];
        values[0] = 1.0;
        let f = GridFunction::new(values, 0.5).unwrap();
        for x in [-0.9, -0.3, 0.2, 0.8] {
            let (value, _) = v_transform(&f, &params, x).unwrap();
            assert_eq!(value, 1.0);
        }
    }

    #[test]
    fn transform_of_basis_polynomials_has_its_product_form() {
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftA).unwrap();
        let family = FamilyData::little_q_jacobi(0.5, 0.25, 0.5).unwrap();
        let k_terms = 220usize;
        let mut lattice = vec![Vec::new(); 9];
        let mut q_pow = 1.0f64;
        for _ in 0..k_terms {
            for (n, row) in lattice.iter_mut().enumerate() {
                row.push(family.eval(n, q_pow).unwrap());
            }
            q_pow *= 0.5;
        }
        for n in 0..=8usize {
            let f = GridFunction::new(lattice[n].clone(), 0.5).unwrap();
            for j in 1..=10usize {
                let theta = std::f64::consts::PI * j as f64 / 11.0;
                let (lhs, _) = v_transform(&f, &params, theta.cos()).unwrap();
                let rhs = v_transform_polynomial_closed_form(&params, n, theta).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0),
                    "n={n} θ={theta}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn general_transform_identity_with_free_weight() {
        for t in [0.1, 0.5] {
            for n in 0..=6usize {
                for j in [1usize, 4, 9] {
                    let theta = std::f64::consts::PI * j as f64 / 10.0;
                    let (lhs, rhs) = general_transform_sides(
                        0.5, 0.25, 0.5, 0.6, -0.3, t, n, theta, 220,
                    )
                    .unwrap();
                    assert!(
                        (lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0),
                        "t={t} n={n} θ={theta}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn transform_pairs_are_biorthogonal() {
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftA).unwrap();
        for alpha_scale in [0.8, 1.0, 1.25] {
            for n in 0..=3usize {
                for m in 0..=3usize {
                    let dev = biorthogonal_pair_check(&params, alpha_scale, n, m).unwrap();
                    assert!(dev < 1e-8, "α={alpha_scale} n={n} m={m}: {dev:.3e}");
                }
            }
        }
        // Out-of-range α is rejected.
        assert!(biorthogonal_pair_check(&params, 2.1, 0, 0).is_err());
    }

    #[test]
    fn dual_recurrence_has_positive_diagonal_and_plain_b_zero_limit() {
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftB).unwrap();
        for k in 0..=50usize {
            let (_, b_k) = direct_recurrence_q2(&params, k).unwrap();
            assert!(b_k > 0.0, "k={k}: {b_k}");
        }
        let plain = QOperatorParams::new(0.5, 0.0, 1.2, 0.5, QCase::ShiftB).unwrap();
        for k in 0..=10usize {
            let (a_k, _) = direct_recurrence_q2(&plain, k).unwrap();
            let expected =
                -0.5f64.sqrt() * 0.5f64.powi(-(k as i32)) / 0.5f64.sqrt()
                    * (1.0 - 0.5f64.powi(k as i32 + 1)).sqrt();
            assert!(
                (a_k - expected).abs() < 1e-14 * expected.abs(),
                "k={k}: {a_k} vs {expected}"
            );
        }
    }

    #[test]
    fn dual_recurrence_truncation_stays_nonnegative() {
        // The orthogonality measure of the dual recurrence sits on the same
        // half-line as the spectrum of the degree recurrence.
        for (a, b, c, q) in [(0.5, 0.5, 1.0, 0.5), (0.3, -0.5, 0.8, 0.4)] {
            let params = QOperatorParams::new(a, b, c, q, QCase::ShiftB).unwrap();
            let n = 400usize;
            let (off, diag): (Vec<f64>, Vec<f64>) = (0..n)
                .map(|k| direct_recurrence_q2(&params, k).unwrap())
                .unzip();
            // Eigenvalues of the dual section are (1−bq)·λ.
            let spec = truncated_spectrum(&off, &diag, n).unwrap();
            let min = spec.eigenvalues[0] / (1.0 - b * q);
            assert!(min >= -1e-6, "(a,b,c,q)=({a},{b},{c},{q}): {min}");
        }
    }

    #[test]
    fn compare_report_fields_are_consistent() {
        let params = q1_example();
        let pred = predict_q1(&params).unwrap();
        let (off, diag): (Vec<f64>, Vec<f64>) = (0..120usize)
            .map(|n| closed_q_coeffs(&params, n).unwrap())
            .unzip();
        let trunc = truncated_spectrum(&off, &diag, 120).unwrap();
        let report = compare_spectrum(&pred, &trunc, 1e-3);
        assert_eq!(report.band_infimum, 0.25);
        assert_eq!(report.band_supremum, 2.25);
        assert_eq!(report.discrete_matches.len(), 1);
        assert!(report.discrete_matches[0].gap < 1e-6);
        // Exactly the discrete eigenvalue falls outside the dilated band.
        let outside = (1.0 - report.inside_band_fraction) * 120.0;
        assert!((outside - 1.0).abs() < 0.5);
        assert!(report.min_eigenvalue > 0.1);
        assert!(report.max_eigenvalue < 2.25 + 1e-3);
    }
}
