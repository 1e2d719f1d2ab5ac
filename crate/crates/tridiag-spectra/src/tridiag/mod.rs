//! Tridiagonalisation framework: connection coefficients between a family
//! pair, Jacobi-matrix coefficients of the operator, birth–death rates, and
//! truncated formal eigenvectors / Poisson kernels.
//!
//! The setting: two orthogonal families — `P_n` orthogonal for a measure μ
//! and `p_n` for ν with `dμ = r dν`, `r` of degree one — give orthonormal
//! bases `Φ_n` and `φ_n` linked by `φ_n = A_n Φ_n + B_n Φ_{n−1}` with exactly
//! two terms. An operator `T^γ = r·(L+γ)` whose `L` has the `Φ_n` as
//! eigenfunctions (eigenvalue `Λ_n`) is then tridiagonal in the `φ_n` basis:
//!
//! `T^γ φ_n = a_n φ_{n+1} + b_n φ_n + a_{n−1} φ_{n−1}`
//!
//! with `a_n = Λ_n^γ A_n B_{n+1}` and `b_n = Λ_n^γ A_n² + Λ_{n−1}^γ B_n²`.
//! The connection coefficients are evaluated through cancellation-free ratio
//! formulas (never through raw leading coefficients or norms, which over- or
//! underflow far before the coefficient sequences do).

use crate::error::{Error, Result};
use crate::families::lattice::LatticeBasis;
use crate::families::poly::CoeffPolynomial;
use crate::families::{jacobi_monic_beta, jacobi_monic_diag, FamilyData};
use crate::operators::{
    apply_t_jacobi, apply_t_q_dd, JacobiOperatorParams, QCase, QOperatorParams,
};
use crate::specialfn::NeumaierSum;

/// Eigenvalue provider `n ↦ Λ_n^γ` injected into the generic coefficient
/// path (with `Λ_{−1}^γ = 0` expected at `n = −1`).
pub type LambdaProvider<'a> = &'a dyn Fn(i64) -> f64;

/// A big/small family pair with `dμ = r dν`.
#[derive(Debug, Clone)]
pub struct FamilyPair {
    big: FamilyData,
    small: FamilyData,
    r: CoeffPolynomial,
    kind: PairKind,
}

#[derive(Debug, Clone, Copy)]
enum PairKind {
    JacobiShift { alpha: f64, beta: f64 },
    QShiftA { a: f64, b: f64, q: f64 },
    QShiftB { a: f64, b: f64, q: f64 },
}

/// Connection and Jacobi-matrix coefficient table for one operator,
/// computed once and then read-only.
#[derive(Debug, Clone)]
pub struct TridiagCoefficients {
    /// `A_0 … A_{n_max}`.
    pub connection_a: Vec<f64>,
    /// `B_0 … B_{n_max+1}` (so `B_{n+1}` is available for `a_{n_max}`);
    /// `B_0 = 0`.
    pub connection_b: Vec<f64>,
    /// `a_0 … a_{n_max}`.
    pub off_diagonal: Vec<f64>,
    /// `b_0 … b_{n_max}`.
    pub diagonal: Vec<f64>,
    /// Constant term of the operator the table was built for.
    pub gamma: f64,
}

/// Birth–death reinterpretation of the coefficient sequences:
/// `birth_n = |Λ_n^γ| A_n²`, `death_n = |Λ_{n−1}^γ| B_n²` (`death_0 = 0`),
/// with the constant signs of `a_n` and `Λ_n^γ` recorded.
#[derive(Debug, Clone)]
pub struct BirthDeathRates {
    pub birth: Vec<f64>,
    pub death: Vec<f64>,
    /// Sign of the off-diagonal coefficients `a_n` (ε).
    pub coefficient_sign: i8,
    /// Sign of the eigenvalues `Λ_n^γ` (η); `+1` places the spectrum of the
    /// closed operator in `[0, ∞)`.
    pub eigenvalue_sign: i8,
}

impl FamilyPair {
    /// Jacobi pair: big family `(α+1, β)`, small `(α, β)`, `r(x) = 1−x`.
    pub fn jacobi_shift(alpha: f64, beta: f64) -> Result<Self> {
        Ok(FamilyPair {
            big: FamilyData::jacobi(alpha + 1.0, beta)?,
            small: FamilyData::jacobi(alpha, beta)?,
            r: CoeffPolynomial::from_coefficients(vec![1.0, -1.0]),
            kind: PairKind::JacobiShift { alpha, beta },
        })
    }

    /// Little q-Jacobi pair for the a-shift: big `(aq, b)`, small `(a, b)`,
    /// `r(x) = x`.
    pub fn q_shift_a(a: f64, b: f64, q: f64) -> Result<Self> {
        Ok(FamilyPair {
            big: FamilyData::little_q_jacobi(a * q, b, q)?,
            small: FamilyData::little_q_jacobi(a, b, q)?,
            r: CoeffPolynomial::from_coefficients(vec![0.0, 1.0]),
            kind: PairKind::QShiftA { a, b, q },
        })
    }

    /// Little q-Jacobi pair for the b-shift: big `(a, bq)`, small `(a, b)`,
    /// `r(x) = (1−bqx)/(1−bq)` (constant 1 when `b = 0`, where the pair
    /// degenerates to twice the same family).
    pub fn q_shift_b(a: f64, b: f64, q: f64) -> Result<Self> {
        let denom = 1.0 - b * q;
        Ok(FamilyPair {
            big: FamilyData::little_q_jacobi(a, b * q, q)?,
            small: FamilyData::little_q_jacobi(a, b, q)?,
            r: CoeffPolynomial::from_coefficients(vec![1.0 / denom, -b * q / denom]),
            kind: PairKind::QShiftB { a, b, q },
        })
    }

    /// Family orthogonal for μ.
    pub fn big(&self) -> &FamilyData {
        &self.big
    }

    /// Family orthogonal for ν.
    pub fn small(&self) -> &FamilyData {
        &self.small
    }

    /// The degree-one factor with `dμ = r dν`.
    pub fn r(&self) -> &CoeffPolynomial {
        &self.r
    }

    /// Connection coefficients `(A_n, B_n)` of `φ_n = A_n Φ_n + B_n Φ_{n−1}`
    /// (`B_0 = 0`), via the per-pair ratio formulas
    /// `A_n = (lc p_n / lc P_n)·√(H_n/h_n)` and
    /// `B_n = lc(r)·√(h_n/H_{n−1})·(lc P_{n−1} / lc p_n)`.
    pub fn connection(&self, n: usize) -> Result<(f64, f64)> {
        let nf = n as f64;
        match self.kind {
            PairKind::JacobiShift { alpha, beta } => {
                let s = 2.0 * nf + alpha + beta;
                let lc_small_big = (nf + alpha + beta + 1.0) / (s + 1.0);
                let norm_big_small = 2.0 * (s + 1.0) * (nf + alpha + 1.0)
                    / ((s + 2.0) * (nf + alpha + beta + 1.0));
                let a_n = lc_small_big * positive_sqrt(norm_big_small, "H_n/h_n")?;
                let b_n = if n == 0 {
                    0.0
                } else {
                    let norm_small_big =
                        0.5 * s * (nf + beta) / ((s + 1.0) * nf);
                    let lc_big_small = 2.0 * nf / s;
                    -positive_sqrt(norm_small_big, "h_n/H_{n−1}")? * lc_big_small
                };
                Ok((a_n, b_n))
            }
            PairKind::QShiftA { a, b, q } => {
                let qn = q.powi(n as i32);
                let ab = a * b;
                let lc_small_big = (1.0 - ab * q * qn) * (1.0 - a * q * qn)
                    / ((1.0 - ab * q * qn * qn) * (1.0 - a * q));
                let norm_big_small = qn * (1.0 - a * q).powi(2) * (1.0 - ab * q * qn * qn)
                    / ((1.0 - ab * q * q * qn * qn)
                        * (1.0 - a * q * qn)
                        * (1.0 - ab * q * qn));
                let a_n = lc_small_big * positive_sqrt(norm_big_small, "H_n/h_n")?;
                let b_n = if n == 0 {
                    0.0
                } else {
                    // h_n/H_{n−1} = a q^{2−n} (1−abq^{2n})(1−qⁿ)(1−bqⁿ)
                    //               / ((1−aq)² (1−abq^{2n+1})).
                    let norm_small_big = a * q * q / qn
                        * (1.0 - ab * qn * qn)
                        * (1.0 - qn)
                        * (1.0 - b * qn)
                        / ((1.0 - a * q).powi(2) * (1.0 - ab * q * qn * qn));
                    let lc_big_small =
                        -qn / q * (1.0 - a * q) / (1.0 - ab * qn * qn);
                    positive_sqrt(norm_small_big, "h_n/H_{n−1}")? * lc_big_small
                };
                Ok((a_n, b_n))
            }
            PairKind::QShiftB { a, b, q } => {
                let qn = q.powi(n as i32);
                let ab = a * b;
                let lc_small_big = (1.0 - ab * q * qn) / (1.0 - ab * q * qn * qn);
                let norm_big_small = (1.0 - ab * q * qn * qn) * (1.0 - b * q * qn)
                    / ((1.0 - ab * q * q * qn * qn)
                        * (1.0 - b * q)
                        * (1.0 - ab * q * qn));
                let a_n = lc_small_big * positive_sqrt(norm_big_small, "H_n/h_n")?;
                let b_n = if n == 0 {
                    0.0
                } else {
                    // h_n/H_{n−1} = aq (1−abq^{2n})(1−qⁿ)(1−bq)
                    //               / ((1−abq^{2n+1})(1−aqⁿ)).
                    let norm_small_big = a * q * (1.0 - ab * qn * qn) * (1.0 - qn)
                        * (1.0 - b * q)
                        / ((1.0 - ab * q * qn * qn) * (1.0 - a * qn));
                    let lc_big_small = -qn / q * (1.0 - a * qn) / (1.0 - ab * qn * qn);
                    let lc_r = -b * q / (1.0 - b * q);
                    lc_r * positive_sqrt(norm_small_big, "h_n/H_{n−1}")? * lc_big_small
                };
                Ok((a_n, b_n))
            }
        }
    }

    /// Coefficients of multiplication by `r` in the `φ_n` basis:
    /// `r·φ_n = up·φ_{n+1} + mid·φ_n + down·φ_{n−1}` with
    /// `up = A_n B_{n+1}`, `mid = A_n² + B_n²`, `down = A_{n−1} B_n`.
    pub fn m_recurrence(&self, n: usize) -> Result<(f64, f64, f64)> {
        let (a_n, b_n) = self.connection(n)?;
        let (_, b_next) = self.connection(n + 1)?;
        let up = a_n * b_next;
        let mid = a_n * a_n + b_n * b_n;
        let down = if n == 0 {
            0.0
        } else {
            let (a_prev, _) = self.connection(n - 1)?;
            a_prev * b_n
        };
        Ok((up, mid, down))
    }

    /// Generic-path Jacobi-matrix coefficients
    /// `(a_n, b_n) = (Λ_n^γ A_n B_{n+1}, Λ_n^γ A_n² + Λ_{n−1}^γ B_n²)`.
    pub fn matrix_coeffs(&self, lambda_gamma: LambdaProvider, n: usize) -> Result<(f64, f64)> {
        let (a_n, b_n) = self.connection(n)?;
        let (_, b_next) = self.connection(n + 1)?;
        let lam_n = lambda_gamma(n as i64);
        let lam_prev = lambda_gamma(n as i64 - 1);
        Ok((
            lam_n * a_n * b_next,
            lam_n * a_n * a_n + lam_prev * b_n * b_n,
        ))
    }

    /// Builds the full coefficient table for degrees `0 ..= n_max`.
    pub fn coefficient_table(
        &self,
        lambda_gamma: LambdaProvider,
        gamma: f64,
        n_max: usize,
    ) -> Result<TridiagCoefficients> {
        let mut connection_a = Vec::with_capacity(n_max + 1);
        let mut connection_b = Vec::with_capacity(n_max + 2);
        for n in 0..=n_max + 1 {
            let (a_n, b_n) = self.connection(n)?;
            if n <= n_max {
                connection_a.push(a_n);
            }
            connection_b.push(b_n);
        }
        let mut off_diagonal = Vec::with_capacity(n_max + 1);
        let mut diagonal = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let lam_n = lambda_gamma(n as i64);
            let lam_prev = lambda_gamma(n as i64 - 1);
            off_diagonal.push(lam_n * connection_a[n] * connection_b[n + 1]);
            diagonal.push(
                lam_n * connection_a[n] * connection_a[n]
                    + lam_prev * connection_b[n] * connection_b[n],
            );
        }
        Ok(TridiagCoefficients {
            connection_a,
            connection_b,
            off_diagonal,
            diagonal,
            gamma,
        })
    }

    /// Birth–death rates over degrees `0 ..= n_max`; fails with a
    /// sign-assumption error when the eigenvalue or coefficient signs are
    /// not constant (or an eigenvalue vanishes) over the range.
    pub fn birth_death_rates(
        &self,
        lambda_gamma: LambdaProvider,
        n_max: usize,
    ) -> Result<BirthDeathRates> {
        let mut birth = Vec::with_capacity(n_max + 1);
        let mut death = Vec::with_capacity(n_max + 1);
        let mut eta = 0i8;
        let mut eps = 0i8;
        for n in 0..=n_max {
            let lam = lambda_gamma(n as i64);
            if lam == 0.0 {
                return Err(Error::SignAssumptionViolated(format!(
                    "eigenvalue vanishes at n = {n}"
                )));
            }
            let sign = if lam > 0.0 { 1 } else { -1 };
            if eta == 0 {
                eta = sign;
            } else if eta != sign {
                return Err(Error::SignAssumptionViolated(format!(
                    "eigenvalue sign flips at n = {n}"
                )));
            }
            let (a_n, b_n) = self.connection(n)?;
            let (_, b_next) = self.connection(n + 1)?;
            birth.push(lam.abs() * a_n * a_n);
            death.push(if n == 0 {
                0.0
            } else {
                lambda_gamma(n as i64 - 1).abs() * b_n * b_n
            });
            let off = lam * a_n * b_next;
            let off_sign = if off > 0.0 {
                1
            } else if off < 0.0 {
                -1
            } else {
                0
            };
            if off_sign != 0 {
                if eps == 0 {
                    eps = off_sign;
                } else if eps != off_sign {
                    return Err(Error::SignAssumptionViolated(format!(
                        "off-diagonal sign flips at n = {n}"
                    )));
                }
            }
        }
        Ok(BirthDeathRates {
            birth,
            death,
            coefficient_sign: eps,
            eigenvalue_sign: eta,
        })
    }
}

/// Closed-form coefficients `(a_n^γ, b_n^γ)` for the Jacobi case, transcribed
/// from the worked-out displays (the quadratic δ-products are expressed
/// through `Λ_n^γ`, on which alone they depend — this also covers complex δ
/// with real γ):
///
/// `a_n^γ = −2Λ_n^γ/(2n+α+β+2) ·
///   √((n+1)(n+α+1)(n+β+1)(n+α+β+1)/((2n+α+β+1)(2n+α+β+3)))`
///
/// `b_n^γ = 2Λ_n^γ(n+α+1)(n+α+β+1)/((2n+α+β+1)(2n+α+β+2))
///        + 2Λ_{n−1}^γ n(n+β)/((2n+α+β)(2n+α+β+1))` (second term absent at
/// `n = 0`, where its general form is 0/0).
pub fn closed_jacobi_coeffs(params: &JacobiOperatorParams, n: usize) -> Result<(f64, f64)> {
    let (alpha, beta) = (params.alpha, params.beta);
    let nf = n as f64;
    let s = 2.0 * nf + alpha + beta;
    let lam_n = params.lambda_gamma(n as i64);
    let radicand = (nf + 1.0) * (nf + alpha + 1.0) * (nf + beta + 1.0)
        * (nf + alpha + beta + 1.0)
        / ((s + 1.0) * (s + 3.0));
    let a_n = -2.0 * lam_n / (s + 2.0) * positive_sqrt(radicand, "Jacobi radicand")?;
    let mut b_n = 2.0 * lam_n * (nf + alpha + 1.0) * (nf + alpha + beta + 1.0)
        / ((s + 1.0) * (s + 2.0));
    if n > 0 {
        let lam_prev = params.lambda_gamma(n as i64 - 1);
        b_n += 2.0 * lam_prev * nf * (nf + beta) / (s * (s + 1.0));
    }
    Ok((a_n, b_n))
}

/// Closed-form coefficients for the two q-difference cases.
///
/// a-shift:
/// `a_n^γ = −√(aq)·(1−acq^{n+1})(1−bq^{n+1}/c)/(1−abq^{2n+2}) · √R_n`,
/// `b_n^γ = (1−acq^{n+1})(1−aq^{n+1})(1−abq^{n+1})(1−bq^{n+1}/c)
///           /((1−abq^{2n+1})(1−abq^{2n+2}))
///        + aq(1−qⁿ)(1−acqⁿ)(1−bqⁿ)(1−bqⁿ/c)/((1−abq^{2n})(1−abq^{2n+1}))`,
///
/// b-shift:
/// `a_n^γ = bq√(aq)/(1−bq) · (1−acq^{n+1})(1−bq^{n+1}/c)/(1−abq^{2n+2}) · √R_n`,
/// `b_n^γ = q^{−n}(1−acq^{n+1})(1−bq^{n+1}/c)(1−abq^{n+1})(1−bq^{n+1})
///           /((1−bq)(1−abq^{2n+1})(1−abq^{2n+2}))
///        + ab²q^{n+2}(1−acqⁿ)(1−bqⁿ/c)(1−qⁿ)(1−aqⁿ)
///           /((1−bq)(1−abq^{2n})(1−abq^{2n+1}))`,
///
/// with the shared radical
/// `R_n = (1−q^{n+1})(1−aq^{n+1})(1−bq^{n+1})(1−abq^{n+1})
///        /((1−abq^{2n+1})(1−abq^{2n+3}))`.
pub fn closed_q_coeffs(params: &QOperatorParams, n: usize) -> Result<(f64, f64)> {
    let QOperatorParams { a, b, c, q, case } = *params;
    let n32 = n as i32;
    let qn = q.powi(n32);
    let qn1 = qn * q;
    let ab = a * b;
    let radicand = (1.0 - qn1) * (1.0 - a * qn1) * (1.0 - b * qn1) * (1.0 - ab * qn1)
        / ((1.0 - ab * q * qn * qn) * (1.0 - ab * q * q * q * qn * qn));
    let root = positive_sqrt(radicand, "q radicand")?;
    let shift_products = (1.0 - a * c * qn1) * (1.0 - b * qn1 / c);
    match case {
        QCase::ShiftA => {
            let a_n = -(a * q).sqrt() * shift_products / (1.0 - ab * q * q * qn * qn) * root;
            let mut b_n = (1.0 - a * c * qn1) * (1.0 - a * qn1) * (1.0 - ab * qn1)
                * (1.0 - b * qn1 / c)
                / ((1.0 - ab * q * qn * qn) * (1.0 - ab * q * q * qn * qn));
            b_n += a * q * (1.0 - qn) * (1.0 - a * c * qn) * (1.0 - b * qn)
                * (1.0 - b * qn / c)
                / ((1.0 - ab * qn * qn) * (1.0 - ab * q * qn * qn));
            Ok((a_n, b_n))
        }
        QCase::ShiftB => {
            let a_n = b * q * (a * q).sqrt() / (1.0 - b * q) * shift_products
                / (1.0 - ab * q * q * qn * qn)
                * root;
            let mut b_n = (1.0 - a * c * qn1) * (1.0 - b * qn1 / c) * (1.0 - ab * qn1)
                * (1.0 - b * qn1)
                / (qn
                    * (1.0 - b * q)
                    * (1.0 - ab * q * qn * qn)
                    * (1.0 - ab * q * q * qn * qn));
            b_n += a * b * b * q * q * qn * (1.0 - a * c * qn) * (1.0 - b * qn / c)
                * (1.0 - qn)
                * (1.0 - a * qn)
                / ((1.0 - b * q) * (1.0 - ab * qn * qn) * (1.0 - ab * q * qn * qn));
            Ok((a_n, b_n))
        }
    }
}

/// Values `r_0(λ) … r_{count−1}(λ)` of the spectral polynomials attached to
/// the coefficient sequences: `r_0 = 1` and
/// `λ r_n = a_n r_{n+1} + b_n r_n + a_{n−1} r_{n−1}`.
pub fn spectral_poly_values(
    off_diagonal: &[f64],
    diagonal: &[f64],
    lambda: f64,
    count: usize,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(count);
    values.push(1.0);
    for n in 0..count.saturating_sub(1) {
        if off_diagonal[n] == 0.0 {
            return Err(Error::DenominatorPole {
                context: "spectral polynomial recurrence",
                index: n,
            });
        }
        let prev = if n == 0 { 0.0 } else { off_diagonal[n - 1] * values[n - 1] };
        let next = ((lambda - diagonal[n]) * values[n] - prev) / off_diagonal[n];
        values.push(next);
    }
    Ok(values)
}

/// Truncated formal eigenvector `Σ_n r_n(λ) φ_n(x)`: returns the partial sum
/// and the magnitude of its last term (the convergence diagnostic — the
/// series converges at discrete spectral points and diverges in the band).
pub fn formal_eigenvector(r_values: &[f64], phi_values: &[f64]) -> (f64, f64) {
    debug_assert_eq!(r_values.len(), phi_values.len());
    let sum = r_values
        .iter()
        .zip(phi_values)
        .map(|(&r, &phi)| r * phi)
        .collect::<NeumaierSum>()
        .value();
    let last = r_values
        .last()
        .zip(phi_values.last())
        .map(|(&r, &phi)| (r * phi).abs())
        .unwrap_or(0.0);
    (sum, last)
}

/// Truncated Poisson-type kernel `Σ_n tⁿ r_n(λ) φ_n(x)` for `|t| < 1`:
/// returns the partial sum and the geometric tail estimate
/// `|last term|·|t|/(1−|t|)`.
pub fn poisson_kernel(t: f64, r_values: &[f64], phi_values: &[f64]) -> Result<(f64, f64)> {
    if !(t.abs() < 1.0) {
        return Err(Error::invalid("t", format!("need |t| < 1, got {t}")));
    }
    debug_assert_eq!(r_values.len(), phi_values.len());
    let mut sum = NeumaierSum::new();
    let mut t_pow = 1.0;
    let mut last = 0.0;
    for (&r, &phi) in r_values.iter().zip(phi_values) {
        last = t_pow * r * phi;
        sum.add(last);
        t_pow *= t;
    }
    Ok((sum.value(), last.abs() * t.abs() / (1.0 - t.abs())))
}

/// Matrix elements `⟨T^γ φ_n, φ_m⟩_{L²(ν)}` of the Jacobi-case operator for
/// `n, m ≤ n_max`, computed end-to-end: orthonormal polynomials in
/// coefficient form, exact operator application, Gauss quadrature.
pub fn jacobi_matrix_elements(
    params: &JacobiOperatorParams,
    n_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let family = FamilyData::jacobi(params.alpha, params.beta)?;
    let phis = jacobi_orthonormal_polys(&family, params.alpha, params.beta, n_max)?;
    let mut elements = vec![vec![0.0; n_max + 1]; n_max + 1];
    for n in 0..=n_max {
        let t_phi = apply_t_jacobi(params, &phis[n]);
        for m in 0..=n_max {
            let phi_m = &phis[m];
            elements[n][m] = family.inner_product(
                &|x| t_phi.eval(x),
                &|x| phi_m.eval(x),
                n + m + 2,
            )?;
        }
    }
    Ok(elements)
}

/// Matrix elements `⟨T^γ φ_n, φ_m⟩_{L²(ν)}` of a q-difference operator for
/// `n, m ≤ n_max`, via double-double lattice sums over `k_max` points (the
/// summands cancel to ~10 digits for the unbounded case, so f64 sums are not
/// enough). Values are reported in the `φ_n = p_n/√h_n` gauge.
pub fn q_matrix_elements(
    params: &QOperatorParams,
    n_max: usize,
    k_max: usize,
) -> Result<Vec<Vec<f64>>> {
    let basis = LatticeBasis::new(params.a, params.b, params.q, n_max, k_max)?;
    let mut elements = vec![vec![0.0; n_max + 1]; n_max + 1];
    for (n, row) in elements.iter_mut().enumerate() {
        let t_row = apply_t_q_dd(params, &basis.values[n], params.q);
        for (m, slot) in row.iter_mut().enumerate() {
            let raw = basis.inner_product(&t_row, &basis.values[m]).to_f64();
            // The lattice basis carries the (−1)ⁿ positive-leading-coefficient
            // gauge; undo it to report in the series gauge.
            let sign = if (n + m) % 2 == 1 { -1.0 } else { 1.0 };
            *slot = sign * raw;
        }
    }
    Ok(elements)
}

/// Orthonormal Jacobi polynomials `φ_0 … φ_{n_max}` in coefficient form,
/// built from the monic three-term recurrence and the norm telescoping
/// `‖monic_n‖² = mass·β_1⋯β_n`.
fn jacobi_orthonormal_polys(
    family: &FamilyData,
    alpha: f64,
    beta: f64,
    n_max: usize,
) -> Result<Vec<CoeffPolynomial>> {
    let mass = family.norm(0)?;
    let mut monic = Vec::with_capacity(n_max + 1);
    monic.push(CoeffPolynomial::constant(1.0));
    if n_max >= 1 {
        monic.push(CoeffPolynomial::from_coefficients(vec![
            -jacobi_monic_diag(alpha, beta, 0),
            1.0,
        ]));
    }
    for n in 1..n_max {
        let x_shift = CoeffPolynomial::from_coefficients(vec![
            -jacobi_monic_diag(alpha, beta, n),
            1.0,
        ]);
        let prev = monic[n - 1].scale(jacobi_monic_beta(alpha, beta, n));
        let next = x_shift.mul(&monic[n]).sub(&prev);
        monic.push(next);
    }
    let mut norm_sq = mass;
    let mut phis = Vec::with_capacity(n_max + 1);
    for (n, poly) in monic.into_iter().enumerate() {
        if n >= 1 {
            norm_sq *= jacobi_monic_beta(alpha, beta, n);
        }
        phis.push(poly.scale(1.0 / positive_sqrt(norm_sq, "monic norm")?));
    }
    Ok(phis)
}

fn positive_sqrt(radicand: f64, context: &str) -> Result<f64> {
    if !(radicand > 0.0) {
        return Err(Error::IndeterminateNormalisation(format!(
            "{context} is not positive: {radicand}"
        )));
    }
    Ok(radicand.sqrt())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)] // index loops read clearest in assertions
mod tests {
    use super::*;
    use crate::operators::{apply_t_q, GridFunction};

    fn sample_pairs() -> Vec<FamilyPair> {
        vec![
            FamilyPair::jacobi_shift(0.3, 0.7).unwrap(),
            FamilyPair::q_shift_a(0.5, 0.25, 0.5).unwrap(),
            FamilyPair::q_shift_b(0.5, 0.25, 0.5).unwrap(),
        ]
    }

    fn unit_points(count: usize) -> Vec<f64> {
        let mut state = 0x9e3779b97f4a7c15u64;
        (0..count)
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 + 0.5) / (1u64 << 53) as f64
            })
            .collect()
    }

    #[test]
    fn b_zero_is_zero_and_jacobi_a_zero_is_one() {
        for pair in sample_pairs() {
            assert_eq!(pair.connection(0).unwrap().1, 0.0);
        }
        let plain = FamilyPair::jacobi_shift(0.0, 0.0).unwrap();
        assert!((plain.connection(0).unwrap().0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measures_are_related_by_r_pointwise() {
        // dμ = r dν: the weight ratio at sampled support points equals r.
        let jac = FamilyPair::jacobi_shift(0.3, 0.7).unwrap();
        for &x in &[-0.8, -0.2, 0.4, 0.9] {
            let ratio = jac.big().weight(x).unwrap() / jac.small().weight(x).unwrap();
            assert!((ratio - jac.r().eval(x)).abs() < 1e-13);
        }
        for pair in [
            FamilyPair::q_shift_a(0.5, 0.25, 0.5).unwrap(),
            FamilyPair::q_shift_b(0.5, 0.25, 0.5).unwrap(),
        ] {
            let mut x = 1.0;
            for _ in 0..8 {
                let ratio =
                    pair.big().weight(x).unwrap() / pair.small().weight(x).unwrap();
                assert!((ratio - pair.r().eval(x)).abs() < 1e-13);
                x *= 0.5;
            }
        }
    }

    #[test]
    fn connection_identity_holds_pointwise() {
        // φ_n(x) = A_n Φ_n(x) + B_n Φ_{n−1}(x) at arbitrary points.
        let points = unit_points(20);
        for pair in sample_pairs() {
            let (lo, hi) = match pair.kind {
                PairKind::JacobiShift { .. } => (-1.0, 1.0),
                _ => (0.0, 1.0),
            };
            for &u in &points {
                let x = lo + u * (hi - lo);
                for n in 0..=12usize {
                    let (a_n, b_n) = pair.connection(n).unwrap();
                    let phi = pair.small().eval(n, x).unwrap()
                        / pair.small().norm(n).unwrap().sqrt();
                    let big_n = pair.big().eval(n, x).unwrap()
                        / pair.big().norm(n).unwrap().sqrt();
                    let big_prev = if n == 0 {
                        0.0
                    } else {
                        pair.big().eval(n - 1, x).unwrap()
                            / pair.big().norm(n - 1).unwrap().sqrt()
                    };
                    let resid = phi - a_n * big_n - b_n * big_prev;
                    let scale = phi.abs().max(1.0);
                    assert!(
                        resid.abs() < 1e-11 * scale,
                        "{:?} n={n} x={x}: {resid:.3e}",
                        pair.kind
                    );
                }
            }
        }
    }

    #[test]
    fn generic_and_closed_coefficients_agree() {
        // Jacobi case.
        let params = JacobiOperatorParams::from_delta(0.3, 0.7, 0.25).unwrap();
        let pair = FamilyPair::jacobi_shift(0.3, 0.7).unwrap();
        let provider = |n: i64| params.lambda_gamma(n);
        for n in 0..=30usize {
            let (ga, gb) = pair.matrix_coeffs(&provider, n).unwrap();
            let (ca, cb) = closed_jacobi_coeffs(&params, n).unwrap();
            assert!((ga - ca).abs() <= 1e-11 * ca.abs(), "a_{n}: {ga} vs {ca}");
            assert!(
                (gb - cb).abs() <= 1e-11 * cb.abs().max(1e-6),
                "b_{n}: {gb} vs {cb}"
            );
        }
        // Both q cases.
        for case in [QCase::ShiftA, QCase::ShiftB] {
            let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, case).unwrap();
            let pair = match case {
                QCase::ShiftA => FamilyPair::q_shift_a(0.5, 0.25, 0.5).unwrap(),
                QCase::ShiftB => FamilyPair::q_shift_b(0.5, 0.25, 0.5).unwrap(),
            };
            let provider = |n: i64| params.lambda_gamma(n);
            for n in 0..=30usize {
                let (ga, gb) = pair.matrix_coeffs(&provider, n).unwrap();
                let (ca, cb) = closed_q_coeffs(&params, n).unwrap();
                assert!(
                    (ga - ca).abs() <= 1e-12 * ca.abs(),
                    "{case:?} a_{n}: {ga} vs {ca}"
                );
                assert!(
                    (gb - cb).abs() <= 1e-12 * cb.abs(),
                    "{case:?} b_{n}: {gb} vs {cb}"
                );
            }
        }
    }

    #[test]
    fn deflation_parameters_zero_the_first_row() {
        // δ = 1+β makes γ = 0 and Λ_0^γ = 0, so a_0 = b_0 = 0 exactly.
        let (alpha, beta) = (0.3, 0.7);
        let params = JacobiOperatorParams::from_delta(alpha, beta, 1.0 + beta).unwrap();
        assert_eq!(params.gamma, 0.0);
        let (a0, b0) = closed_jacobi_coeffs(&params, 0).unwrap();
        assert_eq!(a0, 0.0);
        assert_eq!(b0, 0.0);
        let pair = FamilyPair::jacobi_shift(alpha, beta).unwrap();
        let provider = |n: i64| params.lambda_gamma(n);
        let (ga0, gb0) = pair.matrix_coeffs(&provider, 0).unwrap();
        assert_eq!(ga0, 0.0);
        assert_eq!(gb0, 0.0);
    }

    #[test]
    fn first_unbounded_diagonal_value() {
        // a = 0.5, b = 0, c = 3, q = 0.5 (the worked example):
        // b_0^γ = (1−0.75)·(1−0.25) = 0.1875 in the a-shift case.
        let params = QOperatorParams::new(0.5, 0.0, 3.0, 0.5, QCase::ShiftA).unwrap();
        let (_, b0) = closed_q_coeffs(&params, 0).unwrap();
        assert!((b0 - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn unbounded_case_has_divergent_diagonal_but_bounded_off_diagonal() {
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftB).unwrap();
        let mut last_b = 0.0;
        let mut max_a = 0.0f64;
        for n in 0..=40usize {
            let (a_n, b_n) = closed_q_coeffs(&params, n).unwrap();
            assert!(b_n > last_b, "diagonal must grow: b_{n} = {b_n}");
            last_b = b_n;
            max_a = max_a.max(a_n.abs());
        }
        assert!(last_b > 1e10, "q^{{−n}} growth expected, got {last_b}");
        assert!(max_a < 1.0, "off-diagonal stays bounded, got {max_a}");
    }

    #[test]
    fn multiplication_recurrence_is_consistent() {
        let points = unit_points(10);
        for pair in sample_pairs() {
            let (lo, hi) = match pair.kind {
                PairKind::JacobiShift { .. } => (-1.0, 1.0),
                _ => (0.0, 1.0),
            };
            // down-coefficient absent at n = 0.
            assert_eq!(pair.m_recurrence(0).unwrap().2, 0.0);
            // r(x) φ_n = up φ_{n+1} + mid φ_n + down φ_{n−1} pointwise.
            for &u in &points {
                let x = lo + u * (hi - lo);
                for n in 0..=8usize {
                    let (up, mid, down) = pair.m_recurrence(n).unwrap();
                    let phi = |k: usize| -> f64 {
                        pair.small().eval(k, x).unwrap()
                            / pair.small().norm(k).unwrap().sqrt()
                    };
                    let lhs = pair.r().eval(x) * phi(n);
                    let rhs = up * phi(n + 1)
                        + mid * phi(n)
                        + if n > 0 { down * phi(n - 1) } else { 0.0 };
                    assert!(
                        (lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0),
                        "{:?} n={n} x={x}",
                        pair.kind
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_shift_moves_coefficients_along_the_m_recurrence() {
        // a_n^γ = a_n + γ·up and b_n^γ = b_n + γ·mid, by feeding the generic
        // path the bare and shifted eigenvalue sequences.
        let pair = FamilyPair::q_shift_a(0.5, 0.25, 0.5).unwrap();
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftA).unwrap();
        for gamma in [-1.0, 0.7, 2.3] {
            let bare = |n: i64| params.lambda_bare(n);
            let shifted = move |n: i64| {
                if n < 0 {
                    0.0
                } else {
                    params.lambda_bare(n) + gamma
                }
            };
            for n in 0..=15usize {
                let (a_bare, b_bare) = pair.matrix_coeffs(&bare, n).unwrap();
                let (a_shift, b_shift) = pair.matrix_coeffs(&shifted, n).unwrap();
                let (up, mid, _) = pair.m_recurrence(n).unwrap();
                assert!(
                    (a_shift - (a_bare + gamma * up)).abs()
                        <= 1e-12 * a_shift.abs().max(1.0),
                    "γ={gamma} n={n}"
                );
                assert!(
                    (b_shift - (b_bare + gamma * mid)).abs()
                        <= 1e-12 * b_shift.abs().max(1.0),
                    "γ={gamma} n={n}"
                );
            }
        }
    }

    #[test]
    fn birth_death_rates_satisfy_the_diagonal_identity() {
        let pair = FamilyPair::q_shift_a(0.5, 0.25, 0.5).unwrap();
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftA).unwrap();
        let provider = |n: i64| params.lambda_gamma(n);
        let rates = pair.birth_death_rates(&provider, 25).unwrap();
        assert_eq!(rates.death[0], 0.0);
        assert_eq!(rates.eigenvalue_sign, 1);
        assert_eq!(rates.coefficient_sign, -1);
        for n in 0..=25usize {
            assert!(rates.birth[n] > 0.0);
            if n > 0 {
                assert!(rates.death[n] > 0.0);
            }
            // λ_n + μ_n = |b_n^γ| when η = +1.
            let (_, b_n) = closed_q_coeffs(&params, n).unwrap();
            let sum = rates.birth[n] + rates.death[n];
            assert!(
                (sum - b_n.abs()).abs() <= 1e-12 * sum,
                "n={n}: {sum} vs {}",
                b_n.abs()
            );
        }

        // A sign flip in the eigenvalue sequence is rejected.
        let flipping = |n: i64| if n % 2 == 0 { 1.0 } else { -1.0 };
        assert!(matches!(
            pair.birth_death_rates(&flipping, 5),
            Err(Error::SignAssumptionViolated(_))
        ));

        // An admissible b-shift case is a positive birth–death chain.
        let pair = FamilyPair::q_shift_b(0.5, 0.5, 0.5).unwrap();
        let params = QOperatorParams::new(0.5, 0.5, 1.0, 0.5, QCase::ShiftB).unwrap();
        let provider = |n: i64| params.lambda_gamma(n);
        let rates = pair.birth_death_rates(&provider, 40).unwrap();
        assert_eq!(rates.eigenvalue_sign, 1);
        assert!(rates.birth.iter().all(|&l| l > 0.0));
    }

    #[test]
    fn matrix_elements_match_coefficients_on_a_small_window() {
        // Full end-to-end check at acceptance scale runs in the integration
        // suite; this covers a 6×6 window for one case of each kind.
        let jp = JacobiOperatorParams::from_delta(0.3, 0.7, 0.25).unwrap();
        let elements = jacobi_matrix_elements(&jp, 5).unwrap();
        for n in 0..=5usize {
            let (a_n, b_n) = closed_jacobi_coeffs(&jp, n).unwrap();
            assert!((elements[n][n] - b_n).abs() < 1e-11, "diag n={n}");
            if n < 5 {
                assert!((elements[n][n + 1] - a_n).abs() < 1e-11, "off n={n}");
                assert!((elements[n + 1][n] - a_n).abs() < 1e-11, "off' n={n}");
            }
            for m in 0..=5usize {
                if m > n + 1 || n > m + 1 {
                    assert!(elements[n][m].abs() < 1e-12, "band n={n} m={m}");
                }
            }
        }

        let qp = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftB).unwrap();
        let elements = q_matrix_elements(&qp, 5, 200).unwrap();
        for n in 0..=5usize {
            let (a_n, b_n) = closed_q_coeffs(&qp, n).unwrap();
            assert!(
                (elements[n][n] - b_n).abs() < 1e-10 * b_n.abs().max(1.0),
                "diag n={n}: {} vs {b_n}",
                elements[n][n]
            );
            if n < 5 {
                assert!(
                    (elements[n][n + 1] - a_n).abs() < 1e-10,
                    "off n={n}: {} vs {a_n}",
                    elements[n][n + 1]
                );
            }
            for m in 0..=5usize {
                if m > n + 1 || n > m + 1 {
                    assert!(elements[n][m].abs() < 1e-10, "band n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn operator_action_on_the_ground_state() {
        // T^γ φ_0 = a_0 φ_1 + b_0 φ_0 pointwise on the lattice.
        let params = QOperatorParams::new(0.5, 0.25, 1.2, 0.5, QCase::ShiftA).unwrap();
        let basis = LatticeBasis::new(0.5, 0.25, 0.5, 1, 60).unwrap();
        let phi0 = basis.row_f64(0);
        let phi1: Vec<f64> = basis.row_f64(1).iter().map(|v| -v).collect();
        let grid = GridFunction::new(phi0.clone(), 0.5).unwrap();
        let out = apply_t_q(&params, &grid);
        let (a0, b0) = closed_q_coeffs(&params, 0).unwrap();
        for k in 0..55usize {
            let expect = a0 * phi1[k] + b0 * phi0[k];
            assert!(
                (out.values()[k] - expect).abs() < 1e-11 * expect.abs().max(1.0),
                "k={k}: {} vs {expect}",
                out.values()[k]
            );
        }
    }

    #[test]
    fn truncated_series_helpers() {
        // N = 1 formal eigenvector is the single product; t = 0 Poisson
        // kernel keeps only the first term.
        let (sum, last) = formal_eigenvector(&[2.0], &[0.75]);
        assert_eq!(sum, 1.5);
        assert_eq!(last, 1.5);
        let (p, tail) = poisson_kernel(0.0, &[2.0, 3.0], &[0.75, 0.5]).unwrap();
        assert_eq!(p, 1.5);
        assert_eq!(tail, 0.0);
        assert!(poisson_kernel(1.0, &[1.0], &[1.0]).is_err());

        // Spectral polynomial start: r_1 = (λ − b_0)/a_0.
        let vals = spectral_poly_values(&[2.0, 1.0], &[0.5, 0.25], 1.5, 3).unwrap();
        assert_eq!(vals[0], 1.0);
        assert_eq!(vals[1], 0.5);
        assert!(spectral_poly_values(&[0.0], &[0.5], 1.0, 2).is_err());
    }
    #[test]
    fn formal_eigenvector_stabilises_at_a_discrete_eigenvalue() {
        // λ = 1/6 is the single discrete spectral point of the a-shift
        // operator at (a, b, c, q) = (0.5, 0, 3, 0.5). On the lattice the
        // partial sums lock in once the degree passes the point index and
        // the terms then die off faster than geometrically.
        let params = QOperatorParams::new(0.5, 0.0, 3.0, 0.5, QCase::ShiftA).unwrap();
        let n_max = 41usize;
        let (off, diag): (Vec<f64>, Vec<f64>) = (0..=n_max)
            .map(|n| closed_q_coeffs(&params, n).unwrap())
            .unzip();
        let r = spectral_poly_values(&off, &diag, 1.0 / 6.0, n_max + 1).unwrap();
        let basis = LatticeBasis::new(0.5, 0.0, 0.5, n_max, 60).unwrap();
        for (k, expected) in [(4usize, 1.94618019357398), (6, 3.459875899687089)] {
            let phi: Vec<f64> = (0..=n_max)
                .map(|n| {
                    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
                    sign * basis.values[n][k].to_f64()
                })
                .collect();
            let (full, _) = formal_eigenvector(&r, &phi);
            assert!((full - expected).abs() < 1e-13 * expected, "k={k}: {full}");
            // N = 1 keeps exactly the first product.
            let (first, _) = formal_eigenvector(&r[..1], &phi[..1]);
            assert_eq!(first, phi[0]);
            let mut last_seen = f64::INFINITY;
            for n_trunc in 30..=n_max + 1 {
                let (sum, last) = formal_eigenvector(&r[..n_trunc], &phi[..n_trunc]);
                assert!((sum - expected).abs() < 1e-13 * expected);
                assert!(
                    last < 0.5 * last_seen,
                    "terms must keep dying at k={k}, N={n_trunc}: {last}"
                );
                last_seen = last;
            }

            // The damped sums approach the stabilised one as t → 1⁻ with a
            // gap proportional to 1−t.
            let mut gaps = Vec::new();
            for t in [0.9, 0.99, 0.999] {
                let (damped, _) = poisson_kernel(t, &r, &phi).unwrap();
                gaps.push((damped - full).abs() / full.abs());
            }
            assert!(gaps[1] < 0.2 * gaps[0], "k={k}: {gaps:?}");
            assert!(gaps[2] < 0.2 * gaps[1], "k={k}: {gaps:?}");
            assert!(gaps[2] < 1e-2, "k={k}: {gaps:?}");
        }
    }

    #[test]
    fn formal_eigenvector_diverges_in_the_band() {
        // λ = 1 sits inside the continuous band [0.25, 2.25]; away from the
        // lattice the terms of the formal series grow without bound.
        let params = QOperatorParams::new(0.5, 0.0, 3.0, 0.5, QCase::ShiftA).unwrap();
        let n_max = 41usize;
        let (off, diag): (Vec<f64>, Vec<f64>) = (0..=n_max)
            .map(|n| closed_q_coeffs(&params, n).unwrap())
            .unzip();
        let r = spectral_poly_values(&off, &diag, 1.0, n_max + 1).unwrap();
        let family = FamilyData::little_q_jacobi(0.5, 0.0, 0.5).unwrap();
        let phi = family.orthonormal_values(0.37, n_max).unwrap();
        let mut grew = 0usize;
        let mut prev = 0.0f64;
        for n_trunc in [10usize, 20, 30, 40] {
            let (_, last) = formal_eigenvector(&r[..n_trunc], &phi[..n_trunc]);
            if last > prev {
                grew += 1;
            }
            prev = last;
        }
        assert_eq!(grew, 4, "terms must keep growing");
        assert!(prev > 1e100, "no sign of convergence expected, got {prev}");
    }
}
