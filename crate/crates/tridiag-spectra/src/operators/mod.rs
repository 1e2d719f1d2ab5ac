//! The second-order operators whose tridiagonalisations this crate studies.
//!
//! Three concrete operators are implemented, each of the form
//! `T^γ = r·(L + γ)` where `L` is the standard second-order operator of a
//! parameter-shifted family and `r` is the degree-one connection factor
//! between that family's measure and the base measure:
//!
//! * a Jacobi differential operator, applied exactly in coefficient space;
//! * two q-difference operators on the lattice `{qᵏ}`, applied exactly as
//!   three-point stencils (one per parameter shift; the second is unbounded).
//!
//! Every `apply` is assembled literally as `bare + γ·(r·f)` from the two
//! exposed building blocks, so γ-linearity holds bitwise, not just
//! approximately.

use crate::error::{Error, Result};
use crate::families::poly::CoeffPolynomial;
use crate::specialfn::Dd;

/// Function on the truncated q-lattice; entry `k` is the value at `qᵏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    q: f64,
}

impl GridFunction {
    /// Wraps lattice values; at least three points are required so the
    /// difference stencils have neighbours.
    pub fn new(values: Vec<f64>, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid("q", format!("need 0 < q < 1, got {q}")));
        }
        if values.len() < 3 {
            return Err(Error::invalid(
                "values",
                format!("lattice function needs length ≥ 3, got {}", values.len()),
            ));
        }
        Ok(GridFunction { values, q })
    }

    /// Tabulates `f` on the first `len` lattice points `q⁰ … q^{len−1}`.
    pub fn tabulate(f: &dyn Fn(f64) -> f64, q: f64, len: usize) -> Result<Self> {
        let mut point = 1.0;
        let values = (0..len)
            .map(|_| {
                let v = f(point);
                point *= q;
                v
            })
            .collect();
        GridFunction::new(values, q)
    }

    /// Lattice values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Base of the lattice.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// A lattice function is never empty (the constructor demands ≥ 3).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Parameters of the Jacobi-case operator
/// `T^γ = (1−x)(1−x²) d² + (1−x)(β−α−1−(α+β+3)x) d + γ(1−x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOperatorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl JacobiOperatorParams {
    /// Builds the operator directly from its constant term `γ`.
    pub fn from_gamma(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::invalid("alpha", format!("need α > −1, got {alpha}")));
        }
        if !(beta > -1.0) {
            return Err(Error::invalid("beta", format!("need β > −1, got {beta}")));
        }
        Ok(JacobiOperatorParams { alpha, beta, gamma })
    }

    /// Builds the operator from the shift parameter δ, setting
    /// `γ = −(α+δ+1)(β−δ+1)`.
    pub fn from_delta(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        let gamma = -(alpha + delta + 1.0) * (beta - delta + 1.0);
        Self::from_gamma(alpha, beta, gamma)
    }

    /// Eigenvalue `Λ_n = −n(n+α+β+2)` of the parameter-shifted family under
    /// the bare operator; `Λ_{−1} = 0` by convention.
    pub fn lambda_bare(&self, n: i64) -> f64 {
        if n < 0 {
            return 0.0;
        }
        let nf = n as f64;
        -nf * (nf + self.alpha + self.beta + 2.0)
    }

    /// Shifted eigenvalue `Λ_n^γ = −(n+α+δ+1)(n+β−δ+1) = Λ_n + γ`, with
    /// `Λ_{−1}^γ = 0` by convention.
    pub fn lambda_gamma(&self, n: i64) -> f64 {
        if n < 0 {
            return 0.0;
        }
        self.lambda_bare(n) + self.gamma
    }
}

/// Which little q-Jacobi parameter the operator's family shift moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QCase {
    /// Shift `a ↦ aq`; the connection factor is `r(x) = x` and the operator
    /// is bounded.
    ShiftA,
    /// Shift `b ↦ bq`; the connection factor is `r(x) = (1−bqx)/(1−bq)` and
    /// the operator is unbounded.
    ShiftB,
}

/// Parameters of the q-difference operators; `(a, b, q)` are the base-family
/// parameters and `c` encodes the spectral shift through
/// `γ = (1+abq²) − (acq + bq/c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QOperatorParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub q: f64,
    pub case: QCase,
}

impl QOperatorParams {
    pub fn new(a: f64, b: f64, c: f64, q: f64, case: QCase) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid("q", format!("need 0 < q < 1, got {q}")));
        }
        if !(a > 0.0 && a < 1.0 / q) {
            return Err(Error::invalid("a", format!("need 0 < a < 1/q, got {a}")));
        }
        if !(b < 1.0 / q) {
            return Err(Error::invalid("b", format!("need b < 1/q, got {b}")));
        }
        if c == 0.0 {
            return Err(Error::invalid("c", "the spectral shift needs c ≠ 0"));
        }
        Ok(QOperatorParams { a, b, c, q, case })
    }

    /// Constant term `γ = (1+abq²) − (acq + bq/c)`.
    pub fn gamma(&self) -> f64 {
        let QOperatorParams { a, b, c, q, .. } = *self;
        (1.0 + a * b * q * q) - (a * c * q + b * q / c)
    }

    /// Eigenvalue `Λ_n = q^{−n}(1−qⁿ)(1−abq^{n+2})` of the shifted family
    /// under the bare operator (the same for both shifts); `Λ_{−1} = 0`.
    pub fn lambda_bare(&self, n: i64) -> f64 {
        if n < 0 {
            return 0.0;
        }
        let QOperatorParams { a, b, q, .. } = *self;
        let n32 = n as i32;
        q.powi(-n32) * (1.0 - q.powi(n32)) * (1.0 - a * b * q.powi(n32 + 2))
    }

    /// Shifted eigenvalue `Λ_n^γ = q^{−n}(1−acq^{n+1})(1−bq^{n+1}/c)`, with
    /// `Λ_{−1}^γ = 0` by convention.
    pub fn lambda_gamma(&self, n: i64) -> f64 {
        if n < 0 {
            return 0.0;
        }
        let QOperatorParams { a, b, c, q, .. } = *self;
        let n32 = n as i32;
        q.powi(-n32) * (1.0 - a * c * q.powi(n32 + 1)) * (1.0 - b * q.powi(n32 + 1) / c)
    }
}

/// Bare shifted Jacobi operator
/// `L p = (1−x²) p″ + (β−α−1−(α+β+3)x) p′` in coefficient space (exact).
pub fn apply_l_jacobi(params: &JacobiOperatorParams, p: &CoeffPolynomial) -> CoeffPolynomial {
    let (alpha, beta) = (params.alpha, params.beta);
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let one_minus_x_sq =
        CoeffPolynomial::from_coefficients(vec![1.0, 0.0, -1.0]);
    let first_order = CoeffPolynomial::from_coefficients(vec![
        beta - alpha - 1.0,
        -(alpha + beta + 3.0),
    ]);
    one_minus_x_sq.mul(&d2).add(&first_order.mul(&d1))
}

/// Multiplication by the Jacobi connection factor `r(x) = 1−x` (exact).
pub fn multiply_by_r_jacobi(p: &CoeffPolynomial) -> CoeffPolynomial {
    CoeffPolynomial::from_coefficients(vec![1.0, -1.0]).mul(p)
}

/// The γ-independent part `(1−x)·(L p)` in coefficient space (exactly
/// `apply_t_jacobi` at γ = 0).
pub fn apply_t_bare_jacobi(
    params: &JacobiOperatorParams,
    p: &CoeffPolynomial,
) -> CoeffPolynomial {
    multiply_by_r_jacobi(&apply_l_jacobi(params, p))
}

/// Full operator `T^γ p = (1−x)·(L p) + γ·(1−x)·p` in coefficient space,
/// assembled coefficient-by-coefficient as `bare + γ·(r·p)` so γ-linearity
/// against the exposed pieces holds exactly.
pub fn apply_t_jacobi(params: &JacobiOperatorParams, p: &CoeffPolynomial) -> CoeffPolynomial {
    let bare = apply_t_bare_jacobi(params, p);
    let rp = multiply_by_r_jacobi(p);
    bare.add(&rp.scale(params.gamma))
}

/// Coefficient of `f(qx)−f(x)` in `x·L` for the a-shift case: `aq(bq^{k+1}−1)`
/// at `x = qᵏ`.
pub(crate) fn q1_up_coeff(params: &QOperatorParams, q_pow_k1: f64) -> f64 {
    params.a * params.q * (params.b * q_pow_k1 - 1.0)
}

/// Coefficient of `f(x/q)−f(x)` in `x·L`: `qᵏ−1` (vanishing at `k = 0`, so
/// the stencil never reads outside the lattice).
pub(crate) fn q1_down_coeff(q_pow_k: f64) -> f64 {
    q_pow_k - 1.0
}

/// Bare-stencil part of the a-shift operator (everything except the
/// `γ·r·f` term), with the convention `f_K = 0` past the truncation.
fn q1_bare(params: &QOperatorParams, f: &[f64], q_pow: &[f64]) -> Vec<f64> {
    let len = f.len();
    (0..len)
        .map(|k| {
            let up = f.get(k + 1).copied().unwrap_or(0.0) - f[k];
            let mut out = q1_up_coeff(params, q_pow[k + 1]) * up;
            if k > 0 {
                out += q1_down_coeff(q_pow[k]) * (f[k - 1] - f[k]);
            }
            out
        })
        .collect()
}

/// Coefficients of the b-shift stencil at `x = qᵏ`: the pair multiplying
/// `f(qx)−f(x)` and `f(x/q)−f(x)`.
fn q2_coeffs(params: &QOperatorParams, q_pow_k: f64, q_pow_k1: f64) -> (f64, f64) {
    let QOperatorParams { a, b, q, .. } = *params;
    let factor = (1.0 - b * q_pow_k1) / (q_pow_k * (1.0 - b * q));
    let up = a * (b * q * q_pow_k1 - 1.0) * factor;
    let down = (q_pow_k - 1.0) * factor;
    (up, down)
}

/// Bare-stencil part of the b-shift operator, `f_K = 0` past the truncation.
fn q2_bare(params: &QOperatorParams, f: &[f64], q_pow: &[f64]) -> Vec<f64> {
    let len = f.len();
    (0..len)
        .map(|k| {
            let (up_c, down_c) = q2_coeffs(params, q_pow[k], q_pow[k + 1]);
            let up = f.get(k + 1).copied().unwrap_or(0.0) - f[k];
            let mut out = up_c * up;
            if k > 0 {
                out += down_c * (f[k - 1] - f[k]);
            }
            out
        })
        .collect()
}

/// Multiplication by the connection factor on the lattice:
/// `r(x) = x` for the a-shift, `r(x) = (1−bqx)/(1−bq)` for the b-shift.
pub fn multiply_by_r_q(params: &QOperatorParams, f: &GridFunction) -> GridFunction {
    let q_pow = powers(f.q(), f.len() + 1);
    let values = match params.case {
        QCase::ShiftA => f
            .values()
            .iter()
            .enumerate()
            .map(|(k, &v)| q_pow[k] * v)
            .collect(),
        QCase::ShiftB => {
            let denom = 1.0 - params.b * params.q;
            f.values()
                .iter()
                .enumerate()
                .map(|(k, &v)| (1.0 - params.b * q_pow[k + 1]) / denom * v)
                .collect()
        }
    };
    GridFunction {
        values,
        q: f.q(),
    }
}

/// Bare shifted operator `L f` on the lattice (no `r` factor, no γ term),
/// implemented as its own direct stencil:
/// `L f(qᵏ) = (A(Bq^{k+1}−1)/qᵏ)(f_{k+1}−f_k) + ((qᵏ−1)/qᵏ)(f_{k−1}−f_k)`
/// with the shifted parameters `(A, B) = (aq, b)` or `(a, bq)`.
pub fn apply_l_q(params: &QOperatorParams, f: &GridFunction) -> GridFunction {
    let q_pow = powers(f.q(), f.len() + 2);
    let (big_a, big_b) = match params.case {
        QCase::ShiftA => (params.a * params.q, params.b),
        QCase::ShiftB => (params.a, params.b * params.q),
    };
    let fv = f.values();
    let values = (0..f.len())
        .map(|k| {
            let up = fv.get(k + 1).copied().unwrap_or(0.0) - fv[k];
            let mut out = big_a * (big_b * q_pow[k + 1] - 1.0) / q_pow[k] * up;
            if k > 0 {
                out += (q_pow[k] - 1.0) / q_pow[k] * (fv[k - 1] - fv[k]);
            }
            out
        })
        .collect();
    GridFunction {
        values,
        q: f.q(),
    }
}

/// The γ-independent part of the q-difference operator, `r·(L f)`, fused as
/// a single stencil (exactly `apply_t_q` at γ = 0).
pub fn apply_t_bare_q(params: &QOperatorParams, f: &GridFunction) -> GridFunction {
    let q_pow = powers(f.q(), f.len() + 1);
    let values = match params.case {
        QCase::ShiftA => q1_bare(params, f.values(), &q_pow),
        QCase::ShiftB => q2_bare(params, f.values(), &q_pow),
    };
    GridFunction {
        values,
        q: f.q(),
    }
}

/// Full q-difference operator `T^γ f = bare-stencil + γ·(r·f)` on the
/// lattice. The assembly is literal, so γ-linearity against
/// [`apply_t_bare_q`] and [`multiply_by_r_q`] holds exactly.
pub fn apply_t_q(params: &QOperatorParams, f: &GridFunction) -> GridFunction {
    let bare = apply_t_bare_q(params, f);
    let rf = multiply_by_r_q(params, f);
    let gamma = params.gamma();
    let values = bare
        .values()
        .iter()
        .zip(rf.values())
        .map(|(&bare_k, &rf_k)| bare_k + gamma * rf_k)
        .collect();
    GridFunction {
        values,
        q: f.q(),
    }
}

/// Double-double version of the full stencil, used by the matrix-element
/// sums whose summands cancel beyond f64.
pub(crate) fn apply_t_q_dd(params: &QOperatorParams, f: &[Dd], q: f64) -> Vec<Dd> {
    let len = f.len();
    let qd = Dd::from_f64(q);
    let mut q_pow = Vec::with_capacity(len + 2);
    q_pow.push(Dd::ONE);
    for _ in 0..=len {
        let last = *q_pow.last().expect("nonempty");
        q_pow.push(last * qd);
    }
    let (ad, bd) = (Dd::from_f64(params.a), Dd::from_f64(params.b));
    let gamma = {
        let cd = Dd::from_f64(params.c);
        (Dd::ONE + ad * bd * qd * qd) - (ad * cd * qd + bd * qd / cd)
    };
    (0..len)
        .map(|k| {
            let up_diff = f.get(k + 1).copied().unwrap_or(Dd::ZERO) - f[k];
            match params.case {
                QCase::ShiftA => {
                    let mut out = ad * qd * (bd * q_pow[k + 1] - Dd::ONE) * up_diff;
                    if k > 0 {
                        out = out + (q_pow[k] - Dd::ONE) * (f[k - 1] - f[k]);
                    }
                    out + gamma * q_pow[k] * f[k]
                }
                QCase::ShiftB => {
                    let factor = (Dd::ONE - bd * q_pow[k + 1])
                        / (q_pow[k] * (Dd::ONE - bd * qd));
                    let mut out =
                        ad * (bd * qd * q_pow[k + 1] - Dd::ONE) * factor * up_diff;
                    if k > 0 {
                        out = out + (q_pow[k] - Dd::ONE) * factor * (f[k - 1] - f[k]);
                    }
                    out + gamma * (Dd::ONE - bd * q_pow[k + 1])
                        / (Dd::ONE - bd * qd)
                        * f[k]
                }
            }
        })
        .collect()
}

/// Powers `q⁰ … q^{count−1}`.
fn powers(q: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 1.0;
    for _ in 0..count {
        out.push(p);
        p *= q;
    }
    out
}
