//! Orthogonal polynomial families: evaluation, norms, leading coefficients,
//! weights, three-term recurrences and inner products.
//!
//! Five families are supported. Two live on classical supports — Jacobi on
//! (−1, 1) and Wilson on [0, ∞) in the squared variable — and three are
//! basic-hypergeometric: little q-Jacobi on the lattice {qᵏ}, Askey–Wilson
//! and Al-Salam–Chihara on [−1, 1] via x = cos θ. All evaluations reduce to
//! the terminating series kernels in [`crate::specialfn`]; the Jacobi and
//! little q-Jacobi series run internally in double-double precision because
//! their terms cancel strongly at moderate degree.

pub mod lattice;
pub mod measure;
pub mod poly;

use crate::error::{Error, Result};
use crate::specialfn::{
    self, gamma, q_pochhammer, q_pochhammer_inf, q_pochhammer_pair_inf, Dd, SeriesParam,
    SeriesParams,
};

pub use poly::CoeffPolynomial;

/// One orthogonal polynomial family with fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyData {
    /// Jacobi polynomials `P_n^{(α,β)}` on (−1, 1) with weight
    /// `(1−x)^α (1+x)^β`; requires `α, β > −1`.
    Jacobi {
        /// Exponent at x = 1.
        alpha: f64,
        /// Exponent at x = −1.
        beta: f64,
    },
    /// Little q-Jacobi polynomials `p_n(x; a, b; q)` orthogonal on the
    /// lattice {qᵏ}; requires `0 < q < 1`, `0 < a < 1/q`, `b < 1/q`.
    LittleQJacobi {
        /// First parameter.
        a: f64,
        /// Second parameter.
        b: f64,
        /// Base.
        q: f64,
    },
    /// Wilson polynomials `W_n(y; w₀, w₁, w₂, w₃)` in the squared variable
    /// `y = x²`; requires all parameters positive.
    Wilson {
        /// The four Wilson parameters.
        w: [f64; 4],
    },
    /// Askey–Wilson polynomials `p_n(cos θ; t₀, t₁, t₂, t₃ | q)`; requires
    /// `0 < q < 1` and `t₀ ≠ 0`.
    AskeyWilson {
        /// The four Askey–Wilson parameters.
        t: [f64; 4],
        /// Base.
        q: f64,
    },
    /// Al-Salam–Chihara polynomials `Q_n(cos θ; c, d | q)`; requires
    /// `0 < q < 1` and `c ≠ 0`.
    AlSalamChihara {
        /// First parameter.
        c: f64,
        /// Second parameter (may be zero).
        d: f64,
        /// Base.
        q: f64,
    },
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid("q", format!("base must lie in (0, 1), got {q}")));
    }
    Ok(())
}

impl FamilyData {
    /// Validated Jacobi family.
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::invalid("alpha", format!("must exceed −1, got {alpha}")));
        }
        if !(beta > -1.0) {
            return Err(Error::invalid("beta", format!("must exceed −1, got {beta}")));
        }
        Ok(FamilyData::Jacobi { alpha, beta })
    }

    /// Validated little q-Jacobi family.
    pub fn little_q_jacobi(a: f64, b: f64, q: f64) -> Result<Self> {
        check_q(q)?;
        if !(a > 0.0 && a * q < 1.0) {
            return Err(Error::invalid("a", format!("must lie in (0, 1/q), got {a}")));
        }
        if !(b * q < 1.0) {
            return Err(Error::invalid("b", format!("must be below 1/q, got {b}")));
        }
        Ok(FamilyData::LittleQJacobi { a, b, q })
    }

    /// Validated Wilson family.
    pub fn wilson(w: [f64; 4]) -> Result<Self> {
        for (i, &wi) in w.iter().enumerate() {
            if !(wi > 0.0) {
                return Err(Error::invalid(
                    "w",
                    format!("parameter {i} must be positive, got {wi}"),
                ));
            }
        }
        Ok(FamilyData::Wilson { w })
    }

    /// Validated Askey–Wilson family.
    pub fn askey_wilson(t: [f64; 4], q: f64) -> Result<Self> {
        check_q(q)?;
        if t[0] == 0.0 {
            return Err(Error::invalid("t", "leading parameter must be nonzero".to_string()));
        }
        Ok(FamilyData::AskeyWilson { t, q })
    }

    /// Validated Al-Salam–Chihara family.
    pub fn al_salam_chihara(c: f64, d: f64, q: f64) -> Result<Self> {
        check_q(q)?;
        if c == 0.0 {
            return Err(Error::invalid("c", "first parameter must be nonzero".to_string()));
        }
        Ok(FamilyData::AlSalamChihara { c, d, q })
    }

    /// Evaluates the degree-`n` polynomial of the family at `x`.
    ///
    /// The argument is the polynomial variable of the family: `x ∈ (−1,1)`
    /// for Jacobi, the lattice variable for little q-Jacobi (any real is
    /// accepted — the polynomial extends off the lattice), `y = x²` for
    /// Wilson, and `cos θ` for Askey–Wilson and Al-Salam–Chihara.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.eval_dd(n, Dd::from_f64(x))?.to_f64())
    }

    /// Double-double evaluation used by the lattice and dual-path code.
    pub(crate) fn eval_dd(&self, n: usize, x: Dd) -> Result<Dd> {
        match *self {
            FamilyData::Jacobi { alpha, beta } => {
                // Reflection keeps the series argument in [0, 1/2] where the
                // terms are smallest: P_n^{(α,β)}(−x) = (−1)ⁿ P_n^{(β,α)}(x).
                let (alpha, beta, x, sign) = if x.to_f64() < 0.0 {
                    (beta, alpha, -x, if n % 2 == 1 { -1.0 } else { 1.0 })
                } else {
                    (alpha, beta, x, 1.0)
                };
                let params = SeriesParams {
                    degree: n,
                    numerator: vec![SeriesParam::Real(n as f64 + alpha + beta + 1.0)],
                    denominator: vec![SeriesParam::Real(alpha + 1.0)],
                    argument: 0.0,
                };
                let z = (Dd::ONE - x) * Dd::from_f64(0.5);
                let series = specialfn::series::hypergeometric_terminating_dd_arg(&params, z)?;
                // Prefactor (α+1)_n / n! as an exact-ratio product.
                let mut pre = Dd::from_f64(sign);
                for j in 1..=n {
                    pre = pre * Dd::from_f64(alpha + j as f64) / Dd::from_f64(j as f64);
                }
                Ok(pre * series)
            }
            FamilyData::LittleQJacobi { a, b, q } => {
                let params = SeriesParams {
                    degree: n,
                    numerator: vec![SeriesParam::Real(a * b * q.powi(n as i32 + 1))],
                    denominator: vec![SeriesParam::Real(a * q)],
                    argument: 0.0,
                };
                let z = Dd::from_f64(q) * x;
                specialfn::series::basic_hypergeometric_terminating_dd_arg(q, &params, z)
            }
            FamilyData::Wilson { w } => {
                let [a, b, c, d] = w;
                let s = a + b + c + d;
                let params = SeriesParams {
                    degree: n,
                    numerator: vec![
                        SeriesParam::Real(n as f64 + s - 1.0),
                        SeriesParam::ConjugatePair {
                            center: a,
                            shift_sq: x.to_f64(),
                        },
                    ],
                    denominator: vec![
                        SeriesParam::Real(a + b),
                        SeriesParam::Real(a + c),
                        SeriesParam::Real(a + d),
                    ],
                    argument: 1.0,
                };
                let series =
                    specialfn::series::hypergeometric_terminating_dd_arg(&params, Dd::ONE)?;
                let mut pre = Dd::ONE;
                for j in 0..n {
                    let jf = j as f64;
                    pre = pre
                        * Dd::from_f64(a + b + jf)
                        * Dd::from_f64(a + c + jf)
                        * Dd::from_f64(a + d + jf);
                }
                Ok(pre * series)
            }
            FamilyData::AskeyWilson { t, q } => {
                let [t0, t1, t2, t3] = t;
                let prod = t0 * t1 * t2 * t3;
                let params = SeriesParams {
                    degree: n,
                    numerator: vec![
                        SeriesParam::Real(prod * q.powi(n as i32 - 1)),
                        SeriesParam::QConjugatePair {
                            modulus: t0,
                            cos_angle: x.to_f64(),
                        },
                    ],
                    denominator: vec![
                        SeriesParam::Real(t0 * t1),
                        SeriesParam::Real(t0 * t2),
                        SeriesParam::Real(t0 * t3),
                    ],
                    argument: q,
                };
                let series = specialfn::series::basic_hypergeometric_terminating_dd_arg(
                    q,
                    &params,
                    Dd::from_f64(q),
                )?;
                let pre = Dd::from_f64(t0.powi(-(n as i32)))
                    * specialfn::series::q_pochhammer_dd(Dd::from_f64(t0 * t1), q, n)
                    * specialfn::series::q_pochhammer_dd(Dd::from_f64(t0 * t2), q, n)
                    * specialfn::series::q_pochhammer_dd(Dd::from_f64(t0 * t3), q, n);
                Ok(pre * series)
            }
            FamilyData::AlSalamChihara { c, d, q } => {
                let params = SeriesParams {
                    degree: n,
                    numerator: vec![SeriesParam::QConjugatePair {
                        modulus: c,
                        cos_angle: x.to_f64(),
                    }],
                    denominator: vec![SeriesParam::Real(c * d), SeriesParam::Real(0.0)],
                    argument: q,
                };
                let series = specialfn::series::basic_hypergeometric_terminating_dd_arg(
                    q,
                    &params,
                    Dd::from_f64(q),
                )?;
                let pre = specialfn::series::q_pochhammer_dd(Dd::from_f64(c * d), q, n)
                    * Dd::from_f64(c.powi(-(n as i32)));
                Ok(pre * series)
            }
        }
    }

    /// Squared norm `h_n = ⟨p_n, p_n⟩` of the degree-`n` polynomial under the
    /// family's canonical measure (see [`FamilyData::weight`]).
    pub fn norm(&self, n: usize) -> Result<f64> {
        match *self {
            FamilyData::Jacobi { alpha, beta } => {
                let two_pow = 2f64.powf(alpha + beta + 1.0);
                let nf = n as f64;
                if n == 0 {
                    Ok(two_pow
                        * gamma::log_gamma_ratio(&[alpha + 1.0, beta + 1.0], &[alpha + beta + 2.0])?)
                } else {
                    // Written with Γ(n+α+β+2) so every gamma argument stays
                    // positive even when α+β+1 ≤ 0.
                    let ratio = gamma::log_gamma_ratio(
                        &[nf + alpha + 1.0, nf + beta + 1.0],
                        &[nf + alpha + beta + 2.0, nf + 1.0],
                    )?;
                    Ok(two_pow * ratio * (nf + alpha + beta + 1.0)
                        / (2.0 * nf + alpha + beta + 1.0))
                }
            }
            FamilyData::LittleQJacobi { a, b, q } => {
                let n32 = n as i32;
                Ok(q_pochhammer_inf(a * b * q * q, q)? / q_pochhammer_inf(a * q, q)?
                    * (1.0 - a * b * q)
                    * (a * q).powi(n32)
                    / (1.0 - a * b * q.powi(2 * n32 + 1))
                    * q_pochhammer(q, q, n)?
                    * q_pochhammer(q * b, q, n)?
                    / (q_pochhammer(q * a, q, n)? * q_pochhammer(q * a * b, q, n)?))
            }
            FamilyData::Wilson { w } => {
                let [a, b, c, d] = w;
                let s = a + b + c + d;
                let nf = n as f64;
                let cross = [a + b, a + c, a + d, b + c, b + d, c + d];
                if n == 0 {
                    let num: Vec<f64> = cross.to_vec();
                    gamma::log_gamma_ratio(&num, &[s])
                } else {
                    let mut num: Vec<f64> = cross.iter().map(|&p| p + nf).collect();
                    num.push(nf + 1.0);
                    num.push(s - 1.0 + 2.0 * nf);
                    gamma::log_gamma_ratio(&num, &[s - 1.0 + nf, s + 2.0 * nf])
                }
            }
            FamilyData::AskeyWilson { t, q } => {
                let mass = self.total_mass()?;
                let prod: f64 = t.iter().product();
                // h_n telescopes from the recurrence: the orthonormal family
                // r_n = p_n/√h_n has leading coefficient Π 1/off_j, while p_n
                // has leading coefficient 2ⁿ (Π t q^{n-1}; q)_n.
                let mut h = mass * q_pochhammer(prod * q.powi(n as i32 - 1), q, n)?.powi(2);
                for j in 0..n {
                    let (aj, _) = askey_wilson_rates(&t, q, j);
                    let (_, cj1) = askey_wilson_rates(&t, q, j + 1);
                    h *= aj * cj1;
                }
                if !(h > 0.0) {
                    return Err(Error::IndeterminateNormalisation(format!(
                        "Askey–Wilson norm at degree {n} is not positive: {h}"
                    )));
                }
                Ok(h)
            }
            FamilyData::AlSalamChihara { c, d, q } => {
                let mass = self.total_mass()?;
                Ok(mass * q_pochhammer(q, q, n)? * q_pochhammer(c * d, q, n)?)
            }
        }
    }

    /// Total mass of the canonical measure; equals `norm(0)`.
    pub fn total_mass(&self) -> Result<f64> {
        match *self {
            FamilyData::AskeyWilson { t, q } => {
                for &ti in &t {
                    if ti.abs() >= 1.0 {
                        return Err(Error::IndeterminateNormalisation(format!(
                            "Askey–Wilson density mass requires |tᵢ| < 1, got {ti}"
                        )));
                    }
                }
                let prod: f64 = t.iter().product();
                let mut denom = q_pochhammer_inf(q, q)?;
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        denom *= q_pochhammer_inf(t[i] * t[j], q)?;
                    }
                }
                Ok(q_pochhammer_inf(prod, q)? / denom)
            }
            FamilyData::AlSalamChihara { c, d, q } => {
                if c.abs() >= 1.0 || d.abs() >= 1.0 {
                    return Err(Error::IndeterminateNormalisation(format!(
                        "Al-Salam–Chihara density mass requires |c|, |d| < 1, got ({c}, {d})"
                    )));
                }
                Ok(1.0 / (q_pochhammer_inf(q, q)? * q_pochhammer_inf(c * d, q)?))
            }
            _ => self.norm(0),
        }
    }

    /// Leading coefficient of the degree-`n` polynomial (for Wilson, in the
    /// squared variable `y`).
    pub fn leading_coefficient(&self, n: usize) -> Result<f64> {
        match *self {
            FamilyData::Jacobi { alpha, beta } => {
                // (n+α+β+1)_n / (2ⁿ n!) as a cancellation-free product.
                let mut lc = 1.0;
                for j in 1..=n {
                    lc *= (n as f64 + alpha + beta + j as f64) / (2.0 * j as f64);
                }
                Ok(lc)
            }
            FamilyData::LittleQJacobi { a, b, q } => {
                let n32 = n as i32;
                let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
                Ok(sign * q.powi(-(n32 * (n32 - 1)) / 2)
                    * q_pochhammer(a * b * q.powi(n32 + 1), q, n)?
                    / q_pochhammer(a * q, q, n)?)
            }
            FamilyData::Wilson { w } => {
                let s: f64 = w.iter().sum();
                let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
                Ok(sign * specialfn::pochhammer(n as f64 + s - 1.0, n))
            }
            FamilyData::AskeyWilson { t, q } => {
                let prod: f64 = t.iter().product();
                Ok(2f64.powi(n as i32) * q_pochhammer(prod * q.powi(n as i32 - 1), q, n)?)
            }
            FamilyData::AlSalamChihara { .. } => Ok(2f64.powi(n as i32)),
        }
    }

    /// Weight of the canonical measure at a point of its support.
    ///
    /// The argument is the *integration* variable: `x ∈ (−1, 1)` for Jacobi,
    /// a lattice point `qᵏ` for little q-Jacobi (the value returned is the
    /// point mass), `x ∈ [0, ∞)` for Wilson (density in `x`, polynomials take
    /// `y = x²`), and `θ ∈ [0, π]` for the two trigonometric families
    /// (density in `θ`, polynomials take `cos θ`).
    pub fn weight(&self, point: f64) -> Result<f64> {
        match *self {
            FamilyData::Jacobi { alpha, beta } => {
                if !(point > -1.0 && point < 1.0) {
                    return Err(Error::OutsideSupport(point));
                }
                Ok((1.0 - point).powf(alpha) * (1.0 + point).powf(beta))
            }
            FamilyData::LittleQJacobi { a, b, q } => {
                if !(point > 0.0 && point <= 1.0) {
                    return Err(Error::OutsideSupport(point));
                }
                let k = (point.ln() / q.ln()).round();
                if k < 0.0 || (point - q.powi(k as i32)).abs() > 1e-10 * point {
                    return Err(Error::OutsideSupport(point));
                }
                let k = k as usize;
                Ok(q_pochhammer(b * q, q, k)? / q_pochhammer(q, q, k)?
                    * (a * q).powi(k as i32))
            }
            FamilyData::Wilson { w } => {
                if point < 0.0 {
                    return Err(Error::OutsideSupport(point));
                }
                if point == 0.0 {
                    return Ok(0.0);
                }
                let mut density = 1.0;
                for &wi in &w {
                    density *= gamma::gamma_abs_sq(wi, point)?;
                }
                density /= gamma::gamma_imag_abs_sq(2.0 * point)?;
                Ok(density / (2.0 * std::f64::consts::PI))
            }
            FamilyData::AskeyWilson { t, q } => {
                trig_density(point, &t, q)
            }
            FamilyData::AlSalamChihara { c, d, q } => {
                trig_density(point, &[c, d, 0.0, 0.0], q)
            }
        }
    }

    /// Orthonormal three-term recurrence coefficients `(off_n, diag_n)` such
    /// that `x r_n = off_n r_{n+1} + diag_n r_n + off_{n−1} r_{n−1}` with all
    /// off-diagonal entries positive; `x` is the polynomial variable.
    pub fn recurrence(&self, n: usize) -> Result<(f64, f64)> {
        match *self {
            FamilyData::Jacobi { alpha, beta } => {
                let diag = jacobi_monic_diag(alpha, beta, n);
                let rad = jacobi_monic_beta(alpha, beta, n + 1);
                sqrt_checked(rad, "Jacobi").map(|off| (off, diag))
            }
            FamilyData::LittleQJacobi { a, b, q } => {
                let (an, _) = little_q_jacobi_rates(a, b, q, n);
                let (_, cn1) = little_q_jacobi_rates(a, b, q, n + 1);
                let (_, cn) = little_q_jacobi_rates(a, b, q, n);
                sqrt_checked(an * cn1, "little q-Jacobi").map(|off| (off, an + cn))
            }
            FamilyData::Wilson { w } => {
                let (an, cn) = wilson_rates(&w, n);
                let (_, cn1) = wilson_rates(&w, n + 1);
                sqrt_checked(an * cn1, "Wilson").map(|off| (off, an + cn - w[0] * w[0]))
            }
            FamilyData::AskeyWilson { t, q } => {
                let (an, cn) = askey_wilson_rates(&t, q, n);
                let (_, cn1) = askey_wilson_rates(&t, q, n + 1);
                sqrt_checked(an * cn1, "Askey–Wilson")
                    .map(|off| (0.5 * off, 0.5 * (t[0] + 1.0 / t[0] - an - cn)))
            }
            FamilyData::AlSalamChihara { c, d, q } => {
                let qn = q.powi(n as i32);
                let rad = (1.0 - q * qn) * (1.0 - c * d * qn);
                sqrt_checked(rad, "Al-Salam–Chihara")
                    .map(|off| (0.5 * off, 0.5 * (c + d) * qn))
            }
        }
    }

    /// Values `r_0(x), …, r_{n_max}(x)` of the orthonormal family with
    /// positive off-diagonal recurrence, normalised so that
    /// `r_0 = 1/√(total mass)`.
    pub fn orthonormal_values(&self, x: f64, n_max: usize) -> Result<Vec<f64>> {
        let mass = self.total_mass()?;
        let r0 = 1.0 / sqrt_checked(mass, "total mass")?;
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(r0);
        if n_max == 0 {
            return Ok(values);
        }
        let (off0, diag0) = self.recurrence(0)?;
        values.push((x - diag0) * r0 / off0);
        let mut off_prev = off0;
        for n in 1..n_max {
            let (off, diag) = self.recurrence(n)?;
            let next = ((x - diag) * values[n] - off_prev * values[n - 1]) / off;
            values.push(next);
            off_prev = off;
        }
        Ok(values)
    }

    /// Numerical inner product `⟨f, g⟩` against the canonical measure.
    ///
    /// `f` and `g` take the polynomial variable (see [`FamilyData::eval`])
    /// and `degree_bound` is an upper bound for `deg(f·g)` when both are
    /// polynomials; the quadrature is chosen to be exact to that degree.
    pub fn inner_product(
        &self,
        f: &dyn Fn(f64) -> f64,
        g: &dyn Fn(f64) -> f64,
        degree_bound: usize,
    ) -> Result<f64> {
        measure::inner_product(self, f, g, degree_bound)
    }
}

/// Square root with a descriptive error when the radicand is not positive.
fn sqrt_checked(radicand: f64, family: &str) -> Result<f64> {
    if !(radicand > 0.0) {
        return Err(Error::IndeterminateNormalisation(format!(
            "{family} recurrence radicand is not positive: {radicand}"
        )));
    }
    Ok(radicand.sqrt())
}

/// Density in θ shared by the Askey–Wilson and Al-Salam–Chihara measures.
fn trig_density(theta: f64, t: &[f64; 4], q: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::OutsideSupport(theta));
    }
    let cos1 = theta.cos();
    let cos2 = (2.0 * theta).cos();
    let mut density = q_pochhammer_pair_inf(1.0, cos2, q)?;
    for &ti in t {
        if ti != 0.0 {
            density /= q_pochhammer_pair_inf(ti, cos1, q)?;
        }
    }
    Ok(density / (2.0 * std::f64::consts::PI))
}

/// Jacobi monic recurrence diagonal `α_n`.
pub(crate) fn jacobi_monic_diag(alpha: f64, beta: f64, n: usize) -> f64 {
    if n == 0 {
        (beta - alpha) / (alpha + beta + 2.0)
    } else {
        let s = 2.0 * n as f64 + alpha + beta;
        (beta * beta - alpha * alpha) / (s * (s + 2.0))
    }
}

/// Jacobi monic recurrence coefficient `β_n` (`n ≥ 1`).
pub(crate) fn jacobi_monic_beta(alpha: f64, beta: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    if n == 1 {
        // The general formula has a removable 0/0 at α+β = −1.
        4.0 * (1.0 + alpha) * (1.0 + beta)
            / ((2.0 + alpha + beta).powi(2) * (3.0 + alpha + beta))
    } else {
        let nf = n as f64;
        let s = 2.0 * nf + alpha + beta;
        4.0 * nf * (nf + alpha) * (nf + beta) * (nf + alpha + beta)
            / (s * s * (s + 1.0) * (s - 1.0))
    }
}

/// Little q-Jacobi x-recurrence rates `(A_n, C_n)`.
pub(crate) fn little_q_jacobi_rates(a: f64, b: f64, q: f64, n: usize) -> (f64, f64) {
    let n32 = n as i32;
    let qn = q.powi(n32);
    let ab = a * b;
    let a_n = qn * (1.0 - a * q * qn) * (1.0 - ab * q * qn)
        / ((1.0 - ab * q.powi(2 * n32 + 1)) * (1.0 - ab * q.powi(2 * n32 + 2)));
    let c_n = a * qn * (1.0 - qn) * (1.0 - b * qn)
        / ((1.0 - ab * q.powi(2 * n32)) * (1.0 - ab * q.powi(2 * n32 + 1)));
    (a_n, c_n)
}

/// Wilson y-recurrence rates `(A_n, C_n)`.
pub(crate) fn wilson_rates(w: &[f64; 4], n: usize) -> (f64, f64) {
    let [a, b, c, d] = *w;
    let s = a + b + c + d;
    let nf = n as f64;
    let a_n = if n == 0 {
        // (n+s−1) cancels against (2n+s−1) at n = 0.
        (a + b) * (a + c) * (a + d) / s
    } else {
        (nf + s - 1.0) * (nf + a + b) * (nf + a + c) * (nf + a + d)
            / ((2.0 * nf + s - 1.0) * (2.0 * nf + s))
    };
    let c_n = nf * (nf + b + c - 1.0) * (nf + b + d - 1.0) * (nf + c + d - 1.0)
        / ((2.0 * nf + s - 2.0) * (2.0 * nf + s - 1.0));
    (a_n, c_n)
}

/// Askey–Wilson x-recurrence rates `(A_n, C_n)`.
pub(crate) fn askey_wilson_rates(t: &[f64; 4], q: f64, n: usize) -> (f64, f64) {
    let [t0, t1, t2, t3] = *t;
    let prod = t0 * t1 * t2 * t3;
    let n32 = n as i32;
    let qn = q.powi(n32);
    let a_n = if n == 0 {
        // (1 − Π q^{n−1}) cancels against (1 − Π q^{2n−1}) at n = 0.
        (1.0 - t0 * t1) * (1.0 - t0 * t2) * (1.0 - t0 * t3) / (t0 * (1.0 - prod))
    } else {
        (1.0 - t0 * t1 * qn) * (1.0 - t0 * t2 * qn) * (1.0 - t0 * t3 * qn)
            * (1.0 - prod * q.powi(n32 - 1))
            / (t0 * (1.0 - prod * q.powi(2 * n32 - 1)) * (1.0 - prod * q.powi(2 * n32)))
    };
    let c_n = if n == 0 {
        0.0
    } else {
        t0 * (1.0 - qn)
            * (1.0 - t1 * t2 * q.powi(n32 - 1))
            * (1.0 - t1 * t3 * q.powi(n32 - 1))
            * (1.0 - t2 * t3 * q.powi(n32 - 1))
            / ((1.0 - prod * q.powi(2 * n32 - 2)) * (1.0 - prod * q.powi(2 * n32 - 1)))
    };
    (a_n, c_n)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)] // index loops read clearest in assertions
mod tests {
    use super::*;

    /// Deterministic points in (0, 1) from a fixed linear congruential step.
    fn unit_points(count: usize) -> Vec<f64> {
        let mut state = 0x2545f4914f6cdd1du64;
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
    fn jacobi_value_at_one_is_rising_factorial_over_factorial() {
        let (alpha, beta) = (0.3, -0.4);
        let fam = FamilyData::jacobi(alpha, beta).unwrap();
        for n in 0..=8usize {
            let expect = specialfn::pochhammer(alpha + 1.0, n)
                / (1..=n).map(|j| j as f64).product::<f64>();
            let got = fam.eval(n, 1.0).unwrap();
            assert!((got - expect).abs() <= 1e-13 * expect.abs(), "n={n}");
        }
    }

    #[test]
    fn second_lattice_mass_has_its_product_form() {
        let (a, b, q) = (0.5, 0.5, 0.5);
        let fam = FamilyData::little_q_jacobi(a, b, q).unwrap();
        let expect = (1.0 - b * q) / (1.0 - q) * a * q;
        let got = fam.weight(q).unwrap();
        assert!((got - expect).abs() <= 1e-15);
    }

    #[test]
    fn al_salam_chihara_first_diagonal_is_half_the_parameter_sum() {
        let (c, d, q) = (0.7, -0.2, 0.4);
        let fam = FamilyData::al_salam_chihara(c, d, q).unwrap();
        let (_, diag0) = fam.recurrence(0).unwrap();
        assert!((diag0 - 0.5 * (c + d)).abs() <= 1e-15);
    }

    #[test]
    fn series_and_recurrence_paths_agree() {
        // The orthonormal family with positive off-diagonals equals
        // sign(lc_n)·p_n/√h_n, so series evaluation and the three-term
        // recurrence must reproduce each other at arbitrary points.
        let cases: Vec<(FamilyData, f64, f64)> = vec![
            (FamilyData::jacobi(0.3, -0.4).unwrap(), -1.0, 1.0),
            (FamilyData::little_q_jacobi(0.5, 0.25, 0.5).unwrap(), 0.0, 1.0),
            (FamilyData::wilson([0.7, 1.1, 0.9, 0.55]).unwrap(), 0.0, 4.0),
            (
                FamilyData::askey_wilson([0.6, 0.3, -0.4, 0.2], 0.8).unwrap(),
                -1.0,
                1.0,
            ),
            (FamilyData::al_salam_chihara(0.5, -0.3, 0.8).unwrap(), -1.0, 1.0),
        ];
        let points = unit_points(20);
        for (fam, lo, hi) in &cases {
            for &u in &points {
                let x = lo + u * (hi - lo);
                let recur = fam.orthonormal_values(x, 12).unwrap();
                for n in 0..=12usize {
                    let sign = fam.leading_coefficient(n).unwrap().signum();
                    let series =
                        sign * fam.eval(n, x).unwrap() / fam.norm(n).unwrap().sqrt();
                    let scale = series.abs().max(1.0);
                    assert!(
                        (recur[n] - series).abs() <= 1e-11 * scale,
                        "{fam:?} n={n} x={x}: {} vs {series}",
                        recur[n]
                    );
                }
            }
        }
    }
}

