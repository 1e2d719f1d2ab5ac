//! Pochhammer symbols and terminating (basic) hypergeometric sums.
//!
//! Every polynomial family in this crate is a terminating series of one of
//! two shapes, always balanced so that no extra sign/power factor appears in
//! the terms:
//!
//! * classical: `Σ_j (−n)_j Π(uᵢ)_j / (j! Π(vᵢ)_j) · zʲ`,
//! * basic:     `Σ_j (q⁻ⁿ;q)_j Π(uᵢ;q)_j / ((q;q)_j Π(vᵢ;q)_j) · zʲ`.
//!
//! The terminating parameter is implicit in [`SeriesParams::degree`]; the
//! remaining parameters may be real numbers or complex-conjugate pairs, whose
//! paired factors are multiplied out into real quadratics so the whole
//! evaluation stays in real arithmetic. Evaluation is generic over the scalar
//! type, so the same kernel runs in `f64` and in double-double precision.

use crate::error::{Error, Result};
use crate::specialfn::dd::Scalar;
use crate::specialfn::kahan::NeumaierSum;

/// One non-terminating parameter of a hypergeometric-type series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesParam {
    /// A real parameter `u`: contributes `(u)_j` (classical) or `(u;q)_j`
    /// (basic).
    Real(f64),
    /// A conjugate pair `center ± i·√shift_sq` in a classical series; the
    /// paired factor at step `j` is `(center + j)² + shift_sq`. Negative
    /// `shift_sq` encodes the real pair `center ± √(−shift_sq)`.
    ConjugatePair {
        /// Common real part of the pair.
        center: f64,
        /// Square of the imaginary part (may be negative).
        shift_sq: f64,
    },
    /// A conjugate pair `modulus·e^{±iθ}` in a basic series; the paired
    /// factor at step `j` is `1 − 2·modulus·qʲ·cos_angle + modulus²·q²ʲ`.
    /// `|cos_angle| > 1` encodes a pair of real parameters with the given
    /// product and sum.
    QConjugatePair {
        /// Common modulus of the pair.
        modulus: f64,
        /// Cosine of the common angle.
        cos_angle: f64,
    },
}

impl SeriesParam {
    /// Number of scalar parameters this entry stands for.
    fn weight(&self) -> usize {
        match self {
            SeriesParam::Real(_) => 1,
            SeriesParam::ConjugatePair { .. } | SeriesParam::QConjugatePair { .. } => 2,
        }
    }
}

/// A terminating series: degree, parameters and argument.
///
/// The terminating numerator parameter (`−n` classically, `q⁻ⁿ` in the basic
/// case) and the factorial-type denominator (`j!` or `(q;q)_j`) are implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesParams {
    /// The series has `degree + 1` terms.
    pub degree: usize,
    /// Non-terminating numerator parameters.
    pub numerator: Vec<SeriesParam>,
    /// Denominator parameters.
    pub denominator: Vec<SeriesParam>,
    /// Argument `z`.
    pub argument: f64,
}

impl SeriesParams {
    fn validate(&self, context: &'static str) -> Result<()> {
        let num: usize = self.numerator.iter().map(SeriesParam::weight).sum();
        let den: usize = self.denominator.iter().map(SeriesParam::weight).sum();
        if num != den {
            return Err(Error::invalid(
                "numerator",
                format!(
                    "{context}: series must be balanced; got {num} numerator and {den} \
                     denominator parameters beside the implicit ones"
                ),
            ));
        }
        Ok(())
    }
}

/// Incremental per-parameter factor state for one series evaluation.
enum FactorState<S> {
    /// Classical real parameter: factor `u + j`.
    Shift(S),
    /// Classical pair: factor `(center + j)² + shift_sq`.
    ShiftPair { center: S, shift_sq: S },
    /// Basic real parameter: factor `1 − u·qʲ`, tracking `u·qʲ`.
    QPower(S),
    /// Basic pair: factor `1 − 2·cos·t·qʲ + (t·qʲ)²`, tracking `t·qʲ`.
    QPowerPair { t_pow: S, two_cos: S },
}

impl<S: Scalar> FactorState<S> {
    fn new_classical(p: &SeriesParam) -> FactorState<S> {
        match *p {
            SeriesParam::Real(u) => FactorState::Shift(S::from_f64(u)),
            SeriesParam::ConjugatePair { center, shift_sq } => FactorState::ShiftPair {
                center: S::from_f64(center),
                shift_sq: S::from_f64(shift_sq),
            },
            SeriesParam::QConjugatePair { .. } => {
                unreachable!("q-type parameter in a classical series")
            }
        }
    }

    fn new_basic(p: &SeriesParam) -> FactorState<S> {
        match *p {
            SeriesParam::Real(u) => FactorState::QPower(S::from_f64(u)),
            SeriesParam::QConjugatePair { modulus, cos_angle } => FactorState::QPowerPair {
                t_pow: S::from_f64(modulus),
                two_cos: S::from_f64(2.0 * cos_angle),
            },
            SeriesParam::ConjugatePair { .. } => {
                unreachable!("classical parameter in a basic series")
            }
        }
    }

    /// Factor contributed at the current step.
    fn factor(&self) -> S {
        match *self {
            FactorState::Shift(u) => u,
            FactorState::ShiftPair { center, shift_sq } => center * center + shift_sq,
            FactorState::QPower(uq) => S::one() - uq,
            FactorState::QPowerPair { t_pow, two_cos } => {
                S::one() - t_pow * (two_cos - t_pow)
            }
        }
    }

    /// Advances the state from step `j` to `j + 1`.
    fn advance(&mut self, q: S) {
        match self {
            FactorState::Shift(u) => *u = *u + S::one(),
            FactorState::ShiftPair { center, .. } => *center = *center + S::one(),
            FactorState::QPower(uq) => *uq = *uq * q,
            FactorState::QPowerPair { t_pow, .. } => *t_pow = *t_pow * q,
        }
    }
}

/// Base of the series: classical or basic with `q ∈ (0, 1)`.
#[derive(Clone, Copy)]
enum Base {
    Classical,
    Basic(f64),
}

fn series_terms<S: Scalar>(
    base: Base,
    p: &SeriesParams,
    z: S,
    context: &'static str,
) -> Result<Vec<S>> {
    p.validate(context)?;
    let n = p.degree;

    let (mut num_states, mut den_states): (Vec<FactorState<S>>, Vec<FactorState<S>>) = match base {
        Base::Classical => (
            p.numerator.iter().map(FactorState::new_classical).collect(),
            p.denominator.iter().map(FactorState::new_classical).collect(),
        ),
        Base::Basic(_) => (
            p.numerator.iter().map(FactorState::new_basic).collect(),
            p.denominator.iter().map(FactorState::new_basic).collect(),
        ),
    };

    let q = match base {
        Base::Classical => S::one(),
        Base::Basic(q) => S::from_f64(q),
    };
    // Terminating-parameter state: (j − n) classically, (1 − q^{j−n}) in the
    // basic case, where q^{−n} is built once by repeated division.
    let mut term_shift = S::from_f64(-(n as f64));
    let mut term_qpow = S::one();
    if let Base::Basic(_) = base {
        for _ in 0..n {
            term_qpow = term_qpow / q;
        }
    }
    // q^{j+1}, advanced each step, for the (q; q)_j factor.
    let mut q_next_pow = q;

    let mut terms = Vec::with_capacity(n + 1);
    let mut term = S::one();
    terms.push(term);
    for j in 0..n {
        let mut ratio = match base {
            Base::Classical => term_shift,
            Base::Basic(_) => S::one() - term_qpow,
        };
        for st in &mut num_states {
            ratio = ratio * st.factor();
            st.advance(q);
        }
        for (i, st) in den_states.iter_mut().enumerate() {
            let f = st.factor();
            if f.to_f64() == 0.0 {
                return Err(Error::DenominatorPole { context, index: i });
            }
            ratio = ratio / f;
            st.advance(q);
        }
        let step = match base {
            Base::Classical => S::from_f64((j + 1) as f64),
            Base::Basic(_) => S::one() - q_next_pow,
        };
        term = term * ratio * z / step;
        terms.push(term);
        term_shift = term_shift + S::one();
        term_qpow = term_qpow * q;
        q_next_pow = q_next_pow * q;
    }
    Ok(terms)
}

fn sum_terms<S: Scalar>(terms: &[S]) -> S {
    let mut acc = S::zero();
    for &t in terms {
        acc = acc + t;
    }
    acc
}

/// Terminating classical hypergeometric sum (balanced shape, argument `z`).
pub fn hypergeometric_terminating(p: &SeriesParams) -> Result<f64> {
    let terms = hypergeometric_terminating_terms(p)?;
    Ok(terms.iter().copied().collect::<NeumaierSum>().value())
}

/// Individual terms of [`hypergeometric_terminating`], for summation-order
/// diagnostics.
pub fn hypergeometric_terminating_terms(p: &SeriesParams) -> Result<Vec<f64>> {
    series_terms::<f64>(Base::Classical, p, p.argument, "hypergeometric_terminating")
}

/// Double-double variant of [`hypergeometric_terminating`].
#[cfg(test)]
pub(crate) fn hypergeometric_terminating_dd(p: &SeriesParams) -> Result<crate::specialfn::Dd> {
    hypergeometric_terminating_dd_arg(p, crate::specialfn::Dd::from_f64(p.argument))
}

/// Double-double evaluation with an explicit double-double argument, which
/// overrides `p.argument`.
pub(crate) fn hypergeometric_terminating_dd_arg(
    p: &SeriesParams,
    z: crate::specialfn::Dd,
) -> Result<crate::specialfn::Dd> {
    let terms =
        series_terms::<crate::specialfn::Dd>(Base::Classical, p, z, "hypergeometric_terminating")?;
    Ok(sum_terms(&terms))
}

/// Terminating basic hypergeometric sum with base `q ∈ (0, 1)`.
pub fn basic_hypergeometric_terminating(q: f64, p: &SeriesParams) -> Result<f64> {
    let terms = basic_hypergeometric_terminating_terms(q, p)?;
    Ok(terms.iter().copied().collect::<NeumaierSum>().value())
}

/// Individual terms of [`basic_hypergeometric_terminating`].
pub fn basic_hypergeometric_terminating_terms(q: f64, p: &SeriesParams) -> Result<Vec<f64>> {
    check_base(q)?;
    series_terms::<f64>(Base::Basic(q), p, p.argument, "basic_hypergeometric_terminating")
}

/// Double-double variant of [`basic_hypergeometric_terminating`].
pub(crate) fn basic_hypergeometric_terminating_dd(
    q: f64,
    p: &SeriesParams,
) -> Result<crate::specialfn::Dd> {
    basic_hypergeometric_terminating_dd_arg(q, p, crate::specialfn::Dd::from_f64(p.argument))
}

/// Double-double evaluation with an explicit double-double argument, which
/// overrides `p.argument`.
pub(crate) fn basic_hypergeometric_terminating_dd_arg(
    q: f64,
    p: &SeriesParams,
    z: crate::specialfn::Dd,
) -> Result<crate::specialfn::Dd> {
    check_base(q)?;
    series_terms::<crate::specialfn::Dd>(Base::Basic(q), p, z, "basic_hypergeometric_terminating")
        .map(|t| sum_terms(&t))
}

fn check_base(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(
            "q",
            format!("base must lie in (0, 1), got {q}"),
        ));
    }
    Ok(())
}

/// Rising factorial `(x)_n = x (x+1) ⋯ (x+n−1)`.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    let mut p = 1.0;
    for j in 0..n {
        p *= x + j as f64;
    }
    p
}

/// Finite q-Pochhammer symbol `(a; q)_n = Π_{j<n} (1 − a qʲ)`.
pub fn q_pochhammer(a: f64, q: f64, n: usize) -> Result<f64> {
    check_base(q)?;
    let mut p = 1.0;
    let mut aq = a;
    for _ in 0..n {
        p *= 1.0 - aq;
        aq *= q;
    }
    Ok(p)
}

/// Infinite q-Pochhammer symbol `(a; q)_∞`, truncated once the factors differ
/// from 1 by less than 1e−18.
pub fn q_pochhammer_inf(a: f64, q: f64) -> Result<f64> {
    check_base(q)?;
    let mut p = 1.0;
    let mut aq = a;
    while aq.abs() >= 1e-18 {
        p *= 1.0 - aq;
        aq *= q;
    }
    Ok(p)
}

/// Paired finite symbol `|(t e^{iθ}; q)_n|² = Π_{j<n} (1 − 2 t qʲ cosθ + t² q²ʲ)`.
pub fn q_pochhammer_pair(modulus: f64, cos_angle: f64, q: f64, n: usize) -> Result<f64> {
    check_base(q)?;
    let mut p = 1.0;
    let mut tq = modulus;
    for _ in 0..n {
        p *= 1.0 - tq * (2.0 * cos_angle - tq);
        tq *= q;
    }
    Ok(p)
}

/// Paired infinite symbol `|(t e^{iθ}; q)_∞|²`.
pub fn q_pochhammer_pair_inf(modulus: f64, cos_angle: f64, q: f64) -> Result<f64> {
    check_base(q)?;
    let mut p = 1.0;
    let mut tq = modulus;
    while tq.abs() >= 1e-18 {
        p *= 1.0 - tq * (2.0 * cos_angle - tq);
        tq *= q;
    }
    Ok(p)
}

/// Double-double finite q-Pochhammer symbol.
pub(crate) fn q_pochhammer_dd(a: crate::specialfn::Dd, q: f64, n: usize) -> crate::specialfn::Dd {
    use crate::specialfn::Dd;
    let q = Dd::from_f64(q);
    let mut p = Dd::ONE;
    let mut aq = a;
    for _ in 0..n {
        p = p * (Dd::ONE - aq);
        aq = aq * q;
    }
    p
}
