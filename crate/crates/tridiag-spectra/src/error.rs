//! Error type shared across the crate.
//!
//! Numerical routines in this crate fail loudly rather than returning NaN:
//! every constructor validates its parameter domain, series evaluation
//! detects denominator poles, and normalisation steps check the sign of the
//! quantities under their square roots.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, evaluation and verification routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside the admissible domain of the family or
    /// operator being constructed.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Human-readable description of the violated constraint.
        reason: String,
    },

    /// A hypergeometric-type series hit a zero denominator factor before the
    /// series terminated.
    #[error("denominator pole in {context} at term {index}")]
    DenominatorPole {
        /// Which series or ratio was being evaluated.
        context: &'static str,
        /// Index of the term whose denominator factor vanished.
        index: usize,
    },

    /// A normalisation constant could not be formed because the quantity
    /// under a square root was zero or negative.
    #[error("indeterminate normalisation: {0}")]
    IndeterminateNormalisation(String),

    /// A quadrature rule was asked to integrate a polynomial of higher degree
    /// than it can handle exactly.
    #[error("quadrature degree too low: need degree {degree}, rule is exact to {capacity}")]
    QuadratureDegreeTooLow {
        /// Polynomial degree of the requested integrand.
        degree: usize,
        /// Maximal degree the rule integrates exactly.
        capacity: usize,
    },

    /// The positivity assumption behind the birth–death factorisation failed
    /// at some index.
    #[error("sign assumption violated: {0}")]
    SignAssumptionViolated(String),

    /// An evaluation point does not belong to the support of the measure.
    #[error("point {0} lies outside the support of the measure")]
    OutsideSupport(f64),

    /// A lattice sum was truncated before its tail dropped below the
    /// requested relative size.
    #[error("lattice truncation too short: relative tail {tail:.3e} at k_max {k_max}")]
    LatticeTruncation {
        /// Estimated relative size of the dropped tail.
        tail: f64,
        /// Truncation index that proved insufficient.
        k_max: usize,
    },
}

impl Error {
    /// Convenience constructor for [`Error::InvalidParameter`].
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
