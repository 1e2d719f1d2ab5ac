//! Dense univariate polynomials in the monomial basis.
//!
//! These are used to apply differential operators exactly in coefficient
//! space. Coefficient index equals degree; the zero polynomial is the empty
//! list and all other representations keep a nonzero trailing coefficient.

/// Polynomial with `f64` coefficients, `coeffs[i]` multiplying `xⁱ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffPolynomial {
    coeffs: Vec<f64>,
}

impl CoeffPolynomial {
    /// The zero polynomial.
    pub fn zero() -> Self {
        CoeffPolynomial { coeffs: Vec::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: f64) -> Self {
        CoeffPolynomial::from_coefficients(vec![c])
    }

    /// Builds from raw coefficients, trimming trailing zeros.
    pub fn from_coefficients(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        CoeffPolynomial { coeffs }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient view.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Leading coefficient (0 for the zero polynomial).
    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &CoeffPolynomial) -> CoeffPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        CoeffPolynomial::from_coefficients(out)
    }

    /// Difference of two polynomials.
    pub fn sub(&self, other: &CoeffPolynomial) -> CoeffPolynomial {
        self.add(&other.scale(-1.0))
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &CoeffPolynomial) -> CoeffPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return CoeffPolynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CoeffPolynomial::from_coefficients(out)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> CoeffPolynomial {
        CoeffPolynomial::from_coefficients(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Formal derivative.
    pub fn derivative(&self) -> CoeffPolynomial {
        if self.coeffs.len() <= 1 {
            return CoeffPolynomial::zero();
        }
        CoeffPolynomial::from_coefficients(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }
}
