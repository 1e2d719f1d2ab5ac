//! Double-double arithmetic: an unevaluated sum of two `f64`s giving about
//! 32 significant decimal digits.
//!
//! Only the operations the crate actually needs are implemented: the error-free
//! transformations (`two_sum`, `two_prod` via FMA), field operations, square
//! root, and conversions. The representation keeps `hi` as the correctly
//! rounded `f64` value of the pair and `|lo| ≤ ulp(hi)/2`.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Double-double number: `hi + lo` with non-overlapping significands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    /// Leading component; equals the value rounded to nearest `f64`.
    pub hi: f64,
    /// Trailing error term.
    pub lo: f64,
}

/// Error-free sum: returns `(s, e)` with `s = fl(a+b)` and `a + b = s + e` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl Dd {
    /// Zero.
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    /// One.
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Builds a double-double from an exact `f64`.
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Renormalises a raw pair into the canonical representation.
    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// Rounds to the nearest `f64`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    /// Absolute value.
    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Square root by one Newton step on the `f64` seed, which already
    /// doubles the seed's precision to full double-double accuracy.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "Dd::sqrt of negative value");
        let y = self.hi.sqrt();
        // (y + self/y) / 2, carried out in double-double.
        (Dd::from_f64(y) + self / Dd::from_f64(y)) * Dd::from_f64(0.5)
    }

    /// Reciprocal.
    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        Dd::renorm(s, e)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        Dd::renorm(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        // Long division: two quotient digits plus a correction term.
        let q1 = self.hi / rhs.hi;
        let r = self - Dd::from_f64(q1) * rhs;
        let q2 = r.hi / rhs.hi;
        let r = r - Dd::from_f64(q2) * rhs;
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::renorm(s, e + q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// Scalar abstraction letting series kernels run in either `f64` or [`Dd`].
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + PartialOrd
{
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// Embeds an `f64` exactly.
    fn from_f64(x: f64) -> Self;
    /// Rounds to `f64`.
    fn to_f64(self) -> f64;
    /// Absolute value.
    fn abs(self) -> Self;
    /// Square root (caller guarantees nonnegativity).
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn zero() -> f64 {
        0.0
    }
    #[inline]
    fn one() -> f64 {
        1.0
    }
    #[inline]
    fn from_f64(x: f64) -> f64 {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
}

impl Scalar for Dd {
    #[inline]
    fn zero() -> Dd {
        Dd::ZERO
    }
    #[inline]
    fn one() -> Dd {
        Dd::ONE
    }
    #[inline]
    fn from_f64(x: f64) -> Dd {
        Dd::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    #[inline]
    fn abs(self) -> Dd {
        Dd::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Dd {
        Dd::sqrt(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_recovers_lost_low_bits() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-20);
        let s = a + b;
        // Plain f64 addition would lose the 1e-20 entirely.
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-20);
        let back = s - a;
        assert_eq!(back.to_f64(), 1e-20);
    }

    #[test]
    fn multiplication_is_exact_on_representable_products() {
        let a = Dd::from_f64(1.0 + 2f64.powi(-30));
        let b = Dd::from_f64(1.0 - 2f64.powi(-30));
        let p = a * b;
        // (1+e)(1-e) = 1 - e^2 with e^2 = 2^-60 representable in the low word.
        let err = p - (Dd::ONE - Dd::from_f64(2f64.powi(-60)));
        assert!(err.to_f64().abs() < 1e-40);
    }

    #[test]
    fn division_round_trips() {
        let a = Dd::from_f64(std::f64::consts::PI);
        let b = Dd::from_f64(std::f64::consts::E);
        let q = a / b;
        let r = q * b - a;
        assert!(r.to_f64().abs() < 1e-31);
    }

    #[test]
    fn sqrt_squares_back() {
        for &x in &[2.0, 3.0, 1e-8, 123456.789] {
            let s = Dd::from_f64(x).sqrt();
            let r = s * s - Dd::from_f64(x);
            assert!(
                r.to_f64().abs() <= 1e-30 * x,
                "sqrt({x}) residual {}",
                r.to_f64()
            );
        }
        assert_eq!(Dd::ZERO.sqrt().to_f64(), 0.0);
    }

    #[test]
    fn comparison_uses_low_word() {
        let a = Dd { hi: 1.0, lo: 1e-25 };
        let b = Dd { hi: 1.0, lo: 0.0 };
        assert!(a > b);
        assert!(b < a);
    }

    #[test]
    fn cancellation_survives_at_the_32_digit_level() {
        // (1 + x)² − 1 − 2x = x² for any x; with x ≈ 1e-8 the cancellation
        // destroys 16 digits, which f64 cannot survive but double-double can.
        let x = Dd::from_f64(1e-8);
        let y = (Dd::ONE + x) * (Dd::ONE + x) - Dd::ONE - (x + x);
        let expect = x * x;
        // Absolute error budget: a few units of 2⁻¹⁰⁶ on O(1) intermediates.
        assert!(
            (y - expect).to_f64().abs() < 1e-30,
            "residual {}",
            (y - expect).to_f64()
        );
        // The same expression in f64 is pure noise at this scale.
        let x64 = 1e-8_f64;
        let naive = (1.0 + x64) * (1.0 + x64) - 1.0 - 2.0 * x64;
        assert!((naive - (x64 * x64)).abs() > 1e-18);
    }
}
