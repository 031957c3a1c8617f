use std::fmt::Debug;

use num_traits::Zero;
use rug::{Complex, Rational};

/// Minimal commutative-ring interface shared by the coefficient domains
/// used for truncated series: rationals, elements of ℚ(β) and
/// multiprecision complex numbers.
///
/// Elements carry their own context (a number field, a precision), so
/// constants are produced from an existing element rather than statically.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64_like(&self, v: i64) -> Self;
}

pub trait FieldOps: Ring {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
}

impl FieldOps for Rational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.clone().recip())
        }
    }
}

impl Ring for Complex {
    fn zero_like(&self) -> Self {
        Complex::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Complex::with_val(self.prec(), 1)
    }
    fn is_zero_elem(&self) -> bool {
        self.real().is_zero() && self.imag().is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        Complex::with_val(self.prec(), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Complex::with_val(self.prec(), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Complex::with_val(self.prec(), self * other)
    }
    fn neg(&self) -> Self {
        Complex::with_val(self.prec(), -self)
    }
    fn from_i64_like(&self, v: i64) -> Self {
        Complex::with_val(self.prec(), v)
    }
}

impl FieldOps for Complex {
    fn inv(&self) -> Option<Self> {
        if self.is_zero_elem() {
            None
        } else {
            Some(Complex::with_val(self.prec(), self.recip_ref()))
        }
    }
}
