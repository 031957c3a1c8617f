//! Power series in one variable truncated at a fixed order.

use crate::arith::ring::{FieldOps, Ring};
use crate::error::{Error, Result};

/// `c_0 + c_1 U + … + c_N U^N + O(U^{N+1})`.
///
/// The vector always holds exactly `N + 1` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> TruncatedSeries<T> {
    /// Pads with zeros (built from `template`) or cuts `coeffs` to `order + 1` terms.
    pub fn from_coeffs(template: &T, mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(template.zero_like());
        }
        TruncatedSeries { coeffs }
    }

    pub fn zero(template: &T, order: usize) -> Self {
        Self::from_coeffs(template, Vec::new(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        let t = c.clone();
        Self::from_coeffs(&t, vec![c], order)
    }

    /// The series `U` itself.
    pub fn variable(template: &T, order: usize) -> Self {
        let mut s = Self::zero(template, order);
        if order >= 1 {
            s.coeffs[1] = template.one_like();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn set_coeff(&mut self, i: usize, c: T) {
        self.coeffs[i] = c;
    }

    pub fn template(&self) -> &T {
        &self.coeffs[0]
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero_elem())
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.template(), self.coeffs.clone(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncatedSeries {
            coeffs: (0..=n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out: Vec<T> = (0..=n).map(|_| self.template().zero_like()).collect();
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero_elem() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero_elem() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiply by `U^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out: Vec<T> = (0..=n).map(|_| self.template().zero_like()).collect();
        for i in 0..=n {
            if i + k <= n {
                out[i + k] = self.coeffs[i].clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(self.template().one_like(), self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self(inner(U))`; `inner` must have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero_elem() {
            return Err(Error::InvalidInput(
                "series composition needs an inner series with zero constant term".into(),
            ));
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Self::zero(self.template(), n);
        for c in self.coeffs.iter().take(n + 1).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        Ok(acc)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&T) -> S) -> TruncatedSeries<S> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Horner evaluation at a point of the same coefficient domain.
    pub fn eval(&self, u: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(self.template().zero_like(), |acc, c| acc.mul(u).add(c))
    }
}

impl<T: FieldOps> TruncatedSeries<T> {
    /// Multiplicative inverse of a unit (nonzero constant term).
    pub fn reciprocal(&self) -> Result<Self> {
        let b0 = self.coeffs[0].inv().ok_or(Error::NotAUnit)?;
        let n = self.order();
        let mut out = vec![b0.clone()];
        for k in 1..=n {
            let mut acc = self.template().zero_like();
            for j in 1..=k {
                if !self.coeffs[j].is_zero_elem() {
                    acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out.push(acc.mul(&b0).neg());
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn s(v: &[i64], n: usize) -> TruncatedSeries<Rational> {
        let t = Rational::new();
        TruncatedSeries::from_coeffs(&t, v.iter().map(|&x| Rational::from(x)).collect(), n)
    }

    #[test]
    fn product_of_conjugate_binomials() {
        assert_eq!(s(&[1, 1], 4).mul(&s(&[1, -1], 4)), s(&[1, 0, -1], 4));
    }

    #[test]
    fn geometric_reciprocal() {
        assert_eq!(s(&[1, -1], 3).reciprocal().unwrap(), s(&[1, 1, 1, 1], 3));
        assert_eq!(s(&[0, 1], 3).reciprocal(), Err(Error::NotAUnit));
    }

    #[test]
    fn composition() {
        // s(V) = V + V^2, V = 2U
        let r = s(&[0, 1, 1], 2).compose(&s(&[0, 2], 2)).unwrap();
        assert_eq!(r, s(&[0, 2, 4], 2));
        assert!(s(&[0, 1], 2).compose(&s(&[1, 1], 2)).is_err());
    }

    #[test]
    fn orders_combine_to_the_minimum() {
        let a = s(&[1, 2, 3, 4], 3);
        let b = s(&[1, 1], 1);
        assert_eq!(a.mul(&b).order(), 1);
        assert_eq!(a.add(&b), s(&[2, 3], 1));
    }
}
