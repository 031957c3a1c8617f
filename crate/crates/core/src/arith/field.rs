//! Exact arithmetic in ℚ(β) in the power basis `1, β, …, β^{d-1}`, with
//! certified comparisons and floors through the real embedding.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::arith::algebraic::AlgebraicNumber;
use crate::arith::poly::RatPoly;
use crate::arith::ring::{FieldOps, Ring};

pub struct NumberField {
    beta: AlgebraicNumber,
    degree: usize,
    modulus: RatPoly,
    /// `reduction[k]` holds the coordinates of `β^{d+k}`, for `k < d - 1`.
    reduction: Vec<Vec<Rational>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(β), β = {:?}", self.beta)
    }
}

impl NumberField {
    pub fn new(beta: AlgebraicNumber) -> Arc<NumberField> {
        let degree = beta.degree();
        let modulus = beta.min_poly().to_rat().monic();
        let mut reduction: Vec<Vec<Rational>> = Vec::new();
        if degree >= 1 {
            // β^d = -Σ m_i β^i for the monic modulus.
            let mut cur: Vec<Rational> = (0..degree).map(|i| -modulus.coeff(i)).collect();
            for _ in 0..degree.saturating_sub(1) {
                reduction.push(cur.clone());
                // Multiply by β: shift up and fold the overflow back in.
                let top = cur[degree - 1].clone();
                let mut next = vec![Rational::new(); degree];
                for i in (1..degree).rev() {
                    next[i] = cur[i - 1].clone();
                }
                for (i, n) in next.iter_mut().enumerate() {
                    *n -= Rational::from(&top * &modulus.coeff(i));
                }
                cur = next;
            }
        }
        Arc::new(NumberField {
            beta,
            degree,
            modulus,
            reduction,
        })
    }

    pub fn beta(&self) -> &AlgebraicNumber {
        &self.beta
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic minimal polynomial over ℚ.
    pub fn modulus(&self) -> &RatPoly {
        &self.modulus
    }
}

#[derive(Clone)]
pub struct NfElem {
    field: Arc<NumberField>,
    coeffs: Vec<Rational>,
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for NfElem {}

impl Hash for NfElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})β")?,
                _ => write!(f, "({c})β^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn pow_interval(lo: &Rational, hi: &Rational, i: usize) -> (Rational, Rational) {
    // Both endpoints are positive (β > 1), so powers are monotone.
    let e = i as u32;
    (lo.clone().pow(e), hi.clone().pow(e))
}

impl NfElem {
    pub fn from_coeffs(field: &Arc<NumberField>, mut coeffs: Vec<Rational>) -> NfElem {
        if coeffs.len() > field.degree {
            let p = RatPoly::new(coeffs).rem(&field.modulus).expect("nonzero modulus");
            coeffs = p.into_coeffs();
        }
        coeffs.resize(field.degree, Rational::new());
        NfElem {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_rational(field: &Arc<NumberField>, r: Rational) -> NfElem {
        Self::from_coeffs(field, vec![r])
    }

    pub fn from_int(field: &Arc<NumberField>, v: impl Into<Integer>) -> NfElem {
        Self::from_rational(field, Rational::from(v.into()))
    }

    /// The generator β.
    pub fn generator(field: &Arc<NumberField>) -> NfElem {
        match field.beta.as_rational() {
            Some(r) => Self::from_rational(field, r),
            None => Self::from_coeffs(field, vec![Rational::new(), Rational::from(1)]),
        }
    }

    /// Evaluate a rational polynomial at β.
    pub fn from_poly(field: &Arc<NumberField>, p: &RatPoly) -> NfElem {
        let b = Self::generator(field);
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::from_int(field, 0), |acc, c| acc.mul(&b).add(&Self::from_rational(field, c.clone())))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `Some(r)` when the element is the rational number `r`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_default())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Bit size of the largest coefficient, a proxy for the precision
    /// needed to resolve the embedding.
    pub fn size_bits(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|c| c.numer().significant_bits() + c.denom().significant_bits())
            .max()
            .unwrap_or(0)
    }

    fn reduce_product(field: &Arc<NumberField>, mut prod: Vec<Rational>) -> NfElem {
        let d = field.degree;
        for k in (d..prod.len()).rev() {
            let c = std::mem::take(&mut prod[k]);
            if c.is_zero() {
                continue;
            }
            for (i, r) in field.reduction[k - d].iter().enumerate() {
                prod[i] += Rational::from(&c * r);
            }
        }
        prod.truncate(d);
        NfElem {
            field: field.clone(),
            coeffs: prod,
        }
    }

    pub fn pow(&self, e: u32) -> NfElem {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Rational interval enclosing the real embedding, using an isolating
    /// interval of β of width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> (Rational, Rational) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r);
        }
        let (blo, bhi) = self.field.beta.refine(bits);
        let mut lo = self.coeffs[0].clone();
        let mut hi = self.coeffs[0].clone();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let (plo, phi) = pow_interval(&blo, &bhi, i);
            if c.is_positive() {
                lo += Rational::from(c * &plo);
                hi += Rational::from(c * &phi);
            } else {
                lo += Rational::from(c * &phi);
                hi += Rational::from(c * &plo);
            }
        }
        (lo, hi)
    }

    fn start_bits(&self) -> u32 {
        64 + self.size_bits() + 4 * self.field.degree as u32
    }

    /// Exact floor of the real embedding. Rational elements are handled
    /// exactly; otherwise the enclosure is refined until it no longer
    /// straddles an integer, which must happen for an irrational value.
    pub fn floor(&self) -> Integer {
        if let Some(r) = self.as_rational() {
            return Integer::from(r.floor_ref());
        }
        let mut bits = self.start_bits();
        loop {
            let (lo, hi) = self.enclose(bits);
            let a = Integer::from(lo.floor_ref());
            let b = Integer::from(hi.floor_ref());
            if a == b {
                return a;
            }
            bits *= 2;
        }
    }

    /// Sign of the real embedding, exact.
    pub fn sign(&self) -> Ordering {
        if let Some(r) = self.as_rational() {
            return r.cmp0();
        }
        let mut bits = self.start_bits();
        loop {
            let (lo, hi) = self.enclose(bits);
            if lo.cmp0() == Ordering::Greater {
                return Ordering::Greater;
            }
            if hi.cmp0() == Ordering::Less {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn cmp_real(&self, other: &NfElem) -> Ordering {
        self.sub(other).sign()
    }

    /// Real embedding with `prec` significant bits.
    pub fn to_float(&self, prec: u32) -> Float {
        if let Some(r) = self.as_rational() {
            return Float::with_val(prec, &r);
        }
        let mut bits = self.start_bits() + prec;
        loop {
            let (lo, hi) = self.enclose(bits);
            let mid = Rational::from(&lo + &hi) / 2u32;
            let width = Rational::from(&hi - &lo);
            let scale = Rational::from(mid.abs_ref()) >> prec;
            if width <= scale {
                return Float::with_val(prec, &mid);
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }

    pub fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, self.to_float(prec))
    }

    /// Image under the embedding β ↦ `root` (any conjugate of β).
    pub fn eval_at(&self, root: &Complex) -> Complex {
        let prec = root.prec();
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc * root + Complex::with_val(prec, c);
        }
        acc
    }
}

impl Ring for NfElem {
    fn zero_like(&self) -> Self {
        NfElem::from_int(&self.field, 0)
    }
    fn one_like(&self) -> Self {
        NfElem::from_int(&self.field, 1)
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        NfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| Rational::from(a + b)).collect(),
        }
    }
    fn sub(&self, other: &Self) -> Self {
        NfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| Rational::from(a - b)).collect(),
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let d = self.field.degree;
        if d == 1 {
            return NfElem {
                field: self.field.clone(),
                coeffs: vec![Rational::from(&self.coeffs[0] * &other.coeffs[0])],
            };
        }
        let mut prod = vec![Rational::new(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += Rational::from(a * b);
                }
            }
        }
        NfElem::reduce_product(&self.field, prod)
    }
    fn neg(&self) -> Self {
        NfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
    fn from_i64_like(&self, v: i64) -> Self {
        NfElem::from_int(&self.field, v)
    }
}

impl FieldOps for NfElem {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(NfElem::from_rational(&self.field, r.recip()));
        }
        let a = RatPoly::new(self.coeffs.clone());
        let (g, s, _) = a.xgcd(&self.field.modulus);
        // The modulus is irreducible, so the gcd with a nonzero element is 1.
        debug_assert_eq!(g.degree(), Some(0));
        Some(NfElem::from_coeffs(&self.field, s.into_coeffs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::{ratio, IntPoly};

    fn field(c: &[i64], lo: (i64, i64), hi: (i64, i64)) -> Arc<NumberField> {
        let b = AlgebraicNumber::new(IntPoly::from_i64(c), Some((ratio(lo.0, lo.1), ratio(hi.0, hi.1)))).unwrap();
        NumberField::new(b)
    }

    #[test]
    fn golden_ratio_relations() {
        let k = field(&[-1, -1, 1], (16, 10), (17, 10));
        let phi = NfElem::generator(&k);
        let one = NfElem::from_int(&k, 1);
        assert_eq!(phi.mul(&phi), phi.add(&one));
        assert_eq!(phi.sub(&one).mul(&phi), one);
        assert_eq!(phi.mul(&phi).floor(), 2);
        assert_eq!(phi.inv().unwrap(), phi.sub(&one));
    }

    #[test]
    fn plastic_cube() {
        let k = field(&[-1, -1, 0, 1], (13, 10), (14, 10));
        let t = NfElem::generator(&k);
        let one = NfElem::from_int(&k, 1);
        assert_eq!(t.pow(3), t.add(&one));
        let x = t.pow(7).sub(&t);
        assert_eq!(x.mul(&x.inv().unwrap()), one);
    }

    #[test]
    fn exact_integer_floor() {
        let k = field(&[-1, -2, 1], (24, 10), (25, 10));
        let b = NfElem::generator(&k);
        let one = NfElem::from_int(&k, 1);
        let two = NfElem::from_int(&k, 2);
        // (1+√2)(√2-1) = 1 with β = 1+√2
        let prod = b.mul(&b.sub(&two));
        assert_eq!(prod, one);
        assert_eq!(prod.floor(), 1);
        assert_eq!(NfElem::from_int(&k, 3).floor(), 3);
        assert_eq!(b.neg().floor(), -3);
    }
}
