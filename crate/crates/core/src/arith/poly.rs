//! Dense univariate polynomials over the integers and the rationals.
//!
//! Coefficients are stored lowest degree first and kept normalized: the
//! last stored coefficient is nonzero, and the zero polynomial has no
//! coefficients at all.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rug::{Integer, Rational};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type IntPoly = Poly<Integer>;
pub type RatPoly = Poly<Rational>;

impl<T: Clone + Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c * X^n`
    pub fn monomial(c: T, n: usize) -> Self {
        let mut v = vec![T::zero(); n + 1];
        v[n] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `X^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// `X^deg * P(1/X)` taken with respect to the polynomial's own degree.
    pub fn reciprocal(&self) -> Self {
        let mut v = self.coeffs.clone();
        v.reverse();
        Self::new(v)
    }

    /// `X^n * P(1/X)` for an explicit `n >= deg P`.
    pub fn reciprocal_with_degree(&self, n: usize) -> Self {
        let mut v = vec![T::zero(); n + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[n - i] = c.clone();
        }
        Self::new(v)
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T> Poly<T>
where
    T: Clone + Zero + One + for<'a> Add<&'a T, Output = T> + for<'a> Mul<&'a T, Output = T>,
{
    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = T::one();
        for c in self.coeffs.iter().skip(1) {
            v.push(c.clone() * &k);
            k = k + &T::one();
        }
        Self::new(v)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `P(Q(X))` by Horner's rule.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }
}

impl<T> Add for &Poly<T>
where
    T: Clone + Zero + for<'b> Add<&'b T, Output = T>,
{
    type Output = Poly<T>;
    fn add(self, rhs: Self) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.clone() + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => T::zero(),
            })
            .collect();
        Poly::new(v)
    }
}

impl<T> Neg for &Poly<T>
where
    T: Clone + Zero + Neg<Output = T>,
{
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T> Sub for &Poly<T>
where
    T: Clone + Zero + Neg<Output = T> + for<'b> Add<&'b T, Output = T>,
{
    type Output = Poly<T>;
    fn sub(self, rhs: Self) -> Poly<T> {
        self + &(-rhs)
    }
}

impl<T> Mul for &Poly<T>
where
    T: Clone + Zero + for<'b> Add<&'b T, Output = T> + for<'b> Mul<&'b T, Output = T>,
{
    type Output = Poly<T>;
    fn mul(self, rhs: Self) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + &(a.clone() * b);
            }
        }
        Poly::new(v)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T> $tr for Poly<T>
        where
            for<'a> &'a Poly<T>: $tr<Output = Poly<T>>,
        {
            type Output = Poly<T>;
            fn $m(self, rhs: Self) -> Poly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

/// Sign and magnitude, used only for printing.
pub trait SignedCoeff {
    fn is_neg(&self) -> bool;
    fn magnitude(&self) -> Self;
}

impl SignedCoeff for Integer {
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn magnitude(&self) -> Self {
        self.clone().abs()
    }
}

impl SignedCoeff for Rational {
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn magnitude(&self) -> Self {
        self.clone().abs()
    }
}

impl<T: fmt::Display + Zero + One + PartialEq + Clone + SignedCoeff> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_neg();
            let mag = c.magnitude();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "X")?,
                1 => write!(f, "{mag}*X")?,
                _ if unit => write!(f, "X^{i}")?,
                _ => write!(f, "{mag}*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Display + Zero + One + PartialEq + Clone + SignedCoeff> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn rat(n: impl Into<Integer>) -> Rational {
    Rational::from(n.into())
}

pub fn ratio(n: impl Into<Integer>, d: impl Into<Integer>) -> Rational {
    Rational::from((n.into(), d.into()))
}

impl IntPoly {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    /// Build from coefficients listed highest degree first.
    pub fn from_high_to_low(coeffs: &[i64]) -> Self {
        let mut v: Vec<Integer> = coeffs.iter().map(|&c| Integer::from(c)).collect();
        v.reverse();
        Self::new(v)
    }

    pub fn to_rat(&self) -> RatPoly {
        self.map(|c| Rational::from(c.clone()))
    }

    pub fn content(&self) -> Integer {
        self.coeffs
            .iter()
            .fold(Integer::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        self.map(|c| Integer::from(c / &g))
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|l| l.is_one())
    }

    pub fn height(&self) -> Integer {
        self.coeffs
            .iter()
            .map(|c| c.clone().abs())
            .max()
            .unwrap_or_else(Integer::zero)
    }

    pub fn eval_rat(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Exact quotient `self / divisor` over the integers.
    pub fn exact_div(&self, divisor: &IntPoly) -> Result<IntPoly> {
        let (q, r) = self.to_rat().div_rem(&divisor.to_rat())?;
        if !r.is_zero() {
            return Err(Error::DivisionFailed(format!("{divisor} does not divide {self}")));
        }
        RatPoly::to_int(&q)
            .ok_or_else(|| Error::DivisionFailed(format!("quotient of {self} by {divisor} is not integral")))
    }

    /// Multiplicity of `factor` in `self` (0 when it does not divide).
    pub fn multiplicity_of(&self, factor: &IntPoly) -> usize {
        let mut k = 0;
        let mut cur = self.clone();
        while let Ok(q) = cur.exact_div(factor) {
            k += 1;
            cur = q;
            if cur.degree().is_none_or(|d| d < factor.degree().unwrap_or(0)) {
                break;
            }
        }
        k
    }

    /// Number of sign changes of the coefficient sequence.
    pub fn sign_variations(&self) -> usize {
        let mut last = 0i8;
        let mut n = 0;
        for c in &self.coeffs {
            let s = if c.is_positive() { 1 } else if c.is_negative() { -1 } else { 0 };
            if s != 0 {
                if last != 0 && s != last {
                    n += 1;
                }
                last = s;
            }
        }
        n
    }
}

impl RatPoly {
    pub fn div_rem(&self, divisor: &RatPoly) -> Result<(RatPoly, RatPoly)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::DivisionFailed("division by the zero polynomial".into()))?;
        let lead = divisor.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((RatPoly::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = Rational::from(&r[k + dd] / &lead);
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    r[k + j] -= Rational::from(&c * b);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((RatPoly::new(q), RatPoly::new(r)))
    }

    pub fn rem(&self, divisor: &RatPoly) -> Result<RatPoly> {
        Ok(self.div_rem(divisor)?.1)
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            Some(l) => {
                let l = l.clone();
                self.map(|c| Rational::from(c / &l))
            }
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended Euclid: returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let one = RatPoly::constant(rat(1));
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (one.clone(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = l.recip();
                let sc = |p: &RatPoly| p.map(|c| Rational::from(c * &inv));
                (sc(&r0), sc(&s0), sc(&t0))
            }
            None => (r0, s0, t0),
        }
    }

    /// Clear denominators and return the primitive integer polynomial.
    pub fn to_primitive_int(&self) -> IntPoly {
        let l = self
            .coeffs
            .iter()
            .fold(Integer::one(), |acc, c| acc.lcm(c.denom()));
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| c.numer() * Integer::from(&l / c.denom()))
                .collect(),
        )
            .primitive()
    }

    /// `Some` when every coefficient is an integer.
    pub fn to_int(&self) -> Option<IntPoly> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPoly::new(self.coeffs.iter().map(|c| c.numer().clone()).collect()))
        } else {
            None
        }
    }

    /// `P(X + a)`
    pub fn taylor_shift(&self, a: &Rational) -> RatPoly {
        let lin = RatPoly::new(vec![a.clone(), rat(1)]);
        self.compose(&lin)
    }
}

/// Square-free decomposition over the rationals (Yun): returns pairs
/// `(g_i, i)` with `p = c * prod g_i^i`, every `g_i` primitive, square-free
/// and pairwise coprime.
pub fn square_free_decomposition(p: &IntPoly) -> Vec<(IntPoly, usize)> {
    let mut out = Vec::new();
    if p.degree().is_none_or(|d| d == 0) {
        return out;
    }
    let f = p.to_rat();
    let df = f.derivative();
    let mut a = f.gcd(&df);
    let mut b = f.div_rem(&a).unwrap().0;
    let mut c = df.div_rem(&a).unwrap().0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().is_some_and(|deg| deg > 0) {
        a = b.gcd(&d);
        if a.degree().is_some_and(|deg| deg > 0) {
            out.push((a.to_primitive_int(), i));
        }
        b = b.div_rem(&a).unwrap().0;
        c = d.div_rem(&a).unwrap().0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Newton's identities: power sums `p_1..p_n` of the roots of a monic
/// integer polynomial, computed exactly.
pub fn power_sums(p: &IntPoly, n: usize) -> Result<Vec<Integer>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("power sums of the zero polynomial".into()))?;
    if !p.is_monic() {
        return Err(Error::InvalidInput(format!("power sums need a monic polynomial, got {p}")));
    }
    // e_k with sign folded in: X^d + c_{d-1} X^{d-1} + ... ; c_{d-k} = (-1)^k e_k.
    let c = |k: usize| -> Integer {
        if k > deg {
            Integer::zero()
        } else {
            p.coeff(deg - k)
        }
    };
    let mut sums: Vec<Integer> = Vec::with_capacity(n);
    for k in 1..=n {
        // p_k + c_1 p_{k-1} + ... + c_{k-1} p_1 + k c_k = 0
        let mut acc = Integer::from(k) * c(k);
        for i in 1..k {
            acc += c(i) * &sums[k - i - 1];
        }
        sums.push(-acc);
    }
    Ok(sums)
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::zero();
    }
    let k = k.min(n - k);
    let mut acc = Integer::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
