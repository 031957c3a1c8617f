//! Real algebraic numbers given by an integer minimal polynomial and a
//! rational isolating interval.

use std::cmp::Ordering;
use std::fmt;
use std::sync::RwLock;

use rug::{Float, Integer, Rational};

use crate::arith::factor::is_irreducible;
use crate::arith::poly::{IntPoly, RatPoly};
use crate::error::{Error, Result};

pub struct AlgebraicNumber {
    min_poly: IntPoly,
    sturm: Vec<RatPoly>,
    interval: RwLock<(Rational, Rational)>,
}

impl Clone for AlgebraicNumber {
    fn clone(&self) -> Self {
        AlgebraicNumber {
            min_poly: self.min_poly.clone(),
            sturm: self.sturm.clone(),
            interval: RwLock::new(self.interval()),
        }
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.interval();
        write!(f, "root of {} in [{}, {}]", self.min_poly, lo.to_f64(), hi.to_f64())
    }
}

/// Sturm sequence `p, p', -rem(p, p'), …` over the rationals.
pub fn sturm_sequence(p: &IntPoly) -> Vec<RatPoly> {
    let mut seq = vec![p.to_rat(), p.to_rat().derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]).expect("nonzero divisor");
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn sign_changes_at(seq: &[RatPoly], x: &Rational) -> usize {
    let mut last = Ordering::Equal;
    let mut n = 0;
    for s in seq {
        let v = s.eval(x).cmp0();
        if v != Ordering::Equal {
            if last != Ordering::Equal && v != last {
                n += 1;
            }
            last = v;
        }
    }
    n
}

/// Number of distinct real roots in `(lo, hi]`.
pub fn count_roots(seq: &[RatPoly], lo: &Rational, hi: &Rational) -> usize {
    sign_changes_at(seq, lo).saturating_sub(sign_changes_at(seq, hi))
}

/// Cauchy bound: every complex root has modulus below it.
pub fn cauchy_bound(p: &IntPoly) -> Rational {
    let lead = p.leading().expect("nonzero polynomial").clone().abs();
    let m = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.clone().abs())
        .max()
        .unwrap_or_default();
    Rational::from((m, lead)) + 1u32
}

fn sign_at(p: &IntPoly, x: &Rational) -> Ordering {
    p.eval_rat(x).cmp0()
}

fn eval_float(p: &IntPoly, x: &Float) -> Float {
    let prec = x.prec();
    p.coeffs()
        .iter()
        .rev()
        .fold(Float::with_val(prec, 0), |acc, c| acc * x + c)
}

fn eval_float_deriv(p: &IntPoly, x: &Float) -> Float {
    let prec = x.prec();
    let mut acc = Float::with_val(prec, 0);
    for (i, c) in p.coeffs().iter().enumerate().skip(1).rev() {
        acc = acc * x + Integer::from(c * i as u32);
    }
    acc
}

impl AlgebraicNumber {
    /// Validates `min_poly` (made primitive with positive leading
    /// coefficient) and locates the root: inside `interval` when given,
    /// otherwise the largest real root.
    pub fn new(min_poly: IntPoly, interval: Option<(Rational, Rational)>) -> Result<Self> {
        let deg = min_poly
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidInput("minimal polynomial must have degree at least 1".into()))?;
        let p = min_poly.primitive();
        if !is_irreducible(&p)? {
            return Err(Error::Reducible(p.to_string()));
        }
        if deg == 1 {
            let r = Rational::from((-p.coeff(0), p.coeff(1)));
            if let Some((lo, hi)) = &interval {
                if r < *lo || r > *hi {
                    return Err(Error::InvalidInput(format!("root {r} of {p} is not in [{lo}, {hi}]")));
                }
            }
            if r <= 1 {
                return Err(Error::NotGreaterThanOne(format!("{p} has root {r}")));
            }
            return Ok(AlgebraicNumber {
                sturm: sturm_sequence(&p),
                min_poly: p,
                interval: RwLock::new((r.clone(), r)),
            });
        }
        let sturm = sturm_sequence(&p);
        let (lo, hi) = match interval {
            Some((lo, hi)) => {
                if lo >= hi {
                    return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
                }
                let n = count_roots(&sturm, &lo, &hi);
                if n != 1 {
                    return Err(Error::InvalidInput(format!(
                        "interval [{lo}, {hi}] contains {n} roots of {p}, expected exactly one"
                    )));
                }
                (lo, hi)
            }
            None => largest_root_interval(&p, &sturm)?,
        };
        let x = AlgebraicNumber {
            min_poly: p,
            sturm,
            interval: RwLock::new((lo, hi)),
        };
        x.ensure_greater_than_one()?;
        Ok(x)
    }

    fn ensure_greater_than_one(&self) -> Result<()> {
        let one = Rational::from(1);
        loop {
            let (lo, hi) = self.interval();
            if lo > one {
                return Ok(());
            }
            if hi <= one {
                return Err(Error::NotGreaterThanOne(format!("selected root of {} is at most 1", self.min_poly)));
            }
            self.bisect_once();
        }
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap_or(0)
    }

    /// `Some(r)` when the number is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.degree() == 1 {
            Some(self.interval().0)
        } else {
            None
        }
    }

    /// Current isolating interval (a snapshot of the cache).
    pub fn interval(&self) -> (Rational, Rational) {
        self.interval.read().expect("interval lock").clone()
    }

    fn store(&self, lo: Rational, hi: Rational) {
        let mut g = self.interval.write().expect("interval lock");
        // Keep only improvements so concurrent refiners cannot widen it.
        if lo > g.0 && lo <= g.1 {
            g.0 = lo;
        }
        if hi < g.1 && hi >= g.0 {
            g.1 = hi;
        }
    }

    fn bisect_once(&self) {
        let (lo, hi) = self.interval();
        let mid = Rational::from(&lo + &hi) / 2u32;
        let s_lo = sign_at(&self.min_poly, &lo);
        let s_mid = sign_at(&self.min_poly, &mid);
        if s_mid == Ordering::Equal {
            self.store(mid.clone(), mid);
        } else if s_mid == s_lo {
            self.store(mid, hi);
        } else {
            self.store(lo, mid);
        }
    }

    /// An interval of width at most `2^-bits` containing the root. The
    /// result is nested in every previously returned interval.
    pub fn refine(&self, bits: u32) -> (Rational, Rational) {
        let target = Rational::from((Integer::from(1), Integer::from(1) << bits));
        loop {
            let (lo, hi) = self.interval();
            if Rational::from(&hi - &lo) <= target {
                return (lo, hi);
            }
            if !self.newton_step(bits) {
                for _ in 0..32 {
                    self.bisect_once();
                }
            }
        }
    }

    /// Newton iteration in floating point, then certify a tiny interval
    /// around the result by an exact sign change.
    fn newton_step(&self, bits: u32) -> bool {
        let (lo, hi) = self.interval();
        let prec = bits + 64;
        let mut x = Float::with_val(prec, Float::with_val(prec, &lo) + Float::with_val(prec, &hi)) / 2u32;
        let lo_f = Float::with_val(prec, &lo);
        let hi_f = Float::with_val(prec, &hi);
        for _ in 0..(2 * bits.max(64)) {
            let d = eval_float_deriv(&self.min_poly, &x);
            if d.is_zero() {
                return false;
            }
            let step = eval_float(&self.min_poly, &x) / d;
            x -= &step;
            if x < lo_f || x > hi_f || !x.is_finite() {
                return false;
            }
            if step.is_zero() || step.clone().abs().get_exp().is_none_or(|e| e < -(bits as i32) - 8) {
                break;
            }
        }
        let Some(center) = x.to_rational() else {
            return false;
        };
        let eps = Rational::from((Integer::from(1), Integer::from(1) << (bits + 2)));
        let mut a = Rational::from(&center - &eps);
        let mut b = Rational::from(&center + &eps);
        if a < lo {
            a = lo.clone();
        }
        if b > hi {
            b = hi.clone();
        }
        let (sa, sb) = (sign_at(&self.min_poly, &a), sign_at(&self.min_poly, &b));
        if sa != Ordering::Equal && sb != Ordering::Equal && sa != sb {
            self.store(a, b);
            true
        } else {
            false
        }
    }

    /// The root as a float with `prec` bits of mantissa.
    pub fn to_float(&self, prec: u32) -> Float {
        let (lo, hi) = self.refine(prec + 8);
        Float::with_val(prec, Rational::from(&lo + &hi) / 2u32)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64()
    }

    /// `self + δ` for a rational `δ`: the minimal polynomial is the Taylor
    /// shift `P(X - δ)`.
    pub fn shifted(&self, delta: &Rational) -> Result<AlgebraicNumber> {
        let shifted = self.min_poly.to_rat().taylor_shift(&Rational::from(-delta)).to_primitive_int();
        let (lo, hi) = self.interval();
        AlgebraicNumber::new(shifted, Some((lo + delta, hi + delta)))
    }

    pub fn sturm(&self) -> &[RatPoly] {
        &self.sturm
    }
}

fn largest_root_interval(p: &IntPoly, sturm: &[RatPoly]) -> Result<(Rational, Rational)> {
    let mut hi = cauchy_bound(p);
    let mut lo = Rational::from(1);
    if count_roots(sturm, &lo, &hi) == 0 {
        return Err(Error::NotGreaterThanOne(format!("{p} has no real root greater than 1")));
    }
    while count_roots(sturm, &lo, &hi) > 1 {
        let mid = Rational::from(&lo + &hi) / 2u32;
        if count_roots(sturm, &mid, &hi) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Endpoints are never roots: an irreducible polynomial of degree ≥ 2
    // has no rational root.
    Ok((lo, hi))
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.min_poly != other.min_poly {
            return false;
        }
        let (a, b) = (self.interval(), other.interval());
        // Same polynomial; the roots agree iff the isolating intervals overlap.
        !(a.1 < b.0 || b.1 < a.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::poly::ratio;

    fn golden() -> AlgebraicNumber {
        AlgebraicNumber::new(IntPoly::from_i64(&[-1, -1, 1]), Some((ratio(16, 10), ratio(17, 10)))).unwrap()
    }

    #[test]
    fn refinement_reaches_requested_width_and_is_nested() {
        let phi = golden();
        let (l1, h1) = phi.refine(20);
        assert!(Rational::from(&h1 - &l1) <= Rational::from((1, 1 << 20)));
        let (l2, h2) = phi.refine(200);
        assert!(l2 >= l1 && h2 <= h1);
        let v = phi.to_f64();
        assert!((v - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn rational_roots_collapse() {
        let three = AlgebraicNumber::new(IntPoly::from_i64(&[-3, 1]), Some((ratio(5, 2), ratio(7, 2)))).unwrap();
        let (lo, hi) = three.refine(50);
        assert_eq!(lo, Rational::from(3));
        assert_eq!(hi, Rational::from(3));
    }

    #[test]
    fn default_interval_picks_largest_root() {
        let plastic = AlgebraicNumber::new(IntPoly::from_i64(&[-1, -1, 0, 1]), None).unwrap();
        assert!((plastic.to_f64() - 1.324_717_957_244_746).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            AlgebraicNumber::new(IntPoly::from_i64(&[-1, 0, 1]), None),
            Err(Error::Reducible(_))
        ));
        assert!(matches!(
            AlgebraicNumber::new(IntPoly::from_i64(&[1, -3, 1]), Some((ratio(0, 1), ratio(1, 1)))),
            Err(Error::NotGreaterThanOne(_))
        ));
        assert!(matches!(
            AlgebraicNumber::new(IntPoly::from_i64(&[-1, 2]), None),
            Err(Error::NotGreaterThanOne(_))
        ));
        assert!(matches!(
            AlgebraicNumber::new(IntPoly::from_i64(&[-2, 0, 1]), Some((ratio(-2, 1), ratio(2, 1)))),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn shift_moves_the_root() {
        let phi = golden();
        let moved = phi.shifted(&ratio(1, 100)).unwrap();
        assert!((moved.to_f64() - 1.628_033_988_749_895).abs() < 1e-14);
    }
}
