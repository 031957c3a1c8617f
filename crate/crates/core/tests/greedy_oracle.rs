//! The greedy expansion of 1 against an interval oracle: β is bracketed to
//! 100 bits by bisection and the orbit of 1 is pushed through exact rational
//! interval arithmetic, with no use of the library's number-field code.

use betagerm::arith::{AlgebraicNumber, IntPoly, NumberField};
use betagerm::dynamics::{greedy_expansion, Classification};
use rug::{Integer, Rational};

fn eval(c: &[i64], x: &Rational) -> Rational {
    c.iter().fold(Rational::new(), |acc, &a| acc * x + Rational::from(a))
}

/// `c` is high-to-low; the root is the unique one in `[lo, hi]`.
fn bracket(c: &[i64], lo: Rational, hi: Rational, bits: u32) -> (Rational, Rational) {
    let (mut lo, mut hi) = (lo, hi);
    let target = Rational::from((1, Integer::from(1) << bits));
    let s_lo = eval(c, &lo).cmp0();
    while Rational::from(&hi - &lo) > target {
        let mid = Rational::from(&lo + &hi) / 2u32;
        if eval(c, &mid).cmp0() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

#[derive(Debug, PartialEq)]
enum Oracle {
    Simple(Vec<u32>),
    Periodic { pre: Vec<u32>, period: Vec<u32> },
    /// Digits produced before the interval became too wide to continue.
    Prefix(Vec<u32>),
}

/// Greedy digits of 1 with `x` carried as an interval. An interval that
/// collapses onto an integer is read as an exact hit; one that meets an
/// earlier interval is read as a return of the orbit.
fn oracle(c: &[i64], lo: Rational, hi: Rational) -> Oracle {
    let (bl, bh) = bracket(c, lo, hi, 100);
    let eps = Rational::from((1, Integer::from(1) << 70));
    let (mut xl, mut xh) = (Rational::from(1), Rational::from(1));
    let mut seen: Vec<(Rational, Rational)> = Vec::new();
    let mut digits = Vec::new();
    for _ in 0..200 {
        let (yl, yh) = (Rational::from(&bl * &xl), Rational::from(&bh * &xh));
        let (fl, fh) = (yl.floor_ref().into(), yh.floor_ref().into());
        let (fl, fh): (Integer, Integer) = (fl, fh);
        if fl != fh {
            let n = fh.clone();
            if Rational::from(&yh - &yl) < eps && Rational::from(&yh - &n) < eps {
                digits.push(n.to_u32().unwrap());
                return Oracle::Simple(digits);
            }
            return Oracle::Prefix(digits);
        }
        digits.push(fl.to_u32().unwrap());
        seen.push((xl.clone(), xh.clone()));
        xl = yl - Rational::from(&fl);
        xh = yh - Rational::from(&fl);
        if Rational::from(&xh - &xl) > Rational::from((1, 1 << 20)) {
            return Oracle::Prefix(digits);
        }
        // Index 0 is x = 1 itself, which the orbit cannot revisit.
        for (i, (sl, sh)) in seen.iter().enumerate().skip(1) {
            if Rational::from(&xl - sh).abs() < eps && Rational::from(&xh - sl).abs() < eps {
                let pre = digits[..i].to_vec();
                let period = digits[i..].to_vec();
                return Oracle::Periodic { pre, period };
            }
        }
    }
    Oracle::Prefix(digits)
}

fn library(c_high: &[i64], max_iter: usize) -> (Vec<u32>, Classification) {
    let mut c = c_high.to_vec();
    c.reverse();
    let field = NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(&c), None).unwrap());
    let exp = greedy_expansion(&field, max_iter).unwrap();
    let digits = exp.digits.iter().map(|d| d.to_u32().unwrap()).collect();
    (digits, exp.classification)
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

#[test]
fn golden_ratio() {
    let o = oracle(&[1, -1, -1], r(3, 2), r(2, 1));
    assert_eq!(o, Oracle::Simple(vec![1, 1]));
    let (d, c) = library(&[1, -1, -1], 10_000);
    assert_eq!(c, Classification::Simple { m: 2 });
    assert_eq!(Oracle::Simple(d), o);
}

#[test]
fn plastic_number() {
    let o = oracle(&[1, 0, -1, -1], r(13, 10), r(14, 10));
    assert_eq!(o, Oracle::Simple(vec![1, 0, 0, 0, 1]));
    let (d, c) = library(&[1, 0, -1, -1], 10_000);
    assert_eq!(c, Classification::Simple { m: 5 });
    assert_eq!(Oracle::Simple(d), o);
}

#[test]
fn one_plus_sqrt_two() {
    let o = oracle(&[1, -2, -1], r(2, 1), r(3, 1));
    assert_eq!(o, Oracle::Simple(vec![2, 1]));
    let (d, c) = library(&[1, -2, -1], 10_000);
    assert_eq!(c, Classification::Simple { m: 2 });
    assert_eq!(Oracle::Simple(d), o);
}

#[test]
fn square_of_golden_ratio_is_eventually_periodic() {
    let o = oracle(&[1, -3, 1], r(2, 1), r(3, 1));
    assert_eq!(
        o,
        Oracle::Periodic {
            pre: vec![2],
            period: vec![1]
        }
    );
    let (d, c) = library(&[1, -3, 1], 10_000);
    assert_eq!(c, Classification::EventuallyPeriodic { m: 1, period: 1 });
    assert_eq!(d, vec![2, 1]);
}

#[test]
fn integer_bases() {
    for b in [2i64, 3] {
        let o = oracle(&[1, -b], r(b - 1, 1) + r(1, 2), r(b, 1) + r(1, 2));
        assert_eq!(o, Oracle::Simple(vec![b as u32]));
        let (d, c) = library(&[1, -b], 10_000);
        assert_eq!(c, Classification::Simple { m: 1 });
        assert_eq!(d, vec![b as u32]);
    }
}

#[test]
fn unresolved_bases_agree_on_a_prefix() {
    for (c, lo, hi) in [(vec![1i64, 0, -2], r(14, 10), r(15, 10)), (vec![2, -3], r(1, 1), r(2, 1))] {
        let Oracle::Prefix(prefix) = oracle(&c, lo, hi) else {
            panic!("oracle resolved {c:?}");
        };
        assert!(prefix.len() >= 20, "{c:?}: {prefix:?}");
        let (d, cls) = library(&c, 10_000);
        assert_eq!(cls, Classification::UnresolvedWithin { bound: 10_000 });
        assert_eq!(&d[..prefix.len()], &prefix[..], "{c:?}");
    }
}
