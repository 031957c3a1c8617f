//! The β-transformation `T(x) = {βx}` iterated exactly on `x = 1`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rug::Integer;
use serde::Serialize;

use crate::arith::{IntPoly, NfElem, NumberField, Ring};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// `T^m(1) = 0`, last digit `t_m ≥ 1`.
    Simple { m: usize },
    /// `T^{m+period}(1) = T^m(1)` with `(m, period)` minimal.
    EventuallyPeriodic { m: usize, period: usize },
    /// Neither detected within `bound` steps.
    UnresolvedWithin { bound: usize },
}

impl Classification {
    pub fn is_parry(&self) -> bool {
        !matches!(self, Classification::UnresolvedWithin { .. })
    }

    pub fn is_simple(&self) -> bool {
        matches!(self, Classification::Simple { .. })
    }

    /// The cyclotomic order `k` of the zeta function: `m` when simple,
    /// the period length otherwise.
    pub fn k(&self) -> Option<usize> {
        match *self {
            Classification::Simple { m } => Some(m),
            Classification::EventuallyPeriodic { period, .. } => Some(period),
            Classification::UnresolvedWithin { .. } => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Simple { m } => write!(f, "Simple({m})"),
            Classification::EventuallyPeriodic { m, period } => write!(f, "EventuallyPeriodic({m}, {period})"),
            Classification::UnresolvedWithin { bound } => write!(f, "UnresolvedWithin({bound})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BetaExpansion {
    /// `t_1, t_2, …`: the preperiod and one period for Parry numbers, the
    /// computed prefix otherwise.
    pub digits: Vec<Integer>,
    pub classification: Classification,
    /// `T^0(1), T^1(1), …` when produced by the greedy algorithm.
    pub orbit: Vec<NfElem>,
}

/// Greedy digits of 1 in base β, computed exactly in ℚ(β).
pub fn greedy_expansion(field: &Arc<NumberField>, max_iter: usize) -> Result<BetaExpansion> {
    let beta = NfElem::generator(field);
    if beta.cmp_real(&NfElem::from_int(field, 1)) != std::cmp::Ordering::Greater {
        return Err(Error::NotGreaterThanOne(format!("{:?}", field.beta())));
    }
    let mut x = NfElem::from_int(field, 1);
    let mut seen: HashMap<NfElem, usize> = HashMap::new();
    let mut orbit = vec![x.clone()];
    let mut digits = Vec::new();
    seen.insert(x.clone(), 0);
    for n in 1..=max_iter {
        let y = beta.mul(&x);
        // When βx is an integer k the exact floor returns k and the next
        // state is exactly zero: the expansion terminates.
        let t = y.floor();
        x = y.sub(&NfElem::from_int(field, t.clone()));
        digits.push(t);
        orbit.push(x.clone());
        if x.is_zero() {
            return Ok(BetaExpansion {
                digits,
                classification: Classification::Simple { m: n },
                orbit,
            });
        }
        if let Some(&i) = seen.get(&x) {
            return Ok(BetaExpansion {
                digits,
                classification: Classification::EventuallyPeriodic { m: i, period: n - i },
                orbit,
            });
        }
        seen.insert(x.clone(), n);
    }
    Ok(BetaExpansion {
        digits,
        classification: Classification::UnresolvedWithin { bound: max_iter },
        orbit,
    })
}

impl BetaExpansion {
    /// An expansion given by its digits, without an orbit. Used for
    /// formula checks on digit patterns that no greedy run produces.
    pub fn synthetic(digits: Vec<i64>, classification: Classification) -> BetaExpansion {
        BetaExpansion {
            digits: digits.into_iter().map(Integer::from).collect(),
            classification,
            orbit: Vec::new(),
        }
    }

    /// Digit `t_j` (1-based), regenerated from the cycle when needed.
    pub fn digit(&self, j: usize) -> Option<Integer> {
        if j == 0 {
            return None;
        }
        match self.classification {
            Classification::Simple { m } => Some(if j <= m { self.digits[j - 1].clone() } else { Integer::new() }),
            Classification::EventuallyPeriodic { m, period } => {
                let idx = if j <= m + period { j } else { m + 1 + (j - m - 1) % period };
                Some(self.digits[idx - 1].clone())
            }
            Classification::UnresolvedWithin { .. } => self.digits.get(j - 1).cloned(),
        }
    }

    /// `t_1, …, t_n`.
    pub fn digits_through(&self, n: usize) -> Result<Vec<Integer>> {
        (1..=n)
            .map(|j| {
                self.digit(j).ok_or(Error::InsufficientDigits {
                    available: self.digits.len(),
                    needed: n,
                })
            })
            .collect()
    }

    /// `−1 + Σ_{i ≤ n} t_i z^i`.
    pub fn parry_upper_truncation(&self, n: usize) -> Result<ParryUpperTruncation> {
        if n == 0 {
            return Err(Error::InvalidInput("truncation order must be at least 1".into()));
        }
        let mut c = vec![Integer::from(-1)];
        c.extend(self.digits_through(n)?);
        let max_digit = self.digits.iter().max().cloned().unwrap_or_default();
        Ok(ParryUpperTruncation {
            poly: IntPoly::new(c),
            order: n,
            digit_bound: max_digit.max(Integer::from(1)),
            exact: matches!(self.classification, Classification::Simple { m } if n >= m),
        })
    }
}

/// `f_β` cut after `z^N`, with a bound for the omitted tail.
#[derive(Clone, Debug)]
pub struct ParryUpperTruncation {
    pub poly: IntPoly,
    pub order: usize,
    /// Upper bound for every digit (`⌊β⌋`).
    pub digit_bound: Integer,
    /// The tail is identically zero (finite expansion fully included).
    pub exact: bool,
}

impl ParryUpperTruncation {
    /// Bound on `|Σ_{i > N} t_i z^i|` for `|z| = r < 1`.
    pub fn tail_bound(&self, r: f64) -> f64 {
        if self.exact {
            return 0.0;
        }
        if r >= 1.0 {
            return f64::INFINITY;
        }
        self.digit_bound.to_f64() * r.powi(self.order as i32 + 1) / (1.0 - r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::AlgebraicNumber;

    fn field(c: &[i64]) -> Arc<NumberField> {
        NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(c), None).unwrap())
    }

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn small_corpus() {
        let e = greedy_expansion(&field(&[-1, -1, 1]), 100).unwrap();
        assert_eq!(e.digits, ints(&[1, 1]));
        assert_eq!(e.classification, Classification::Simple { m: 2 });

        let e = greedy_expansion(&field(&[-3, 1]), 100).unwrap();
        assert_eq!(e.digits, ints(&[3]));
        assert_eq!(e.classification, Classification::Simple { m: 1 });

        let e = greedy_expansion(&field(&[1, -3, 1]), 100).unwrap();
        assert_eq!(e.digits, ints(&[2, 1]));
        assert_eq!(e.classification, Classification::EventuallyPeriodic { m: 1, period: 1 });
        assert_eq!(e.digits_through(5).unwrap(), ints(&[2, 1, 1, 1, 1]));
    }

    #[test]
    fn truncations() {
        let e = greedy_expansion(&field(&[-1, -1, 0, 1]), 100).unwrap();
        let t = e.parry_upper_truncation(5).unwrap();
        assert_eq!(t.poly, IntPoly::from_i64(&[-1, 1, 0, 0, 0, 1]));
        assert_eq!(t.tail_bound(0.5), 0.0);

        let s = greedy_expansion(&field(&[-2, 0, 1]), 20).unwrap();
        assert!(matches!(s.classification, Classification::UnresolvedWithin { bound: 20 }));
        assert!(matches!(s.parry_upper_truncation(21), Err(Error::InsufficientDigits { .. })));
    }
}
