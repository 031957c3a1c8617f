//! Parry polynomials, conjugates and the bounds they satisfy.

use rug::Integer;
use serde::Serialize;

use crate::arith::factor::factor_with;
use crate::arith::roots::{poly_roots, Root, RootConfig};
use crate::arith::{AlgebraicNumber, IntPoly, NfElem, NumberField};
use crate::dynamics::{BetaExpansion, Classification};
use crate::error::{Error, Result};

/// Golden-ratio bound on the modulus of every conjugate.
pub const SOLOMYAK_BOUND: f64 = 1.618_033_988_749_895;

#[derive(Clone, Debug, PartialEq)]
pub struct ParryPolynomial {
    pub poly: IntPoly,
    pub m: usize,
    /// Period length `p + 1`; `None` for simple expansions.
    pub period: Option<usize>,
}

impl ParryPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn height(&self) -> Integer {
        self.poly.height()
    }

    /// `P*(z) = z^{d_P} P(1/z)`.
    pub fn reciprocal(&self) -> IntPoly {
        self.poly.reciprocal_with_degree(self.degree())
    }

    /// Order of the cyclotomic factor in the zeta function.
    pub fn k(&self) -> usize {
        self.period.unwrap_or(self.m)
    }
}

/// `r_n(X) = X^n − t_1 X^{n−1} − … − t_n`.
fn r(exp: &BetaExpansion, n: usize) -> Result<IntPoly> {
    let mut c = vec![Integer::new(); n + 1];
    c[n] = Integer::from(1);
    for (i, t) in exp.digits_through(n)?.into_iter().enumerate() {
        c[n - 1 - i] = -t;
    }
    Ok(IntPoly::new(c))
}

/// Boyd's three-case definition through the polynomials `r_n`.
pub fn parry_polynomial_boyd(exp: &BetaExpansion) -> Result<IntPoly> {
    match exp.classification {
        Classification::Simple { m } => r(exp, m),
        Classification::EventuallyPeriodic { m, period } if m > 0 => Ok(&r(exp, m + period)? - &r(exp, m)?),
        Classification::EventuallyPeriodic { period, .. } => Ok(&r(exp, period)? - &IntPoly::from_i64(&[1])),
        Classification::UnresolvedWithin { bound } => Err(Error::NotParryResolved(bound)),
    }
}

/// The same polynomial written coefficient by coefficient.
pub fn parry_polynomial_expanded(exp: &BetaExpansion) -> Result<IntPoly> {
    let t = |i: usize| exp.digit(i).unwrap_or_default();
    match exp.classification {
        Classification::Simple { m } => {
            let mut c = vec![Integer::new(); m + 1];
            c[m] = Integer::from(1);
            for i in 1..=m {
                c[m - i] -= t(i);
            }
            Ok(IntPoly::new(c))
        }
        Classification::EventuallyPeriodic { m, period } if m > 0 => {
            let n = m + period;
            let mut c = vec![Integer::new(); n + 1];
            c[n] += 1;
            for i in 1..=n {
                c[n - i] -= t(i);
            }
            c[m] -= 1;
            for i in 1..=m {
                c[m - i] += t(i);
            }
            Ok(IntPoly::new(c))
        }
        Classification::EventuallyPeriodic { period, .. } => {
            let n = period;
            let mut c = vec![Integer::new(); n + 1];
            c[n] += 1;
            for i in 1..n {
                c[n - i] -= t(i);
            }
            c[0] -= Integer::from(1) + t(n);
            Ok(IntPoly::new(c))
        }
        Classification::UnresolvedWithin { bound } => Err(Error::NotParryResolved(bound)),
    }
}

/// Builds the Parry polynomial by both routes and insists they agree.
pub fn build_parry_polynomial(exp: &BetaExpansion) -> Result<ParryPolynomial> {
    let a = parry_polynomial_boyd(exp)?;
    let b = parry_polynomial_expanded(exp)?;
    if a != b {
        return Err(Error::RouteMismatch(format!("Parry polynomial: {a} vs {b}")));
    }
    let (m, period) = match exp.classification {
        Classification::Simple { m } => (m, None),
        Classification::EventuallyPeriodic { m, period } => (m, Some(period)),
        Classification::UnresolvedWithin { bound } => return Err(Error::NotParryResolved(bound)),
    };
    Ok(ParryPolynomial { poly: a, m, period })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightReport {
    pub height: String,
    pub floor_beta: String,
    pub ceil_beta: String,
    pub simple: bool,
    pub pass: bool,
}

/// Height in `{⌊β⌋, ⌈β⌉}`, and equal to `⌊β⌋` for simple β.
pub fn height_check(pp: &ParryPolynomial, field: &std::sync::Arc<NumberField>) -> HeightReport {
    let beta = NfElem::generator(field);
    let fl = beta.floor();
    let ce = if beta.as_rational().is_some_and(|r| r.is_integer()) {
        fl.clone()
    } else {
        Integer::from(&fl + 1)
    };
    let h = pp.height();
    let simple = pp.period.is_none();
    let pass = if simple { h == fl } else { h == fl || h == ce };
    HeightReport {
        height: h.to_string(),
        floor_beta: fl.to_string(),
        ceil_beta: ce.to_string(),
        simple,
        pass,
    }
}

#[derive(Clone, Debug)]
pub struct ConjugateSet {
    /// Roots of `P_β`.
    pub galois: Vec<Root>,
    /// Index of β itself in `galois`.
    pub beta_index: usize,
    /// Roots of `P_{β,P} / P_β`.
    pub beta_conjugates: Vec<Root>,
    pub quotient: IntPoly,
}

impl ConjugateSet {
    /// Every root of the Parry polynomial other than β.
    pub fn others(&self) -> impl Iterator<Item = &Root> {
        self.galois
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.beta_index)
            .map(|(_, r)| r)
            .chain(self.beta_conjugates.iter())
    }
}

pub fn conjugate_set(
    pp: &ParryPolynomial,
    beta: &AlgebraicNumber,
    bits: u32,
    cfg: &RootConfig,
) -> Result<ConjugateSet> {
    let p_beta = beta.min_poly();
    let quotient = pp.poly.exact_div(p_beta)?;
    let galois = poly_roots(p_beta, bits, cfg)?;
    let b = beta.to_f64();
    let beta_index = galois
        .iter()
        .enumerate()
        .min_by(|x, y| {
            let dx = (x.1.re() - b).abs() + x.1.im().abs();
            let dy = (y.1.re() - b).abs() + y.1.im().abs();
            dx.partial_cmp(&dy).unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    let beta_conjugates = if quotient.degree().is_some_and(|d| d >= 1) {
        poly_roots(&quotient, bits, cfg)?
    } else {
        Vec::new()
    };
    Ok(ConjugateSet {
        galois,
        beta_index,
        beta_conjugates,
        quotient,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SolomyakReport {
    pub max_modulus: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub pass: bool,
}

/// Every conjugate other than β lies in the disc of radius `(1+√5)/2`,
/// up to its certification radius plus `tolerance`.
pub fn solomyak_check(roots: impl IntoIterator<Item = (f64, f64)>, tolerance: f64) -> SolomyakReport {
    let mut max_modulus: f64 = 0.0;
    let mut violations = 0;
    for (modulus, radius) in roots {
        max_modulus = max_modulus.max(modulus);
        if modulus - radius > SOLOMYAK_BOUND + tolerance {
            violations += 1;
        }
    }
    SolomyakReport {
        max_modulus,
        bound: SOLOMYAK_BOUND,
        tolerance,
        violations,
        pass: violations == 0,
    }
}

#[derive(Clone, Debug)]
pub struct ParryFactorization {
    pub p_beta: IntPoly,
    /// `π_1, …, π_σ` (repeated factors listed once per multiplicity).
    pub others: Vec<IntPoly>,
    pub p_beta_multiplicity: usize,
}

impl ParryFactorization {
    pub fn sigma(&self) -> usize {
        self.others.len()
    }

    /// `[P_β, π_1, …, π_σ]`.
    pub fn ordered(&self) -> Vec<IntPoly> {
        std::iter::once(self.p_beta.clone()).chain(self.others.iter().cloned()).collect()
    }
}

pub fn factor_parry(pp: &ParryPolynomial, p_beta: &IntPoly, cfg: &RootConfig) -> Result<ParryFactorization> {
    let f = factor_with(&pp.poly, cfg)?;
    let mut others = Vec::new();
    let mut mult = 0;
    for (g, e) in f.factors {
        if &g == p_beta {
            mult = e;
        } else {
            for _ in 0..e {
                others.push(g.clone());
            }
        }
    }
    if mult == 0 {
        return Err(Error::DivisionFailed(format!("{p_beta} does not divide {}", pp.poly)));
    }
    Ok(ParryFactorization {
        p_beta: p_beta.clone(),
        others,
        p_beta_multiplicity: mult,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::greedy_expansion;

    fn expansion(c: &[i64]) -> (BetaExpansion, std::sync::Arc<NumberField>) {
        let field = NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(c), None).unwrap());
        (greedy_expansion(&field, 1000).unwrap(), field)
    }

    #[test]
    fn both_routes_on_small_cases() {
        let (e, _) = expansion(&[-1, -1, 0, 1]);
        assert_eq!(build_parry_polynomial(&e).unwrap().poly, IntPoly::from_i64(&[-1, 0, 0, 0, -1, 1]));
        let (e, _) = expansion(&[1, -3, 1]);
        assert_eq!(build_parry_polynomial(&e).unwrap().poly, IntPoly::from_i64(&[1, -3, 1]));
        let synth = BetaExpansion::synthetic(vec![2, 1], Classification::EventuallyPeriodic { m: 0, period: 2 });
        assert_eq!(parry_polynomial_boyd(&synth).unwrap(), IntPoly::from_i64(&[-2, -2, 1]));
        assert_eq!(parry_polynomial_expanded(&synth).unwrap(), IntPoly::from_i64(&[-2, -2, 1]));
    }

    #[test]
    fn heights() {
        let (e, f) = expansion(&[-1, -1, 0, 1]);
        let r = height_check(&build_parry_polynomial(&e).unwrap(), &f);
        assert!(r.pass && r.height == "1");
        let (e, f) = expansion(&[1, -3, 1]);
        let r = height_check(&build_parry_polynomial(&e).unwrap(), &f);
        assert!(r.pass && r.height == "3");
        let (e, f) = expansion(&[-3, 1]);
        assert!(height_check(&build_parry_polynomial(&e).unwrap(), &f).pass);
    }

    #[test]
    fn conjugates_and_bound() {
        let (e, f) = expansion(&[-1, -1, 0, 1]);
        let pp = build_parry_polynomial(&e).unwrap();
        let cs = conjugate_set(&pp, f.beta(), 128, &RootConfig::default()).unwrap();
        assert_eq!(cs.quotient, IntPoly::from_i64(&[1, -1, 1]));
        assert_eq!(cs.beta_conjugates.len(), 2);
        for r in &cs.beta_conjugates {
            assert!((r.re() - 0.5).abs() < 1e-12 && (r.im().abs() - 0.75f64.sqrt()).abs() < 1e-12);
        }
        assert!(solomyak_check(cs.others().map(|r| (r.abs(), r.radius)), 1e-9).pass);
        assert!(!solomyak_check([(1.7, 0.0)], 1e-9).pass);
    }
}
