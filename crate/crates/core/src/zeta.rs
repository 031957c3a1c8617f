//! The dynamical zeta function of a Parry number and the periodic points
//! of the β-transformation.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use crate::arith::poly::power_sums;
use crate::arith::roots::{poly_roots, RootConfig};
use crate::arith::{FieldOps, IntPoly, NfElem, NumberField, Ring};
use crate::error::{Error, Result};
use crate::germ::eval_int_poly;
use crate::parry::ParryPolynomial;
use crate::puiseux::{GermContext, PuiseuxDecomposition, RationalGrouping};
use crate::registry::{Named, Registry};

pub const DEFAULT_N_MAX: usize = 8;

/// `ζ_β(z) = (1 − z^k) / P*_{β,P}(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaRational {
    pub numerator: IntPoly,
    pub denominator: IntPoly,
    pub k: usize,
}

pub fn zeta_rational(pp: &ParryPolynomial) -> ZetaRational {
    let k = pp.k();
    ZetaRational {
        numerator: &IntPoly::from_i64(&[1]) - &IntPoly::monomial(Integer::from(1), k),
        denominator: pp.reciprocal(),
        k,
    }
}

impl ZetaRational {
    pub fn eval_rational(&self, z: &Rational) -> Option<Rational> {
        let d = self.denominator.eval_rat(z);
        if d.cmp0() == std::cmp::Ordering::Equal {
            return None;
        }
        Some(self.numerator.eval_rat(z) / d)
    }

    pub fn eval(&self, z: &Complex) -> Complex {
        eval_int_poly(&self.numerator, z) / eval_int_poly(&self.denominator, z)
    }

    /// `P*_β` divides the denominator exactly once and not the numerator.
    pub fn simple_pole_at_inverse_beta(&self, field: &NumberField) -> bool {
        let p_star = crate::germ::reciprocal_min_poly(field);
        self.denominator.multiplicity_of(&p_star) == 1 && self.numerator.exact_div(&p_star).is_err()
    }

    /// Power series coefficients of `ζ_β` through `z^n`.
    pub fn series(&self, n: usize) -> Vec<Rational> {
        let num = |i: usize| Rational::from(self.numerator.coeff(i));
        let den = |i: usize| Rational::from(self.denominator.coeff(i));
        let d0 = den(0);
        let mut out: Vec<Rational> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut acc = num(i);
            for j in 1..=i {
                acc -= den(j) * &out[i - j];
            }
            out.push(acc / &d0);
        }
        out
    }

    /// Coefficients `N_1 … N_n` of `z ζ'(z) / ζ(z)`.
    pub fn log_derivative(&self, n: usize) -> Vec<Rational> {
        let s = self.series(n);
        // z ζ' = ζ · L  with  L = Σ N_j z^j.
        let mut l: Vec<Rational> = vec![Rational::new(); n + 1];
        for i in 1..=n {
            let mut acc = Rational::from(i) * &s[i];
            for j in 1..i {
                acc -= Rational::from(&s[i - j] * &l[j]);
            }
            l[i] = acc / &s[0];
        }
        l.remove(0);
        l
    }
}

/// Exact fixed points of `T_β^n` in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct FixedPointCount {
    pub n: usize,
    pub count: Integer,
    pub witnesses: Vec<NfElem>,
}

pub struct ZetaInput<'a> {
    pub field: &'a Arc<NumberField>,
    pub parry: &'a ParryPolynomial,
    pub bits: u32,
    pub roots: &'a RootConfig,
    pub bound: usize,
}

pub trait FixedPointCounter: Named + Send + Sync {
    fn count(&self, input: &ZetaInput, n: usize) -> Result<Integer>;
}

/// Enumerate digit strings, solve for the candidate point exactly and keep
/// it when `n` exact steps of `T_β` reproduce the digits and return.
pub fn count_fixed_points_bruteforce(field: &Arc<NumberField>, n: usize, bound: usize) -> Result<FixedPointCount> {
    if n == 0 || n > bound {
        return Err(Error::TooLarge { n, bound });
    }
    let beta = NfElem::generator(field);
    let alphabet = beta.floor().to_u64().ok_or_else(|| Error::InvalidInput("base too large".into()))? + 1;
    let total = alphabet
        .checked_pow(n as u32)
        .filter(|t| *t <= 1 << 24)
        .ok_or(Error::TooLarge { n, bound })?;
    let powers: Vec<NfElem> = (0..n).map(|i| beta.pow(i as u32)).collect();
    let one = NfElem::from_int(field, 1);
    let zero = NfElem::from_int(field, 0);
    let inv = beta.pow(n as u32).sub(&one).inv().ok_or(Error::NotAUnit)?;
    let witnesses: Vec<NfElem> = (0..total)
        .into_par_iter()
        .filter_map(|code| {
            let mut digits = vec![0u64; n];
            let mut c = code;
            for d in digits.iter_mut().rev() {
                *d = c % alphabet;
                c /= alphabet;
            }
            // x* = Σ k_i β^{n−i} / (β^n − 1)
            let mut num = zero.clone();
            for (i, &d) in digits.iter().enumerate() {
                if d != 0 {
                    num = num.add(&powers[n - 1 - i].mul(&NfElem::from_int(field, d)));
                }
            }
            let x = num.mul(&inv);
            if x.sign() == std::cmp::Ordering::Less || x.cmp_real(&one) != std::cmp::Ordering::Less {
                return None;
            }
            let mut y = x.clone();
            for &d in &digits {
                let by = beta.mul(&y);
                let t = by.floor();
                if t != d {
                    return None;
                }
                y = by.sub(&NfElem::from_int(field, t));
            }
            (y == x).then_some(x)
        })
        .collect();
    Ok(FixedPointCount {
        n,
        count: Integer::from(witnesses.len()),
        witnesses,
    })
}

pub struct BruteForce;

impl Named for BruteForce {
    fn name(&self) -> &'static str {
        "brute-force"
    }
}

impl FixedPointCounter for BruteForce {
    fn count(&self, input: &ZetaInput, n: usize) -> Result<Integer> {
        Ok(count_fixed_points_bruteforce(input.field, n, input.bound)?.count)
    }
}

/// `Σ (roots of P_{β,P})^n − k·[k | n]`, exactly by Newton's identities and
/// numerically from the roots; the two must round to the same integer.
pub struct ClosedForm;

impl Named for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }
}

impl FixedPointCounter for ClosedForm {
    fn count(&self, input: &ZetaInput, n: usize) -> Result<Integer> {
        let exact = count_fixed_points_closed(input.parry, n)?;
        let (value, err) = numeric_power_sum(input.parry, n, input.bits, input.roots)?;
        let k = input.parry.k();
        let numeric = value - if n.is_multiple_of(k) { k as f64 } else { 0.0 };
        let rounded = numeric.round();
        let gap = 0.5 - ((numeric - rounded).abs() + err);
        if gap < 2f64.powi(-16) {
            return Err(Error::PrecisionExhausted {
                bits: input.bits,
                what: format!("fixed-point count for n = {n} too close to a half-integer"),
            });
        }
        if Integer::from_f64(rounded) != Some(exact.clone()) {
            return Err(Error::RouteMismatch(format!("closed-form count {exact} vs numeric {numeric}")));
        }
        Ok(exact)
    }
}

/// Newton-identity count.
pub fn count_fixed_points_closed(pp: &ParryPolynomial, n: usize) -> Result<Integer> {
    let p = power_sums(&pp.poly, n)?;
    let k = pp.k();
    let mut c = p[n - 1].clone();
    if n.is_multiple_of(k) {
        c -= k as u64;
    }
    Ok(c)
}

/// `Σ r^n` over the numerically found roots, with an error bound from
/// their inclusion radii.
pub fn numeric_power_sum(pp: &ParryPolynomial, n: usize, bits: u32, cfg: &RootConfig) -> Result<(f64, f64)> {
    let roots = poly_roots(&pp.poly, bits, cfg)?;
    let mut acc = Complex::new(bits);
    let mut err = 0.0;
    for r in &roots {
        let t = Complex::with_val(bits, rug::ops::Pow::pow(&r.value, n as u32));
        for _ in 0..r.multiplicity {
            acc += &t;
        }
        err += r.multiplicity as f64 * n as f64 * (r.abs() + r.radius).powi(n as i32 - 1) * r.radius;
    }
    Ok((acc.real().to_f64(), err + Float::with_val(64, acc.imag().abs_ref()).to_f64()))
}

/// Coefficients of `z ζ'/ζ` from the rational form; they must be integers.
pub struct LogDerivative;

impl Named for LogDerivative {
    fn name(&self) -> &'static str {
        "log-derivative"
    }
}

impl FixedPointCounter for LogDerivative {
    fn count(&self, input: &ZetaInput, n: usize) -> Result<Integer> {
        let l = zeta_rational(input.parry).log_derivative(n);
        let c = &l[n - 1];
        if !c.is_integer() {
            return Err(Error::RouteMismatch(format!("log-derivative coefficient {c} is not an integer")));
        }
        Ok(c.numer().clone())
    }
}

pub fn fixed_point_counters() -> Registry<dyn FixedPointCounter> {
    let mut r: Registry<dyn FixedPointCounter> = Registry::new("fixed-point counter");
    r.register(Box::new(BruteForce))
        .register(Box::new(ClosedForm))
        .register(Box::new(LogDerivative));
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointRow {
    pub n: usize,
    /// Counts by counter name, in registration order.
    pub counts: Vec<(String, String)>,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointTable {
    pub rows: Vec<FixedPointRow>,
    pub pass: bool,
}

/// Run every counter for `n = 1 … n_max` and compare.
pub fn fixed_point_table(input: &ZetaInput, n_max: usize) -> Result<FixedPointTable> {
    let counters = fixed_point_counters();
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let mut counts = Vec::new();
        let mut values = Vec::new();
        for c in counters.iter() {
            match c.count(input, n) {
                Ok(v) => {
                    counts.push((c.name().to_string(), v.to_string()));
                    values.push(v);
                }
                // Brute force stops at its enumeration bound; the others go on.
                Err(Error::TooLarge { .. }) => counts.push((c.name().to_string(), "beyond bound".into())),
                Err(e) => return Err(e),
            }
        }
        let agree = values.len() >= 2 && values.windows(2).all(|w| w[0] == w[1]);
        rows.push(FixedPointRow { n, counts, agree });
    }
    let pass = rows.iter().all(|r| r.agree);
    Ok(FixedPointTable { rows, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaProductReport {
    pub samples: usize,
    pub radius: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub zeta_at_zero: String,
    pub product_at_zero: String,
    pub pass: bool,
}

/// `ζ_β(z) = (1 − z^k) / (Q(0) · P*_β(z) · Π_j Π_{y ∈ C_j}(z − 1/β − y(P*_β(z))))`
/// over the rational classes, against the exact rational form.
pub fn zeta_product_check(
    zr: &ZetaRational,
    dec: &PuiseuxDecomposition,
    grouping: &RationalGrouping,
    ctx: &GermContext,
    samples: usize,
    radius: f64,
    seed: u64,
) -> ZetaProductReport {
    let prec = ctx.prec;
    let tolerance = 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = zr.k as u32;
    let q0 = Complex::with_val(prec, &ctx.q0);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let z = ctx.sample_near(&mut rng, radius);
        let mut denom = Complex::with_val(prec, &q0 * ctx.u(&z));
        for rc in &grouping.classes {
            let conj: Vec<_> = rc
                .members
                .iter()
                .flat_map(|&m| dec.classes[m].conjugates.iter().cloned())
                .collect();
            denom *= ctx.class_value(&conj, &z);
        }
        let num = Complex::with_val(prec, 1) - Complex::with_val(prec, rug::ops::Pow::pow(&z, k));
        let rhs = num / denom;
        let lhs = zr.eval(&z);
        let r = Float::with_val(64, Complex::with_val(prec, &lhs - &rhs).abs_ref()).to_f64()
            / Float::with_val(64, lhs.abs_ref()).to_f64().max(1.0);
        max_residual = max_residual.max(r);
    }
    let zero = Rational::new();
    let zeta0 = zr.eval_rational(&zero);
    let mut prod0 = Rational::from(&ctx.q0) * ctx.p_star.eval_rat(&zero);
    for rc in &grouping.classes {
        prod0 *= rc.product.eval(&zero);
    }
    let product_at_zero = if prod0.cmp0() == std::cmp::Ordering::Equal {
        None
    } else {
        Some(prod0.recip())
    };
    let one = Rational::from(1);
    ZetaProductReport {
        samples,
        radius,
        max_residual,
        tolerance,
        zeta_at_zero: zeta0.as_ref().map_or("pole".into(), |r| r.to_string()),
        product_at_zero: product_at_zero.as_ref().map_or("pole".into(), |r| r.to_string()),
        pass: max_residual <= tolerance && zeta0.as_ref() == Some(&one) && product_at_zero.as_ref() == Some(&one),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::AlgebraicNumber;
    use crate::dynamics::greedy_expansion;
    use crate::parry::build_parry_polynomial;

    fn setup(c: &[i64]) -> (Arc<NumberField>, ParryPolynomial) {
        let field = NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(c), None).unwrap());
        let exp = greedy_expansion(&field, 1000).unwrap();
        let pp = build_parry_polynomial(&exp).unwrap();
        (field, pp)
    }

    #[test]
    fn rational_forms() {
        let (f, pp) = setup(&[-1, -1, 1]);
        let z = zeta_rational(&pp);
        assert_eq!(z.numerator, IntPoly::from_i64(&[1, 0, -1]));
        assert_eq!(z.denominator, IntPoly::from_i64(&[1, -1, -1]));
        assert!(z.simple_pole_at_inverse_beta(&f));
        assert_eq!(z.eval_rational(&Rational::new()), Some(Rational::from(1)));
        let (_, pp) = setup(&[-2, 1]);
        let z = zeta_rational(&pp);
        assert_eq!((z.numerator, z.denominator), (IntPoly::from_i64(&[1, -1]), IntPoly::from_i64(&[1, -2])));
        let (_, pp) = setup(&[-1, -1, 0, 1]);
        let z = zeta_rational(&pp);
        assert_eq!(z.numerator, IntPoly::from_i64(&[1, 0, 0, 0, 0, -1]));
        assert_eq!(z.denominator, IntPoly::from_i64(&[1, -1, 0, 0, 0, -1]));
    }

    #[test]
    fn spot_counts() {
        let (f, _) = setup(&[-1, -1, 1]);
        assert_eq!(count_fixed_points_bruteforce(&f, 1, 8).unwrap().count, 1);
        assert_eq!(count_fixed_points_bruteforce(&f, 3, 8).unwrap().count, 4);
        let (f, pp) = setup(&[-2, 1]);
        let c = count_fixed_points_bruteforce(&f, 2, 8).unwrap();
        assert_eq!(c.count, 3);
        let thirds: Vec<_> = c.witnesses.iter().map(|w| w.as_rational().unwrap()).collect();
        assert_eq!(thirds, vec![Rational::new(), Rational::from((1, 3)), Rational::from((2, 3))]);
        for n in 1..=8 {
            assert_eq!(count_fixed_points_closed(&pp, n).unwrap(), (1u64 << n) - 1);
        }
        assert!(matches!(count_fixed_points_bruteforce(&f, 9, 8), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn witnesses_are_periodic() {
        let (f, _) = setup(&[-1, -1, 0, 1]);
        let beta = NfElem::generator(&f);
        let c = count_fixed_points_bruteforce(&f, 5, 8).unwrap();
        for w in &c.witnesses {
            let mut x = w.clone();
            for _ in 0..5 {
                let y = beta.mul(&x);
                x = y.sub(&NfElem::from_int(&f, y.floor()));
            }
            assert_eq!(&x, w);
        }
    }

    #[test]
    fn power_sums_two_ways() {
        let (_, pp) = setup(&[-1, -1, 0, 1]);
        let exact = power_sums(&pp.poly, 8).unwrap();
        for n in 1..=8 {
            let (v, err) = numeric_power_sum(&pp, n, 256, &RootConfig::default()).unwrap();
            assert!((v - exact[n - 1].to_f64()).abs() <= err + 1e-12);
            assert!(err < 2f64.powi(-(256 - 16)));
        }
    }
}
