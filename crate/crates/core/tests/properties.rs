use std::sync::Arc;

use betagerm::arith::factor::factor;
use betagerm::arith::roots::{poly_roots, RootConfig};
use betagerm::arith::{AlgebraicNumber, FieldOps, IntPoly, NfElem, NumberField, Ring, TruncatedSeries};
use betagerm::germ::GermPolynomial;
use betagerm::puiseux::{newton_puiseux, PuiseuxConfig};
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

fn plastic_field() -> Arc<NumberField> {
    NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(&[-1, -1, 0, 1]), None).unwrap())
}

fn elem(field: &Arc<NumberField>, c: &[(i64, i64)]) -> NfElem {
    NfElem::from_coeffs(field, c.iter().map(|&(n, d)| Rational::from((n, d))).collect())
}

fn coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-50i64..50, 1i64..20), 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_multiplication_is_commutative_and_associative(a in coords(), b in coords(), c in coords()) {
        let f = plastic_field();
        let (a, b, c) = (elem(&f, &a), elem(&f, &b), elem(&f, &c));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nonzero_elements_invert(a in coords()) {
        let f = plastic_field();
        let a = elem(&f, &a);
        prop_assume!(!a.is_zero());
        let inv = a.inv().unwrap();
        prop_assert_eq!(a.mul(&inv), NfElem::from_int(&f, 1));
    }

    /// The exact floor agrees with a 300-bit evaluation of the element.
    #[test]
    fn floor_brackets_the_element(a in coords()) {
        let f = plastic_field();
        let a = elem(&f, &a);
        let fl = a.floor();
        let x = a.to_float(300);
        prop_assert!(Float::with_val(300, &x - &fl) >= 0);
        prop_assert!(Float::with_val(300, &x - &fl) < 1);
        prop_assert!(NfElem::from_int(&f, fl.clone()).cmp_real(&a).is_le());
        prop_assert!(a.cmp_real(&NfElem::from_int(&f, fl + 1u32)).is_lt());
    }

    #[test]
    fn refined_intervals_are_nested(b1 in 8u32..60, extra in 1u32..60) {
        let beta = AlgebraicNumber::new(IntPoly::from_i64(&[-1, -1, 0, 1]), None).unwrap();
        let (lo1, hi1) = beta.refine(b1);
        let (lo2, hi2) = beta.refine(b1 + extra);
        prop_assert!(lo1 <= lo2 && hi2 <= hi1);
        let p = IntPoly::from_i64(&[-1, -1, 0, 1]);
        prop_assert!(p.eval_rat(&lo2).cmp0() != p.eval_rat(&hi2).cmp0() || p.eval_rat(&lo2).cmp0().is_eq());
    }
}

fn small_poly() -> impl Strategy<Value = Vec<i64>> {
    (1usize..4).prop_flat_map(|d| {
        (prop::collection::vec(-4i64..=4, d), 1i64..=2).prop_map(|(mut c, lead)| {
            c.push(lead);
            c
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Factoring a product of small polynomials and multiplying back gives
    /// the product.
    #[test]
    fn factorization_reexpands(ps in prop::collection::vec(small_poly(), 1..4)) {
        let p = ps.iter().fold(IntPoly::from_i64(&[1]), |acc, c| &acc * &IntPoly::from_i64(c));
        prop_assume!(p.coeff(0) != 0);
        let f = factor(&p).unwrap();
        prop_assert_eq!(f.expand(), p.clone());
        let total: usize = f.factors.iter().map(|(g, e)| g.degree().unwrap() * e).sum();
        prop_assert_eq!(total, p.degree().unwrap());
    }

    /// Vieta: the roots sum to `−c_{d−1}/c_d` and multiply to `(−1)^d c_0/c_d`.
    #[test]
    fn roots_satisfy_vieta(c in small_poly(), seed in 0u64..4) {
        let p = IntPoly::from_i64(&c);
        let d = p.degree().unwrap();
        let cfg = RootConfig { seed, ..RootConfig::default() };
        let roots = poly_roots(&p, 128, &cfg).unwrap();
        let count: usize = roots.iter().map(|r| r.multiplicity).sum();
        prop_assert_eq!(count, d);
        let (mut sr, mut si) = (0.0, 0.0);
        let (mut pr, mut pi) = (1.0, 0.0);
        for r in &roots {
            for _ in 0..r.multiplicity {
                sr += r.re();
                si += r.im();
                let (a, b) = (pr * r.re() - pi * r.im(), pr * r.im() + pi * r.re());
                pr = a;
                pi = b;
            }
        }
        let lead = c[d] as f64;
        prop_assert!((sr + c[d - 1] as f64 / lead).abs() < 1e-8, "sum {} vs {:?}", sr, c);
        prop_assert!(si.abs() < 1e-8);
        let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
        prop_assert!((pr - sign * c[0] as f64 / lead).abs() < 1e-8, "product {} vs {:?}", pr, c);
        prop_assert!(pi.abs() < 1e-8);
    }
}

/// `Π (Z^n − a U^m)` over `ℚ`, as a germ with coefficients truncated at `order`.
fn product_germ(factors: &[(i64, usize, usize)], order: usize) -> GermPolynomial {
    let field = NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(&[-2, 1]), None).unwrap());
    let zero = NfElem::from_int(&field, 0);
    let series = |a: i64, m: usize| {
        let mut c = vec![zero.clone(); m + 1];
        c[m] = NfElem::from_int(&field, a);
        TruncatedSeries::from_coeffs(&zero, c, order)
    };
    let mut poly = vec![series(1, 0)];
    for &(a, n, m) in factors {
        let mut next = vec![TruncatedSeries::zero(&zero, order); poly.len() + n];
        for (i, c) in poly.iter().enumerate() {
            next[i + n] = next[i + n].add(c);
            next[i] = next[i].sub(&c.mul(&series(a, m)));
        }
        poly = next;
    }
    GermPolynomial {
        coeffs: poly,
        order,
        route: "product",
        finite: true,
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn branch_factor() -> impl Strategy<Value = (i64, usize, usize)> {
    (prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3, 5]), 1usize..=3, 1usize..=3)
        .prop_filter("coprime exponents", |&(_, n, m)| gcd(n, m) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The Newton polygon's height equals the sum of the ramification
    /// indices of the classes, and each representative cancels the germ.
    #[test]
    fn height_is_total_ramification(
        factors in prop::collection::vec(branch_factor(), 1..=3)
            .prop_filter("distinct branches", |f| {
                let mut g = f.clone();
                g.sort();
                g.dedup();
                g.len() == f.len()
            }),
        seed in 0u64..3,
    ) {
        let deg: usize = factors.iter().map(|f| f.1).sum();
        let germ = product_germ(&factors, 16);
        let cfg = PuiseuxConfig { seed, ..PuiseuxConfig::default() };
        let dec = newton_puiseux(&germ, &cfg).unwrap();
        prop_assert_eq!(dec.polygon.height, deg);
        prop_assert_eq!(dec.total_nu(), deg);
        let mut nus: Vec<usize> = dec.classes.iter().map(|c| c.nu()).collect();
        let mut expect: Vec<usize> = factors.iter().map(|&(_, n, _)| n).collect();
        nus.sort();
        expect.sort();
        prop_assert_eq!(nus, expect);
        for r in &dec.residuals {
            prop_assert!(r.unwrap() < 1e-30, "{:?}", dec.residuals);
        }
    }
}

#[test]
fn plastic_generator_is_a_root() {
    let f = plastic_field();
    let t = NfElem::generator(&f);
    let lhs = t.pow(3);
    let rhs = t.add(&NfElem::from_int(&f, 1));
    assert_eq!(lhs, rhs);
    assert_eq!(t.floor(), Integer::from(1));
}
