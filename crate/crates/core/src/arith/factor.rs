//! Factorization of integer polynomials over ℚ for the small degrees met
//! here: certified numeric roots, subset search over candidate root groups,
//! and exact trial division to confirm every factor.

use itertools::Itertools;
use rug::{Complex, Float, Integer};

use crate::arith::poly::{square_free_decomposition, IntPoly};
use crate::arith::roots::{poly_roots, RootConfig};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    /// Signed content: `p = unit * Π f_i^{e_i}`.
    pub unit: Integer,
    pub factors: Vec<(IntPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPoly {
        self.factors
            .iter()
            .fold(IntPoly::constant(self.unit.clone()), |acc, (f, e)| &acc * &f.pow(*e as u32))
    }
}

/// `a^{n-1} f(Y/a)` for `a` the leading coefficient: a monic polynomial
/// whose roots are `a` times those of `f`.
fn monic_transform(f: &IntPoly) -> IntPoly {
    let n = f.degree().expect("nonzero");
    let a = f.leading().expect("nonzero").clone();
    let mut pw = Integer::from(1);
    let mut v = vec![Integer::new(); n + 1];
    for i in (0..=n).rev() {
        if i == n {
            v[i] = Integer::from(1);
        } else {
            v[i] = Integer::from(&f.coeffs()[i] * &pw);
            pw *= &a;
        }
    }
    IntPoly::new(v)
}

/// Back from a factor `h(Y)` of the monic transform to a primitive factor of `f`.
fn undo_monic_transform(h: &IntPoly, a: &Integer) -> IntPoly {
    let mut pw = Integer::from(1);
    let v: Vec<Integer> = h
        .coeffs()
        .iter()
        .map(|c| {
            let t = Integer::from(c * &pw);
            pw *= a;
            t
        })
        .collect();
    IntPoly::new(v).primitive()
}

fn nearest_integer(x: &Float) -> Integer {
    x.to_integer().unwrap_or_default()
}

fn close_to_integer(x: &Float, tol_exp: i32) -> bool {
    let r = Float::with_val(x.prec(), x.round_ref());
    let d = Float::with_val(x.prec(), x - &r);
    d.is_zero() || d.get_exp().is_none_or(|e| e < tol_exp)
}

/// Working precision large enough to round the coefficients of any factor.
fn needed_bits(g: &IntPoly) -> u32 {
    let n = g.degree().unwrap_or(0) as u32;
    let h = g.height().significant_bits();
    2 * (n + h + 8) + 128
}

/// Irreducible factors of a primitive, square-free polynomial.
fn factor_square_free(f: &IntPoly, cfg: &RootConfig) -> Result<Vec<IntPoly>> {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(vec![f.primitive()]);
    }
    let a = f.leading().expect("nonzero").clone();
    let mut g = monic_transform(f);
    let bits = needed_bits(&g);
    let roots = poly_roots(&g, bits, cfg)?;
    let prec = bits + 32;
    let values: Vec<Complex> = roots.iter().map(|r| Complex::with_val(prec, &r.value)).collect();
    let tol_exp = -((bits / 4) as i32);
    let mut remaining: Vec<usize> = (0..values.len()).collect();
    let mut found = Vec::new();
    let mut k = 1;
    while 2 * k <= remaining.len() {
        let mut hit = None;
        for subset in remaining.iter().copied().combinations(k) {
            let mut trace = Complex::new(prec);
            for &i in &subset {
                trace += &values[i];
            }
            if !close_to_integer(trace.imag(), tol_exp) || !close_to_integer(trace.real(), tol_exp) {
                continue;
            }
            // Expand Π (Y - y_i) numerically and round.
            let mut prod = vec![Complex::with_val(prec, 1)];
            for &i in &subset {
                let mut next = vec![Complex::new(prec); prod.len() + 1];
                for (j, c) in prod.iter().enumerate() {
                    next[j + 1] += c;
                    next[j] -= Complex::with_val(prec, c * &values[i]);
                }
                prod = next;
            }
            if !prod
                .iter()
                .all(|c| close_to_integer(c.real(), tol_exp) && close_to_integer(c.imag(), tol_exp))
            {
                continue;
            }
            let h = IntPoly::new(prod.iter().map(|c| nearest_integer(c.real())).collect());
            if let Ok(q) = g.exact_div(&h) {
                hit = Some((subset, h, q));
                break;
            }
        }
        match hit {
            Some((subset, h, q)) => {
                found.push(undo_monic_transform(&h, &a));
                remaining.retain(|i| !subset.contains(i));
                g = q;
            }
            None => k += 1,
        }
    }
    if g.degree().is_some_and(|d| d >= 1) {
        found.push(undo_monic_transform(&g, &a));
    }
    Ok(found)
}

fn sort_key(p: &IntPoly) -> (usize, Vec<Integer>) {
    let mut c = p.coeffs().to_vec();
    c.reverse();
    (p.degree().unwrap_or(0), c)
}

/// Complete factorization over ℚ into irreducible primitive integer
/// polynomials with positive leading coefficients.
pub fn factor(p: &IntPoly) -> Result<Factorization> {
    factor_with(p, &RootConfig::default())
}

pub fn factor_with(p: &IntPoly, cfg: &RootConfig) -> Result<Factorization> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("cannot factor the zero polynomial".into()))?;
    if deg == 0 {
        return Ok(Factorization {
            unit: p.coeff(0),
            factors: Vec::new(),
        });
    }
    let mut factors = Vec::new();
    for (g, e) in square_free_decomposition(p) {
        for f in factor_square_free(&g, cfg)? {
            factors.push((f, e));
        }
    }
    factors.sort_by_key(|x| sort_key(&x.0));
    let prod = factors.iter().fold(IntPoly::constant(Integer::from(1)), |acc, (f, e)| &acc * &f.pow(*e as u32));
    let unit_poly = p.exact_div(&prod)?;
    if unit_poly.degree() != Some(0) {
        return Err(Error::DivisionFailed(format!("factors of {p} do not re-expand to it")));
    }
    Ok(Factorization {
        unit: unit_poly.coeff(0),
        factors,
    })
}

pub fn is_irreducible(p: &IntPoly) -> Result<bool> {
    let f = factor(p)?;
    Ok(f.factors.len() == 1 && f.factors[0].1 == 1)
}
