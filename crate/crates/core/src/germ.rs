//! The germ `G_β(U, Z)` at `(0, 1/β)`.
//!
//! With `Z = z − 1/β` and `U = P̃*_β(Z)`, the germ is the unique polynomial
//! in `Z` of degree below `deg β`, with power series coefficients in `U`,
//! such that `G_β(P̃*_β(Z), Z) = f̃_β(Z)`. Coefficients live in ℚ(β), so for
//! Parry numbers every series below is exact through its truncation order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::arith::poly::binomial;
use crate::arith::{FieldOps, IntPoly, NfElem, NumberField, Ring, TruncatedSeries};
use crate::dynamics::BetaExpansion;
use crate::error::{Error, Result};
use crate::parry::ParryPolynomial;
use crate::registry::{Named, Registry};

pub type Series = TruncatedSeries<NfElem>;

pub const DEFAULT_ORDER: usize = 12;
pub const DEFAULT_MAX_POWER: usize = 60;

fn nf(field: &Arc<NumberField>, v: i64) -> NfElem {
    NfElem::from_int(field, v)
}

/// `p(x0 + Z)` as a coefficient list in `Z`.
pub fn taylor_at(p: &IntPoly, x0: &NfElem) -> Vec<NfElem> {
    let field = x0.field();
    let mut acc: Vec<NfElem> = Vec::new();
    for c in p.coeffs().iter().rev() {
        // acc <- acc * (x0 + Z) + c
        let mut next = vec![nf(field, 0); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i] = next[i].add(&a.mul(x0));
            next[i + 1] = next[i + 1].add(a);
        }
        next[0] = next[0].add(&NfElem::from_int(field, c.clone()));
        acc = next;
    }
    while acc.len() > 1 && acc.last().is_some_and(|c| c.is_zero()) {
        acc.pop();
    }
    acc
}

/// `P*_β(z) = z^d P_β(1/z)`.
pub fn reciprocal_min_poly(field: &NumberField) -> IntPoly {
    let p = field.beta().min_poly();
    p.reciprocal_with_degree(field.degree())
}

/// `γ_0, …, γ_d` from the binomial formula; `γ_0` vanishes.
pub fn gamma_coefficients(field: &Arc<NumberField>) -> Vec<NfElem> {
    let d = field.degree();
    let p = field.beta().min_poly();
    let inv_beta = NfElem::generator(field).inv().expect("β is nonzero");
    (0..=d)
        .map(|q| {
            let mut acc = nf(field, 0);
            for j in q..=d {
                let a = p.coeff(d - j);
                if a == 0 {
                    continue;
                }
                let w = a * binomial(j as u64, q as u64);
                acc = acc.add(&NfElem::from_int(field, w).mul(&inv_beta.pow((j - q) as u32)));
            }
            acc
        })
        .collect()
}

/// Power reduction table: `Z^h ≡ Σ_i v_{i,h} Z^i` modulo `U = Σ γ_q Z^q`.
#[derive(Clone, Debug)]
pub struct VTable {
    pub d: usize,
    pub order: usize,
    /// `rows[h - d][i] = v_{i,h}`.
    pub rows: Vec<Vec<Series>>,
    gamma: Vec<NfElem>,
}

impl VTable {
    pub fn new(gamma: &[NfElem], max_power: usize, order: usize) -> VTable {
        let d = gamma.len() - 1;
        let field = gamma[d].field().clone();
        let zero = nf(&field, 0);
        let inv_gd = gamma[d].inv().expect("γ_d = a_0 is nonzero");
        let u = Series::variable(&zero, order);
        let mut base: Vec<Series> = Vec::with_capacity(d);
        base.push(u.scale(&inv_gd));
        for g in gamma.iter().take(d).skip(1) {
            base.push(Series::constant(g.mul(&inv_gd).neg(), order));
        }
        let mut t = VTable {
            d,
            order,
            rows: vec![base],
            gamma: gamma.to_vec(),
        };
        t.extend_to(max_power);
        t
    }

    pub fn max_power(&self) -> usize {
        self.d + self.rows.len() - 1
    }

    /// Apply the recursion until row `h` exists.
    pub fn extend_to(&mut self, h: usize) {
        let d = self.d;
        let inv_gd = self.gamma[d].inv().expect("nonzero");
        while self.max_power() < h {
            let last = self.rows.last().expect("base row").clone();
            let top = &last[d - 1];
            let mut next = Vec::with_capacity(d);
            next.push(top.shift(1).scale(&inv_gd));
            for i in 1..d {
                let r = self.gamma[i].mul(&inv_gd);
                next.push(last[i - 1].sub(&top.scale(&r)));
            }
            self.rows.push(next);
        }
    }

    pub fn v(&self, i: usize, h: usize) -> &Series {
        &self.rows[h - self.d][i]
    }

    /// Reduce `Σ_h p_h Z^h` (series coefficients) to degree below `d`.
    pub fn reduce(&mut self, p: &[Series]) -> Vec<Series> {
        let d = self.d;
        let zero = nf(self.gamma[0].field(), 0);
        let mut out: Vec<Series> = (0..d).map(|_| Series::zero(&zero, self.order)).collect();
        if p.len() > d {
            self.extend_to(p.len() - 1);
        }
        for (h, c) in p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if h < d {
                out[h] = out[h].add(c);
            } else {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = o.add(&c.mul(self.v(i, h)));
                }
            }
        }
        out
    }

    /// Product in ℚ(β)[[U]][Z] / (P̃*(Z) − U).
    pub fn mul(&mut self, a: &[Series], b: &[Series]) -> Vec<Series> {
        let zero = nf(self.gamma[0].field(), 0);
        let mut prod: Vec<Series> = (0..a.len() + b.len() - 1).map(|_| Series::zero(&zero, self.order)).collect();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = prod[i + j].add(&x.mul(y));
                }
            }
        }
        self.reduce(&prod)
    }
}

/// Solve `M x = b` over a field by Gaussian elimination.
fn solve_linear<T: FieldOps>(mut m: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero_elem())
            .ok_or_else(|| Error::DivisionFailed("singular linear system".into()))?;
        m.swap(col, piv);
        b.swap(col, piv);
        let inv = m[col][col].inv().expect("nonzero pivot");
        for r in 0..n {
            if r != col && !m[r][col].is_zero_elem() {
                let f = m[r][col].mul(&inv);
                for c in col..n {
                    let t = m[col][c].mul(&f);
                    m[r][c] = m[r][c].sub(&t);
                }
                let t = b[col].mul(&f);
                b[r] = b[r].sub(&t);
            }
        }
    }
    Ok((0..n).map(|i| b[i].mul(&m[i][i].inv().expect("nonzero"))).collect())
}

/// Inverse of a unit of ℚ(β)[[U]][Z] / (P̃*(Z) − U), by solving the
/// multiplication-matrix system one U-degree at a time.
fn invert_in_quotient(table: &mut VTable, w: &[Series]) -> Result<Vec<Series>> {
    let d = table.d;
    let n = table.order;
    let field = table.gamma[0].field().clone();
    let zero = nf(&field, 0);
    // Column j of the matrix is w·Z^j reduced.
    let mut cols = Vec::with_capacity(d);
    for j in 0..d {
        let mut zj: Vec<Series> = (0..=j).map(|_| Series::zero(&zero, n)).collect();
        zj[j] = Series::constant(nf(&field, 1), n);
        cols.push(table.mul(w, &zj));
    }
    let entry = |r: usize, c: usize, k: usize| cols[c][r].coeff(k).clone();
    let m0: Vec<Vec<NfElem>> = (0..d).map(|r| (0..d).map(|c| entry(r, c, 0)).collect()).collect();
    let mut xs: Vec<Vec<NfElem>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut rhs: Vec<NfElem> = (0..d).map(|r| if k == 0 && r == 0 { nf(&field, 1) } else { nf(&field, 0) }).collect();
        for j in 1..=k {
            for (r, rv) in rhs.iter_mut().enumerate() {
                for c in 0..d {
                    let e = entry(r, c, j);
                    if !e.is_zero() {
                        *rv = rv.sub(&e.mul(&xs[k - j][c]));
                    }
                }
            }
        }
        xs.push(solve_linear(m0.clone(), rhs).map_err(|_| Error::NotAUnit)?);
    }
    Ok((0..d)
        .map(|i| Series::from_coeffs(&zero, xs.iter().map(|x| x[i].clone()).collect(), n))
        .collect())
}

#[derive(Clone, Debug)]
pub struct GermPolynomial {
    /// `c_0(U), …, c_{d−1}(U)`.
    pub coeffs: Vec<Series>,
    pub order: usize,
    pub route: &'static str,
    /// The germ is a polynomial in `U` fully contained in the truncation.
    pub finite: bool,
}

impl GermPolynomial {
    pub fn d(&self) -> usize {
        self.coeffs.len()
    }

    /// Degree in `Z` within the truncation (`None` when all vanish).
    pub fn deg_z(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Embed the coefficients into ℂ through the real embedding of β.
    pub fn embed(&self, prec: u32) -> Vec<Vec<Complex>> {
        self.coeffs
            .iter()
            .map(|s| s.coeffs().iter().map(|c| c.to_complex(prec)).collect())
            .collect()
    }

    pub fn eval(&self, u: &Complex, z: &Complex) -> Complex {
        let prec = u.prec().0;
        let emb = self.embed(prec);
        eval_embedded(&emb, u, z)
    }
}

pub fn eval_embedded(emb: &[Vec<Complex>], u: &Complex, z: &Complex) -> Complex {
    let prec = u.prec().0;
    let mut acc = Complex::new(prec);
    for row in emb.iter().rev() {
        let mut c = Complex::new(prec);
        for a in row.iter().rev() {
            c = c * u + a;
        }
        acc = acc * z + c;
    }
    acc
}

/// Everything a germ builder needs.
pub struct GermInput<'a> {
    pub field: &'a Arc<NumberField>,
    pub expansion: &'a BetaExpansion,
    pub parry: &'a ParryPolynomial,
    pub order: usize,
    pub max_power: usize,
}

pub trait GermBuilder: Named + Send + Sync {
    fn build(&self, input: &GermInput) -> Result<GermPolynomial>;
}

/// `f_β = −P*_{β,P}(z) / (1 − z^k)` (non-simple) or `−P*_{β,P}(z)` (simple)
/// as numerator and denominator.
pub fn rational_form(pp: &ParryPolynomial) -> (IntPoly, IntPoly) {
    let num = -&pp.reciprocal();
    let den = match pp.period {
        None => IntPoly::from_i64(&[1]),
        Some(k) => &IntPoly::from_i64(&[1]) - &IntPoly::monomial(Integer::from(1), k),
    };
    (num, den)
}

/// `λ_0, …, λ_J`: Taylor coefficients of `f_β` at `1/β`, exact in ℚ(β).
pub fn lambda_exact(field: &Arc<NumberField>, pp: &ParryPolynomial, j_max: usize) -> Result<Vec<NfElem>> {
    let x0 = NfElem::generator(field).inv().expect("nonzero");
    let (num, den) = rational_form(pp);
    let zero = nf(field, 0);
    let n = Series::from_coeffs(&zero, taylor_at(&num, &x0), j_max);
    let dn = Series::from_coeffs(&zero, taylor_at(&den, &x0), j_max);
    Ok(n.mul(&dn.reciprocal()?).coeffs().to_vec())
}

/// `λ_j = Σ_q t_{j+q} C(j+q, j) β^{−q}` from a digit prefix, in floating
/// point, with a bound on the omitted tail. `digits[0]` is `t_1`.
pub fn lambda_from_digits(digits: &[Integer], beta: &Float, j: usize, digit_bound: u64) -> (Float, f64) {
    let prec = beta.prec();
    let x = Float::with_val(prec, beta.recip_ref());
    let mut acc = Float::with_val(prec, 0);
    let mut w = Float::with_val(prec, 1);
    let mut q = 0usize;
    while j + q <= digits.len() {
        if j + q >= 1 {
            let t = &digits[j + q - 1];
            if *t != 0 {
                acc += Float::with_val(prec, &w * t);
            }
        }
        // w_{q+1} = w_q · (j+q+1)/(q+1) · x
        w *= (j + q + 1) as u32;
        w /= (q + 1) as u32;
        w *= &x;
        q += 1;
    }
    (acc, tail_bound(j, q, beta.to_f64(), digit_bound))
}

/// `B Σ_{q ≥ q0} C(j+q, j) β^{−q}` with `B` the largest digit.
pub fn tail_bound(j: usize, q0: usize, beta: f64, digit_bound: u64) -> f64 {
    let x = 1.0 / beta;
    let ln_term = ln_binomial(j + q0, j) + q0 as f64 * x.ln();
    let term = ln_term.exp();
    // Term ratios (j+q+1)/(q+1)·x decrease in q.
    let ratio = (j + q0 + 1) as f64 / (q0 + 1) as f64 * x;
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    digit_bound as f64 * term / (1.0 - ratio)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Smallest prefix length making the tail of `λ_j` below `eps`.
pub fn digits_needed(j: usize, beta: f64, digit_bound: u64, eps: f64) -> usize {
    let mut q = 1;
    while tail_bound(j, q, beta, digit_bound) > eps {
        q += 1;
        if q > 100_000 {
            break;
        }
    }
    j + q
}

/// Power reduction: `c_i = λ_i + Σ_{h=d}^{H} λ_h v_{i,h}`.
pub struct RecursionBuilder;

impl Named for RecursionBuilder {
    fn name(&self) -> &'static str {
        "recursion"
    }
}

impl GermBuilder for RecursionBuilder {
    fn build(&self, input: &GermInput) -> Result<GermPolynomial> {
        let field = input.field;
        let d = field.degree();
        let n = input.order;
        let simple = input.parry.period.is_none();
        let h_max = if simple {
            input.max_power.max(input.parry.m)
        } else {
            input.max_power.max(4 * d).max(input.parry.degree())
        };
        let lambda = lambda_exact(field, input.parry, h_max)?;
        let gamma = gamma_coefficients(field);
        let table = VTable::new(&gamma, h_max.max(d), n);
        let mut coeffs: Vec<Series> = (0..d).map(|i| Series::constant(lambda[i].clone(), n)).collect();
        // Largest |λ_h v_{i,h}| coefficient per row, to judge the tail.
        let mut row_size: Vec<f64> = Vec::new();
        for h in d..=h_max {
            let l = &lambda[h];
            let mut size: f64 = 0.0;
            if !l.is_zero() {
                for (i, c) in coeffs.iter_mut().enumerate() {
                    let term = table.v(i, h).scale(l);
                    for k in 0..=n {
                        size = size.max(term.coeff(k).to_f64().abs());
                    }
                    *c = c.add(&term);
                }
            }
            row_size.push(size);
        }
        let finite = simple && h_max >= input.parry.m;
        if !finite {
            let tail = &row_size[row_size.len() * 3 / 4..];
            let last = tail.last().copied().unwrap_or(0.0);
            let first = tail.first().copied().unwrap_or(0.0);
            if !(last < 1e-30 && last <= first) {
                return Err(Error::TailNotControlled {
                    order: n,
                    detail: format!(
                        "rows {}..{} contribute up to {:.3e} and do not decay (H = {h_max})",
                        h_max - tail.len() + 1,
                        h_max,
                        last
                    ),
                });
            }
        }
        Ok(GermPolynomial {
            coeffs,
            order: n,
            route: "recursion",
            finite,
        })
    }
}

/// Reduce the rational form of `f_β` modulo `P*_β(z) − U`:
/// `G = −U · Q̃*(Z)` (simple) or `−U · Q̃*(Z) · (1 − z^k)^{−1}` (non-simple),
/// where `Q = P_{β,P} / P_β`.
pub struct ClosedFormBuilder;

impl Named for ClosedFormBuilder {
    fn name(&self) -> &'static str {
        "closed-form"
    }
}

impl GermBuilder for ClosedFormBuilder {
    fn build(&self, input: &GermInput) -> Result<GermPolynomial> {
        let field = input.field;
        let d = field.degree();
        let n = input.order;
        let zero = nf(field, 0);
        let x0 = NfElem::generator(field).inv().expect("nonzero");
        let p_beta = field.beta().min_poly();
        let q = input.parry.poly.exact_div(p_beta)?;
        let q_star = q.reciprocal_with_degree(q.degree().unwrap_or(0));
        let gamma = gamma_coefficients(field);
        let mut table = VTable::new(&gamma, (2 * d).max(d + 1), n);
        let q_t: Vec<Series> = taylor_at(&q_star, &x0).into_iter().map(|c| Series::constant(c, n)).collect();
        let minus_u = Series::variable(&zero, n).neg();
        let mut g = table.reduce(&q_t);
        let finite = input.parry.period.is_none();
        if let Some(k) = input.parry.period {
            let w_poly = &IntPoly::from_i64(&[1]) - &IntPoly::monomial(Integer::from(1), k);
            let w: Vec<Series> = table.reduce(
                &taylor_at(&w_poly, &x0)
                    .into_iter()
                    .map(|c| Series::constant(c, n))
                    .collect::<Vec<_>>(),
            );
            let w_inv = invert_in_quotient(&mut table, &w)?;
            g = table.mul(&g, &w_inv);
        }
        let coeffs = g.iter().map(|c| c.mul(&minus_u)).collect();
        Ok(GermPolynomial {
            coeffs,
            order: n,
            route: "closed-form",
            finite,
        })
    }
}

pub fn germ_builders() -> Registry<dyn GermBuilder> {
    let mut r: Registry<dyn GermBuilder> = Registry::new("germ builder");
    r.register(Box::new(ClosedFormBuilder)).register(Box::new(RecursionBuilder));
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    pub radius: f64,
    pub max_residual: f64,
    pub max_bound: f64,
    pub pass: bool,
}

/// Sample `z` around `1/β` and compare `G(P*_β(z), z − 1/β)` with the exact
/// rational form of `f_β`. The bound sums the germ's next terms (computed
/// to four times the order) and a geometric estimate of the remainder.
pub fn germ_identity_check(
    builder: &dyn GermBuilder,
    input: &GermInput,
    samples: usize,
    radius: f64,
    seed: u64,
    prec: u32,
) -> Result<IdentityReport> {
    let germ = builder.build(input)?;
    let long_input = GermInput {
        order: 4 * input.order,
        ..*input
    };
    let long = builder.build(&long_input)?;
    let emb = germ.embed(prec);
    let long_emb = long.embed(prec);
    let field = input.field;
    let x0 = NfElem::generator(field).inv().expect("nonzero").to_complex(prec);
    let p_star = reciprocal_min_poly(field);
    let (num, den) = rational_form(input.parry);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut max_bound: f64 = 0.0;
    let mut pass = true;
    for _ in 0..samples {
        let r: f64 = radius * rng.gen_range(0.05..1.0);
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let zz = Complex::with_val(prec, (r * t.cos(), r * t.sin()));
        let z = Complex::with_val(prec, &x0 + &zz);
        let u = eval_int_poly(&p_star, &z);
        let f = eval_int_poly(&num, &z) / eval_int_poly(&den, &z);
        let g = eval_embedded(&emb, &u, &zz);
        let residual = abs_f64(&Complex::with_val(prec, &g - &f));
        let bound = truncation_bound(&long_emb, input.order, &u, &zz) + 2f64.powi(-(prec as i32) / 2);
        max_residual = max_residual.max(residual);
        max_bound = max_bound.max(bound);
        if !(residual <= bound) {
            pass = false;
        }
    }
    Ok(IdentityReport {
        samples,
        radius,
        max_residual,
        max_bound,
        pass,
    })
}

pub fn eval_int_poly(p: &IntPoly, z: &Complex) -> Complex {
    let prec = z.prec().0;
    let mut acc = Complex::new(prec);
    for c in p.coeffs().iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn abs_f64(c: &Complex) -> f64 {
    Float::with_val(64, c.abs_ref()).to_f64()
}

fn truncation_bound(long: &[Vec<Complex>], order: usize, u: &Complex, z: &Complex) -> f64 {
    let au = abs_f64(u);
    let az = abs_f64(z);
    let len = long[0].len();
    let term = |k: usize| -> f64 {
        long.iter()
            .enumerate()
            .map(|(i, row)| abs_f64(&row[k]) * az.powi(i as i32))
            .sum::<f64>()
            * au.powi(k as i32)
    };
    let mut total = 0.0;
    for k in (order + 1)..len {
        total += term(k);
    }
    // Remainder beyond the long truncation from the observed decay rate.
    let last = term(len - 1);
    if last == 0.0 {
        return total;
    }
    let window = (len - 1 - order) / 4;
    let prev = term(len - 1 - window.max(1));
    let ratio = if prev > 0.0 { (last / prev).powf(1.0 / window.max(1) as f64) } else { 1.0 };
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    total + last * ratio / (1.0 - ratio)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityProbe {
    pub deltas: Vec<f64>,
    pub js: Vec<usize>,
    /// `diffs[a][b] = |λ_{js[b]}(β + deltas[a]) − λ_{js[b]}(β)|`.
    pub diffs: Vec<Vec<f64>>,
    pub digits_used: Vec<usize>,
    pub pass: bool,
}

/// Perturb β upward and watch `λ_j` settle. Only the digit prefix needed
/// to push the tail below `1e-24` is computed for each perturbed base.
pub fn lambda_continuity_probe(
    field: &Arc<NumberField>,
    pp: &ParryPolynomial,
    deltas: &[rug::Rational],
    js: &[usize],
) -> Result<ContinuityProbe> {
    let prec = 160;
    let j_max = js.iter().copied().max().unwrap_or(1);
    let exact = lambda_exact(field, pp, j_max)?;
    field.beta().refine(96);
    let mut diffs = Vec::new();
    let mut digits_used = Vec::new();
    for delta in deltas {
        let shifted = NumberField::new(field.beta().shifted(delta)?);
        let beta = shifted.beta().to_float(prec);
        let bound = NfElem::generator(&shifted).floor().to_u64().unwrap_or(u64::MAX);
        let n = digits_needed(j_max, beta.to_f64(), bound, 1e-24);
        let exp = crate::dynamics::greedy_expansion(&shifted, n)?;
        let digits = exp.digits_through(n)?;
        digits_used.push(n);
        let row = js
            .iter()
            .map(|&j| {
                let (v, _) = lambda_from_digits(&digits, &beta, j, bound);
                (v - exact[j].to_float(prec)).to_f64().abs()
            })
            .collect::<Vec<f64>>();
        diffs.push(row);
    }
    let pass = (0..js.len()).all(|b| diffs.windows(2).all(|w| w[1][b] < w[0][b]));
    Ok(ContinuityProbe {
        deltas: deltas.iter().map(|d| d.to_f64()).collect(),
        js: js.to_vec(),
        diffs,
        digits_used,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::AlgebraicNumber;
    use crate::dynamics::greedy_expansion;
    use crate::parry::build_parry_polynomial;

    struct Setup {
        field: Arc<NumberField>,
        exp: BetaExpansion,
        pp: ParryPolynomial,
    }

    fn setup(c: &[i64]) -> Setup {
        let field = NumberField::new(AlgebraicNumber::new(IntPoly::from_i64(c), None).unwrap());
        let exp = greedy_expansion(&field, 1000).unwrap();
        let pp = build_parry_polynomial(&exp).unwrap();
        Setup { field, exp, pp }
    }

    fn input(s: &Setup, order: usize) -> GermInput<'_> {
        GermInput {
            field: &s.field,
            expansion: &s.exp,
            parry: &s.pp,
            order,
            max_power: DEFAULT_MAX_POWER,
        }
    }

    #[test]
    fn golden_ratio_gammas_and_lambdas() {
        let s = setup(&[-1, -1, 1]);
        let g = gamma_coefficients(&s.field);
        let phi = NfElem::generator(&s.field);
        let sqrt5 = phi.add(&phi).sub(&nf(&s.field, 1));
        assert!(g[0].is_zero());
        assert_eq!(g[1], sqrt5.neg());
        assert_eq!(g[2], nf(&s.field, -1));
        let l = lambda_exact(&s.field, &s.pp, 4).unwrap();
        assert_eq!(l[1], sqrt5);
        assert_eq!(l[2], nf(&s.field, 1));
        assert!(l[3].is_zero() && l[4].is_zero());
    }

    #[test]
    fn golden_ratio_v_table() {
        let s = setup(&[-1, -1, 1]);
        let g = gamma_coefficients(&s.field);
        let t = VTable::new(&g, 3, 4);
        let zero = nf(&s.field, 0);
        let phi = NfElem::generator(&s.field);
        let sqrt5 = phi.add(&phi).sub(&nf(&s.field, 1));
        let u = Series::variable(&zero, 4);
        assert_eq!(t.v(0, 2), &u.neg());
        assert_eq!(t.v(1, 2), &Series::constant(sqrt5.neg(), 4));
        assert_eq!(t.v(0, 3), &u.scale(&sqrt5));
        assert_eq!(t.v(1, 3), &Series::constant(nf(&s.field, 5), 4).sub(&u));
    }

    #[test]
    fn golden_ratio_germ_is_minus_u_by_both_routes() {
        let s = setup(&[-1, -1, 1]);
        let zero = nf(&s.field, 0);
        let minus_u = Series::variable(&zero, 6).neg();
        for b in germ_builders().iter() {
            let g = b.build(&input(&s, 6)).unwrap();
            assert_eq!(g.coeffs[0], minus_u, "{}", b.name());
            assert!(g.coeffs[1].is_zero());
        }
    }

    #[test]
    fn routes_agree_for_the_plastic_number() {
        let s = setup(&[-1, -1, 0, 1]);
        let a = ClosedFormBuilder.build(&input(&s, 8)).unwrap();
        let b = RecursionBuilder.build(&input(&s, 8)).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        assert_eq!(a.deg_z(), Some(2));
        assert!(a.coeffs[0].coeff(0).is_zero());
    }

    #[test]
    fn recursion_tail_is_reported_for_a_periodic_expansion() {
        let s = setup(&[1, -3, 1]);
        assert!(matches!(RecursionBuilder.build(&input(&s, 12)), Err(Error::TailNotControlled { .. })));
        let g = ClosedFormBuilder.build(&input(&s, 12)).unwrap();
        let r = germ_identity_check(&ClosedFormBuilder, &input(&s, 12), 20, 0.05, 0, 256).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(g.coeffs[0].coeff(0).is_zero());
    }

    #[test]
    fn integer_base() {
        let s = setup(&[-3, 1]);
        let g = ClosedFormBuilder.build(&input(&s, 4)).unwrap();
        let zero = nf(&s.field, 0);
        assert_eq!(g.coeffs, vec![Series::variable(&zero, 4).neg()]);
        let gamma = gamma_coefficients(&s.field);
        assert_eq!(gamma[1], nf(&s.field, -3));
    }

    #[test]
    fn numeric_lambdas_match_the_exact_ones() {
        let s = setup(&[1, -3, 1]);
        let exact = lambda_exact(&s.field, &s.pp, 3).unwrap();
        let digits = s.exp.digits_through(200).unwrap();
        let beta = s.field.beta().to_float(128);
        for j in 1..=3 {
            let (v, bound) = lambda_from_digits(&digits, &beta, j, 2);
            assert!(bound < 1e-40);
            assert!((v.to_f64() - exact[j].to_f64()).abs() < 1e-14);
        }
    }

    fn probe(c: &[i64]) -> ContinuityProbe {
        let s = setup(c);
        let deltas: Vec<rug::Rational> = [100, 1000, 10000].iter().map(|&d| rug::Rational::from((1, d))).collect();
        lambda_continuity_probe(&s.field, &s.pp, &deltas, &[1, 2, 3]).unwrap()
    }

    #[test]
    fn continuity_probe_settles_for_simple_bases() {
        assert!(probe(&[-1, -1, 1]).pass);
        assert!(probe(&[-1, -1, 0, 1]).pass);
    }

    #[test]
    fn continuity_probe_for_x2_minus_3x_plus_1() {
        // Reference values from an independent 80-digit float iteration.
        let p = probe(&[1, -3, 1]);
        let oracle = [
            [0.050813476400057005, 0.2586128881603167, 0.5187256777528186],
            [0.006013524033998988, 0.026011217950807408, 0.07328137304847762],
            [0.0011794233371121624, 0.013777430901886755, 0.0850241690998129],
        ];
        for (row, want) in p.diffs.iter().zip(oracle) {
            for (a, b) in row.iter().zip(want) {
                assert!((a - b).abs() < 1e-12 * b.max(1.0));
            }
        }
        // λ_3 moves away again between δ = 10^-3 and 10^-4.
        assert!(!p.pass);
    }
}
