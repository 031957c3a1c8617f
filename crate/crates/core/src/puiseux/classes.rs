//! Rational classes, cancellation points and the product formula.

use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;

use super::newton::{abs_f64, series_mul, PuiseuxSeries};
use super::PuiseuxDecomposition;
use crate::arith::roots::Root;
use crate::arith::{IntPoly, NfElem, NumberField, RatPoly};
use crate::error::{Error, Result};
use crate::germ::{eval_int_poly, rational_form, reciprocal_min_poly, taylor_at};
use crate::parry::ParryPolynomial;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// Numerical data about β and `f_β` shared by the checks below.
#[derive(Clone, Debug)]
pub struct GermContext {
    pub prec: u32,
    /// `1/β`.
    pub x0: Complex,
    pub p_star: IntPoly,
    /// Taylor coefficients of `P*_β` at `1/β`.
    pub p_star_taylor: Vec<Complex>,
    pub f_num: IntPoly,
    pub f_den: IntPoly,
    pub parry_star: IntPoly,
    /// `Q(0)` for `Q = P_{β,P} / P_β`.
    pub q0: Integer,
    pub k: usize,
    pub simple: bool,
}

impl GermContext {
    pub fn new(field: &Arc<NumberField>, pp: &ParryPolynomial, prec: u32) -> Result<GermContext> {
        let inv = NfElem::generator(field).inv_checked()?;
        let p_star = reciprocal_min_poly(field);
        let p_star_taylor = taylor_at(&p_star, &inv).iter().map(|c| c.to_complex(prec)).collect();
        let (f_num, f_den) = rational_form(pp);
        let q = pp.poly.exact_div(field.beta().min_poly())?;
        Ok(GermContext {
            prec,
            x0: inv.to_complex(prec),
            p_star,
            p_star_taylor,
            f_num,
            f_den,
            parry_star: pp.reciprocal(),
            q0: q.coeff(0),
            k: pp.k(),
            simple: pp.period.is_none(),
        })
    }

    pub fn f(&self, z: &Complex) -> Complex {
        eval_int_poly(&self.f_num, z) / eval_int_poly(&self.f_den, z)
    }

    pub fn u(&self, z: &Complex) -> Complex {
        eval_int_poly(&self.p_star, z)
    }

    /// `Π_{y ∈ C} (z − 1/β − y(P*_β(z)))`, independent of the branch of the root.
    pub fn class_value(&self, conjugates: &[PuiseuxSeries], z: &Complex) -> Complex {
        let u = self.u(z);
        let dz = Complex::with_val(self.prec, z - &self.x0);
        let mut acc = Complex::with_val(self.prec, 1);
        for y in conjugates {
            acc *= Complex::with_val(self.prec, &dz - &y.eval(&u));
        }
        acc
    }

    /// A seeded point with `0.2 r ≤ |z − 1/β| ≤ r`.
    pub fn sample_near(&self, rng: &mut ChaCha8Rng, radius: f64) -> Complex {
        let r: f64 = radius * rng.gen_range(0.2..1.0);
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        Complex::with_val(self.prec, &self.x0 + Complex::with_val(self.prec, (r * t.cos(), r * t.sin())))
    }
}

trait InvChecked: Sized {
    fn inv_checked(&self) -> Result<Self>;
}

impl InvChecked for NfElem {
    fn inv_checked(&self) -> Result<NfElem> {
        crate::arith::FieldOps::inv(self).ok_or(Error::NotAUnit)
    }
}

/// Best rational approximation with denominator at most `max_den`,
/// accepted only when within `tol` (relative) of `x`.
pub fn snap_rational(x: &Float, max_den: u64, tol: f64) -> Option<Rational> {
    let exact = x.to_rational()?;
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut rest = exact.clone();
    let mut best: Option<Rational> = None;
    for _ in 0..128 {
        let a = Integer::from(rest.floor_ref());
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > max_den {
            break;
        }
        best = Some(Rational::from((h2.clone(), k2.clone())));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = Rational::from(&rest - &a);
        if frac.cmp0() == std::cmp::Ordering::Equal {
            break;
        }
        rest = frac.recip();
    }
    let r = best?;
    let err = Float::with_val(x.prec(), x - &r).abs().to_f64();
    (err <= tol * x.to_f64().abs().max(1.0)).then_some(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalClass {
    /// Indices into the decomposition's class list.
    pub members: Vec<usize>,
    pub degree: usize,
    /// `Π_{y ∈ C_j}(X − 1/β − y(P*_β(X)))` with snapped coefficients.
    #[serde(serialize_with = "ser_ratpoly")]
    pub product: RatPoly,
    /// `π*_j` (primitive, positive leading coefficient).
    #[serde(serialize_with = "ser_display")]
    pub pi_star: IntPoly,
    /// `π_j`, its reciprocal.
    #[serde(serialize_with = "ser_display")]
    pub pi: IntPoly,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn ser_ratpoly<S: serde::Serializer>(v: &RatPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&v.coeffs().iter().map(|c| c.to_string()).join(","))
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalGrouping {
    pub classes: Vec<RationalClass>,
    /// Classes for which rationality could not be decided.
    pub undecided: Vec<usize>,
}

impl RationalGrouping {
    pub fn e(&self) -> usize {
        self.classes.len()
    }
}

fn positive_leading(p: IntPoly) -> IntPoly {
    if p.leading().is_some_and(|c| *c < 0) {
        -&p
    } else {
        p
    }
}

/// Taylor coefficients at `1/β` of the product over a set of classes,
/// and the order through which they are known.
fn product_series(dec: &PuiseuxDecomposition, members: &[usize], ctx: &GermContext) -> Result<(Vec<Complex>, usize)> {
    let prec = dec.prec;
    let branches: Vec<&PuiseuxSeries> = members.iter().flat_map(|&m| dec.classes[m].conjugates.iter()).collect();
    if branches.iter().any(|b| b.start < 0) {
        return Err(Error::RationalityUndecided("class of negative order".into()));
    }
    let l = branches.iter().fold(1usize, |acc, b| num_lcm(acc, b.nu));
    let kt = branches
        .iter()
        .filter(|b| !b.zero)
        .map(|b| (b.start as usize + b.coeffs.len()) * (l / b.nu) - 1)
        .min()
        .unwrap_or(l * (dec.germ.known + 1) - 1);
    let zero = || Complex::new(prec);
    // Polynomial in Z with coefficients in T = U^{1/L}.
    let mut poly: Vec<Vec<Complex>> = vec![{
        let mut one = vec![zero(); kt + 1];
        one[0] = Complex::with_val(prec, 1);
        one
    }];
    for b in &branches {
        let mut y = vec![zero(); kt + 1];
        if !b.zero {
            for (k, a) in b.coeffs.iter().enumerate() {
                let e = (b.start as usize + k) * (l / b.nu);
                if e <= kt {
                    y[e] = a.clone();
                }
            }
        }
        let mut next = vec![vec![zero(); kt + 1]; poly.len() + 1];
        for (m, c) in poly.iter().enumerate() {
            for (n, v) in c.iter().enumerate() {
                next[m + 1][n] += v;
            }
            let t = series_mul(c, &y, kt);
            for (n, v) in t.iter().enumerate() {
                next[m][n] -= v;
            }
        }
        poly = next;
    }
    let scale = poly.iter().flatten().map(abs_f64).fold(1.0, f64::max);
    let thresh = scale * 2f64.powi(-(prec as i32) / 4);
    for c in &poly {
        for (n, v) in c.iter().enumerate() {
            if n % l != 0 && abs_f64(v) > thresh {
                return Err(Error::RationalityUndecided("fractional powers survive the class product".into()));
            }
        }
    }
    let ku = kt / l;
    let e: Vec<Vec<Complex>> = poly.iter().map(|c| (0..=ku).map(|k| c[k * l].clone()).collect()).collect();
    // Substitute U = P̃*(Z), which has no constant term.
    let mut ptay = vec![zero(); ku + 1];
    for (i, c) in ctx.p_star_taylor.iter().enumerate().take(ku + 1) {
        ptay[i] = c.clone();
    }
    let mut upow = vec![{
        let mut one = vec![zero(); ku + 1];
        one[0] = Complex::with_val(prec, 1);
        one
    }];
    for _ in 0..ku {
        let next = series_mul(upow.last().expect("nonempty"), &ptay, ku);
        upow.push(next);
    }
    let mut h = vec![zero(); ku + 1];
    for (m, em) in e.iter().enumerate() {
        for (k, a) in em.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for n in m..=ku {
                let t = Complex::with_val(prec, a * &upow[k][n - m]);
                h[n] += t;
            }
        }
    }
    Ok((h, ku))
}

fn num_lcm(a: usize, b: usize) -> usize {
    fn g(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            g(b, a % b)
        }
    }
    a / g(a, b) * b
}

/// Try to read the product over `members` as a rational polynomial of
/// degree `Σ ν` dividing `P*_{β,P}`.
fn rational_product(
    dec: &PuiseuxDecomposition,
    members: &[usize],
    ctx: &GermContext,
    max_den: u64,
) -> Result<Option<RationalClass>> {
    let prec = dec.prec;
    let degree: usize = members.iter().map(|&m| dec.classes[m].nu()).sum();
    let (h, known) = product_series(dec, members, ctx)?;
    if known <= degree {
        return Err(Error::RationalityUndecided(format!("product known through Z^{known} only")));
    }
    let scale = h.iter().map(abs_f64).fold(1.0, f64::max);
    let tol = 2f64.powi(-(prec as i32) / 4);
    if h[degree + 1..].iter().any(|v| abs_f64(v) > tol * scale) {
        return Ok(None);
    }
    // Σ h_n (X − 1/β)^n in the monomial basis.
    let mut acc: Vec<Complex> = vec![Complex::new(prec)];
    for hn in h[..=degree].iter().rev() {
        let mut next = vec![Complex::new(prec); acc.len() + 1];
        for (i, a) in acc.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= Complex::with_val(prec, a * &ctx.x0);
        }
        next[0] += hn;
        acc = next;
    }
    acc.truncate(degree + 1);
    let mut coeffs = Vec::with_capacity(acc.len());
    for c in &acc {
        if abs_f64(&Complex::with_val(prec, c.imag())) > tol * scale {
            return Ok(None);
        }
        match snap_rational(c.real(), max_den, tol) {
            Some(r) => coeffs.push(r),
            None => return Ok(None),
        }
    }
    let product = RatPoly::new(coeffs);
    let pi_star = positive_leading(product.to_primitive_int());
    if pi_star.degree() != Some(degree) || ctx.parry_star.exact_div(&pi_star).is_err() {
        return Ok(None);
    }
    let pi = positive_leading(pi_star.reciprocal_with_degree(degree));
    Ok(Some(RationalClass {
        members: members.to_vec(),
        degree,
        product,
        pi_star,
        pi,
    }))
}

/// Merge conjugacy classes into minimal sets whose product is a rational
/// polynomial, smallest sets first.
pub fn rational_classes(dec: &mut PuiseuxDecomposition, ctx: &GermContext, max_den: u64) -> RationalGrouping {
    let n = dec.classes.len();
    let mut assigned = vec![false; n];
    let mut undecided = Vec::new();
    let mut out: Vec<RationalClass> = Vec::new();
    for size in 1..=n {
        for subset in (0..n).combinations(size) {
            if subset.iter().any(|&i| assigned[i] || undecided.contains(&i)) {
                continue;
            }
            match rational_product(dec, &subset, ctx, max_den) {
                Ok(Some(rc)) => {
                    for &i in &subset {
                        assigned[i] = true;
                        dec.classes[i].rational_class = Some(out.len());
                    }
                    out.push(rc);
                }
                Ok(None) => {}
                Err(_) if size == 1 => undecided.push(subset[0]),
                Err(_) => {}
            }
        }
    }
    RationalGrouping {
        classes: out,
        undecided,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationCrosscheck {
    pub e: usize,
    pub sigma: usize,
    pub paired: bool,
    pub samples: usize,
    pub radius: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `e = σ`, each rational class reproduces one `π_j`, and the class
/// products agree with `π*_j` near `1/β`.
pub fn factorization_crosscheck(
    dec: &PuiseuxDecomposition,
    grouping: &RationalGrouping,
    others: &[IntPoly],
    ctx: &GermContext,
    samples: usize,
    radius: f64,
    seed: u64,
) -> FactorizationCrosscheck {
    let tolerance = 1e-6;
    let mut pool: Vec<IntPoly> = others.iter().cloned().map(positive_leading).collect();
    let mut paired = true;
    for rc in &grouping.classes {
        match pool.iter().position(|p| *p == rc.pi) {
            Some(i) => {
                pool.remove(i);
            }
            None => paired = false,
        }
    }
    paired &= pool.is_empty();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let z = ctx.sample_near(&mut rng, radius);
        for rc in &grouping.classes {
            let conj: Vec<PuiseuxSeries> = rc
                .members
                .iter()
                .flat_map(|&m| dec.classes[m].conjugates.iter().cloned())
                .collect();
            let lhs = ctx.class_value(&conj, &z);
            let rhs = eval_rat_poly(&rc.product, &z);
            let r = abs_f64(&Complex::with_val(ctx.prec, &lhs - &rhs)) / abs_f64(&rhs).max(1.0);
            max_residual = max_residual.max(r);
        }
    }
    let e = grouping.e();
    let sigma = others.len();
    FactorizationCrosscheck {
        e,
        sigma,
        paired,
        samples,
        radius,
        max_residual,
        tolerance,
        pass: e == sigma && paired && max_residual <= tolerance,
    }
}

pub fn eval_rat_poly(p: &RatPoly, z: &Complex) -> Complex {
    let prec = z.prec().0;
    let mut acc = Complex::new(prec);
    for c in p.coeffs().iter().rev() {
        acc = acc * z + Complex::with_val(prec, c);
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct CancellationPoint {
    /// `ξ`, with `ξ^{-1}` a zero of the class product and of `f_β`.
    pub xi: (f64, f64),
    pub class: usize,
    pub f_residual: f64,
    /// Index of the matching beta-conjugate.
    pub matched: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CancellationReport {
    pub points: Vec<CancellationPoint>,
    /// Newton limits rejected because `f_β` does not vanish there.
    pub rejected: usize,
    pub beta_conjugates: usize,
    pub bijection: bool,
}

/// Solve `z − 1/β − y(P*_β(z)) = 0` over each class by Newton's method from
/// the class's leading terms and a seeded grid, keep the zeros of `f_β`
/// that are not zeros of `P*_β`, and match `ξ = 1/z` to the beta-conjugates.
pub fn cancellation_points(
    dec: &PuiseuxDecomposition,
    ctx: &GermContext,
    beta_conjugates: &[Root],
    seed: u64,
) -> CancellationReport {
    let prec = ctx.prec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<(Complex, usize)> = Vec::new();
    let mut rejected = 0;
    for (ci, class) in dec.classes.iter().enumerate() {
        let mut seeds: Vec<Complex> = class
            .conjugates
            .iter()
            .filter(|y| y.start == 0 && !y.zero)
            .map(|y| Complex::with_val(prec, &ctx.x0 + &y.coeffs[0]))
            .collect();
        for _ in 0..16 {
            seeds.push(ctx.sample_near(&mut rng, 1.5));
        }
        for s in seeds {
            let Some(z) = newton(|z| ctx.class_value(&class.conjugates, z), s, prec) else {
                continue;
            };
            if found.iter().any(|(w, _)| abs_f64(&Complex::with_val(prec, w - &z)) < 1e-20) {
                continue;
            }
            let fz = abs_f64(&ctx.f(&z));
            let uz = abs_f64(&ctx.u(&z));
            if fz > 2f64.powi(-(prec as i32) / 4) || uz < 1e-12 {
                rejected += 1;
                continue;
            }
            found.push((z, ci));
        }
    }
    let mut taken = vec![false; beta_conjugates.len()];
    let mut points = Vec::new();
    for (z, class) in found {
        let xi = Complex::with_val(prec, z.recip_ref());
        let (re, im) = (xi.real().to_f64(), xi.imag().to_f64());
        let matched = beta_conjugates
            .iter()
            .enumerate()
            .filter(|(i, _)| !taken[*i])
            .map(|(i, r)| (i, ((r.re() - re).powi(2) + (r.im() - im).powi(2)).sqrt()))
            .filter(|(_, d)| *d < 1e-8)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        if let Some(i) = matched {
            taken[i] = true;
        }
        points.push(CancellationPoint {
            xi: (re, im),
            class,
            f_residual: abs_f64(&ctx.f(&z)),
            matched,
        });
    }
    points.sort_by(|a, b| {
        (a.xi.0, a.xi.1)
            .partial_cmp(&(b.xi.0, b.xi.1))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let bijection = taken.iter().all(|t| *t) && points.iter().all(|p| p.matched.is_some());
    CancellationReport {
        points,
        rejected,
        beta_conjugates: beta_conjugates.len(),
        bijection,
    }
}

fn newton(f: impl Fn(&Complex) -> Complex, mut z: Complex, prec: u32) -> Option<Complex> {
    let h = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 4));
    for _ in 0..80 {
        let zp = Complex::with_val(prec, &z + &h);
        let zm = Complex::with_val(prec, &z - &h);
        let d = (f(&zp) - f(&zm)) / Complex::with_val(prec, &h * 2u32);
        if d.is_zero() {
            return None;
        }
        let step = f(&z) / d;
        let small = abs_f64(&step);
        if !small.is_finite() {
            return None;
        }
        z -= step;
        if abs_f64(&z) > 1e6 {
            return None;
        }
        if small <= abs_f64(&z).max(1.0) * 2f64.powi(-(prec as i32) / 3) {
            return Some(z);
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitRecovery {
    pub samples: usize,
    pub radius: f64,
    /// Closed form matched by the recovered unit, if any.
    pub matched: Option<String>,
    pub candidate_residuals: Vec<(String, f64)>,
    pub min_abs_unit: f64,
    pub max_abs_unit: f64,
    /// `|v̂ P*_β Π − f_β|` for the matched candidate.
    pub residual: f64,
    pub tolerance: f64,
    pub all_classes_rational: bool,
    pub pass: bool,
}

/// Recover `v = f_β / (P*_β · Π_classes)` at sample points and compare it
/// with the closed forms for the unit.
pub fn product_reconstruction(
    dec: &PuiseuxDecomposition,
    grouping: &RationalGrouping,
    ctx: &GermContext,
    samples: usize,
    radius: f64,
    seed: u64,
) -> UnitRecovery {
    let prec = ctx.prec;
    let tolerance = 1e-8;
    let k = ctx.k as u32;
    let q0 = Complex::with_val(prec, &ctx.q0);
    let one = Complex::with_val(prec, 1);
    type Cand = (&'static str, Box<dyn Fn(&Complex) -> Complex>);
    let cands: Vec<Cand> = vec![
        ("-(1-z^k)^-1", {
            let one = one.clone();
            Box::new(move |z: &Complex| -(one.clone() / (one.clone() - Complex::with_val(prec, Pow::pow(z, k)))))
        }),
        ("-Q(0)", {
            let q0 = q0.clone();
            Box::new(move |_z: &Complex| -q0.clone())
        }),
        ("-Q(0)(1-z^k)^-1", {
            let (one, q0) = (one.clone(), q0.clone());
            Box::new(move |z: &Complex| -(q0.clone() / (one.clone() - Complex::with_val(prec, Pow::pow(z, k)))))
        }),
        ("1-z^k", {
            let one = one.clone();
            Box::new(move |z: &Complex| one.clone() - Complex::with_val(prec, Pow::pow(z, k)))
        }),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cand_res = vec![0f64; cands.len()];
    let mut abs_res = vec![0f64; cands.len()];
    let (mut vmin, mut vmax) = (f64::INFINITY, 0f64);
    for _ in 0..samples {
        let z = ctx.sample_near(&mut rng, radius);
        let mut denom = ctx.u(&z);
        for class in &dec.classes {
            denom *= ctx.class_value(&class.conjugates, &z);
        }
        let f = ctx.f(&z);
        let v = Complex::with_val(prec, &f / &denom);
        let av = abs_f64(&v);
        vmin = vmin.min(av);
        vmax = vmax.max(av);
        for (i, (_, c)) in cands.iter().enumerate() {
            let cv = c(&z);
            let rel = abs_f64(&Complex::with_val(prec, &v - &cv)) / abs_f64(&cv).max(1e-300);
            cand_res[i] = cand_res[i].max(rel);
            let a = abs_f64(&(cv * &denom - &f));
            abs_res[i] = abs_res[i].max(a);
        }
    }
    let hit = cand_res.iter().position(|r| *r <= tolerance);
    let all_classes_rational = dec.classes.iter().all(|c| c.rational_class.is_some()) && grouping.undecided.is_empty();
    let smooth = vmin > 0.0 && vmax / vmin <= 10.0;
    UnitRecovery {
        samples,
        radius,
        matched: hit.map(|i| cands[i].0.to_string()),
        candidate_residuals: cands.iter().map(|c| c.0.to_string()).zip(cand_res.iter().copied()).collect(),
        min_abs_unit: vmin,
        max_abs_unit: vmax,
        residual: hit.map_or(f64::NAN, |i| abs_res[i]),
        tolerance,
        all_classes_rational,
        pass: smooth && (!all_classes_rational || hit.is_some()),
    }
}
