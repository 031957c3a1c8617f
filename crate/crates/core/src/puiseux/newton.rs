//! Newton–Puiseux branches over high-precision complex coefficients.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;

use super::polygon::{edge_order, lower_hull};
use crate::arith::poly::binomial;
use crate::arith::roots::{complex_roots, RootFinder};
use crate::error::{Error, Result};

/// `Σ_i c[i](T) Z^i` with every `c[i]` known through `T^known`.
#[derive(Clone, Debug)]
pub struct BiPoly {
    pub c: Vec<Vec<Complex>>,
    pub known: usize,
}

impl BiPoly {
    pub fn new(mut c: Vec<Vec<Complex>>, known: usize, prec: u32) -> BiPoly {
        for row in c.iter_mut() {
            row.resize(known + 1, Complex::new(prec));
        }
        BiPoly { c, known }
    }

    fn scale(&self) -> f64 {
        self.c
            .iter()
            .flat_map(|r| r.iter())
            .map(abs_f64)
            .fold(0.0, f64::max)
    }
}

pub(crate) fn abs_f64(c: &Complex) -> f64 {
    Float::with_val(64, c.abs_ref()).to_f64()
}

/// `Z = Σ_k coeffs[k] · U^{(start + k)/nu}`.
#[derive(Clone, Debug)]
pub struct PuiseuxSeries {
    pub nu: usize,
    pub start: i64,
    pub coeffs: Vec<Complex>,
    /// The branch `Z = 0`.
    pub zero: bool,
}

impl PuiseuxSeries {
    fn zero_series(prec: u32, len: usize) -> PuiseuxSeries {
        PuiseuxSeries {
            nu: 1,
            start: 1,
            coeffs: vec![Complex::new(prec); len.max(1)],
            zero: true,
        }
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec().0
    }

    /// Order in `U` as a pair `(start, nu)`.
    pub fn order(&self) -> (i64, usize) {
        (self.start, self.nu)
    }

    pub fn order_f64(&self) -> f64 {
        if self.zero {
            f64::INFINITY
        } else {
            self.start as f64 / self.nu as f64
        }
    }

    /// Value at `u` on the principal branch of `u^{1/ν}`.
    pub fn eval(&self, u: &Complex) -> Complex {
        let prec = self.prec();
        if self.zero {
            return Complex::new(prec);
        }
        let w = if self.nu == 1 {
            u.clone()
        } else {
            Complex::with_val(prec, u.ln_ref()) / self.nu as u32
        };
        let w = if self.nu == 1 { w } else { w.exp() };
        let mut acc = Complex::new(prec);
        for a in self.coeffs.iter().rev() {
            acc = acc * &w + a;
        }
        acc * w.pow(self.start as i32)
    }

    /// `σ_ε` with `ε = e^{2πi j/ν}`: `a_k ↦ ε^{start+k} a_k`.
    pub fn conjugate(&self, j: usize) -> PuiseuxSeries {
        let prec = self.prec();
        if self.nu == 1 || j.is_multiple_of(self.nu) {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let e = (self.start + k as i64) * j as i64;
                a.clone() * root_of_unity(prec, self.nu, e)
            })
            .collect();
        PuiseuxSeries {
            coeffs,
            ..self.clone()
        }
    }

    pub fn conjugates(&self) -> Vec<PuiseuxSeries> {
        (0..self.nu).map(|j| self.conjugate(j)).collect()
    }

    /// Natural representative: `ν` coprime with the exponents in use.
    pub fn reduced(&self, thresh: f64) -> PuiseuxSeries {
        if self.zero || self.nu == 1 {
            return self.clone();
        }
        let mut g = gcd(self.nu as i64, self.start);
        for (k, a) in self.coeffs.iter().enumerate() {
            if abs_f64(a) > thresh {
                g = gcd(g, k as i64);
            }
        }
        let g = g.max(1);
        if g == 1 {
            return self.clone();
        }
        PuiseuxSeries {
            nu: self.nu / g as usize,
            start: self.start / g,
            coeffs: self.coeffs.iter().step_by(g as usize).cloned().collect(),
            zero: false,
        }
    }

    /// Largest coefficient difference over the common known prefix.
    pub fn distance(&self, other: &PuiseuxSeries) -> f64 {
        if self.zero || other.zero {
            return if self.zero && other.zero { 0.0 } else { f64::INFINITY };
        }
        if self.nu != other.nu || self.start != other.start {
            return f64::INFINITY;
        }
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| abs_f64(&Complex::with_val(a.prec().0, a - b)))
            .fold(0.0, f64::max)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `e^{2πi e / n}`.
pub fn root_of_unity(prec: u32, n: usize, e: i64) -> Complex {
    let r = e.rem_euclid(n as i64);
    let angle = Float::with_val(prec, Constant::Pi) * 2u32 * r as i32 / n as u32;
    Complex::with_val(prec, (Float::with_val(prec, angle.cos_ref()), Float::with_val(prec, angle.sin_ref())))
}

pub(crate) struct Ctx<'a> {
    pub prec: u32,
    pub finder: &'a dyn RootFinder,
    pub seed: u64,
    pub max_depth: usize,
}

fn valuation(row: &[Complex], thresh: f64) -> Option<usize> {
    row.iter().position(|a| abs_f64(a) > thresh)
}

/// All roots of `f` in `Z` as Puiseux series in `T`. With `positive_only`
/// only the roots of positive order are produced.
pub(crate) fn solve(f: &BiPoly, positive_only: bool, depth: usize, ctx: &Ctx) -> Result<Vec<PuiseuxSeries>> {
    let prec = ctx.prec;
    let thresh = f.scale().max(1e-300) * 2f64.powi(-(prec as i32) / 2);
    let orders: Vec<Option<usize>> = f.c.iter().map(|r| valuation(r, thresh)).collect();
    let mut pts: Vec<(i64, i64)> = orders
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.map(|o| (i as i64, o as i64)))
        .collect();
    if positive_only {
        let r = pts
            .iter()
            .find(|p| p.1 == 0)
            .map(|p| p.0)
            .ok_or_else(|| Error::TruncationTooShort("no root of order zero at this level".into()))?;
        pts.retain(|p| p.0 <= r);
    }
    if pts.is_empty() {
        return Err(Error::AllCoefficientsVanish);
    }
    let expected = pts.last().map_or(0, |p| p.0 as usize);
    let mut out: Vec<PuiseuxSeries> = (0..pts[0].0).map(|_| PuiseuxSeries::zero_series(prec, f.known + 1)).collect();
    let hull = lower_hull(&pts);
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (q, p) = edge_order(a, b);
        let span = b.0 - a.0;
        let mut phi = vec![Complex::new(prec); span as usize + 1];
        for i in a.0..=b.0 {
            let num = a.1 * (b.0 - i) + b.1 * (i - a.0);
            if num % span == 0 {
                phi[(i - a.0) as usize] = f.c[i as usize][(num / span) as usize].clone();
            }
        }
        let mu = p * a.1 + q * a.0;
        let roots = complex_roots(&phi, ctx.finder, ctx.seed);
        for (c, mult) in cluster(&phi, roots, prec) {
            let (f1, n1) = transform(f, p, q, mu, &c, prec);
            if mult == 1 {
                let tail = if n1 >= 1 { newton_series(&f1)? } else { Vec::new() };
                let mut coeffs = vec![c];
                coeffs.extend(tail);
                out.push(PuiseuxSeries {
                    nu: p as usize,
                    start: q,
                    coeffs,
                    zero: false,
                });
            } else {
                if depth >= ctx.max_depth || n1 < 1 {
                    return Err(Error::TruncationTooShort(format!("repeated root needs depth {} with {n1} known terms", depth + 1)));
                }
                for s in solve(&f1, true, depth + 1, ctx)? {
                    out.push(combine(p, q, &c, &s, f1.known));
                }
            }
        }
    }
    if out.len() != expected {
        return Err(Error::BranchAmbiguity(format!("{} branches for {expected} roots", out.len())));
    }
    Ok(out)
}

/// Group numerically equal roots; each cluster center is polished on the
/// derivative that has it as a simple root.
fn cluster(phi: &[Complex], roots: Vec<Complex>, prec: u32) -> Vec<(Complex, usize)> {
    let tol = 2f64.powi(-(prec as i32) / 8);
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let scale = abs_f64(&roots[i]).max(1.0);
        let mut members = vec![i];
        for j in i + 1..roots.len() {
            if !used[j] && abs_f64(&Complex::with_val(prec, &roots[i] - &roots[j])) < tol * scale {
                members.push(j);
            }
        }
        for &j in &members {
            used[j] = true;
        }
        let mut c = Complex::new(prec);
        for &j in &members {
            c += &roots[j];
        }
        c /= members.len() as u32;
        if members.len() > 1 {
            c = polish(&derivative(phi, members.len() - 1), c);
        }
        out.push((c, members.len()));
    }
    out
}

fn derivative(p: &[Complex], times: usize) -> Vec<Complex> {
    let mut d = p.to_vec();
    for _ in 0..times {
        d = d.iter().enumerate().skip(1).map(|(i, a)| a.clone() * i as u32).collect();
    }
    d
}

fn horner(p: &[Complex], x: &Complex) -> Complex {
    let mut acc = Complex::new(x.prec().0);
    for a in p.iter().rev() {
        acc = acc * x + a;
    }
    acc
}

fn polish(p: &[Complex], mut x: Complex) -> Complex {
    let dp = derivative(p, 1);
    for _ in 0..64 {
        let d = horner(&dp, &x);
        if d.is_zero() {
            break;
        }
        let step = horner(p, &x) / d;
        let small = abs_f64(&step) <= abs_f64(&x).max(1.0) * 2f64.powi(-(x.prec().0 as i32));
        x -= step;
        if small {
            break;
        }
    }
    x
}

/// `T^{−μ} F(T^p, T^q (c + Z1))` and the order through which it is known.
fn transform(f: &BiPoly, p: i64, q: i64, mu: i64, c: &Complex, prec: u32) -> (BiPoly, i64) {
    let deg = f.c.len() - 1;
    let n1 = (0..=deg as i64)
        .map(|i| p * (f.known as i64 + 1) + q * i)
        .min()
        .unwrap_or(0)
        - mu
        - 1;
    let size = n1.max(0) as usize;
    let mut out = vec![vec![Complex::new(prec); size + 1]; deg + 1];
    let mut cpow = vec![Complex::with_val(prec, 1)];
    for _ in 0..deg {
        let next = cpow.last().expect("nonempty").clone() * c;
        cpow.push(next);
    }
    for (i, row) in f.c.iter().enumerate() {
        for (k, a) in row.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let n = p * k as i64 + q * i as i64 - mu;
            if n < 0 || n > n1 {
                continue;
            }
            for j in 0..=i {
                let b = binomial(i as u64, j as u64);
                let t = Complex::with_val(prec, a * &cpow[i - j]) * &b;
                out[j][n as usize] += t;
            }
        }
    }
    (BiPoly { c: out, known: size }, n1)
}

/// The unique positive-order root of `f` when `∂f/∂Z(0,0) ≠ 0`.
fn newton_series(f: &BiPoly) -> Result<Vec<Complex>> {
    let n = f.known;
    let prec = f.c[0][0].prec().0;
    let a = f.c.get(1).map(|r| r[0].clone()).ok_or_else(|| Error::BranchAmbiguity("linear term missing".into()))?;
    if a.is_zero() {
        return Err(Error::BranchAmbiguity("root is not simple".into()));
    }
    let mut z = vec![Complex::new(prec); n + 1];
    for m in 1..=n {
        let r = eval_series(f, &z, m);
        z[m] = -(r[m].clone() / &a);
    }
    Ok(z[1..].to_vec())
}

pub(crate) fn series_mul(a: &[Complex], b: &[Complex], n: usize) -> Vec<Complex> {
    let prec = a[0].prec().0;
    let mut out = vec![Complex::new(prec); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += Complex::with_val(prec, x * y);
        }
    }
    out
}

/// `f(T, z(T))` through `T^n`.
pub(crate) fn eval_series(f: &BiPoly, z: &[Complex], n: usize) -> Vec<Complex> {
    let prec = z[0].prec().0;
    let mut acc = vec![Complex::new(prec); n + 1];
    for row in f.c.iter().rev() {
        acc = series_mul(&acc, z, n);
        for (k, a) in row.iter().enumerate().take(n + 1) {
            acc[k] += a;
        }
    }
    acc
}

/// `Z = T^q (c + Z1)` with `T = U^{1/p}` and `Z1` a branch in `T`.
fn combine(p: i64, q: i64, c: &Complex, s: &PuiseuxSeries, known: usize) -> PuiseuxSeries {
    let prec = c.prec().0;
    if s.zero {
        let mut coeffs = vec![Complex::new(prec); known + 1];
        coeffs[0] = c.clone();
        return PuiseuxSeries {
            nu: p as usize,
            start: q,
            coeffs,
            zero: false,
        };
    }
    let nu = p as usize * s.nu;
    let mut coeffs = vec![Complex::new(prec); s.start as usize + s.coeffs.len()];
    coeffs[0] = c.clone();
    for (k, a) in s.coeffs.iter().enumerate() {
        coeffs[s.start as usize + k] = a.clone();
    }
    PuiseuxSeries {
        nu,
        start: q * s.nu as i64,
        coeffs,
        zero: false,
    }
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    pub representative: PuiseuxSeries,
    pub conjugates: Vec<PuiseuxSeries>,
    /// Index of the rational class this class belongs to, once grouped.
    pub rational_class: Option<usize>,
}

impl ConjugacyClass {
    pub fn nu(&self) -> usize {
        self.representative.nu
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub nu: usize,
    pub order: String,
    pub leading: (f64, f64),
    pub terms: usize,
    pub rational_class: Option<usize>,
}

impl From<&ConjugacyClass> for ClassSummary {
    fn from(c: &ConjugacyClass) -> Self {
        let r = &c.representative;
        ClassSummary {
            nu: r.nu,
            order: if r.zero { "inf".into() } else { format!("{}/{}", r.start, r.nu) },
            leading: (r.coeffs[0].real().to_f64(), r.coeffs[0].imag().to_f64()),
            terms: r.coeffs.len(),
            rational_class: c.rational_class,
        }
    }
}

/// Partition branches into conjugacy classes. Every branch must be found
/// as a conjugate of exactly one representative.
pub fn group_classes(branches: Vec<PuiseuxSeries>, prec: u32) -> Result<Vec<ConjugacyClass>> {
    let thresh = 2f64.powi(-(prec as i32) / 2);
    let tol = 2f64.powi(-(prec as i32) / 8);
    let mut pool: Vec<PuiseuxSeries> = branches.into_iter().map(|b| b.reduced(thresh * 16.0)).collect();
    pool.sort_by(|a, b| {
        a.order_f64()
            .partial_cmp(&b.order_f64())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| cmp_f64(a.coeffs[0].real().to_f64(), b.coeffs[0].real().to_f64()))
            .then_with(|| cmp_f64(a.coeffs[0].imag().to_f64(), b.coeffs[0].imag().to_f64()))
    });
    let mut used = vec![false; pool.len()];
    let mut classes = Vec::new();
    for i in 0..pool.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let rep = pool[i].clone();
        let conjugates = rep.conjugates();
        for c in conjugates.iter().skip(1) {
            let scale = c.coeffs.iter().map(abs_f64).fold(1.0, f64::max);
            let hit = (0..pool.len()).find(|&j| !used[j] && pool[j].distance(c) < tol * scale);
            match hit {
                Some(j) => used[j] = true,
                None => return Err(Error::BranchAmbiguity(format!("conjugate of class {} not among the branches", classes.len()))),
            }
        }
        for a in 0..conjugates.len() {
            for b in a + 1..conjugates.len() {
                if conjugates[a].distance(&conjugates[b]) < tol {
                    return Err(Error::ConjugatesCollide);
                }
            }
        }
        classes.push(ConjugacyClass {
            representative: rep,
            conjugates,
            rational_class: None,
        });
    }
    Ok(classes)
}

fn cmp_f64(a: f64, b: f64) -> std::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
}

/// Largest coefficient of `G(U, y(U))` in `U^{1/ν}` through the order at
/// which both the germ and the branch are known; `None` for branches of
/// negative order.
pub fn back_substitution_residual(g: &BiPoly, y: &PuiseuxSeries) -> Option<f64> {
    if y.start < 0 {
        return None;
    }
    let prec = g.c[0][0].prec().0;
    let nu = y.nu;
    let n = if y.zero {
        nu * (g.known + 1) - 1
    } else {
        (y.start as usize + y.coeffs.len() - 1).min(nu * (g.known + 1) - 1)
    };
    let mut ys = vec![Complex::new(prec); n + 1];
    if !y.zero {
        for (k, a) in y.coeffs.iter().enumerate() {
            let e = y.start as usize + k;
            if e <= n {
                ys[e] = a.clone();
            }
        }
    }
    let spread = BiPoly {
        c: g
            .c
            .iter()
            .map(|row| {
                let mut r = vec![Complex::new(prec); n + 1];
                for (k, a) in row.iter().enumerate() {
                    if k * nu <= n {
                        r[k * nu] = a.clone();
                    }
                }
                r
            })
            .collect(),
        known: n,
    };
    Some(eval_series(&spread, &ys, n).iter().map(abs_f64).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::roots::Aberth;

    const PREC: u32 = 256;

    fn c(re: i64) -> Complex {
        Complex::with_val(PREC, re)
    }

    fn ctx() -> Ctx<'static> {
        Ctx {
            prec: PREC,
            finder: &Aberth,
            seed: 0,
            max_depth: 8,
        }
    }

    fn bipoly(rows: &[&[i64]], known: usize) -> BiPoly {
        BiPoly::new(rows.iter().map(|r| r.iter().map(|&x| c(x)).collect()).collect(), known, PREC)
    }

    #[test]
    fn square_root() {
        let f = bipoly(&[&[0, -1], &[0], &[1]], 8);
        let b = solve(&f, false, 0, &ctx()).unwrap();
        let classes = group_classes(b, PREC).unwrap();
        assert_eq!(classes.len(), 1);
        let r = &classes[0].representative;
        assert_eq!((r.nu, r.start), (2, 1));
        assert!((abs_f64(&r.coeffs[0]) - 1.0).abs() < 1e-60);
        assert!(r.coeffs[1..].iter().all(|a| abs_f64(a) < 1e-60));
    }

    #[test]
    fn two_linear_branches() {
        // (Z − 2U)(Z − 3U) = Z² − 5U Z + 6U²
        let f = bipoly(&[&[0, 0, 6], &[0, -5], &[1]], 8);
        let b = solve(&f, false, 0, &ctx()).unwrap();
        let classes = group_classes(b, PREC).unwrap();
        assert_eq!(classes.len(), 2);
        let lead: Vec<f64> = classes.iter().map(|c| c.representative.coeffs[0].real().to_f64()).collect();
        assert!((lead[0] - 2.0).abs() < 1e-60 && (lead[1] - 3.0).abs() < 1e-60);
        for cl in &classes {
            assert_eq!(cl.nu(), 1);
            assert!(back_substitution_residual(&f, &cl.representative).unwrap() < 1e-60);
        }
    }

    #[test]
    fn repeated_characteristic_root() {
        // (Z² − U)² = Z⁴ − 2U Z² + U²
        let f = bipoly(&[&[0, 0, 1], &[0], &[0, -2], &[0], &[1]], 8);
        let b = solve(&f, false, 0, &ctx()).unwrap();
        assert_eq!(b.len(), 4);
        for y in &b {
            assert_eq!(y.reduced(1e-60).nu, 2);
        }
    }

    #[test]
    fn cube_root_conjugates() {
        let y = PuiseuxSeries {
            nu: 3,
            start: 1,
            coeffs: vec![c(1), c(1)],
            zero: false,
        };
        let conj = y.conjugates();
        let w = root_of_unity(PREC, 3, 1);
        let w2 = root_of_unity(PREC, 3, 2);
        assert!(abs_f64(&Complex::with_val(PREC, &conj[1].coeffs[0] - &w)) < 1e-70);
        assert!(abs_f64(&Complex::with_val(PREC, &conj[1].coeffs[1] - &w2)) < 1e-70);
        assert!(abs_f64(&Complex::with_val(PREC, &conj[2].coeffs[0] - &w2)) < 1e-70);
    }

    #[test]
    fn newton_refines_a_nonpolynomial_root() {
        // Z − U − U Z²: Z = U + U³ + 2U⁵ + …
        let f = bipoly(&[&[0, -1], &[1], &[0, -1]], 7);
        let b = solve(&f, true, 0, &ctx()).unwrap();
        assert_eq!(b.len(), 1);
        let y = &b[0];
        let want = [1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0];
        for (k, w) in want.iter().enumerate() {
            assert!((y.coeffs[k].real().to_f64() - w).abs() < 1e-50, "{k}");
        }
    }
}
