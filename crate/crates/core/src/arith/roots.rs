//! Simultaneous-iteration complex root finding with an a posteriori
//! inclusion certificate.
//!
//! Roots are computed per square-free factor, so every numeric problem
//! handed to an iteration has simple roots. A set of approximations is
//! accepted when the Weierstrass discs `D(z_i, n·|W_i|)` are pairwise
//! disjoint; each disc then holds exactly one root.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};

use crate::arith::poly::{square_free_decomposition, IntPoly};
use crate::arith::ring::Ring;
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub const DEFAULT_BITS: u32 = 256;
pub const DEFAULT_MAX_BITS: u32 = 8192;

/// Precision ceiling, overridable through `BETAGERM_MAX_BITS`.
pub fn max_bits() -> u32 {
    std::env::var("BETAGERM_MAX_BITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_BITS)
}

/// One simultaneous-iteration scheme. `coeffs` are lowest degree first,
/// the polynomial has simple roots, and `z` holds the starting points on
/// entry and the approximations on exit.
pub trait RootFinder: Named + Send + Sync {
    fn iterate(&self, coeffs: &[Complex], z: &mut [Complex], max_iter: usize);
}

fn horner_with_derivative(coeffs: &[Complex], x: &Complex) -> (Complex, Complex) {
    let prec = x.prec();
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    for c in coeffs.iter().rev() {
        dp = dp * x + &p;
        p = p * x + c;
    }
    (p, dp)
}

fn horner(coeffs: &[Complex], x: &Complex) -> Complex {
    let mut p = Complex::new(x.prec());
    for c in coeffs.iter().rev() {
        p = p * x + c;
    }
    p
}

fn small(step: &Complex, z: &Complex, prec: u32) -> bool {
    let s = Float::with_val(53, step.abs_ref());
    let m = Float::with_val(53, z.abs_ref()).max(&Float::with_val(53, 1));
    s.is_zero() || s.get_exp().unwrap_or(i32::MIN) < m.get_exp().unwrap_or(0) - prec as i32 + 4
}

pub struct Aberth;

impl Named for Aberth {
    fn name(&self) -> &'static str {
        "aberth"
    }
}

impl RootFinder for Aberth {
    fn iterate(&self, coeffs: &[Complex], z: &mut [Complex], max_iter: usize) {
        let n = z.len();
        let prec = coeffs[0].prec().0;
        let mut done = vec![false; n];
        for _ in 0..max_iter {
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let (p, dp) = horner_with_derivative(coeffs, &z[i]);
                if p.is_zero_elem() {
                    done[i] = true;
                    continue;
                }
                let ratio = Complex::with_val(prec, &p / &dp);
                let mut s = Complex::new(prec);
                for (j, zj) in z.iter().enumerate() {
                    if j != i {
                        let d = Complex::with_val(prec, &z[i] - zj);
                        s += d.recip();
                    }
                }
                let denom = Complex::with_val(prec, 1) - Complex::with_val(prec, &ratio * &s);
                let step = ratio / denom;
                if small(&step, &z[i], prec) {
                    done[i] = true;
                }
                z[i] -= step;
            }
            if done.iter().all(|&d| d) {
                break;
            }
        }
    }
}

pub struct DurandKerner;

impl Named for DurandKerner {
    fn name(&self) -> &'static str {
        "durand-kerner"
    }
}

impl RootFinder for DurandKerner {
    fn iterate(&self, coeffs: &[Complex], z: &mut [Complex], max_iter: usize) {
        let n = z.len();
        let prec = coeffs[0].prec().0;
        let lead = coeffs.last().expect("nonempty").clone();
        for _ in 0..max_iter {
            let mut all_small = true;
            for i in 0..n {
                let p = horner(coeffs, &z[i]);
                let mut denom = lead.clone();
                for (j, zj) in z.iter().enumerate() {
                    if j != i {
                        denom *= Complex::with_val(prec, &z[i] - zj);
                    }
                }
                let step = p / denom;
                if !small(&step, &z[i], prec) {
                    all_small = false;
                }
                z[i] -= step;
            }
            if all_small {
                break;
            }
        }
    }
}

pub fn root_finders() -> Registry<dyn RootFinder> {
    let mut r: Registry<dyn RootFinder> = Registry::new("root finder");
    r.register(Box::new(Aberth)).register(Box::new(DurandKerner));
    r
}

/// A certified root: the disc of radius `radius` around `value` contains
/// exactly `multiplicity` roots counted with multiplicity (one distinct root).
#[derive(Clone, Debug)]
pub struct Root {
    pub value: Complex,
    pub multiplicity: usize,
    pub radius: f64,
}

impl Root {
    pub fn re(&self) -> f64 {
        self.value.real().to_f64()
    }
    pub fn im(&self) -> f64 {
        self.value.imag().to_f64()
    }
    pub fn abs(&self) -> f64 {
        Float::with_val(64, self.value.abs_ref()).to_f64()
    }
}

/// Settings shared by every root computation.
#[derive(Clone, Debug)]
pub struct RootConfig {
    pub finder: String,
    pub seed: u64,
    pub max_bits: u32,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            finder: "aberth".into(),
            seed: 0,
            max_bits: max_bits(),
        }
    }
}

/// Starting points on a circle enclosing all roots, with a seeded angular
/// offset so symmetric polynomials do not trap the iteration.
fn start_points(coeffs: &[Complex], prec: u32, rng: &mut ChaCha8Rng) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let lead = Float::with_val(53, coeffs[n].abs_ref()).to_f64();
    let mut radius: f64 = 0.0;
    for (i, c) in coeffs.iter().enumerate().take(n) {
        let a = Float::with_val(53, c.abs_ref()).to_f64() / lead;
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / (n - i) as f64));
        }
    }
    let radius = (2.0 * radius).max(1e-3);
    let offset: f64 = rng.gen_range(0.0..2.0 * PI);
    (0..n)
        .map(|k| {
            let t = offset + 2.0 * PI * k as f64 / n as f64;
            let jitter: f64 = rng.gen_range(0.9..1.1);
            Complex::with_val(prec, (radius * jitter * t.cos(), radius * jitter * t.sin()))
        })
        .collect()
}

/// Roots of a polynomial with complex coefficients (lowest degree first)
/// and simple roots; approximations only, no certificate.
pub fn complex_roots(coeffs: &[Complex], finder: &dyn RootFinder, seed: u64) -> Vec<Complex> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let prec = coeffs[0].prec().0;
    if n == 1 {
        return vec![Complex::with_val(prec, -&coeffs[0]) / &coeffs[1]];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse: Vec<Complex> = coeffs.iter().map(|c| Complex::with_val(64, c)).collect();
    let mut z = start_points(&coarse, 64, &mut rng);
    finder.iterate(&coarse, &mut z, 500);
    let mut z: Vec<Complex> = z.into_iter().map(|v| Complex::with_val(prec, v)).collect();
    finder.iterate(coeffs, &mut z, 200);
    z
}

/// Weierstrass disc radii `n·|W_i|`, or `None` when two approximations
/// coincide.
fn inclusion_radii(coeffs: &[Complex], z: &[Complex]) -> Option<Vec<Float>> {
    let n = z.len();
    let prec = coeffs[0].prec().0;
    let lead = coeffs.last().expect("nonempty");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut denom = lead.clone();
        for (j, zj) in z.iter().enumerate() {
            if j != i {
                denom *= Complex::with_val(prec, &z[i] - zj);
            }
        }
        if denom.is_zero_elem() {
            return None;
        }
        let w = horner(coeffs, &z[i]) / denom;
        // Slack for the rounding error of the residual evaluation itself.
        let slack = Float::with_val(prec, z[i].abs_ref()).max(&Float::with_val(prec, 1)) >> (prec as i32 - 16);
        out.push(Float::with_val(prec, w.abs_ref()) * (n as u32) * 2u32 + slack);
    }
    Some(out)
}

fn discs_disjoint(z: &[Complex], r: &[Float]) -> bool {
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            let prec = z[i].prec().0;
            let d = Float::with_val(prec, Complex::with_val(prec, &z[i] - &z[j]).abs_ref());
            if d <= Float::with_val(prec, &r[i] + &r[j]) {
                return false;
            }
        }
    }
    true
}

/// Certified roots of a square-free integer polynomial at `bits` of
/// accuracy, escalating the working precision as needed.
fn certified_simple_roots(p: &IntPoly, bits: u32, cfg: &RootConfig) -> Result<Vec<(Complex, f64)>> {
    let finders = root_finders();
    let finder = finders.get(&cfg.finder)?;
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut prec = bits.max(DEFAULT_BITS) + 32;
    loop {
        let coeffs: Vec<Complex> = p.coeffs().iter().map(|c| Complex::with_val(prec, c)).collect();
        let z = complex_roots(&coeffs, finder, cfg.seed);
        if let Some(r) = inclusion_radii(&coeffs, &z) {
            let tight = r.iter().all(|ri| ri.get_exp().is_none_or(|e| e < -(bits as i32)));
            if discs_disjoint(&z, &r) && tight {
                let mut out: Vec<(Complex, f64)> = z
                    .into_iter()
                    .zip(r)
                    .map(|(zi, ri)| {
                        let rf = ri.to_f64_round(rug::float::Round::Up);
                        (zi, if rf == 0.0 && !ri.is_zero() { f64::MIN_POSITIVE } else { rf })
                    })
                    .collect();
                sort_roots(&mut out);
                return Ok(out);
            }
        }
        if prec >= cfg.max_bits {
            return Err(Error::PrecisionExhausted {
                bits: prec,
                what: format!("roots of {p}"),
            });
        }
        prec = (prec * 2).min(cfg.max_bits);
    }
}

/// Deterministic order: by real part, then imaginary part.
fn sort_roots(v: &mut [(Complex, f64)]) {
    v.sort_by(|a, b| {
        let ka = (a.0.real().to_f64(), a.0.imag().to_f64());
        let kb = (b.0.real().to_f64(), b.0.imag().to_f64());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// All complex roots of `p` with multiplicities, each to `bits` bits.
/// Multiplicities come from an exact square-free decomposition.
pub fn poly_roots(p: &IntPoly, bits: u32, cfg: &RootConfig) -> Result<Vec<Root>> {
    if p.degree().is_none_or(|d| d == 0) {
        return Err(Error::InvalidInput("root finding needs degree at least 1".into()));
    }
    let mut out = Vec::new();
    for (factor, mult) in square_free_decomposition(p) {
        for (value, radius) in certified_simple_roots(&factor, bits, cfg)? {
            out.push(Root {
                value,
                multiplicity: mult,
                radius,
            });
        }
    }
    out.sort_by(|a, b| (a.re(), a.im()).partial_cmp(&(b.re(), b.im())).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_match_the_formula() {
        let cfg = RootConfig::default();
        let r = poly_roots(&IntPoly::from_i64(&[-1, -1, 1]), 128, &cfg).unwrap();
        let s5 = 5f64.sqrt();
        assert!((r[0].re() - (1.0 - s5) / 2.0).abs() < 1e-15);
        assert!((r[1].re() - (1.0 + s5) / 2.0).abs() < 1e-15);
        let r = poly_roots(&IntPoly::from_i64(&[1, -1, 1]), 128, &cfg).unwrap();
        assert!((r[0].re() - 0.5).abs() < 1e-15 && (r[0].im() + 0.75f64.sqrt()).abs() < 1e-15);
        assert!((r[1].im() - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn multiplicities_come_from_the_square_free_split() {
        let r = poly_roots(&IntPoly::from_i64(&[1, -2, 1]), 64, &RootConfig::default()).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].re() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn both_finders_agree() {
        let p = IntPoly::from_i64(&[-1, 0, 0, 0, -1, 1]);
        let a = poly_roots(&p, 128, &RootConfig::default()).unwrap();
        let cfg = RootConfig {
            finder: "durand-kerner".into(),
            ..RootConfig::default()
        };
        let b = poly_roots(&p, 128, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.re() - y.re()).abs() < 1e-20 && (x.im() - y.im()).abs() < 1e-20);
        }
    }

    #[test]
    fn unknown_finder_is_reported() {
        let cfg = RootConfig {
            finder: "laguerre".into(),
            ..RootConfig::default()
        };
        assert!(matches!(
            poly_roots(&IntPoly::from_i64(&[-2, 1]), 64, &cfg),
            Err(Error::UnknownStrategy { .. })
        ));
    }
}
