//! The full pipeline for one β and the serializable reports built from it.

use std::cell::OnceCell;
use std::fmt::Write as _;
use std::sync::Arc;

use rug::Rational;
use serde::Serialize;

use crate::arith::roots::{Root, RootConfig, DEFAULT_BITS};
use crate::arith::{AlgebraicNumber, IntPoly, NumberField};
use crate::dynamics::{greedy_expansion, BetaExpansion, Classification, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::germ::{
    germ_builders, germ_identity_check, lambda_continuity_probe, lambda_exact, ContinuityProbe, GermInput,
    GermPolynomial, IdentityReport, DEFAULT_MAX_POWER, DEFAULT_ORDER,
};
use crate::parry::{
    build_parry_polynomial, conjugate_set, parry_polynomial_boyd, parry_polynomial_expanded, factor_parry, height_check, solomyak_check, ConjugateSet, HeightReport,
    ParryFactorization, ParryPolynomial, SolomyakReport, SOLOMYAK_BOUND,
};
use crate::puiseux::classes::DEFAULT_MAX_DENOMINATOR;
use crate::puiseux::{
    cancellation_points, factorization_crosscheck, height_identity_check, newton_puiseux, product_reconstruction,
    rational_classes, CancellationReport, ClassSummary, FactorizationCrosscheck, GermContext, HeightIdentity,
    NewtonPolygon, PuiseuxConfig, PuiseuxDecomposition, RationalGrouping, UnitRecovery,
};
use crate::zeta::{
    fixed_point_table, zeta_product_check, zeta_rational, FixedPointTable, ZetaInput, ZetaProductReport,
    DEFAULT_N_MAX,
};

pub const SCHEMA: &str = "betagerm/1";

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub minpoly: IntPoly,
    pub root_interval: Option<(Rational, Rational)>,
    pub max_iter: usize,
    /// `N_U`.
    pub order: usize,
    /// `H`.
    pub max_power: usize,
    pub bits: u32,
    pub n_max: usize,
    pub seed: u64,
    pub finder: String,
    pub germ_builder: String,
    pub samples: usize,
    pub radius: f64,
    /// Largest period the brute-force counter enumerates.
    pub brute_force_bound: usize,
}

impl RunConfig {
    pub fn new(minpoly: IntPoly) -> RunConfig {
        RunConfig {
            minpoly,
            root_interval: None,
            max_iter: DEFAULT_MAX_ITER,
            order: DEFAULT_ORDER,
            max_power: DEFAULT_MAX_POWER,
            bits: DEFAULT_BITS,
            n_max: DEFAULT_N_MAX,
            seed: 0,
            finder: "aberth".into(),
            germ_builder: "closed-form".into(),
            samples: 20,
            radius: 0.05,
            brute_force_bound: DEFAULT_N_MAX,
        }
    }
}

/// Stages after `P_{β,P}` that only exist for Parry numbers.
pub struct PuiseuxStage {
    pub dec: PuiseuxDecomposition,
    pub grouping: RationalGrouping,
    pub ctx: GermContext,
}

/// Lazily evaluated pipeline; each stage is computed once.
pub struct Pipeline {
    pub cfg: RunConfig,
    pub field: Arc<NumberField>,
    pub expansion: BetaExpansion,
    pub roots: RootConfig,
    parry: OnceCell<Result<ParryPolynomial>>,
    conjugates: OnceCell<Result<ConjugateSet>>,
    factorization: OnceCell<Result<ParryFactorization>>,
    germ: OnceCell<Result<GermPolynomial>>,
    puiseux: OnceCell<Result<PuiseuxStage>>,
}

fn cached<T>(cell: &OnceCell<Result<T>>, f: impl FnOnce() -> Result<T>) -> Result<&T> {
    cell.get_or_init(f).as_ref().map_err(Clone::clone)
}

impl Pipeline {
    pub fn new(cfg: RunConfig) -> Result<Pipeline> {
        let beta = AlgebraicNumber::new(cfg.minpoly.clone(), cfg.root_interval.clone())?;
        let field = NumberField::new(beta);
        let expansion = greedy_expansion(&field, cfg.max_iter)?;
        let roots = RootConfig {
            finder: cfg.finder.clone(),
            seed: cfg.seed,
            ..RootConfig::default()
        };
        crate::arith::roots::root_finders().get(&cfg.finder)?;
        germ_builders().get(&cfg.germ_builder)?;
        Ok(Pipeline {
            cfg,
            field,
            expansion,
            roots,
            parry: OnceCell::new(),
            conjugates: OnceCell::new(),
            factorization: OnceCell::new(),
            germ: OnceCell::new(),
            puiseux: OnceCell::new(),
        })
    }

    pub fn parry(&self) -> Result<&ParryPolynomial> {
        cached(&self.parry, || build_parry_polynomial(&self.expansion))
    }

    pub fn conjugates(&self) -> Result<&ConjugateSet> {
        cached(&self.conjugates, || {
            conjugate_set(self.parry()?, self.field.beta(), self.cfg.bits, &self.roots)
        })
    }

    pub fn factorization(&self) -> Result<&ParryFactorization> {
        cached(&self.factorization, || {
            factor_parry(self.parry()?, self.field.beta().min_poly(), &self.roots)
        })
    }

    pub fn germ_input(&self) -> Result<GermInput<'_>> {
        Ok(GermInput {
            field: &self.field,
            expansion: &self.expansion,
            parry: self.parry()?,
            order: self.cfg.order,
            max_power: self.cfg.max_power,
        })
    }

    pub fn germ(&self) -> Result<&GermPolynomial> {
        cached(&self.germ, || {
            let builders = germ_builders();
            builders.get(&self.cfg.germ_builder)?.build(&self.germ_input()?)
        })
    }

    pub fn puiseux(&self) -> Result<&PuiseuxStage> {
        cached(&self.puiseux, || {
            let cfg = PuiseuxConfig {
                bits: self.cfg.bits,
                finder: self.cfg.finder.clone(),
                seed: self.cfg.seed,
                ..PuiseuxConfig::default()
            };
            let mut dec = newton_puiseux(self.germ()?, &cfg)?;
            let ctx = GermContext::new(&self.field, self.parry()?, self.cfg.bits)?;
            let grouping = rational_classes(&mut dec, &ctx, DEFAULT_MAX_DENOMINATOR);
            Ok(PuiseuxStage { dec, grouping, ctx })
        })
    }

    pub fn zeta_input(&self) -> Result<ZetaInput<'_>> {
        Ok(ZetaInput {
            field: &self.field,
            parry: self.parry()?,
            bits: self.cfg.bits,
            roots: &self.roots,
            bound: self.cfg.brute_force_bound,
        })
    }

    pub fn input_summary(&self) -> InputSummary {
        let beta = self.field.beta();
        let (lo, hi) = beta.interval();
        InputSummary {
            minpoly: self.cfg.minpoly.to_string(),
            degree: beta.degree(),
            beta: format_float(&beta.to_float(self.cfg.bits.max(128)), 40),
            interval: [lo.to_string(), hi.to_string()],
            seed: self.cfg.seed,
        }
    }

    /// Warning for inputs whose expansion did not resolve.
    pub fn warning(&self) -> Option<String> {
        match self.expansion.classification {
            Classification::UnresolvedWithin { bound } => Some(format!(
                "d_beta(1) is neither finite nor eventually periodic within {bound} steps; Parry-only stages are skipped"
            )),
            _ => None,
        }
    }
}

pub fn format_float(x: &rug::Float, digits: usize) -> String {
    x.to_string_radix(10, Some(digits))
}

#[derive(Clone, Debug, Serialize)]
pub struct InputSummary {
    pub minpoly: String,
    pub degree: usize,
    pub beta: String,
    pub interval: [String; 2],
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpandReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    /// Preperiod and one period for Parry numbers; a prefix otherwise.
    pub digits: Vec<String>,
    pub digits_computed: usize,
    pub classification: Classification,
    pub warning: Option<String>,
}

const PREFIX_SHOWN: usize = 64;

pub fn expand_report(p: &Pipeline) -> ExpandReport {
    let digits: Vec<String> = p.expansion.digits.iter().take(PREFIX_SHOWN.max(
        if p.expansion.classification.is_parry() { p.expansion.digits.len() } else { 0 },
    )).map(|d| d.to_string()).collect();
    ExpandReport {
        schema: SCHEMA,
        command: "expand",
        input: p.input_summary(),
        digits,
        digits_computed: p.expansion.digits.len(),
        classification: p.expansion.classification,
        warning: p.warning(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub classification: Classification,
    pub parry: bool,
    pub simple: bool,
    pub k: Option<usize>,
    pub warning: Option<String>,
}

pub fn classify_report(p: &Pipeline) -> ClassifyReport {
    let c = p.expansion.classification;
    ClassifyReport {
        schema: SCHEMA,
        command: "classify",
        input: p.input_summary(),
        classification: c,
        parry: c.is_parry(),
        simple: c.is_simple(),
        k: c.k(),
        warning: p.warning(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationOut {
    pub p_beta: String,
    pub p_beta_multiplicity: usize,
    pub others: Vec<String>,
    pub sigma: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParryReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub classification: Classification,
    pub parry_polynomial: String,
    pub degree: usize,
    pub m: usize,
    pub period: Option<usize>,
    pub boyd_route: String,
    pub expanded_route: String,
    pub routes_agree: bool,
    pub height: HeightReport,
    pub factorization: FactorizationOut,
}

pub fn parry_report(p: &Pipeline) -> Result<ParryReport> {
    let pp = p.parry()?;
    let f = p.factorization()?;
    let boyd = parry_polynomial_boyd(&p.expansion)?;
    let expanded = parry_polynomial_expanded(&p.expansion)?;
    Ok(ParryReport {
        schema: SCHEMA,
        command: "parry",
        input: p.input_summary(),
        classification: p.expansion.classification,
        parry_polynomial: pp.poly.to_string(),
        degree: pp.degree(),
        m: pp.m,
        period: pp.period,
        routes_agree: boyd == expanded && boyd == pp.poly,
        boyd_route: boyd.to_string(),
        expanded_route: expanded.to_string(),
        height: height_check(pp, &p.field),
        factorization: FactorizationOut {
            p_beta: f.p_beta.to_string(),
            p_beta_multiplicity: f.p_beta_multiplicity,
            others: f.others.iter().map(|g| g.to_string()).collect(),
            sigma: f.sigma(),
        },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RootOut {
    pub re: String,
    pub im: String,
    pub modulus: String,
    pub radius: f64,
}

impl From<&Root> for RootOut {
    fn from(r: &Root) -> Self {
        let prec = r.value.prec().0;
        RootOut {
            re: format_float(r.value.real(), 30),
            im: format_float(r.value.imag(), 30),
            modulus: format_float(&rug::Float::with_val(prec, r.value.abs_ref()), 30),
            radius: r.radius,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjugatesReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    /// Galois conjugates other than β.
    pub galois: Vec<RootOut>,
    pub beta_conjugates: Vec<RootOut>,
    pub quotient: String,
    pub solomyak: SolomyakReport,
}

pub fn conjugates_report(p: &Pipeline) -> Result<ConjugatesReport> {
    let cs = p.conjugates()?;
    Ok(ConjugatesReport {
        schema: SCHEMA,
        command: "conjugates",
        input: p.input_summary(),
        galois: cs
            .galois
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != cs.beta_index)
            .map(|(_, r)| RootOut::from(r))
            .collect(),
        beta_conjugates: cs.beta_conjugates.iter().map(RootOut::from).collect(),
        quotient: cs.quotient.to_string(),
        solomyak: solomyak_check(cs.others().map(|r| (r.abs(), r.radius)), 1e-9),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RouteComparison {
    pub builder: String,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GermReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub builder: String,
    pub order: usize,
    pub max_power: usize,
    pub deg_z: Option<usize>,
    pub finite: bool,
    /// `coefficients[i][n]` is the `U^n` coefficient of `c_i(U)`, in ℚ(β).
    pub coefficients: Vec<Vec<String>>,
    /// `λ_0, …, λ_{d+1}`.
    pub lambda: Vec<String>,
    pub identity: IdentityReport,
    pub other_routes: Vec<RouteComparison>,
    pub continuity: ContinuityProbe,
}

/// Compare the configured builder with every other registered one.
pub fn germ_route_comparison(p: &Pipeline) -> Result<Vec<RouteComparison>> {
    let germ = p.germ()?;
    let input = p.germ_input()?;
    Ok(germ_builders()
        .iter()
        .filter(|b| b.name() != p.cfg.germ_builder)
        .map(|b| RouteComparison {
            builder: b.name().to_string(),
            status: match b.build(&input) {
                Ok(g) if g.coeffs == germ.coeffs => "agree".into(),
                Ok(_) => "differ".into(),
                Err(e) => e.to_string(),
            },
        })
        .collect())
}

pub fn germ_identity(p: &Pipeline) -> Result<IdentityReport> {
    let builders = germ_builders();
    germ_identity_check(
        builders.get(&p.cfg.germ_builder)?,
        &p.germ_input()?,
        p.cfg.samples,
        p.cfg.radius,
        p.cfg.seed,
        p.cfg.bits,
    )
}

pub fn continuity(p: &Pipeline) -> Result<ContinuityProbe> {
    let deltas: Vec<Rational> = [100, 1000, 10000].iter().map(|&d| Rational::from((1, d))).collect();
    lambda_continuity_probe(&p.field, p.parry()?, &deltas, &[1, 2, 3])
}

pub fn germ_report(p: &Pipeline) -> Result<GermReport> {
    let germ = p.germ()?;
    let d = p.field.degree();
    Ok(GermReport {
        schema: SCHEMA,
        command: "germ",
        input: p.input_summary(),
        builder: germ.route.to_string(),
        order: germ.order,
        max_power: p.cfg.max_power,
        deg_z: germ.deg_z(),
        finite: germ.finite,
        coefficients: germ
            .coeffs
            .iter()
            .map(|c| c.coeffs().iter().map(|a| a.to_string()).collect())
            .collect(),
        lambda: lambda_exact(&p.field, p.parry()?, d + 1)?.iter().map(|l| l.to_string()).collect(),
        identity: germ_identity(p)?,
        other_routes: germ_route_comparison(p)?,
        continuity: continuity(p)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub polygon: NewtonPolygon,
    pub classes: Vec<ClassSummary>,
    pub height_identity: HeightIdentity,
    pub rational: RationalGrouping,
    pub e: usize,
    pub sigma: usize,
    pub factorization: FactorizationCrosscheck,
    pub cancellation: CancellationReport,
    pub unit: UnitRecovery,
    pub caveats: Vec<String>,
}

pub fn factorization_check(p: &Pipeline) -> Result<FactorizationCrosscheck> {
    let st = p.puiseux()?;
    Ok(factorization_crosscheck(
        &st.dec,
        &st.grouping,
        &p.factorization()?.others,
        &st.ctx,
        p.cfg.samples,
        p.cfg.radius,
        p.cfg.seed,
    ))
}

pub fn cancellation(p: &Pipeline) -> Result<CancellationReport> {
    let st = p.puiseux()?;
    Ok(cancellation_points(&st.dec, &st.ctx, &p.conjugates()?.beta_conjugates, p.cfg.seed))
}

pub fn unit_recovery(p: &Pipeline) -> Result<UnitRecovery> {
    let st = p.puiseux()?;
    Ok(product_reconstruction(&st.dec, &st.grouping, &st.ctx, 10, p.cfg.radius, p.cfg.seed))
}

pub fn puiseux_report(p: &Pipeline) -> Result<PuiseuxReport> {
    let st = p.puiseux()?;
    let mut caveats = Vec::new();
    if !st.dec.polygon.truncated_zero.is_empty() {
        caveats.push(format!(
            "coefficients of Z^{:?} vanish through U^{} and are treated as zero",
            st.dec.polygon.truncated_zero,
            p.cfg.order
        ));
    }
    if !st.grouping.undecided.is_empty() {
        caveats.push(format!("rationality undecided for classes {:?}", st.grouping.undecided));
    }
    Ok(PuiseuxReport {
        schema: SCHEMA,
        command: "puiseux",
        input: p.input_summary(),
        polygon: st.dec.polygon.clone(),
        classes: st.dec.summaries(),
        height_identity: height_identity_check(&st.dec, p.field.degree()),
        rational: st.grouping.clone(),
        e: st.grouping.e(),
        sigma: p.factorization()?.sigma(),
        factorization: factorization_check(p)?,
        cancellation: cancellation(p)?,
        unit: unit_recovery(p)?,
        caveats,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub numerator: String,
    pub denominator: String,
    pub k: usize,
    pub simple_pole_at_inverse_beta: bool,
    pub fixed_points: FixedPointTable,
    pub product: Option<ZetaProductReport>,
    pub sign_convention: &'static str,
}

pub const SIGN_NOTE: &str =
    "count(n) = sum of n-th powers of the roots of P_beta,P minus the sum over k-th roots of unity; \
     the opposite sign makes the count negative for the golden ratio at n = 1";

pub fn zeta_product(p: &Pipeline) -> Result<ZetaProductReport> {
    let st = p.puiseux()?;
    let zr = zeta_rational(p.parry()?);
    Ok(zeta_product_check(&zr, &st.dec, &st.grouping, &st.ctx, 10, p.cfg.radius, p.cfg.seed))
}

pub fn zeta_report(p: &Pipeline) -> Result<ZetaReport> {
    let zr = zeta_rational(p.parry()?);
    Ok(ZetaReport {
        schema: SCHEMA,
        command: "zeta",
        input: p.input_summary(),
        numerator: zr.numerator.to_string(),
        denominator: zr.denominator.to_string(),
        k: zr.k,
        simple_pole_at_inverse_beta: zr.simple_pole_at_inverse_beta(&p.field),
        fixed_points: fixed_point_table(&p.zeta_input()?, p.cfg.n_max)?,
        product: zeta_product(p).ok(),
        sign_convention: SIGN_NOTE,
    })
}

/// A report for a command that stopped because β is not a resolved Parry
/// number.
#[derive(Clone, Debug, Serialize)]
pub struct UnresolvedReport {
    pub schema: &'static str,
    pub command: String,
    pub input: InputSummary,
    pub classification: Classification,
    pub status: &'static str,
    pub warning: String,
}

pub fn unresolved_report(p: &Pipeline, command: &str, err: &Error) -> UnresolvedReport {
    UnresolvedReport {
        schema: SCHEMA,
        command: command.to_string(),
        input: p.input_summary(),
        classification: p.expansion.classification,
        status: "unresolved",
        warning: p.warning().unwrap_or_else(|| err.to_string()),
    }
}

/// Scatter of conjugates with the unit circle and the circle of radius
/// `(1+√5)/2`. Galois conjugates are drawn as filled dots, beta-conjugates
/// as rings.
pub fn emit_svg(sets: &[&ConjugateSet]) -> String {
    let mut extent: f64 = SOLOMYAK_BOUND;
    for cs in sets {
        for r in cs.others() {
            extent = extent.max(r.abs());
        }
    }
    let half = (extent * 1.15 * 100.0).ceil() / 100.0;
    let scale = 200.0 / half;
    let px = |x: f64| 220.0 + x * scale;
    let py = |y: f64| 220.0 - y * scale;
    let mut s = String::new();
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"440\" height=\"440\" viewBox=\"0 0 440 440\">\n");
    s.push_str("<rect width=\"440\" height=\"440\" fill=\"white\"/>\n");
    let _ = writeln!(s, "<line x1=\"0\" y1=\"220\" x2=\"440\" y2=\"220\" stroke=\"#ccc\"/>");
    let _ = writeln!(s, "<line x1=\"220\" y1=\"0\" x2=\"220\" y2=\"440\" stroke=\"#ccc\"/>");
    let _ = writeln!(
        s,
        "<circle cx=\"220\" cy=\"220\" r=\"{:.3}\" fill=\"none\" stroke=\"#888\"/>",
        scale
    );
    let _ = writeln!(
        s,
        "<circle cx=\"220\" cy=\"220\" r=\"{:.3}\" fill=\"none\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>",
        SOLOMYAK_BOUND * scale
    );
    for cs in sets {
        for (i, r) in cs.galois.iter().enumerate() {
            if i == cs.beta_index {
                continue;
            }
            let _ = writeln!(s, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#226\"/>", px(r.re()), py(r.im()));
        }
        for r in &cs.beta_conjugates {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3.5\" fill=\"none\" stroke=\"#b50\" stroke-width=\"1.5\"/>",
                px(r.re()),
                py(r.im())
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
