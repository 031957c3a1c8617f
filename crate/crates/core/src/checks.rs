//! The cross-check suite behind `verify`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parry::{height_check, parry_polynomial_boyd, parry_polynomial_expanded, solomyak_check};
use crate::puiseux::height_identity_check;
use crate::registry::{Named, Registry};
use crate::report::{
    cancellation, factorization_check, germ_identity, germ_route_comparison, unit_recovery, zeta_product,
    InputSummary, Pipeline, SCHEMA,
};
use crate::zeta::{fixed_point_table, zeta_rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    /// The measured quantity, when there is one.
    pub value: Option<f64>,
    /// The bound or tolerance it was held to.
    pub bound: Option<f64>,
    pub detail: String,
}

/// What a check found before it is labelled with its name.
pub struct Outcome {
    pub pass: bool,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub detail: String,
}

impl Outcome {
    fn exact(pass: bool, detail: String) -> Outcome {
        Outcome {
            pass,
            value: None,
            bound: None,
            detail,
        }
    }

    fn measured(pass: bool, value: f64, bound: f64, detail: String) -> Outcome {
        Outcome {
            pass,
            value: Some(value),
            bound: Some(bound),
            detail,
        }
    }
}

pub trait Check: Named + Send + Sync {
    fn run(&self, p: &Pipeline) -> Result<Outcome>;
}

struct FnCheck {
    name: &'static str,
    f: CheckFn,
}

impl Named for FnCheck {
    fn name(&self) -> &'static str {
        self.name
    }
}

impl Check for FnCheck {
    fn run(&self, p: &Pipeline) -> Result<Outcome> {
        (self.f)(p)
    }
}

fn parry_routes(p: &Pipeline) -> Result<Outcome> {
    let a = parry_polynomial_boyd(&p.expansion)?;
    let b = parry_polynomial_expanded(&p.expansion)?;
    Ok(Outcome::exact(a == b, format!("{a} | {b}")))
}

fn height(p: &Pipeline) -> Result<Outcome> {
    let h = height_check(p.parry()?, &p.field);
    Ok(Outcome::exact(
        h.pass,
        format!("H = {}, floor = {}, ceil = {}, simple = {}", h.height, h.floor_beta, h.ceil_beta, h.simple),
    ))
}

fn solomyak(p: &Pipeline) -> Result<Outcome> {
    let cs = p.conjugates()?;
    let r = solomyak_check(cs.others().map(|r| (r.abs(), r.radius)), 1e-9);
    Ok(Outcome::measured(
        r.pass,
        r.max_modulus,
        r.bound + r.tolerance,
        format!("{} violations", r.violations),
    ))
}

fn germ_identity_check(p: &Pipeline) -> Result<Outcome> {
    let r = germ_identity(p)?;
    Ok(Outcome::measured(
        r.pass,
        r.max_residual,
        r.max_bound,
        format!("{} samples, |z - 1/beta| <= {}", r.samples, r.radius),
    ))
}

fn germ_routes(p: &Pipeline) -> Result<Outcome> {
    let routes = germ_route_comparison(p)?;
    let differ: Vec<&str> = routes
        .iter()
        .filter(|r| r.status == "differ")
        .map(|r| r.builder.as_str())
        .collect();
    let detail = routes
        .iter()
        .map(|r| format!("{}: {}", r.builder, r.status))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome::exact(differ.is_empty(), detail))
}

fn height_identity(p: &Pipeline) -> Result<Outcome> {
    let h = height_identity_check(&p.puiseux()?.dec, p.field.degree());
    Ok(Outcome::exact(
        h.pass,
        format!("height {} = sum nu {} < deg {}", h.height, h.sum_nu, h.degree),
    ))
}

fn factorization(p: &Pipeline) -> Result<Outcome> {
    let r = factorization_check(p)?;
    Ok(Outcome::measured(
        r.pass,
        r.max_residual,
        r.tolerance,
        format!("e = {}, sigma = {}, paired = {}", r.e, r.sigma, r.paired),
    ))
}

fn cancellation_check(p: &Pipeline) -> Result<Outcome> {
    let r = cancellation(p)?;
    Ok(Outcome::exact(
        r.bijection,
        format!(
            "{} cancellation points, {} beta-conjugates, {} rejected",
            r.points.len(),
            r.beta_conjugates,
            r.rejected
        ),
    ))
}

fn product_reconstruction(p: &Pipeline) -> Result<Outcome> {
    let r = unit_recovery(p)?;
    Ok(Outcome::measured(
        r.pass,
        r.residual,
        r.tolerance,
        format!(
            "unit {}, |v| in [{:.3e}, {:.3e}]",
            r.matched.as_deref().unwrap_or("unmatched"),
            r.min_abs_unit,
            r.max_abs_unit
        ),
    ))
}

fn zeta_product_check(p: &Pipeline) -> Result<Outcome> {
    let r = zeta_product(p)?;
    Ok(Outcome::measured(
        r.pass,
        r.max_residual,
        r.tolerance,
        format!("zeta(0) = {}, product(0) = {}", r.zeta_at_zero, r.product_at_zero),
    ))
}

fn fixed_points(p: &Pipeline) -> Result<Outcome> {
    let t = fixed_point_table(&p.zeta_input()?, p.cfg.n_max)?;
    let counts = t
        .rows
        .iter()
        .map(|r| r.counts.last().map_or(String::new(), |c| c.1.clone()))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Outcome::exact(t.pass, format!("n = 1..{}: {counts}", t.rows.len())))
}

fn zeta_pole(p: &Pipeline) -> Result<Outcome> {
    let zr = zeta_rational(p.parry()?);
    Ok(Outcome::exact(
        zr.simple_pole_at_inverse_beta(&p.field),
        format!("({}) / ({})", zr.numerator, zr.denominator),
    ))
}

type CheckFn = fn(&Pipeline) -> Result<Outcome>;

pub fn checks() -> Registry<dyn Check> {
    let table: [(&'static str, CheckFn); 12] = [
        ("parry-routes", parry_routes),
        ("height", height),
        ("solomyak", solomyak),
        ("germ-identity", germ_identity_check),
        ("germ-routes", germ_routes),
        ("height-identity", height_identity),
        ("factorization", factorization),
        ("cancellation-points", cancellation_check),
        ("product-reconstruction", product_reconstruction),
        ("zeta-product", zeta_product_check),
        ("fixed-points", fixed_points),
        ("zeta-pole", zeta_pole),
    ];
    let mut r: Registry<dyn Check> = Registry::new("check");
    for (name, f) in table {
        r.register(Box::new(FnCheck { name, f }));
    }
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: InputSummary,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub warning: Option<String>,
}

/// Run every registered check. A check that cannot run because β is not a
/// resolved Parry number is skipped; any other error is a failure.
pub fn verify(p: &Pipeline) -> VerifyReport {
    let results: Vec<CheckResult> = checks()
        .iter()
        .map(|c| match c.run(p) {
            Ok(o) => CheckResult {
                name: c.name(),
                status: if o.pass { Status::Pass } else { Status::Fail },
                value: o.value,
                bound: o.bound,
                detail: o.detail,
            },
            Err(e) => CheckResult {
                name: c.name(),
                status: if matches!(e, Error::NotParryResolved(_)) {
                    Status::Skipped
                } else {
                    Status::Fail
                },
                value: None,
                bound: None,
                detail: e.to_string(),
            },
        })
        .collect();
    VerifyReport {
        schema: SCHEMA,
        command: "verify",
        input: p.input_summary(),
        pass: results.iter().all(|r| r.status != Status::Fail),
        checks: results,
        warning: p.warning(),
    }
}
