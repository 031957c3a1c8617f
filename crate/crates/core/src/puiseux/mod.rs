//! Newton polygon and Puiseux decomposition of the germ.

pub mod classes;
pub mod newton;
pub mod polygon;

use serde::Serialize;

use crate::arith::roots::root_finders;
use crate::error::Result;
use crate::germ::GermPolynomial;

pub use classes::{
    cancellation_points, factorization_crosscheck, product_reconstruction, rational_classes, CancellationPoint,
    CancellationReport, FactorizationCrosscheck, GermContext, RationalClass, RationalGrouping, UnitRecovery,
};
pub use newton::{group_classes, BiPoly, ClassSummary, ConjugacyClass, PuiseuxSeries};
pub use polygon::{newton_polygon, Edge, NewtonPolygon};

#[derive(Clone, Debug)]
pub struct PuiseuxConfig {
    pub bits: u32,
    pub finder: String,
    pub seed: u64,
    pub max_depth: usize,
}

impl Default for PuiseuxConfig {
    fn default() -> Self {
        PuiseuxConfig {
            bits: crate::arith::roots::DEFAULT_BITS,
            finder: "aberth".into(),
            seed: 0,
            max_depth: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PuiseuxDecomposition {
    pub polygon: NewtonPolygon,
    pub classes: Vec<ConjugacyClass>,
    /// The germ embedded in ℂ.
    pub germ: BiPoly,
    pub prec: u32,
    /// Back-substitution residual of each class representative.
    pub residuals: Vec<Option<f64>>,
}

impl PuiseuxDecomposition {
    pub fn total_nu(&self) -> usize {
        self.classes.iter().map(|c| c.nu()).sum()
    }

    pub fn summaries(&self) -> Vec<ClassSummary> {
        self.classes.iter().map(ClassSummary::from).collect()
    }
}

/// Every `Z`-root of the germ, grouped into conjugacy classes.
pub fn newton_puiseux(germ: &GermPolynomial, cfg: &PuiseuxConfig) -> Result<PuiseuxDecomposition> {
    let polygon = newton_polygon(germ)?;
    let prec = cfg.bits;
    let top = germ.deg_z().unwrap_or(0);
    let emb: Vec<_> = germ.embed(prec).into_iter().take(top + 1).collect();
    let bi = BiPoly::new(emb, germ.order, prec);
    if polygon.height == 0 {
        return Ok(PuiseuxDecomposition {
            polygon,
            classes: Vec::new(),
            germ: bi,
            prec,
            residuals: Vec::new(),
        });
    }
    let finders = root_finders();
    let ctx = newton::Ctx {
        prec,
        finder: finders.get(&cfg.finder)?,
        seed: cfg.seed,
        max_depth: cfg.max_depth,
    };
    let branches = newton::solve(&bi, false, 0, &ctx)?;
    let classes = group_classes(branches, prec)?;
    let residuals = classes
        .iter()
        .map(|c| newton::back_substitution_residual(&bi, &c.representative))
        .collect();
    Ok(PuiseuxDecomposition {
        polygon,
        classes,
        germ: bi,
        prec,
        residuals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightIdentity {
    pub height: usize,
    pub sum_nu: usize,
    pub degree: usize,
    pub pass: bool,
}

/// `h(N(G)) = Σ ν(y_i) < deg β`.
pub fn height_identity_check(dec: &PuiseuxDecomposition, degree: usize) -> HeightIdentity {
    let height = dec.polygon.height;
    let sum_nu = dec.total_nu();
    HeightIdentity {
        height,
        sum_nu,
        degree,
        pass: height == sum_nu && height < degree,
    }
}
