//! Earlier refinements of the Young inequality, kept as comparators for
//! tightness reporting. Each value is a bound on `a∇_ν b` (or on its square
//! for `squared_refinement`), evaluated directly with `powf`/`sqrt` so that it
//! doubles as an independent route to the chain values at small depth.

use serde::Serialize;

use super::{arith_mean, geo_mean, kantorovich, ScalarPair};
use crate::error::Result;
use crate::report::{InequalityReport, Tolerance};
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineBounds {
    /// `a∇_ν b`, the quantity being bounded.
    pub arith: f64,
    /// Kittaneh–Manasrah: `a♯_ν b + r(√a − √b)² <= a∇_ν b`.
    pub kittaneh_manasrah: f64,
    /// `(a♯_ν b)² + r²(a − b)² <= (a∇_ν b)²`.
    pub squared_refinement: f64,
    /// `K(√h)^{r'} a♯_ν b + r(√a − √b)² <= a∇_ν b`, `r' = min(2r, 1 − 2r)`.
    pub kantorovich_lower: f64,
    /// The bare factor term `K(√h)^{r'} a♯_ν b` of the previous bound.
    pub kantorovich_factor_term: f64,
    /// `a∇_ν b <= K(√h)^{−r'} a♯_ν b + R(√a − √b)²`.
    pub kantorovich_reverse: f64,
    /// `a∇_ν b <= K(√h)^{R'} a♯_ν b + r(√a − √b)²`, `R' = max(2r, 1 − 2r)`.
    pub kantorovich_reverse_max: f64,
    /// Liao–Wu lower bound (`h^{1/4}` factor, case split at `ν = 1/2`).
    pub liao_wu_lower: f64,
    /// Liao–Wu upper bound.
    pub liao_wu_upper: f64,
}

/// One baseline inequality evaluated on an instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaselineCheck {
    pub name: &'static str,
    pub report: InequalityReport,
}

pub fn baseline_bounds(p: ScalarPair, w: Weight) -> Result<BaselineBounds> {
    let (a, b) = (p.a(), p.b());
    let nu = w.nu();
    let h = p.ratio();
    let g = geo_mean(p, w);
    let arith = arith_mean(p, w);

    let r = w.r0();
    let big_r = 1.0 - r;
    let r1 = (2.0 * r).min(1.0 - 2.0 * r);
    let big_r1 = (2.0 * r).max(1.0 - 2.0 * r);
    let r2 = (2.0 * r1).min(1.0 - 2.0 * r1);

    let root_gap = (a.sqrt() - b.sqrt()).powi(2);
    let k_half = kantorovich(h.sqrt())?;
    let k_quarter = kantorovich(h.powf(0.25))?;

    let quart = (a * b).powf(0.25);
    let gap_a = (quart - a.sqrt()).powi(2);
    let gap_b = (quart - b.sqrt()).powi(2);
    let (liao_wu_lower, liao_wu_upper) = if nu <= 0.5 {
        (
            nu * root_gap + r1 * gap_a + k_quarter.powf(r2) * g,
            (1.0 - nu) * root_gap - r1 * gap_b + k_quarter.powf(-r2) * g,
        )
    } else {
        (
            (1.0 - nu) * root_gap + r1 * gap_b + k_quarter.powf(r2) * g,
            nu * root_gap - r1 * gap_a + k_quarter.powf(-r2) * g,
        )
    };

    let kantorovich_factor_term = k_half.powf(r1) * g;
    Ok(BaselineBounds {
        arith,
        kittaneh_manasrah: g + r * root_gap,
        squared_refinement: g * g + r * r * (a - b).powi(2),
        kantorovich_lower: kantorovich_factor_term + r * root_gap,
        kantorovich_factor_term,
        kantorovich_reverse: k_half.powf(-r1) * g + big_r * root_gap,
        kantorovich_reverse_max: k_half.powf(big_r1) * g + r * root_gap,
        liao_wu_lower,
        liao_wu_upper,
    })
}

impl BaselineBounds {
    pub fn check(&self, tol: Tolerance) -> Vec<BaselineCheck> {
        let a = self.arith;
        let lower = |name, bound| BaselineCheck {
            name,
            report: InequalityReport::new(bound, a, tol),
        };
        let upper = |name, bound| BaselineCheck {
            name,
            report: InequalityReport::new(a, bound, tol),
        };
        vec![
            lower("kittaneh_manasrah", self.kittaneh_manasrah),
            BaselineCheck {
                name: "squared_refinement",
                report: InequalityReport::new(self.squared_refinement, a * a, tol),
            },
            lower("kantorovich_lower", self.kantorovich_lower),
            upper("kantorovich_reverse", self.kantorovich_reverse),
            upper("kantorovich_reverse_max", self.kantorovich_reverse_max),
            lower("liao_wu_lower", self.liao_wu_lower),
            upper("liao_wu_upper", self.liao_wu_upper),
        ]
    }
}
