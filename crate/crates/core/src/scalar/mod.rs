//! Scalar means, the Kantorovich constant and the refined Young chains.

mod baseline;
mod chains;
mod sequence;

pub use baseline::{baseline_bounds, BaselineBounds, BaselineCheck};
pub use chains::{
    chain_y1, chain_y1_with, chain_y3, chain_y5, dyadic_equality, heinz_chain, heinz_chain_with, heinz_reverse,
    heinz_reverse_with, refinement_sum, refinement_sum_swapped, reverse_y2, reverse_y2_with, reverse_y4, reverse_y6,
    ChainResult, EqualityReport, Ratios, DYADIC_EQUALITY_TOL,
};
pub use sequence::{clamp_depth, refinement_seq, RefinementSeq, DEPTH_CAP};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Two positive reals `(a, b)`; `h = b / a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarPair {
    a: f64,
    b: f64,
}

impl ScalarPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(Error::domain(format!("pair ({a}, {b}) must be finite and positive")));
        }
        Ok(Self { a, b })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `h = b / a`.
    pub fn ratio(&self) -> f64 {
        self.b / self.a
    }

    pub fn ln_ratio(&self) -> f64 {
        self.ratio().ln()
    }

    /// `(b, a)`.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    /// `(a², b²)`.
    pub fn squared(&self) -> Self {
        Self {
            a: self.a * self.a,
            b: self.b * self.b,
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.a, c * self.b)
    }

    /// `a^{1−x} b^x`, evaluated as `a · exp(x ln h)`.
    #[inline]
    pub fn interpolate(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.a;
        }
        self.a * (x * self.ln_ratio()).exp()
    }
}

/// Kantorovich constant `K(t) = (1 + t)² / (4t)`.
///
/// The second argument that usually accompanies `K(t, 2)` carries no
/// information; this is the only formula in use.
pub fn kantorovich(t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("Kantorovich constant needs t > 0, got {t}")));
    }
    let d = t - 1.0;
    Ok(1.0 + d * d / (4.0 * t))
}

/// `K(h^{1/2^halvings})^exponent` from `ln h`, avoiding the cancellation
/// in `K − 1` when the root is close to 1.
pub(crate) fn kantorovich_root_pow(ln_ratio: f64, halvings: usize, exponent: f64) -> f64 {
    if exponent == 0.0 || ln_ratio == 0.0 {
        return 1.0;
    }
    let s = ln_ratio * (-(halvings as f64)).exp2();
    // K(e^s) − 1 = sinh²(s/2)
    let excess = (0.5 * s).sinh().powi(2);
    (exponent * excess.ln_1p()).exp()
}

/// `(1 − ν) a + ν b`.
pub fn arith_mean(p: ScalarPair, w: Weight) -> f64 {
    let nu = w.nu();
    p.a + nu * (p.b - p.a)
}

/// `a^{1−ν} b^ν`.
pub fn geo_mean(p: ScalarPair, w: Weight) -> f64 {
    p.interpolate(w.nu())
}

/// `(a^{1−ν} b^ν + a^ν b^{1−ν}) / 2`.
pub fn heinz_mean(p: ScalarPair, w: Weight) -> f64 {
    heinz_at(p, w.nu())
}

pub(crate) fn heinz_at(p: ScalarPair, x: f64) -> f64 {
    0.5 * (p.interpolate(x) + p.interpolate(1.0 - x))
}
