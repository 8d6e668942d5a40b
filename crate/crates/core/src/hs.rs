//! Hilbert–Schmidt norm chains with a third matrix `X`.
//!
//! With `A = U diag(λ) Uᵀ`, `B = V diag(μ) Vᵀ` and `Y = UᵀXV`, every norm in
//! these inequalities is `Σ_{ij} φ(λ_i, μ_j) y_ij²` for a scalar `φ`. The
//! checks evaluate the literal matrix expressions; the entrywise sums over
//! `Y` are carried alongside as an independent route.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{matrix_power, EigenDecomp, Matrix, SpdMatrix};
use crate::report::{InequalityReport, Reading, Tolerance};
use crate::scalar::{kantorovich_root_pow, RefinementSeq};
use crate::weight::Weight;

/// Sign of the `νXB` term in `‖(1−ν)AX ± νXB‖₂²`.
///
/// The chains hold with `Plus`. `Minus` is kept for exploring the other
/// sign, which already fails at `ν = 1/2`, `A = B = X = I`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HsSign {
    #[default]
    Plus,
    Minus,
}

impl HsSign {
    fn factor(self) -> f64 {
        match self {
            HsSign::Plus => 1.0,
            HsSign::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for HsSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(HsSign::Plus),
            "minus" => Ok(HsSign::Minus),
            _ => Err(Error::usage(format!("sign must be plus or minus, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HsInstance {
    a: SpdMatrix,
    b: SpdMatrix,
    x: Matrix,
    ea: EigenDecomp,
    eb: EigenDecomp,
    y: Matrix,
}

impl HsInstance {
    pub fn new(a: SpdMatrix, b: SpdMatrix, x: Matrix) -> Result<Self> {
        if a.dim() != b.dim() || a.dim() != x.dim() {
            return Err(Error::usage(format!(
                "dimension mismatch: A is {}, B is {}, X is {}",
                a.dim(),
                b.dim(),
                x.dim()
            )));
        }
        let ea = a.eigen()?.clone();
        let eb = b.eigen()?.clone();
        let y = &(&ea.vectors().transpose() * &x) * eb.vectors();
        Ok(Self { a, b, x, ea, eb, y })
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn a(&self) -> &SpdMatrix {
        &self.a
    }

    pub fn b(&self) -> &SpdMatrix {
        &self.b
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    /// `Y = UᵀXV`.
    pub fn y(&self) -> &Matrix {
        &self.y
    }

    pub fn lambda(&self) -> &[f64] {
        self.ea.values()
    }

    pub fn mu(&self) -> &[f64] {
        self.eb.values()
    }

    /// `Σ_{ij} φ(λ_i, μ_j) y_ij²`.
    fn entrywise(&self, phi: impl Fn(f64, f64) -> f64) -> f64 {
        let mut s = 0.0;
        for (i, &l) in self.lambda().iter().enumerate() {
            for (j, &m) in self.mu().iter().enumerate() {
                let y = self.y[(i, j)];
                s += phi(l, m) * y * y;
            }
        }
        s
    }

    /// `A^p X B^q`.
    fn sandwich(&self, p: f64, q: f64) -> Result<Matrix> {
        let ap = matrix_power(&self.a, p)?;
        let bq = matrix_power(&self.b, q)?;
        Ok(&(ap.as_matrix() * &self.x) * bq.as_matrix())
    }
}

/// Extremes of `K((μ_j/λ_i)^{1/2^{t−1}})^{r_t}` (`under`) and of the same
/// with exponent `R_t` (`over`) over all eigenvalue pairs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KtFactors {
    pub t: usize,
    pub under: f64,
    pub over: f64,
}

pub fn kt_factors(inst: &HsInstance, w: Weight, t: usize) -> Result<KtFactors> {
    let seq = RefinementSeq::new(w, t)?;
    let t = seq.depth();
    let (mut under, mut over) = (f64::INFINITY, f64::NEG_INFINITY);
    for &l in inst.lambda() {
        for &m in inst.mu() {
            let ln = (m / l).ln();
            under = under.min(kantorovich_root_pow(ln, t - 1, seq.r(t)));
            over = over.max(kantorovich_root_pow(ln, t - 1, seq.R(t)));
        }
    }
    Ok(KtFactors { t, under, over })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HsCheck {
    Chain,
    Reverse,
}

/// Values of one check. For the reverse inequality `middle` is the left
/// side, `upper` the right side and `lower` is absent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HsValues {
    pub lower: Option<f64>,
    pub middle: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HsReport {
    pub check: HsCheck,
    pub nu: f64,
    pub t: usize,
    pub dims: usize,
    pub sign_variant: HsSign,
    pub reading: Reading,
    pub factors: KtFactors,
    #[serde(flatten)]
    pub values: HsValues,
    /// The same values summed entrywise over `Y`.
    pub entrywise: HsValues,
    pub slacks: Vec<f64>,
    pub reports: Vec<InequalityReport>,
    pub pass: bool,
}

impl HsReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        check: HsCheck,
        w: Weight,
        inst: &HsInstance,
        sign: HsSign,
        reading: Reading,
        factors: KtFactors,
        values: HsValues,
        entrywise: HsValues,
        tol: Tolerance,
    ) -> Self {
        let mut reports = Vec::new();
        if let Some(lower) = values.lower {
            reports.push(InequalityReport::new(lower, values.middle, tol));
        }
        reports.push(InequalityReport::new(values.middle, values.upper, tol));
        let degenerate = w.is_endpoint();
        for r in &mut reports {
            r.degenerate = degenerate;
        }
        Self {
            check,
            nu: w.nu(),
            t: factors.t,
            dims: inst.dim(),
            sign_variant: sign,
            reading,
            factors,
            values,
            entrywise,
            slacks: reports.iter().map(|r| r.slack).collect(),
            pass: reports.iter().all(|r| r.pass),
            reports,
        }
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

/// `Σ_{k=1}^{t−1} r_k ‖A^{1−x_k}XB^{x_k} − A^{1−y_k}XB^{y_k}‖₂²` for the
/// level-`k` interval `[x_k, y_k]`, or with the exponents of `A` and `B`
/// exchanged when `swapped`. Returns the matrix route and the entrywise
/// route.
fn tail_sum(inst: &HsInstance, seq: &RefinementSeq, t: usize, swapped: bool) -> Result<(f64, f64)> {
    let (mut direct, mut entry) = (0.0, 0.0);
    for k in 1..t {
        let r = seq.r(k);
        if r == 0.0 {
            continue;
        }
        let (x, y) = (seq.left_exponent(k), seq.right_exponent(k));
        let (px, qx, py, qy) = if swapped {
            (x, 1.0 - x, y, 1.0 - y)
        } else {
            (1.0 - x, x, 1.0 - y, y)
        };
        let d = &inst.sandwich(px, qx)? - &inst.sandwich(py, qy)?;
        direct += r * d.frobenius_sq();
        entry += r * inst.entrywise(|l, m| sq(l.powf(px) * m.powf(qx) - l.powf(py) * m.powf(qy)));
    }
    Ok((direct, entry))
}

struct Common {
    seq: RefinementSeq,
    t: usize,
    factors: KtFactors,
    /// `‖A^{1−ν}XB^ν‖₂²`, both routes.
    geo: (f64, f64),
    /// `‖(1−ν)AX ± νXB‖₂²`.
    combined: (f64, f64),
    /// `‖AX − XB‖₂²`.
    gap: (f64, f64),
}

fn common(inst: &HsInstance, w: Weight, t: usize, sign: HsSign) -> Result<Common> {
    if t == 0 {
        return Err(Error::usage("t must be at least 1"));
    }
    let factors = kt_factors(inst, w, t)?;
    let seq = RefinementSeq::new(w, t)?;
    let t = seq.depth();
    let nu = w.nu();
    let s = sign.factor();
    let ax = inst.a.as_matrix() * &inst.x;
    let xb = &inst.x * inst.b.as_matrix();
    let geo = (
        inst.sandwich(1.0 - nu, nu)?.frobenius_sq(),
        inst.entrywise(|l, m| sq(l.powf(1.0 - nu) * m.powf(nu))),
    );
    let combined = (
        (&ax.scale(1.0 - nu) + &xb.scale(s * nu)).frobenius_sq(),
        inst.entrywise(|l, m| sq((1.0 - nu) * l + s * nu * m)),
    );
    let gap = ((&ax - &xb).frobenius_sq(), inst.entrywise(|l, m| sq(l - m)));
    Ok(Common {
        seq,
        t,
        factors,
        geo,
        combined,
        gap,
    })
}

/// `under·‖A^{1−ν}XB^ν‖₂² <= ‖(1−ν)AX + νXB‖₂² − r_0²‖AX − XB‖₂² − Σ_{k=1}^{t−1} r_k‖…‖₂² <= over·‖A^{1−ν}XB^ν‖₂²`.
pub fn hs_chain_check(inst: &HsInstance, w: Weight, t: usize, tol: Tolerance, sign: HsSign) -> Result<HsReport> {
    let c = common(inst, w, t, sign)?;
    let tail = tail_sum(inst, &c.seq, c.t, false)?;
    let r0sq = sq(w.r0());
    let values = |route: fn((f64, f64)) -> f64| HsValues {
        lower: Some(c.factors.under * route(c.geo)),
        middle: route(c.combined) - r0sq * route(c.gap) - route(tail),
        upper: c.factors.over * route(c.geo),
    };
    Ok(HsReport::new(
        HsCheck::Chain,
        w,
        inst,
        sign,
        Reading::Proof,
        c.factors,
        values(|p| p.0),
        values(|p| p.1),
        tol,
    ))
}

/// `‖(1−ν)AX + νXB‖₂² <= under⁻¹·‖A^{1−ν}XB^ν‖₂² + R_0²‖AX − XB‖₂² − Σ_{k=1}^{t−1} r_k‖A^{x_k}XB^{1−x_k} − A^{y_k}XB^{1−y_k}‖₂²`.
///
/// [`Reading::Displayed`] subtracts the unswapped terms of the chain, which
/// does not hold in general.
pub fn hs_reverse_check(
    inst: &HsInstance,
    w: Weight,
    t: usize,
    tol: Tolerance,
    sign: HsSign,
    reading: Reading,
) -> Result<HsReport> {
    let c = common(inst, w, t, sign)?;
    let tail = tail_sum(inst, &c.seq, c.t, reading == Reading::Proof)?;
    let big_r0sq = sq(1.0 - w.r0());
    let values = |route: fn((f64, f64)) -> f64| HsValues {
        lower: None,
        middle: route(c.combined),
        upper: route(c.geo) / c.factors.under + big_r0sq * route(c.gap) - route(tail),
    };
    Ok(HsReport::new(
        HsCheck::Reverse,
        w,
        inst,
        sign,
        reading,
        c.factors,
        values(|p| p.0),
        values(|p| p.1),
        tol,
    ))
}
