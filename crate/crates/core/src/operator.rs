//! Operator chains under the spectral gap hypothesis `M(A) <= m(B)`.
//!
//! Each inequality is tested on the assembled matrices: the difference of
//! the two sides goes through [`loewner_geq`]. A second, independent route
//! evaluates the same expressions on the spectrum `x_i` of
//! `A^{-1/2}BA^{-1/2}` (the pair `(1, x_i)` along each eigendirection);
//! under the congruence `W diag(·) Wᵀ` the minimum of those scalar
//! differences has the sign of `λ_min`, which localizes numerical loss.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{loewner_geq, Geodesic, LoewnerReport, Matrix, SpdMatrix, SpectrumBounds, SymMatrix};
use crate::report::{Reading, Tolerance};
use crate::scalar::{kantorovich_root_pow, RefinementSeq};
use crate::weight::Weight;

/// Relative slack allowed in `M(A) <= m(B)` for eigensolver rounding.
pub const HYPOTHESIS_SLACK: f64 = 1e-12;

/// A pair `A, B` with `M(A) <= m(B)`.
#[derive(Clone, Debug)]
pub struct OrderedPairInstance {
    a: SpdMatrix,
    b: SpdMatrix,
    spec_a: SpectrumBounds,
    spec_b: SpectrumBounds,
    geodesic: Geodesic,
}

impl OrderedPairInstance {
    pub fn new(a: SpdMatrix, b: SpdMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::usage(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
        }
        let spec_a = a.spectrum()?;
        let spec_b = b.spectrum()?;
        if spec_a.hi > spec_b.lo * (1.0 + HYPOTHESIS_SLACK) {
            return Err(Error::Hypothesis(format!(
                "M(A) <= m(B) fails: σ(A) ⊂ [{:e}, {:e}], σ(B) ⊂ [{:e}, {:e}]",
                spec_a.lo, spec_a.hi, spec_b.lo, spec_b.hi
            )));
        }
        let geodesic = Geodesic::new(&a, &b)?;
        Ok(Self {
            a,
            b,
            spec_a,
            spec_b,
            geodesic,
        })
    }

    pub fn a(&self) -> &SpdMatrix {
        &self.a
    }

    pub fn b(&self) -> &SpdMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn spectra(&self) -> (SpectrumBounds, SpectrumBounds) {
        (self.spec_a, self.spec_b)
    }

    /// `h = m(B)/M(A)`.
    pub fn h(&self) -> f64 {
        self.spec_b.lo / self.spec_a.hi
    }

    /// `M(B)/m(A)`, the largest point of `σ(A^{-1/2}BA^{-1/2})` can reach.
    /// Used by the upper Kantorovich factors.
    pub fn h_upper(&self) -> f64 {
        self.spec_b.hi / self.spec_a.lo
    }

    pub fn geodesic(&self) -> &Geodesic {
        &self.geodesic
    }
}

/// The arithmetic needed to evaluate the chains both on matrices and on the
/// scalar pair `(1, x)`.
trait Affine: Sized {
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }
}

impl Affine for f64 {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: f64) -> Self {
        c * self
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl Affine for Matrix {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: f64) -> Self {
        Matrix::scale(self, c)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// A model of the geodesic `s ↦ A♯_sB`.
trait Path<T: Affine> {
    fn at(&self, s: f64) -> T;

    /// `A∇_νB`.
    fn arith(&self, nu: f64) -> T {
        let (a, b) = (self.at(0.0), self.at(1.0));
        a.scale(1.0 - nu).add(&b.scale(nu))
    }

    fn heinz(&self, s: f64) -> T {
        self.at(s).add(&self.at(1.0 - s)).scale(0.5)
    }

    /// `f(x) − 2f((x+y)/2) + f(y)` for `f = A♯_·B`.
    fn bracket(&self, x: f64, y: f64) -> T {
        let mid = 0.5 * (x + y);
        self.at(x).sub(&self.at(mid).scale(2.0)).add(&self.at(y))
    }

    fn heinz_bracket(&self, x: f64, y: f64) -> T {
        let mid = 0.5 * (x + y);
        self.heinz(x).sub(&self.heinz(mid).scale(2.0)).add(&self.heinz(y))
    }
}

struct MatrixPath<'a>(&'a Geodesic);

impl Path<Matrix> for MatrixPath<'_> {
    fn at(&self, s: f64) -> Matrix {
        self.0.point(s).as_matrix().clone()
    }
}

/// The pair `(1, x)` along one eigendirection of `A^{-1/2}BA^{-1/2}`.
struct ScalarPath(f64);

impl Path<f64> for ScalarPath {
    fn at(&self, s: f64) -> f64 {
        if s == 0.0 {
            1.0
        } else {
            self.0.powf(s)
        }
    }
}

fn sum_brackets<T: Affine>(path: &impl Path<T>, seq: &RefinementSeq, n: usize, kind: BracketKind) -> T {
    let mut total = path.at(0.0).scale(0.0);
    for k in 0..n {
        let r = seq.r(k);
        if r == 0.0 {
            continue;
        }
        let (x, y) = (seq.left_exponent(k), seq.right_exponent(k));
        let term = match kind {
            BracketKind::Plain => path.bracket(x, y),
            BracketKind::Reflected => path.bracket(1.0 - x, 1.0 - y),
            BracketKind::Heinz => path.heinz_bracket(x, y),
        };
        total = total.add(&term.scale(r));
    }
    total
}

#[derive(Clone, Copy)]
enum BracketKind {
    /// `A♯_{m_k/2^k}B − 2A♯_{(2m_k+1)/2^{k+1}}B + A♯_{(m_k+1)/2^k}B`.
    Plain,
    /// The same with every exponent `s` replaced by `1 − s`.
    Reflected,
    Heinz,
}

/// `Σ_{k<n} r_k [A♯_{m_k/2^k}B − 2A♯_{(2m_k+1)/2^{k+1}}B + A♯_{(m_k+1)/2^k}B]`.
pub fn op_refinement_sum(inst: &OrderedPairInstance, w: Weight, n: usize) -> Result<SymMatrix> {
    let seq = RefinementSeq::new(w, n)?;
    let m = sum_brackets(&MatrixPath(&inst.geodesic), &seq, seq.depth(), BracketKind::Plain);
    Ok(SymMatrix::from_symmetric(m.symmetrized()))
}

/// The sides of one operator inequality `lesser <= greater`, as functions
/// of a path. Evaluated once on matrices and once per eigendirection.
trait Sides {
    fn eval<T: Affine>(&self, path: &impl Path<T>) -> (T, T);
}

/// One Loewner inequality with its congruence diagnostic.
#[derive(Clone, Debug, Serialize)]
pub struct SideReport {
    pub loewner: LoewnerReport,
    /// `min_i` of the scalar difference `greater − lesser` on `(1, x_i)`.
    pub congruence_min: f64,
    #[serde(skip)]
    pub lesser: SymMatrix,
    #[serde(skip)]
    pub greater: SymMatrix,
}

impl SideReport {
    pub fn pass(&self) -> bool {
        self.loewner.pass
    }
}

fn loewner_with(p: &SymMatrix, q: &SymMatrix, tol: Tolerance) -> Result<LoewnerReport> {
    let mut rep = loewner_geq(p, q, tol.relative)?;
    rep.pass = rep.lambda_min >= -tol.threshold(rep.scale, rep.scale);
    Ok(rep)
}

fn evaluate(inst: &OrderedPairInstance, sides: &impl Sides, tol: Tolerance) -> Result<SideReport> {
    let (lesser, greater) = sides.eval(&MatrixPath(&inst.geodesic));
    let lesser = SymMatrix::from_symmetric(lesser.symmetrized());
    let greater = SymMatrix::from_symmetric(greater.symmetrized());
    let loewner = loewner_with(&greater, &lesser, tol)?;
    let congruence_min = inst
        .geodesic
        .relative_spectrum()
        .iter()
        .map(|&x| {
            let (lo, hi) = sides.eval(&ScalarPath(x));
            hi - lo
        })
        .fold(f64::INFINITY, f64::min);
    Ok(SideReport {
        loewner,
        congruence_min,
        lesser,
        greater,
    })
}

/// Which inequality family a report covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorCheck {
    Chain,
    Reverse,
    Heinz,
    LiaoWu,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorChainReport {
    pub check: OperatorCheck,
    pub nu: f64,
    pub n: usize,
    pub h: f64,
    pub h_upper: f64,
    pub dims: usize,
    pub reading: Reading,
    /// `lower <= middle` of a chain (or the lower baseline bound).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<SideReport>,
    /// `middle <= upper` of a chain (or the upper baseline bound).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<SideReport>,
    /// `A∇B <= …` for the reverse inequalities.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reverse: Option<SideReport>,
    pub lambda_min_left: Option<f64>,
    pub lambda_min_right: Option<f64>,
    pub lambda_min_reverse: Option<f64>,
    pub pass: bool,
}

impl OperatorChainReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        check: OperatorCheck,
        inst: &OrderedPairInstance,
        w: Weight,
        n: usize,
        reading: Reading,
        left: Option<SideReport>,
        right: Option<SideReport>,
        reverse: Option<SideReport>,
    ) -> Self {
        let lm = |s: &Option<SideReport>| s.as_ref().map(|s| s.loewner.lambda_min);
        let pass = [&left, &right, &reverse]
            .iter()
            .all(|s| s.as_ref().is_none_or(SideReport::pass));
        Self {
            check,
            nu: w.nu(),
            n,
            h: inst.h(),
            h_upper: inst.h_upper(),
            dims: inst.dim(),
            reading,
            lambda_min_left: lm(&left),
            lambda_min_right: lm(&right),
            lambda_min_reverse: lm(&reverse),
            left,
            right,
            reverse,
            pass,
        }
    }

    pub fn sides(&self) -> impl Iterator<Item = (&'static str, &SideReport)> {
        [("left", &self.left), ("right", &self.right), ("reverse", &self.reverse)]
            .into_iter()
            .filter_map(|(name, s)| s.as_ref().map(|s| (name, s)))
    }
}

struct ChainLower<'a> {
    seq: &'a RefinementSeq,
    nu: f64,
    n: usize,
    factor: f64,
    heinz: bool,
}

impl ChainLower<'_> {
    fn middle<T: Affine>(&self, path: &impl Path<T>) -> T {
        if self.heinz {
            path.arith(0.5)
                .sub(&sum_brackets(path, self.seq, self.n, BracketKind::Heinz))
        } else {
            path.arith(self.nu)
                .sub(&sum_brackets(path, self.seq, self.n, BracketKind::Plain))
        }
    }

    fn mean<T: Affine>(&self, path: &impl Path<T>) -> T {
        if self.heinz {
            path.heinz(self.nu)
        } else {
            path.at(self.nu)
        }
    }
}

impl Sides for ChainLower<'_> {
    fn eval<T: Affine>(&self, path: &impl Path<T>) -> (T, T) {
        (self.mean(path).scale(self.factor), self.middle(path))
    }
}

struct ChainUpper<'a>(ChainLower<'a>);

impl Sides for ChainUpper<'_> {
    fn eval<T: Affine>(&self, path: &impl Path<T>) -> (T, T) {
        (self.0.middle(path), self.0.mean(path).scale(self.0.factor))
    }
}

struct Reverse<'a> {
    seq: &'a RefinementSeq,
    nu: f64,
    n: usize,
    factor: f64,
    kind: BracketKind,
}

impl Sides for Reverse<'_> {
    fn eval<T: Affine>(&self, path: &impl Path<T>) -> (T, T) {
        let heinz = matches!(self.kind, BracketKind::Heinz);
        let lhs = path.arith(if heinz { 0.5 } else { self.nu });
        let mean = if heinz { path.heinz(self.nu) } else { path.at(self.nu) };
        let rhs = mean
            .scale(self.factor)
            .add(&path.bracket(0.0, 1.0))
            .sub(&sum_brackets(path, self.seq, self.n, self.kind));
        (lhs, rhs)
    }
}

fn chain_sides(
    inst: &OrderedPairInstance,
    seq: &RefinementSeq,
    w: Weight,
    reading: Reading,
    heinz: bool,
    tol: Tolerance,
) -> Result<(SideReport, SideReport)> {
    let n = seq.depth();
    let upper_ratio = match reading {
        Reading::Proof => inst.h_upper(),
        Reading::Displayed => inst.h(),
    };
    let lower = ChainLower {
        seq,
        nu: w.nu(),
        n,
        factor: kantorovich_root_pow(inst.h().ln(), n, seq.r(n)),
        heinz,
    };
    let upper = ChainUpper(ChainLower {
        factor: kantorovich_root_pow(upper_ratio.ln(), n, seq.R(n)),
        ..lower
    });
    Ok((evaluate(inst, &lower, tol)?, evaluate(inst, &upper, tol)?))
}

/// `K(h^{1/2^n})^{r_n} A♯_νB <= A∇_νB − Σ_{k<n} r_k[…] <= K(h'^{1/2^n})^{R_n} A♯_νB`
/// with `h = m(B)/M(A)` and `h' = M(B)/m(A)`. [`Reading::Displayed`] uses
/// `h` on the upper side too, which does not hold in general.
pub fn op_chain_check(
    inst: &OrderedPairInstance,
    w: Weight,
    n: usize,
    tol: Tolerance,
    reading: Reading,
) -> Result<OperatorChainReport> {
    let seq = RefinementSeq::new(w, n)?;
    let (left, right) = chain_sides(inst, &seq, w, reading, false, tol)?;
    Ok(OperatorChainReport::assemble(
        OperatorCheck::Chain,
        inst,
        w,
        seq.depth(),
        reading,
        Some(left),
        Some(right),
        None,
    ))
}

/// `A∇_νB <= K(h^{1/2^n})^{−r_n} A♯_νB + (A − 2A♯B + B) − Σ_{k<n} r_k[A♯_{1−x_k}B − 2A♯_{1−μ_k}B + A♯_{1−y_k}B]`
/// for the level-`k` interval `[x_k, y_k]` with midpoint `μ_k`.
/// [`Reading::Displayed`] uses the unreflected exponents.
pub fn op_reverse_check(
    inst: &OrderedPairInstance,
    w: Weight,
    n: usize,
    tol: Tolerance,
    reading: Reading,
) -> Result<OperatorChainReport> {
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let kind = match reading {
        Reading::Proof => BracketKind::Reflected,
        Reading::Displayed => BracketKind::Plain,
    };
    let rev = Reverse {
        seq: &seq,
        nu: w.nu(),
        n,
        factor: kantorovich_root_pow(inst.h().ln(), n, -seq.r(n)),
        kind,
    };
    let reverse = evaluate(inst, &rev, tol)?;
    Ok(OperatorChainReport::assemble(
        OperatorCheck::Reverse,
        inst,
        w,
        n,
        reading,
        None,
        None,
        Some(reverse),
    ))
}

/// Heinz chain
/// `K^{r_n} H_ν(A,B) <= A∇B − Σ_{k<n} r_k[H_{x_k} − 2H_{μ_k} + H_{y_k}] <= K'^{R_n} H_ν(A,B)`
/// together with its reverse
/// `A∇B <= K^{−r_n} H_ν(A,B) + (A − 2A♯B + B) − Σ_{k<n} r_k[…]`.
pub fn op_heinz_check(
    inst: &OrderedPairInstance,
    w: Weight,
    n: usize,
    tol: Tolerance,
    reading: Reading,
) -> Result<OperatorChainReport> {
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let (left, right) = chain_sides(inst, &seq, w, reading, true, tol)?;
    let rev = Reverse {
        seq: &seq,
        nu: w.nu(),
        n,
        factor: kantorovich_root_pow(inst.h().ln(), n, -seq.r(n)),
        kind: BracketKind::Heinz,
    };
    let reverse = evaluate(inst, &rev, tol)?;
    Ok(OperatorChainReport::assemble(
        OperatorCheck::Heinz,
        inst,
        w,
        n,
        reading,
        Some(left),
        Some(right),
        Some(reverse),
    ))
}

struct LiaoWu {
    nu: f64,
    coef: f64,
    factor: f64,
    upper: bool,
}

impl Sides for LiaoWu {
    fn eval<T: Affine>(&self, path: &impl Path<T>) -> (T, T) {
        let nu = self.nu;
        let arith = path.arith(nu);
        let gap = path.bracket(0.0, 1.0);
        // A♯B − 2A♯_{1/4}B + A and A♯B − 2A♯_{3/4}B + B
        let near_a = path.bracket(0.0, 0.5);
        let near_b = path.bracket(0.5, 1.0);
        let g = path.at(nu).scale(self.factor);
        let (outer, inner) = match (nu <= 0.5, self.upper) {
            (true, false) => (nu, near_a),
            (true, true) => (1.0 - nu, near_b),
            (false, false) => (1.0 - nu, near_b),
            (false, true) => (nu, near_a),
        };
        if self.upper {
            (arith, gap.scale(outer).sub(&inner.scale(self.coef)).add(&g))
        } else {
            (gap.scale(outer).add(&inner.scale(self.coef)).add(&g), arith)
        }
    }
}

/// The four earlier bounds with the `h^{1/4}` Kantorovich factor (case
/// split at `ν = 1/2`), as a tightness comparator. With
/// [`Reading::Proof`] the coefficient is `r_1 = min(2r, 1 − 2r)` and the
/// exponent `r_2`; [`Reading::Displayed`] takes coefficient `r` and
/// exponent `r_1`, which does not hold in general.
pub fn liao_wu_baseline_check(
    inst: &OrderedPairInstance,
    w: Weight,
    tol: Tolerance,
    reading: Reading,
) -> Result<OperatorChainReport> {
    let seq = RefinementSeq::new(w, 2)?;
    let (coef, exponent) = match reading {
        Reading::Proof => (seq.r(1), seq.r(2)),
        Reading::Displayed => (seq.r(0), seq.r(1)),
    };
    let ln_h = inst.h().ln();
    let lower = LiaoWu {
        nu: w.nu(),
        coef,
        factor: kantorovich_root_pow(ln_h, 2, exponent),
        upper: false,
    };
    let upper = LiaoWu {
        factor: kantorovich_root_pow(ln_h, 2, -exponent),
        upper: true,
        ..lower
    };
    let left = evaluate(inst, &lower, tol)?;
    let right = evaluate(inst, &upper, tol)?;
    Ok(OperatorChainReport::assemble(
        OperatorCheck::LiaoWu,
        inst,
        w,
        2,
        reading,
        Some(left),
        Some(right),
        None,
    ))
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::scalar::{
        chain_y1, chain_y1_with, heinz_chain_with, heinz_reverse_with, reverse_y2_with, Ratios, ScalarPair,
    };

    fn w(nu: f64) -> Weight {
        Weight::new(nu).unwrap()
    }

    fn diag_pair(a: &[f64], b: &[f64]) -> OrderedPairInstance {
        OrderedPairInstance::new(SpdMatrix::from_diag(a).unwrap(), SpdMatrix::from_diag(b).unwrap()).unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> OrderedPairInstance {
        let mut spd = |lo: f64, hi: f64| {
            let s = Matrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let s = SymMatrix::new((&s + &s.transpose()).scale(0.5)).unwrap();
            let q = crate::matrix::eigen_sym(&s).unwrap().vectors().clone();
            let d: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
            SpdMatrix::from_matrix(crate::matrix::Matrix::from_fn(n, |i, j| {
                (0..n).map(|k| q[(i, k)] * d[k] * q[(j, k)]).sum()
            }))
            .unwrap()
        };
        let a = spd(1.0, 2.0);
        let b = spd(2.0 * gap, 4.0 * gap);
        OrderedPairInstance::new(a, b).unwrap()
    }

    fn close(x: f64, y: f64, rel: f64) -> bool {
        (x - y).abs() <= rel * x.abs().max(y.abs())
    }

    #[test]
    fn rejects_overlapping_spectra() {
        let a = SpdMatrix::from_diag(&[1.0, 3.0]).unwrap();
        let b = SpdMatrix::from_diag(&[2.0, 4.0]).unwrap();
        let err = OrderedPairInstance::new(a, b).unwrap_err();
        assert!(
            matches!(err, Error::Hypothesis(ref m) if m.contains("M(A) <= m(B)")),
            "{err}"
        );
    }

    #[test]
    fn touching_spectra_accepted() {
        let inst = diag_pair(&[1.0, 2.0], &[2.0, 3.0]);
        assert_eq!(inst.h(), 1.0);
        assert!(
            op_chain_check(&inst, w(0.3), 2, Tolerance::default(), Reading::Proof)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn refinement_sum_collapses_at_depth_one() {
        let inst = diag_pair(&[1.0, 2.0], &[4.0, 9.0]);
        let s = op_refinement_sum(&inst, w(0.3), 1).unwrap();
        let g = crate::matrix::weighted_geo(inst.a(), inst.b(), w(0.5)).unwrap();
        let expected = (&(inst.a().as_matrix() + inst.b().as_matrix()) - &g.as_matrix().scale(2.0)).scale(0.3);
        assert!((s.as_matrix() - &expected).max_abs() < 1e-14);
        let same = diag_pair(&[2.0, 2.0], &[2.0, 2.0]);
        assert_eq!(op_refinement_sum(&same, w(0.3), 3).unwrap().as_matrix().max_abs(), 0.0);
    }

    #[test]
    fn refinement_sum_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=6 {
            let inst = random_instance(&mut rng, n, 10.0);
            let s = op_refinement_sum(&inst, w(0.37), 5).unwrap();
            let rep = loewner_geq(&s, &SymMatrix::from_diag(&vec![0.0; n]), 1e-12).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn diagonal_pair_entry_slacks() {
        let inst = diag_pair(&[1.0, 2.0], &[4.0, 9.0]);
        let rep = op_chain_check(&inst, w(0.25), 1, Tolerance::default(), Reading::Proof).unwrap();
        assert!(rep.pass);
        let left = rep.left.as_ref().unwrap();
        let mid = left.greater.as_matrix();
        let low = left.lesser.as_matrix();
        // frozen from a 50-digit evaluation with h = 2 on both entries
        assert!(close(mid[(0, 0)], 1.5, 1e-14));
        assert!(close(mid[(1, 1)], 3.121_320_343_559_642_4, 1e-14));
        assert!(close(low[(0, 0)], 1.435_499_972_755_075, 1e-13));
        assert!(close(low[(1, 1)], 2.956_795_678_960_466, 1e-13));
    }

    #[test]
    fn scalar_multiple_of_identity() {
        let inst = diag_pair(&[1.0, 1.0, 1.0], &[4.0, 4.0, 4.0]);
        let rep = op_chain_check(&inst, w(0.3), 2, Tolerance::default(), Reading::Proof).unwrap();
        let c = chain_y1(ScalarPair::new(1.0, 4.0).unwrap(), w(0.3), 2).unwrap();
        let left = rep.left.as_ref().unwrap();
        let right = rep.right.as_ref().unwrap();
        for i in 0..3 {
            assert!(close(left.lesser.as_matrix()[(i, i)], c.lower, 1e-14));
            assert!(close(left.greater.as_matrix()[(i, i)], c.middle, 1e-14));
            assert!(close(right.greater.as_matrix()[(i, i)], c.upper, 1e-14));
        }
        assert!(rep.pass);
    }

    #[test]
    fn one_by_one_matches_scalar_module() {
        let tol = Tolerance::default();
        for (a, b, nu, n) in [(1.0, 4.0, 0.3, 2), (0.5, 7.0, 0.8, 4), (2.0, 2.5, 0.5, 1)] {
            let inst = diag_pair(&[a], &[b]);
            let p = ScalarPair::new(a, b).unwrap();
            let ch = op_chain_check(&inst, w(nu), n, tol, Reading::Proof).unwrap();
            let sc = chain_y1(p, w(nu), n).unwrap();
            let left = ch.left.as_ref().unwrap();
            assert!(close(left.lesser.as_matrix()[(0, 0)], sc.lower, 1e-13));
            assert!(close(left.greater.as_matrix()[(0, 0)], sc.middle, 1e-13));
            assert!(close(
                ch.right.as_ref().unwrap().greater.as_matrix()[(0, 0)],
                sc.upper,
                1e-13
            ));
            let rv = op_reverse_check(&inst, w(nu), n, tol, Reading::Proof).unwrap();
            let sr = reverse_y2_with(p, w(nu), n, b / a, tol).unwrap();
            let rev = rv.reverse.as_ref().unwrap();
            assert!(close(rev.greater.as_matrix()[(0, 0)], sr.rhs, 1e-13));
            assert_eq!(rv.pass, sr.pass);
        }
    }

    #[test]
    fn commuting_reduction_uses_global_ratios() {
        let (da, db) = ([0.8, 1.3, 2.0], [2.5, 6.0, 11.0]);
        let inst = diag_pair(&da, &db);
        let ratios = Ratios {
            lower: inst.h(),
            upper: inst.h_upper(),
        };
        let tol = Tolerance::default();
        for (nu, n) in [(0.1, 1), (0.3, 3), (0.7, 5), (0.5, 2)] {
            let ch = op_chain_check(&inst, w(nu), n, tol, Reading::Proof).unwrap();
            let hz = op_heinz_check(&inst, w(nu), n, tol, Reading::Proof).unwrap();
            let rv = op_reverse_check(&inst, w(nu), n, tol, Reading::Proof).unwrap();
            for i in 0..3 {
                let p = ScalarPair::new(da[i], db[i]).unwrap();
                let c = chain_y1_with(p, w(nu), n, ratios).unwrap();
                let l = ch.left.as_ref().unwrap();
                assert!(close(l.lesser.as_matrix()[(i, i)], c.lower, 1e-11));
                assert!(close(l.greater.as_matrix()[(i, i)], c.middle, 1e-11));
                assert!(close(
                    ch.right.as_ref().unwrap().greater.as_matrix()[(i, i)],
                    c.upper,
                    1e-11
                ));
                let hc = heinz_chain_with(p, w(nu), n, ratios).unwrap();
                let hl = hz.left.as_ref().unwrap();
                assert!(close(hl.lesser.as_matrix()[(i, i)], hc.lower, 1e-11));
                assert!(close(hl.greater.as_matrix()[(i, i)], hc.middle, 1e-11));
                let hr = heinz_reverse_with(p, w(nu), n, inst.h(), tol).unwrap();
                assert!(close(
                    hz.reverse.as_ref().unwrap().greater.as_matrix()[(i, i)],
                    hr.rhs,
                    1e-11
                ));
                let sr = reverse_y2_with(p, w(nu), n, inst.h(), tol).unwrap();
                assert!(close(
                    rv.reverse.as_ref().unwrap().greater.as_matrix()[(i, i)],
                    sr.rhs,
                    1e-11
                ));
            }
        }
    }

    #[test]
    fn random_instances_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let tol = Tolerance::default();
        for dim in 2..=8 {
            for gap in [1.0, 1.5, 10.0] {
                let inst = random_instance(&mut rng, dim, gap);
                let nu = w(rng.gen_range(0.01..0.99));
                let n = rng.gen_range(1..=8);
                for rep in [
                    op_chain_check(&inst, nu, n, tol, Reading::Proof).unwrap(),
                    op_reverse_check(&inst, nu, n, tol, Reading::Proof).unwrap(),
                    op_heinz_check(&inst, nu, n, tol, Reading::Proof).unwrap(),
                    liao_wu_baseline_check(&inst, nu, tol, Reading::Proof).unwrap(),
                ] {
                    assert!(rep.pass, "{:?} dim {dim} gap {gap}: {:?}", rep.check, rep);
                    for (_, side) in rep.sides() {
                        assert!(side.congruence_min >= -1e-9 * side.loewner.scale);
                    }
                }
            }
        }
    }

    #[test]
    fn reverse_equality_when_equal() {
        let inst = diag_pair(&[3.0, 3.0], &[3.0, 3.0]);
        let rep = op_reverse_check(&inst, w(0.3), 3, Tolerance::default(), Reading::Proof).unwrap();
        let rev = rep.reverse.as_ref().unwrap();
        assert!((rev.greater.as_matrix() - rev.lesser.as_matrix()).max_abs() < 1e-14);
        assert!(rep.pass);
    }

    #[test]
    fn heinz_at_half_reduces_to_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let inst = random_instance(&mut rng, 4, 1.5);
        let tol = Tolerance::default();
        let hz = op_heinz_check(&inst, w(0.5), 3, tol, Reading::Proof).unwrap();
        let ch = op_chain_check(&inst, w(0.5), 3, tol, Reading::Proof).unwrap();
        let (a, b) = (hz.left.unwrap(), ch.left.unwrap());
        assert!((a.lesser.as_matrix() - b.lesser.as_matrix()).max_abs() < 1e-13);
        assert!((a.greater.as_matrix() - b.greater.as_matrix()).max_abs() < 1e-13);
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let inst = random_instance(&mut rng, 3, 1.5);
        let tol = Tolerance::default();
        let base = op_chain_check(&inst, w(0.3), 3, tol, Reading::Proof).unwrap();
        for c in [1e-3, 20.0] {
            let scaled = OrderedPairInstance::new(inst.a().scale(c).unwrap(), inst.b().scale(c).unwrap()).unwrap();
            let rep = op_chain_check(&scaled, w(0.3), 3, tol, Reading::Proof).unwrap();
            assert_eq!(rep.pass, base.pass);
            let x = rep.left.as_ref().unwrap().greater.as_matrix();
            let y = base.left.as_ref().unwrap().greater.as_matrix().scale(c);
            assert!((x - &y).max_abs() <= 1e-12 * y.max_abs());
        }
    }

    #[test]
    fn liao_wu_one_by_one_matches_scalar_baseline() {
        let inst = diag_pair(&[1.0], &[4.0]);
        let b = crate::scalar::baseline_bounds(ScalarPair::new(1.0, 4.0).unwrap(), w(0.3)).unwrap();
        let rep = liao_wu_baseline_check(&inst, w(0.3), Tolerance::default(), Reading::Proof).unwrap();
        assert!(close(
            rep.left.as_ref().unwrap().lesser.as_matrix()[(0, 0)],
            b.liao_wu_lower,
            1e-13
        ));
        assert!(close(
            rep.right.as_ref().unwrap().greater.as_matrix()[(0, 0)],
            b.liao_wu_upper,
            1e-13
        ));
        assert!(rep.pass);
        assert!(
            liao_wu_baseline_check(&inst, w(0.5), Tolerance::default(), Reading::Proof)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn displayed_upper_factor_fails_on_spread_spectra() {
        let inst = diag_pair(&[1.0, 2.0], &[2.0, 40.0]);
        let rep = op_chain_check(&inst, w(0.3), 1, Tolerance::default(), Reading::Displayed).unwrap();
        assert!(!rep.right.as_ref().unwrap().pass());
        assert!(
            op_chain_check(&inst, w(0.3), 1, Tolerance::default(), Reading::Proof)
                .unwrap()
                .pass
        );
    }
}
