//! The refined Young chains and their reverses.
//!
//! Middles are evaluated through the telescoped form
//! `a∇_ν b − Σ_{k<n} r_k[…]² = (1 − f_n)·a♯_{m_n/2^n}b + f_n·a♯_{(m_n+1)/2^n}b`
//! with `f_n = 2^n ν − m_n`. Each level of the refinement replaces the
//! current interval by the half that contains `ν`, so the identity is exact
//! and avoids the big-minus-big cancellation of the direct form. The direct
//! form is still available through [`refinement_sum`].

use serde::Serialize;

use super::{arith_mean, geo_mean, heinz_mean, kantorovich_root_pow, RefinementSeq, ScalarPair};
use crate::error::{Error, Result};
use crate::report::{InequalityReport, Reading, Tolerance};
use crate::weight::Weight;

/// Ratios fed to the Kantorovich factors of a chain.
///
/// The scalar inequalities use `h = b/a` on both sides. Operator versions use a
/// global ratio taken from the spectra, which differs between the lower and
/// upper factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ratios {
    pub lower: f64,
    pub upper: f64,
}

impl Ratios {
    pub fn of(p: ScalarPair) -> Self {
        Self::uniform(p.ratio())
    }

    pub fn uniform(h: f64) -> Self {
        Self { lower: h, upper: h }
    }

    fn validate(&self) -> Result<()> {
        for h in [self.lower, self.upper] {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::domain(format!("Kantorovich ratio must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// A three-point chain `lower <= middle <= upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainResult {
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// The k-indexed refinement summands, each `r_k` times a square.
    pub terms: Vec<f64>,
    pub degenerate: bool,
}

impl ChainResult {
    /// Reports for `lower <= middle` and `middle <= upper`.
    pub fn check(&self, tol: Tolerance) -> (InequalityReport, InequalityReport) {
        (
            InequalityReport::new(self.lower, self.middle, tol).with_degenerate(self.degenerate),
            InequalityReport::new(self.middle, self.upper, tol).with_degenerate(self.degenerate),
        )
    }
}

/// `r_k (√(a♯_x b) − √(a♯_y b))²` for the level-`k` interval `[x, y]`.
fn root_term(p: ScalarPair, seq: &RefinementSeq, k: usize) -> f64 {
    let r = seq.r(k);
    if r == 0.0 {
        return 0.0;
    }
    let left = p.interpolate(seq.left_exponent(k));
    // √(right/left) = h^{2^{-k}/2}
    let e = (p.ln_ratio() * (-(k as f64 + 1.0)).exp2()).exp_m1();
    r * left * e * e
}

fn telescoped_middle(p: ScalarPair, seq: &RefinementSeq, n: usize) -> f64 {
    let f = seq.residual(n);
    let left = p.interpolate(seq.left_exponent(n));
    if f == 0.0 {
        left
    } else {
        (1.0 - f) * left + f * p.interpolate(seq.right_exponent(n))
    }
}

/// `(√a − √b)²`.
fn root_gap_sq(p: ScalarPair) -> f64 {
    let e = (0.5 * p.ln_ratio()).exp_m1();
    p.a() * e * e
}

fn check_depth(seq: &RefinementSeq, n: usize) -> Result<()> {
    if n == 0 || n > seq.depth() {
        return Err(Error::usage(format!(
            "summation depth {n} outside 1..={} of the refinement sequence",
            seq.depth()
        )));
    }
    Ok(())
}

/// `Σ_{k<n} r_k [(a^{1−m_k/2^k} b^{m_k/2^k})^{1/2} − (a^{1−(m_k+1)/2^k} b^{(m_k+1)/2^k})^{1/2}]²`
/// together with its summands.
pub fn refinement_sum(p: ScalarPair, seq: &RefinementSeq, n: usize) -> Result<(f64, Vec<f64>)> {
    check_depth(seq, n)?;
    let terms: Vec<f64> = (0..n).map(|k| root_term(p, seq, k)).collect();
    Ok((terms.iter().sum(), terms))
}

/// The same sum with the exponent roles of `a` and `b` exchanged; equal to
/// [`refinement_sum`] on `(b, a)` with the `m_k` of `ν`.
pub fn refinement_sum_swapped(p: ScalarPair, seq: &RefinementSeq, n: usize) -> Result<f64> {
    refinement_sum(p.swapped(), seq, n).map(|(total, _)| total)
}

/// `K(h^{1/2^n})^{r_n} a♯_ν b <= a∇_ν b − Σ_{k<n} … <= K(h^{1/2^n})^{R_n} a♯_ν b`.
pub fn chain_y1(p: ScalarPair, w: Weight, n: usize) -> Result<ChainResult> {
    chain_y1_with(p, w, n, Ratios::of(p))
}

/// [`chain_y1`] with explicit Kantorovich ratios.
pub fn chain_y1_with(p: ScalarPair, w: Weight, n: usize, ratios: Ratios) -> Result<ChainResult> {
    ratios.validate()?;
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let terms = (0..n).map(|k| root_term(p, &seq, k)).collect();
    let g = geo_mean(p, w);
    Ok(ChainResult {
        lower: kantorovich_root_pow(ratios.lower.ln(), n, seq.r(n)) * g,
        middle: telescoped_middle(p, &seq, n),
        upper: kantorovich_root_pow(ratios.upper.ln(), n, seq.R(n)) * g,
        terms,
        degenerate: w.is_endpoint(),
    })
}

/// `a∇_ν b <= K(h^{1/2^n})^{−r_n} a♯_ν b + (√a − √b)² − Σ_{k<n} r_k[…swapped…]²`.
pub fn reverse_y2(p: ScalarPair, w: Weight, n: usize, tol: Tolerance) -> Result<InequalityReport> {
    reverse_y2_with(p, w, n, p.ratio(), tol)
}

pub fn reverse_y2_with(p: ScalarPair, w: Weight, n: usize, ratio: f64, tol: Tolerance) -> Result<InequalityReport> {
    Ratios::uniform(ratio).validate()?;
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let swapped = refinement_sum_swapped(p, &seq, n)?;
    let rhs = kantorovich_root_pow(ratio.ln(), n, -seq.r(n)) * geo_mean(p, w) + root_gap_sq(p) - swapped;
    Ok(InequalityReport::new(arith_mean(p, w), rhs, tol).with_degenerate(w.is_endpoint()))
}

/// [`chain_y1`] on `(a², b²)`: the factor becomes `K(h^{1/2^{n−1}})` and the
/// bracketed differences lose their square roots.
pub fn chain_y3(p: ScalarPair, w: Weight, n: usize) -> Result<ChainResult> {
    chain_y1(p.squared(), w, n)
}

/// [`reverse_y2`] on `(a², b²)`.
pub fn reverse_y4(p: ScalarPair, w: Weight, n: usize, tol: Tolerance) -> Result<InequalityReport> {
    reverse_y2(p.squared(), w, n, tol)
}

/// `K(h^{1/2^{n−1}})^{r_n}(a♯_ν b)² <= (a∇_ν b)² − r_0²(a−b)² − Σ_{k=1}^{n−1} … <= K(…)^{R_n}(a♯_ν b)²`.
///
/// Since `(a∇_ν b)² − r_0²(a − b)² = a²∇_ν b² − r_0(a − b)²`, the middle
/// coincides with that of [`chain_y3`]; `terms[0]` holds `r_0²(a − b)²`.
pub fn chain_y5(p: ScalarPair, w: Weight, n: usize) -> Result<ChainResult> {
    let mut chain = chain_y3(p, w, n)?;
    let r0 = w.r0();
    let d = p.a() - p.b();
    chain.terms[0] = r0 * r0 * d * d;
    Ok(chain)
}

/// `(a∇_ν b)² <= K(h^{1/2^{n−1}})^{−r_n}(a♯_ν b)² + R_0²(a − b)² − Σ_{k=1}^{n−1} r_k[…]²`.
///
/// The bracket that the derivation produces is
/// `a^{m_k/2^k} b^{1−m_k/2^k} − a^{(m_k+1)/2^k} b^{1−(m_k+1)/2^k}` (exponent
/// roles swapped). [`Reading::Displayed`] uses the unswapped bracket of
/// [`chain_y5`], which fails in general.
pub fn reverse_y6(p: ScalarPair, w: Weight, n: usize, tol: Tolerance, reading: Reading) -> Result<InequalityReport> {
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let bracket_pair = match reading {
        Reading::Proof => p.swapped().squared(),
        Reading::Displayed => p.squared(),
    };
    let tail: f64 = (1..n).map(|k| root_term(bracket_pair, &seq, k)).sum();
    let g = geo_mean(p, w);
    let big_r0 = 1.0 - w.r0();
    let d = p.a() - p.b();
    let rhs = kantorovich_root_pow(2.0 * p.ln_ratio(), n, -seq.r(n)) * g * g + big_r0 * big_r0 * d * d - tail;
    let a = arith_mean(p, w);
    Ok(InequalityReport::new(a * a, rhs, tol).with_degenerate(w.is_endpoint()))
}

/// Heinz-mean chain
/// `K^{r_n} H_ν(a,b) <= a∇b − Σ_{k<n} r_k[H_{m_k/2^k} − 2H_{(2m_k+1)/2^{k+1}} + H_{(m_k+1)/2^k}] <= K^{R_n} H_ν(a,b)`.
pub fn heinz_chain(p: ScalarPair, w: Weight, n: usize) -> Result<ChainResult> {
    heinz_chain_with(p, w, n, Ratios::of(p))
}

/// Each Heinz bracket `H_x − 2H_{(x+y)/2} + H_y` equals the mean of the
/// root-difference squares for `(a, b)` and `(b, a)`.
fn heinz_term(p: ScalarPair, seq: &RefinementSeq, k: usize) -> f64 {
    0.5 * (root_term(p, seq, k) + root_term(p.swapped(), seq, k))
}

pub fn heinz_chain_with(p: ScalarPair, w: Weight, n: usize, ratios: Ratios) -> Result<ChainResult> {
    ratios.validate()?;
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let terms = (0..n).map(|k| heinz_term(p, &seq, k)).collect();
    let h = heinz_mean(p, w);
    Ok(ChainResult {
        lower: kantorovich_root_pow(ratios.lower.ln(), n, seq.r(n)) * h,
        middle: 0.5 * (telescoped_middle(p, &seq, n) + telescoped_middle(p.swapped(), &seq, n)),
        upper: kantorovich_root_pow(ratios.upper.ln(), n, seq.R(n)) * h,
        terms,
        degenerate: w.is_endpoint(),
    })
}

/// `a∇b <= K^{−r_n} H_ν(a,b) + (√a − √b)² − Σ_{k<n} r_k[Heinz bracket]`.
pub fn heinz_reverse(p: ScalarPair, w: Weight, n: usize, tol: Tolerance) -> Result<InequalityReport> {
    heinz_reverse_with(p, w, n, p.ratio(), tol)
}

pub fn heinz_reverse_with(p: ScalarPair, w: Weight, n: usize, ratio: f64, tol: Tolerance) -> Result<InequalityReport> {
    Ratios::uniform(ratio).validate()?;
    let seq = RefinementSeq::new(w, n)?;
    let n = seq.depth();
    let sum: f64 = (0..n).map(|k| heinz_term(p, &seq, k)).sum();
    let rhs = kantorovich_root_pow(ratio.ln(), n, -seq.r(n)) * heinz_mean(p, w) + root_gap_sq(p) - sum;
    let lhs = 0.5 * (p.a() + p.b());
    Ok(InequalityReport::new(lhs, rhs, tol).with_degenerate(w.is_endpoint()))
}

/// Equality case of the chain at a dyadic weight.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqualityReport {
    pub nu: f64,
    pub t: u32,
    pub n: usize,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// `max − min` of the three chain values.
    pub spread: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Relative tolerance for the dyadic equality case.
pub const DYADIC_EQUALITY_TOL: f64 = 1e-10;

/// For `ν = p/2^t` (reduced, `t > 1`) the chain at depth `n = t − 1`
/// collapses: `r_{t−1} = R_{t−1} = 1/2` and the remaining level is a plain
/// midpoint. Even numerators are reduced first.
pub fn dyadic_equality(p: ScalarPair, numerator: u64, t: u32, rel_tol: f64) -> Result<EqualityReport> {
    if numerator == 0 {
        return Err(Error::usage("dyadic numerator must be positive"));
    }
    let w = Weight::dyadic(numerator, t)?;
    let t = w.dyadic_exponent().expect("constructed from a power of two");
    if t < 2 {
        return Err(Error::usage(format!(
            "{numerator}/2^{t} reduces to {w}; the equality case needs a reduced denominator 2^t with t > 1"
        )));
    }
    let n = t as usize - 1;
    let chain = chain_y1(p, w, n)?;
    let hi = chain.lower.max(chain.middle).max(chain.upper);
    let lo = chain.lower.min(chain.middle).min(chain.upper);
    let threshold = rel_tol * chain.upper.abs();
    Ok(EqualityReport {
        nu: w.nu(),
        t,
        n,
        lower: chain.lower,
        middle: chain.middle,
        upper: chain.upper,
        spread: hi - lo,
        threshold,
        pass: hi - lo <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::highprec_chain_oracle;

    fn pair(a: f64, b: f64) -> ScalarPair {
        ScalarPair::new(a, b).unwrap()
    }

    fn w(nu: f64) -> Weight {
        Weight::new(nu).unwrap()
    }

    fn close(x: f64, y: f64, rel: f64) -> bool {
        (x - y).abs() <= rel * y.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn refinement_sum_examples() {
        let seq = RefinementSeq::new(w(0.3), 1).unwrap();
        let (s, terms) = refinement_sum(pair(1.0, 4.0), &seq, 1).unwrap();
        assert!(close(s, 0.3, 1e-15));
        assert_eq!(terms.len(), 1);
        assert!(close(
            refinement_sum_swapped(pair(1.0, 4.0), &seq, 1).unwrap(),
            0.3,
            1e-15
        ));
        let seq = RefinementSeq::new(w(0.37), 8).unwrap();
        for n in 1..=8 {
            assert_eq!(refinement_sum(pair(2.5, 2.5), &seq, n).unwrap().0, 0.0);
        }
        assert!(refinement_sum(pair(1.0, 2.0), &seq, 9).is_err());
        assert!(refinement_sum(pair(1.0, 2.0), &seq, 0).is_err());
    }

    #[test]
    fn chain_y1_spot_values() {
        let c = chain_y1(pair(1.0, 4.0), w(0.3), 1).unwrap();
        assert!(close(c.middle, 1.6, 1e-15));
        assert!(close(c.lower, 1.588_835_761_573_218_4, 1e-14));
        assert!(close(c.upper, 1.626_707_656_796_548, 1e-14));

        let c = chain_y1(pair(1.0, 16.0), Weight::dyadic(1, 2).unwrap(), 1).unwrap();
        for v in [c.lower, c.middle, c.upper] {
            assert!(close(v, 2.5, 1e-15), "{v}");
        }
    }

    #[test]
    fn equal_arguments_collapse() {
        let p = pair(3.0, 3.0);
        let tol = Tolerance::default();
        for n in [1, 4] {
            for c in [chain_y1(p, w(0.3), n).unwrap(), heinz_chain(p, w(0.3), n).unwrap()] {
                assert!(c.lower == 3.0 && c.middle == 3.0 && c.upper == 3.0, "{c:?}");
            }
            for c in [chain_y3(p, w(0.3), n).unwrap(), chain_y5(p, w(0.3), n).unwrap()] {
                assert!(close(c.lower, 9.0, 1e-15) && close(c.middle, 9.0, 1e-15) && close(c.upper, 9.0, 1e-15));
            }
            for r in [
                reverse_y2(p, w(0.3), n, tol).unwrap(),
                reverse_y4(p, w(0.3), n, tol).unwrap(),
                reverse_y6(p, w(0.3), n, tol, Reading::Proof).unwrap(),
                heinz_reverse(p, w(0.3), n, tol).unwrap(),
            ] {
                assert!(close(r.lhs, r.rhs, 1e-15), "{r:?}");
            }
        }
    }

    #[test]
    fn listed_instances_hold() {
        let tol = Tolerance::default();
        assert!(reverse_y2(pair(1.0, 4.0), w(0.3), 1, tol).unwrap().slack >= 0.0);
        assert!(reverse_y2(pair(1.0, 16.0), w(0.25), 2, tol).unwrap().slack >= 0.0);
        let (lo, hi) = chain_y3(pair(1.0, 2.0), w(0.3), 2).unwrap().check(tol);
        assert!(lo.pass && hi.pass);
        assert!(reverse_y4(pair(1.0, 3.0), w(0.7), 2, tol).unwrap().slack >= 0.0);
        let (lo, hi) = chain_y5(pair(1.0, 4.0), w(0.3), 2).unwrap().check(tol);
        assert!(lo.pass && hi.pass);
        assert!(
            reverse_y6(pair(1.0, 4.0), w(0.3), 1, tol, Reading::Proof)
                .unwrap()
                .slack
                >= 0.0
        );
        assert!(
            reverse_y6(pair(2.0, 5.0), w(0.6), 3, tol, Reading::Proof)
                .unwrap()
                .slack
                >= 0.0
        );
        let (lo, hi) = heinz_chain(pair(2.0, 7.0), w(0.5), 3).unwrap().check(tol);
        assert!(lo.pass && hi.pass);
        assert!(heinz_reverse(pair(2.0, 7.0), w(0.5), 1, tol).unwrap().slack >= 0.0);
        assert!(heinz_reverse(pair(1.0, 9.0), w(0.3), 2, tol).unwrap().slack >= 0.0);
    }

    #[test]
    fn telescoped_middle_matches_literal_route() {
        for (a, b, nu, n) in [
            (1.0, 4.0, 0.3, 1),
            (0.7, 5.3, 0.61, 5),
            (3.0, 0.2, 0.137, 8),
            (1.0, 2.0, 0.9, 3),
        ] {
            let p = pair(a, b);
            let seq = RefinementSeq::new(w(nu), n).unwrap();
            let literal = arith_mean(p, w(nu)) - refinement_sum(p, &seq, n).unwrap().0;
            let c = chain_y1(p, w(nu), n).unwrap();
            assert!(close(c.middle, literal, 1e-13), "{a} {b} {nu} {n}");
            assert!(close(
                c.terms.iter().sum(),
                refinement_sum(p, &seq, n).unwrap().0,
                1e-15
            ));
        }
    }

    #[test]
    fn heinz_middle_matches_literal_bracket() {
        let (p, nu, n) = (pair(0.8, 6.0), 0.3, 4);
        let seq = RefinementSeq::new(w(nu), n).unwrap();
        let h = |x: f64| 0.5 * (p.interpolate(x) + p.interpolate(1.0 - x));
        let literal: f64 = (0..n)
            .map(|k| {
                let s = (-(k as f64)).exp2();
                let x = seq.m(k) as f64 * s;
                seq.r(k) * (h(x) - 2.0 * h(x + 0.5 * s) + h(x + s))
            })
            .sum();
        let c = heinz_chain(p, w(nu), n).unwrap();
        assert!(close(c.middle, 0.5 * (p.a() + p.b()) - literal, 1e-13));
    }

    #[test]
    fn dyadic_cases() {
        let r = dyadic_equality(pair(1.0, 16.0), 1, 2, DYADIC_EQUALITY_TOL).unwrap();
        assert!(r.pass && r.n == 1 && close(r.upper, 2.5, 1e-15));
        assert!(
            dyadic_equality(pair(16.0, 1.0), 3, 2, DYADIC_EQUALITY_TOL)
                .unwrap()
                .pass
        );
        let o = highprec_chain_oracle(0.4, 7.0, 0.375, 2).unwrap();
        let r = dyadic_equality(pair(0.4, 7.0), 3, 3, DYADIC_EQUALITY_TOL).unwrap();
        assert!(r.pass && close(r.middle, o.middle, 1e-14));
        // 2/4 reduces to 1/2, which has no equality case
        assert!(dyadic_equality(pair(1.0, 2.0), 2, 2, DYADIC_EQUALITY_TOL).is_err());
        assert!(dyadic_equality(pair(1.0, 2.0), 0, 3, DYADIC_EQUALITY_TOL).is_err());
    }

    #[test]
    fn displayed_y6_fails_on_probe_instance() {
        let tol = Tolerance::default();
        let p = pair(85.9, 9.8e-5);
        assert!(reverse_y6(p, w(0.14), 8, tol, Reading::Proof).unwrap().pass);
        assert!(!reverse_y6(p, w(0.14), 8, tol, Reading::Displayed).unwrap().pass);
    }

    #[test]
    fn ratios_validated() {
        let p = pair(1.0, 2.0);
        assert!(chain_y1_with(p, w(0.3), 2, Ratios { lower: 0.0, upper: 2.0 }).is_err());
        assert!(reverse_y2_with(p, w(0.3), 2, f64::NAN, Tolerance::default()).is_err());
    }
}
