use serde::Serialize;

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Deepest refinement level evaluated. Past this, `h^{1/2^n}` is 1 to
/// machine precision and every further level is a no-op.
pub const DEPTH_CAP: usize = 60;

/// Clamps a requested depth to [`DEPTH_CAP`], logging when it does.
pub fn clamp_depth(n: usize) -> usize {
    if n > DEPTH_CAP {
        log::warn!("refinement depth {n} exceeds cap {DEPTH_CAP}; clamped");
        DEPTH_CAP
    } else {
        n
    }
}

/// The sequences `r_k`, `R_k = 1 − r_k` and `m_k = ⌊2^k ν⌋` for
/// `k = 0..=depth`.
///
/// All entries are exact in `f64`: `r_k` is the distance from `2^k ν` to the
/// nearest integer, and both doubling and `1 − x` for `x ∈ [1/2, 1]` are exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementSeq {
    nu: f64,
    depth: usize,
    r: Vec<f64>,
    #[serde(rename = "R")]
    big_r: Vec<f64>,
    m: Vec<u64>,
}

impl RefinementSeq {
    pub fn new(weight: Weight, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::usage("refinement depth must be at least 1"));
        }
        let depth = clamp_depth(depth);
        let nu = weight.nu();

        let mut r = Vec::with_capacity(depth + 1);
        r.push(weight.r0());
        for k in 1..=depth {
            let prev = r[k - 1];
            r.push((2.0 * prev).min(1.0 - 2.0 * prev));
        }
        let big_r = r.iter().map(|x| 1.0 - x).collect();
        let m = (0..=depth).map(|k| (nu * (k as f64).exp2()).floor() as u64).collect();

        Ok(Self { nu, depth, r, big_r, m })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn r(&self, k: usize) -> f64 {
        self.r[k]
    }

    #[allow(non_snake_case)]
    pub fn R(&self, k: usize) -> f64 {
        self.big_r[k]
    }

    pub fn m(&self, k: usize) -> u64 {
        self.m[k]
    }

    pub fn r_values(&self) -> &[f64] {
        &self.r
    }

    pub fn m_values(&self) -> &[u64] {
        &self.m
    }

    /// Left end `m_k / 2^k` of the dyadic interval containing `ν` at level `k`.
    pub fn left_exponent(&self, k: usize) -> f64 {
        self.m[k] as f64 / (k as f64).exp2()
    }

    /// Right end `(m_k + 1) / 2^k`.
    pub fn right_exponent(&self, k: usize) -> f64 {
        self.left_exponent(k) + (-(k as f64)).exp2()
    }

    /// Position of `ν` inside its level-`k` interval: `2^k ν − m_k ∈ [0, 1)`.
    pub fn residual(&self, k: usize) -> f64 {
        self.nu * (k as f64).exp2() - self.m[k] as f64
    }
}

pub fn refinement_seq(weight: Weight, depth: usize) -> Result<RefinementSeq> {
    RefinementSeq::new(weight, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nu_point_three() {
        let s = refinement_seq(Weight::new(0.3).unwrap(), 2).unwrap();
        let expect = [0.3, 0.4, 0.2];
        for (got, want) in s.r_values().iter().zip(expect) {
            assert!((got - want).abs() < 1e-15, "{got} vs {want}");
        }
        assert_eq!(s.m_values(), &[0, 0, 1]);
    }

    #[test]
    fn nu_one_half() {
        let s = refinement_seq(Weight::new(0.5).unwrap(), 2).unwrap();
        assert_eq!(s.r_values(), &[0.5, 0.0, 0.0]);
        assert_eq!(s.m_values(), &[0, 1, 2]);
    }

    #[test]
    fn quarter_reaches_one_half() {
        let s = refinement_seq(Weight::dyadic(1, 2).unwrap(), 1).unwrap();
        assert_eq!(s.r(1), 0.5);
        assert_eq!(s.R(1), 0.5);
    }

    #[test]
    fn depth_zero_is_usage_error() {
        assert!(matches!(
            refinement_seq(Weight::new(0.3).unwrap(), 0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn depth_is_clamped() {
        let s = refinement_seq(Weight::new(0.3).unwrap(), 500).unwrap();
        assert_eq!(s.depth(), DEPTH_CAP);
    }

    #[test]
    fn endpoints_vanish() {
        for nu in [0.0, 1.0] {
            let s = refinement_seq(Weight::new(nu).unwrap(), 5).unwrap();
            assert!(s.r_values().iter().all(|&r| r == 0.0));
        }
        let s = refinement_seq(Weight::new(1.0).unwrap(), 3).unwrap();
        assert_eq!(s.m_values(), &[1, 2, 4, 8]);
    }

    proptest! {
        #[test]
        fn invariants(nu in 0.0f64..=1.0, depth in 1usize..=60) {
            let s = refinement_seq(Weight::new(nu).unwrap(), depth).unwrap();
            for k in 0..=s.depth() {
                prop_assert_eq!(s.R(k), 1.0 - s.r(k));
                prop_assert!(s.m(k) <= 1u64 << k);
                if k >= 1 {
                    prop_assert!((0.0..=0.5).contains(&s.r(k)));
                    let prev = s.m(k - 1);
                    prop_assert!(s.m(k) == 2 * prev || s.m(k) == 2 * prev + 1);
                }
                // r_k is the distance from 2^k ν to the nearest integer
                let f = s.residual(k);
                prop_assert!((0.0..1.0).contains(&f) || (nu == 1.0 && f == 0.0));
                prop_assert_eq!(s.r(k), f.min(1.0 - f));
            }
        }
    }
}
