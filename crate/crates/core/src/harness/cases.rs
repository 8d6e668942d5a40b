//! Seeded instance generation.
//!
//! Instance `i` draws from its own ChaCha stream (seed, stream `i`), so the
//! values do not depend on the order in which instances are produced or
//! consumed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hs::{HsInstance, HsSign};
use crate::matrix::{Matrix, SpdMatrix, SymMatrix};
use crate::operator::OrderedPairInstance;
use crate::report::{Reading, Tolerance};
use crate::weight::Weight;

/// Weights drawn for the scalar cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NuSet {
    /// Uniform on the open interval `(0, 1)`.
    Random,
    List(Vec<f64>),
}

/// Parameters of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseSpec {
    pub seed: u64,
    /// Random scalar instances (forced edge cases come on top).
    pub count: usize,
    /// Random instances for each matrix family.
    pub matrix_count: usize,
    pub a_range: (f64, f64),
    pub h_range: (f64, f64),
    pub nu_set: NuSet,
    pub n_set: Vec<usize>,
    pub dims: Vec<usize>,
    pub gaps: Vec<f64>,
    pub matrix_nu_set: Vec<f64>,
    pub matrix_n_set: Vec<usize>,
    pub hs_t_set: Vec<usize>,
    /// Scalar instances also checked against the extended-precision oracle.
    pub oracle_count: usize,
    pub tol: Tolerance,
    /// Relative agreement required between double precision and the oracle.
    pub oracle_tol: f64,
    pub hs_sign: HsSign,
    pub reading: Reading,
}

impl Default for CaseSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            count: 10_000,
            matrix_count: 100,
            a_range: (1e-3, 1e3),
            h_range: (1e-6, 1e6),
            nu_set: NuSet::Random,
            n_set: (1..=8).collect(),
            dims: vec![1, 2, 3, 5, 8],
            gaps: vec![1.0, 1.5, 10.0],
            matrix_nu_set: vec![0.1, 0.25, 0.5, 0.7, 0.9],
            matrix_n_set: vec![1, 2, 3],
            hs_t_set: vec![1, 2, 3],
            oracle_count: 1000,
            tol: Tolerance::default(),
            oracle_tol: 1e-12,
            hs_sign: HsSign::Plus,
            reading: Reading::Proof,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::usage(format!(
            "{name} range [{lo}, {hi}] must be a nonempty positive interval"
        )));
    }
    Ok(())
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::usage(format!("{name} must not be empty")));
    }
    Ok(())
}

impl CaseSpec {
    pub fn validate(&self) -> Result<()> {
        check_range("a", self.a_range)?;
        check_range("h", self.h_range)?;
        if let NuSet::List(v) = &self.nu_set {
            nonempty("nu set", v)?;
            for &nu in v {
                Weight::new(nu)?;
            }
        }
        nonempty("n set", &self.n_set)?;
        nonempty("dims", &self.dims)?;
        nonempty("gap factors", &self.gaps)?;
        nonempty("matrix nu set", &self.matrix_nu_set)?;
        nonempty("matrix n set", &self.matrix_n_set)?;
        nonempty("HS t set", &self.hs_t_set)?;
        if self
            .n_set
            .iter()
            .chain(&self.matrix_n_set)
            .chain(&self.hs_t_set)
            .any(|&n| n == 0)
        {
            return Err(Error::usage("depths must be positive"));
        }
        if self.dims.contains(&0) {
            return Err(Error::usage("dimensions must be positive"));
        }
        for &g in &self.gaps {
            if !(g >= 1.0 && g.is_finite()) {
                return Err(Error::usage(format!("gap factor {g} must be at least 1")));
            }
        }
        for &nu in &self.matrix_nu_set {
            Weight::new(nu)?;
        }
        Ok(())
    }
}

pub(crate) fn instance_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.gen_range(lo.ln()..=hi.ln()).exp().clamp(lo, hi)
}

fn pick<T: Copy>(rng: &mut impl Rng, v: &[T]) -> T {
    v[rng.gen_range(0..v.len())]
}

/// One scalar instance `(a, b, ν, n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalarCase {
    pub id: u64,
    pub a: f64,
    pub b: f64,
    pub weight: Weight,
    pub n: usize,
    pub forced: bool,
}

/// Edge cases included in every sweep: equal arguments, endpoint and
/// half weights, every reduced dyadic weight `p/2^t` with `t <= 10` at its
/// equality depth `n = t − 1`, and ratios next to 1 and at `10^6`.
pub fn forced_scalar_cases() -> Vec<(f64, f64, Weight, usize)> {
    let w = |nu: f64| Weight::new(nu).expect("valid weight");
    let mut v = vec![
        (2.0, 2.0, w(0.3), 3),
        (0.01, 0.01, w(0.77), 8),
        (1.0, 4.0, w(0.0), 2),
        (1.0, 4.0, w(1.0), 2),
        (1.0, 4.0, w(0.5), 1),
        (3.0, 0.2, w(0.5), 5),
        (1.0, 1.0 + 1e-8, w(0.3), 4),
        (1.0, 1.0 - 1e-8, w(0.3), 4),
        (5.0, 5.0 * (1.0 + 1e-8), w(0.9), 8),
        (1.0, 1e6, w(0.3), 1),
        (1e-3, 1e3, w(0.1), 8),
        (1e6, 1.0, w(0.6), 3),
        (1.0, 4.0, w(0.3), 1),
        (1.0, 16.0, Weight::from_fraction(1, 4).expect("valid"), 1),
    ];
    for t in 2..=10u32 {
        // both extremes and one interior numerator
        let d = 1u64 << t;
        let mut nums = vec![1, d - 1, (d / 3) | 1];
        nums.dedup();
        for p in nums {
            v.push((1.0, 16.0, Weight::dyadic(p, t).expect("valid"), t as usize - 1));
            v.push((7.5, 0.3, Weight::dyadic(p, t).expect("valid"), t as usize - 1));
        }
    }
    v
}

/// Forced edge cases followed by `spec.count` random cases.
pub fn gen_scalar_cases(spec: &CaseSpec) -> Result<Vec<ScalarCase>> {
    spec.validate()?;
    let mut out: Vec<ScalarCase> = forced_scalar_cases()
        .into_iter()
        .enumerate()
        .map(|(i, (a, b, weight, n))| ScalarCase {
            id: i as u64,
            a,
            b,
            weight,
            n,
            forced: true,
        })
        .collect();
    let offset = out.len() as u64;
    for i in 0..spec.count as u64 {
        let id = offset + i;
        let mut rng = instance_rng(spec.seed, id);
        let a = log_uniform(&mut rng, spec.a_range);
        let b = a * log_uniform(&mut rng, spec.h_range);
        let nu = match &spec.nu_set {
            NuSet::Random => loop {
                let x: f64 = rng.gen();
                if x > 0.0 {
                    break x;
                }
            },
            NuSet::List(v) => pick(&mut rng, v),
        };
        let n = pick(&mut rng, &spec.n_set);
        out.push(ScalarCase {
            id,
            a,
            b,
            weight: Weight::new(nu)?,
            n,
            forced: false,
        });
    }
    Ok(out)
}

/// Product of `dim` Householder reflections with seeded directions.
pub fn random_orthogonal(rng: &mut impl Rng, dim: usize) -> Matrix {
    let mut q = Matrix::identity(dim);
    for _ in 0..dim {
        let v: Vec<f64> = loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if v.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
                break v;
            }
        };
        let norm_sq: f64 = v.iter().map(|x| x * x).sum();
        // q ← q (I − 2vvᵀ/‖v‖²)
        let qv: Vec<f64> = (0..dim).map(|i| (0..dim).map(|k| q[(i, k)] * v[k]).sum()).collect();
        q = Matrix::from_fn(dim, |i, j| q[(i, j)] - 2.0 * qv[i] * v[j] / norm_sq);
    }
    q
}

fn conjugate_diag(q: &Matrix, d: &[f64]) -> Matrix {
    let n = q.dim();
    let mut m = Matrix::from_fn(n, |i, j| (0..n).map(|k| q[(i, k)] * d[k] * q[(j, k)]).sum());
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            let s = m[(j, i)];
            m[(i, j)] = s;
        }
    }
    m
}

fn spd_from(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> Result<SpdMatrix> {
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::usage(format!(
            "eigenvalue range [{lo}, {hi}] must be positive and nonempty"
        )));
    }
    if dim == 0 {
        return Err(Error::usage("dimension must be positive"));
    }
    let q = random_orthogonal(rng, dim);
    let d: Vec<f64> = (0..dim)
        .map(|_| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
        .collect();
    SpdMatrix::new(SymMatrix::new(conjugate_diag(&q, &d))?)
}

/// `Q diag(u) Qᵀ` with `u` uniform in `[lo, hi]`.
pub fn gen_spd(seed: u64, dim: usize, lo: f64, hi: f64) -> Result<SpdMatrix> {
    spd_from(&mut ChaCha8Rng::seed_from_u64(seed), dim, lo, hi)
}

/// `σ(A) ⊂ [1, 2]` and `σ(B) ⊂ [2g, 4g]`.
///
/// Extremal eigenvalues are pinned to the interval ends that face each
/// other with probability 1/2, so touching spectra occur at `g = 1`.
pub fn gen_ordered_pair(seed: u64, dim: usize, gap: f64) -> Result<OrderedPairInstance> {
    if !(gap >= 1.0 && gap.is_finite()) {
        return Err(Error::usage(format!("gap factor {gap} must be at least 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ordered_pair_from(&mut rng, dim, gap)
}

pub(crate) fn ordered_pair_from(rng: &mut impl Rng, dim: usize, gap: f64) -> Result<OrderedPairInstance> {
    let touch = rng.gen_bool(0.5);
    let mut spectrum = |lo: f64, hi: f64, pin: f64| {
        let mut d: Vec<f64> = (0..dim).map(|_| rng.gen_range(lo..=hi)).collect();
        if touch {
            d[0] = pin;
        }
        (random_orthogonal(rng, dim), d)
    };
    let (qa, da) = spectrum(1.0, 2.0, 2.0);
    let (qb, db) = spectrum(2.0 * gap, 4.0 * gap, 2.0 * gap);
    let a = SpdMatrix::new(SymMatrix::new(conjugate_diag(&qa, &da))?)?;
    let b = SpdMatrix::new(SymMatrix::new(conjugate_diag(&qb, &db))?)?;
    OrderedPairInstance::new(a, b)
}

/// `A, B` with spectra in `[0.2, 5]` and `X` with entries in `[−1, 1]`.
pub(crate) fn hs_instance_from(rng: &mut impl Rng, dim: usize) -> Result<HsInstance> {
    let a = spd_from(rng, dim, 0.2, 5.0)?;
    let b = spd_from(rng, dim, 0.2, 5.0)?;
    let x = Matrix::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0));
    HsInstance::new(a, b, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::spectrum_bounds;

    #[test]
    fn streams_are_reproducible() {
        let spec = CaseSpec {
            count: 50,
            ..CaseSpec::default()
        };
        assert_eq!(gen_scalar_cases(&spec).unwrap(), gen_scalar_cases(&spec).unwrap());
        let other = CaseSpec {
            seed: 2,
            ..spec.clone()
        };
        assert_ne!(gen_scalar_cases(&spec).unwrap(), gen_scalar_cases(&other).unwrap());
    }

    #[test]
    fn zero_count_gives_forced_cases_only() {
        let spec = CaseSpec {
            count: 0,
            ..CaseSpec::default()
        };
        let cases = gen_scalar_cases(&spec).unwrap();
        assert_eq!(cases.len(), forced_scalar_cases().len());
        assert!(cases.iter().all(|c| c.forced));
    }

    #[test]
    fn random_cases_respect_ranges() {
        let spec = CaseSpec {
            seed: 1,
            count: 100,
            ..CaseSpec::default()
        };
        let cases = gen_scalar_cases(&spec).unwrap();
        let random: Vec<_> = cases.iter().filter(|c| !c.forced).collect();
        assert_eq!(random.len(), 100);
        for c in random {
            assert!((1e-3..=1e3).contains(&c.a));
            let h = c.b / c.a;
            assert!((1e-6 * (1.0 - 1e-12)..=1e6 * (1.0 + 1e-12)).contains(&h));
            assert!(c.weight.nu() > 0.0 && c.weight.nu() < 1.0);
            assert!((1..=8).contains(&c.n));
        }
    }

    #[test]
    fn forced_cases_cover_edges() {
        let f = forced_scalar_cases();
        assert!(f.iter().any(|c| c.0 == c.1));
        for nu in [0.0, 0.5, 1.0] {
            assert!(f.iter().any(|c| c.2.nu() == nu));
        }
        for t in 2..=10 {
            assert!(f.iter().any(|c| c.2.dyadic_exponent() == Some(t)));
        }
        assert!(f.iter().any(|c| c.1 / c.0 == 1e6));
    }

    #[test]
    fn empty_ranges_rejected() {
        let spec = CaseSpec {
            a_range: (2.0, 1.0),
            ..CaseSpec::default()
        };
        assert!(matches!(gen_scalar_cases(&spec), Err(Error::Usage(_))));
        let spec = CaseSpec {
            n_set: vec![],
            ..CaseSpec::default()
        };
        assert!(matches!(gen_scalar_cases(&spec), Err(Error::Usage(_))));
    }

    #[test]
    fn spd_examples() {
        let c = gen_spd(3, 4, 2.5, 2.5).unwrap();
        assert!((c.as_matrix() - &Matrix::identity(4).scale(2.5)).max_abs() < 1e-12);
        let one = gen_spd(3, 1, 1.0, 2.0).unwrap();
        assert!((1.0..=2.0).contains(&one.as_matrix()[(0, 0)]));
        let p = gen_spd(4, 8, 1.0, 2.0).unwrap();
        let s = spectrum_bounds(p.as_sym()).unwrap();
        assert!(s.lo >= 1.0 - 1e-12 && s.hi <= 2.0 + 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = p.as_matrix();
            let num: f64 = (0..8)
                .map(|i| (0..8).map(|j| v[i] * m[(i, j)] * v[j]).sum::<f64>())
                .sum();
            let q = num / v.iter().map(|x| x * x).sum::<f64>();
            assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&q));
        }
        assert!(gen_spd(1, 3, 2.0, 1.0).is_err());
    }

    #[test]
    fn householder_product_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=16 {
            let q = random_orthogonal(&mut rng, n);
            assert!((&(&q.transpose() * &q) - &Matrix::identity(n)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn ordered_pairs() {
        for seed in 0..20 {
            let p = gen_ordered_pair(seed, 3, 1.0).unwrap();
            assert!(p.h() >= 1.0 - 1e-12);
            let p = gen_ordered_pair(seed, 3, 10.0).unwrap();
            assert!(p.h() >= 10.0 * (1.0 - 1e-12));
        }
        assert!(matches!(gen_ordered_pair(0, 3, 0.5), Err(Error::Usage(_))));
    }
}
