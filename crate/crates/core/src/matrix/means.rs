//! Spectral functions and weighted operator means.

use serde::Serialize;

use super::jacobi::{congruence_diag, eigen_sym};
use super::{Matrix, SpdMatrix, SpectrumBounds, SymMatrix};
use crate::error::{Error, Result};
use crate::weight::Weight;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::usage(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `f(P) = Q · diag(f(λ)) · Qᵀ`.
pub fn spectral_apply(p: &SpdMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let e = p.eigen()?;
    let mut values = Vec::with_capacity(e.dim());
    for &l in e.values() {
        let v = f(l);
        if !v.is_finite() {
            return Err(Error::domain(format!("function undefined at eigenvalue {l:e}")));
        }
        values.push(v);
    }
    Ok(SymMatrix::from_symmetric(congruence_diag(e.vectors(), &values)))
}

/// `P^t` for real `t`.
pub fn matrix_power(p: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    if !t.is_finite() {
        return Err(Error::domain(format!("exponent must be finite, got {t}")));
    }
    if t == 0.0 {
        return Ok(SpdMatrix::identity(p.dim()));
    }
    if t == 1.0 {
        return Ok(p.clone());
    }
    let e = p.eigen()?;
    let values: Vec<f64> = e.values().iter().map(|l| l.powf(t)).collect();
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::domain(format!("power {t} over- or underflows on the spectrum")));
    }
    Ok(SpdMatrix::from_eigen(e.vectors().clone(), values))
}

/// The geodesic `t ↦ A♯_tB = A^{1/2}(A^{-1/2}BA^{-1/2})^t A^{1/2}`.
///
/// With `A^{-1/2}BA^{-1/2} = Q diag(x) Qᵀ` and `W = A^{1/2}Q`, every point is
/// `W diag(x^t) Wᵀ`, so all points (and any spectral combination of them)
/// share one factorization.
#[derive(Clone, Debug)]
pub struct Geodesic {
    a: SpdMatrix,
    b: SpdMatrix,
    w: Matrix,
    x: Vec<f64>,
}

impl Geodesic {
    pub fn new(a: &SpdMatrix, b: &SpdMatrix) -> Result<Self> {
        check_dims(a.dim(), b.dim())?;
        let ea = a.eigen()?;
        let sqrt: Vec<f64> = ea.values().iter().map(|l| l.sqrt()).collect();
        let inv_sqrt: Vec<f64> = sqrt.iter().map(|s| 1.0 / s).collect();
        let a_half = congruence_diag(ea.vectors(), &sqrt);
        let a_neg_half = congruence_diag(ea.vectors(), &inv_sqrt);
        let inner = (&(&a_neg_half * b.as_matrix()) * &a_neg_half).symmetrized();
        let ex = eigen_sym(&SymMatrix::from_symmetric(inner))?;
        if let Some(&bad) = ex.values().iter().find(|&&v| v <= 0.0 || v.is_nan()) {
            return Err(Error::domain(format!(
                "A^(-1/2) B A^(-1/2) lost definiteness (eigenvalue {bad:e})"
            )));
        }
        let w = &a_half * ex.vectors();
        Ok(Self {
            a: a.clone(),
            b: b.clone(),
            w,
            x: ex.values().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Ascending spectrum of `A^{-1/2}BA^{-1/2}`.
    pub fn relative_spectrum(&self) -> &[f64] {
        &self.x
    }

    /// `A♯_tB`; the endpoints return the inputs unchanged.
    pub fn point(&self, t: f64) -> SpdMatrix {
        if t == 0.0 {
            return self.a.clone();
        }
        if t == 1.0 {
            return self.b.clone();
        }
        let d: Vec<f64> = self.x.iter().map(|x| x.powf(t)).collect();
        SpdMatrix::trusted(SymMatrix::from_symmetric(congruence_diag(&self.w, &d)))
    }

    /// `W diag(f(x)) Wᵀ`, e.g. `f(x) = x^s − 2x^m + x^u` for a combination
    /// of geodesic points evaluated without cancellation between matrices.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let d: Vec<f64> = self.x.iter().map(|&x| f(x)).collect();
        SymMatrix::from_symmetric(congruence_diag(&self.w, &d))
    }
}

/// `A♯_νB`.
pub fn weighted_geo(a: &SpdMatrix, b: &SpdMatrix, w: Weight) -> Result<SpdMatrix> {
    check_dims(a.dim(), b.dim())?;
    match w.nu() {
        0.0 => Ok(a.clone()),
        1.0 => Ok(b.clone()),
        nu => Ok(Geodesic::new(a, b)?.point(nu)),
    }
}

/// `A∇_νB = (1−ν)A + νB`.
pub fn weighted_arith(a: &SpdMatrix, b: &SpdMatrix, w: Weight) -> Result<SpdMatrix> {
    check_dims(a.dim(), b.dim())?;
    let nu = w.nu();
    let m = &a.as_matrix().scale(1.0 - nu) + &b.as_matrix().scale(nu);
    Ok(SpdMatrix::trusted(SymMatrix::from_symmetric(m)))
}

/// `H_ν(A,B) = (A♯_νB + A♯_{1−ν}B)/2`.
pub fn heinz_op(a: &SpdMatrix, b: &SpdMatrix, w: Weight) -> Result<SymMatrix> {
    check_dims(a.dim(), b.dim())?;
    let nu = w.nu();
    let g = Geodesic::new(a, b)?;
    let sum = g.point(nu).as_matrix() + g.point(1.0 - nu).as_matrix();
    Ok(SymMatrix::from_symmetric(sum.scale(0.5)))
}

/// Outcome of a Loewner order test `P ≥ Q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoewnerReport {
    /// Smallest eigenvalue of `P − Q`.
    pub lambda_min: f64,
    /// Largest absolute entry of either operand.
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
}

impl LoewnerReport {
    /// `λ_min / scale`, or `λ_min` when both operands vanish.
    pub fn relative_margin(&self) -> f64 {
        if self.scale > 0.0 {
            self.lambda_min / self.scale
        } else {
            self.lambda_min
        }
    }
}

/// Tests `P ≥ Q`: passes when `λ_min(P − Q) ≥ −tol · max(maxabs P, maxabs Q)`.
pub fn loewner_geq(p: &SymMatrix, q: &SymMatrix, tol: f64) -> Result<LoewnerReport> {
    check_dims(p.dim(), q.dim())?;
    let diff = SymMatrix::from_symmetric(p.as_matrix() - q.as_matrix());
    let lambda_min = eigen_sym(&diff)?.values()[0];
    let scale = p.as_matrix().max_abs().max(q.as_matrix().max_abs());
    Ok(LoewnerReport {
        lambda_min,
        scale,
        tol,
        pass: lambda_min >= -tol * scale,
    })
}

pub fn spectrum_bounds(p: &SymMatrix) -> Result<SpectrumBounds> {
    let e = eigen_sym(p)?;
    let v = e.values();
    Ok(SpectrumBounds {
        lo: v[0],
        hi: v[v.len() - 1],
    })
}

/// Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(m: &Matrix) -> f64 {
    m.frobenius()
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn w(nu: f64) -> Weight {
        Weight::new(nu).unwrap()
    }

    fn diag(d: &[f64]) -> SpdMatrix {
        SpdMatrix::from_diag(d).unwrap()
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let s = Matrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let s = SymMatrix::new((&s + &s.transpose()).scale(0.5)).unwrap();
        eigen_sym(&s).unwrap().vectors().clone()
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> SpdMatrix {
        let q = random_orthogonal(rng, n);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        SpdMatrix::from_matrix(congruence_diag(&q, &d)).unwrap()
    }

    fn rel_err(x: &Matrix, y: &Matrix) -> f64 {
        (x - y).max_abs() / y.max_abs()
    }

    #[test]
    fn spectral_apply_examples() {
        let p = diag(&[2.0, 3.0]);
        assert_eq!(
            spectral_apply(&p, |x| x * x).unwrap().as_matrix(),
            &Matrix::from_diag(&[4.0, 9.0])
        );
        assert_eq!(
            spectral_apply(&p, |x| x.powf(0.0)).unwrap().as_matrix(),
            &Matrix::identity(2)
        );
        assert_eq!(spectral_apply(&p, |x| x).unwrap().as_matrix(), p.as_matrix());
        assert!(matches!(spectral_apply(&p, |x| (x - 2.0).ln()), Err(Error::Domain(_))));
    }

    #[test]
    fn power_examples() {
        let p = diag(&[4.0, 9.0]);
        assert_eq!(
            matrix_power(&p, 0.5).unwrap().as_matrix(),
            &Matrix::from_diag(&[2.0, 3.0])
        );
        assert_eq!(matrix_power(&p, 0.0).unwrap().as_matrix(), &Matrix::identity(2));
        assert_eq!(matrix_power(&p, 1.0).unwrap(), p);
    }

    #[test]
    fn power_inverse_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let p = random_spd(&mut rng, n, 0.5, 4.0);
            let q = matrix_power(&matrix_power(&p, 0.3).unwrap(), 1.0 / 0.3).unwrap();
            assert!(rel_err(q.as_matrix(), p.as_matrix()) < 1e-10);
            let prod = matrix_power(&p, 0.7).unwrap().as_matrix() * matrix_power(&p, -0.7).unwrap().as_matrix();
            assert!((&prod - &Matrix::identity(n)).max_abs() < 1e-11);
        }
    }

    #[test]
    fn power_group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let n = rng.gen_range(1..=6);
            let p = random_spd(&mut rng, n, 0.2, 5.0);
            let (s, t) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let lhs = matrix_power(&p, s).unwrap().as_matrix() * matrix_power(&p, t).unwrap().as_matrix();
            let rhs = matrix_power(&p, s + t).unwrap();
            assert!(rel_err(&lhs, rhs.as_matrix()) < 1e-10);
        }
    }

    #[test]
    fn geo_commuting_and_idempotent() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[4.0, 9.0]);
        let g = weighted_geo(&a, &b, w(0.5)).unwrap();
        let expected = Matrix::from_diag(&[2.0, 18f64.sqrt()]);
        assert!(rel_err(g.as_matrix(), &expected) < 1e-15);
        assert_eq!(weighted_geo(&a, &b, w(0.0)).unwrap(), a);
        assert_eq!(weighted_geo(&a, &b, w(1.0)).unwrap(), b);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = random_spd(&mut rng, 4, 1.0, 3.0);
        for nu in [0.1, 0.5, 0.9] {
            assert!(rel_err(weighted_geo(&p, &p, w(nu)).unwrap().as_matrix(), p.as_matrix()) < 1e-13);
        }
    }

    #[test]
    fn commuting_means_match_scalar() {
        let (da, db) = ([0.3, 1.7, 25.0], [2.2, 0.05, 25.0]);
        let (a, b) = (diag(&da), diag(&db));
        for nu in [0.1, 0.25, 0.5, 0.7] {
            let geo = weighted_geo(&a, &b, w(nu)).unwrap();
            let ari = weighted_arith(&a, &b, w(nu)).unwrap();
            let hz = heinz_op(&a, &b, w(nu)).unwrap();
            for i in 0..3 {
                let g = da[i].powf(1.0 - nu) * db[i].powf(nu);
                let h = (g + da[i].powf(nu) * db[i].powf(1.0 - nu)) / 2.0;
                let ar = (1.0 - nu) * da[i] + nu * db[i];
                assert!((geo.as_matrix()[(i, i)] - g).abs() <= 1e-13 * g);
                assert!((hz.as_matrix()[(i, i)] - h).abs() <= 1e-13 * h);
                assert!((ari.as_matrix()[(i, i)] - ar).abs() <= 1e-13 * ar);
            }
        }
    }

    #[test]
    fn riccati_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for n in [1, 2, 3, 5, 8] {
            let a = random_spd(&mut rng, n, 0.5, 3.0);
            let b = random_spd(&mut rng, n, 0.5, 3.0);
            let x = weighted_geo(&a, &b, w(0.5)).unwrap();
            let a_inv = matrix_power(&a, -1.0).unwrap();
            let r = &(x.as_matrix() * a_inv.as_matrix()) * x.as_matrix();
            assert!(rel_err(&r, b.as_matrix()) < 1e-9);
        }
    }

    #[test]
    fn geo_congruence_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = random_spd(&mut rng, 5, 0.5, 3.0);
        let b = random_spd(&mut rng, 5, 0.5, 3.0);
        for c in [1e-3, 0.5, 7.0, 1e4] {
            let lhs = weighted_geo(&a.scale(c).unwrap(), &b.scale(c).unwrap(), w(0.3)).unwrap();
            let rhs = weighted_geo(&a, &b, w(0.3)).unwrap().as_matrix().scale(c);
            assert!(rel_err(lhs.as_matrix(), &rhs) < 1e-12);
        }
    }

    #[test]
    fn heinz_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let a = random_spd(&mut rng, 4, 0.5, 3.0);
        let b = random_spd(&mut rng, 4, 0.5, 3.0);
        let h1 = heinz_op(&a, &b, w(0.2)).unwrap();
        let h2 = heinz_op(&a, &b, w(0.8)).unwrap();
        assert!(rel_err(h1.as_matrix(), h2.as_matrix()) < 1e-14);
        let mid = heinz_op(&a, &b, w(0.5)).unwrap();
        assert!(rel_err(mid.as_matrix(), weighted_geo(&a, &b, w(0.5)).unwrap().as_matrix()) < 1e-14);
        assert!(rel_err(heinz_op(&a, &a, w(0.2)).unwrap().as_matrix(), a.as_matrix()) < 1e-13);
    }

    #[test]
    fn arith_examples() {
        let a = diag(&[1.0, 2.0]);
        let b = diag(&[4.0, 9.0]);
        assert_eq!(weighted_arith(&a, &b, w(0.0)).unwrap().as_matrix(), a.as_matrix());
        assert_eq!(weighted_arith(&a, &a, w(0.4)).unwrap().as_matrix(), a.as_matrix());
        assert!(weighted_arith(&a, &diag(&[1.0]), w(0.4)).is_err());
    }

    #[test]
    fn arith_dominates_geo_for_ordered_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
            let a = random_spd(&mut rng, n, 1.0, 2.0);
            let b = random_spd(&mut rng, n, 2.0, 6.0);
            let nu = w(rng.gen_range(0.0..1.0));
            let ari = weighted_arith(&a, &b, nu).unwrap();
            let geo = weighted_geo(&a, &b, nu).unwrap();
            assert!(loewner_geq(ari.as_sym(), geo.as_sym(), 1e-12).unwrap().pass);
        }
    }

    #[test]
    fn loewner_examples() {
        let s = |d: &[f64]| SymMatrix::from_diag(d);
        let r = loewner_geq(&s(&[1.0, 2.0]), &s(&[1.0, 2.0]), 1e-12).unwrap();
        assert!(r.pass && r.lambda_min == 0.0);
        let r = loewner_geq(&s(&[2.0, 2.0]), &s(&[1.0, 1.0]), 1e-12).unwrap();
        assert!(r.pass && r.lambda_min == 1.0);
        let r = loewner_geq(&s(&[1.0, 3.0]), &s(&[2.0, 2.0]), 1e-12).unwrap();
        assert!(!r.pass && r.lambda_min == -1.0);
        assert_eq!(r.scale, 3.0);
    }

    #[test]
    fn spectrum_brackets_rayleigh_quotients() {
        assert_eq!(
            spectrum_bounds(&SymMatrix::from_diag(&[1.0, 5.0])).unwrap(),
            SpectrumBounds { lo: 1.0, hi: 5.0 }
        );
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for n in 1..=8 {
            let p = random_spd(&mut rng, n, 0.1, 10.0);
            let b = spectrum_bounds(p.as_sym()).unwrap();
            for _ in 0..200 {
                let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let m = p.as_matrix();
                let num: f64 = (0..n)
                    .map(|i| (0..n).map(|j| v[i] * m[(i, j)] * v[j]).sum::<f64>())
                    .sum();
                let den: f64 = v.iter().map(|x| x * x).sum();
                let q = num / den;
                assert!(q >= b.lo * (1.0 - 1e-12) && q <= b.hi * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn hs_norm_examples_and_invariance() {
        assert!((hs_norm(&Matrix::identity(3)) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(hs_norm(&Matrix::zeros(4)), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for n in 1..=8 {
            let m = Matrix::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
            let u = random_orthogonal(&mut rng, n);
            let v = random_orthogonal(&mut rng, n);
            let rotated = &(&u * &m) * &v.transpose();
            assert!((hs_norm(&rotated) - hs_norm(&m)).abs() <= 1e-12 * hs_norm(&m));
        }
    }

    #[test]
    fn geodesic_apply_matches_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let a = random_spd(&mut rng, 4, 1.0, 2.0);
        let b = random_spd(&mut rng, 4, 2.0, 5.0);
        let g = Geodesic::new(&a, &b).unwrap();
        let combo = g.apply(|x| x.powf(0.25) - 2.0 * x.powf(0.375) + x.powf(0.5));
        let direct = &(g.point(0.25).as_matrix() - &g.point(0.375).as_matrix().scale(2.0)) + g.point(0.5).as_matrix();
        assert!((combo.as_matrix() - &direct).max_abs() < 1e-13);
    }
}
