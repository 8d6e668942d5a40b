//! Cyclic Jacobi eigensolver for real symmetric matrices.

use serde::Serialize;

use super::{Matrix, SymMatrix};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 30;

/// Convergence threshold on the off-diagonal Frobenius norm, relative to the
/// largest absolute entry of the input.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// `S = Q · diag(λ) · Qᵀ` with `λ` ascending and `Q` orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomp {
    vectors: Matrix,
    values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    /// `max |QᵀQ − I|`.
    pub orthogonality: f64,
    /// `max |Q diag(λ) Qᵀ − S|`.
    pub reconstruction: f64,
}

impl EigenDecomp {
    /// Assembles a decomposition from eigenpairs in any order; columns of
    /// `vectors` are the eigenvectors.
    pub(crate) fn from_pairs(vectors: Matrix, values: Vec<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        let values = order.iter().map(|&k| values[k]).collect();
        let vectors = Matrix::from_fn(n, |i, j| vectors[(i, order[j])]);
        Self { vectors, values }
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column `j` is the eigenvector of `values()[j]`.
    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `Q · diag(f(λ)) · Qᵀ`, assembled as a sum of rank-one terms so the
    /// result is exactly symmetric.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let diag: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        congruence_diag(&self.vectors, &diag)
    }

    pub fn reconstruct(&self) -> Matrix {
        self.apply(|l| l)
    }

    pub fn residuals(&self, original: &Matrix) -> Residuals {
        let q = &self.vectors;
        let qtq = &q.transpose() * q;
        let orthogonality = (&qtq - &Matrix::identity(self.dim())).max_abs();
        let reconstruction = (&self.reconstruct() - original).max_abs();
        Residuals {
            orthogonality,
            reconstruction,
        }
    }
}

/// `W · diag(d) · Wᵀ`, filled on and above the diagonal and mirrored.
pub(crate) fn congruence_diag(w: &Matrix, d: &[f64]) -> Matrix {
    let n = w.dim();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for (k, dk) in d.iter().enumerate() {
                s += w[(i, k)] * dk * w[(j, k)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Deterministic for a fixed input: rotations run in row-cyclic order and
/// each eigenvector is signed so that its largest-magnitude entry is positive.
pub fn eigen_sym(s: &SymMatrix) -> Result<EigenDecomp> {
    let mut a = s.as_matrix().clone();
    let n = a.dim();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.max_abs();

    let mut converged = off_diagonal_norm(&a) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                // negligible against both diagonal entries: drop it
                if sweeps > 4 && apq.abs() <= f64::EPSILON * 0.5 * app.abs().min(aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);

                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let new_rp = arp - sn * (arq + tau * arp);
                        let new_rq = arq + sn * (arp - tau * arq);
                        a[(r, p)] = new_rp;
                        a[(p, r)] = new_rp;
                        a[(r, q)] = new_rq;
                        a[(q, r)] = new_rq;
                    }
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - sn * (vrq + tau * vrp);
                    v[(r, q)] = vrq + sn * (vrp - tau * vrq);
                }
            }
        }
        converged = off_diagonal_norm(&a) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_diagonal_norm(&a),
        });
    }

    for j in 0..n {
        let mut pivot = 0;
        for i in 1..n {
            if v[(i, j)].abs() > v[(pivot, j)].abs() {
                pivot = i;
            }
        }
        if v[(pivot, j)] < 0.0 {
            for i in 0..n {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
    Ok(EigenDecomp::from_pairs(v, a.diagonal()))
}
