use std::sync::OnceLock;

use serde::Serialize;

use super::jacobi::{eigen_sym, EigenDecomp};
use super::Matrix;
use crate::error::{Error, Result};

/// Entries may differ from their transpose by at most this times the largest
/// absolute entry before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-13;

/// Eigenvalues below this fraction of the largest one reject a matrix as not
/// positive definite. There is no clamping.
pub const DEFINITENESS_TOL: f64 = 1e-13;

/// Real symmetric matrix. Stored exactly symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.dim();
        if n == 0 {
            return Err(Error::usage("empty matrix"));
        }
        if m.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        let tol = SYMMETRY_TOL * m.max_abs();
        for i in 0..n {
            for j in i + 1..n {
                let d = (m[(i, j)] - m[(j, i)]).abs();
                if d > tol {
                    return Err(Error::domain(format!(
                        "matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {d:e}"
                    )));
                }
            }
        }
        Ok(Self(m.symmetrized()))
    }

    /// Caller guarantees exact symmetry.
    pub(crate) fn from_symmetric(m: Matrix) -> Self {
        debug_assert!(m == m.transpose());
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Matrix::identity(dim))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self(Matrix::from_diag(diag))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }
}

/// Extremal eigenvalues `m(X) = min σ(X)` and `M(X) = max σ(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumBounds {
    pub lo: f64,
    pub hi: f64,
}

/// Symmetric positive definite matrix with a lazily computed, cached
/// eigendecomposition. Immutable after construction.
#[derive(Clone, Debug)]
pub struct SpdMatrix {
    base: SymMatrix,
    eigen: OnceLock<EigenDecomp>,
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

impl SpdMatrix {
    /// Validates positive definiteness; the decomposition computed for the
    /// check is kept.
    pub fn new(base: SymMatrix) -> Result<Self> {
        let eigen = eigen_sym(&base)?;
        let values = eigen.values();
        let (lo, hi) = (values[0], values[values.len() - 1]);
        if !(lo > 0.0 && lo >= DEFINITENESS_TOL * hi) {
            return Err(Error::domain(format!(
                "matrix is not positive definite: eigenvalues span [{lo:e}, {hi:e}]"
            )));
        }
        Ok(Self {
            base,
            eigen: OnceLock::from(eigen),
        })
    }

    pub fn from_matrix(m: Matrix) -> Result<Self> {
        Self::new(SymMatrix::new(m)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(SymMatrix::identity(dim)).expect("identity is positive definite")
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_diag(diag))
    }

    /// Positive definiteness is guaranteed by construction (congruence or
    /// convex combination of positive definite matrices); the decomposition
    /// is deferred until first use.
    pub(crate) fn trusted(base: SymMatrix) -> Self {
        Self {
            base,
            eigen: OnceLock::new(),
        }
    }

    /// From a known decomposition with positive eigenvalues.
    pub(crate) fn from_eigen(vectors: Matrix, values: Vec<f64>) -> Self {
        let eigen = EigenDecomp::from_pairs(vectors, values);
        let base = SymMatrix::from_symmetric(eigen.reconstruct());
        Self {
            base,
            eigen: OnceLock::from(eigen),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn as_matrix(&self) -> &Matrix {
        self.base.as_matrix()
    }

    pub fn eigen(&self) -> Result<&EigenDecomp> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let e = eigen_sym(&self.base)?;
        Ok(self.eigen.get_or_init(|| e))
    }

    pub fn spectrum(&self) -> Result<SpectrumBounds> {
        let v = self.eigen()?.values();
        Ok(SpectrumBounds {
            lo: v[0],
            hi: v[v.len() - 1],
        })
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("scale factor must be positive, got {c}")));
        }
        Ok(match self.eigen.get() {
            Some(e) => Self::from_eigen(e.vectors().clone(), e.values().iter().map(|l| c * l).collect()),
            None => Self::trusted(self.base.scale(c)),
        })
    }
}
