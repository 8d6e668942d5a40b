//! Dense real symmetric matrix kernel: cyclic Jacobi eigensolver, spectral
//! functions, weighted operator means, the Loewner order test and the
//! Hilbert–Schmidt norm.

mod dense;
mod jacobi;
mod means;
mod spd;
mod text;

pub use dense::Matrix;
pub use jacobi::{eigen_sym, EigenDecomp, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use means::{
    heinz_op, hs_norm, loewner_geq, matrix_power, spectral_apply, spectrum_bounds, weighted_arith, weighted_geo,
    Geodesic, LoewnerReport,
};
pub use spd::{SpdMatrix, SpectrumBounds, SymMatrix, DEFINITENESS_TOL, SYMMETRY_TOL};
pub use text::{parse_matrix, read_matrix_file, write_matrix, write_matrix_file};
