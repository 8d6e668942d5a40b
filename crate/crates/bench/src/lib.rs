//! Fixtures shared by the benchmarks.

use refyoung_core::harness::{gen_ordered_pair, gen_spd};
use refyoung_core::hs::HsInstance;
use refyoung_core::operator::OrderedPairInstance;
use refyoung_core::{Matrix, SpdMatrix};

/// Ordered pair with `σ(A) ⊂ [1, 2]`, `σ(B) ⊂ [3, 6]`.
pub fn ordered_pair(dim: usize) -> OrderedPairInstance {
    gen_ordered_pair(dim as u64, dim, 1.5).expect("valid generator arguments")
}

pub fn spd(dim: usize) -> SpdMatrix {
    gen_spd(100 + dim as u64, dim, 0.2, 5.0).expect("valid generator arguments")
}

/// HS instance with a fixed, non-symmetric `X`.
pub fn hs_instance(dim: usize) -> HsInstance {
    let x = Matrix::from_fn(dim, |i, j| ((3 * i + 7 * j) % 11) as f64 / 5.0 - 1.0);
    HsInstance::new(spd(dim), gen_spd(200 + dim as u64, dim, 0.2, 5.0).unwrap(), x).expect("matching dimensions")
}
