//! Refined Young inequalities with Kantorovich-constant factors.
//!
//! The crate evaluates three families of statements and checks them
//! numerically:
//!
//! * scalar chains between the weighted geometric and arithmetic means
//!   ([`scalar`]),
//! * their operator versions in the Loewner order for positive definite
//!   matrices ([`operator`]), built on a small dense symmetric kernel
//!   ([`matrix`]),
//! * Hilbert–Schmidt norm versions with an arbitrary middle factor `X`
//!   ([`hs`]).
//!
//! [`harness`] generates seeded instances, runs every check, compares scalar
//! values against an extended-precision oracle and writes slack reports.

pub mod error;
pub mod harness;
pub mod hs;
pub mod matrix;
pub mod operator;
pub mod report;
pub mod scalar;
pub mod weight;

pub use error::{Error, Result};
pub use matrix::{EigenDecomp, Matrix, SpdMatrix, SpectrumBounds, SymMatrix};
pub use report::{InequalityReport, Reading, Tolerance};
pub use scalar::{ChainResult, RefinementSeq, ScalarPair};
pub use weight::{Fraction, Weight};
