//! Numerics for weighted Fock-Sobolev spaces on ℂⁿ with weight
//! `(1+|z|)^ρ e^{-(α/2)|z|^{2ℓ}}`: Mittag-Leffler evaluation, Bergman kernels,
//! a weak decomposition of the kernel, Littlewood-Paley checks and Schatten
//! norms of small Hankel operators.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bergman;
pub mod dd;
pub mod decomposition;
pub mod error;
pub mod fock;
pub mod hankel;
pub mod lp_calculus;
pub mod mittag_leffler;
pub mod quadrature;
pub mod report;
pub mod scaled;
pub mod special;

pub use error::{Error, Result};
pub use scaled::ScaledComplex;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
