//! Exact computations in the mod-2 Steenrod algebra and its unstable modules.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2`]: bit-packed linear algebra over F₂ (rank, echelon forms, kernels).
//! - [`poly`]: weighted-graded commutative polynomial algebras over F₂.
//! - [`action`]: `Sq^k` and the Milnor primitives `Q_i` on `H*(BV)`.
//! - [`algebra`]: Adem rewriting to the admissible basis, Serre bases of
//!   `H*(K_n)`, bases of the free unstable modules `F(n)`.
//! - [`qforms`]: quadratic forms over F₂, Arf invariant, orbit census.
//! - [`eval`]: evaluation of classes of `H*(K_2)` on quadratic forms and
//!   the kernel subfunctors of `S²` they determine.
//! - [`invariants`]: Dickson algebra, `H₂`, `M₂` and norm-sequence checks.
//! - [`lannes`]: dimension bookkeeping for `T_V` of free unstable modules.
//! - [`tor`]: reduced bar complex and `Tor` over `H*(K_p)` in bounded degree.
//! - [`verify`]: the acceptance suite shared by the CLI and the test target.

pub mod action;
pub mod algebra;
pub mod error;
pub mod eval;
pub mod gf2;
pub mod invariants;
pub mod lannes;
pub mod poly;
pub mod qforms;
pub mod tor;
pub mod verify;

pub use error::{Error, Result};
