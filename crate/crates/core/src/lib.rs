//! Seminorms, lattices, bornology and duality on the two-dimensional local
//! fields `K((t))` (equal characteristic) and `K{{t}}` (mixed characteristic).
//!
//! Infinite objects are kept finite by presenting integer sequences as a
//! window plus affine tails ([`SeqSpec`]) and series as finitely many
//! coefficients plus certified valuation bounds ([`Series`]).

pub mod cli;
pub mod duality;
pub mod error;
pub mod json;
pub mod oracle;
pub mod padic;
pub mod seminorm;
pub mod seqspec;
pub mod series;
pub mod submodule;

pub use duality::{dual_seminorm, functional_from_values, pairing, polar, pseudo_polar, FunctionalValues, ValueTail};
pub use error::{Error, Result};
pub use padic::PAdic;
pub use seminorm::{BallTest, SeminormSpec};
pub use seqspec::{minplus_convolve, reflect_affine, ExponentResult, Exactness, ExtInt, SeqSpec, TailSpec};
pub use series::{EqualCharSeries, FieldKind, LeftTail, MixedSeries, RightTail, Series};
pub use submodule::{Classification, Membership, SubmoduleSpec};
