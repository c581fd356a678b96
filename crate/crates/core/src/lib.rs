//! Quantum 6j-symbols at the root of unity `q = exp(2πi/r)`, shadow state
//! sums for links in connected sums of `S² × S¹`, and growth rates of the
//! resulting relative Reshetikhin-Turaev and Turaev-Viro invariants.
//!
//! Values are kept as an exact quarter-turn phase times a signed real stored
//! by its logarithm, so invariants that overflow `f64` at large `r` remain
//! representable.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod invariants;
pub mod lemmas;
pub mod oracle;
pub mod qarith;
pub mod shadow;
pub mod sixj;
pub mod volume;

pub use error::{Error, TripleFailure};
pub use qarith::{qmul, qsum, Precision, QValue, RootContext};
pub use shadow::{build_shadow, GluingSpec, Port, ShadowGraph};
pub use sixj::{SixjEvaluator, Tuple6};
