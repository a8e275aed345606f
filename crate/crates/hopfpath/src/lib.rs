//! A computer-algebra kernel for translating geometric and branched rough
//! paths, with the dual extraction actions, an Ito-Stratonovich converter,
//! a numerical RDE layer, and a bridge to the reduced regularity-structure
//! renormalization picture. Every structural identity the kernel relies on
//! is exposed as a machine-checkable property (see [`verify`]).

pub mod error;
pub mod freevec;
pub mod tree;
pub mod tensor;
pub mod forest;
pub mod translation;
pub mod bhz;
pub mod poly;
pub mod expr;
pub mod roughpath;
pub mod rde;
pub mod verify;

pub use error::{AlgebraError, ParseError, TraceError};
pub use freevec::{LinComb, LinComb2, Rational};
pub use tree::{Forest, LabeledTree};
