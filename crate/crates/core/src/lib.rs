//! Computational companion to the density version of Waring's problem:
//! k-th power residues, the constant `Z_k`, the local Waring-pair problem,
//! circle-method exponential sums and the transference pipeline, all at
//! desk scale with exact or certified arithmetic where possible.

pub mod arith;
pub mod circle;
pub mod convolution;
pub mod error;
pub mod harness;
pub mod local;
pub mod residue;
pub mod residue_set;
pub mod transference;
pub mod zk;

pub use error::{Error, Result};
pub use residue::{build_k_context, factorize, FactoredModulus, KContext, WContext};
pub use residue_set::ResidueSet;
