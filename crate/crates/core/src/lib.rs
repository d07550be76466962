//! Configuration-free subsets of `F_q^n`.
//!
//! Constructions, exact bound evaluators, polynomial-method certificates and
//! exact small-parameter search for sets avoiding right angles, `k`-right
//! corners, all-right triangles, self-orthogonal differences, and binary
//! codes avoiding Hamming distances divisible by `q`.

pub mod bounds;
pub mod certify;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod fqlin;
pub mod predicates;
pub mod reproduce;
pub mod search;
pub mod setfamily;

pub use error::{Error, Result};
pub use fqlin::{FVec, FieldSpec};
pub use predicates::Property;
