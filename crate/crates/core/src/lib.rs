//! Coefficient matrices, strong lines and dictatorship recovery for Boolean
//! functions on the symmetric group `S_n`.

pub mod bitset;
pub mod error;
pub mod family;
pub mod isoperimetry;
pub mod numeric;
pub mod perm;
pub mod permanent;
pub mod projection;
pub mod recovery;
pub mod restriction;
pub mod rng;
pub mod strong_line;

pub use error::{Error, Result};
pub use family::{BooleanFamily, CosetUnion, Line, LineKind, RealFunction};
pub use perm::{PermRank, Permutation};
