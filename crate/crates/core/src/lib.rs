//! Finite left quasigroups, racks and quandles: displacement groups, the two
//! Galois connections between congruences and admissible subgroups,
//! term-condition commutators and central extensions.

pub mod commut;
pub mod congr;
pub mod displ;
pub mod error;
pub mod ext;
pub mod limits;
pub mod lquasi;
pub mod partition;
pub mod perm;
pub mod term;

pub use error::{Error, Result};
pub use limits::Limits;
pub use lquasi::{LeftQuasigroup, Predicates, Quotient};
pub use partition::Partition;
pub use perm::{Perm, PermGroup};
pub use term::Term;
