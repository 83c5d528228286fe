#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cosets;
pub mod embed;
pub mod error;
pub mod groupalg;
pub mod hecke;
pub mod perm;
pub mod permgroup;
pub mod scalar;
pub mod spheromorph;
pub mod treefam;
pub mod witness;

pub use cosets::{r_index, DoubleCosetEntry, DoubleCosetTable, RightCosetIndex};
pub use error::{Error, Result};
pub use perm::Permutation;
pub use spheromorph::{AlmostAutomorphism, FinitaryAutomorphism};
pub use permgroup::PermGroup;
pub use treefam::{TreeShape, WreathEmbedding};
