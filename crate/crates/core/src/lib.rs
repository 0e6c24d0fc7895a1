//! Explicit classification data for very cuspidal parameters of unramified
//! unitary groups U_n(F/F0): torus embeddings, lattice-sequence filtrations,
//! amending and transfer sign characters, Hecke parameters, stable packets.

pub mod amending;
pub mod characters;
pub mod embeddings;
pub mod error;
pub mod field;
pub mod hecke;
pub mod lattices;
pub mod packets;
pub mod sign;

pub use error::{Error, Invariant, Result};
pub use sign::Sign;
