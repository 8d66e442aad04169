//! p-Stanley sequences and modular p-free sets.
//!
//! The crate generates greedy p-Stanley sequences, certifies modular p-free
//! sets with re-checkable witnesses, builds the explicit modular sets for
//! `S_p(0, n)` with `n` in `A_p` together with their alternative coverings,
//! and fits growth exponents of generated sequences.

pub mod analysis;
pub mod apfree;
pub mod cli;
pub mod construction;
pub mod digits;
pub mod error;
pub mod modular;
pub mod primes;
pub mod stanley;

pub use apfree::{ApWitness, CoverWitness, IntSet};
pub use digits::Digits;
pub use error::{Error, Result};
pub use modular::ModularCertificate;
pub use stanley::StanleySeq;
