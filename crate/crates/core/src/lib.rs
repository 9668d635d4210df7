//! Desk-scale experiments with filters on the natural numbers.
//!
//! Everything here works with *finitely presented* infinite objects: sets of
//! naturals given by a closed algebra of descriptions, interval partitions
//! given by a size rule, filters given by a small family of presentation
//! classes.  Every operation that decides an infinitary property returns a
//! three-valued [`Verdict`] whose `Proved`/`Refuted` arms carry certificates
//! that can be re-checked independently, and small brute-force oracles in
//! [`oracle`] anchor the structural code paths on truncated universes.

pub mod analysis;
pub mod convergence;
pub mod cpgame;
pub mod error;
pub mod expr;
pub mod filters;
pub mod measure;
pub mod oracle;
pub mod partition;
pub mod pseudo;
pub mod sets;
pub mod verdict;
pub mod weights;

pub use error::Error;
pub use partition::{BlockPartition, TailRule};
pub use sets::{BlockSelector, RowScheme, RowSpec, SetDescription, Universe};
pub use verdict::Verdict;

/// Natural numbers as used throughout the crate.
pub type Nat = u64;

/// Default horizon for bounded searches and certificate re-checks.
pub const DEFAULT_HORIZON: Nat = 10_000;
