//! Batch command-line toolkit over `chromadist-core`: graph generation,
//! exact solving, randomised constructions, verification, certificates,
//! event censuses and pinned benchmark grids.
//!
//! Every command reads files, computes, writes files and exits; there is no
//! daemon and no network. Reports embed the tool version, the fully
//! resolved configuration and the seed, so a rerun with the same triple is
//! byte-identical.

pub mod args;
pub mod bench;
pub mod corpus;
pub mod envelope;
mod exec;

pub use exec::{run, EXIT_BUDGET, EXIT_CONFLICTS, EXIT_GUARD, EXIT_OK, EXIT_USAGE};
