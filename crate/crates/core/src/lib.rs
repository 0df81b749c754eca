//! Core library for `chromadist`: computing, constructing and verifying
//! r-distant set distinguishing edge colourings.
//!
//! A proper edge colouring is *r-distant set distinguishing* when every two
//! distinct vertices at distance at most `r` carry different palettes, the
//! palette of a vertex being the set of colours on its incident edges.
//! Graphs with an isolated edge (a K2 component) are excluded throughout:
//! the two endpoints of such an edge share their palette under every
//! colouring, so the notion is undefined for them.
//!
//! The crate is organised around that definition:
//!
//! * [`graph`] — simple graph representation, classic/random/word-overlap
//!   generators, the clique-decorated lower-bound family, distance queries;
//! * [`colouring`] — total and partial edge colourings, palettes, the
//!   distinguishing verifier and its conflict reports;
//! * [`vizing`] — constructive proper edge colouring with Δ+1 colours on a
//!   graph, a subgraph, or the uncoloured remainder of a partial colouring;
//! * [`solver`] — exact branch-and-prune computation of the least number of
//!   colours admitting a distinguishing colouring, plus corpus scans;
//! * [`construct`] — randomised construction pipelines (uncolour / resample /
//!   recolour) with deterministic seeding and a terminating repair step;
//! * [`extremal`] — exact big-integer and rational certificates for the
//!   counting inequalities behind the lower-bound family;
//! * [`seed`] — stable derivation of per-component RNG streams from one
//!   master seed.

pub mod colouring;
pub mod construct;
pub mod extremal;
pub mod graph;
pub mod io;
pub mod seed;
pub mod solver;
pub mod vizing;
