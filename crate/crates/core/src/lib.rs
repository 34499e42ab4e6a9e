//! Karp–Sipser reduce/construct matching on random multigraphs with degrees in {3, 4}.
//!
//! The pipeline:
//!
//! 1. [`configmodel`] samples a loop-free configuration multigraph.
//! 2. [`reduce`] shrinks it by degree-priority rules, logging a replayable trace.
//! 3. [`construct`] unwinds the trace into a matching of the input graph.
//! 4. [`exactmatch`] supplies the exact matcher used by the hybrid mode and the
//!    verification oracles.
//! 5. [`analysis`] segments traces into hyperactions and measures the excess drift.
//! 6. [`harness`] runs seeded experiments and produces JSON reports.

pub mod analysis;
pub mod configmodel;
pub mod construct;
pub mod error;
pub mod exactmatch;
pub mod harness;
pub mod io;
pub mod multigraph;
pub mod reduce;
pub mod rng;

pub use error::{Error, Result};
pub use multigraph::{DegreeClass, EdgeId, MultiGraph, VertexId};
