//! Witness structures and immediate snapshot complexes.
//!
//! The crate builds the immediate snapshot complex `P(r)` of a round counter
//! `r`, with simplices indexed by witness structures and faces given by the
//! ghosting operation. On top of that it offers the canonical decomposition,
//! pseudomanifold analysis, facet counting, and the isomorphic encodings by
//! chromatic subdivisions, protocol executions and witness posets.

use std::collections::BTreeSet;

pub mod analysis;
pub mod cli;
pub mod complex;
pub mod correspondences;
pub mod enumeration;
pub mod error;
pub mod round_counter;
pub mod witness;

pub type ProcessId = u32;
pub type ProcessSet = BTreeSet<ProcessId>;


pub use complex::{Complex, FVector, Limits};
pub use error::{Error, Result};
pub use round_counter::{Permutation, RoundCounter};
pub use witness::{Layer, Simplex, StructureClass, TraceForm, WitnessPrestructure};
