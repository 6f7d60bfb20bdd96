//! Alternate encodings of the simplices of `P(r)` and the maps between them.
//!
//! * [`chromatic`]: the standard chromatic subdivision of a simplex, which is
//!   `P(1, ..., 1)`.
//! * [`execution`]: layered protocol executions, the facets of the protocol
//!   complex.
//! * [`poset`]: witness posets recording who knows what after each step.

pub mod chromatic;
pub mod execution;
pub mod poset;

pub use chromatic::{chromatic_faces, chromatic_to_witness, witness_to_chromatic, ChromaticSimplex};
pub use execution::{exec_occurrence, Execution};
pub use poset::{
    build_c, exec_to_poset, poset_ideal, poset_to_exec, poset_to_witness, poset_validate,
    witness_to_poset, PosetComplex, Token, WitnessPoset,
};
