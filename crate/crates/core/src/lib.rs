//! A configurable abstract interpreter for notJS, a small core language that
//! JavaScript desugars into.
//!
//! The crate contains a concrete reference interpreter, the abstract domains
//! and transition relation, pluggable context/heap sensitivity, a worklist
//! fixpoint engine with a differential soundness harness, and an error
//! reporting client.

pub mod concrete;
pub mod conv;
pub mod ir;
pub mod model;
pub mod sensitivity;
pub mod domains;
pub mod absem;
pub mod engine;
pub mod client;
