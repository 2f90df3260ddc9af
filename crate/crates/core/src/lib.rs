//! Dynamic-key Hill cipher over prime fields.
//!
//! Each block is whitened with a chained vector and encrypted with its own
//! invertible key matrix; both chains are produced by repeatedly applying a
//! fixed non-singular linear map. The crate also ships the fixed-key Hill
//! baseline, known-plaintext attack demonstrators, exact keyspace sizing and
//! an operation-count model checked against instrumented runs.

pub mod cipher;
pub mod codec;
pub mod costmodel;
pub mod cryptanalysis;
pub mod error;
pub mod gfp;
pub mod golden;
pub mod keysched;
pub mod matvec;

pub mod cli;

pub use error::{Error, Result};
pub use gfp::{Fe, OpCounts, Prime, Tally, Untallied};
pub use keysched::{KeyFile, KeyMaterial};
pub use matvec::{Matrix, Vector};
