//! Benchmark-only crate; see `benches/scaling.rs`.
//!
//! The quick-and-portable timing path lives in
//! [`wadgekit_core::harness::scaling_run`] (also exposed as `wadgekit
//! bench`); the criterion benches here are for detailed local profiling.

pub use wadgekit_core as core;
