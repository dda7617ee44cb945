//! Shared fixtures for the benchmarks.

pub use paratile_core;
