//! Benchmark crate; see `benches/core_benches.rs`.
