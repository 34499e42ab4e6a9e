//! Criterion benchmarks for the matching pipeline; see `benches/pipeline.rs`.
