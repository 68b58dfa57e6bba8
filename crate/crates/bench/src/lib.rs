//! Benchmarks for sak-core live in `benches/`.
