//! Criterion benchmarks for scalarlab live in `benches/`.
