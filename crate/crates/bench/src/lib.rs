//! Criterion benchmarks for the propagation engine live in `benches/`.
