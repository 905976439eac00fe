//! Criterion benchmarks for `hslab-core` live under `benches/`.
