//! Criterion benchmarks for `completion-core`; see `benches/`.
