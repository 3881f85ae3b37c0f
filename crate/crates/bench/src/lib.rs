//! Criterion benchmarks for the explorer and the checker; see `benches/`.
