//! Criterion benchmarks for `isosurf-core`; see `benches/`.
