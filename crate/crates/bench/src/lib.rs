//! Criterion benchmarks for `fmdt-core`; see `benches/`.
