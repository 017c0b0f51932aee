//! Criterion benchmarks of the plateflow solver live in `benches/`.
