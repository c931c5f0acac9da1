//! Criterion benchmarks for the gamov kernels; run with `cargo bench -p gamov-bench`.
