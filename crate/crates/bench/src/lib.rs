//! Benchmarks for `coxarith` live in `benches/`; this crate has no API.
