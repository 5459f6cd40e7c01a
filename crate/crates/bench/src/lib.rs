//! Shared input builders for the benchmark suite.
