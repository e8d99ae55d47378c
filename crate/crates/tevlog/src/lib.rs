//! Tamper-evident log toolkit: synthetic workload generation, the chunked
//! ingestion pipeline with a file-backed trust anchor, a tamper simulator
//! with set-based detection metrics, and the benchmark scenarios behind the
//! `tevlog` CLI. Pure tree/chunking primitives live in `tevlog-core`.

pub mod anchor;
pub mod bench;
pub mod emit;
pub mod loggen;
pub mod pipeline;
pub mod probe;
pub mod tamper;

pub use tevlog_core as core;
