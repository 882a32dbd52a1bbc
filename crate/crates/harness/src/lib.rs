//! Benchmark harness: configuration, corpus ingestion, seeded Monte Carlo
//! execution across SNRs, aggregation, and report emission.

pub mod config;
pub mod corpus;
pub mod demo;
pub mod report;
pub mod runner;
pub mod verify;
