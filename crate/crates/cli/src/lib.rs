//! Library side of the `epp` binary: argument definitions, the data
//! pipeline, the benchmark harness, and the subcommand implementations.
//! Exposed as a lib so integration tests drive the same code paths the
//! binary does.

pub mod args;
pub mod bench;
pub mod commands;
pub mod pipeline;
