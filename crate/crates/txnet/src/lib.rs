//! Capture and analysis toolkit for cryptocurrency transaction networks.
//!
//! The pipeline runs in stages: [`ingest`] turns a live unconfirmed-transaction
//! feed (or a recorded capture log) into directed value-transfer edges,
//! [`ledger`] persists edge streams and cuts nested time-window snapshots,
//! [`graph`] builds the address multigraph, and [`metrics`], [`distfit`] and
//! [`linkcomm`] compute the snapshot metric battery, degree-distribution fits
//! and link communities. [`synth`] provides seeded generators used both as
//! fixtures and as statistical oracles.
//!
//! All analysis stages are pure functions of their inputs: fixed seeds yield
//! byte-identical results across runs and thread counts. The `parallel`
//! feature (enabled by default) runs the data-parallel inner loops on rayon;
//! disabling it compiles the sequential fallbacks with identical output.

pub mod amount;
pub mod distfit;
pub mod graph;
pub mod graphml;
pub mod ingest;
pub mod ledger;
pub mod linkcomm;
pub mod metrics;
pub mod synth;
pub mod zeta;

pub use amount::Btc;
pub use graph::TxGraph;
pub use ingest::{CaptureSummary, Edge, Transaction};
pub use ledger::EdgeList;
