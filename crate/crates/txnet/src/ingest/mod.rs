//! Live-feed ingestion: parses unconfirmed-transaction frames and converts
//! them into directed value-transfer edges.
//!
//! A transaction frame carries input addresses (senders) and output addresses
//! (receivers) with integer satoshi values. [`extract_edges`] emits one edge
//! per (input, output) address pair, attributing each output's value to the
//! inputs proportionally to their share of the total input value. Amounts are
//! apportioned in integer satoshi with largest-remainder rounding, so the sum
//! of emitted amounts plus dropped self-pair amounts equals the total output
//! value exactly.

mod capture;
mod log;

pub use capture::{capture, SUBSCRIBE_MSG};
pub use log::{replay, replay_reader, write_log_record};

use serde::Serialize;

use crate::amount::Btc;
pub use crate::amount::satoshi_to_btc;

/// One side of a transaction: an address and its satoshi value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxSlot {
    pub address: String,
    pub value_satoshi: u64,
}

/// A parsed feed transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tx_id: String,
    /// Local receipt clock at frame arrival, milliseconds since epoch.
    pub received_at_ms: u64,
    pub inputs: Vec<TxSlot>,
    pub outputs: Vec<TxSlot>,
}

/// A directed value transfer between two addresses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub amount_btc: Btc,
    pub timestamp_ms: u64,
}

/// Classification of one feed frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedFrame {
    Transaction(Transaction),
    /// A well-formed message of some other kind (e.g. `{"op":"pong"}`).
    Ignored,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed feed message: {0}")]
    MalformedMessage(String),
    #[error("transaction {tx_id:?} has zero total input value")]
    ZeroInputValue { tx_id: String },
    #[error("could not connect to {endpoint}: {reason}")]
    ConnectFailed { endpoint: String, reason: String },
    #[error("corrupt capture log at line {line}: {reason}")]
    CorruptLog { line: u64, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Counters for one capture or replay run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CaptureSummary {
    /// Frames parsed as transactions.
    pub transactions: u64,
    /// Edges forwarded to the sink.
    pub edges: u64,
    /// Well-formed non-transaction frames.
    pub ignored: u64,
    /// Frames that failed to parse.
    pub malformed: u64,
    /// Transactions skipped because their total input value was zero.
    pub zero_input: u64,
    /// Transactions whose tx id was already seen (re-announcements; counted,
    /// not suppressed).
    pub duplicates: u64,
    /// True when the peer closed the feed before the requested duration.
    pub truncated: bool,
}

/// Receives extracted edges in arrival order.
pub trait EdgeSink {
    fn accept(&mut self, edge: &Edge);
}

impl<F: FnMut(&Edge)> EdgeSink for F {
    fn accept(&mut self, edge: &Edge) {
        self(edge)
    }
}

impl EdgeSink for Vec<Edge> {
    fn accept(&mut self, edge: &Edge) {
        self.push(edge.clone());
    }
}

/// Classifies one text frame from the feed.
///
/// Frames whose `op` is `"utx"` become [`ParsedFrame::Transaction`]; any other
/// JSON object is [`ParsedFrame::Ignored`]. Non-object JSON, invalid JSON, and
/// `utx` payloads missing inputs, outputs or addresses are
/// [`IngestError::MalformedMessage`]. Unknown fields inside a `utx` payload
/// are skipped. `received_at_ms` is the local receipt clock, stamped by the
/// caller.
pub fn parse_feed_message(raw: &[u8], received_at_ms: u64) -> Result<ParsedFrame, IngestError> {
    let malformed = |reason: String| IngestError::MalformedMessage(reason);
    let value: serde_json::Value = serde_json::from_slice(raw)
        .map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("frame is not a JSON object".into()))?;
    if obj.get("op").and_then(|v| v.as_str()) != Some("utx") {
        return Ok(ParsedFrame::Ignored);
    }
    let x = obj
        .get("x")
        .and_then(|v| v.as_object())
        .ok_or_else(|| malformed("utx frame has no \"x\" payload".into()))?;
    let tx_id = x
        .get("hash")
        .and_then(|v| v.as_str())
        .unwrap_or_default()
        .to_string();

    let slot = |item: &serde_json::Value, key: &str| -> Result<TxSlot, IngestError> {
        let obj = item
            .as_object()
            .ok_or_else(|| malformed(format!("{key} entry is not an object")))?;
        let address = obj
            .get("addr")
            .and_then(|v| v.as_str())
            .filter(|a| !a.is_empty())
            .ok_or_else(|| malformed(format!("{key} entry lacks an address")))?;
        let value_satoshi = obj
            .get("value")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| malformed(format!("{key} entry lacks a non-negative integer value")))?;
        Ok(TxSlot {
            address: address.to_string(),
            value_satoshi,
        })
    };

    let inputs = x
        .get("inputs")
        .and_then(|v| v.as_array())
        .ok_or_else(|| malformed("utx payload lacks inputs".into()))?
        .iter()
        .map(|item| {
            let prev = item
                .get("prev_out")
                .ok_or_else(|| malformed("input lacks prev_out".into()))?;
            slot(prev, "input")
        })
        .collect::<Result<Vec<_>, _>>()?;
    let outputs = x
        .get("out")
        .and_then(|v| v.as_array())
        .ok_or_else(|| malformed("utx payload lacks outputs".into()))?
        .iter()
        .map(|item| slot(item, "output"))
        .collect::<Result<Vec<_>, _>>()?;
    if inputs.is_empty() {
        return Err(malformed("utx payload has no inputs".into()));
    }
    if outputs.is_empty() {
        return Err(malformed("utx payload has no outputs".into()));
    }

    Ok(ParsedFrame::Transaction(Transaction {
        tx_id,
        received_at_ms,
        inputs,
        outputs,
    }))
}

/// Converts a transaction into directed edges, one per (input, output) pair
/// with distinct addresses.
///
/// Each output's value is split across the inputs proportionally to their
/// share of the total input value, computed in integer satoshi with
/// largest-remainder rounding (remainder units go to the largest fractional
/// shares, ties to the earlier input). Pairs where the input and output
/// address coincide (change outputs) are dropped; their share is still
/// accounted for, so conservation holds exactly.
pub fn extract_edges(tx: &Transaction) -> Result<Vec<Edge>, IngestError> {
    let total_in: u64 = tx.inputs.iter().map(|s| s.value_satoshi).sum();
    if total_in == 0 {
        return Err(IngestError::ZeroInputValue {
            tx_id: tx.tx_id.clone(),
        });
    }
    let mut edges = Vec::with_capacity(tx.inputs.len() * tx.outputs.len());
    let mut shares = vec![0u64; tx.inputs.len()];
    let mut remainders: Vec<(u128, usize)> = Vec::with_capacity(tx.inputs.len());
    for out in &tx.outputs {
        remainders.clear();
        let mut assigned = 0u64;
        for (i, inp) in tx.inputs.iter().enumerate() {
            let exact = out.value_satoshi as u128 * inp.value_satoshi as u128;
            shares[i] = (exact / total_in as u128) as u64;
            assigned += shares[i];
            remainders.push((exact % total_in as u128, i));
        }
        let leftover = out.value_satoshi - assigned;
        remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, i) in remainders.iter().take(leftover as usize) {
            shares[i] += 1;
        }
        for (inp, &share) in tx.inputs.iter().zip(shares.iter()) {
            if inp.address == out.address {
                continue; // self-pair dropped, share accounted for
            }
            edges.push(Edge {
                source: inp.address.clone(),
                target: out.address.clone(),
                amount_btc: Btc::from_sat(share),
                timestamp_ms: tx.received_at_ms,
            });
        }
    }
    Ok(edges)
}

/// Shared transaction bookkeeping for capture and replay.
fn process_transaction<S: EdgeSink>(
    tx: &Transaction,
    seen_ids: &mut std::collections::HashSet<String>,
    summary: &mut CaptureSummary,
    sink: &mut S,
) {
    summary.transactions += 1;
    if !tx.tx_id.is_empty() && !seen_ids.insert(tx.tx_id.clone()) {
        summary.duplicates += 1;
    }
    match extract_edges(tx) {
        Ok(edges) => {
            for edge in &edges {
                sink.accept(edge);
            }
            summary.edges += edges.len() as u64;
        }
        Err(IngestError::ZeroInputValue { .. }) => summary.zero_input += 1,
        Err(_) => unreachable!("extract_edges only fails on zero input value"),
    }
}
