//! Capture-log persistence and deterministic replay.
//!
//! The log is JSON-lines, one record per received transaction frame:
//! `{"received_at_ms":<int>,"raw":<original utx payload>}`. The raw frame is
//! spliced in verbatim so the log is byte-replayable: replaying a log emits
//! exactly the edge sequence of the original capture, in the same order.

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{parse_feed_message, process_transaction, CaptureSummary, EdgeSink, IngestError, ParsedFrame};

#[derive(Serialize)]
struct RecordOut<'a> {
    received_at_ms: u64,
    raw: &'a RawValue,
}

#[derive(Deserialize)]
struct RecordIn<'a> {
    received_at_ms: u64,
    #[serde(borrow)]
    raw: &'a RawValue,
}

/// Appends one log record; `raw_frame` must be the original frame text.
pub fn write_log_record<W: Write>(w: &mut W, received_at_ms: u64, raw_frame: &str) -> io::Result<()> {
    let raw: &RawValue = serde_json::from_str(raw_frame)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let line = serde_json::to_string(&RecordOut {
        received_at_ms,
        raw,
    })?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")
}

/// Replays a capture log, forwarding every extracted edge to `sink` in the
/// original order. Two replays of the same log produce identical sequences.
pub fn replay<P: AsRef<Path>, S: EdgeSink>(log: P, sink: &mut S) -> Result<CaptureSummary, IngestError> {
    let file = File::open(log)?;
    replay_reader(BufReader::new(file), sink)
}

/// [`replay`] over any buffered reader.
pub fn replay_reader<R: BufRead, S: EdgeSink>(
    reader: R,
    sink: &mut S,
) -> Result<CaptureSummary, IngestError> {
    let mut summary = CaptureSummary::default();
    let mut seen_ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let corrupt = |reason: String| IngestError::CorruptLog {
            line: line_no,
            reason,
        };
        let line = line?;
        let record: RecordIn =
            serde_json::from_str(&line).map_err(|e| corrupt(format!("bad record: {e}")))?;
        match parse_feed_message(record.raw.get().as_bytes(), record.received_at_ms) {
            Ok(ParsedFrame::Transaction(tx)) => {
                process_transaction(&tx, &mut seen_ids, &mut summary, sink)
            }
            // Capture only ever logs transaction frames.
            Ok(ParsedFrame::Ignored) => {
                return Err(corrupt("record is not a transaction frame".into()))
            }
            Err(IngestError::MalformedMessage(reason)) => return Err(corrupt(reason)),
            Err(other) => return Err(other),
        }
    }
    Ok(summary)
}
