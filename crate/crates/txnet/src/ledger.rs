//! Edge-stream persistence and nested time-window snapshots.
//!
//! Windows are half-open `[t0, t0 + duration)`, so for a fixed `t0` a shorter
//! window is always an ordered prefix of a longer one and nested snapshots
//! partition cleanly. The CSV format is `source,target,amount_btc,timestamp_ms`
//! with amounts as fixed-point 8-decimal strings, which makes the round-trip
//! exact.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::ingest::Edge;

pub const CSV_HEADER: &str = "source,target,amount_btc,timestamp_ms";

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("CSV format error at line {line}: {reason}")]
    CsvFormat { line: u64, reason: String },
    #[error("edges are not ordered by timestamp (index {index})")]
    UnsortedEdges { index: usize },
}

/// An ordered edge sequence covering one time window.
///
/// Every edge timestamp lies in `[t0_ms, t0_ms + duration_ms)` and timestamps
/// are non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    edges: Vec<Edge>,
    t0_ms: u64,
    duration_ms: u64,
}

impl EdgeList {
    /// Builds a list from timestamp-ordered edges, deriving the window bounds
    /// from the data (`t0` = first timestamp, duration spans the last).
    pub fn from_edges(edges: Vec<Edge>) -> Result<EdgeList, LedgerError> {
        for (index, pair) in edges.windows(2).enumerate() {
            if pair[1].timestamp_ms < pair[0].timestamp_ms {
                return Err(LedgerError::UnsortedEdges { index: index + 1 });
            }
        }
        let t0_ms = edges.first().map_or(0, |e| e.timestamp_ms);
        let duration_ms = edges.last().map_or(0, |e| e.timestamp_ms - t0_ms + 1);
        Ok(EdgeList {
            edges,
            t0_ms,
            duration_ms,
        })
    }

    /// The edges with timestamp in `[t0_ms, t0_ms + duration_ms)`, in order.
    pub fn window(&self, t0_ms: u64, duration_ms: u64) -> EdgeList {
        let end = t0_ms.saturating_add(duration_ms);
        let edges = self
            .edges
            .iter()
            .filter(|e| e.timestamp_ms >= t0_ms && e.timestamp_ms < end)
            .cloned()
            .collect();
        EdgeList {
            edges,
            t0_ms,
            duration_ms,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn t0_ms(&self) -> u64 {
        self.t0_ms
    }

    pub fn duration_ms(&self) -> u64 {
        self.duration_ms
    }
}

/// Writes the edge CSV; returns the record count (excluding the header).
pub fn write_csv<P: AsRef<Path>>(list: &EdgeList, path: P) -> Result<usize, LedgerError> {
    let mut w = BufWriter::new(File::create(path)?);
    let n = write_csv_to(list, &mut w)?;
    w.flush()?;
    Ok(n)
}

pub fn write_csv_to<W: Write>(list: &EdgeList, w: &mut W) -> Result<usize, LedgerError> {
    w.write_all(CSV_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for e in list.edges() {
        writeln!(
            w,
            "{},{},{},{}",
            e.source, e.target, e.amount_btc, e.timestamp_ms
        )?;
    }
    Ok(list.len())
}

/// Reads an edge CSV written by [`write_csv`]; window bounds are derived from
/// the data as in [`EdgeList::from_edges`].
pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<EdgeList, LedgerError> {
    read_csv_from(BufReader::new(File::open(path)?))
}

pub fn read_csv_from<R: BufRead>(r: R) -> Result<EdgeList, LedgerError> {
    let fail = |line: u64, reason: &str| LedgerError::CsvFormat {
        line,
        reason: reason.to_string(),
    };
    let mut lines = r.lines();
    match lines.next() {
        Some(Ok(header)) if header == CSV_HEADER => {}
        Some(Ok(_)) => return Err(fail(1, "missing or wrong header")),
        Some(Err(e)) => return Err(e.into()),
        None => return Err(fail(1, "empty file, missing header")),
    }
    let mut edges = Vec::new();
    let mut line_no = 1u64;
    for line in lines {
        line_no += 1;
        let line = line?;
        let mut fields = line.split(',');
        let (source, target, amount, ts) = match (
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
            fields.next(),
        ) {
            (Some(s), Some(t), Some(a), Some(ts), None) => (s, t, a, ts),
            _ => return Err(fail(line_no, "expected 4 comma-separated fields")),
        };
        if source.is_empty() || target.is_empty() {
            return Err(fail(line_no, "empty address"));
        }
        let amount_btc = amount
            .parse()
            .map_err(|_| fail(line_no, "bad amount_btc"))?;
        let timestamp_ms = ts
            .parse()
            .map_err(|_| fail(line_no, "bad timestamp_ms"))?;
        if let Some(prev) = edges.last() {
            let prev: &Edge = prev;
            if timestamp_ms < prev.timestamp_ms {
                return Err(fail(line_no, "timestamps out of order"));
            }
        }
        edges.push(Edge {
            source: source.to_string(),
            target: target.to_string(),
            amount_btc,
            timestamp_ms,
        });
    }
    EdgeList::from_edges(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::Btc;
    use proptest::prelude::*;

    fn edge(s: &str, t: &str, sat: u64, ts: u64) -> Edge {
        Edge {
            source: s.into(),
            target: t.into(),
            amount_btc: Btc::from_sat(sat),
            timestamp_ms: ts,
        }
    }

    #[test]
    fn window_half_open() {
        let list = EdgeList::from_edges(vec![
            edge("A", "B", 1, 100),
            edge("B", "C", 1, 150),
            edge("C", "D", 1, 200),
        ])
        .unwrap();
        let w = list.window(100, 100);
        // edge at t0 included, edge at t0+d excluded
        assert_eq!(w.len(), 2);
        assert_eq!(w.edges()[0].timestamp_ms, 100);
        assert_eq!(w.edges()[1].timestamp_ms, 150);
    }

    #[test]
    fn window_on_empty_list() {
        let list = EdgeList::from_edges(vec![]).unwrap();
        assert!(list.window(0, 1000).is_empty());
    }

    #[test]
    fn shorter_window_is_prefix_of_longer() {
        let edges: Vec<Edge> = (0..50).map(|i| edge("A", "B", 1, 100 + i * 10)).collect();
        let list = EdgeList::from_edges(edges).unwrap();
        let one = list.window(100, 100);
        let two = list.window(100, 200);
        assert_eq!(one.edges(), &two.edges()[..one.len()]);
    }

    #[test]
    fn window_is_idempotent() {
        let list = EdgeList::from_edges(vec![edge("A", "B", 1, 5), edge("A", "C", 2, 9)]).unwrap();
        let w = list.window(0, 8);
        assert_eq!(w.window(0, 8), w);
    }

    #[test]
    fn from_edges_rejects_unsorted() {
        let err = EdgeList::from_edges(vec![edge("A", "B", 1, 10), edge("B", "C", 1, 5)]);
        assert!(matches!(err, Err(LedgerError::UnsortedEdges { index: 1 })));
    }

    #[test]
    fn csv_missing_header() {
        let data = b"A,B,1.00000000,5\n";
        match read_csv_from(&data[..]) {
            Err(LedgerError::CsvFormat { line: 1, .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }
    }

    #[test]
    fn csv_reports_bad_line() {
        let data = format!("{CSV_HEADER}\nA,B,1.00000000,5\nA,B\n");
        match read_csv_from(data.as_bytes()) {
            Err(LedgerError::CsvFormat { line: 3, .. }) => {}
            other => panic!("expected line-3 error, got {other:?}"),
        }
    }

    #[test]
    fn fixed_point_amount_survives_roundtrip() {
        let list = EdgeList::from_edges(vec![edge("A", "B", 30_000_000, 1)]).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&list, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).contains("0.30000000"));
        let back = read_csv_from(&buf[..]).unwrap();
        assert_eq!(back, list);
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_identity(raw in proptest::collection::vec((0u64..3, 0u64..3, 0u64..=2_100_000_000_000_000u64, 0u64..1_000_000), 0..60)) {
            let names = ["1A", "1B", "1C"];
            let mut ts_sorted: Vec<_> = raw;
            ts_sorted.sort_by_key(|r| r.3);
            let edges: Vec<Edge> = ts_sorted
                .into_iter()
                .map(|(s, t, sat, ts)| edge(names[s as usize], names[t as usize], sat, ts))
                .collect();
            let list = EdgeList::from_edges(edges).unwrap();
            let mut buf = Vec::new();
            write_csv_to(&list, &mut buf).unwrap();
            let back = read_csv_from(&buf[..]).unwrap();
            prop_assert_eq!(back, list);
        }

        #[test]
        fn windows_nest(d1 in 0u64..500, d2 in 0u64..500, t0 in 0u64..200) {
            let mut edges: Vec<Edge> = (0..80u64).map(|i| edge("A", "B", i, i * 13 % 397)).collect();
            edges.sort_by_key(|e| e.timestamp_ms);
            let list = EdgeList::from_edges(edges).unwrap();
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            let small = list.window(t0, lo);
            let large = list.window(t0, hi);
            prop_assert_eq!(small.edges(), &large.edges()[..small.len()]);
        }
    }
}
