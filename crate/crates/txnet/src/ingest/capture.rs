//! Live WebSocket capture.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use tungstenite::error::Error as WsError;
use tungstenite::stream::MaybeTlsStream;
use tungstenite::Message;

use super::{parse_feed_message, process_transaction, write_log_record, CaptureSummary, EdgeSink, IngestError, ParsedFrame};

/// Poll interval for the duration deadline while the socket is idle.
const POLL: Duration = Duration::from_millis(200);

/// The subscription message expected by the unconfirmed-transaction feed.
pub const SUBSCRIBE_MSG: &str = r#"{"op":"unconfirmed_sub"}"#;

/// Connects to `endpoint`, subscribes to the unconfirmed-transaction stream,
/// and runs for `duration`, writing one log record per transaction frame and
/// forwarding every extracted edge to `sink` in arrival order.
///
/// Returns the summary when the duration elapses or the peer closes early (in
/// which case `truncated` is set). Fails with [`IngestError::ConnectFailed`]
/// when the endpoint is unreachable.
pub fn capture<W: Write, S: EdgeSink>(
    endpoint: &str,
    duration: Duration,
    log: &mut W,
    sink: &mut S,
) -> Result<CaptureSummary, IngestError> {
    let (mut socket, _response) =
        tungstenite::connect(endpoint).map_err(|e| IngestError::ConnectFailed {
            endpoint: endpoint.to_string(),
            reason: e.to_string(),
        })?;
    // Bound each read so the deadline is honored on a silent feed.
    match socket.get_mut() {
        MaybeTlsStream::Plain(s) => s.set_read_timeout(Some(POLL))?,
        MaybeTlsStream::Rustls(s) => s.get_mut().set_read_timeout(Some(POLL))?,
        _ => {}
    }
    socket
        .send(Message::Text(SUBSCRIBE_MSG.into()))
        .map_err(|e| IngestError::ConnectFailed {
            endpoint: endpoint.to_string(),
            reason: format!("subscribe failed: {e}"),
        })?;

    let mut summary = CaptureSummary::default();
    let mut seen_ids = HashSet::new();
    let deadline = Instant::now() + duration;
    let mut last_ts = 0u64;
    loop {
        if Instant::now() >= deadline {
            break;
        }
        match socket.read() {
            Ok(Message::Text(frame)) => {
                // Receipt clock, clamped monotone so downstream windows stay ordered.
                let now = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .unwrap_or_default()
                    .as_millis() as u64;
                last_ts = last_ts.max(now);
                match parse_feed_message(frame.as_bytes(), last_ts) {
                    Ok(ParsedFrame::Transaction(tx)) => {
                        write_log_record(log, last_ts, frame.as_str())?;
                        process_transaction(&tx, &mut seen_ids, &mut summary, sink);
                    }
                    Ok(ParsedFrame::Ignored) => summary.ignored += 1,
                    Err(IngestError::MalformedMessage(_)) => summary.malformed += 1,
                    Err(other) => return Err(other),
                }
            }
            // Control and binary frames are not feed messages.
            Ok(Message::Ping(_) | Message::Pong(_) | Message::Frame(_)) => {}
            Ok(Message::Binary(_)) => summary.ignored += 1,
            Ok(Message::Close(_)) => {
                summary.truncated = Instant::now() < deadline;
                break;
            }
            Err(WsError::Io(e))
                if e.kind() == std::io::ErrorKind::WouldBlock
                    || e.kind() == std::io::ErrorKind::TimedOut =>
            {
                continue;
            }
            Err(WsError::ConnectionClosed | WsError::AlreadyClosed) => {
                summary.truncated = Instant::now() < deadline;
                break;
            }
            Err(WsError::Protocol(_) | WsError::Io(_)) => {
                // Peer went away without a close handshake.
                summary.truncated = true;
                break;
            }
            Err(e) => {
                return Err(IngestError::ConnectFailed {
                    endpoint: endpoint.to_string(),
                    reason: e.to_string(),
                })
            }
        }
    }
    let _ = socket.close(None);
    log.flush()?;
    Ok(summary)
}
