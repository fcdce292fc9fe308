use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

use crate::protocol::{Event, Transcript};

/// One line of trace output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub seq: u64,
    pub kind: String,
    pub actor: String,
    pub payload: Value,
}

impl TraceRecord {
    /// `payload` is the event's JSON form without its `kind` and `actor`.
    pub fn from_event(seq: u64, event: &Event) -> Self {
        let mut payload = serde_json::to_value(event).expect("events serialize");
        if let Value::Object(map) = &mut payload {
            map.remove("kind");
            map.remove("actor");
        }
        TraceRecord {
            seq,
            kind: event.kind().to_owned(),
            actor: event.actor(),
            payload,
        }
    }
}

/// Records numbered from 1 in transcript order.
pub fn trace_records(transcript: &Transcript) -> Vec<TraceRecord> {
    transcript
        .events()
        .iter()
        .zip(1..)
        .map(|(e, seq)| TraceRecord::from_event(seq, e))
        .collect()
}

/// Writes one JSON object per line.
pub fn write_trace<W: Write + ?Sized>(transcript: &Transcript, out: &mut W) -> io::Result<()> {
    for record in trace_records(transcript) {
        serde_json::to_writer(&mut *out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
