//! Structured solver event log: one JSON object per line.

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Cut,
    Branch,
    Incumbent,
    Fathom,
}

/// One solver event. `ub` is absent until an incumbent exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Seconds since the solve started.
    pub time: f64,
    pub node: u64,
    pub lb: f64,
    pub ub: Option<f64>,
    pub action: Action,
    pub phase: String,
}

pub trait EventSink {
    fn emit(&mut self, event: &Event);
}

/// Discards events.
pub struct NullSink;

impl EventSink for NullSink {
    fn emit(&mut self, _event: &Event) {}
}

/// Writes each event as one JSON line.
pub struct JsonLinesSink<W: Write> {
    writer: W,
}

impl<W: Write> JsonLinesSink<W> {
    pub fn new(writer: W) -> Self {
        JsonLinesSink { writer }
    }
}

impl<W: Write> EventSink for JsonLinesSink<W> {
    fn emit(&mut self, event: &Event) {
        if let Ok(line) = serde_json::to_string(event) {
            let _ = writeln!(self.writer, "{line}");
        }
    }
}

/// Collects events in memory; used by tests.
#[derive(Default)]
pub struct CollectSink {
    pub events: Vec<Event>,
}

impl EventSink for CollectSink {
    fn emit(&mut self, event: &Event) {
        self.events.push(event.clone());
    }
}

/// Forwards events with the phase replaced, so a caller can tag the solves it
/// drives (the kernel search does this per restricted problem).
pub struct PhaseSink<'a> {
    inner: &'a mut dyn EventSink,
    phase: String,
}

impl<'a> PhaseSink<'a> {
    pub fn new(inner: &'a mut dyn EventSink, phase: impl Into<String>) -> Self {
        PhaseSink {
            inner,
            phase: phase.into(),
        }
    }
}

impl EventSink for PhaseSink<'_> {
    fn emit(&mut self, event: &Event) {
        let mut ev = event.clone();
        ev.phase = self.phase.clone();
        self.inner.emit(&ev);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_round_trip() {
        let mut buf = Vec::new();
        {
            let mut sink = JsonLinesSink::new(&mut buf);
            sink.emit(&Event {
                time: 0.25,
                node: 3,
                lb: 10.0,
                ub: None,
                action: Action::Cut,
                phase: "root".into(),
            });
        }
        let line = String::from_utf8(buf).unwrap();
        let back: Event = serde_json::from_str(line.trim()).unwrap();
        assert_eq!(back.node, 3);
        assert_eq!(back.ub, None);
        assert_eq!(back.action, Action::Cut);
    }
}
