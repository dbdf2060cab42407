//! Line-oriented output protocol and the estimate trace CSV.
//!
//! ```text
//! c <comment>
//! u <atom>        atom proven cautious
//! o <atom>        atom excluded from the overestimate
//! s COMPLETE | INCOHERENT | PARTIAL
//! ```

use std::io::{self, Write};

use crate::algorithms::{EstimateEvent, EventKind, EventSink};
use crate::program::Program;

pub const TRACE_HEADER: &str = "t_ms,under_count,over_count";

/// Writes `t_ms,under_count,over_count` rows, one per estimate change.
pub struct TraceWriter<W: Write> {
    out: W,
    under: usize,
    over: usize,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, query_size: usize) -> io::Result<Self> {
        writeln!(out, "{TRACE_HEADER}")?;
        writeln!(out, "0,0,{query_size}")?;
        out.flush()?;
        Ok(TraceWriter {
            out,
            under: 0,
            over: query_size,
        })
    }

    pub fn record(&mut self, event: &EstimateEvent) -> io::Result<()> {
        match event.kind {
            EventKind::UnderestimateAdd => self.under += 1,
            EventKind::OverestimateRemove => self.over -= 1,
            _ => return Ok(()),
        }
        writeln!(self.out, "{},{},{}", event.t_ms, self.under, self.over)?;
        self.out.flush()
    }
}

/// Event sink printing the protocol. The terminal line is held back until
/// [`ProtocolWriter::finish`] so that closing comments can precede it.
pub struct ProtocolWriter<'a, W: Write> {
    program: &'a Program,
    out: W,
    trace: Option<TraceWriter<Box<dyn Write + 'a>>>,
    show_origin: bool,
    terminal: Option<EventKind>,
    error: Option<io::Error>,
}

impl<'a, W: Write> ProtocolWriter<'a, W> {
    pub fn new(program: &'a Program, out: W) -> Self {
        ProtocolWriter {
            program,
            out,
            trace: None,
            show_origin: false,
            terminal: None,
            error: None,
        }
    }

    pub fn with_trace(mut self, trace: TraceWriter<Box<dyn Write + 'a>>) -> Self {
        self.trace = Some(trace);
        self
    }

    /// Precede every `u`/`o` line with a `c origin <worker>` comment.
    pub fn show_origin(mut self, show: bool) -> Self {
        self.show_origin = show;
        self
    }

    fn line(&mut self, text: &str) {
        if self.error.is_some() {
            return;
        }
        let result = writeln!(self.out, "{text}").and_then(|()| self.out.flush());
        if let Err(e) = result {
            self.error = Some(e);
        }
    }

    pub fn comment(&mut self, text: &str) {
        self.line(&format!("c {text}"));
    }

    pub fn terminal(&self) -> Option<EventKind> {
        self.terminal
    }

    /// Prints the terminal line and reports the first write error, if any.
    pub fn finish(mut self) -> io::Result<Option<EventKind>> {
        let status = match self.terminal {
            Some(EventKind::Complete) => Some("COMPLETE"),
            Some(EventKind::Incoherent) => Some("INCOHERENT"),
            Some(EventKind::Partial) => Some("PARTIAL"),
            _ => None,
        };
        if let Some(status) = status {
            self.line(&format!("s {status}"));
        }
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.terminal),
        }
    }
}

impl<W: Write> EventSink for ProtocolWriter<'_, W> {
    fn event(&mut self, event: &EstimateEvent) {
        if let Some(trace) = self.trace.as_mut() {
            if let Err(e) = trace.record(event) {
                self.error.get_or_insert(e);
            }
        }
        let tag = match event.kind {
            EventKind::UnderestimateAdd => "u",
            EventKind::OverestimateRemove => "o",
            kind => {
                self.terminal.get_or_insert(kind);
                return;
            }
        };
        if self.show_origin {
            if let Some(origin) = event.origin {
                self.comment(&format!("origin {origin}"));
            }
        }
        let atom = event.atom.expect("estimate events carry an atom");
        let line = format!("{tag} {}", self.program.name(atom));
        self.line(&line);
    }
}
