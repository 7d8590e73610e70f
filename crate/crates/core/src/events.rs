//! Protocol events and their tab-separated log representation.
//!
//! One line per event: `time_ms  ue_id  event  serving  target  detail`,
//! with `-` for absent cells.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{ChoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// Handover completed in the target (BHO or CHO execution).
    HoSuccess,
    /// The completed handover returned to the previous source within the window.
    PingPong,
    /// T310 expired in the source cell.
    Rlf,
    /// T304 expired before random access succeeded.
    Hof,
    /// Open failure closed by accessing a prepared candidate.
    RecoveryResolved,
    /// Open failure closed by legacy reestablishment.
    ReestResolved,
    CandidateAdded,
    CandidateReleased,
    /// Measurement report (BHO) or preparation request (CHO).
    MeasReport,
    /// RRC reconfiguration not delivered because the serving link was in outage.
    CommandLost,
    ExecStart,
    T310Start,
    T310Stop,
    RecoveryStart,
    ReestStart,
    OutOfCoverage,
}

impl EventKind {
    pub const ALL: [EventKind; 16] = [
        EventKind::HoSuccess,
        EventKind::PingPong,
        EventKind::Rlf,
        EventKind::Hof,
        EventKind::RecoveryResolved,
        EventKind::ReestResolved,
        EventKind::CandidateAdded,
        EventKind::CandidateReleased,
        EventKind::MeasReport,
        EventKind::CommandLost,
        EventKind::ExecStart,
        EventKind::T310Start,
        EventKind::T310Stop,
        EventKind::RecoveryStart,
        EventKind::ReestStart,
        EventKind::OutOfCoverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::HoSuccess => "ho_success",
            EventKind::PingPong => "ping_pong",
            EventKind::Rlf => "rlf",
            EventKind::Hof => "hof",
            EventKind::RecoveryResolved => "recovery_resolved",
            EventKind::ReestResolved => "reest_resolved",
            EventKind::CandidateAdded => "cand_added",
            EventKind::CandidateReleased => "cand_released",
            EventKind::MeasReport => "meas_report",
            EventKind::CommandLost => "cmd_lost",
            EventKind::ExecStart => "exec_start",
            EventKind::T310Start => "t310_start",
            EventKind::T310Stop => "t310_stop",
            EventKind::RecoveryStart => "recovery_start",
            EventKind::ReestStart => "reest_start",
            EventKind::OutOfCoverage => "out_of_coverage",
        }
    }
}

impl FromStr for EventKind {
    type Err = ChoError;

    fn from_str(s: &str) -> Result<Self> {
        EventKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ChoError::Schema(format!("unknown event kind `{s}`")))
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub time_ms: u64,
    pub ue: usize,
    pub kind: EventKind,
    pub serving: Option<usize>,
    pub target: Option<usize>,
    pub detail: &'static str,
}

impl Event {
    pub fn new(time_ms: u64, ue: usize, kind: EventKind, serving: usize, target: Option<usize>) -> Self {
        Event { time_ms, ue, kind, serving: Some(serving), target, detail: "" }
    }

    pub fn with_detail(mut self, detail: &'static str) -> Self {
        self.detail = detail;
        self
    }
}

/// Details are drawn from a closed vocabulary so parsed events can keep
/// `&'static str`.
const DETAILS: [&str; 8] = ["", "bho", "cho", "recovery", "prep", "exec", "evict", "ho"];

fn cell(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |c| c.to_string())
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.time_ms,
            self.ue,
            self.kind,
            cell(self.serving),
            cell(self.target),
            if self.detail.is_empty() { "-" } else { self.detail }
        )
    }
}

impl FromStr for Event {
    type Err = ChoError;

    fn from_str(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(ChoError::Schema(format!("expected 6 fields, got {}: `{line}`", f.len())));
        }
        let num = |s: &str, what: &str| -> Result<u64> {
            s.parse().map_err(|_| ChoError::Schema(format!("bad {what} `{s}`")))
        };
        let opt = |s: &str| -> Result<Option<usize>> {
            if s == "-" { Ok(None) } else { num(s, "cell").map(|v| Some(v as usize)) }
        };
        let detail_raw = if f[5] == "-" { "" } else { f[5] };
        let detail = DETAILS
            .into_iter()
            .find(|d| *d == detail_raw)
            .ok_or_else(|| ChoError::Schema(format!("unknown detail `{detail_raw}`")))?;
        Ok(Event {
            time_ms: num(f[0], "time")?,
            ue: num(f[1], "ue")? as usize,
            kind: f[2].parse()?,
            serving: opt(f[3])?,
            target: opt(f[4])?,
            detail,
        })
    }
}

pub fn write_log<W: Write>(mut w: W, events: &[Event]) -> std::io::Result<()> {
    writeln!(w, "time_ms\tue_id\tevent\tserving\ttarget\tdetail")?;
    for e in events {
        writeln!(w, "{e}")?;
    }
    Ok(())
}

pub fn read_log<R: BufRead>(r: R) -> Result<Vec<Event>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 && line.starts_with("time_ms") || line.is_empty() {
            continue;
        }
        out.push(line.parse()?);
    }
    Ok(out)
}
