//! Event aggregation into mobility KPIs.
//!
//! Rates are normalised per UE per minute. A handover later classified as
//! ping-pong counts both as a success and as a ping-pong. Failures still
//! open when the run ends count as failures but in neither resolution bucket.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::Mode;
use crate::error::{ChoError, Result};
use crate::events::{Event, EventKind};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KpiCounters {
    pub ho_success: u64,
    pub all_mobility_fail: u64,
    pub rlf_source: u64,
    pub hof_target: u64,
    pub ping_pong: u64,
    pub failures_resolved_by_recovery: u64,
    pub failures_resolved_by_reest: u64,
    /// Candidate-milliseconds of held preparations.
    pub prepared_cell_ms: u64,
    /// Also count CHO-recovery completions in `ho_success`.
    pub count_recovery_as_ho_success: bool,
    open_preparations: BTreeMap<(usize, usize), u64>,
}

impl KpiCounters {
    pub fn new(count_recovery_as_ho_success: bool) -> Self {
        KpiCounters { count_recovery_as_ho_success, ..Default::default() }
    }

    pub fn ingest_event(&mut self, e: &Event) -> Result<()> {
        match e.kind {
            EventKind::HoSuccess => self.ho_success += 1,
            EventKind::PingPong => self.ping_pong += 1,
            EventKind::Rlf => {
                self.all_mobility_fail += 1;
                self.rlf_source += 1;
            }
            EventKind::Hof => {
                self.all_mobility_fail += 1;
                self.hof_target += 1;
            }
            EventKind::RecoveryResolved => {
                self.failures_resolved_by_recovery += 1;
                if self.count_recovery_as_ho_success {
                    self.ho_success += 1;
                }
            }
            EventKind::ReestResolved => self.failures_resolved_by_reest += 1,
            EventKind::CandidateAdded => {
                let cell = e.target.ok_or_else(|| ChoError::Schema("cand_added without target".into()))?;
                if self.open_preparations.insert((e.ue, cell), e.time_ms).is_some() {
                    return Err(ChoError::Schema(format!("ue {} cell {cell} prepared twice", e.ue)));
                }
            }
            EventKind::CandidateReleased => {
                let cell = e.target.ok_or_else(|| ChoError::Schema("cand_released without target".into()))?;
                let start = self
                    .open_preparations
                    .remove(&(e.ue, cell))
                    .ok_or_else(|| ChoError::Schema(format!("ue {} released unprepared cell {cell}", e.ue)))?;
                self.prepared_cell_ms += e.time_ms - start;
            }
            EventKind::MeasReport
            | EventKind::CommandLost
            | EventKind::ExecStart
            | EventKind::T310Start
            | EventKind::T310Stop
            | EventKind::RecoveryStart
            | EventKind::ReestStart
            | EventKind::OutOfCoverage => {}
        }
        Ok(())
    }

    /// Parses one log line and ingests it; unknown kinds are rejected.
    pub fn ingest_line(&mut self, line: &str) -> Result<()> {
        let e: Event = line.parse()?;
        self.ingest_event(&e)
    }

    /// Closes preparations still held at the end of the run.
    pub fn finalize(&mut self, end_ms: u64) {
        for (_, start) in std::mem::take(&mut self.open_preparations) {
            self.prepared_cell_ms += end_ms.saturating_sub(start);
        }
    }

    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a Event>, end_ms: u64, count_recovery: bool) -> Result<Self> {
        let mut c = KpiCounters::new(count_recovery);
        for e in events {
            c.ingest_event(e)?;
        }
        c.finalize(end_ms);
        Ok(c)
    }

    /// Resolved failures over all failures; `None` when there were none.
    pub fn recovery_rate(&self) -> Option<f64> {
        recovery_rate(self)
    }
}

pub fn recovery_rate(c: &KpiCounters) -> Option<f64> {
    (c.all_mobility_fail > 0).then(|| c.failures_resolved_by_recovery as f64 / c.all_mobility_fail as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub ho_succ: f64,
    pub all_fail: f64,
    pub pp: f64,
}

/// `count / (n_ues * minutes)` for each headline counter.
pub fn normalize(c: &KpiCounters, n_ues: usize, duration_s: f64) -> Result<Rates> {
    if n_ues == 0 || !(duration_s > 0.0) {
        return Err(ChoError::domain("normalize needs n_ues > 0 and duration > 0"));
    }
    let denom = n_ues as f64 * duration_s / 60.0;
    Ok(Rates {
        ho_succ: c.ho_success as f64 / denom,
        all_fail: c.all_mobility_fail as f64 / denom,
        pp: c.ping_pong as f64 / denom,
    })
}

/// Identifies a run within a sweep; rows are sorted by this key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunKey {
    pub mode: Mode,
    pub speed_kmh: f64,
    pub o_prep_db: f64,
    pub o_exec_db: f64,
    pub max_prepared: usize,
    pub seed: u64,
}

impl RunKey {
    pub fn cmp_key(&self, o: &RunKey) -> std::cmp::Ordering {
        self.mode
            .cmp(&o.mode)
            .then(self.speed_kmh.total_cmp(&o.speed_kmh))
            .then(self.o_prep_db.total_cmp(&o.o_prep_db))
            .then(self.o_exec_db.total_cmp(&o.o_exec_db))
            .then(self.max_prepared.cmp(&o.max_prepared))
            .then(self.seed.cmp(&o.seed))
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct KpiReport {
    pub key: RunKey,
    pub rates: Rates,
    pub cho_recovery_rate: Option<f64>,
    pub rlf_count: u64,
    pub hof_count: u64,
    pub prepared_cell_seconds: f64,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "mode",
    "speed_kmh",
    "o_prep_db",
    "o_exec_db",
    "max_prepared",
    "seed",
    "ho_succ_per_ue_min",
    "all_fail_per_ue_min",
    "pp_per_ue_min",
    "cho_recovery_rate",
    "rlf_count",
    "hof_count",
    "prepared_cell_seconds",
];

impl KpiReport {
    pub fn new(key: RunKey, c: &KpiCounters, n_ues: usize, duration_s: f64) -> Result<Self> {
        Ok(KpiReport {
            key,
            rates: normalize(c, n_ues, duration_s)?,
            cho_recovery_rate: recovery_rate(c),
            rlf_count: c.rlf_source,
            hof_count: c.hof_target,
            prepared_cell_seconds: c.prepared_cell_ms as f64 / 1000.0,
        })
    }

    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    /// Fixed-precision CSV line; undefined recovery rate is written as `NaN`.
    pub fn csv_row(&self) -> String {
        let k = &self.key;
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{:.6},{},{},{},{:.3}",
            k.mode,
            k.speed_kmh,
            k.o_prep_db,
            k.o_exec_db,
            k.max_prepared,
            k.seed,
            self.rates.ho_succ,
            self.rates.all_fail,
            self.rates.pp,
            self.cho_recovery_rate.map_or_else(|| "NaN".to_string(), |r| format!("{r:.6}")),
            self.rlf_count,
            self.hof_count,
            self.prepared_cell_seconds,
        )
    }
}
