//! Per-UE mobility state machine.
//!
//! One [`UeProtocolState`] is advanced by [`step_ue`] every simulation step.
//! Radio-dependent rules (RLF counters, preparation, execution and report
//! conditions) run only on measurement ticks; timers, delayed deliveries and
//! random-access attempts are checked every step.
//!
//! Phases:
//!
//! ```text
//!  Connected ──(BHO report)──▶ PreparingHo ──(command delivered)──▶ ExecutingHo
//!      │  └──────────(CHO condition fulfilled)──────────────────────▶    │
//!      │                                                        RA ok ◀──┤
//!   T310 expiry                                                   T304 expiry
//!      ▼                                                                 ▼
//!  Reestablishing (cell selection) ──(selected cell prepared)──▶ ExecutingHo[recovery]
//!      └──(otherwise)──▶ reestablishment ──▶ Connected
//! ```

mod candidates;

pub use candidates::{check_execution, check_preparation, detect_ping_pong};

use crate::conditions::{ConditionState, ExecCondition, Leaf, MeasInput};
use crate::config::{Config, Mode};
use crate::error::{ChoError, Result};
use crate::events::{Event, EventKind};
use crate::measure::MeasurementSet;
use crate::scenario::{Cell, Point};

/// Protocol constants resolved from a [`Config`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub mode: Mode,
    pub o_prep: f64,
    pub max_prepared: usize,
    pub pp_window_ms: u64,
    pub t310_ms: u64,
    pub t304_ms: u64,
    pub n310: u32,
    pub n311: u32,
    pub qout: f64,
    pub qin: f64,
    pub report_delay_ms: u64,
    pub prep_delay_ms: u64,
    pub cmd_delay_ms: u64,
    pub ra_interval_ms: u64,
    pub ra_threshold: f64,
    pub cell_selection_delay_ms: u64,
    pub recovery_fast_delay_ms: u64,
    pub reestablishment_delay_ms: u64,
    pub release_hys: f64,
    pub min_selection_rsrp: f64,
    pub channel_occupancy: f64,
    /// Execution condition for CHO candidates; BHO uses it as the report trigger.
    pub exec_condition: ExecCondition,
    /// Preparation trigger: candidate better than serving minus `o_prep`.
    pub prep_condition: ExecCondition,
}

impl ProtocolParams {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let p = &cfg.protocol;
        let s = &cfg.scenario;
        Ok(ProtocolParams {
            mode: s.mode,
            o_prep: s.o_prep_db,
            max_prepared: s.max_prepared.min(8),
            pp_window_ms: s.pp_window_ms,
            t310_ms: p.t310_ms,
            t304_ms: p.t304_ms,
            n310: p.n310,
            n311: p.n311,
            qout: cfg.qout_db(),
            qin: cfg.qin_db(),
            report_delay_ms: p.report_delay_ms,
            prep_delay_ms: p.prep_delay_ms,
            cmd_delay_ms: p.cmd_delay_ms,
            ra_interval_ms: p.ra_interval_ms,
            ra_threshold: cfg.ra_threshold_db(),
            cell_selection_delay_ms: p.cell_selection_delay_ms,
            recovery_fast_delay_ms: p.recovery_fast_delay_ms,
            reestablishment_delay_ms: p.reestablishment_delay_ms,
            release_hys: p.release_hys_db,
            min_selection_rsrp: p.min_selection_rsrp_dbm,
            channel_occupancy: p.channel_occupancy,
            exec_condition: cfg.exec_condition()?,
            prep_condition: ExecCondition::single(
                Leaf::A3 { offset: -s.o_prep_db, hys: 0.0 },
                p.prep_ttt_ms,
            ),
        })
    }

    /// Report (or preparation request) to command delivery.
    pub fn command_latency_ms(&self) -> u64 {
        self.report_delay_ms + self.prep_delay_ms + self.cmd_delay_ms
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecKind {
    Bho,
    Cho,
    Recovery,
}

impl ExecKind {
    fn detail(self) -> &'static str {
        match self {
            ExecKind::Bho => "bho",
            ExecKind::Cho => "cho",
            ExecKind::Recovery => "recovery",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReestStage {
    CellSelection { until_ms: u64 },
    Reestablishing { cell: usize, done_at_ms: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Connected,
    /// BHO only: measurement report sent, waiting for the HO command.
    PreparingHo { target: usize, command_at_ms: u64 },
    ExecutingHo { target: usize, kind: ExecKind, next_attempt_ms: u64 },
    Reestablishing(ReestStage),
    /// No cell above the selection level.
    Down,
}

impl Phase {
    /// Phases in which the serving radio link is monitored.
    pub fn is_connected(&self) -> bool {
        matches!(self, Phase::Connected | Phase::PreparingHo { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedCandidate {
    pub cell_id: usize,
    pub exec_condition: ExecCondition,
    pub condition_state: ConditionState,
    pub prepared_at_ms: u64,
}

/// Preparation requested but command not yet delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PendingPreparation {
    pub cell_id: usize,
    pub deliver_at_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    RlfSource,
    HofTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    ChoRecovery,
    Reestablishment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailureRecord {
    pub kind: FailureKind,
    pub at_ms: u64,
    pub resolved_by: Option<Resolution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UeProtocolState {
    pub ue_id: usize,
    pub phase: Phase,
    pub serving_cell: usize,
    pub prepared: Vec<PreparedCandidate>,
    pub pending: Vec<PendingPreparation>,
    /// Start time of T310 when running.
    pub t310_started_ms: Option<u64>,
    /// Start time of T304 when running.
    pub t304_started_ms: Option<u64>,
    pub n310_count: u32,
    pub n311_count: u32,
    pub last_ho_completed_ms: Option<u64>,
    pub last_ho_source: Option<usize>,
    /// Per-cell trigger state: BHO report condition or CHO preparation condition.
    pub trigger_states: Vec<ConditionState>,
    pub failures: Vec<FailureRecord>,
}

/// Read-only inputs to one protocol step.
pub struct StepInput<'a> {
    pub now_ms: u64,
    /// True when `meas` was refreshed in this step.
    pub fresh: bool,
    pub meas: &'a MeasurementSet,
    pub cells: &'a [Cell],
    pub ue_position: Point,
}

impl StepInput<'_> {
    fn meas_input(&self, serving: usize, cand: usize, m_c: f64) -> MeasInput {
        MeasInput {
            m_serv: self.meas.l3(serving),
            m_cand: self.meas.l3(cand),
            now_s: self.now_ms as f64 / 1000.0,
            d_serv_ref: self.ue_position.distance(self.cells[serving].reference_point),
            d_cand_ref: self.ue_position.distance(self.cells[cand].reference_point),
            m_c,
        }
    }
}

impl UeProtocolState {
    pub fn new(ue_id: usize, serving_cell: usize, n_cells: usize) -> Self {
        UeProtocolState {
            ue_id,
            phase: Phase::Connected,
            serving_cell,
            prepared: Vec::new(),
            pending: Vec::new(),
            t310_started_ms: None,
            t304_started_ms: None,
            n310_count: 0,
            n311_count: 0,
            last_ho_completed_ms: None,
            last_ho_source: None,
            trigger_states: vec![ConditionState::default(); n_cells],
            failures: Vec::new(),
        }
    }

    pub fn open_failure(&self) -> Option<&FailureRecord> {
        self.failures.last().filter(|f| f.resolved_by.is_none())
    }

    fn event(&self, now: u64, kind: EventKind, target: Option<usize>) -> Event {
        Event::new(now, self.ue_id, kind, self.serving_cell, target)
    }

    fn release_all(&mut self, now: u64, ev: &mut Vec<Event>, detail: &'static str) {
        for c in self.prepared.drain(..) {
            ev.push(Event::new(now, self.ue_id, EventKind::CandidateReleased, self.serving_cell, Some(c.cell_id)).with_detail(detail));
        }
        self.pending.clear();
    }

    fn reset_triggers(&mut self) {
        self.trigger_states.iter_mut().for_each(|s| *s = ConditionState::default());
    }

    /// Checks the structural invariants of the state machine.
    pub fn check_invariants(&self, max_prepared: usize, now_ms: u64) -> Result<()> {
        let bad = |what: String| Err(ChoError::Invariant { at_ms: now_ms, ue: self.ue_id, what });
        if self.prepared.len() > max_prepared || self.prepared.len() > 8 {
            return bad(format!("{} prepared candidates (max {max_prepared})", self.prepared.len()));
        }
        if self.t310_started_ms.is_some() && self.t304_started_ms.is_some() {
            return bad("T310 and T304 running together".into());
        }
        if self.t310_started_ms.is_some() && !self.phase.is_connected() {
            return bad(format!("T310 running in phase {:?}", self.phase));
        }
        let executing = matches!(self.phase, Phase::ExecutingHo { .. });
        if self.t304_started_ms.is_some() != executing {
            return bad(format!("T304 state {:?} in phase {:?}", self.t304_started_ms, self.phase));
        }
        for (i, c) in self.prepared.iter().enumerate() {
            if c.cell_id == self.serving_cell {
                return bad(format!("serving cell {} is prepared", c.cell_id));
            }
            if self.prepared[..i].iter().any(|o| o.cell_id == c.cell_id) {
                return bad(format!("cell {} prepared twice", c.cell_id));
            }
        }
        let open = self.failures.iter().filter(|f| f.resolved_by.is_none()).count();
        let recovering = matches!(
            self.phase,
            Phase::Reestablishing(_) | Phase::Down | Phase::ExecutingHo { kind: ExecKind::Recovery, .. }
        );
        if open > 1 || (open == 1) != recovering {
            return bad(format!("{open} open failures in phase {:?}", self.phase));
        }
        if open == 1 && self.failures.last().is_some_and(|f| f.resolved_by.is_some()) {
            return bad("an older failure is still open".into());
        }
        Ok(())
    }
}

/// Advances one UE by one simulation step and returns the emitted events.
///
/// Order: RLF monitoring, CHO preparation, CHO execution, BHO reporting,
/// random access, recovery.
pub fn step_ue(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams) -> Vec<Event> {
    let mut ev = Vec::new();
    let now = inp.now_ms;

    if ue.phase.is_connected() {
        rlf_monitor(ue, inp, p, &mut ev);
    }

    if p.mode == Mode::CHO && ue.phase == Phase::Connected {
        check_preparation(ue, inp, p, &mut ev);
        if inp.fresh {
            if let Some(target) = check_execution(ue, inp, p) {
                start_execution(ue, target, ExecKind::Cho, now, p, &mut ev);
            }
        }
    }

    if p.mode == Mode::BHO && ue.phase.is_connected() {
        baseline_ho(ue, inp, p, &mut ev);
    }

    if matches!(ue.phase, Phase::ExecutingHo { .. }) {
        random_access(ue, inp, p, &mut ev);
    }

    if matches!(ue.phase, Phase::Reestablishing(_) | Phase::Down) {
        recover(ue, inp, p, &mut ev);
    }
    ev
}

/// N310/N311 counting on measurement ticks and T310 supervision.
pub fn rlf_monitor(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let now = inp.now_ms;
    if inp.fresh {
        let sinr = inp.meas.sinr(ue.serving_cell);
        match ue.t310_started_ms {
            None => {
                ue.n310_count = if sinr < p.qout { ue.n310_count + 1 } else { 0 };
                if ue.n310_count >= p.n310 {
                    ue.t310_started_ms = Some(now);
                    ue.n310_count = 0;
                    ue.n311_count = 0;
                    ev.push(ue.event(now, EventKind::T310Start, None));
                }
            }
            Some(_) => {
                ue.n311_count = if sinr > p.qin { ue.n311_count + 1 } else { 0 };
                if ue.n311_count >= p.n311 {
                    ue.t310_started_ms = None;
                    ue.n311_count = 0;
                    ev.push(ue.event(now, EventKind::T310Stop, None));
                }
            }
        }
    }
    if let Some(start) = ue.t310_started_ms {
        if now - start >= p.t310_ms {
            declare_failure(ue, FailureKind::RlfSource, now, p, ev);
        }
    }
}

fn declare_failure(ue: &mut UeProtocolState, kind: FailureKind, now: u64, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let (ev_kind, target) = match (kind, ue.phase) {
        (FailureKind::HofTarget, Phase::ExecutingHo { target, .. }) => (EventKind::Hof, Some(target)),
        (FailureKind::HofTarget, _) => (EventKind::Hof, None),
        (FailureKind::RlfSource, _) => (EventKind::Rlf, None),
    };
    ev.push(ue.event(now, ev_kind, target));
    ue.failures.push(FailureRecord { kind, at_ms: now, resolved_by: None });
    ue.t310_started_ms = None;
    ue.t304_started_ms = None;
    ue.n310_count = 0;
    ue.n311_count = 0;
    ue.pending.clear();
    ue.reset_triggers();
    ue.last_ho_completed_ms = None;
    ue.last_ho_source = None;
    ue.phase = Phase::Reestablishing(ReestStage::CellSelection { until_ms: now + p.cell_selection_delay_ms });
}

fn start_execution(ue: &mut UeProtocolState, target: usize, kind: ExecKind, now: u64, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let first = match kind {
        ExecKind::Recovery => now + p.recovery_fast_delay_ms,
        ExecKind::Bho | ExecKind::Cho => now + p.ra_interval_ms,
    };
    let kind_ev = if kind == ExecKind::Recovery { EventKind::RecoveryStart } else { EventKind::ExecStart };
    ev.push(ue.event(now, kind_ev, Some(target)).with_detail(kind.detail()));
    ue.t310_started_ms = None;
    ue.n310_count = 0;
    ue.n311_count = 0;
    ue.t304_started_ms = Some(now);
    ue.phase = Phase::ExecutingHo { target, kind, next_attempt_ms: first };
}

/// Release-15 handover: report on a fulfilled trigger, then the command
/// arrives after the signalling delays, and only if the serving link is out
/// of outage at that moment.
pub fn baseline_ho(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let now = inp.now_ms;
    match ue.phase {
        Phase::Connected if inp.fresh => {
            let mut best: Option<(usize, f64)> = None;
            for cell in 0..ue.trigger_states.len() {
                if cell == ue.serving_cell {
                    continue;
                }
                let input = inp.meas_input(ue.serving_cell, cell, p.channel_occupancy);
                let st = crate::conditions::eval_condition(&p.exec_condition, ue.trigger_states[cell], &input, now);
                ue.trigger_states[cell] = st;
                if st.fulfilled && best.is_none_or(|(_, r)| input.m_cand > r) {
                    best = Some((cell, input.m_cand));
                }
            }
            if let Some((target, _)) = best {
                ev.push(ue.event(now, EventKind::MeasReport, Some(target)).with_detail("ho"));
                ue.phase = Phase::PreparingHo { target, command_at_ms: now + p.command_latency_ms() };
            }
        }
        Phase::PreparingHo { target, command_at_ms } if now >= command_at_ms => {
            if inp.meas.sinr(ue.serving_cell) >= p.qout {
                start_execution(ue, target, ExecKind::Bho, now, p, ev);
            } else {
                ev.push(ue.event(now, EventKind::CommandLost, Some(target)).with_detail("ho"));
                ue.reset_triggers();
                ue.phase = Phase::Connected;
            }
        }
        _ => {}
    }
}

/// One attempt per RA occasion; success needs target SINR at or above the
/// RA threshold. T304 expiry ends the attempt.
pub fn random_access(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let now = inp.now_ms;
    let Phase::ExecutingHo { target, kind, next_attempt_ms } = ue.phase else {
        return;
    };
    if now >= next_attempt_ms {
        if inp.meas.sinr(target) >= p.ra_threshold {
            complete_access(ue, target, kind, now, p, ev);
            return;
        }
        ue.phase = Phase::ExecutingHo { target, kind, next_attempt_ms: next_attempt_ms + p.ra_interval_ms };
    }
    let started = ue.t304_started_ms.expect("T304 runs while executing");
    if now - started >= p.t304_ms {
        match kind {
            ExecKind::Bho | ExecKind::Cho => declare_failure(ue, FailureKind::HofTarget, now, p, ev),
            ExecKind::Recovery => {
                // the stored configuration did not work; fall back to cell selection
                ue.t304_started_ms = None;
                ue.prepared.retain(|c| c.cell_id != target);
                ev.push(Event::new(now, ue.ue_id, EventKind::CandidateReleased, ue.serving_cell, Some(target)).with_detail("recovery"));
                ue.phase = Phase::Reestablishing(ReestStage::CellSelection { until_ms: now + p.cell_selection_delay_ms });
            }
        }
    }
}

fn complete_access(ue: &mut UeProtocolState, target: usize, kind: ExecKind, now: u64, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let source = ue.serving_cell;
    match kind {
        ExecKind::Bho | ExecKind::Cho => {
            ev.push(ue.event(now, EventKind::HoSuccess, Some(target)).with_detail(kind.detail()));
            if detect_ping_pong(ue, target, now, p.pp_window_ms) {
                ev.push(ue.event(now, EventKind::PingPong, Some(target)));
            }
            ue.last_ho_source = Some(source);
            ue.last_ho_completed_ms = Some(now);
        }
        ExecKind::Recovery => {
            ev.push(ue.event(now, EventKind::RecoveryResolved, Some(target)));
            resolve(ue, Resolution::ChoRecovery);
        }
    }
    ue.release_all(now, ev, "ho");
    ue.serving_cell = target;
    ue.t304_started_ms = None;
    ue.t310_started_ms = None;
    ue.n310_count = 0;
    ue.n311_count = 0;
    ue.reset_triggers();
    ue.phase = Phase::Connected;
}

fn resolve(ue: &mut UeProtocolState, how: Resolution) {
    if let Some(f) = ue.failures.last_mut() {
        debug_assert!(f.resolved_by.is_none());
        f.resolved_by = Some(how);
    }
}

/// Post-failure handling: cell selection, then either recovery through a
/// prepared candidate or legacy reestablishment.
pub fn recover(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let now = inp.now_ms;
    match ue.phase {
        Phase::Reestablishing(ReestStage::CellSelection { until_ms }) if now >= until_ms => select_cell(ue, inp, p, ev),
        Phase::Down if inp.fresh => select_cell(ue, inp, p, ev),
        Phase::Reestablishing(ReestStage::Reestablishing { cell, done_at_ms }) if now >= done_at_ms => {
            if inp.meas.sinr(cell) >= p.qout {
                ev.push(ue.event(now, EventKind::ReestResolved, Some(cell)));
                resolve(ue, Resolution::Reestablishment);
                ue.release_all(now, ev, "recovery");
                ue.serving_cell = cell;
                ue.reset_triggers();
                ue.phase = Phase::Connected;
            } else {
                ue.phase = Phase::Reestablishing(ReestStage::CellSelection { until_ms: now + p.cell_selection_delay_ms });
            }
        }
        _ => {}
    }
}

/// Strongest cell by latest consolidated RSRP above the selection level.
pub fn strongest_cell(meas: &MeasurementSet, min_rsrp: f64) -> Option<usize> {
    meas.cells
        .iter()
        .filter(|m| m.l1_cell_rsrp >= min_rsrp)
        .fold(None, |best: Option<(usize, f64)>, m| match best {
            Some((_, r)) if r >= m.l1_cell_rsrp => best,
            _ => Some((m.cell_id, m.l1_cell_rsrp)),
        })
        .map(|(c, _)| c)
}

fn select_cell(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let now = inp.now_ms;
    let Some(cell) = strongest_cell(inp.meas, p.min_selection_rsrp) else {
        if ue.phase != Phase::Down {
            ev.push(ue.event(now, EventKind::OutOfCoverage, None));
        }
        ue.phase = Phase::Down;
        return;
    };
    if ue.prepared.iter().any(|c| c.cell_id == cell) {
        start_execution(ue, cell, ExecKind::Recovery, now, p, ev);
    } else {
        ev.push(ue.event(now, EventKind::ReestStart, Some(cell)));
        ue.phase = Phase::Reestablishing(ReestStage::Reestablishing {
            cell,
            done_at_ms: now + p.reestablishment_delay_ms,
        });
    }
}

#[cfg(test)]
mod tests;
