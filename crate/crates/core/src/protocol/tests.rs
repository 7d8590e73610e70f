use super::*;
use crate::config::{Config, Mode};
use crate::events::EventKind;
use crate::measure::MeasurementSet;
use crate::scenario::{build_layout, Point};

struct Harness {
    cells: Vec<Cell>,
    params: ProtocolParams,
    ue: UeProtocolState,
    meas: MeasurementSet,
    now: u64,
    events: Vec<Event>,
}

impl Harness {
    fn new(mode: Mode, tweak: impl FnOnce(&mut Config)) -> Self {
        let mut cfg = Config::default();
        cfg.scenario.mode = mode;
        tweak(&mut cfg);
        let cells = build_layout(&cfg.scenario, 8).unwrap();
        let n = cells.len();
        Harness {
            params: ProtocolParams::from_config(&cfg).unwrap(),
            ue: UeProtocolState::new(0, 0, n),
            meas: MeasurementSet::synthetic(&vec![-120.0; n], &vec![-30.0; n]),
            cells,
            now: 0,
            events: Vec::new(),
        }
    }

    /// Sets cell RSRPs (others at -120) and per-cell SINRs (others at -30).
    fn radio(&mut self, rsrp: &[(usize, f64)], sinr: &[(usize, f64)]) {
        let n = self.cells.len();
        let mut r = vec![-120.0; n];
        let mut s = vec![-30.0; n];
        for &(c, v) in rsrp {
            r[c] = v;
        }
        for &(c, v) in sinr {
            s[c] = v;
        }
        self.meas.set(&r, &s);
    }

    /// Runs 10 ms steps for `ms`, measurement tick every 40 ms.
    fn run(&mut self, ms: u64) {
        let end = self.now + ms;
        while self.now < end {
            self.now += 10;
            let inp = StepInput {
                now_ms: self.now,
                fresh: self.now % 40 == 0,
                meas: &self.meas,
                cells: &self.cells,
                ue_position: Point::ORIGIN,
            };
            let ev = step_ue(&mut self.ue, &inp, &self.params);
            self.ue.check_invariants(self.params.max_prepared, self.now).unwrap();
            self.events.extend(ev);
        }
    }

    fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    fn first(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }
}

#[test]
fn quiescent_step_changes_nothing() {
    for mode in [Mode::BHO, Mode::CHO] {
        let mut h = Harness::new(mode, |_| {});
        h.radio(&[(0, -70.0), (5, -90.0)], &[(0, 15.0)]);
        let before = h.ue.clone();
        h.run(2000);
        assert_eq!(h.ue.phase, Phase::Connected);
        assert_eq!(h.ue.serving_cell, before.serving_cell);
        assert!(h.events.is_empty(), "{:?}", h.events);
    }
}

#[test]
fn cho_execution_stops_t310_and_starts_t304() {
    let mut h = Harness::new(Mode::CHO, |_| {});
    // cell 5 within o_prep: prepared after signalling delay
    h.radio(&[(0, -75.0), (5, -77.0)], &[(0, 10.0), (5, 5.0)]);
    h.run(200);
    assert_eq!(h.ue.prepared.len(), 1);
    assert_eq!(h.ue.prepared[0].cell_id, 5);
    // serving collapses: T310 starts after N310 ticks
    h.radio(&[(0, -75.0), (5, -77.0)], &[(0, -12.0), (5, 5.0)]);
    h.run(240);
    assert!(h.ue.t310_started_ms.is_some());
    // candidate becomes 3 dB better for the TTT
    h.radio(&[(0, -80.0), (5, -70.0)], &[(0, -12.0), (5, -30.0)]);
    h.run(200);
    match h.ue.phase {
        Phase::ExecutingHo { target: 5, kind: ExecKind::Cho, .. } => {}
        other => panic!("unexpected phase {other:?}"),
    }
    assert!(h.ue.t310_started_ms.is_none());
    assert!(h.ue.t304_started_ms.is_some());
}

#[test]
fn t304_expiry_is_hof_then_recovery() {
    let mut h = Harness::new(Mode::CHO, |c| c.scenario.max_prepared = 2);
    h.radio(&[(0, -75.0), (5, -76.0), (9, -77.0)], &[(0, 10.0)]);
    h.run(200);
    assert_eq!(h.ue.prepared.len(), 2);
    // 5 wins execution, but its RA never succeeds
    h.radio(&[(0, -80.0), (5, -70.0), (9, -72.0)], &[(0, 0.0), (5, -20.0), (9, -20.0)]);
    h.run(200);
    assert!(matches!(h.ue.phase, Phase::ExecutingHo { target: 5, .. }));
    h.run(520);
    assert_eq!(h.count(EventKind::Hof), 1);
    assert_eq!(h.ue.failures[0].kind, FailureKind::HofTarget);
    // strongest cell at selection time is prepared cell 9 with usable SINR
    h.radio(&[(0, -80.0), (5, -75.0), (9, -70.0)], &[(9, 3.0)]);
    h.run(400);
    assert_eq!(h.count(EventKind::RecoveryResolved), 1);
    assert_eq!(h.ue.serving_cell, 9);
    assert_eq!(h.ue.failures[0].resolved_by, Some(Resolution::ChoRecovery));
    assert!(h.ue.prepared.is_empty());
    assert_eq!(h.count(EventKind::HoSuccess), 0);
}

#[test]
fn recovery_requires_selected_cell_to_be_prepared() {
    let mut h = Harness::new(Mode::CHO, |c| c.scenario.max_prepared = 4);
    h.radio(&[(0, -75.0), (3, -76.0), (4, -76.5), (5, -77.0), (6, -77.5)], &[(0, 10.0)]);
    h.run(200);
    assert_eq!(h.ue.prepared.len(), 4);
    // serving in outage until RLF, prepared cells never 3 dB better
    h.radio(&[(0, -75.0), (3, -76.0), (4, -76.5), (5, -77.0), (6, -77.5), (12, -60.0)], &[(0, -15.0), (12, 5.0)]);
    h.run(1500);
    assert_eq!(h.count(EventKind::Rlf), 1);
    h.run(500);
    assert_eq!(h.count(EventKind::ReestResolved), 1);
    assert_eq!(h.count(EventKind::RecoveryResolved), 0);
    assert_eq!(h.ue.serving_cell, 12);
    assert_eq!(h.ue.failures[0].resolved_by, Some(Resolution::Reestablishment));
}

#[test]
fn bho_without_candidates_always_reestablishes() {
    let mut h = Harness::new(Mode::BHO, |_| {});
    h.radio(&[(0, -75.0), (7, -60.0)], &[(0, -15.0), (7, 5.0)]);
    h.run(3000);
    assert!(h.count(EventKind::Rlf) + h.count(EventKind::Hof) >= 1 || h.count(EventKind::HoSuccess) == 0);
    assert_eq!(h.count(EventKind::RecoveryResolved), 0);
    assert!(h.ue.prepared.is_empty());
}

#[test]
fn preparation_threshold_and_replacement() {
    let mut h = Harness::new(Mode::CHO, |_| {});
    // -77 > -75 - 3
    h.radio(&[(0, -75.0), (5, -77.0)], &[(0, 10.0)]);
    h.run(120);
    assert_eq!(h.ue.prepared.iter().map(|c| c.cell_id).collect::<Vec<_>>(), vec![5]);
    // -78.5 does not qualify for a second slot anyway; a stronger one replaces
    h.radio(&[(0, -75.0), (5, -77.0), (6, -76.0)], &[(0, 10.0)]);
    h.run(120);
    assert_eq!(h.ue.prepared.iter().map(|c| c.cell_id).collect::<Vec<_>>(), vec![6]);
    assert!(h.ue.prepared.len() <= 1);
    // release below serving - o_prep - release_hys
    h.radio(&[(0, -75.0), (6, -80.5)], &[(0, 10.0)]);
    h.run(40);
    assert!(h.ue.prepared.is_empty());
}

#[test]
fn preparation_lost_in_outage() {
    let mut h = Harness::new(Mode::CHO, |_| {});
    h.radio(&[(0, -75.0), (5, -70.0)], &[(0, -9.0)]);
    h.run(120);
    assert!(h.ue.prepared.is_empty());
    assert!(h.count(EventKind::CommandLost) >= 1);
}

#[test]
fn execution_picks_strongest_fulfilled() {
    let mut h = Harness::new(Mode::CHO, |c| c.scenario.max_prepared = 2);
    h.radio(&[(0, -75.0), (5, -76.0), (6, -76.5)], &[(0, 10.0)]);
    h.run(200);
    h.radio(&[(0, -80.0), (5, -72.0), (6, -70.0)], &[(0, 10.0)]);
    h.run(200);
    assert!(matches!(h.ue.phase, Phase::ExecutingHo { target: 6, .. }));
}

#[test]
fn execution_none_and_single() {
    let mut h = Harness::new(Mode::CHO, |_| {});
    h.radio(&[(0, -75.0), (5, -76.0)], &[(0, 10.0)]);
    h.run(400);
    assert_eq!(h.ue.phase, Phase::Connected);
    h.radio(&[(0, -75.0), (5, -71.0)], &[(0, 10.0), (5, 4.0)]);
    h.run(400);
    assert_eq!(h.count(EventKind::HoSuccess), 1);
    assert_eq!(h.ue.serving_cell, 5);
}

#[test]
fn bho_command_after_total_delay() {
    let mut h = Harness::new(Mode::BHO, |_| {});
    h.radio(&[(0, -75.0), (5, -70.0)], &[(0, 5.0), (5, 3.0)]);
    h.run(600);
    let mr = h.first(EventKind::MeasReport).unwrap().time_ms;
    let exec = h.first(EventKind::ExecStart).unwrap().time_ms;
    // first tick at 40 ms, TTT 160 ms
    assert_eq!(mr, 200);
    // command delivery rounded up to the 10 ms step grid
    assert_eq!(exec, mr + 70);
    assert_eq!(h.count(EventKind::HoSuccess), 1);
}

#[test]
fn bho_command_lost_in_outage() {
    let mut h = Harness::new(Mode::BHO, |_| {});
    h.radio(&[(0, -75.0), (5, -70.0)], &[(0, 5.0), (5, 3.0)]);
    h.run(220);
    assert!(matches!(h.ue.phase, Phase::PreparingHo { .. }));
    h.radio(&[(0, -85.0), (5, -70.0)], &[(0, -8.5), (5, 3.0)]);
    h.run(60);
    assert_eq!(h.count(EventKind::CommandLost), 1);
    assert_eq!(h.count(EventKind::ExecStart), 0);
}

#[test]
fn rlf_timer_paths() {
    let mut h = Harness::new(Mode::BHO, |_| {});
    h.radio(&[(0, -75.0)], &[(0, -9.0)]);
    h.run(200);
    let start = h.first(EventKind::T310Start).unwrap().time_ms;
    assert_eq!(start, 200);
    h.run(1000);
    assert_eq!(h.first(EventKind::Rlf).unwrap().time_ms, start + 1000);

    let mut h = Harness::new(Mode::BHO, |_| {});
    h.radio(&[(0, -75.0)], &[(0, -9.0)]);
    h.run(400);
    assert!(h.ue.t310_started_ms.is_some());
    h.radio(&[(0, -75.0)], &[(0, -5.0)]);
    h.run(80);
    assert!(h.ue.t310_started_ms.is_none());
    assert_eq!(h.count(EventKind::T310Stop), 1);
    h.run(2000);
    assert_eq!(h.count(EventKind::Rlf), 0);
}

#[test]
fn ra_threshold_boundary() {
    for (sinr, ok) in [(-7.9, true), (-8.1, false)] {
        let mut h = Harness::new(Mode::CHO, |_| {});
        h.radio(&[(0, -75.0), (5, -76.0)], &[(0, 10.0)]);
        h.run(200);
        h.radio(&[(0, -75.0), (5, -71.0)], &[(0, 10.0), (5, sinr)]);
        h.run(1000);
        assert_eq!(h.count(EventKind::HoSuccess) == 1, ok, "sinr {sinr}");
        assert_eq!(h.count(EventKind::Hof) == 1, !ok, "sinr {sinr}");
    }
}

#[test]
fn ping_pong_window() {
    let mut ue = UeProtocolState::new(0, 3, 21);
    ue.last_ho_source = Some(3);
    ue.last_ho_completed_ms = Some(10_000);
    assert!(detect_ping_pong(&ue, 3, 10_900, 1000));
    assert!(!detect_ping_pong(&ue, 3, 11_500, 1000));
    assert!(detect_ping_pong(&ue, 3, 11_000, 1000));
    assert!(!detect_ping_pong(&ue, 7, 10_100, 1000));
}

#[test]
fn invariant_checker_catches_violations() {
    let mut ue = UeProtocolState::new(0, 0, 21);
    ue.t310_started_ms = Some(0);
    ue.t304_started_ms = Some(0);
    assert!(ue.check_invariants(1, 0).is_err());
    let mut ue = UeProtocolState::new(0, 0, 21);
    let cond = crate::conditions::ExecCondition::single(crate::conditions::Leaf::A3 { offset: 3.0, hys: 0.0 }, 0);
    for c in [1, 2] {
        ue.prepared.push(PreparedCandidate {
            cell_id: c,
            exec_condition: cond.clone(),
            condition_state: Default::default(),
            prepared_at_ms: 0,
        });
    }
    assert!(ue.check_invariants(1, 0).is_err());
    assert!(ue.check_invariants(2, 0).is_ok());
}
