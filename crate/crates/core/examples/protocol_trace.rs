// Drives the per-UE state machine with hand-made measurements instead of
// the radio model. The UE first prepares and executes a conditional
// handover, then loses its serving link and recovers onto a prepared cell.
//
//     cargo run --example protocol_trace

use chosim::config::{Config, Mode};
use chosim::events::EventKind;
use chosim::measure::MeasurementSet;
use chosim::protocol::{step_ue, ProtocolParams, StepInput, UeProtocolState};
use chosim::scenario::{build_layout, Point};

fn run_example() -> chosim::Result<()> {
    let mut cfg = Config::default();
    cfg.scenario.mode = Mode::CHO;
    cfg.scenario.max_prepared = 2;
    let cells = build_layout(&cfg.scenario, cfg.radio.n_beams)?;
    let params = ProtocolParams::from_config(&cfg)?;
    let n = cells.len();
    let mut ue = UeProtocolState::new(0, 0, n);
    let mut meas = MeasurementSet::synthetic(&vec![-120.0; n], &vec![-30.0; n]);

    // (from_ms, [(cell, rsrp, sinr)]) applied until the next entry
    let script: &[(u64, &[(usize, f64, f64)])] = &[
        (0, &[(0, -70.0, 12.0), (4, -80.0, -5.0)]),
        (400, &[(0, -70.0, 6.0), (4, -72.0, 3.0), (8, -73.0, 1.0)]),
        (1200, &[(0, -75.0, -2.0), (4, -68.0, 6.0), (8, -72.0, 2.0)]),
        (2500, &[(4, -70.0, 8.0), (8, -71.5, 0.0), (0, -78.0, -6.0)]),
        (4000, &[(4, -70.5, -15.0), (8, -70.0, 5.0), (0, -85.0, -10.0)]),
    ];

    let mut now = 0;
    let mut muted = 0;
    let mut lost = Vec::new();
    while now < 7000 {
        now += 10;
        if let Some((_, radio)) = script.iter().rev().find(|(t, _)| *t < now) {
            let mut rsrp = vec![-120.0; n];
            let mut sinr = vec![-30.0; n];
            for &(c, r, s) in radio.iter() {
                rsrp[c] = r;
                sinr[c] = s;
            }
            meas.set(&rsrp, &sinr);
        }
        let inp = StepInput { now_ms: now, fresh: now % 40 == 0, meas: &meas, cells: &cells, ue_position: Point::ORIGIN };
        for e in step_ue(&mut ue, &inp, &params) {
            // once a cell's command has been lost, its retries are only counted
            let retry = lost.contains(&(e.serving, e.target));
            if retry && matches!(e.kind, EventKind::CommandLost | EventKind::MeasReport) {
                muted += 1;
                continue;
            }
            if e.kind == EventKind::CommandLost {
                lost.push((e.serving, e.target));
            }
            println!("{e}");
        }
        ue.check_invariants(params.max_prepared, now)?;
    }
    if muted > 0 {
        println!("({muted} retried reports and lost commands not shown)");
    }
    println!("final: serving {} phase {:?}, failures {:?}", ue.serving_cell, ue.phase, ue.failures);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
