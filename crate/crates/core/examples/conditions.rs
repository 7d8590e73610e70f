// Execution-condition algebra: A3 with time-to-trigger, an NTN condition
// (A3 and a time window, or a distance-based location leaf) and an NR-U
// condition gated on channel occupancy. Conditions are stepped over a short
// synthetic trace, then loaded from TOML the way a config file declares them.
//
//     cargo run --example conditions

use chosim::conditions::{eval_condition, ConditionState, ExecCondition, Leaf, MeasInput};
use chosim::config::Config;

fn trace(name: &str, cond: &ExecCondition, inputs: &[(u64, MeasInput)]) {
    let mut st = ConditionState::default();
    let marks: String = inputs
        .iter()
        .map(|(t, x)| {
            st = eval_condition(cond, st, x, *t);
            match (st.entered, st.fulfilled) {
                (_, true) => 'F',
                (true, false) => 'e',
                _ => '.',
            }
        })
        .collect();
    println!("{name:<28} {marks}");
}

fn run_example() -> chosim::Result<()> {
    // candidate ramps from 6 dB below to 6 dB above serving over 2 s, then
    // the channel becomes busy for the last 400 ms
    let inputs: Vec<(u64, MeasInput)> = (0..60)
        .map(|i| {
            let t = i as u64 * 40;
            let x = MeasInput {
                m_serv: -80.0,
                m_cand: -86.0 + 0.25 * i as f64,
                now_s: t as f64 / 1000.0,
                d_serv_ref: 20.0 + 2.0 * i as f64,
                d_cand_ref: 140.0 - 2.0 * i as f64,
                m_c: if i < 50 { 0.9 } else { 0.2 },
            };
            (t, x)
        })
        .collect();

    println!("'.' idle, 'e' entered (TTT running), 'F' fulfilled; one mark per 40 ms\n");
    let a3 = Leaf::A3 { offset: 3.0, hys: 1.0 };
    trace("A3(3 dB, hys 1) TTT 0", &ExecCondition::single(a3, 0), &inputs);
    trace("A3(3 dB, hys 1) TTT 160", &ExecCondition::single(a3, 160), &inputs);
    let window = Leaf::TimeWindow { t1: 1.0, t2: 2.0 };
    trace("NTN: A3 and t in [1, 2] s", &ExecCondition::and(a3, window, 0), &inputs);
    let location = Leaf::Location { thresh_serv: 80.0, thresh_cand: 60.0 };
    trace("NTN: location 80 m / 60 m", &ExecCondition::single(location, 0), &inputs);
    let occupancy = Leaf::ChannelOccupancy { threshold: 0.5, hys: 0.05 };
    trace("NR-U: A3 and occupancy", &ExecCondition::and(a3, occupancy, 80), &inputs);

    let text = r#"
        [protocol.exec_condition]
        type = "and"
        ttt_ms = 160
        left = { type = "a5", thresh1_dbm = -95.0, thresh2_dbm = -85.0, hys_db = 1.0 }
        right = { type = "channel_occupancy", threshold = 0.5, hys = 0.05 }
    "#;
    let cfg = Config::from_toml_str(text, &[])?;
    println!("\nfrom TOML: {:?}", cfg.exec_condition()?);

    let nested = r#"
        [protocol.exec_condition]
        type = "and"
        left = { type = "a3", offset_db = 3.0 }
        right = { type = "and", left = { type = "time_window", t1_s = 0.0, t2_s = 5.0 }, right = { type = "a3" } }
    "#;
    match Config::from_toml_str(nested, &[]) {
        Ok(_) => println!("three-leaf condition accepted (unexpected)"),
        Err(e) => println!("three-leaf condition rejected: {e}"),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
