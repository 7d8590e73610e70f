// Writes the event log of a short CHO run, reads it back and recomputes the
// KPIs from the file alone. The replayed report matches the live one.
//
//     cargo run --example event_log

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use chosim::config::Config;
use chosim::events::{read_log, write_log};
use chosim::{run_simulation, KpiCounters, KpiReport};

fn run_example() -> chosim::Result<()> {
    let cfg = Config::from_toml_str(
        "[scenario]\nmode = \"CHO\"\nn_ues = 10\nsim_duration_s = 20.0\nue_speed_kmh = 60.0\n",
        &[],
    )?;
    let out = run_simulation(&cfg)?;

    let path = std::env::temp_dir().join("chosim_event_log.tsv");
    let mut w = BufWriter::new(File::create(&path)?);
    write_log(&mut w, &out.events)?;
    w.flush()?;
    println!("wrote {} events to {}", out.events.len(), path.display());
    for e in out.events.iter().take(8) {
        println!("  {e}");
    }

    let events = read_log(BufReader::new(File::open(&path)?))?;
    let counters = KpiCounters::from_events(&events, out.duration_ms, cfg.protocol.count_recovery_as_ho_success)?;
    let replay = KpiReport::new(out.key, &counters, out.n_ues, out.duration_ms as f64 / 1000.0)?;
    println!("live:   {}", out.report.csv_row());
    println!("replay: {}", replay.csv_row());
    assert_eq!(replay.csv_row(), out.report.csv_row());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
