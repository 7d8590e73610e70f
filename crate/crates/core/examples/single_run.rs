// One simulation run with the default scenario at reduced scale, printing
// the KPI row and a breakdown of the event log.
//
//     cargo run --release --example single_run -- [key=value ...]
//
// Arguments are config overrides, e.g. `scenario.mode="BHO"`.

use std::collections::BTreeMap;

use chosim::config::Config;
use chosim::kpi::KpiReport;
use chosim::run_simulation;

fn run_with(overrides: &[String]) -> chosim::Result<()> {
    let mut base = vec!["scenario.n_ues=20".to_string(), "scenario.sim_duration_s=20.0".to_string()];
    base.extend_from_slice(overrides);
    let cfg = Config::from_toml_str("", &base)?;
    let out = run_simulation(&cfg)?;
    println!("{}", KpiReport::csv_header());
    println!("{}", out.report.csv_row());

    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &out.events {
        *kinds.entry(e.kind.as_str()).or_default() += 1;
    }
    println!("\n{} events over {} UEs x {} s:", out.events.len(), out.n_ues, out.duration_ms / 1000);
    for (k, n) in kinds {
        println!("  {k:<18} {n}");
    }
    Ok(())
}

fn run_example() -> chosim::Result<()> {
    run_with(&[])
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let res = if args.is_empty() { run_example() } else { run_with(&args) };
    if let Err(e) = res {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
