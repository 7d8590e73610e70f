// BHO against CHO at 3, 30 and 60 km/h over three seeds (18 runs), written
// as a KPI CSV plus bar-chart data. Runs at reduced scale unless `--full`
// is given, which uses the 100 UE x 60 s setting of configs/speed_sweep.toml.
//
//     cargo run --release --example speed_sweep -- [--full]

use std::path::PathBuf;

use chosim::config::Config;
use chosim::plot::{bar_groups, emit_plot_data, read_rows, Figure};
use chosim::sweep::{run_sweep, write_csv_file, SweepOptions, SweepSpec};

fn run_with(full: bool) -> chosim::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/speed_sweep.toml");
    let scale: Vec<String> = if full {
        vec![]
    } else {
        vec!["scenario.n_ues=10".into(), "scenario.sim_duration_s=10.0".into()]
    };
    let cfg = Config::load(&path, &scale)?;
    println!("{} runs of {} UEs x {} s", SweepSpec::from_config(&cfg).len(), cfg.scenario.n_ues, cfg.scenario.sim_duration_s);

    let out = std::env::temp_dir().join("chosim_speed_sweep");
    std::fs::create_dir_all(&out)?;
    let reports = run_sweep(&cfg, &SweepOptions { quiet: true, ..Default::default() })?;
    let csv = out.join("kpi.csv");
    write_csv_file(&csv, &reports)?;

    println!("{:<4} {:>5} {:>9} {:>9} {:>9}", "mode", "km/h", "ho_succ", "all_fail", "pp");
    for g in bar_groups(&read_rows(&csv)?) {
        println!("{:<4} {:>5} {:>9.3} {:>9.3} {:>9.3}", g.mode, g.speed_kmh, g.ho_succ, g.all_fail, g.pp);
    }
    for p in emit_plot_data(&csv, Figure::KpiBars, &out.join("plots"))? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run_example() -> chosim::Result<()> {
    run_with(false)
}

fn main() {
    let res = if std::env::args().any(|a| a == "--full") { run_with(true) } else { run_example() };
    if let Err(e) = res {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
