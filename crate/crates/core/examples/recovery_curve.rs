// CHO recovery rate as the number of prepared cells grows from 1 to 8, at
// 30 and 60 km/h. Reduced scale by default; `--full` uses the settings of
// configs/recovery_curve.toml.
//
//     cargo run --release --example recovery_curve -- [--full]

use std::path::PathBuf;

use chosim::config::Config;
use chosim::plot::{emit_plot_data, read_rows, recovery_series, Figure};
use chosim::sweep::{run_sweep, write_csv_file, SweepOptions};

fn run_with(full: bool) -> chosim::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/recovery_curve.toml");
    let scale: Vec<String> = if full {
        vec![]
    } else {
        vec!["scenario.n_ues=10".into(), "scenario.sim_duration_s=10.0".into(), "sweep.seeds=[1]".into()]
    };
    let cfg = Config::load(&path, &scale)?;
    let out = std::env::temp_dir().join("chosim_recovery_curve");
    std::fs::create_dir_all(&out)?;
    let reports = run_sweep(&cfg, &SweepOptions { quiet: true, ..Default::default() })?;
    let csv = out.join("kpi.csv");
    write_csv_file(&csv, &reports)?;

    for s in recovery_series(&read_rows(&csv)?) {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|(m, r)| if r.is_nan() { format!("{m}: -") } else { format!("{m}: {r:.3}") })
            .collect();
        println!("{} km/h, o_prep {} / o_exec {}  {}", s.speed_kmh, s.o_prep_db, s.o_exec_db, pts.join("  "));
    }
    for p in emit_plot_data(&csv, Figure::RecoveryCurve, &out.join("plots"))? {
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
