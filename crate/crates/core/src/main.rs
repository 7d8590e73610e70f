use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use chosim::config::Config;
use chosim::plot::{emit_plot_data, Figure};
use chosim::sweep::{run_sweep, write_csv_file, SweepOptions};
use chosim::Result;

/// Runs a single simulation or a sweep and writes `kpi.csv` into the output directory.
#[derive(Parser, Debug)]
#[command(name = "chosim", version)]
struct Args {
    /// TOML config; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `scenario.ue_speed_kmh=60` or `sweep.seeds=[1,2,3]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Write one event log per run under `<out>/traces`.
    #[arg(long)]
    trace: bool,
    /// Worker threads across runs (0 = all cores).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long)]
    quiet: bool,
    /// Also emit plot data (`kpi_bars` or `recovery_curve`) into `<out>/plots`.
    #[arg(long, value_name = "FIGURE")]
    plot: Vec<Figure>,
    /// Skip simulation and plot from an existing CSV.
    #[arg(long, value_name = "CSV", requires = "plot")]
    from_csv: Option<PathBuf>,
}

fn run(args: &Args) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let csv_path = match &args.from_csv {
        Some(p) => p.clone(),
        None => {
            let cfg = match &args.config {
                Some(p) => Config::load(p, &args.set)?,
                None => Config::from_toml_str("", &args.set)?,
            };
            let opts = SweepOptions {
                parallel: args.parallel,
                trace_dir: args.trace.then(|| args.out.join("traces")),
                quiet: args.quiet,
            };
            let reports = run_sweep(&cfg, &opts)?;
            let path = args.out.join("kpi.csv");
            write_csv_file(&path, &reports)?;
            if !args.quiet {
                eprintln!("wrote {} rows to {}", reports.len(), path.display());
            }
            path
        }
    };
    for &fig in &args.plot {
        for p in emit_plot_data(&csv_path, fig, &args.out.join("plots"))? {
            if !args.quiet {
                eprintln!("wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
