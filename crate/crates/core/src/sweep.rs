//! Parameter sweeps: cross product of the `sweep.*` lists, one run each.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{Config, Mode};
use crate::error::{ChoError, Result};
use crate::events::write_log;
use crate::kpi::{KpiReport, RunKey};
use crate::sim::{run_simulation_with, RunOptions};

/// Lists spanning the run set. An empty list in the config means "use the
/// scenario value".
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub speeds: Vec<f64>,
    pub modes: Vec<Mode>,
    pub o_prep_values: Vec<f64>,
    pub o_exec_values: Vec<f64>,
    pub max_prepared_values: Vec<usize>,
    pub seeds: Vec<u64>,
}

fn or_single<T: Clone>(list: &[T], fallback: T) -> Vec<T> {
    if list.is_empty() {
        vec![fallback]
    } else {
        list.to_vec()
    }
}

impl SweepSpec {
    pub fn from_config(cfg: &Config) -> Self {
        let (s, w) = (&cfg.scenario, &cfg.sweep);
        SweepSpec {
            speeds: or_single(&w.speeds_kmh, s.ue_speed_kmh),
            modes: or_single(&w.modes, s.mode),
            o_prep_values: or_single(&w.o_prep_db, s.o_prep_db),
            o_exec_values: or_single(&w.o_exec_db, s.o_exec_db),
            max_prepared_values: or_single(&w.max_prepared, s.max_prepared),
            seeds: or_single(&w.seeds, s.seed),
        }
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
            * self.modes.len()
            * self.o_prep_values.len()
            * self.o_exec_values.len()
            * self.max_prepared_values.len()
            * self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn keys(&self) -> Vec<RunKey> {
        let mut out = Vec::with_capacity(self.len());
        for &mode in &self.modes {
            for &speed_kmh in &self.speeds {
                for &o_prep_db in &self.o_prep_values {
                    for &o_exec_db in &self.o_exec_values {
                        for &max_prepared in &self.max_prepared_values {
                            for &seed in &self.seeds {
                                out.push(RunKey { mode, speed_kmh, o_prep_db, o_exec_db, max_prepared, seed });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// The single-run config for one sweep point; sweep lists are cleared so the
/// result describes exactly that run.
pub fn config_for(base: &Config, key: &RunKey) -> Config {
    let mut c = base.clone();
    c.scenario.mode = key.mode;
    c.scenario.ue_speed_kmh = key.speed_kmh;
    c.scenario.o_prep_db = key.o_prep_db;
    c.scenario.o_exec_db = key.o_exec_db;
    c.scenario.max_prepared = key.max_prepared;
    c.scenario.seed = key.seed;
    c.sweep = Default::default();
    c
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses rayon's default.
    pub parallel: usize,
    /// Directory for per-run event logs.
    pub trace_dir: Option<PathBuf>,
    pub quiet: bool,
}

pub fn trace_file_name(key: &RunKey) -> String {
    format!(
        "events_{}_v{}_p{}_e{}_m{}_s{}.tsv",
        key.mode, key.speed_kmh, key.o_prep_db, key.o_exec_db, key.max_prepared, key.seed
    )
}

/// Runs every point of the sweep and returns reports sorted by key.
pub fn run_sweep(base: &Config, opts: &SweepOptions) -> Result<Vec<KpiReport>> {
    base.validate()?;
    let spec = SweepSpec::from_config(base);
    let configs: Vec<Config> = spec.keys().iter().map(|k| config_for(base, k)).collect();
    for c in &configs {
        c.validate()?;
    }
    if let Some(dir) = &opts.trace_dir {
        fs::create_dir_all(dir)?;
    }
    let total = configs.len();
    let job = |c: &Config| -> Result<KpiReport> {
        let out = run_simulation_with(c, RunOptions { keep_events: opts.trace_dir.is_some() }, &mut ())?;
        if let Some(dir) = &opts.trace_dir {
            let mut w = BufWriter::new(File::create(dir.join(trace_file_name(&out.key)))?);
            write_log(&mut w, &out.events)?;
            w.flush()?;
        }
        if !opts.quiet {
            eprintln!("done {}", out.report.csv_row());
        }
        Ok(out.report)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallel)
        .build()
        .map_err(|e| ChoError::config(format!("thread pool: {e}")))?;
    let mut reports = pool.install(|| configs.par_iter().map(job).collect::<Result<Vec<_>>>())?;
    debug_assert_eq!(reports.len(), total);
    sort_reports(&mut reports);
    Ok(reports)
}

pub fn sort_reports(reports: &mut [KpiReport]) {
    reports.sort_by(|a, b| a.key.cmp_key(&b.key));
}

pub fn write_csv(w: &mut impl Write, reports: &[KpiReport]) -> Result<()> {
    writeln!(w, "{}", KpiReport::csv_header())?;
    for r in reports {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_csv_file(path: &Path, reports: &[KpiReport]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(&mut w, reports)?;
    w.flush()?;
    Ok(())
}
