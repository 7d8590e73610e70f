//! Plot-ready data from a KPI CSV: columnar `.dat` files plus gnuplot scripts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{ChoError, Result};
use crate::kpi::CSV_COLUMNS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    KpiBars,
    RecoveryCurve,
}

impl FromStr for Figure {
    type Err = ChoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kpi_bars" => Ok(Figure::KpiBars),
            "recovery_curve" => Ok(Figure::RecoveryCurve),
            other => Err(ChoError::config(format!("unknown figure `{other}`"))),
        }
    }
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub mode: String,
    pub speed_kmh: f64,
    pub o_prep_db: f64,
    pub o_exec_db: f64,
    pub max_prepared: usize,
    pub seed: u64,
    pub ho_succ: f64,
    pub all_fail: f64,
    pub pp: f64,
    pub recovery_rate: f64,
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let mut idx = BTreeMap::new();
    for col in CSV_COLUMNS {
        let i = headers
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| ChoError::MissingColumn(col.to_string()))?;
        idx.insert(col, i);
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let get = |c: &str| rec.get(idx[c]).unwrap_or("");
        let num = |c: &str| -> Result<f64> {
            get(c).parse::<f64>().map_err(|_| ChoError::Schema(format!("column {c}: bad value `{}`", get(c))))
        };
        rows.push(Row {
            mode: get("mode").to_string(),
            speed_kmh: num("speed_kmh")?,
            o_prep_db: num("o_prep_db")?,
            o_exec_db: num("o_exec_db")?,
            max_prepared: num("max_prepared")? as usize,
            seed: num("seed")? as u64,
            ho_succ: num("ho_succ_per_ue_min")?,
            all_fail: num("all_fail_per_ue_min")?,
            pp: num("pp_per_ue_min")?,
            recovery_rate: num("cho_recovery_rate")?,
        });
    }
    Ok(rows)
}

/// Mean over seeds for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BarGroup {
    pub mode: String,
    pub speed_kmh: f64,
    pub o_prep_db: f64,
    pub o_exec_db: f64,
    pub max_prepared: usize,
    pub n_seeds: usize,
    pub ho_succ: f64,
    pub all_fail: f64,
    pub pp: f64,
    /// Mean over seeds with a defined rate; NaN when none.
    pub recovery_rate: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 { f64::NAN } else { s / n as f64 }
}

type GroupKey = (String, u64, u64, u64, usize);

fn group_key(r: &Row) -> GroupKey {
    (r.mode.clone(), r.speed_kmh.to_bits(), r.o_prep_db.to_bits(), r.o_exec_db.to_bits(), r.max_prepared)
}

/// Groups rows that differ only in seed.
pub fn bar_groups(rows: &[Row]) -> Vec<BarGroup> {
    let mut groups: BTreeMap<GroupKey, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        groups.entry(group_key(r)).or_default().push(r);
    }
    let mut out: Vec<BarGroup> = groups
        .into_values()
        .map(|g| {
            let f = g[0];
            BarGroup {
                mode: f.mode.clone(),
                speed_kmh: f.speed_kmh,
                o_prep_db: f.o_prep_db,
                o_exec_db: f.o_exec_db,
                max_prepared: f.max_prepared,
                n_seeds: g.len(),
                ho_succ: mean(g.iter().map(|r| r.ho_succ)),
                all_fail: mean(g.iter().map(|r| r.all_fail)),
                pp: mean(g.iter().map(|r| r.pp)),
                recovery_rate: mean(g.iter().map(|r| r.recovery_rate).filter(|x| !x.is_nan())),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.mode
            .cmp(&b.mode)
            .then(a.speed_kmh.total_cmp(&b.speed_kmh))
            .then(a.o_prep_db.total_cmp(&b.o_prep_db))
            .then(a.o_exec_db.total_cmp(&b.o_exec_db))
            .then(a.max_prepared.cmp(&b.max_prepared))
    });
    out
}

/// Recovery rate against `max_prepared`, one series per (speed, o_prep, o_exec).
#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySeries {
    pub speed_kmh: f64,
    pub o_prep_db: f64,
    pub o_exec_db: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn recovery_series(rows: &[Row]) -> Vec<RecoverySeries> {
    let mut series: Vec<RecoverySeries> = Vec::new();
    for g in bar_groups(rows).into_iter().filter(|g| g.mode.eq_ignore_ascii_case("CHO")) {
        let same = |s: &RecoverySeries| {
            s.speed_kmh == g.speed_kmh && s.o_prep_db == g.o_prep_db && s.o_exec_db == g.o_exec_db
        };
        match series.iter_mut().find(|s| same(s)) {
            Some(s) => s.points.push((g.max_prepared, g.recovery_rate)),
            None => series.push(RecoverySeries {
                speed_kmh: g.speed_kmh,
                o_prep_db: g.o_prep_db,
                o_exec_db: g.o_exec_db,
                points: vec![(g.max_prepared, g.recovery_rate)],
            }),
        }
    }
    series
}

fn label(g: &BarGroup) -> String {
    format!("{}_{}kmh_p{}_e{}_m{}", g.mode, g.speed_kmh, g.o_prep_db, g.o_exec_db, g.max_prepared)
}

fn kpi_bars_files(groups: &[BarGroup]) -> (String, String) {
    let mut dat = String::from("# label mode speed_kmh o_prep_db o_exec_db max_prepared n_seeds ho_succ_per_ue_min all_fail_per_ue_min pp_per_ue_min cho_recovery_rate\n");
    for g in groups {
        let _ = writeln!(
            dat,
            "{} {} {} {} {} {} {} {:.6} {:.6} {:.6} {:.6}",
            label(g),
            g.mode,
            g.speed_kmh,
            g.o_prep_db,
            g.o_exec_db,
            g.max_prepared,
            g.n_seeds,
            g.ho_succ,
            g.all_fail,
            g.pp,
            g.recovery_rate
        );
    }
    let script = "\
set terminal pngcairo size 1200,600
set output 'kpi_bars.png'
set style data histograms
set style histogram clustered gap 1
set style fill solid 0.8 border -1
set xtics rotate by -45
set ylabel 'per UE per minute'
set key top left
plot 'kpi_bars.dat' using 8:xtic(1) title 'HO success', \\
     '' using 9 title 'all mobility failures', \\
     '' using 10 title 'ping-pong'
"
    .to_string();
    (dat, script)
}

fn recovery_curve_files(series: &[RecoverySeries]) -> (String, String) {
    let mut dat = String::new();
    let mut plots = Vec::new();
    for (i, s) in series.iter().enumerate() {
        if i > 0 {
            dat.push_str("\n\n");
        }
        let title = format!("{} km/h, o_prep {} dB, o_exec {} dB", s.speed_kmh, s.o_prep_db, s.o_exec_db);
        let _ = writeln!(dat, "# {title}\n# max_prepared cho_recovery_rate");
        for (m, r) in &s.points {
            let _ = writeln!(dat, "{m} {r:.6}");
        }
        plots.push(format!("'recovery_curve.dat' index {i} using 1:2 with linespoints title '{title}'"));
    }
    let script = format!(
        "set terminal pngcairo size 900,600\nset output 'recovery_curve.png'\nset logscale x 2\nset xlabel 'max prepared cells'\nset ylabel 'CHO recovery rate'\nset yrange [0:1]\nplot {}\n",
        plots.join(", \\\n     ")
    );
    (dat, script)
}

/// Writes `<figure>.dat` and `<figure>.gp` into `out_dir` and returns their paths.
pub fn emit_plot_data(csv_path: &Path, figure: Figure, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_rows(csv_path)?;
    let (name, (dat, script)) = match figure {
        Figure::KpiBars => ("kpi_bars", kpi_bars_files(&bar_groups(&rows))),
        Figure::RecoveryCurve => ("recovery_curve", recovery_curve_files(&recovery_series(&rows))),
    };
    fs::create_dir_all(out_dir)?;
    let dat_path = out_dir.join(format!("{name}.dat"));
    let gp_path = out_dir.join(format!("{name}.gp"));
    fs::write(&dat_path, dat)?;
    fs::write(&gp_path, script)?;
    Ok(vec![dat_path, gp_path])
}
