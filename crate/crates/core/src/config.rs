//! Run configuration.
//!
//! The file format is TOML with one table per key group (`scenario`, `radio`,
//! `measure`, `protocol`, `sweep`). Every key is optional; omitted keys take
//! the defaults below, which reproduce the FR2 reference deployment
//! (ISD 200 m, 7 sites, 30 dBm, UMi at 28 GHz, 420 UEs, 300 s, -8 dB outage).
//!
//! `--set group.key=value` overrides are applied to the parsed document
//! before deserialisation, so they obey exactly the same schema.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conditions::{CondExpr, ExecCondition, Leaf};
use crate::error::{ChoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    #[serde(alias = "bho")]
    BHO,
    #[serde(alias = "cho")]
    CHO,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::BHO => f.write_str("BHO"),
            Mode::CHO => f.write_str("CHO"),
        }
    }
}

impl FromStr for Mode {
    type Err = ChoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BHO" => Ok(Mode::BHO),
            "CHO" => Ok(Mode::CHO),
            other => Err(ChoError::config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub radio: RadioConfig,
    pub measure: MeasureConfig,
    pub protocol: ProtocolConfig,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub isd_m: f64,
    pub n_sites: usize,
    pub sectors_per_site: usize,
    pub carrier_ghz: f64,
    pub tx_power_dbm: f64,
    pub n_ues: usize,
    pub sim_duration_s: f64,
    pub time_step_ms: u64,
    pub ue_speed_kmh: f64,
    pub sinr_outage_db: f64,
    pub seed: u64,
    pub mode: Mode,
    pub o_prep_db: f64,
    pub o_exec_db: f64,
    pub max_prepared: usize,
    pub pp_window_ms: u64,
    /// UE confinement margin around the site hull; `None` means ISD/2.
    pub margin_m: Option<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            isd_m: 200.0,
            n_sites: 7,
            sectors_per_site: 3,
            carrier_ghz: 28.0,
            tx_power_dbm: 30.0,
            n_ues: 420,
            sim_duration_s: 300.0,
            time_step_ms: 10,
            ue_speed_kmh: 30.0,
            sinr_outage_db: -8.0,
            seed: 1,
            mode: Mode::CHO,
            o_prep_db: 3.0,
            o_exec_db: 3.0,
            max_prepared: 1,
            pp_window_ms: 1000,
            margin_m: None,
        }
    }
}

impl ScenarioConfig {
    pub fn margin(&self) -> f64 {
        self.margin_m.unwrap_or(self.isd_m / 2.0)
    }

    pub fn duration_ms(&self) -> u64 {
        (self.sim_duration_s * 1000.0).round() as u64
    }

    pub fn speed_mps(&self) -> f64 {
        self.ue_speed_kmh / 3.6
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    pub n_beams: usize,
    pub beamwidth_deg: f64,
    pub max_gain_dbi: f64,
    pub front_to_back_db: f64,
    pub ue_gain_dbi: f64,
    pub bandwidth_mhz: f64,
    pub noise_figure_db: f64,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
    pub shadow_decorr_los_m: f64,
    pub shadow_decorr_nlos_m: f64,
    /// Travel distance after which the LOS state of a UE-site link is redrawn
    /// (LOS-state correlation distance of the UMi model).
    pub los_redraw_m: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bs_height_m: 10.0,
            ue_height_m: 1.5,
            n_beams: 8,
            beamwidth_deg: 13.0,
            max_gain_dbi: 18.0,
            front_to_back_db: 25.0,
            ue_gain_dbi: 0.0,
            bandwidth_mhz: 100.0,
            noise_figure_db: 9.0,
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 7.82,
            shadow_decorr_los_m: 10.0,
            shadow_decorr_nlos_m: 13.0,
            los_redraw_m: 50.0,
        }
    }
}

impl RadioConfig {
    /// Thermal noise over the configured bandwidth plus the UE noise figure.
    pub fn noise_dbm(&self) -> f64 {
        -174.0 + 10.0 * (self.bandwidth_mhz * 1e6).log10() + self.noise_figure_db
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureConfig {
    pub k: f64,
    pub period_ms: u64,
    pub consolidation_n: usize,
    pub abs_threshold_dbm: f64,
    /// Standard deviation of optional Gaussian L1 sampling error.
    pub l1_error_sigma_db: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            k: 4.0,
            period_ms: 40,
            consolidation_n: 2,
            abs_threshold_dbm: -110.0,
            l1_error_sigma_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub t310_ms: u64,
    pub t304_ms: u64,
    pub n310: u32,
    pub n311: u32,
    /// qin = qout + this offset.
    pub qin_offset_db: f64,
    pub report_delay_ms: u64,
    pub prep_delay_ms: u64,
    pub cmd_delay_ms: u64,
    pub ra_interval_ms: u64,
    /// `None` means equal to the SINR outage limit.
    pub ra_sinr_threshold_db: Option<f64>,
    pub cell_selection_delay_ms: u64,
    pub recovery_fast_delay_ms: u64,
    pub reestablishment_delay_ms: u64,
    pub release_hys_db: f64,
    pub exec_ttt_ms: u64,
    pub prep_ttt_ms: u64,
    pub min_selection_rsrp_dbm: f64,
    /// Count CHO-recovery completions as HO successes as well.
    pub count_recovery_as_ho_success: bool,
    /// Channel-occupancy metric fed to occupancy conditions (no LBT model).
    pub channel_occupancy: f64,
    /// Custom CHO execution condition. `None` means A3 with offset `o_exec`.
    pub exec_condition: Option<ConditionSpec>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            t310_ms: 1000,
            t304_ms: 500,
            n310: 5,
            n311: 2,
            qin_offset_db: 2.0,
            report_delay_ms: 10,
            prep_delay_ms: 50,
            cmd_delay_ms: 10,
            ra_interval_ms: 20,
            ra_sinr_threshold_db: None,
            cell_selection_delay_ms: 50,
            recovery_fast_delay_ms: 80,
            reestablishment_delay_ms: 200,
            release_hys_db: 2.0,
            exec_ttt_ms: 160,
            prep_ttt_ms: 0,
            min_selection_rsrp_dbm: -110.0,
            count_recovery_as_ho_success: false,
            channel_occupancy: 1.0,
            exec_condition: None,
        }
    }
}

/// Execution condition as written in the config file.
///
/// ```toml
/// [protocol.exec_condition]
/// type = "and"
/// ttt_ms = 160
/// left = { type = "a3", offset_db = 3.0 }
/// right = { type = "time_window", t1_s = 5.0, t2_s = 30.0 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConditionSpec {
    A3 {
        offset_db: Option<f64>,
        #[serde(default)]
        hys_db: f64,
        ttt_ms: Option<u64>,
    },
    A5 {
        thresh1_dbm: f64,
        thresh2_dbm: f64,
        #[serde(default)]
        hys_db: f64,
        ttt_ms: Option<u64>,
    },
    TimeWindow {
        t1_s: f64,
        t2_s: f64,
        ttt_ms: Option<u64>,
    },
    Location {
        thresh_serv_m: f64,
        thresh_cand_m: f64,
        ttt_ms: Option<u64>,
    },
    ChannelOccupancy {
        threshold: f64,
        #[serde(default)]
        hys: f64,
        ttt_ms: Option<u64>,
    },
    And {
        left: Box<ConditionSpec>,
        right: Box<ConditionSpec>,
        ttt_ms: Option<u64>,
    },
}

impl ConditionSpec {
    fn ttt(&self) -> Option<u64> {
        match self {
            ConditionSpec::A3 { ttt_ms, .. }
            | ConditionSpec::A5 { ttt_ms, .. }
            | ConditionSpec::TimeWindow { ttt_ms, .. }
            | ConditionSpec::Location { ttt_ms, .. }
            | ConditionSpec::ChannelOccupancy { ttt_ms, .. }
            | ConditionSpec::And { ttt_ms, .. } => *ttt_ms,
        }
    }

    fn to_expr(&self, o_exec: f64) -> CondExpr {
        let leaf = match self {
            ConditionSpec::A3 { offset_db, hys_db, .. } => Leaf::A3 {
                offset: offset_db.unwrap_or(o_exec),
                hys: *hys_db,
            },
            ConditionSpec::A5 { thresh1_dbm, thresh2_dbm, hys_db, .. } => Leaf::A5 {
                thresh1: *thresh1_dbm,
                thresh2: *thresh2_dbm,
                hys: *hys_db,
            },
            ConditionSpec::TimeWindow { t1_s, t2_s, .. } => Leaf::TimeWindow { t1: *t1_s, t2: *t2_s },
            ConditionSpec::Location { thresh_serv_m, thresh_cand_m, .. } => Leaf::Location {
                thresh_serv: *thresh_serv_m,
                thresh_cand: *thresh_cand_m,
            },
            ConditionSpec::ChannelOccupancy { threshold, hys, .. } => Leaf::ChannelOccupancy {
                threshold: *threshold,
                hys: *hys,
            },
            ConditionSpec::And { left, right, .. } => {
                return CondExpr::And(Box::new(left.to_expr(o_exec)), Box::new(right.to_expr(o_exec)))
            }
        };
        CondExpr::Leaf(leaf)
    }

    /// Lowers the file representation to a validated [`ExecCondition`].
    /// A3 leaves without an explicit offset use `o_exec`.
    pub fn build(&self, o_exec: f64, default_ttt_ms: u64) -> Result<ExecCondition> {
        let cond = ExecCondition {
            expr: self.to_expr(o_exec),
            ttt_ms: self.ttt().unwrap_or(default_ttt_ms),
        };
        cond.validate()?;
        Ok(cond)
    }
}

/// Lists swept as a cross product. Empty lists fall back to the single value
/// in `[scenario]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub speeds_kmh: Vec<f64>,
    pub modes: Vec<Mode>,
    pub o_prep_db: Vec<f64>,
    pub o_exec_db: Vec<f64>,
    pub max_prepared: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Config {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Config> {
        let mut doc: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ChoError::config(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut doc, ov)?;
        }
        let cfg: Config = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| ChoError::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ChoError::config(format!("cannot read {}: {e}", path.display())))?;
        Config::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn qout_db(&self) -> f64 {
        self.scenario.sinr_outage_db
    }

    pub fn qin_db(&self) -> f64 {
        self.scenario.sinr_outage_db + self.protocol.qin_offset_db
    }

    pub fn ra_threshold_db(&self) -> f64 {
        self.protocol
            .ra_sinr_threshold_db
            .unwrap_or(self.scenario.sinr_outage_db)
    }

    /// The execution condition attached to every prepared candidate (CHO) or
    /// used as the measurement-report trigger (BHO).
    pub fn exec_condition(&self) -> Result<ExecCondition> {
        match &self.protocol.exec_condition {
            Some(spec) => spec.build(self.scenario.o_exec_db, self.protocol.exec_ttt_ms),
            None => Ok(ExecCondition::single(
                Leaf::A3 { offset: self.scenario.o_exec_db, hys: 0.0 },
                self.protocol.exec_ttt_ms,
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        let fail = |m: String| Err(ChoError::Config(m));
        if !(s.isd_m > 0.0) {
            return fail(format!("scenario.isd_m must be > 0, got {}", s.isd_m));
        }
        if s.time_step_ms == 0 {
            return fail("scenario.time_step_ms must be > 0".into());
        }
        if s.duration_ms() < s.time_step_ms {
            return fail("scenario.sim_duration_s must be at least one time step".into());
        }
        if s.n_ues == 0 {
            return fail("scenario.n_ues must be > 0".into());
        }
        if s.sectors_per_site == 0 {
            return fail("scenario.sectors_per_site must be >= 1".into());
        }
        if !matches!(s.n_sites, 1 | 7) {
            return fail(format!("scenario.n_sites must be 1 or 7, got {}", s.n_sites));
        }
        if !(0.5..=100.0).contains(&s.carrier_ghz) {
            return fail(format!("scenario.carrier_ghz out of range: {}", s.carrier_ghz));
        }
        if s.ue_speed_kmh < 0.0 {
            return fail("scenario.ue_speed_kmh must be >= 0".into());
        }
        check_max_prepared(s.max_prepared)?;
        if s.margin() < 0.0 {
            return fail("scenario.margin_m must be >= 0".into());
        }
        let m = &self.measure;
        if m.period_ms == 0 || !m.period_ms.is_multiple_of(s.time_step_ms) {
            return fail("measure.period_ms must be a positive multiple of scenario.time_step_ms".into());
        }
        if m.consolidation_n == 0 {
            return fail("measure.consolidation_n must be >= 1".into());
        }
        if m.k < 0.0 || m.l1_error_sigma_db < 0.0 {
            return fail("measure.k and measure.l1_error_sigma_db must be >= 0".into());
        }
        let r = &self.radio;
        if r.n_beams == 0 || !(r.beamwidth_deg > 0.0) {
            return fail("radio.n_beams and radio.beamwidth_deg must be positive".into());
        }
        if r.shadow_decorr_los_m <= 0.0 || r.shadow_decorr_nlos_m <= 0.0 || r.los_redraw_m <= 0.0 {
            return fail("radio decorrelation distances must be > 0".into());
        }
        if r.shadow_sigma_los_db < 0.0 || r.shadow_sigma_nlos_db < 0.0 {
            return fail("radio shadowing sigmas must be >= 0".into());
        }
        let p = &self.protocol;
        if p.ra_interval_ms == 0 || p.n310 == 0 || p.n311 == 0 {
            return fail("protocol.ra_interval_ms, n310 and n311 must be > 0".into());
        }
        self.exec_condition()?;
        for &mp in &self.sweep.max_prepared {
            check_max_prepared(mp)?;
        }
        if self.sweep.speeds_kmh.iter().any(|v| *v < 0.0) {
            return fail("sweep.speeds_kmh must be >= 0".into());
        }
        Ok(())
    }
}

fn check_max_prepared(n: usize) -> Result<()> {
    if matches!(n, 1 | 2 | 4 | 8) {
        Ok(())
    } else {
        Err(ChoError::config(format!("max_prepared must be one of 1, 2, 4, 8; got {n}")))
    }
}

/// Applies `group.key=value` to a parsed document. The value is read as a
/// TOML literal and falls back to a bare string (`mode=CHO`).
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ChoError::config(format!("override `{assignment}` is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(ChoError::config(format!("bad override key `{path}`")));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (last, parents) = keys.split_last().expect("non-empty key path");
    let mut table = doc;
    for key in parents {
        let entry = table
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| ChoError::config(format!("override path `{path}` crosses a non-table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}
