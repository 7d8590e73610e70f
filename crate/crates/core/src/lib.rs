//! Deterministic system-level simulator for 5G NR conditional handover (CHO)
//! in FR2.
//!
//! The crate is organised bottom-up:
//!
//! - [`scenario`]: hexagonal deployment, bounding region, random-waypoint mobility
//! - [`radio`]: UMi pathloss, LOS probability, correlated shadowing, beam gain, RSRP/SINR
//! - [`measure`]: beam consolidation and layer-3 filtering
//! - [`conditions`]: execution condition algebra (A3, A5, time window, location,
//!   channel occupancy, two-leaf conjunction) with hysteresis and time-to-trigger
//! - [`protocol`]: per-UE mobility state machine (baseline HO, CHO, RLF, RA, recovery)
//! - [`kpi`]: event aggregation and per-UE-per-minute normalisation
//! - [`sim`], [`sweep`], [`plot`]: the run engine, batch sweeps and plot-ready output
//!
//! Everything is driven by a [`config::Config`], which maps one-to-one onto
//! the TOML configuration file understood by the `chosim` binary.

pub mod conditions;
pub mod config;
pub mod error;
pub mod events;
pub mod kpi;
pub mod measure;
pub mod plot;
pub mod protocol;
pub mod radio;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod sweep;

pub use config::{Config, Mode};
pub use error::{ChoError, Result};
pub use kpi::{KpiCounters, KpiReport};
pub use sim::{run_simulation, RunOutput};
