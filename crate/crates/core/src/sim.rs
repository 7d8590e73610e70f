//! Single-run engine.
//!
//! UEs do not interact (no shared gNB resources), so each UE is simulated
//! over the whole run before the next one starts; its random streams are
//! keyed by `(seed, ue, purpose)`. Events are then merged in
//! `(time, ue)` order, which gives a stable log independent of scheduling.

use rand_distr::{Distribution, Normal};

use crate::config::Config;
use crate::error::{ChoError, Result};
use crate::events::{Event, EventKind};
use crate::kpi::{KpiCounters, KpiReport, RunKey};
use crate::measure::{MeasureParams, MeasurementSet};
use crate::protocol::{step_ue, ProtocolParams, StepInput, UeProtocolState};
use crate::radio::{BeamPattern, BeamRsrps, Heights, LinkBudget, LinkState, ShadowParams};
use crate::rng::{self, purpose};
use crate::scenario::{bounding_region, build_layout, step_random_waypoint, Cell, Region, UeKinematics};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub key: RunKey,
    pub counters: KpiCounters,
    pub report: KpiReport,
    /// Empty unless requested.
    pub events: Vec<Event>,
    pub n_ues: usize,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub keep_events: bool,
}

pub fn run_key(cfg: &Config) -> RunKey {
    let s = &cfg.scenario;
    RunKey {
        mode: s.mode,
        speed_kmh: s.ue_speed_kmh,
        o_prep_db: s.o_prep_db,
        o_exec_db: s.o_exec_db,
        max_prepared: s.max_prepared,
        seed: s.seed,
    }
}

/// Everything shared by the UEs of one run.
pub struct World {
    pub cfg: Config,
    pub cells: Vec<Cell>,
    pub bounds: Region,
    pub pattern: BeamPattern,
    pub shadow: ShadowParams,
    pub params: ProtocolParams,
    pub meas_params: MeasureParams,
}

impl World {
    pub fn new(cfg: &Config) -> Result<Self> {
        cfg.validate()?;
        let cells = build_layout(&cfg.scenario, cfg.radio.n_beams)?;
        let bounds = bounding_region(&cells, cfg.scenario.margin())?;
        Ok(World {
            pattern: BeamPattern::from_config(&cfg.radio, cfg.scenario.sectors_per_site),
            shadow: ShadowParams::from(&cfg.radio),
            params: ProtocolParams::from_config(cfg)?,
            meas_params: MeasureParams {
                k: cfg.measure.k,
                abs_threshold: cfg.measure.abs_threshold_dbm,
                consolidation_n: cfg.measure.consolidation_n,
                noise_dbm: cfg.radio.noise_dbm(),
            },
            cells,
            bounds,
            cfg: cfg.clone(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.cells.iter().map(|c| c.site_id + 1).max().unwrap_or(0)
    }

    pub fn budget(&self) -> LinkBudget<'_> {
        LinkBudget {
            cells: &self.cells,
            pattern: &self.pattern,
            tx_power: self.cfg.scenario.tx_power_dbm,
            fc_ghz: self.cfg.scenario.carrier_ghz,
            heights: Heights { bs: self.cfg.radio.bs_height_m, ut: self.cfg.radio.ue_height_m },
            ue_gain: self.cfg.radio.ue_gain_dbi,
        }
    }
}

/// Hook called after every protocol step, for trace-level checks.
pub trait StepObserver {
    fn after_step(&mut self, now_ms: u64, ue: &UeProtocolState, events: &[Event]) -> Result<()>;
}

impl StepObserver for () {
    fn after_step(&mut self, _: u64, _: &UeProtocolState, _: &[Event]) -> Result<()> {
        Ok(())
    }
}

/// Simulates one UE for the whole run and returns its events in time order.
pub fn simulate_ue(world: &World, ue_id: usize, observer: &mut dyn StepObserver) -> Result<Vec<Event>> {
    let cfg = &world.cfg;
    let seed = cfg.scenario.seed;
    let dt_ms = cfg.scenario.time_step_ms;
    let dt = dt_ms as f64 / 1000.0;
    let period = cfg.measure.period_ms;
    let end = cfg.scenario.duration_ms();
    let n_sites = world.n_sites();

    let mut mob_rng = rng::stream(seed, ue_id, purpose::MOBILITY);
    let mut noise_rng = rng::stream(seed, ue_id, purpose::MEAS_NOISE);
    let mut link_rngs: Vec<_> = (0..n_sites)
        .map(|s| rng::stream(seed, ue_id, purpose::LINK_BASE + s as u32))
        .collect();
    let sites: Vec<_> = (0..n_sites)
        .map(|s| world.cells.iter().find(|c| c.site_id == s).expect("site has cells").site_position)
        .collect();

    let mut kin = UeKinematics::spawn(&world.bounds, cfg.scenario.speed_mps(), &mut mob_rng);
    let mut links: Vec<LinkState> = sites
        .iter()
        .zip(link_rngs.iter_mut())
        .map(|(&site, r)| LinkState::init(site, kin.position, &world.shadow, r))
        .collect();
    let budget = world.budget();
    let mut beams = BeamRsrps { per_beam: Vec::new() };
    let mut meas = MeasurementSet::new(world.cells.len(), cfg.measure.k);
    let l1_noise = Normal::new(0.0, cfg.measure.l1_error_sigma_db).map_err(|e| ChoError::config(e.to_string()))?;
    let with_noise = cfg.measure.l1_error_sigma_db > 0.0;

    let mut tick = |links: &[LinkState], pos, meas: &mut MeasurementSet, noise_rng: &mut rng::SimRng| -> Result<()> {
        budget.beam_rsrps(pos, links, &mut beams)?;
        meas.tick(&beams.per_beam, &world.meas_params, |_| if with_noise { l1_noise.sample(noise_rng) } else { 0.0 });
        Ok(())
    };
    tick(&links, kin.position, &mut meas, &mut noise_rng)?;
    let serving = crate::protocol::strongest_cell(&meas, f64::NEG_INFINITY).unwrap_or(0);
    let mut proto = UeProtocolState::new(ue_id, serving, world.cells.len());

    let mut events = Vec::new();
    let mut held_ms: u64 = 0;
    let mut now = 0;
    while now + dt_ms <= end {
        now += dt_ms;
        kin = step_random_waypoint(kin, &world.bounds, dt, &mut mob_rng);
        if !world.bounds.contains(kin.position) {
            return Err(ChoError::Invariant { at_ms: now, ue: ue_id, what: "UE left the bounding region".into() });
        }
        let fresh = now % period == 0;
        if fresh {
            for ((link, &site), r) in links.iter_mut().zip(&sites).zip(link_rngs.iter_mut()) {
                *link = link.advance(site, kin.position, &world.shadow, r);
            }
            tick(&links, kin.position, &mut meas, &mut noise_rng)?;
        }
        held_ms += proto.prepared.len() as u64 * dt_ms;
        let before = proto.serving_cell;
        let inp = StepInput { now_ms: now, fresh, meas: &meas, cells: &world.cells, ue_position: kin.position };
        let ev = step_ue(&mut proto, &inp, &world.params);
        proto.check_invariants(world.params.max_prepared, now)?;
        if proto.serving_cell != before
            && !ev.iter().any(|e| {
                matches!(e.kind, EventKind::HoSuccess | EventKind::RecoveryResolved | EventKind::ReestResolved)
            })
        {
            return Err(ChoError::Invariant { at_ms: now, ue: ue_id, what: "serving cell changed without a completion".into() });
        }
        observer.after_step(now, &proto, &ev)?;
        events.extend(ev);
    }

    // the per-step tally must agree with the event-sourced preparation time
    let mut check = KpiCounters::new(false);
    for e in &events {
        check.ingest_event(e)?;
    }
    check.finalize(now);
    if check.prepared_cell_ms != held_ms {
        return Err(ChoError::Invariant {
            at_ms: now,
            ue: ue_id,
            what: format!("prepared time {} ms from events, {} ms from state", check.prepared_cell_ms, held_ms),
        });
    }
    Ok(events)
}

/// Merges per-UE event streams in `(time, ue)` order.
pub fn merge_events(per_ue: Vec<Vec<Event>>) -> Vec<Event> {
    let mut all: Vec<Event> = per_ue.into_iter().flatten().collect();
    all.sort_by_key(|e| (e.time_ms, e.ue));
    all
}

pub fn run_simulation(cfg: &Config) -> Result<RunOutput> {
    run_simulation_with(cfg, RunOptions { keep_events: true }, &mut ())
}

pub fn run_simulation_with(cfg: &Config, opts: RunOptions, observer: &mut dyn StepObserver) -> Result<RunOutput> {
    let world = World::new(cfg)?;
    let n_ues = cfg.scenario.n_ues;
    let dt = cfg.scenario.time_step_ms;
    let duration_ms = cfg.scenario.duration_ms() / dt * dt;
    let mut counters = KpiCounters::new(cfg.protocol.count_recovery_as_ho_success);
    let mut per_ue = Vec::with_capacity(if opts.keep_events { n_ues } else { 0 });
    for ue in 0..n_ues {
        let ev = simulate_ue(&world, ue, observer)?;
        for e in &ev {
            counters.ingest_event(e)?;
        }
        if opts.keep_events {
            per_ue.push(ev);
        }
    }
    counters.finalize(duration_ms);
    let key = run_key(cfg);
    let report = KpiReport::new(key, &counters, n_ues, duration_ms as f64 / 1000.0)?;
    Ok(RunOutput { key, counters, report, events: merge_events(per_ue), n_ues, duration_ms })
}
