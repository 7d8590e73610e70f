//! Link budget: UMi street-canyon pathloss and LOS probability (3GPP TR 38.901),
//! spatially correlated log-normal shadowing, sector beam patterns, RSRP and SINR.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::RadioConfig;
use crate::error::{ChoError, Result};
use crate::scenario::{Cell, Point};

const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Antenna heights used by the UMi formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heights {
    pub bs: f64,
    pub ut: f64,
}

impl Default for Heights {
    fn default() -> Self {
        Heights { bs: 10.0, ut: 1.5 }
    }
}

/// UMi street-canyon pathloss in dB with the default 10 m / 1.5 m heights.
pub fn pathloss_umi(d3d: f64, fc_ghz: f64, los: bool) -> Result<f64> {
    pathloss_umi_with(d3d, fc_ghz, los, Heights::default())
}

pub fn pathloss_umi_with(d3d: f64, fc_ghz: f64, los: bool, h: Heights) -> Result<f64> {
    if !(d3d >= 1.0) {
        return Err(ChoError::domain(format!("d3d must be >= 1 m, got {d3d}")));
    }
    if !(0.5..=100.0).contains(&fc_ghz) {
        return Err(ChoError::domain(format!("fc must be in [0.5, 100] GHz, got {fc_ghz}")));
    }
    // effective heights with a 1 m environment height
    let bp = 4.0 * (h.bs - 1.0) * (h.ut - 1.0) * fc_ghz * 1e9 / SPEED_OF_LIGHT;
    let pl1 = 32.4 + 21.0 * d3d.log10() + 20.0 * fc_ghz.log10();
    let pl_los = if d3d <= bp || bp <= 0.0 {
        pl1
    } else {
        32.4 + 40.0 * d3d.log10() + 20.0 * fc_ghz.log10()
            - 9.5 * (bp * bp + (h.bs - h.ut).powi(2)).log10()
    };
    if los {
        return Ok(pl_los);
    }
    let pl_nlos = 35.3 * d3d.log10() + 22.4 + 21.3 * fc_ghz.log10() - 0.3 * (h.ut - 1.5);
    Ok(pl_los.max(pl_nlos))
}

/// UMi LOS probability for a 2-D distance in metres.
pub fn los_probability(d2d: f64) -> f64 {
    if d2d <= 18.0 {
        1.0
    } else {
        18.0 / d2d + (-d2d / 36.0).exp() * (1.0 - 18.0 / d2d)
    }
}

/// Large-scale state of one UE-site link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub los: bool,
    pub shadowing_db: f64,
    pub last_update_position: Point,
    /// Where the LOS state was last drawn.
    pub los_anchor: Point,
}

/// AR(1) update of log-normal shadowing over travelled distance.
pub fn update_shadowing<R: Rng + ?Sized>(
    link: LinkState,
    new_position: Point,
    sigma: f64,
    decorr_dist: f64,
    rng: &mut R,
) -> LinkState {
    let dd = link.last_update_position.distance(new_position);
    let rho = (-dd / decorr_dist).exp();
    let mut next = link;
    next.last_update_position = new_position;
    if dd > 0.0 {
        let n: f64 = rng.sample(StandardNormal);
        next.shadowing_db = rho * link.shadowing_db + (1.0 - rho * rho).sqrt() * sigma * n;
    }
    next
}

/// Channel parameters that depend on the LOS state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowParams {
    pub sigma_los: f64,
    pub sigma_nlos: f64,
    pub decorr_los: f64,
    pub decorr_nlos: f64,
    pub los_redraw: f64,
}

impl From<&RadioConfig> for ShadowParams {
    fn from(r: &RadioConfig) -> Self {
        ShadowParams {
            sigma_los: r.shadow_sigma_los_db,
            sigma_nlos: r.shadow_sigma_nlos_db,
            decorr_los: r.shadow_decorr_los_m,
            decorr_nlos: r.shadow_decorr_nlos_m,
            los_redraw: r.los_redraw_m,
        }
    }
}

impl ShadowParams {
    fn sigma(&self, los: bool) -> f64 {
        if los { self.sigma_los } else { self.sigma_nlos }
    }

    fn decorr(&self, los: bool) -> f64 {
        if los { self.decorr_los } else { self.decorr_nlos }
    }
}

impl LinkState {
    pub fn init<R: Rng + ?Sized>(site: Point, ue: Point, p: &ShadowParams, rng: &mut R) -> Self {
        let los = rng.random::<f64>() < los_probability(site.distance(ue));
        let n: f64 = rng.sample(StandardNormal);
        LinkState {
            los,
            shadowing_db: p.sigma(los) * n,
            last_update_position: ue,
            los_anchor: ue,
        }
    }

    /// Moves the link to a new UE position: LOS is redrawn once the UE has
    /// travelled `los_redraw` metres since the last draw, and shadowing
    /// follows the AR(1) process of the current LOS state.
    pub fn advance<R: Rng + ?Sized>(self, site: Point, ue: Point, p: &ShadowParams, rng: &mut R) -> Self {
        let mut link = self;
        if link.los_anchor.distance(ue) > p.los_redraw {
            let los = rng.random::<f64>() < los_probability(site.distance(ue));
            if los != link.los {
                let (from, to) = (p.sigma(link.los), p.sigma(los));
                link.shadowing_db = if from > 0.0 { link.shadowing_db * to / from } else { 0.0 };
                link.los = los;
            }
            link.los_anchor = ue;
        }
        update_shadowing(link, ue, p.sigma(link.los), p.decorr(link.los), rng)
    }
}

/// Parabolic main lobe with a front-to-back floor, one lobe per beam.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub n_beams: usize,
    pub beamwidth: f64,
    pub max_gain: f64,
    pub floor: f64,
    /// Pointing azimuth of each beam relative to boresight, degrees.
    pub pointing: Vec<f64>,
}

impl BeamPattern {
    /// `n_beams` beams evenly spread over a sector of `sector_width` degrees.
    pub fn new(n_beams: usize, beamwidth: f64, max_gain: f64, floor: f64, sector_width: f64) -> Self {
        let step = sector_width / n_beams as f64;
        let pointing = (0..n_beams)
            .map(|i| -sector_width / 2.0 + step * (i as f64 + 0.5))
            .collect();
        BeamPattern { n_beams, beamwidth, max_gain, floor, pointing }
    }

    pub fn from_config(r: &RadioConfig, sectors_per_site: usize) -> Self {
        BeamPattern::new(
            r.n_beams,
            r.beamwidth_deg,
            r.max_gain_dbi,
            r.front_to_back_db,
            360.0 / sectors_per_site.max(1) as f64,
        )
    }

    /// Index of the beam pointing closest to `azimuth` (relative to boresight).
    pub fn nearest_beam(&self, azimuth: f64) -> usize {
        let mut best = 0;
        let mut best_off = f64::INFINITY;
        for (i, p) in self.pointing.iter().enumerate() {
            let off = wrap_deg(azimuth - p).abs();
            if off < best_off {
                best = i;
                best_off = off;
            }
        }
        best
    }
}

/// Wraps an angle to `[-180, 180)`.
pub fn wrap_deg(a: f64) -> f64 {
    (a + 180.0).rem_euclid(360.0) - 180.0
}

pub fn beam_gain(pattern: &BeamPattern, beam: usize, azimuth_offset: f64) -> Result<f64> {
    if beam >= pattern.n_beams {
        return Err(ChoError::domain(format!("beam {beam} out of range ({} beams)", pattern.n_beams)));
    }
    Ok(beam_gain_unchecked(pattern, azimuth_offset))
}

#[inline]
fn beam_gain_unchecked(pattern: &BeamPattern, offset: f64) -> f64 {
    let r = offset / pattern.beamwidth;
    pattern.max_gain - (12.0 * r * r).min(pattern.floor)
}

pub fn rsrp(tx_power: f64, pl: f64, shadow: f64, gain: f64) -> f64 {
    tx_power - pl - shadow + gain
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// SINR in dB, computed in the linear domain.
pub fn sinr(serving_rsrp: f64, interferer_rsrps: &[f64], noise: f64) -> f64 {
    let i: f64 = interferer_rsrps.iter().map(|&p| dbm_to_mw(p)).sum();
    mw_to_dbm(dbm_to_mw(serving_rsrp) / (i + dbm_to_mw(noise)))
}

/// Per-beam RSRP of every cell at one UE position.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamRsrps {
    /// `[cell][beam]`, dBm.
    pub per_beam: Vec<Vec<f64>>,
}

/// Evaluates all beams of all cells for a UE given its per-site links.
pub struct LinkBudget<'a> {
    pub cells: &'a [Cell],
    pub pattern: &'a BeamPattern,
    pub tx_power: f64,
    pub fc_ghz: f64,
    pub heights: Heights,
    pub ue_gain: f64,
}

impl LinkBudget<'_> {
    pub fn beam_rsrps(&self, ue: Point, links: &[LinkState], out: &mut BeamRsrps) -> Result<()> {
        out.per_beam.resize_with(self.cells.len(), Vec::new);
        // cells are grouped by site, so pathloss and azimuth are shared
        let mut site_cache: Option<(usize, f64, f64)> = None;
        for (cell, slot) in self.cells.iter().zip(out.per_beam.iter_mut()) {
            let link = &links[cell.site_id];
            let (pl, site_az) = match site_cache {
                Some((s, pl, az)) if s == cell.site_id => (pl, az),
                _ => {
                    let d2d = cell.site_position.distance(ue);
                    let d3d = (d2d * d2d + (self.heights.bs - self.heights.ut).powi(2)).sqrt().max(1.0);
                    let pl = pathloss_umi_with(d3d, self.fc_ghz, link.los, self.heights)?;
                    let az = cell.site_position.azimuth_to(ue);
                    site_cache = Some((cell.site_id, pl, az));
                    (pl, az)
                }
            };
            let az = wrap_deg(site_az - cell.boresight_azimuth);
            slot.clear();
            slot.extend(self.pattern.pointing.iter().map(|p| {
                let g = beam_gain_unchecked(self.pattern, wrap_deg(az - p));
                rsrp(self.tx_power, pl, link.shadowing_db, g + self.ue_gain)
            }));
        }
        Ok(())
    }
}
