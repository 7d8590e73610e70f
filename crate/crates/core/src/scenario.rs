//! Deployment geometry and UE mobility.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{ChoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing from `self` to `other` in degrees, counter-clockwise from +x.
    pub fn azimuth_to(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x).to_degrees()
    }

    pub fn offset(self, azimuth_deg: f64, dist: f64) -> Point {
        let a = azimuth_deg.to_radians();
        Point::new(self.x + dist * a.cos(), self.y + dist * a.sin())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub cell_id: usize,
    pub site_id: usize,
    pub site_position: Point,
    pub boresight_azimuth: f64,
    pub beams: Vec<usize>,
    /// Coverage centre used by location-based conditions.
    pub reference_point: Point,
}

/// Centre site plus, for `n_sites = 7`, a ring of six at distance ISD.
/// Sector boresights are spaced evenly starting at 0 degrees.
pub fn build_layout(cfg: &ScenarioConfig, n_beams: usize) -> Result<Vec<Cell>> {
    let sites: Vec<Point> = match cfg.n_sites {
        1 => vec![Point::ORIGIN],
        7 => std::iter::once(Point::ORIGIN)
            .chain((0..6).map(|k| Point::ORIGIN.offset(60.0 * k as f64, cfg.isd_m)))
            .collect(),
        n => return Err(ChoError::config(format!("unsupported n_sites {n}; expected 1 or 7"))),
    };
    if cfg.sectors_per_site == 0 {
        return Err(ChoError::config("sectors_per_site must be >= 1"));
    }
    if n_beams == 0 {
        return Err(ChoError::config("cells need at least one beam"));
    }
    let spacing = 360.0 / cfg.sectors_per_site as f64;
    let mut cells = Vec::with_capacity(sites.len() * cfg.sectors_per_site);
    for (site_id, &pos) in sites.iter().enumerate() {
        for s in 0..cfg.sectors_per_site {
            let boresight = spacing * s as f64;
            cells.push(Cell {
                cell_id: cells.len(),
                site_id,
                site_position: pos,
                boresight_azimuth: boresight,
                beams: (0..n_beams).collect(),
                reference_point: pos.offset(boresight, cfg.isd_m / 3.0),
            });
        }
    }
    Ok(cells)
}

/// Axis-aligned box UEs are confined to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub min: Point,
    pub max: Point,
}

impl Region {
    pub fn contains(&self, p: Point) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            self.min.x + rng.random::<f64>() * self.width(),
            self.min.y + rng.random::<f64>() * self.height(),
        )
    }
}

/// Bounding box of all site positions grown by `margin` on every side.
pub fn bounding_region(cells: &[Cell], margin: f64) -> Result<Region> {
    let first = cells
        .first()
        .ok_or_else(|| ChoError::domain("bounding_region needs at least one cell"))?
        .site_position;
    let (mut min, mut max) = (first, first);
    for c in cells {
        let p = c.site_position;
        min = Point::new(min.x.min(p.x), min.y.min(p.y));
        max = Point::new(max.x.max(p.x), max.y.max(p.y));
    }
    Ok(Region {
        min: Point::new(min.x - margin, min.y - margin),
        max: Point::new(max.x + margin, max.y + margin),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeKinematics {
    pub position: Point,
    pub waypoint: Point,
    /// m/s, constant for the whole run.
    pub speed: f64,
}

impl UeKinematics {
    pub fn spawn<R: Rng + ?Sized>(bounds: &Region, speed: f64, rng: &mut R) -> Self {
        let position = bounds.sample(rng);
        let waypoint = bounds.sample(rng);
        UeKinematics { position, waypoint, speed }
    }
}

/// Random waypoint with zero pause: move toward the waypoint, and on arrival
/// draw a new one and spend the remaining distance budget toward it.
pub fn step_random_waypoint<R: Rng + ?Sized>(
    kin: UeKinematics,
    bounds: &Region,
    dt: f64,
    rng: &mut R,
) -> UeKinematics {
    let mut k = kin;
    let mut budget = (k.speed * dt).max(0.0);
    if dt <= 0.0 {
        return k;
    }
    // arrival with zero speed still redraws so the UE never sits on its waypoint
    let mut guard = 0;
    loop {
        let to_go = k.position.distance(k.waypoint);
        if to_go <= budget || to_go == 0.0 {
            budget -= to_go;
            k.position = k.waypoint;
            k.waypoint = bounds.sample(rng);
            guard += 1;
            if budget <= 0.0 || guard > 64 {
                break;
            }
        } else {
            let f = budget / to_go;
            k.position = Point::new(
                k.position.x + f * (k.waypoint.x - k.position.x),
                k.position.y + f * (k.waypoint.y - k.position.y),
            );
            break;
        }
    }
    k
}
