//! Cell-level measurements: beam consolidation and layer-3 filtering.

use crate::error::{ChoError, Result};
use crate::radio::{dbm_to_mw, mw_to_dbm};

/// Linear-domain mean of the `max_n` strongest beams above `abs_threshold`.
/// Falls back to the strongest beam when none clears the threshold.
pub fn consolidate_beams(beam_rsrps: &[f64], abs_threshold: f64, max_n: usize) -> Result<f64> {
    if beam_rsrps.is_empty() {
        return Err(ChoError::domain("consolidate_beams: no beams"));
    }
    if max_n == 0 {
        return Err(ChoError::domain("consolidate_beams: max_n must be >= 1"));
    }
    Ok(consolidate_unchecked(beam_rsrps, abs_threshold, max_n))
}

pub(crate) fn consolidate_unchecked(beam_rsrps: &[f64], abs_threshold: f64, max_n: usize) -> f64 {
    // small n: partial selection by repeated max is cheaper than sorting
    let mut picked = [f64::NEG_INFINITY; 8];
    let n = max_n.min(picked.len());
    let mut count = 0;
    for &v in beam_rsrps {
        if v <= abs_threshold {
            continue;
        }
        if count < n {
            picked[count] = v;
            count += 1;
        } else if let Some((i, _)) = picked[..n]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p < v)
            .min_by(|a, b| a.1.total_cmp(b.1))
        {
            picked[i] = v;
        }
    }
    if count == 0 {
        return beam_rsrps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    let mean = picked[..count].iter().map(|&p| dbm_to_mw(p)).sum::<f64>() / count as f64;
    mw_to_dbm(mean)
}

/// Exponential L3 filter in the dB domain, `a = 2^(-k/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    pub k: f64,
    pub value: f64,
    pub initialized: bool,
}

impl FilterState {
    pub fn new(k: f64) -> Self {
        FilterState { k, value: f64::NAN, initialized: false }
    }

    pub fn coefficient(&self) -> f64 {
        0.5f64.powf(self.k / 4.0)
    }
}

pub fn l3_filter(state: FilterState, sample: f64) -> FilterState {
    let value = if state.initialized {
        let a = state.coefficient();
        (1.0 - a) * state.value + a * sample
    } else {
        sample
    };
    FilterState { value, initialized: true, ..state }
}

/// Latest measurement of one cell as seen by one UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMeasurement {
    pub cell_id: usize,
    pub l1_cell_rsrp: f64,
    pub l3_rsrp: f64,
    pub best_beam: usize,
    /// Strongest single beam, used for SINR.
    pub best_beam_rsrp: f64,
}

/// Per-UE measurement bank: one L3 filter per cell plus the latest snapshot.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    filters: Vec<FilterState>,
    pub cells: Vec<CellMeasurement>,
    /// SINR of each cell if it were serving, from best beams, dB.
    pub sinr_as_serving: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureParams {
    pub k: f64,
    pub abs_threshold: f64,
    pub consolidation_n: usize,
    pub noise_dbm: f64,
}

impl MeasurementSet {
    pub fn new(n_cells: usize, k: f64) -> Self {
        MeasurementSet {
            filters: vec![FilterState::new(k); n_cells],
            cells: (0..n_cells)
                .map(|cell_id| CellMeasurement {
                    cell_id,
                    l1_cell_rsrp: f64::NEG_INFINITY,
                    l3_rsrp: f64::NEG_INFINITY,
                    best_beam: 0,
                    best_beam_rsrp: f64::NEG_INFINITY,
                })
                .collect(),
            sinr_as_serving: vec![f64::NEG_INFINITY; n_cells],
        }
    }

    /// One measurement tick. `l1_error` adds an optional per-cell sampling
    /// error (dB) to the consolidated value before filtering.
    pub fn tick(&mut self, per_beam: &[Vec<f64>], p: &MeasureParams, mut l1_error: impl FnMut(usize) -> f64) {
        let mut total_mw = dbm_to_mw(p.noise_dbm);
        for (cell, beams) in per_beam.iter().enumerate() {
            let (best_beam, best) = beams
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
            let l1 = consolidate_unchecked(beams, p.abs_threshold, p.consolidation_n) + l1_error(cell);
            self.filters[cell] = l3_filter(self.filters[cell], l1);
            self.cells[cell] = CellMeasurement {
                cell_id: cell,
                l1_cell_rsrp: l1,
                l3_rsrp: self.filters[cell].value,
                best_beam,
                best_beam_rsrp: best,
            };
            total_mw += dbm_to_mw(best);
        }
        for (cell, m) in self.cells.iter().enumerate() {
            let s = dbm_to_mw(m.best_beam_rsrp);
            self.sinr_as_serving[cell] = mw_to_dbm(s / (total_mw - s).max(f64::MIN_POSITIVE));
        }
    }

    /// A snapshot with given filtered RSRPs and per-cell SINRs, for driving
    /// the protocol without a radio model. L1 values equal the L3 values.
    pub fn synthetic(rsrp: &[f64], sinr: &[f64]) -> Self {
        assert_eq!(rsrp.len(), sinr.len());
        let mut m = MeasurementSet::new(rsrp.len(), 0.0);
        m.set(rsrp, sinr);
        m
    }

    /// Overwrites the snapshot, see [`MeasurementSet::synthetic`].
    pub fn set(&mut self, rsrp: &[f64], sinr: &[f64]) {
        for (c, (&r, &s)) in rsrp.iter().zip(sinr).enumerate() {
            self.cells[c].l1_cell_rsrp = r;
            self.cells[c].l3_rsrp = r;
            self.cells[c].best_beam_rsrp = r;
            self.sinr_as_serving[c] = s;
        }
    }

    pub fn l3(&self, cell: usize) -> f64 {
        self.cells[cell].l3_rsrp
    }

    pub fn l1(&self, cell: usize) -> f64 {
        self.cells[cell].l1_cell_rsrp
    }

    pub fn sinr(&self, cell: usize) -> f64 {
        self.sinr_as_serving[cell]
    }
}
