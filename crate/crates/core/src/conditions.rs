//! Execution and preparation condition algebra.
//!
//! A condition is a tree of at most two leaves joined by conjunction. Each
//! radio leaf carries its own hysteresis memory; the time-to-trigger applies
//! to the conjunction as a whole. All comparisons are strict, so a value
//! sitting exactly on a threshold never triggers.

use serde::{Deserialize, Serialize};

use crate::error::{ChoError, Result};

/// Inputs a condition may look at. Units: dBm, seconds, metres, and an
/// abstract channel-occupancy scalar in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasInput {
    pub m_serv: f64,
    pub m_cand: f64,
    pub now_s: f64,
    pub d_serv_ref: f64,
    pub d_cand_ref: f64,
    pub m_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Leaf {
    A3 { offset: f64, hys: f64 },
    A5 { thresh1: f64, thresh2: f64, hys: f64 },
    TimeWindow { t1: f64, t2: f64 },
    Location { thresh_serv: f64, thresh_cand: f64 },
    ChannelOccupancy { threshold: f64, hys: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CondExpr {
    Leaf(Leaf),
    And(Box<CondExpr>, Box<CondExpr>),
}

impl CondExpr {
    fn collect<'a>(&'a self, out: &mut Vec<&'a Leaf>) {
        match self {
            CondExpr::Leaf(l) => out.push(l),
            CondExpr::And(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecCondition {
    pub expr: CondExpr,
    pub ttt_ms: u64,
}

impl ExecCondition {
    pub fn single(leaf: Leaf, ttt_ms: u64) -> Self {
        ExecCondition { expr: CondExpr::Leaf(leaf), ttt_ms }
    }

    pub fn and(left: Leaf, right: Leaf, ttt_ms: u64) -> Self {
        ExecCondition {
            expr: CondExpr::And(Box::new(CondExpr::Leaf(left)), Box::new(CondExpr::Leaf(right))),
            ttt_ms,
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::with_capacity(2);
        self.expr.collect(&mut out);
        out
    }

    /// First two leaves without allocating; validated conditions have no more.
    fn leaf_pair(&self) -> [Option<&Leaf>; 2] {
        match &self.expr {
            CondExpr::Leaf(l) => [Some(l), None],
            CondExpr::And(a, b) => match (a.as_ref(), b.as_ref()) {
                (CondExpr::Leaf(x), CondExpr::Leaf(y)) => [Some(x), Some(y)],
                _ => {
                    let v = self.leaves();
                    [v.first().copied(), v.get(1).copied()]
                }
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_condition(self)
    }
}

/// Structural check: at most two leaves, sane time windows and thresholds.
///
/// Every leaf here measures on the same reference signal (the SSB beams of
/// the cell), so the same-RS rule holds by construction.
pub fn validate_condition(cond: &ExecCondition) -> Result<()> {
    let leaves = cond.leaves();
    if leaves.len() > 2 {
        return Err(ChoError::config(format!(
            "execution condition has {} leaves; at most two are allowed",
            leaves.len()
        )));
    }
    for leaf in leaves {
        match *leaf {
            Leaf::TimeWindow { t1, t2 } if !(t1 <= t2) => {
                return Err(ChoError::config(format!("time window requires t1 <= t2 ({t1} > {t2})")))
            }
            Leaf::Location { thresh_serv, thresh_cand } if !(thresh_serv > 0.0 && thresh_cand > 0.0) => {
                return Err(ChoError::config("location thresholds must be > 0"))
            }
            Leaf::A3 { hys, .. } | Leaf::A5 { hys, .. } | Leaf::ChannelOccupancy { hys, .. } if hys < 0.0 => {
                return Err(ChoError::config("hysteresis must be >= 0"))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Event A3: candidate offset-better than serving. Returns the new entered state.
pub fn eval_a3(input: &MeasInput, offset: f64, hys: f64, entered: bool) -> bool {
    if !entered {
        input.m_cand - hys > input.m_serv + offset
    } else {
        !(input.m_cand + hys < input.m_serv + offset)
    }
}

/// Event A5: serving below `thresh1` and candidate above `thresh2`.
pub fn eval_a5(input: &MeasInput, thresh1: f64, thresh2: f64, hys: f64, entered: bool) -> bool {
    if !entered {
        input.m_serv + hys < thresh1 && input.m_cand - hys > thresh2
    } else {
        let leave = input.m_serv - hys > thresh1 || input.m_cand + hys < thresh2;
        !leave
    }
}

/// Inclusive window `[t1, t2]`.
pub fn eval_time_window(now_s: f64, t1: f64, t2: f64) -> bool {
    t1 <= now_s && now_s <= t2
}

pub fn eval_location(d_serv_ref: f64, d_cand_ref: f64, thresh_serv: f64, thresh_cand: f64) -> bool {
    d_serv_ref > thresh_serv && d_cand_ref < thresh_cand
}

/// Channel-occupancy entry: `m_c - hys > threshold`.
pub fn eval_channel_occupancy(m_c: f64, hys: f64, threshold: f64) -> bool {
    m_c - hys > threshold
}

impl Leaf {
    /// One evaluation of this leaf given its previous entered state.
    pub fn step(&self, input: &MeasInput, entered: bool) -> bool {
        match *self {
            Leaf::A3 { offset, hys } => eval_a3(input, offset, hys, entered),
            Leaf::A5 { thresh1, thresh2, hys } => eval_a5(input, thresh1, thresh2, hys, entered),
            Leaf::TimeWindow { t1, t2 } => eval_time_window(input.now_s, t1, t2),
            Leaf::Location { thresh_serv, thresh_cand } => {
                eval_location(input.d_serv_ref, input.d_cand_ref, thresh_serv, thresh_cand)
            }
            Leaf::ChannelOccupancy { threshold, hys } => {
                if !entered {
                    eval_channel_occupancy(input.m_c, hys, threshold)
                } else {
                    !(input.m_c + hys < threshold)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConditionState {
    /// Conjunction of all leaves' entered states.
    pub entered: bool,
    /// Start of the current uninterrupted entered run.
    pub hold_since_ms: Option<u64>,
    pub fulfilled: bool,
    /// Per-leaf hysteresis memory.
    pub leaf_entered: [bool; 2],
}

/// Advances a condition by one evaluation at `now_ms`.
pub fn eval_condition(cond: &ExecCondition, state: ConditionState, input: &MeasInput, now_ms: u64) -> ConditionState {
    let mut next = state;
    let mut all = true;
    for (i, leaf) in cond.leaf_pair().into_iter().enumerate() {
        let Some(leaf) = leaf else { continue };
        let e = leaf.step(input, state.leaf_entered[i]);
        next.leaf_entered[i] = e;
        all &= e;
    }
    next.entered = all;
    if all {
        let since = *next.hold_since_ms.get_or_insert(now_ms);
        next.fulfilled = now_ms.saturating_sub(since) >= cond.ttt_ms;
    } else {
        next.hold_since_ms = None;
        next.fulfilled = false;
    }
    next
}
