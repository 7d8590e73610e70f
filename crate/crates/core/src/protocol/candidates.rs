use super::{PendingPreparation, PreparedCandidate, ProtocolParams, StepInput, UeProtocolState};
use crate::conditions::{eval_condition, ConditionState};
use crate::events::{Event, EventKind};

/// CHO preparation bookkeeping for one step.
///
/// On measurement ticks: releases candidates that fell below
/// `serving - o_prep - release_hys`, then requests preparation for cells whose
/// L3 RSRP exceeds `serving - o_prep`, strongest first, while capacity (or a
/// weaker prepared cell to evict) exists. Every step: delivers requests whose
/// signalling delay has elapsed, provided the serving link is not in outage.
pub fn check_preparation(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams, ev: &mut Vec<Event>) {
    let now = inp.now_ms;
    let serv = ue.serving_cell;
    let l3 = |c: usize| inp.meas.l3(c);

    if inp.fresh {
        let floor = l3(serv) - p.o_prep - p.release_hys;
        let mut released = Vec::new();
        ue.prepared.retain(|c| {
            let keep = l3(c.cell_id) >= floor;
            if !keep {
                released.push(c.cell_id);
            }
            keep
        });
        for cell in released {
            ue.trigger_states[cell] = ConditionState::default();
            ev.push(Event::new(now, ue.ue_id, EventKind::CandidateReleased, serv, Some(cell)).with_detail("prep"));
        }

        let mut qualified: Vec<(usize, f64)> = Vec::new();
        for cell in 0..ue.trigger_states.len() {
            if cell == serv {
                continue;
            }
            let input = inp.meas_input(serv, cell, p.channel_occupancy);
            let st = eval_condition(&p.prep_condition, ue.trigger_states[cell], &input, now);
            ue.trigger_states[cell] = st;
            let known = ue.prepared.iter().any(|c| c.cell_id == cell) || ue.pending.iter().any(|c| c.cell_id == cell);
            if st.fulfilled && !known {
                qualified.push((cell, input.m_cand));
            }
        }
        qualified.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for (cell, rsrp) in qualified {
            let has_room = ue.prepared.len() + ue.pending.len() < p.max_prepared;
            let can_replace = ue.pending.is_empty()
                && ue.prepared.len() == p.max_prepared
                && weakest(ue, inp).is_some_and(|(_, w)| rsrp > w);
            if !(has_room || can_replace) {
                break;
            }
            ev.push(Event::new(now, ue.ue_id, EventKind::MeasReport, serv, Some(cell)).with_detail("prep"));
            ue.pending.push(PendingPreparation { cell_id: cell, deliver_at_ms: now + p.command_latency_ms() });
        }
    }

    let due: Vec<PendingPreparation> = ue.pending.iter().copied().filter(|x| now >= x.deliver_at_ms).collect();
    if due.is_empty() {
        return;
    }
    ue.pending.retain(|x| now < x.deliver_at_ms);
    let delivered = inp.meas.sinr(serv) >= p.qout;
    for x in due {
        if !delivered {
            ev.push(Event::new(now, ue.ue_id, EventKind::CommandLost, serv, Some(x.cell_id)).with_detail("prep"));
            ue.trigger_states[x.cell_id] = ConditionState::default();
            continue;
        }
        if ue.prepared.len() >= p.max_prepared {
            match weakest(ue, inp) {
                Some((idx, w)) if inp.meas.l3(x.cell_id) > w => {
                    let old = ue.prepared.remove(idx);
                    ue.trigger_states[old.cell_id] = ConditionState::default();
                    ev.push(Event::new(now, ue.ue_id, EventKind::CandidateReleased, serv, Some(old.cell_id)).with_detail("evict"));
                }
                _ => {
                    ue.trigger_states[x.cell_id] = ConditionState::default();
                    continue;
                }
            }
        }
        ue.prepared.push(PreparedCandidate {
            cell_id: x.cell_id,
            exec_condition: p.exec_condition.clone(),
            condition_state: ConditionState::default(),
            prepared_at_ms: now,
        });
        ev.push(Event::new(now, ue.ue_id, EventKind::CandidateAdded, serv, Some(x.cell_id)));
    }
}

fn weakest(ue: &UeProtocolState, inp: &StepInput<'_>) -> Option<(usize, f64)> {
    ue.prepared
        .iter()
        .enumerate()
        .map(|(i, c)| (i, inp.meas.l3(c.cell_id)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Evaluates every prepared candidate's execution condition and returns the
/// fulfilled candidate with the highest L3 RSRP (lowest cell id on ties).
pub fn check_execution(ue: &mut UeProtocolState, inp: &StepInput<'_>, p: &ProtocolParams) -> Option<usize> {
    let serv = ue.serving_cell;
    let mut best: Option<(usize, f64)> = None;
    for cand in ue.prepared.iter_mut() {
        let input = inp.meas_input(serv, cand.cell_id, p.channel_occupancy);
        cand.condition_state = eval_condition(&cand.exec_condition, cand.condition_state, &input, inp.now_ms);
        if cand.condition_state.fulfilled {
            let better = match best {
                None => true,
                Some((id, r)) => input.m_cand > r || (input.m_cand == r && cand.cell_id < id),
            };
            if better {
                best = Some((cand.cell_id, input.m_cand));
            }
        }
    }
    best.map(|(c, _)| c)
}

/// True when a handover that just completed into `new_serving` returns to
/// the previous source within `window_ms` of the previous completion.
pub fn detect_ping_pong(ue: &UeProtocolState, new_serving: usize, now_ms: u64, window_ms: u64) -> bool {
    match (ue.last_ho_source, ue.last_ho_completed_ms) {
        (Some(src), Some(at)) => src == new_serving && now_ms.saturating_sub(at) <= window_ms,
        _ => false,
    }
}
