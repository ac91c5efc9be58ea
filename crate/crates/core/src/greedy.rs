//! Greedy construction over the stored set.
//!
//! Stored elements are visited newest first. An element still alive is
//! selected, and every element at or below it in any of its vertex queues is
//! killed, so each queue contributes at most one selected element.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::instance::EdgeId;
use crate::ledger::SlotOwner;
use crate::objectives::Objective;
use crate::streaming::StreamState;

#[derive(Debug, Error, PartialEq)]
pub enum GreedyError {
    #[error("matroid run must be finalized before the greedy phase")]
    NotFinalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub selected: EdgeId,
    /// Elements below `selected` in its vertex queues, visited by its chain
    /// walks (ascending edge id).
    pub marked: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Selected edges in selection order (reverse arrival).
    pub edges: Vec<EdgeId>,
    /// Objective value of `edges`, evaluated from scratch.
    pub value: f64,
    pub provenance: Vec<Provenance>,
}

impl Matching {
    /// Selected edges in arrival order.
    pub fn sorted_edges(&self) -> Vec<EdgeId> {
        let mut v = self.edges.clone();
        v.sort_unstable();
        v
    }

    /// One-based arrival ordinals, ascending.
    pub fn ordinals(&self) -> Vec<usize> {
        self.sorted_edges().into_iter().map(|e| e + 1).collect()
    }
}

/// Runs the greedy phase on a completed (and, for matroid runs, finalized)
/// streaming state.
pub fn build(state: &StreamState, objective: &dyn Objective) -> Result<Matching, GreedyError> {
    if state.is_matroid_run() && state.finalized().is_none() {
        return Err(GreedyError::NotFinalized);
    }
    let ledger = &state.ledger;
    let mut alive: Vec<bool> = ledger.records().map(|(_, el)| !el.removed).collect();
    let mut edges = Vec::new();
    let mut provenance = Vec::new();

    for id in ledger.stored().rev() {
        if !alive[id.0] {
            continue;
        }
        let el = ledger.element(id);
        let mut marked = BTreeSet::new();
        for slot in el.slots.iter().filter(|s| matches!(s.owner, SlotOwner::Vertex(_))) {
            for c in ledger.chain(id, slot.owner) {
                alive[c.0] = false;
                if c != id {
                    marked.insert(ledger.element(c).edge);
                }
            }
        }
        edges.push(el.edge);
        provenance.push(Provenance { selected: el.edge, marked: marked.into_iter().collect() });
    }
    let value = objective.value(&edges);
    Ok(Matching { edges, value, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_random, parse_instance};
    use crate::matroids::UniformMatroid;
    use crate::objectives::LinearObjective;
    use crate::streaming::{stream_matroid, stream_weighted, StreamParams};

    #[test]
    fn empty_state_gives_empty_matching() {
        let inst = parse_instance("p bmatching 2 0 2\n").unwrap();
        let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        let m = build(&st, &LinearObjective::new(vec![])).unwrap();
        assert!(m.edges.is_empty());
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn worked_example_selects_e2_e3() {
        let inst = parse_instance("p bmatching 4 3 2\nc 0 2\ne 0 1 2\ne 0 2 7\ne 0 3 4\n").unwrap();
        let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        let m = build(&st, &LinearObjective::new(inst.weights())).unwrap();
        assert_eq!(m.edges, vec![2, 1]);
        assert_eq!(m.value, 11.0);
        assert_eq!(m.provenance[0], Provenance { selected: 2, marked: vec![0] });
        assert_eq!(m.provenance[1], Provenance { selected: 1, marked: vec![] });
        assert_eq!(m.ordinals(), vec![2, 3]);
    }

    #[test]
    fn weight_covers_total_gain() {
        for seed in 0..500 {
            let inst = generate_random(seed, 8, 12, 2, 3, 20).unwrap();
            let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
            let m = build(&st, &LinearObjective::new(inst.weights())).unwrap();
            assert!(m.value >= st.gain_total() * (1.0 - 1e-9), "seed {seed}");
        }
    }

    #[test]
    fn matroid_run_needs_finalize() {
        let inst = parse_instance("p bmatching 2 1 2\ne 0 1 3\n").unwrap();
        let f = LinearObjective::new(inst.weights());
        let mat = UniformMatroid::new(1);
        let mut st = stream_matroid(&inst, &f, &mat, StreamParams { epsilon: 1.0, ..Default::default() }).unwrap();
        assert_eq!(build(&st, &f), Err(GreedyError::NotFinalized));
        st.finalize_topset().unwrap();
        assert_eq!(build(&st, &f).unwrap().edges, vec![0]);
    }
}
