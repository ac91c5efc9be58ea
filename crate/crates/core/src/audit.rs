//! Invariant checks over oracles, stream states and matchings.
//!
//! Each check returns the first violation it finds. They are cheap enough
//! for desk-scale instances and are shared by the unit, property and
//! acceptance suites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::greedy::Matching;
use crate::instance::{EdgeId, Instance};
use crate::ledger::{Ledger, SlotOwner};
use crate::matroids::{max_weight_base, Matroid};
use crate::objectives::Objective;
use crate::streaming::{StreamState, Trace};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

impl std::error::Error for Violation {}

pub type AuditResult = Result<(), Violation>;

fn fail(check: &'static str, detail: String) -> AuditResult {
    Err(Violation { check, detail })
}

fn slack(a: f64, b: f64) -> f64 {
    TOL * a.abs().max(b.abs()).max(1.0)
}

/// `lhs >= rhs` up to relative tolerance.
pub fn geq(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - slack(lhs, rhs)
}

/// `lhs == rhs` up to relative tolerance.
pub fn close(lhs: f64, rhs: f64) -> bool {
    (lhs - rhs).abs() <= slack(lhs, rhs)
}

fn members(mask: u32, ground: usize) -> Vec<EdgeId> {
    (0..ground).filter(|i| mask >> i & 1 == 1).collect()
}

/// Exhaustive non-negativity, diminishing returns and (optionally)
/// monotonicity over every subset of the first `ground` edges.
pub fn check_submodular<F: Objective + ?Sized>(f: &F, ground: usize, monotone: bool) -> AuditResult {
    assert!(ground <= 16, "exhaustive check over at most 16 elements");
    let full = 1u32 << ground;
    let values: Vec<f64> = (0..full).map(|mask| f.value(&members(mask, ground))).collect();
    for (mask, &v) in values.iter().enumerate() {
        if v < -TOL {
            return fail("non-negativity", format!("f({:?}) = {v}", members(mask as u32, ground)));
        }
    }
    for b in 0..full {
        for e in (0..ground).filter(|e| b >> e & 1 == 0) {
            let gain_b = values[(b | 1 << e) as usize] - values[b as usize];
            if monotone && gain_b < -slack(values[b as usize], 0.0) {
                return fail("monotonicity", format!("f({e} | {:?}) = {gain_b}", members(b, ground)));
            }
            // every subset a of b
            let mut a = b;
            loop {
                let gain_a = values[(a | 1 << e) as usize] - values[a as usize];
                if gain_a < gain_b - slack(gain_a, gain_b) {
                    return fail(
                        "submodularity",
                        format!(
                            "f({e} | {:?}) = {gain_a} < f({e} | {:?}) = {gain_b}",
                            members(a, ground),
                            members(b, ground)
                        ),
                    );
                }
                if a == 0 {
                    break;
                }
                a = (a - 1) & b;
            }
        }
    }
    Ok(())
}

/// Empty set independent, downward closure and exchange, exhaustively.
pub fn check_matroid_axioms<M: Matroid + ?Sized>(m: &M, ground: usize) -> AuditResult {
    assert!(ground <= 12, "exhaustive check over at most 12 elements");
    let full = 1u32 << ground;
    let indep: Vec<bool> = (0..full).map(|mask| m.is_independent(&members(mask, ground))).collect();
    if !indep[0] {
        return fail("empty set independent", String::new());
    }
    for s in 0..full {
        if !indep[s as usize] {
            continue;
        }
        for e in (0..ground).filter(|e| s >> e & 1 == 1) {
            if !indep[(s & !(1 << e)) as usize] {
                return fail("downward closure", format!("{:?} minus {e}", members(s, ground)));
            }
        }
    }
    for s in 0..full {
        if !indep[s as usize] {
            continue;
        }
        for t in 0..full {
            if !indep[t as usize] || t.count_ones() <= s.count_ones() {
                continue;
            }
            let extendable =
                (0..ground).filter(|e| t >> e & 1 == 1 && s >> e & 1 == 0).any(|e| indep[(s | 1 << e) as usize]);
            if !extendable {
                return fail("exchange", format!("{:?} cannot grow from {:?}", members(s, ground), members(t, ground)));
            }
        }
    }
    let largest = (0..full).filter(|&s| indep[s as usize]).map(|s| s.count_ones()).max().unwrap_or(0);
    if largest as usize > m.rank() {
        return fail("rank", format!("independent set of size {largest} exceeds rank {}", m.rank()));
    }
    Ok(())
}

/// For every independent `I` and `e` outside it: `find_circuit` agrees with
/// independence of `I + e`, the circuit contains `e`, is dependent and
/// minimal, and is the only circuit in `I + e`. Also checks strong circuit
/// elimination over all pairs of circuits found this way.
pub fn check_circuit_elimination<M: Matroid + ?Sized>(m: &M, ground: usize) -> AuditResult {
    assert!(ground <= 10, "exhaustive check over at most 10 elements");
    let full = 1u32 << ground;
    let indep: Vec<bool> = (0..full).map(|mask| m.is_independent(&members(mask, ground))).collect();
    let to_mask = |set: &[EdgeId]| set.iter().fold(0u32, |acc, &e| acc | 1 << e);
    let is_circuit =
        |c: u32| !indep[c as usize] && (0..ground).filter(|e| c >> e & 1 == 1).all(|e| indep[(c & !(1 << e)) as usize]);

    let mut circuits = BTreeSet::new();
    for s in (0..full).filter(|&s| indep[s as usize]) {
        let set = members(s, ground);
        for e in (0..ground).filter(|e| s >> e & 1 == 0) {
            let found = m
                .find_circuit(&set, e)
                .map_err(|err| Violation { check: "find_circuit", detail: format!("{err} on {set:?} + {e}") })?;
            let joined = s | 1 << e;
            match found {
                None if !indep[joined as usize] => {
                    return fail("circuit existence", format!("{set:?} + {e} is dependent"));
                }
                None => {}
                Some(c) => {
                    let cm = to_mask(&c);
                    if indep[joined as usize] || cm & !joined != 0 || cm >> e & 1 == 0 || !is_circuit(cm) {
                        return fail("circuit minimality", format!("{c:?} for {set:?} + {e}"));
                    }
                    // any other circuit inside I + e would also contain e
                    let mut sub = joined;
                    while sub != 0 {
                        if sub != cm && sub >> e & 1 == 1 && is_circuit(sub) {
                            return fail(
                                "circuit uniqueness",
                                format!("{:?} and {c:?} in {set:?} + {e}", members(sub, ground)),
                            );
                        }
                        sub = (sub - 1) & joined;
                    }
                    circuits.insert(cm);
                }
            }
        }
    }
    let list: Vec<u32> = circuits.into_iter().collect();
    for (i, &c1) in list.iter().enumerate() {
        for &c2 in &list[i + 1..] {
            let common = c1 & c2;
            for x in (0..ground).filter(|x| common >> x & 1 == 1) {
                for y in (0..ground).filter(|y| (c1 & !c2) >> y & 1 == 1) {
                    let pool = (c1 | c2) & !(1 << x);
                    let mut sub = pool;
                    let mut ok = false;
                    while sub != 0 {
                        if sub >> y & 1 == 1 && is_circuit(sub) {
                            ok = true;
                            break;
                        }
                        sub = (sub - 1) & pool;
                    }
                    if !ok {
                        return fail(
                            "circuit elimination",
                            format!("{:?}, {:?}, x = {x}, y = {y}", members(c1, ground), members(c2, ground)),
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

/// Link consistency, queue lengths, strictly increasing reduced weights and
/// strictly increasing arrival order from the bottom of every queue up.
/// Decreasing ids along a walk also rule out cycles.
pub fn check_queue_structure(ledger: &Ledger) -> AuditResult {
    for owner in ledger.owners().collect::<Vec<_>>() {
        for (q, queue) in ledger.queue_set(owner).queues.iter().enumerate() {
            let mut count = 0;
            let mut prev: Option<(crate::ledger::ElementId, f64)> = None;
            let mut cur = queue.top;
            if let Some(t) = cur {
                if ledger.element(t).slot(owner).and_then(|s| s.above).is_some() {
                    return fail("queue links", format!("{owner:?}/{q}: top has a successor"));
                }
            }
            while let Some(id) = cur {
                let el = ledger.element(id);
                if el.removed {
                    return fail("queue links", format!("{owner:?}/{q}: removed element {id:?} reachable"));
                }
                let slot = el.slot(owner).expect("queued element has a slot");
                if slot.queue != q {
                    return fail("queue links", format!("{owner:?}/{q}: {id:?} records queue {}", slot.queue));
                }
                if let Some((above, w_above)) = prev {
                    if id >= above {
                        return fail("arrival order", format!("{owner:?}/{q}: {id:?} below {above:?}"));
                    }
                    if slot.reduced_weight >= w_above {
                        return fail(
                            "increasing reduced weights",
                            format!("{owner:?}/{q}: {} below {w_above}", slot.reduced_weight),
                        );
                    }
                    if slot.above != Some(above) {
                        return fail("queue links", format!("{owner:?}/{q}: broken back link at {id:?}"));
                    }
                }
                count += 1;
                if count > ledger.records().count() {
                    return fail("acyclic chains", format!("{owner:?}/{q}"));
                }
                prev = Some((id, slot.reduced_weight));
                cur = slot.below;
            }
            if count != queue.len {
                return fail("queue length", format!("{owner:?}/{q}: walked {count}, recorded {}", queue.len));
            }
        }
    }
    Ok(())
}

/// Every queued reduced weight equals the sum of gains at or below it in the
/// same queue. Holds for runs without eviction or finalization.
pub fn check_prefix_gains(ledger: &Ledger) -> AuditResult {
    for owner in ledger.owners().collect::<Vec<_>>() {
        for q in 0..ledger.queue_set(owner).queues.len() {
            let mut acc = 0.0;
            for id in ledger.queue_elements(owner, q).into_iter().rev() {
                acc += ledger.element(id).gain;
                let w = ledger.reduced_weight(id, owner);
                if !close(w, acc) {
                    return fail("prefix gains", format!("{owner:?}/{q} {id:?}: w = {w}, prefix = {acc}"));
                }
            }
        }
    }
    Ok(())
}

/// Sum of a vertex's queue weights equals the gain of its stored incident
/// elements (runs without eviction or finalization).
pub fn check_vertex_gain_sums(ledger: &Ledger) -> AuditResult {
    let mut incident = vec![0.0; ledger.vertex_count()];
    for id in ledger.stored() {
        let el = ledger.element(id);
        for s in &el.slots {
            if let SlotOwner::Vertex(v) = s.owner {
                incident[v] += el.gain;
            }
        }
    }
    for (v, &g) in incident.iter().enumerate() {
        let owner = SlotOwner::Vertex(v);
        let w: f64 = (0..ledger.queue_set(owner).queues.len()).map(|q| ledger.queue_weight(owner, q)).sum();
        if !close(w, g) {
            return fail("vertex queue weight", format!("vertex {v}: queues {w}, incident gain {g}"));
        }
    }
    Ok(())
}

/// The tops of each vertex carry the largest reduced weights among its
/// stored elements.
pub fn check_tops_heaviest(ledger: &Ledger) -> AuditResult {
    for v in 0..ledger.vertex_count() {
        let owner = SlotOwner::Vertex(v);
        let tops: BTreeSet<_> = ledger.tops(owner).map(|(_, id)| id).collect();
        let lightest_top = tops.iter().map(|&id| ledger.reduced_weight(id, owner)).fold(f64::INFINITY, f64::min);
        let free_queue = tops.len() < ledger.queue_set(owner).queues.len();
        for id in ledger.stored().filter(|id| !tops.contains(id)) {
            let Some(slot) = ledger.element(id).slot(owner) else { continue };
            if free_queue || slot.reduced_weight > lightest_top + slack(slot.reduced_weight, lightest_top) {
                return fail(
                    "tops heaviest",
                    format!("vertex {v}: {id:?} with {} outweighs top {lightest_top}", slot.reduced_weight),
                );
            }
        }
    }
    Ok(())
}

/// Every positive-gain, threshold and stored-slot relation recorded in the
/// trace, rechecked from the recorded `w*` values.
pub fn check_trace(state: &StreamState) -> AuditResult {
    let Some(trace) = &state.trace else {
        return fail("trace", "run has no trace".into());
    };
    let alpha = state.params.alpha();
    let gamma = state.params.gamma;
    for rec in &trace.arrivals {
        let vs = rec.vertex_w_star_sum();
        let m_star = rec.matroid.as_ref().map_or(0.0, |m| m.w_star());
        let expected = alpha * (vs + if rec.matroid.is_some() { gamma * m_star } else { 0.0 });
        if m_star.is_finite() && !close(rec.threshold, expected) {
            return fail("threshold", format!("edge {}: {} vs {expected}", rec.edge, rec.threshold));
        }
        if rec.passed != (rec.value > rec.threshold) {
            return fail(
                "strict threshold",
                format!("edge {}: value {} threshold {}", rec.edge, rec.value, rec.threshold),
            );
        }
        if rec.stored.is_some() != (rec.passed && rec.coin != Some(false)) {
            return fail("storage decision", format!("edge {}", rec.edge));
        }
        if let Some(id) = rec.stored {
            let el = state.ledger.element(id);
            let gain = rec.value - vs - m_star;
            if el.edge != rec.edge || !close(el.gain, gain) || el.gain <= 0.0 {
                return fail("gain identity", format!("edge {}: gain {} vs {gain}", rec.edge, el.gain));
            }
            for &(u, _, w) in &rec.vertex_slots {
                let rw = el.slot(SlotOwner::Vertex(u)).map(|s| s.reduced_weight);
                if rw.is_none_or(|rw| !close(rw, w + gain)) {
                    return fail("reduced weight", format!("edge {} at vertex {u}", rec.edge));
                }
            }
        }
    }
    Ok(())
}

/// `g(S) >= eps/(1+eps) * f(S | empty)`. Uses the recorded marginals of the
/// stored elements, and the objective itself when `S` is still every
/// committed edge.
pub fn check_gain_floor(state: &StreamState, objective: &dyn Objective) -> AuditResult {
    let Some(trace) = &state.trace else {
        return fail("trace", "run has no trace".into());
    };
    let eps = state.params.epsilon;
    let factor = eps / (1.0 + eps);
    let stored: BTreeSet<_> = state.ledger.stored().collect();
    let value_sum: f64 =
        trace.arrivals.iter().filter(|r| r.stored.is_some_and(|id| stored.contains(&id))).map(|r| r.value).sum();
    let g = state.gain_total();
    if !geq(g, factor * value_sum) {
        return fail("gain floor", format!("g(S) = {g}, values {value_sum}"));
    }
    if !state.variant.is_weighted() && stored.len() == state.committed.len() {
        let edges = state.stored_edges();
        let marginal = objective.value(&edges) - objective.empty_value();
        if !close(marginal, value_sum) {
            return fail("marginal replay", format!("f(S|∅) = {marginal}, committed marginals {value_sum}"));
        }
        if !geq(g, factor * marginal) {
            return fail("gain floor", format!("g(S) = {g}, f(S|∅) = {marginal}"));
        }
    }
    Ok(())
}

/// `g(e') >= g(e) / eps` for every element `e` marked erasable by `e'`.
pub fn check_evictions(trace: &Trace, epsilon: f64) -> AuditResult {
    for ev in &trace.evictions {
        if !geq(ev.by_gain, ev.evicted_gain / epsilon) {
            return fail(
                "eviction gain",
                format!("{:?} (gain {}) marked by {:?} (gain {})", ev.evicted, ev.evicted_gain, ev.by, ev.by_gain),
            );
        }
    }
    Ok(())
}

/// Elements at depth `beta` or deeper in a vertex queue are erasable, and
/// every queue holds at most `beta + 1` elements that are not erasable.
pub fn check_eviction_depth(ledger: &Ledger, beta: usize) -> AuditResult {
    for v in 0..ledger.vertex_count() {
        let owner = SlotOwner::Vertex(v);
        for q in 0..ledger.queue_set(owner).queues.len() {
            for (depth, id) in ledger.queue_elements(owner, q).into_iter().enumerate() {
                if depth >= beta && !ledger.element(id).erasable {
                    return fail("eviction depth", format!("vertex {v} queue {q}: {id:?} at depth {depth}"));
                }
            }
        }
    }
    Ok(())
}

/// `log_{1+eps}(spread / eps) + 1`.
pub fn queue_length_bound(epsilon: f64, spread: f64) -> f64 {
    (spread / epsilon).ln() / (1.0 + epsilon).ln() + 1.0
}

/// Longest queue ever seen stays within [`queue_length_bound`].
pub fn check_queue_lengths(state: &StreamState, spread: f64) -> AuditResult {
    let bound = queue_length_bound(state.params.epsilon, spread);
    let longest = state.max_queue_length();
    if (longest as f64) > bound + TOL {
        return fail("queue length bound", format!("length {longest} exceeds {bound}"));
    }
    Ok(())
}

/// Capacity feasibility, independence (when a matroid is given), selection
/// from the stored set, at most one selected element per vertex queue, and
/// every stored element either selected or below a selected one.
pub fn check_matching(
    inst: &Instance,
    state: &StreamState,
    matching: &Matching,
    matroid: Option<&dyn Matroid>,
) -> AuditResult {
    let ledger = &state.ledger;
    let mut degree = vec![0usize; inst.n];
    for &e in &matching.edges {
        for &v in &inst.edges[e].endpoints {
            degree[v] += 1;
        }
    }
    for (v, (&d, &b)) in degree.iter().zip(&inst.capacities).enumerate() {
        if d > b {
            return fail("capacity", format!("vertex {v}: degree {d} > {b}"));
        }
    }
    if let Some(m) = matroid {
        if !m.is_independent(&matching.edges) {
            return fail("independence", format!("{:?}", matching.edges));
        }
    }
    let by_edge: BTreeMap<EdgeId, _> = ledger.stored().map(|id| (ledger.element(id).edge, id)).collect();
    let selected: BTreeSet<EdgeId> = matching.edges.iter().copied().collect();
    if selected.len() != matching.edges.len() {
        return fail("distinct selection", format!("{:?}", matching.edges));
    }
    if let Some(e) = selected.iter().find(|e| !by_edge.contains_key(e)) {
        return fail("selection from S", format!("edge {e} is not stored"));
    }
    for v in 0..ledger.vertex_count() {
        let owner = SlotOwner::Vertex(v);
        for q in 0..ledger.queue_set(owner).queues.len() {
            let hits = ledger
                .queue_elements(owner, q)
                .into_iter()
                .filter(|id| selected.contains(&ledger.element(*id).edge))
                .count();
            if hits > 1 {
                return fail("one per queue", format!("vertex {v} queue {q}: {hits} selected"));
            }
        }
    }
    let mut covered: BTreeSet<EdgeId> = selected.clone();
    for p in &matching.provenance {
        for &c in &p.marked {
            let shares_queue = ledger.element(by_edge[&p.selected]).slots.iter().any(|s| {
                matches!(s.owner, SlotOwner::Vertex(_))
                    && ledger.element(by_edge[&c]).slot(s.owner).is_some_and(|cs| cs.queue == s.queue)
            });
            if c >= p.selected || !shares_queue {
                return fail("provenance", format!("{} marked {c}", p.selected));
            }
            covered.insert(c);
        }
    }
    if let Some(e) = by_edge.keys().find(|e| !covered.contains(e)) {
        return fail("coverage by later selection", format!("stored edge {e} neither selected nor marked"));
    }
    Ok(())
}

/// Matching value is at least `g(S) + f(empty)`.
pub fn check_value_covers_gain(state: &StreamState, matching: &Matching, objective: &dyn Objective) -> AuditResult {
    let floor = state.gain_total() + objective.empty_value();
    if !geq(matching.value, floor) {
        return fail("value covers gain", format!("f(M) = {}, g(S) + f(∅) = {floor}", matching.value));
    }
    Ok(())
}

/// `(1 + 1/(gamma(1+eps) - 1)) g(S_f) >= g(S)` across finalization.
pub fn check_finalize_gain(gain_before: f64, state: &StreamState) -> AuditResult {
    let factor = 1.0 + 1.0 / (state.params.gamma * state.params.alpha() - 1.0);
    let after = state.gain_total();
    if !geq(factor * after, gain_before) {
        return fail("finalize gain", format!("{factor} * {after} < {gain_before}"));
    }
    Ok(())
}

/// The matroid queue tops are a maximum-weight independent subset of the
/// stored set under matroid reduced weights.
pub fn check_top_base(ledger: &Ledger, matroid: &dyn Matroid) -> AuditResult {
    let owner = SlotOwner::Matroid;
    let mut weights = vec![0.0; ledger.records().map(|(_, el)| el.edge + 1).max().unwrap_or(0)];
    let mut universe = Vec::new();
    for id in ledger.stored() {
        let el = ledger.element(id);
        weights[el.edge] = ledger.reduced_weight(id, owner);
        universe.push(el.edge);
    }
    let tops: Vec<EdgeId> = ledger.tops(owner).map(|(_, id)| ledger.element(id).edge).collect();
    if !matroid.is_independent(&tops) {
        return fail("top base", format!("tops {tops:?} dependent"));
    }
    let top_weight: f64 = tops.iter().map(|&e| weights[e]).sum();
    let (_, best) = max_weight_base(matroid, &weights, &universe);
    if !close(top_weight, best) {
        return fail("top base", format!("tops weigh {top_weight}, best base {best}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroids::UniformMatroid;
    use crate::objectives::LinearObjective;

    struct Supermodular;

    impl Objective for Supermodular {
        fn value(&self, set: &[EdgeId]) -> f64 {
            (set.len() * set.len()) as f64
        }
        fn is_monotone(&self) -> bool {
            true
        }
    }

    struct Shrinking;

    impl Objective for Shrinking {
        fn value(&self, set: &[EdgeId]) -> f64 {
            (set.len() * (3 - set.len())) as f64
        }
        fn is_monotone(&self) -> bool {
            false
        }
    }

    struct NotDownwardClosed;

    impl Matroid for NotDownwardClosed {
        fn is_independent(&self, set: &[EdgeId]) -> bool {
            set.len() != 1
        }
        fn rank(&self) -> usize {
            3
        }
    }

    #[test]
    fn linear_passes() {
        check_submodular(&LinearObjective::new(vec![1.0, 2.0, 0.0, 4.0]), 4, true).unwrap();
    }

    #[test]
    fn supermodular_rejected() {
        assert_eq!(check_submodular(&Supermodular, 3, false).unwrap_err().check, "submodularity");
    }

    #[test]
    fn decreasing_rejected_as_monotone() {
        assert_eq!(check_submodular(&Shrinking, 3, true).unwrap_err().check, "monotonicity");
        check_submodular(&Shrinking, 3, false).unwrap();
    }

    #[test]
    fn uniform_passes_axioms() {
        let m = UniformMatroid::new(2);
        check_matroid_axioms(&m, 5).unwrap();
        check_circuit_elimination(&m, 5).unwrap();
    }

    #[test]
    fn broken_matroid_rejected() {
        assert_eq!(check_matroid_axioms(&NotDownwardClosed, 3).unwrap_err().check, "downward closure");
    }

    #[test]
    fn queue_length_bound_values() {
        assert!((queue_length_bound(0.1, 1.0) - (10f64.ln() / 1.1f64.ln() + 1.0)).abs() < 1e-12);
    }
}
