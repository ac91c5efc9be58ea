//! Exhaustive ground truth for small instances.

use thiserror::Error;

use crate::instance::{EdgeId, Instance, VertexId};
use crate::ledger::SlotOwner;
use crate::matroids::Matroid;
use crate::objectives::Objective;
use crate::streaming::StreamState;

/// Largest stream the enumerators accept.
pub const MAX_EDGES: usize = 22;

const REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("{m} edges exceed the enumeration limit of {limit}")]
    TooLarge { m: usize, limit: usize },
    #[error("assertion failed: {what}\n{dump}")]
    AssertionFailure { what: String, dump: String },
    #[error("the stream state carries no arrival trace")]
    MissingTrace,
    #[error("gain audit applies to weighted runs only")]
    NotWeighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    /// Ascending edge ids.
    pub optimum_set: Vec<EdgeId>,
    pub optimum_value: f64,
    /// Number of feasible sets evaluated.
    pub explored: u64,
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Strictly better value, or a tie broken towards the lexicographically
/// smaller set.
fn improves(value: f64, set: &[EdgeId], best: &Option<(f64, Vec<EdgeId>)>) -> bool {
    match best {
        None => true,
        Some((bv, bs)) => {
            if approx_eq(value, *bv) {
                set < bs.as_slice()
            } else {
                value > *bv
            }
        }
    }
}

struct Search<'a> {
    inst: &'a Instance,
    objective: &'a dyn Objective,
    matroid: Option<&'a dyn Matroid>,
    degree: Vec<usize>,
    chosen: Vec<EdgeId>,
    best: Option<(f64, Vec<EdgeId>)>,
    explored: u64,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize) {
        if i == self.inst.m() {
            self.explored += 1;
            let value = self.objective.value(&self.chosen);
            if improves(value, &self.chosen, &self.best) {
                self.best = Some((value, self.chosen.clone()));
            }
            return;
        }
        let edge = &self.inst.edges[i];
        let fits = edge.endpoints.iter().all(|&v| self.degree[v] < self.inst.capacities[v]);
        if fits {
            self.chosen.push(i);
            if self.matroid.is_none_or(|m| m.is_independent(&self.chosen)) {
                for &v in &edge.endpoints {
                    self.degree[v] += 1;
                }
                self.dfs(i + 1);
                for &v in &edge.endpoints {
                    self.degree[v] -= 1;
                }
            }
            self.chosen.pop();
        }
        self.dfs(i + 1);
    }
}

/// Best feasible b-matching (capacities, and independence when a matroid is
/// given) under `objective`, by depth-first enumeration with pruning.
pub fn exact_bmatching(
    inst: &Instance,
    objective: &dyn Objective,
    matroid: Option<&dyn Matroid>,
) -> Result<ExactResult, ExactError> {
    if inst.m() > MAX_EDGES {
        return Err(ExactError::TooLarge { m: inst.m(), limit: MAX_EDGES });
    }
    let mut s =
        Search { inst, objective, matroid, degree: vec![0; inst.n], chosen: Vec::new(), best: None, explored: 0 };
    s.dfs(0);
    let (optimum_value, optimum_set) = s.best.expect("the empty set is always feasible");
    Ok(ExactResult { optimum_set, optimum_value, explored: s.explored })
}

/// Capacity and independence feasibility of an arbitrary edge set.
pub fn is_feasible(inst: &Instance, set: &[EdgeId], matroid: Option<&dyn Matroid>) -> bool {
    let mut degree = vec![0usize; inst.n];
    for &e in set {
        for &v in &inst.edges[e].endpoints {
            degree[v] += 1;
        }
    }
    degree.iter().zip(&inst.capacities).all(|(d, b)| d <= b) && matroid.is_none_or(|m| m.is_independent(set))
}

/// Plain scan over all `2^m` subsets; the reference for [`exact_bmatching`].
pub fn exact_bmatching_naive(
    inst: &Instance,
    objective: &dyn Objective,
    matroid: Option<&dyn Matroid>,
) -> Result<ExactResult, ExactError> {
    let m = inst.m();
    if m > MAX_EDGES {
        return Err(ExactError::TooLarge { m, limit: MAX_EDGES });
    }
    let mut best = None;
    let mut explored = 0;
    for mask in 0u64..(1u64 << m) {
        let set: Vec<EdgeId> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        if !is_feasible(inst, &set, matroid) {
            continue;
        }
        explored += 1;
        let value = objective.value(&set);
        if improves(value, &set, &best) {
            best = Some((value, set));
        }
    }
    let (optimum_value, optimum_set) = best.expect("the empty set is always feasible");
    Ok(ExactResult { optimum_set, optimum_value, explored })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexCheck {
    pub vertex: VertexId,
    /// `w_v(Q_v)`: sum of the vertex's queue weights at the end of the stream.
    pub queue_weight: f64,
    /// `w_v(M' ∩ δ(v))` for `M'` the optimum.
    pub optimum_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub gain_total: f64,
    pub optimum_value: f64,
    /// `c` such that `c * g(S) >= w(OPT)` is guaranteed for this run.
    pub bound_factor: f64,
    pub vertices: Vec<VertexCheck>,
}

/// Factor relating the retained gain to the optimum for a weighted run:
/// `k(1 + eps)`, times the eviction-chain loss `1 + k eps / (1 - k eps)`
/// when eviction is on.
pub fn gain_bound_factor(k: usize, epsilon: f64, evict: bool) -> f64 {
    let k = k as f64;
    let base = k * (1.0 + epsilon);
    if evict {
        base * (1.0 + k * epsilon / (1.0 - k * epsilon))
    } else {
        base
    }
}

/// Checks a weighted run against the optimum: the per-vertex queue-weight
/// domination (discarded edges weigh their `w*` from the trace) and the
/// global gain bound.
pub fn exact_weighted_vs_gain(
    inst: &Instance,
    state: &StreamState,
    exact: &ExactResult,
) -> Result<GainReport, ExactError> {
    if !state.variant.is_weighted() {
        return Err(ExactError::NotWeighted);
    }
    let trace = state.trace.as_ref().ok_or(ExactError::MissingTrace)?;
    let ledger = &state.ledger;

    let mut vertices = Vec::with_capacity(inst.n);
    for v in 0..inst.n {
        let owner = SlotOwner::Vertex(v);
        let queue_weight: f64 = (0..ledger.queue_set(owner).queues.len()).map(|q| ledger.queue_weight(owner, q)).sum();
        let optimum_weight: f64 = exact
            .optimum_set
            .iter()
            .filter(|&&e| inst.edges[e].endpoints.contains(&v))
            .map(|&e| {
                let arrival = &trace.arrivals[e];
                match arrival.stored {
                    Some(id) => ledger.reduced_weight(id, owner),
                    None => arrival
                        .vertex_slots
                        .iter()
                        .find(|s| s.0 == v)
                        .map(|s| s.2)
                        .expect("arrival records every endpoint"),
                }
            })
            .sum();
        if queue_weight < optimum_weight && !approx_eq(queue_weight, optimum_weight) {
            return Err(ExactError::AssertionFailure {
                what: format!("queue weight of vertex {v} below the optimum's reduced weight"),
                dump: format!(
                    "w_v(Q_v) = {queue_weight}, w_v(OPT ∩ δ(v)) = {optimum_weight}, OPT = {:?}\n{inst}",
                    exact.optimum_set
                ),
            });
        }
        vertices.push(VertexCheck { vertex: v, queue_weight, optimum_weight });
    }

    let gain_total = state.gain_total();
    let bound_factor = gain_bound_factor(inst.k, state.params.epsilon, state.params.evict);
    let lhs = bound_factor * gain_total;
    if lhs < exact.optimum_value && !approx_eq(lhs, exact.optimum_value) {
        return Err(ExactError::AssertionFailure {
            what: format!("{bound_factor} * g(S) below the optimum"),
            dump: format!("g(S) = {gain_total}, OPT = {}\n{inst}", exact.optimum_value),
        });
    }
    Ok(GainReport { gain_total, optimum_value: exact.optimum_value, bound_factor, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{
        attach_random_coverage, attach_random_cut, attach_random_partition, generate_random, parse_instance,
    };
    use crate::objectives::LinearObjective;
    use crate::streaming::{stream_weighted, StreamParams};

    const WORKED: &str = "p bmatching 4 3 2\nc 0 2\ne 0 1 2\ne 0 2 7\ne 0 3 4\n";

    #[test]
    fn worked_example_optimum() {
        let inst = parse_instance(WORKED).unwrap();
        let f = LinearObjective::new(inst.weights());
        let r = exact_bmatching(&inst, &f, None).unwrap();
        assert_eq!(r.optimum_value, 11.0);
        assert_eq!(r.optimum_set, vec![1, 2]);
    }

    #[test]
    fn empty_instance() {
        let inst = parse_instance("p bmatching 3 0 2\n").unwrap();
        let f = LinearObjective::new(vec![]);
        let r = exact_bmatching(&inst, &f, None).unwrap();
        assert_eq!(r.optimum_set, Vec::<EdgeId>::new());
        assert_eq!(r.optimum_value, 0.0);
        assert_eq!(r.explored, 1);
    }

    #[test]
    fn guard_rejects_large_streams() {
        let inst = generate_random(1, 10, 23, 2, 2, 5).unwrap();
        let f = LinearObjective::new(inst.weights());
        assert_eq!(exact_bmatching(&inst, &f, None), Err(ExactError::TooLarge { m: 23, limit: 22 }));
    }

    #[test]
    fn pruned_search_agrees_with_full_scan() {
        for seed in 0..100u64 {
            let mut inst = generate_random(seed, 6, 1 + (seed as usize % 10), 2, 2, 15).unwrap();
            match seed % 3 {
                1 => attach_random_coverage(&mut inst, seed, 6, 3, 9).unwrap(),
                2 => attach_random_cut(&mut inst, seed, 0.5, 9).unwrap(),
                _ => {}
            }
            if seed % 2 == 0 {
                attach_random_partition(&mut inst, seed, 2, 2).unwrap();
            }
            let f = inst.objective().unwrap();
            let mat = inst.matroid().unwrap();
            let a = exact_bmatching(&inst, f.as_ref(), mat.as_deref()).unwrap();
            let b = exact_bmatching_naive(&inst, f.as_ref(), mat.as_deref()).unwrap();
            assert_eq!(a, b, "seed {seed}");
        }
    }

    #[test]
    fn no_single_flip_improves_optimum() {
        for seed in 0..40u64 {
            let inst = generate_random(seed, 7, 10, 2, 2, 20).unwrap();
            let f = LinearObjective::new(inst.weights());
            let r = exact_bmatching(&inst, &f, None).unwrap();
            for e in 0..inst.m() {
                let mut s = r.optimum_set.clone();
                if let Some(pos) = s.iter().position(|&x| x == e) {
                    s.remove(pos);
                } else {
                    s.push(e);
                }
                if is_feasible(&inst, &s, None) {
                    assert!(f.value(&s) <= r.optimum_value + 1e-9);
                }
            }
        }
    }

    #[test]
    fn worked_example_gain_report() {
        let inst = parse_instance(WORKED).unwrap();
        let f = LinearObjective::new(inst.weights());
        let exact = exact_bmatching(&inst, &f, None).unwrap();
        let st = stream_weighted(&inst, StreamParams { record_trace: true, ..Default::default() }).unwrap();
        let rep = exact_weighted_vs_gain(&inst, &st, &exact).unwrap();
        assert_eq!(rep.gain_total, 11.0);
        assert_eq!(rep.optimum_value, 11.0);
        assert_eq!(rep.bound_factor, 2.0);
    }

    #[test]
    fn single_edge_gain_equals_optimum() {
        let inst = parse_instance("p bmatching 2 1 2\ne 0 1 6\n").unwrap();
        let f = LinearObjective::new(inst.weights());
        let exact = exact_bmatching(&inst, &f, None).unwrap();
        let st = stream_weighted(&inst, StreamParams { record_trace: true, ..Default::default() }).unwrap();
        let rep = exact_weighted_vs_gain(&inst, &st, &exact).unwrap();
        assert_eq!(rep.gain_total, 6.0);
        assert_eq!(rep.optimum_value, 6.0);
    }

    #[test]
    fn gain_audit_needs_trace() {
        let inst = parse_instance(WORKED).unwrap();
        let f = LinearObjective::new(inst.weights());
        let exact = exact_bmatching(&inst, &f, None).unwrap();
        let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        assert_eq!(exact_weighted_vs_gain(&inst, &st, &exact), Err(ExactError::MissingTrace));
    }

    #[test]
    fn gain_audit_on_random_corpus() {
        for seed in 0..500u64 {
            let inst = generate_random(seed, 10, 12, 2, 3, 20).unwrap();
            let f = LinearObjective::new(inst.weights());
            let exact = exact_bmatching(&inst, &f, None).unwrap();
            let st = stream_weighted(&inst, StreamParams { record_trace: true, ..Default::default() }).unwrap();
            exact_weighted_vs_gain(&inst, &st, &exact).unwrap();
        }
    }
}
