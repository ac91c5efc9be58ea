//! Streaming phase: one pass over the edge stream, deciding for each edge
//! whether it enters the stored set and, if so, in which queues.
//!
//! All four variants share one code path. Per arrival `e`:
//!
//! 1. every endpoint `u` reports its lightest queue `(q_u, w*_u)`;
//! 2. in matroid runs the matroid slot is resolved against the current
//!    matroid tops (free queue with `w*_M = 0`, or the lightest top on the
//!    circuit of `tops + e`);
//! 3. the value `v` of `e` is its weight (weighted runs) or its marginal
//!    against the committed set (submodular runs);
//! 4. `e` passes if `v > (1 + eps) * (sum_u w*_u + gamma * w*_M)`, then
//!    survives a Bernoulli(`p`) coin when `p < 1`;
//! 5. a stored `e` gets gain `g = v - sum_u w*_u - w*_M` and reduced weight
//!    `w* + g` in each of its queues.
//!
//! With eviction enabled, a push that makes a vertex queue longer than the
//! eviction depth marks the element just below that depth erasable.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{EdgeId, Instance, VertexId};
use crate::ledger::{ElementId, Ledger, Placement, SlotOwner};
use crate::matroids::{Matroid, MatroidError};
use crate::objectives::{MarginalSession, Objective};

const RANGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Weighted,
    WeightedMem,
    SubmodMono,
    SubmodNonMono,
    MatroidMono,
    MatroidNonMono,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Weighted,
        Variant::WeightedMem,
        Variant::SubmodMono,
        Variant::SubmodNonMono,
        Variant::MatroidMono,
        Variant::MatroidNonMono,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Weighted => "weighted",
            Variant::WeightedMem => "weighted-mem",
            Variant::SubmodMono => "submod-mono",
            Variant::SubmodNonMono => "submod-nonmono",
            Variant::MatroidMono => "matroid-mono",
            Variant::MatroidNonMono => "matroid-nonmono",
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, Variant::Weighted | Variant::WeightedMem)
    }

    pub fn uses_matroid(self) -> bool {
        matches!(self, Variant::MatroidMono | Variant::MatroidNonMono)
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Variant::SubmodNonMono | Variant::MatroidNonMono)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| StreamError::InvalidParams(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum StreamError {
    #[error("p = {p} outside [{lo}, {hi}] for this variant")]
    InvalidP { p: f64, lo: f64, hi: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid matroid: {0}")]
    InvalidSpec(String),
    #[error("the instance has no matroid")]
    MissingMatroid,
    #[error("this run has no matroid queues to finalize")]
    NotMatroidRun,
    #[error("independent matroid tops left no empty queue; reported rank is too small")]
    RankExhausted,
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamParams {
    pub epsilon: f64,
    /// Eviction of deep queue elements (`d = 1`).
    pub evict: bool,
    pub p: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Keep a per-arrival trace for auditing.
    pub record_trace: bool,
}

impl Default for StreamParams {
    fn default() -> Self {
        Self { epsilon: 0.0, evict: false, p: 1.0, gamma: 2.0, seed: 0, record_trace: false }
    }
}

impl StreamParams {
    pub fn weighted(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }

    /// Parameters at which each variant's guarantee is optimised; `k` is the
    /// edge uniformity.
    pub fn defaults_for(variant: Variant, k: usize) -> Self {
        let base = Self::default();
        match variant {
            Variant::Weighted => base,
            Variant::WeightedMem => Self { epsilon: 0.1, evict: true, ..base },
            Variant::SubmodMono => Self { epsilon: std::f64::consts::FRAC_1_SQRT_2, ..base },
            Variant::SubmodNonMono => {
                let epsilon = 3f64.sqrt() / 2.0;
                Self { epsilon, p: default_p(variant, k, epsilon, 2.0), ..base }
            }
            Variant::MatroidMono => Self { epsilon: 1.0, gamma: 2.0, ..base },
            Variant::MatroidNonMono => Self { epsilon: 1.0, gamma: 2.0, p: default_p(variant, k, 1.0, 2.0), ..base },
        }
    }

    pub fn alpha(&self) -> f64 {
        1.0 + self.epsilon
    }

    /// Eviction depth `beta`, when eviction is on.
    pub fn beta(&self) -> Option<usize> {
        self.evict.then(|| eviction_depth(self.epsilon))
    }

    pub fn validate(&self, variant: Variant, k: usize) -> Result<(), StreamError> {
        let eps = self.epsilon;
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(StreamError::InvalidParams(format!("epsilon = {eps} must be >= 0")));
        }
        if self.evict && !(eps > 0.0 && eps <= 0.25) {
            return Err(StreamError::InvalidParams(format!("eviction requires 0 < epsilon <= 1/4, got {eps}")));
        }
        if variant.uses_matroid() && !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(StreamError::InvalidParams(format!("gamma = {} must exceed 1", self.gamma)));
        }
        let (lo, hi) = p_range(variant, k, eps, self.gamma);
        let p = self.p;
        if !(p > 0.0 && p >= lo * (1.0 - RANGE_TOL) && p <= hi * (1.0 + RANGE_TOL)) {
            return Err(StreamError::InvalidP { p, lo, hi });
        }
        Ok(())
    }
}

/// `beta = ceil(1 + log_{1+eps}(1/eps^2))`.
pub fn eviction_depth(epsilon: f64) -> usize {
    (1.0 + (1.0 / (epsilon * epsilon)).ln() / (1.0 + epsilon).ln()).ceil() as usize
}

/// Admissible coin probabilities for a variant.
pub fn p_range(variant: Variant, k: usize, epsilon: f64, gamma: f64) -> (f64, f64) {
    match variant {
        Variant::SubmodNonMono => (1.0 / (3.0 + 2.0 * epsilon), 0.5),
        Variant::MatroidNonMono => {
            let kg = k as f64 + gamma;
            (1.0 / (1.0 + kg * (1.0 + epsilon)), 1.0 / kg)
        }
        _ => (1.0, 1.0),
    }
}

/// Lower end of [`p_range`]: the probability the guarantees are stated for.
pub fn default_p(variant: Variant, k: usize, epsilon: f64, gamma: f64) -> f64 {
    p_range(variant, k, epsilon, gamma).0
}

/// How the matroid slot of an arrival was resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum MatroidSlot {
    /// `tops + e` is independent; `e` would open an empty queue.
    Free { queue: usize },
    /// `tops + e` holds a circuit; `e` would sit on the lightest circuit top.
    Circuit { queue: usize, w_star: f64, circuit: Vec<EdgeId> },
    /// `{e}` alone is dependent; it can never be stored.
    Loop,
}

impl MatroidSlot {
    pub fn w_star(&self) -> f64 {
        match self {
            MatroidSlot::Free { .. } => 0.0,
            MatroidSlot::Circuit { w_star, .. } => *w_star,
            MatroidSlot::Loop => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRecord {
    pub edge: EdgeId,
    /// `(u, q_u(e), w*_u(e))` per endpoint, in endpoint order.
    pub vertex_slots: Vec<(VertexId, usize, f64)>,
    pub matroid: Option<MatroidSlot>,
    /// `w(e)` or `f(e | S)`.
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub coin: Option<bool>,
    pub stored: Option<ElementId>,
}

impl ArrivalRecord {
    pub fn vertex_w_star_sum(&self) -> f64 {
        self.vertex_slots.iter().map(|s| s.2).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvictionEvent {
    pub evicted: ElementId,
    pub by: ElementId,
    pub owner: SlotOwner,
    pub evicted_gain: f64,
    pub by_gain: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub arrivals: Vec<ArrivalRecord>,
    pub evictions: Vec<EvictionEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamStats {
    pub arrivals: usize,
    pub stored_total: usize,
    pub peak_stored: usize,
    pub evictions: usize,
    pub rng_draws: usize,
    pub value_max: f64,
    pub value_min_positive: f64,
}

impl Default for StreamStats {
    fn default() -> Self {
        Self {
            arrivals: 0,
            stored_total: 0,
            peak_stored: 0,
            evictions: 0,
            rng_draws: 0,
            value_max: 0.0,
            value_min_positive: f64::INFINITY,
        }
    }
}

impl StreamStats {
    /// Largest over smallest positive value seen; a streaming-observable
    /// stand-in for the marginal spread `W`.
    pub fn value_spread(&self) -> Option<f64> {
        (self.value_min_positive.is_finite()).then(|| self.value_max / self.value_min_positive)
    }
}

/// The state left behind by a streaming pass.
#[derive(Debug, Clone)]
pub struct StreamState {
    pub variant: Variant,
    pub params: StreamParams,
    pub k: usize,
    pub ledger: Ledger,
    pub stats: StreamStats,
    pub trace: Option<Trace>,
    /// Edges committed to the marginal session, in commit order.
    pub committed: Vec<EdgeId>,
    finalized: Option<Vec<EdgeId>>,
}

impl StreamState {
    /// Stored edges in arrival order.
    pub fn stored_edges(&self) -> Vec<EdgeId> {
        self.ledger.stored().map(|id| self.ledger.element(id).edge).collect()
    }

    pub fn gain_total(&self) -> f64 {
        self.ledger.gain_total()
    }

    pub fn finalized(&self) -> Option<&[EdgeId]> {
        self.finalized.as_deref()
    }

    pub fn is_matroid_run(&self) -> bool {
        self.ledger.has_matroid()
    }

    /// Longest length each queue reached, per owner.
    pub fn queue_max_lengths(&self) -> Vec<(SlotOwner, Vec<usize>)> {
        self.ledger.owners().map(|o| (o, self.ledger.queue_set(o).queues.iter().map(|q| q.max_len).collect())).collect()
    }

    pub fn max_queue_length(&self) -> usize {
        self.queue_max_lengths().iter().flat_map(|(_, l)| l.iter().copied()).max().unwrap_or(0)
    }

    /// Keeps only the matroid queue tops and relinks every queue around them.
    /// Returns the kept edges in arrival order.
    pub fn finalize_topset(&mut self) -> Result<Vec<EdgeId>, StreamError> {
        if !self.ledger.has_matroid() {
            return Err(StreamError::NotMatroidRun);
        }
        if let Some(f) = &self.finalized {
            return Ok(f.clone());
        }
        let keep: BTreeSet<ElementId> = self.ledger.tops(SlotOwner::Matroid).map(|(_, id)| id).collect();
        self.ledger.rewire_to(&keep);
        let kept = self.stored_edges();
        self.finalized = Some(kept.clone());
        Ok(kept)
    }
}

/// Drives one streaming pass edge by edge.
pub struct StreamRunner<'a> {
    instance: &'a Instance,
    variant: Variant,
    params: StreamParams,
    session: Option<MarginalSession<'a>>,
    matroid: Option<&'a dyn Matroid>,
    beta: Option<usize>,
    ledger: Ledger,
    rng: ChaCha8Rng,
    stats: StreamStats,
    trace: Option<Trace>,
    next: usize,
}

impl<'a> StreamRunner<'a> {
    /// `objective` is ignored by weighted variants, which read `w(e)`
    /// straight from the instance; `matroid` is required by matroid variants
    /// and ignored otherwise.
    pub fn new(
        instance: &'a Instance,
        variant: Variant,
        objective: Option<&'a dyn Objective>,
        matroid: Option<&'a dyn Matroid>,
        params: StreamParams,
    ) -> Result<Self, StreamError> {
        params.validate(variant, instance.k)?;
        let matroid = if variant.uses_matroid() {
            let m = matroid.ok_or(StreamError::MissingMatroid)?;
            if m.rank() < 1 {
                return Err(StreamError::InvalidSpec("matroid rank must be at least 1".into()));
            }
            Some(m)
        } else {
            None
        };
        let session = if variant.is_weighted() {
            None
        } else {
            let f = objective.ok_or_else(|| StreamError::InvalidParams("submodular runs need an objective".into()))?;
            Some(MarginalSession::new(f))
        };
        Ok(Self {
            instance,
            variant,
            params,
            session,
            matroid,
            beta: params.beta(),
            ledger: Ledger::new(&instance.capacities, matroid.map(|m| m.rank())),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            stats: StreamStats::default(),
            trace: params.record_trace.then(Trace::default),
            next: 0,
        })
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn trace(&self) -> Option<&Trace> {
        self.trace.as_ref()
    }

    pub fn is_done(&self) -> bool {
        self.next >= self.instance.m()
    }

    fn resolve_matroid(&self, m: &dyn Matroid, e: EdgeId) -> Result<MatroidSlot, StreamError> {
        let tops: Vec<(usize, ElementId)> = self.ledger.tops(SlotOwner::Matroid).collect();
        let top_edges: Vec<EdgeId> = tops.iter().map(|&(_, id)| self.ledger.element(id).edge).collect();
        match m.find_circuit(&top_edges, e)? {
            None => {
                let queue = self
                    .ledger
                    .queue_set(SlotOwner::Matroid)
                    .queues
                    .iter()
                    .position(|q| q.top.is_none())
                    .ok_or(StreamError::RankExhausted)?;
                Ok(MatroidSlot::Free { queue })
            }
            Some(circuit) => {
                let mut best: Option<(usize, f64)> = None;
                for &(q, id) in &tops {
                    if !circuit.contains(&self.ledger.element(id).edge) {
                        continue;
                    }
                    let w = self.ledger.reduced_weight(id, SlotOwner::Matroid);
                    if best.is_none_or(|(_, bw)| w < bw) {
                        best = Some((q, w));
                    }
                }
                Ok(match best {
                    Some((queue, w_star)) => MatroidSlot::Circuit { queue, w_star, circuit },
                    None => MatroidSlot::Loop,
                })
            }
        }
    }

    /// Processes the next edge of the stream. Returns `None` once the stream
    /// is exhausted.
    pub fn step(&mut self) -> Result<Option<ArrivalRecord>, StreamError> {
        let Some(edge) = self.instance.edges.get(self.next) else {
            return Ok(None);
        };
        self.next += 1;
        let e = edge.id();
        self.stats.arrivals += 1;

        let vertex_slots: Vec<(VertexId, usize, f64)> = edge
            .endpoints
            .iter()
            .map(|&u| {
                let (q, w) = self.ledger.min_top(SlotOwner::Vertex(u));
                (u, q, w)
            })
            .collect();
        let matroid_slot = match self.matroid {
            Some(m) => Some(self.resolve_matroid(m, e)?),
            None => None,
        };

        let value = match &self.session {
            Some(s) => s.marginal(e),
            None => edge.weight,
        };
        if value > 0.0 {
            self.stats.value_max = self.stats.value_max.max(value);
            self.stats.value_min_positive = self.stats.value_min_positive.min(value);
        }

        let vertex_sum: f64 = vertex_slots.iter().map(|s| s.2).sum();
        let (threshold, charged) = match &matroid_slot {
            None => (self.params.alpha() * vertex_sum, vertex_sum),
            Some(slot) => {
                let m_star = slot.w_star();
                (self.params.alpha() * (vertex_sum + self.params.gamma * m_star), vertex_sum + m_star)
            }
        };
        let passed = matroid_slot != Some(MatroidSlot::Loop) && value > threshold;
        let coin = (passed && self.params.p < 1.0).then(|| {
            self.stats.rng_draws += 1;
            self.rng.gen::<f64>() < self.params.p
        });

        let mut stored = None;
        if passed && coin != Some(false) {
            let gain = value - charged;
            let mut placements: Vec<Placement> = vertex_slots
                .iter()
                .map(|&(u, q, w)| Placement { owner: SlotOwner::Vertex(u), queue: q, reduced_weight: w + gain })
                .collect();
            if let Some(slot) = &matroid_slot {
                let queue = match slot {
                    MatroidSlot::Free { queue } | MatroidSlot::Circuit { queue, .. } => *queue,
                    MatroidSlot::Loop => unreachable!("loops never pass the threshold"),
                };
                placements.push(Placement { owner: SlotOwner::Matroid, queue, reduced_weight: slot.w_star() + gain });
            }
            let id = self.ledger.insert(e, gain, &placements);
            if let Some(s) = &mut self.session {
                s.commit(e).expect("an edge arrives only once");
            }
            self.stats.stored_total += 1;
            stored = Some(id);

            if let Some(beta) = self.beta {
                for &(u, q, _) in &vertex_slots {
                    let owner = SlotOwner::Vertex(u);
                    if self.ledger.queue_set(owner).queues[q].len <= beta {
                        continue;
                    }
                    if let Some(evicted) = self.ledger.mark_erasable(owner, q, beta) {
                        self.stats.evictions += 1;
                        if let Some(t) = &mut self.trace {
                            t.evictions.push(EvictionEvent {
                                evicted,
                                by: id,
                                owner,
                                evicted_gain: self.ledger.element(evicted).gain,
                                by_gain: gain,
                            });
                        }
                    }
                }
            }
        }
        self.stats.peak_stored = self.stats.peak_stored.max(self.ledger.len());

        let record =
            ArrivalRecord { edge: e, vertex_slots, matroid: matroid_slot, value, threshold, passed, coin, stored };
        if let Some(t) = &mut self.trace {
            t.arrivals.push(record.clone());
        }
        Ok(Some(record))
    }

    /// Consumes the rest of the stream.
    pub fn run(mut self) -> Result<StreamState, StreamError> {
        while self.step()?.is_some() {}
        Ok(self.finish())
    }

    pub fn finish(self) -> StreamState {
        StreamState {
            variant: self.variant,
            params: self.params,
            k: self.instance.k,
            ledger: self.ledger,
            stats: self.stats,
            trace: self.trace,
            committed: self.session.map(|s| s.committed().to_vec()).unwrap_or_default(),
            finalized: None,
        }
    }
}

/// Weighted streaming (`epsilon = 0` and no eviction is the exact-threshold
/// variant).
pub fn stream_weighted(instance: &Instance, params: StreamParams) -> Result<StreamState, StreamError> {
    let variant = if params.evict { Variant::WeightedMem } else { Variant::Weighted };
    StreamRunner::new(instance, variant, None, None, params)?.run()
}

/// Submodular streaming; `p = 1` selects the monotone variant.
pub fn stream_submodular(
    instance: &Instance,
    objective: &dyn Objective,
    params: StreamParams,
) -> Result<StreamState, StreamError> {
    let variant = if params.p < 1.0 { Variant::SubmodNonMono } else { Variant::SubmodMono };
    StreamRunner::new(instance, variant, Some(objective), None, params)?.run()
}

/// Matroid-constrained submodular streaming; `p = 1` selects the monotone
/// variant. The result still needs [`StreamState::finalize_topset`].
pub fn stream_matroid(
    instance: &Instance,
    objective: &dyn Objective,
    matroid: &dyn Matroid,
    params: StreamParams,
) -> Result<StreamState, StreamError> {
    let variant = if params.p < 1.0 { Variant::MatroidNonMono } else { Variant::MatroidMono };
    StreamRunner::new(instance, variant, Some(objective), Some(matroid), params)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, ObjectiveSpec};
    use crate::matroids::UniformMatroid;
    use crate::objectives::{CoverageObjective, LinearObjective};
    use std::collections::BTreeMap;

    const WORKED: &str = "p bmatching 4 3 2\nc 0 2\ne 0 1 2\ne 0 2 7\ne 0 3 4\n";

    #[test]
    fn worked_example_stores_all_three() {
        let inst = parse_instance(WORKED).unwrap();
        let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        assert_eq!(st.stored_edges(), vec![0, 1, 2]);
        let gains: Vec<f64> = st.ledger.stored().map(|id| st.ledger.element(id).gain).collect();
        assert_eq!(gains, vec![2.0, 7.0, 2.0]);
        let v1 = SlotOwner::Vertex(0);
        let q0: Vec<EdgeId> = st.ledger.queue_elements(v1, 0).iter().map(|&i| st.ledger.element(i).edge).collect();
        let q1: Vec<EdgeId> = st.ledger.queue_elements(v1, 1).iter().map(|&i| st.ledger.element(i).edge).collect();
        // top first: e3 above e1, and e2 alone
        assert_eq!(q0, vec![2, 0]);
        assert_eq!(q1, vec![1]);
    }

    #[test]
    fn empty_stream() {
        let inst = parse_instance("p bmatching 3 0 2\n").unwrap();
        let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        assert!(st.ledger.is_empty());
        assert_eq!(st.gain_total(), 0.0);
    }

    #[test]
    fn zero_weight_edges_never_stored() {
        let inst = parse_instance("p bmatching 2 2 2\ne 0 1 0\ne 0 1 0\n").unwrap();
        let st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        assert!(st.ledger.is_empty());
    }

    #[test]
    fn eviction_depth_formula() {
        // 1 + ln(25)/ln(1.2) = 18.65...
        assert_eq!(eviction_depth(0.2), 19);
        // 1 + ln(100)/ln(1.1) = 49.31...
        assert_eq!(eviction_depth(0.1), 50);
        assert_eq!(eviction_depth(0.25), 14);
    }

    #[test]
    fn parameter_validation() {
        let p = StreamParams { epsilon: 0.5, evict: true, ..Default::default() };
        assert!(matches!(p.validate(Variant::Weighted, 2), Err(StreamError::InvalidParams(_))));
        let p = StreamParams { epsilon: 0.5, p: 0.9, ..Default::default() };
        assert!(matches!(p.validate(Variant::SubmodNonMono, 2), Err(StreamError::InvalidP { .. })));
        assert!(matches!(p.validate(Variant::SubmodMono, 2), Err(StreamError::InvalidP { .. })));
        let p = StreamParams { epsilon: 0.5, p: 0.3, ..Default::default() };
        assert!(p.validate(Variant::SubmodNonMono, 2).is_ok());
        let p = StreamParams { epsilon: 1.0, gamma: 1.0, ..Default::default() };
        assert!(matches!(p.validate(Variant::MatroidMono, 2), Err(StreamError::InvalidParams(_))));
        for v in Variant::ALL {
            for k in 2..5 {
                StreamParams::defaults_for(v, k).validate(v, k).unwrap();
            }
        }
    }

    #[test]
    fn default_probabilities() {
        let eps = 3f64.sqrt() / 2.0;
        let p = StreamParams::defaults_for(Variant::SubmodNonMono, 2).p;
        assert!((p - 1.0 / (3.0 + 2.0 * eps)).abs() < 1e-15);
        let p = StreamParams::defaults_for(Variant::MatroidNonMono, 2).p;
        assert!((p - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("greedy".parse::<Variant>().is_err());
    }

    #[test]
    fn linear_submodular_equals_weighted() {
        for seed in 0..50 {
            let inst = crate::instance::generate_random(seed, 7, 12, 2, 3, 20).unwrap();
            let f = LinearObjective::new(inst.weights());
            for eps in [0.0, 0.3] {
                let a = stream_weighted(&inst, StreamParams::weighted(eps)).unwrap();
                let b = stream_submodular(&inst, &f, StreamParams::weighted(eps)).unwrap();
                assert_eq!(a.stored_edges(), b.stored_edges());
            }
        }
    }

    #[test]
    fn only_first_of_redundant_coverage_edges_stored() {
        let inst = parse_instance("p bmatching 4 3 2\ne 0 1 0\ne 1 2 0\ne 2 3 0\n").unwrap();
        let f = CoverageObjective::new(BTreeMap::from([(0, 3.0)]), vec![vec![0]; 3]).unwrap();
        let st = stream_submodular(&inst, &f, StreamParams::weighted(0.5)).unwrap();
        assert_eq!(st.stored_edges(), vec![0]);
    }

    #[test]
    fn coin_run_is_reproducible() {
        let mut inst = crate::instance::generate_random(3, 8, 14, 2, 2, 10).unwrap();
        crate::instance::attach_random_cut(&mut inst, 3, 0.5, 9).unwrap();
        let f = inst.objective().unwrap();
        let params = StreamParams { epsilon: 0.5, p: 0.5, seed: 17, ..Default::default() };
        let a = stream_submodular(&inst, f.as_ref(), params).unwrap();
        let b = stream_submodular(&inst, f.as_ref(), params).unwrap();
        assert_eq!(a.stored_edges(), b.stored_edges());
        assert_eq!(a.stats, b.stats);
        let passing = a.stats.rng_draws;
        assert!(passing >= a.stored_edges().len());
    }

    #[test]
    fn rank_zero_matroid_rejected() {
        let inst = parse_instance(WORKED).unwrap();
        let f = LinearObjective::new(inst.weights());
        let m = UniformMatroid::new(0);
        let err = stream_matroid(&inst, &f, &m, StreamParams::defaults_for(Variant::MatroidMono, 2)).unwrap_err();
        assert!(matches!(err, StreamError::InvalidSpec(_)));
    }

    #[test]
    fn slack_matroid_behaves_like_plain_submodular() {
        for seed in 0..40 {
            let mut inst = crate::instance::generate_random(seed, 6, 10, 2, 2, 9).unwrap();
            crate::instance::attach_random_coverage(&mut inst, seed, 8, 3, 5).unwrap();
            assert!(matches!(inst.objective, ObjectiveSpec::Coverage { .. }));
            let f = inst.objective().unwrap();
            let m = UniformMatroid::new(inst.m());
            for gamma in [1.5, 7.0] {
                let params = StreamParams { epsilon: 1.0, gamma, ..Default::default() };
                let mut a = stream_matroid(&inst, f.as_ref(), &m, params).unwrap();
                let b = stream_submodular(&inst, f.as_ref(), params).unwrap();
                assert_eq!(a.stored_edges(), b.stored_edges());
                assert_eq!(a.finalize_topset().unwrap(), b.stored_edges());
            }
        }
    }

    #[test]
    fn finalize_requires_matroid_run() {
        let inst = parse_instance(WORKED).unwrap();
        let mut st = stream_weighted(&inst, StreamParams::weighted(0.0)).unwrap();
        assert_eq!(st.finalize_topset(), Err(StreamError::NotMatroidRun));
    }

    #[test]
    fn finalize_with_nothing_stored() {
        let inst = parse_instance("p bmatching 2 1 2\ne 0 1 0\n").unwrap();
        let f = LinearObjective::new(inst.weights());
        let m = UniformMatroid::new(1);
        let mut st = stream_matroid(&inst, &f, &m, StreamParams { epsilon: 1.0, ..Default::default() }).unwrap();
        assert_eq!(st.finalize_topset().unwrap(), Vec::<EdgeId>::new());
    }
}
