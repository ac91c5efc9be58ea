use serde::Serialize;

use bmatch_core::ledger::SlotOwner;
use bmatch_core::{ExactResult, PipelineOutput, StreamParams, Variant};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ParamsReport {
    pub epsilon: f64,
    pub gamma: Option<f64>,
    pub p: f64,
    pub d: u8,
    pub beta: Option<usize>,
}

impl ParamsReport {
    pub fn new(variant: Variant, params: &StreamParams) -> Self {
        Self {
            epsilon: params.epsilon,
            gamma: variant.uses_matroid().then_some(params.gamma),
            p: params.p,
            d: params.evict as u8,
            beta: params.beta(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct QueueLengths {
    pub owner: String,
    pub max_lengths: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExactReport {
    pub value: f64,
    pub matching: Vec<usize>,
    pub explored: u64,
}

impl From<&ExactResult> for ExactReport {
    fn from(r: &ExactResult) -> Self {
        Self { value: r.optimum_value, matching: r.optimum_set.iter().map(|e| e + 1).collect(), explored: r.explored }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub algorithm: String,
    pub params: ParamsReport,
    pub seed: u64,
    pub edges: usize,
    pub stored_total: usize,
    pub stored_peak: usize,
    pub evictions: usize,
    pub queue_max_lengths: Vec<QueueLengths>,
    pub gain_total: f64,
    pub matching: Vec<usize>,
    pub value: f64,
    pub bound: Option<f64>,
    pub exact: Option<ExactReport>,
    pub realized_ratio: Option<f64>,
    pub within_bound: Option<bool>,
    pub wall_time_ms: f64,
}

/// `OPT / achieved`, `1` when both vanish and undefined when only the
/// achieved value does.
pub fn realized_ratio(optimum: f64, achieved: f64) -> Option<f64> {
    if achieved > 0.0 {
        Some(optimum / achieved)
    } else if optimum <= 0.0 {
        Some(1.0)
    } else {
        None
    }
}

impl RunReport {
    pub fn new(
        variant: Variant,
        params: &StreamParams,
        edges: usize,
        out: &PipelineOutput,
        bound: Option<f64>,
    ) -> Self {
        let st = &out.state;
        let queue_max_lengths = st
            .queue_max_lengths()
            .into_iter()
            .map(|(owner, max_lengths)| QueueLengths {
                owner: match owner {
                    SlotOwner::Vertex(v) => format!("v{v}"),
                    SlotOwner::Matroid => "matroid".into(),
                },
                max_lengths,
            })
            .collect();
        Self {
            algorithm: variant.name().into(),
            params: ParamsReport::new(variant, params),
            seed: params.seed,
            edges,
            stored_total: st.stats.stored_total,
            stored_peak: st.stats.peak_stored,
            evictions: st.stats.evictions,
            queue_max_lengths,
            gain_total: st.gain_total(),
            matching: out.matching.ordinals(),
            value: out.matching.value,
            bound,
            exact: None,
            realized_ratio: None,
            within_bound: None,
            wall_time_ms: 0.0,
        }
    }

    /// Attaches the exact optimum. The bound verdict is only given for runs
    /// without coin flips, whose guarantee holds per run.
    pub fn attach_exact(&mut self, exact: &ExactResult) {
        self.realized_ratio = realized_ratio(exact.optimum_value, self.value);
        self.within_bound = match self.bound {
            Some(b) if self.params.p >= 1.0 => Some(within(b * self.value, exact.optimum_value)),
            _ => None,
        };
        self.exact = Some(exact.into());
    }
}

/// `scaled >= optimum` up to relative tolerance.
pub fn within(scaled: f64, optimum: f64) -> bool {
    scaled >= optimum - 1e-9 * optimum.abs().max(1.0)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MonteCarloReport {
    pub algorithm: String,
    pub params: ParamsReport,
    pub base_seed: u64,
    pub replicas: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
    pub bound: Option<f64>,
    /// `bound * mean`, to be compared against the optimum.
    pub bound_times_mean: Option<f64>,
    pub exact: Option<ExactReport>,
    pub mean_within_bound: Option<bool>,
    pub wall_time_ms: f64,
}

pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
}

pub fn summarize(values: &[f64]) -> Summary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Summary {
        mean,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        std_dev: var.sqrt(),
    }
}
