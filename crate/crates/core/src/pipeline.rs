//! Stream, finalize and greedy in one call.

use thiserror::Error;

use crate::greedy::{self, GreedyError, Matching};
use crate::instance::{Instance, InstanceError};
use crate::matroids::Matroid;
use crate::objectives::Objective;
use crate::streaming::{StreamError, StreamParams, StreamRunner, StreamState, Variant};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub state: StreamState,
    /// `g(S)` at the end of the stream, before any finalization.
    pub gain_streamed: f64,
    pub matching: Matching,
}

/// Runs `variant` over an instance using its own objective and matroid.
pub fn run_pipeline(inst: &Instance, variant: Variant, params: StreamParams) -> Result<PipelineOutput, PipelineError> {
    let objective = inst.objective()?;
    let matroid = if variant.uses_matroid() { inst.matroid()? } else { None };
    run_with(inst, variant, objective.as_ref(), matroid.as_deref(), params)
}

/// Runs `variant` with explicit oracles. Weighted variants stream `w(e)` from
/// the instance; `objective` still scores the final matching.
pub fn run_with(
    inst: &Instance,
    variant: Variant,
    objective: &dyn Objective,
    matroid: Option<&dyn Matroid>,
    params: StreamParams,
) -> Result<PipelineOutput, PipelineError> {
    let mut state = StreamRunner::new(inst, variant, Some(objective), matroid, params)?.run()?;
    let gain_streamed = state.gain_total();
    if state.is_matroid_run() {
        state.finalize_topset()?;
    }
    let matching = greedy::build(&state, objective)?;
    Ok(PipelineOutput { state, gain_streamed, matching })
}

/// Worst-case ratio `OPT / f(M)` guaranteed for a run (in expectation for
/// randomized variants). `None` where no bound is established.
pub fn approximation_bound(variant: Variant, k: usize, params: &StreamParams) -> Option<f64> {
    let k = k as f64;
    let eps = params.epsilon;
    let submod = k * (1.0 + eps) + 1.0 + 1.0 / eps;
    let matroid = || {
        let g = params.gamma;
        (1.0 + 1.0 / (g * (1.0 + eps) - 1.0)) * ((1.0 + eps) * (k + g) + 1.0 + 1.0 / eps)
    };
    match variant {
        Variant::Weighted => Some(k * (1.0 + eps)),
        Variant::WeightedMem => (k == 2.0).then_some(2.0 * (1.0 + 6.0 * eps)),
        Variant::SubmodMono => Some(submod),
        Variant::SubmodNonMono => Some(submod / (1.0 - params.p)),
        Variant::MatroidMono => Some(matroid()),
        Variant::MatroidNonMono => Some(matroid() / (1.0 - params.p)),
    }
}
