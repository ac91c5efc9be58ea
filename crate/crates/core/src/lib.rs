//! Semi-streaming b-matching on graphs and k-uniform hypergraphs.
//!
//! Edges are read once. Each vertex keeps `b_v` stacks of stored edges and
//! an edge is kept only when it beats the lightest stack tops at its
//! endpoints by a margin. A reverse greedy pass over the kept edges then
//! builds the matching. The same machinery handles linear weights,
//! submodular objectives and an extra matroid constraint.
//!
//! ```
//! use bmatch_core::{parse_instance, run_pipeline, StreamParams, Variant};
//!
//! let inst = parse_instance("p bmatching 4 3 2\nc 0 2\ne 0 1 2\ne 0 2 7\ne 0 3 4\n").unwrap();
//! let out = run_pipeline(&inst, Variant::Weighted, StreamParams::weighted(0.0)).unwrap();
//! assert_eq!(out.matching.value, 11.0);
//! ```

pub mod audit;
pub mod exact;
pub mod greedy;
pub mod instance;
pub mod ledger;
pub mod matroids;
pub mod objectives;
pub mod pipeline;
pub mod streaming;

pub use exact::{exact_bmatching, ExactError, ExactResult};
pub use greedy::{build, Matching};
pub use instance::{generate_random, parse_instance, read_instance, EdgeId, Instance, InstanceError, VertexId};
pub use matroids::Matroid;
pub use objectives::Objective;
pub use pipeline::{approximation_bound, run_pipeline, run_with, PipelineError, PipelineOutput};
pub use streaming::{StreamError, StreamParams, StreamRunner, StreamState, Variant};
