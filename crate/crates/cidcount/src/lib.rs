//! Sublinear hyperedge counting through a colorful-independence decision
//! oracle.
//!
//! The crate is organized around one primitive: a yes/no oracle that, given
//! pairwise-disjoint vertex sets, reports whether some edge picks exactly one
//! vertex from each. Everything else is layered on top of it:
//!
//! * [`hypergraph`] holds instances, exact counting ground truth, random
//!   generators, and a plain text format.
//! * [`oracle`] wraps an instance behind the decision primitive, simulates
//!   the relaxed query flavors (repeated sets, overlapping sets, ordered
//!   tuples) and meters every call.
//! * [`coarse`] turns the oracle into a coarse multiplicative estimate of
//!   the ordered edge count via a guess-and-verify ladder.
//! * [`exact`] counts small tuples exactly with a budgeted splitting tree.
//! * [`sparsify`] shrinks heavy tuple populations by random coloring and
//!   weight-stratified subsampling.
//! * [`pipeline`] assembles the full estimator and a brute-force fallback.

#![forbid(unsafe_code)]

pub mod coarse;
pub mod error;
pub mod exact;
pub mod hypergraph;
pub mod oracle;
pub mod pipeline;
pub mod sparsify;

pub use error::{Error, Result};
pub use hypergraph::{BucketProfile, Hypergraph, PartedTuple, VertexSet};
pub use oracle::{OracleHandle, QueryLedger, SimulationConfig, StreamTag};
pub use pipeline::{estimate, EstimateReport, FallbackPolicy, PipelineConfig};
