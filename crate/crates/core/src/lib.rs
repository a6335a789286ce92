//! Local Urysohn width laboratory.
//!
//! Geodesic spaces, margin problems, certified width brackets, the Urysohn
//! Machine, sampling experiments, nerve homology and VC dimension.

// `!(x > 0.0)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coverings;
pub mod error;
pub mod graph;
pub mod machine;
pub mod metric;
pub mod problems;
pub mod sampling;
mod setcover;
pub mod topology;
pub mod vc;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use coverings::{
    canonical_covering, clique_cover_bound, covering_infeasible, min_ball_cover, parameter_window,
    separation_certificate, verify_covering, width_bracket, Assignment, CoveringReport, UrysohnCovering, UrysohnTriple,
    WidthBracket, Window, WindowFamily,
};
pub use graph::{Edge, WeightedGraph};
pub use machine::{machine_new, run_stream, MachineState, Outcome, Trace};
pub use metric::{
    bouquet_space, disjoint_union, graph_space, interval_space, is_chain_connected, subset_diameter,
    wedge_sphere_space, MetricSpace, Point, Side, SpaceKind, SpaceSpec, EPS,
};
pub use problems::{
    bouquet_problem, custom_problem, interval_union_problem, permuted_problem, safe_region, scaled_problem,
    union_problem, validate_margin, wedge_problem, MarginProblem, ProblemSpec, Region, SafeRegion,
};
pub use sampling::{
    coupon_time, permutation_learner_experiment, threshold_sweep, RegionLaw, SamplingDistribution, TrialStats,
};
pub use topology::{
    betti, betti_bound_check, convexity_window, graph_beta1, max_adjacency, nerve, systole, OverlapRule,
    SimplicialComplex,
};
pub use vc::{intervals_class, patchwise_class, separation_report, vc_dimension, HypothesisTable};
