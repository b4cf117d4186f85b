//! Railway network resilience analysis.
//!
//! A network of stations and line sections is expanded into a directed
//! graph with four port nodes per station so that reversing a train costs
//! a per-station penalty. On top of all-pairs shortest paths the crate
//! computes the artificial flow on each section, the Network Robustness
//! Index for single and paired section closures, redundancy indices in
//! plain and reciprocal form, and comparisons of what-if network variants.
//!
//! ```
//! use railnet::{fixtures, expand, all_pairs, total_cost, WeightKind};
//!
//! let g = expand(&fixtures::triangle(), WeightKind::Time);
//! let m = all_pairs(&g.view());
//! assert_eq!(total_cost(&m).unwrap(), 60.0);
//! ```

pub mod error;
pub mod export;
pub mod fixtures;
pub mod flow;
pub mod format;
pub mod graph;
pub mod network;
pub mod report;
pub mod resilience;
pub mod routing;
pub mod scenario;

pub use error::{Error, Result};
pub use flow::{flow_delta, redistribution, section_flows, FlowDelta, RedistributionTable, SectionUsage};
pub use graph::{expand, ExpandedGraph, GraphView, WeightKind};
pub use network::{
    contract_joint_nodes, parse_network, parse_network_with, render_network, travel_time_minutes, validate, Endpoint,
    ParseMode, RawNetwork, SectionSpec, Side, StationKind, StationSpec, ValidationReport,
};
pub use report::{run_report, ReportConfig, ReportOutcome};
pub use resilience::{Analyzer, Measure, NriResult, PairNriResult, RedundancyResult, Restriction};
pub use routing::{all_pairs, reciprocal_total, shortest_path, total_cost, PathMatrix, PathResult};
pub use scenario::{apply_scenario, compare_scenarios, ScenarioReport, ScenarioSpec};

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(f)
}
