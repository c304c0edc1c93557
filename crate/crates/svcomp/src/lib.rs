//! An I/O-match based web service composition engine.
//!
//! Given a registry of services described only by their input and output
//! parameter sets, and a query `⟨Q^I, Q^O⟩`, the engine builds a composition
//! search tree whose nodes try exact, super, and collaborative matches
//! against the parameters still required, then answers optimal-composition
//! queries (fewest services, shallowest tree) over that tree.
//!
//! See the `book/` directory for a guided tour; every code snippet there is
//! compiled and run as a doc-test.

pub mod generate;
pub mod plan;
pub mod registry;
pub mod search;
pub mod tree;

pub use plan::{extract_path, order_services, render_answer, render_dot, CompositionAnswer};
pub use registry::{
    classify_match, normalize_param, MatchClass, ParamSet, ParameterSymbol, Query, Registry,
    ServiceDescriptor, ServiceId,
};
pub use search::{
    enumerate_solutions, find_leanest, find_shortest_depth, forward_closure, oracle_leanest,
    OracleWitness, SolutionHit,
};
pub use tree::{build_cst, BuildLimits, CompositionType, Cst, CstNode, NodeId, NodeKind};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/registry.md")]
    mod registry {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/search-tree.md")]
    mod search_tree {}
    #[doc = include_str!("../../../book/src/optimal-search.md")]
    mod optimal_search {}
    #[doc = include_str!("../../../book/src/plans.md")]
    mod plans {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
