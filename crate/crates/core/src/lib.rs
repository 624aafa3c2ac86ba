//! Popular perfect matchings in many-to-many bipartite preference instances.
//!
//! An [`Instance`] has agents and jobs with capacities and strict preference
//! lists. A perfect matching `M` is popular among perfect matchings when no
//! other perfect matching wins a head-to-head vote against it. This crate
//! decides popularity in polynomial time through a cloned one-to-one
//! instance and a positive-cycle test ([`is_popular_perfect`]), relates
//! popular matchings to stable matchings of a colorful multigraph
//! ([`build_colorful_many`], [`lift_to_stable`]), and finds a minimum-cost
//! popular perfect matching by exhaustive search ([`solve_min_cost`]).

pub mod assignment;
pub mod clone;
pub mod colorful;
pub mod document;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod generate;
pub mod instance;
pub mod solver;
pub mod stability;
pub mod voting;

pub use clone::{
    build_subgraph, clone_instance, find_positive_alternating_cycle, is_popular_perfect,
    make_valid, make_valid_traced, realize, realize_matching, wt, ClonedInstance, CycleWitness,
    PopularityVerdict, Realization, SplitRecord, SubgraphGM, Witness,
};
pub use colorful::{
    build_colorful_many, build_colorful_one, lift_to_stable, realize_colorful, ColoredEdge,
    ColorfulInstance, ColorfulMatching,
};
pub use error::{Error, Result};
pub use generate::{generate_instance, GeneratorConfig};
pub use instance::{
    is_perfect, Cost, Edge, EdgeId, Instance, Matching, Member, PerfectMatching, Side, Vertex,
};
pub use solver::{
    brute_force_is_popular_perfect, enumerate_perfect_matchings, solve_min_cost,
    solve_min_cost_with_limit, visit_perfect_matchings, SolveReport,
};
pub use stability::{
    check_stability, deferred_acceptance, is_blocking, is_stable, PreferenceSystem, Stability,
    SystemEdge, SystemMatching,
};
pub use voting::{delta, vote, vote_set, Candidate, DeltaValue, SetVote, Vote};
