//! A laboratory for metric distortion in voting.
//!
//! The crate models elections whose voters and candidates live in a finite
//! metric space: profiles are derived from (or checked against) distances,
//! rules pick winners from ballots alone, and the distortion of a winner is
//! the ratio of its social cost to the optimum. Alongside realized
//! distortion at a known embedding, an LP certifies the worst case over all
//! metrics consistent with the ballots.
//!
//! Modules:
//! - [`metric`]: finite metrics (matrices, graph-induced, lp distances),
//!   class validation (general / ultra / rho-approximate), aspect ratio.
//! - [`doubling`]: doubling constant and dimension, ball covers, packings.
//! - [`election`]: profiles, embeddings, social cost, realized distortion,
//!   the wave-lemma bound.
//! - [`rules`]: positional rules, parallel-universe STV, PluralityMatching.
//! - [`dynamics`]: round-based plurality dynamics and core diagnostics.
//! - [`worstcase`]: the distortion-certifying linear program.
//! - [`generators`]: lower-bound constructions, random instances, and the
//!   closed-form bounds they are measured against.
//! - [`io`]: JSON file formats for metrics and elections.

pub mod doubling;
pub mod dynamics;
pub mod election;
pub mod error;
pub mod generators;
pub mod io;
pub mod metric;
pub mod rules;
pub mod worstcase;

pub use doubling::{cover_ball, doubling_constant, doubling_packing_lower_bound, CoverMode};
pub use dynamics::{
    coordination_dynamics, core_membership, greedy_dynamics, max_coalition_against, Phase, Round,
    RoundLog,
};
pub use election::{
    check_consistency, check_wave_premise, derive_profile, optimum_candidate,
    realized_distortion, social_cost, wave_bound, Election, Embedding, WavePremise,
};
pub use error::{Error, Result};
pub use generators::{
    bound_value, gen_random_euclidean, gen_random_graph, gen_rho_lb, gen_sq_euclid_lb,
    gen_stv_tree_lb, gen_ultrametric_lb, harmonic, rho_lb_matrix, BoundTheorem, TreeLB,
    TreeLBSpec,
};
pub use metric::{
    aspect_ratio, check_metric, euclidean_metric, minimax_metric, shortest_path_metric,
    BinaryOperator, DistanceMatrix, GraphSpec, MetricClass, PNorm, Violation, ViolationReport,
};
pub use rules::{
    integral_domination_graph, plurality_matching_winner, plurality_tallies, score_winners,
    stv_trace, stv_winners, validate_elimination_sequence, DominationGraph, EliminationSequence,
    ScoreRule, WinnerSet,
};
pub use worstcase::{
    build_lp, solve_lp, worst_case_distortion, LPModel, LinearConstraint, Sense, WorstCaseResult,
};
