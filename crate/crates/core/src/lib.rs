//! Treatment choice with inequality-averse welfare.
//!
//! Outcomes are aggregated by their egalitarian equivalent (EE) under an
//! Atkinson welfare function with inequality aversion `γ ≥ 0`. On top of
//! that sit decision rules over partially identified states (Bayes,
//! maximin, minimax regret), specialised solvers for binary outcomes and
//! interval bounds, and posterior summaries for lognormal meta-analysis.

pub mod binary;
pub mod bounds;
pub mod error;
pub mod io;
pub mod meta;
pub mod prospects;
pub mod rules;
pub mod welfare;

pub use binary::{
    bayes_binary, ee_binary, maximin_binary, minimax_regret_binary, BinaryOutcomeSpec,
    BinaryProblem, Evaluator,
};
pub use bounds::{
    assign_all, assign_from_bounds, bounds_regret_profile, bounds_to_states,
    worst_regret_decomposition, Assignment, EeBounds,
};
pub use error::{Error, Result};
pub use meta::{
    ee_lognormal, estimate_site, finite_sample_sim, plugin_rule, summarize_posterior, tau_pair,
    AgreementRow, Arm, MetaSummary, PosteriorDraws, SimConfig, SiteParams, TauPair,
};
pub use prospects::{
    expected_score, maximin_choice, rank_prospects, state_scores, Prior, Prospect, RankedProspect,
    Representation,
};
pub use rules::{
    bayes_rule, maximin_rule, minimax_regret_rule, point_id_rule, regret_profile, Criterion,
    ExtremeStates, RegretRow, RuleResult, StatePair, StateSet,
};
pub use welfare::{IncomeVector, WelfareSpec};
