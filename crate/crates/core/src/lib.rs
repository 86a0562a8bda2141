//! Exact computation of the interval covering number `f(n, m)`: the least
//! `L` such that the interval `(m, m + L]` contains `n` distinct integers
//! `a_1, .., a_n` with `i | a_i` for every `i in [1, n]` (indices in any
//! order, values pairwise distinct).
//!
//! The crate solves instances exactly by incremental bipartite matching
//! ([`solve_f`]), cross-checks them against independent brute-force and
//! Hall-condition oracles ([`oracle`]), certifies minimality with explicit
//! deficient sets ([`HallCertificate`]), measures the rescaling and gap
//! inequalities that govern how `f(n, m)` varies with `m` ([`analysis`]),
//! searches residue space for maximizing `m` ([`search`]), and persists
//! results in a mergeable on-disk cache ([`store`]).

pub mod analysis;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod search;
pub mod solver;
pub mod store;

pub use analysis::{
    bounds_ratios, chain_report, compose_witness, composed_len, gap_lower_term, gap_parameters,
    growth_predicate, lemma1_sides, lower_envelope, slack_predicate, upper_envelope,
    AnalysisError, BoundsRow, ChainLink, GapParameters, GrowthReport, SlackReport,
};
pub use matching::MatchingState;
pub use model::{
    canonical_m, covered_count, lcm_upto, multiples_count, multiples_in_interval, verify_witness,
    HallCertificate, ProblemInstance, SolveResult, Witness, WitnessDocument, WitnessViolation,
};
pub use oracle::{
    brute_force_f, brute_force_f_with_guard, hall_check, hall_check_with_guard, OracleError,
    DEFAULT_BACKTRACK_GUARD, DEFAULT_HALL_GUARD,
};
pub use search::{
    exhaustive_max, exhaustive_max_with_cap, sampled_max, SearchError, SearchReport,
    SearchStrategy, SplitMix64, DEFAULT_RESIDUE_CAP,
};
pub use solver::{solve_f, solve_f_capped, CappedOutcome, SolveResultRecord};
pub use store::{ResultStore, SolveCache, StoreError, ENGINE_VERSION};
