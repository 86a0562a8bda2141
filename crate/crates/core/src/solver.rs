//! Exact computation of `f(n, m)`.
//!
//! The interval grows one integer at a time from length zero, keeping the
//! matching maximum throughout (see [`crate::matching`]). The first length
//! at which the matching is perfect is `f(n, m)` by construction, and the
//! state one step earlier certifies minimality. Growth beats binary search
//! here: feasibility at one length costs as much as walking every length,
//! and the walk hands over the deficiency certificate at `f - 1` for free.

use crate::matching::MatchingState;
use crate::model::{verify_witness, ProblemInstance, SolveResult};
use serde::Serialize;

/// Compute `f(n, m)` together with a verified witness at `f` and a
/// deficiency certificate at `f - 1`. Deterministic: equal inputs produce
/// identical witnesses and certificates.
///
/// Panics on an internal-consistency fault, e.g. if the matching were still
/// deficient at the analytic bound `L = n²`.
pub fn solve_f(n: u64, m: u64) -> SolveResult {
    assert!(n >= 1, "an instance needs at least one divisor");
    let mut state = MatchingState::new(n, m);
    while state.matching_size() < n {
        assert!(
            state.current_len() < n.saturating_mul(n),
            "matching still deficient at the n^2 length guarantee"
        );
        state.extend_one();
    }
    complete(state)
}

/// Outcome of a capped solve: either the full result, or the size the
/// maximum matching reached at the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CappedOutcome {
    Solved(SolveResult),
    CapExceeded { cap: u64, matching_size: u64 },
}

/// Like [`solve_f`] but gives up once the interval reaches `cap`.
/// Requires `cap >= n`; shorter intervals cannot be feasible anyway.
pub fn solve_f_capped(n: u64, m: u64, cap: u64) -> CappedOutcome {
    assert!(n >= 1, "an instance needs at least one divisor");
    assert!(cap >= n, "cap below n can never be feasible");
    let mut state = MatchingState::new(n, m);
    while state.matching_size() < n && state.current_len() < cap {
        state.extend_one();
    }
    if state.matching_size() == n {
        CappedOutcome::Solved(complete(state))
    } else {
        CappedOutcome::CapExceeded {
            cap,
            matching_size: state.matching_size(),
        }
    }
}

fn complete(state: MatchingState) -> SolveResult {
    let n = state.n();
    let m = state.m();
    let f_value = state.current_len();
    assert!(f_value >= n && f_value <= n.saturating_mul(n));
    let witness = state.extract_witness();
    verify_witness(n, m, f_value, &witness).expect("engine emitted an invalid witness");
    // replaying to f - 1 is deterministic, so this state is exactly the one
    // the growth loop passed through last
    let mut prior = MatchingState::new(n, m);
    for _ in 0..f_value - 1 {
        prior.extend_one();
    }
    assert!(
        prior.matching_size() < n,
        "matching perfect below the reported f; minimality violated"
    );
    let certificate = prior.hall_certificate();
    SolveResult {
        instance: ProblemInstance::new(n, m),
        f_value,
        witness,
        certificate,
    }
}

/// Flat interchange form of a [`SolveResult`]:
/// `{"n": ..., "m": ..., "f": ..., "witness": [...], "violator": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResultRecord {
    pub n: u64,
    pub m: u64,
    pub f: u64,
    pub witness: Vec<u64>,
    pub violator: Vec<u64>,
}

impl From<&SolveResult> for SolveResultRecord {
    fn from(result: &SolveResult) -> Self {
        Self {
            n: result.instance.n,
            m: result.instance.m,
            f: result.f_value,
            witness: result.witness.values().to_vec(),
            violator: result.certificate.violator_set.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_divisor_takes_the_next_integer() {
        let result = solve_f(1, 7);
        assert_eq!(result.f_value, 1);
        assert_eq!(result.witness.values(), &[8]);
        assert_eq!(result.certificate.violator_set, vec![1]);
    }

    #[test]
    fn shared_multiple_pushes_f_up() {
        assert_eq!(solve_f(3, 4).f_value, 4);
        assert_eq!(solve_f(3, 3).f_value, 3);
        assert_eq!(solve_f(4, 4).f_value, 5);
    }

    #[test]
    fn two_divisors_always_need_two() {
        for m in 0..100 {
            assert_eq!(solve_f(2, m).f_value, 2, "m={m}");
        }
    }

    #[test]
    fn results_carry_verified_artifacts() {
        for (n, m) in [(1, 0), (3, 4), (4, 4), (6, 59), (8, 840)] {
            let result = solve_f(n, m);
            assert_eq!(
                crate::model::verify_witness(n, m, result.f_value, &result.witness),
                Ok(())
            );
            assert!(result.certificate.verify(n, m, result.f_value - 1));
            assert!(result.f_value >= n && result.f_value <= n * n);
        }
    }

    #[test]
    fn capped_solve_distinguishes_outcomes() {
        match solve_f_capped(3, 4, 3) {
            CappedOutcome::CapExceeded { cap, matching_size } => {
                assert_eq!(cap, 3);
                assert_eq!(matching_size, 2);
            }
            CappedOutcome::Solved(_) => panic!("(3, 4) is infeasible at length 3"),
        }
        match solve_f_capped(3, 4, 4) {
            CappedOutcome::Solved(result) => assert_eq!(result.f_value, 4),
            CappedOutcome::CapExceeded { .. } => panic!("(3, 4) is feasible at length 4"),
        }
        match solve_f_capped(1, 0, 1) {
            CappedOutcome::Solved(result) => assert_eq!(result.f_value, 1),
            CappedOutcome::CapExceeded { .. } => panic!("(1, 0) is feasible at length 1"),
        }
    }

    #[test]
    fn capped_solve_matches_uncapped_when_it_fits() {
        for (n, m) in [(3, 4), (5, 17), (7, 0)] {
            let full = solve_f(n, m);
            match solve_f_capped(n, m, n * n) {
                CappedOutcome::Solved(capped) => assert_eq!(capped, full),
                CappedOutcome::CapExceeded { .. } => panic!("n^2 always suffices"),
            }
        }
    }

    #[test]
    fn record_shape() {
        let record = SolveResultRecord::from(&solve_f(3, 4));
        let json = serde_json::to_value(&record).unwrap();
        assert_eq!(json["n"], 3);
        assert_eq!(json["m"], 4);
        assert_eq!(json["f"], 4);
        assert!(json["witness"].is_array());
        assert!(json["violator"].is_array());
    }
}
