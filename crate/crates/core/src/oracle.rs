//! Small-instance reference oracles, deliberately independent of the
//! matching engine: they walk multiples of each divisor, never divisors of
//! each integer, and share no search state with the solver.

use crate::model::multiples_in_interval;
use thiserror::Error;

/// Largest `n` the backtracking oracle accepts by default.
pub const DEFAULT_BACKTRACK_GUARD: u64 = 10;

/// Largest `n` the subset-enumeration oracle accepts by default.
pub const DEFAULT_HALL_GUARD: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the {what} guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        n: u64,
        guard: u64,
    },
}

/// `f(n, m)` by direct backtracking over assignments.
pub fn brute_force_f(n: u64, m: u64) -> Result<u64, OracleError> {
    brute_force_f_with_guard(n, m, DEFAULT_BACKTRACK_GUARD)
}

/// Backtracking oracle with an explicit guard. Assigns divisors from `n`
/// down to `1`; large divisors have the fewest multiples, so they fail
/// first.
pub fn brute_force_f_with_guard(n: u64, m: u64, guard: u64) -> Result<u64, OracleError> {
    assert!(n >= 1, "an instance needs at least one divisor");
    if n > guard {
        return Err(OracleError::GuardExceeded {
            what: "backtracking",
            n,
            guard,
        });
    }
    for len in n..=n * n {
        let mut used = vec![false; len as usize];
        if assign(n, m, len, &mut used) {
            return Ok(len);
        }
    }
    unreachable!("length n^2 always admits an assignment");
}

fn assign(i: u64, m: u64, len: u64, used: &mut [bool]) -> bool {
    if i == 0 {
        return true;
    }
    for t in multiples_in_interval(i, m, len) {
        let slot = (t - m - 1) as usize;
        if !used[slot] {
            used[slot] = true;
            if assign(i - 1, m, len, used) {
                return true;
            }
            used[slot] = false;
        }
    }
    false
}

/// Hall's condition over every nonempty divisor subset: `true` iff each
/// subset `S` of `1..=n` covers at least `|S|` integers of `(m, m + len]`.
/// By Hall's theorem this is exactly "`f(n, m) <= len`".
pub fn hall_check(n: u64, m: u64, len: u64) -> Result<bool, OracleError> {
    hall_check_with_guard(n, m, len, DEFAULT_HALL_GUARD)
}

/// Subset-enumeration oracle with an explicit guard (cost grows as `2^n`).
/// Union sizes are counted by marking the interval, no inclusion-exclusion.
pub fn hall_check_with_guard(n: u64, m: u64, len: u64, guard: u64) -> Result<bool, OracleError> {
    assert!(n >= 1, "an instance needs at least one divisor");
    if n > guard {
        return Err(OracleError::GuardExceeded {
            what: "subset enumeration",
            n,
            guard,
        });
    }
    let hi = m as u128 + len as u128;
    assert!(hi <= u64::MAX as u128, "interval end overflows u64");
    // stamp[slot] == mask iff the slot was already counted for this subset
    let mut stamp = vec![0u32; len as usize];
    for mask in 1u32..(1u32 << n) {
        let need = u64::from(mask.count_ones());
        let mut covered = 0u64;
        for i in 1..=n {
            if mask & (1 << (i - 1)) == 0 {
                continue;
            }
            let mut t = (m as u128 / i as u128 + 1) * i as u128;
            while t <= hi {
                let slot = (t - m as u128 - 1) as usize;
                if stamp[slot] != mask {
                    stamp[slot] = mask;
                    covered += 1;
                }
                t += i as u128;
            }
        }
        if covered < need {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_f(3, 3), Ok(3));
        assert_eq!(brute_force_f(3, 4), Ok(4));
        assert_eq!(brute_force_f(1, 0), Ok(1));
        assert_eq!(brute_force_f(4, 4), Ok(5));
        assert_eq!(brute_force_f(2, 0), Ok(2));
    }

    #[test]
    fn brute_force_guard() {
        assert_eq!(
            brute_force_f(11, 0),
            Err(OracleError::GuardExceeded {
                what: "backtracking",
                n: 11,
                guard: 10
            })
        );
        // m = 0 admits the identity assignment, so f(11, 0) = 11
        assert_eq!(brute_force_f_with_guard(11, 0, 11), Ok(11));
    }

    #[test]
    fn hall_examples() {
        // (4, 7] starves {2, 3}; one more slot feeds it
        assert_eq!(hall_check(3, 4, 3), Ok(false));
        assert_eq!(hall_check(3, 4, 4), Ok(true));
        assert_eq!(hall_check(1, 5, 1), Ok(true));
        assert_eq!(hall_check(1, 5, 0), Ok(false));
    }

    #[test]
    fn hall_guard() {
        assert!(hall_check(21, 0, 30).is_err());
        assert!(hall_check_with_guard(21, 0, 30, 21).is_ok());
    }

    #[test]
    fn oracles_agree_on_tiny_instances() {
        for n in 1..=5 {
            for m in 0..30 {
                let f = brute_force_f(n, m).unwrap();
                let threshold = (0..).find(|&len| hall_check(n, m, len).unwrap()).unwrap();
                assert_eq!(f, threshold, "n={n} m={m}");
            }
        }
    }
}
