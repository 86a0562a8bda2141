//! Search for the residue `m` that maximizes `f(n, m)`.
//!
//! `f(n, ·)` is periodic with period `lcm(1..=n)`, so the whole landscape
//! is the finite table `m ∈ [0, lcm)`. Two strategies:
//!
//! * [`exhaustive_max`] evaluates every residue (parallel, deterministic
//!   smallest-`m` tie break) and is the ground truth while the period
//!   stays below a cap;
//! * [`sampled_max`] spends a fixed evaluation budget on seeded random
//!   probes interleaved with doubling-step hill climbs around the
//!   incumbent, for the regime where the period is astronomically large.
//!
//! Sampling is driven by SplitMix64 so a `(seed, budget)` pair fixes the
//! entire trajectory: state advances by `0x9E3779B97F4A7C15` per draw and
//! the output mix is `z ^= z >> 30, z *= 0xBF58476D1CE4E5B9; z ^= z >> 27,
//! z *= 0x94D049BB133111EB; z ^= z >> 31`. Reports from equal inputs are
//! identical regardless of thread count because the sampler is sequential
//! and the exhaustive reduction is a strict fold over residue order.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::model::{canonical_m, lcm_upto};
use crate::solver::solve_f;
use crate::store::{SolveCache, StoreError};

/// Largest residue-space size [`exhaustive_max`] will sweep.
pub const DEFAULT_RESIDUE_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("residue space for n = {n} has {lcm} classes, above the cap {cap}")]
    ResidueSpaceExceedsCap { n: u64, lcm: BigUint, cap: u64 },
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStrategy {
    Exhaustive,
    Sampled,
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStrategy::Exhaustive => "exhaustive",
            SearchStrategy::Sampled => "sampled",
        })
    }
}

/// Outcome of a residue search. `best_f = f(n, best_m)` is re-verified by
/// a fresh solve before the report is returned. `exhaustive` is true only
/// for strategies that certify full residue coverage by construction;
/// sampled runs always report false, even when a generous budget happens
/// to touch every class (compare `evaluations` against the period to
/// detect that).
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub n: u64,
    pub strategy: SearchStrategy,
    pub best_m: u64,
    pub best_f: u64,
    pub evaluations: u64,
    pub exhaustive: bool,
    pub seed: u64,
}

pub fn exhaustive_max(n: u64, cache: &SolveCache) -> Result<SearchReport, SearchError> {
    exhaustive_max_with_cap(n, DEFAULT_RESIDUE_CAP, cache)
}

pub fn exhaustive_max_with_cap(
    n: u64,
    cap: u64,
    cache: &SolveCache,
) -> Result<SearchReport, SearchError> {
    assert!(n >= 1);
    let lcm = lcm_upto(n);
    let period = match lcm.to_u64() {
        Some(p) if p <= cap => p,
        _ => return Err(SearchError::ResidueSpaceExceedsCap { n, lcm, cap }),
    };
    let values: Vec<u64> = (0..period)
        .into_par_iter()
        .map(|m| cache.f_value(n, m))
        .collect::<Result<_, StoreError>>()?;
    // strict > keeps the smallest maximizing m, independent of thread count
    let (best_m, best_f) = values
        .iter()
        .enumerate()
        .fold((0u64, 0u64), |(bm, bf), (m, &f)| {
            if f > bf {
                (m as u64, f)
            } else {
                (bm, bf)
            }
        });
    assert_eq!(solve_f(n, best_m).f_value, best_f);
    Ok(SearchReport {
        n,
        strategy: SearchStrategy::Exhaustive,
        best_m,
        best_f,
        evaluations: period,
        exhaustive: true,
        seed: 0,
    })
}

/// SplitMix64, the standard 64-bit mixer (see module docs for the exact
/// recurrence). Small and stateless enough that seeding it is the whole
/// reproducibility story.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Budgeted stochastic search. Evaluation order: fixed anchors first
/// (`m = n`, then small rescaled corners `k²·n'` for `k <= 4` and `n'`
/// next to `n`), then alternating seeded probes and hill-climb episodes
/// with doubling step widths around the incumbent. Already-seen residues
/// are memo hits and do not consume budget. Deterministic for fixed
/// `(n, budget, seed)`.
pub fn sampled_max(
    n: u64,
    budget: u64,
    seed: u64,
    cache: &SolveCache,
) -> Result<SearchReport, SearchError> {
    assert!(n >= 1);
    assert!(budget >= 1, "a search needs at least one evaluation");
    let modulus = lcm_upto(n).to_u64().unwrap_or(u64::MAX);
    let mut hunt = HuntState {
        n,
        modulus,
        budget,
        evals: 0,
        memo: BTreeMap::new(),
        best_m: 0,
        best_f: 0,
        cache,
    };
    let mut rng = SplitMix64::new(seed);

    hunt.run(&mut rng)?;

    let (best_m, best_f) = (hunt.best_m, hunt.best_f);
    assert_eq!(solve_f(n, best_m).f_value, best_f);
    Ok(SearchReport {
        n,
        strategy: SearchStrategy::Sampled,
        best_m,
        best_f,
        evaluations: hunt.evals,
        exhaustive: false,
        seed,
    })
}

struct HuntState<'a> {
    n: u64,
    modulus: u64,
    budget: u64,
    evals: u64,
    memo: BTreeMap<u64, u64>,
    best_m: u64,
    best_f: u64,
    cache: &'a SolveCache,
}

impl HuntState<'_> {
    /// Evaluate `f(n, raw_m)` at its canonical residue. `Ok(None)` means
    /// the budget is spent. Repeat visits are free.
    fn eval(&mut self, raw_m: u64) -> Result<Option<u64>, StoreError> {
        let m = canonical_m(self.n, raw_m);
        if let Some(&f) = self.memo.get(&m) {
            return Ok(Some(f));
        }
        if self.evals >= self.budget {
            return Ok(None);
        }
        let f = self.cache.f_value(self.n, m)?;
        self.evals += 1;
        self.memo.insert(m, f);
        let first = self.memo.len() == 1;
        if first || f > self.best_f || (f == self.best_f && m < self.best_m) {
            self.best_f = f;
            self.best_m = m;
        }
        Ok(Some(f))
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.budget || self.memo.len() as u64 >= self.modulus
    }

    fn run(&mut self, rng: &mut SplitMix64) -> Result<(), StoreError> {
        // anchors: the diagonal first, then rescaled corners
        if self.eval(self.n)?.is_none() {
            return Ok(());
        }
        'anchors: for k in 1..=4u64 {
            for base in [self.n.saturating_sub(1).max(1), self.n, self.n + 1] {
                if self.exhausted() {
                    break 'anchors;
                }
                if self.eval(k * k * base)?.is_none() {
                    break 'anchors;
                }
            }
        }

        while !self.exhausted() {
            // probe: a fresh seeded residue, if one turns up quickly
            let mut probe = None;
            for _ in 0..128 {
                let candidate = canonical_m(self.n, rng.next_u64() % self.modulus);
                if !self.memo.contains_key(&candidate) {
                    probe = Some(candidate);
                    break;
                }
            }
            let Some(probe) = probe else { break };
            if self.eval(probe)?.is_none() {
                break;
            }
            if self.climb()?.is_none() {
                break;
            }
        }
        Ok(())
    }

    /// One hill-climb episode around the incumbent: try `±delta`, doubling
    /// `delta` when both directions fail, moving (and resetting the step)
    /// on any improvement. Sideways moves are allowed a short plateau
    /// budget so flat ridges do not stall the climb.
    fn climb(&mut self) -> Result<Option<()>, StoreError> {
        const PLATEAU_BUDGET: u32 = 16;
        let mut cur = self.best_m;
        let mut delta: u64 = 1;
        let mut plateau = 0u32;
        loop {
            if self.exhausted() {
                return Ok(Some(()));
            }
            let here = *self.memo.get(&cur).expect("climb starts from a visited residue");
            let mut moved = false;
            for neighbor in [
                add_mod(cur, delta, self.modulus),
                sub_mod(cur, delta, self.modulus),
            ] {
                let Some(f) = self.eval(neighbor)? else {
                    return Ok(None);
                };
                if f > here {
                    cur = canonical_m(self.n, neighbor);
                    delta = 1;
                    plateau = 0;
                    moved = true;
                    break;
                }
                if f == here && plateau < PLATEAU_BUDGET {
                    plateau += 1;
                    cur = canonical_m(self.n, neighbor);
                    moved = true;
                    break;
                }
            }
            if !moved {
                if delta > self.modulus / 2 {
                    return Ok(Some(()));
                }
                delta = delta.saturating_mul(2);
            }
        }
    }
}

fn add_mod(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 + b as u128) % modulus as u128) as u64
}

fn sub_mod(a: u64, b: u64, modulus: u64) -> u64 {
    let b = b as u128 % modulus as u128;
    ((a as u128 + modulus as u128 - b) % modulus as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_sequence_is_stable() {
        // frozen from an independent evaluation of the recurrence
        let mut rng = SplitMix64::new(0);
        let first: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        assert_eq!(
            first,
            [
                0xE220_A839_7B1D_CDAF,
                0x6E78_9E6A_A1B9_65F4,
                0x06C4_5D18_8009_454F
            ]
        );
        // same seed, same stream
        let mut again = SplitMix64::new(0);
        for &v in &first {
            assert_eq!(again.next_u64(), v);
        }
    }

    #[test]
    fn modular_steps_wrap() {
        assert_eq!(add_mod(5, 3, 6), 2);
        assert_eq!(sub_mod(1, 3, 6), 4);
        assert_eq!(sub_mod(1, 6 * 10 + 3, 6), 4);
        assert_eq!(add_mod(u64::MAX - 1, 5, u64::MAX), 4);
    }

    #[test]
    fn exhaustive_tiny_landscapes() {
        let cache = SolveCache::ephemeral();
        // n = 1: period 1, f == 1 everywhere
        let r = exhaustive_max(1, &cache).unwrap();
        assert_eq!((r.best_m, r.best_f, r.evaluations), (0, 1, 1));
        assert!(r.exhaustive);
        // n = 2: period 2, f == 2 everywhere, tie broken to m = 0
        let r = exhaustive_max(2, &cache).unwrap();
        assert_eq!((r.best_m, r.best_f, r.evaluations), (0, 2, 2));
        // n = 3: period 6; f(3, 4) = 4 is the unique maximum
        let r = exhaustive_max(3, &cache).unwrap();
        assert_eq!((r.best_m, r.best_f), (4, 4));
    }

    #[test]
    fn exhaustive_respects_cap() {
        let cache = SolveCache::ephemeral();
        match exhaustive_max_with_cap(5, 10, &cache) {
            Err(SearchError::ResidueSpaceExceedsCap { n: 5, lcm, cap: 10 }) => {
                assert_eq!(lcm, lcm_upto(5));
            }
            other => panic!("expected cap rejection, got {other:?}"),
        }
    }

    #[test]
    fn sampled_is_deterministic() {
        let cache = SolveCache::ephemeral();
        let a = sampled_max(5, 20, 42, &cache).unwrap();
        let b = sampled_max(5, 20, 42, &SolveCache::ephemeral()).unwrap();
        assert_eq!((a.best_m, a.best_f, a.evaluations), (b.best_m, b.best_f, b.evaluations));
        assert_eq!(a.seed, 42);
    }

    #[test]
    fn sampled_with_unit_budget_reports_the_diagonal() {
        let cache = SolveCache::ephemeral();
        let r = sampled_max(4, 1, 7, &cache).unwrap();
        assert_eq!(r.best_m, canonical_m(4, 4));
        assert_eq!(r.best_f, solve_f(4, 4).f_value);
        assert_eq!(r.evaluations, 1);
        assert!(!r.exhaustive);
    }

    #[test]
    fn sampled_never_beats_exhaustive_and_covers_small_periods() {
        let cache = SolveCache::ephemeral();
        for n in [2u64, 3, 4] {
            let truth = exhaustive_max(n, &cache).unwrap();
            let sampled = sampled_max(n, 200, 1, &cache).unwrap();
            assert!(sampled.best_f <= truth.best_f);
            // the flag never claims coverage for a sampled run
            assert!(!sampled.exhaustive);
            // but a budget this generous does cover the whole period
            // here, so the maximum must match exactly
            let period = lcm_upto(n).to_u64().unwrap();
            assert_eq!(sampled.evaluations, period);
            assert_eq!(sampled.best_f, truth.best_f);
        }
    }
}
