//! Domain types and the divisibility/interval arithmetic the rest of the
//! crate builds on.
//!
//! The quantity of interest is `f(n, m)`: the least length `L` such that the
//! interval `(m, m + L]` contains distinct integers `a_1, ..., a_n` with
//! `i | a_i` for every `i` in `[1, n]`. Whether `i` divides `t` depends only
//! on `t mod i`, and every `i <= n` divides `lcm(1..=n)`, so `f(n, ·)` is
//! periodic in `m` with period `lcm(1..=n)`. That lcm outgrows 64 bits
//! around `n = 43`, hence arbitrary precision for it, unconditionally.
//!
//! Everything else here is exact integer arithmetic on `u64`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One `f`-computation: `n` divisors against intervals starting at `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub n: u64,
    pub m: u64,
}

impl ProblemInstance {
    pub fn new(n: u64, m: u64) -> Self {
        assert!(n >= 1, "an instance needs at least one divisor");
        Self { n, m }
    }
}

/// Injective assignment `i -> a_i`, stored densely: slot `i - 1` holds
/// `a_i`. Absent entries are unrepresentable by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    assignment: Vec<u64>,
}

impl Witness {
    pub fn new(assignment: Vec<u64>) -> Self {
        Self { assignment }
    }

    pub fn values(&self) -> &[u64] {
        &self.assignment
    }

    /// `a_i` for a 1-based divisor index.
    pub fn get(&self, i: u64) -> Option<u64> {
        if i == 0 {
            return None;
        }
        self.assignment.get((i - 1) as usize).copied()
    }

    pub fn divisor_count(&self) -> u64 {
        self.assignment.len() as u64
    }
}

/// Interchange form of a witness:
/// `{"n": ..., "m": ..., "L": ..., "assignment": [a_1, ..., a_n]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub n: u64,
    pub m: u64,
    #[serde(rename = "L")]
    pub len: u64,
    pub assignment: Vec<u64>,
}

impl WitnessDocument {
    pub fn new(n: u64, m: u64, len: u64, witness: &Witness) -> Self {
        Self {
            n,
            m,
            len,
            assignment: witness.values().to_vec(),
        }
    }

    pub fn witness(&self) -> Witness {
        Witness::new(self.assignment.clone())
    }

    pub fn verify(&self) -> Result<(), WitnessViolation> {
        verify_witness(self.n, self.m, self.len, &self.witness())
    }
}

/// First failed clause of witness verification. Clauses are checked in the
/// fixed order totality, range, divisibility, injectivity, each scanned in
/// increasing divisor index, so the diagnostic is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WitnessViolation {
    #[error("assignment covers {actual} divisors, expected {expected}")]
    Totality { expected: u64, actual: u64 },
    #[error("a_{index} = {value} lies outside ({lo}, {hi}]")]
    Range {
        index: u64,
        value: u64,
        lo: u64,
        hi: u64,
    },
    #[error("a_{index} = {value} is not a multiple of {index}")]
    Divisibility { index: u64, value: u64 },
    #[error("a_{first} and a_{second} are both {value}")]
    Duplicate { first: u64, second: u64, value: u64 },
}

/// Check that `witness` proves `f(n, m) <= len`.
pub fn verify_witness(n: u64, m: u64, len: u64, witness: &Witness) -> Result<(), WitnessViolation> {
    assert!(n >= 1, "an instance needs at least one divisor");
    let values = witness.values();
    if values.len() as u64 != n {
        return Err(WitnessViolation::Totality {
            expected: n,
            actual: values.len() as u64,
        });
    }
    let hi = m.checked_add(len).expect("interval end overflows u64");
    for (idx, &a) in values.iter().enumerate() {
        let i = idx as u64 + 1;
        if a <= m || a > hi {
            return Err(WitnessViolation::Range {
                index: i,
                value: a,
                lo: m,
                hi,
            });
        }
    }
    for (idx, &a) in values.iter().enumerate() {
        let i = idx as u64 + 1;
        if a % i != 0 {
            return Err(WitnessViolation::Divisibility { index: i, value: a });
        }
    }
    let mut seen: HashMap<u64, u64> = HashMap::with_capacity(values.len());
    for (idx, &a) in values.iter().enumerate() {
        let i = idx as u64 + 1;
        if let Some(&first) = seen.get(&a) {
            return Err(WitnessViolation::Duplicate {
                first,
                second: i,
                value: a,
            });
        }
        seen.insert(a, i);
    }
    Ok(())
}

/// Infeasibility certificate: a divisor set whose joint multiples inside
/// the interval number fewer than the set itself, i.e. the deficiency side
/// of Hall's condition. `neighborhood_size < violator_set.len()` always.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallCertificate {
    pub violator_set: Vec<u64>,
    pub neighborhood_size: u64,
}

impl HallCertificate {
    /// Recount the joint multiples of the violator set in `(m, m + len]`
    /// from scratch and confirm the recorded deficiency.
    pub fn verify(&self, n: u64, m: u64, len: u64) -> bool {
        if self.violator_set.is_empty() {
            return false;
        }
        if self.violator_set.iter().any(|&i| i < 1 || i > n) {
            return false;
        }
        let count = covered_count(&self.violator_set, m, len);
        count == self.neighborhood_size && count < self.violator_set.len() as u64
    }
}

/// Full answer for one instance: the minimal feasible length, a witness at
/// that length, and a deficiency certificate one shorter.
///
/// `f_value` always lands in `[n, n²]`. Lower end: `n` distinct integers
/// need `n` slots. Upper end: at length `n²` every divisor `i <= n` has at
/// least `⌊n²/i⌋ >= n` multiples in the interval, so any divisor subset `S`
/// covers at least `n >= |S|` integers and Hall's condition holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub instance: ProblemInstance,
    pub f_value: u64,
    pub witness: Witness,
    pub certificate: HallCertificate,
}

/// All `t` in `(m, m + len]` with `i | t`, ascending. The count always
/// equals `(m + len)/i - m/i`.
pub fn multiples_in_interval(i: u64, m: u64, len: u64) -> Vec<u64> {
    assert!(i >= 1, "divisor must be positive");
    let hi = m as u128 + len as u128;
    assert!(hi <= u64::MAX as u128, "interval end overflows u64");
    let mut out = Vec::new();
    let mut t = (m as u128 / i as u128 + 1) * i as u128;
    while t <= hi {
        out.push(t as u64);
        t += i as u128;
    }
    out
}

/// Closed-form size of `multiples_in_interval(i, m, len)`.
pub fn multiples_count(i: u64, m: u64, len: u64) -> u64 {
    assert!(i >= 1, "divisor must be positive");
    let hi = m as u128 + len as u128;
    (hi / i as u128 - m as u128 / i as u128) as u64
}

/// Number of integers in `(m, m + len]` divisible by at least one member of
/// `set`, counted by marking the interval.
pub fn covered_count(set: &[u64], m: u64, len: u64) -> u64 {
    let hi = m as u128 + len as u128;
    assert!(hi <= u64::MAX as u128, "interval end overflows u64");
    let mut hit = vec![false; len as usize];
    for &i in set {
        assert!(i >= 1, "divisor must be positive");
        let mut t = (m as u128 / i as u128 + 1) * i as u128;
        while t <= hi {
            hit[(t - m as u128 - 1) as usize] = true;
            t += i as u128;
        }
    }
    hit.iter().filter(|&&h| h).count() as u64
}

/// Exact `lcm(1..=n)`.
pub fn lcm_upto(n: u64) -> BigUint {
    assert!(n >= 1, "lcm needs at least one term");
    let mut acc = BigUint::from(1u32);
    for i in 2..=n {
        acc = acc.lcm(&BigUint::from(i));
    }
    acc
}

/// Reduce `m` to its canonical residue modulo `lcm(1..=n)`; `f(n, m)`
/// depends on `m` only through this value.
pub fn canonical_m(n: u64, m: u64) -> u64 {
    let lcm = lcm_upto(n);
    (BigUint::from(m) % &lcm)
        .to_u64()
        .expect("residue of a u64 fits u64")
}
