//! Incremental maximum matching between the divisors `1..=n` and the
//! integers of a growing interval `(m, m + L]`.
//!
//! Edges are implicit: divisor `i` is adjacent to integer `t` iff `i | t`.
//! Adjacency is generated on demand from the divisors of each integer and
//! never materialized, so a state costs `O(n + L)` memory.
//!
//! Why one augmenting search per extension keeps the matching maximum:
//! suppose the matching was maximum before integer `t` joined the graph.
//! Any augmenting path in the extended graph must end at an exposed vertex
//! on both ends; every exposed divisor had no augmenting path before, so a
//! new one must pass through `t`, and since `t` is exposed it can serve as
//! the root. One alternating search rooted at `t` therefore decides exactly
//! whether the maximum grows, and it grows by at most one.
//!
//! Determinism: the search explores divisors of each integer in increasing
//! order, so matched partners, witnesses, and certificates are functions of
//! `(n, m, L)` alone.

use std::collections::VecDeque;

use crate::model::{covered_count, multiples_in_interval, HallCertificate, Witness};

/// Matching between divisors and the interval integers admitted so far.
/// `matching_size` is the size of a maximum matching of the current graph,
/// not merely a maximal one; everything downstream leans on that.
#[derive(Debug, Clone)]
pub struct MatchingState {
    n: u64,
    m: u64,
    len: u64,
    /// slot `i - 1`: integer matched to divisor `i`
    divisor_match: Vec<Option<u64>>,
    /// slot `t - m - 1`: divisor matched to integer `t`
    integer_match: Vec<Option<u64>>,
    size: u64,
    /// scratch for the alternating search, one flag per divisor
    visited: Vec<bool>,
}

impl MatchingState {
    /// Empty interval, empty matching.
    pub fn new(n: u64, m: u64) -> Self {
        assert!(n >= 1, "an instance needs at least one divisor");
        Self {
            n,
            m,
            len: 0,
            divisor_match: vec![None; n as usize],
            integer_match: Vec::new(),
            size: 0,
            visited: vec![false; n as usize],
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn current_len(&self) -> u64 {
        self.len
    }

    pub fn matching_size(&self) -> u64 {
        self.size
    }

    /// Integer currently matched to divisor `i`, if any.
    pub fn matched_integer_of(&self, i: u64) -> Option<u64> {
        assert!((1..=self.n).contains(&i), "divisor out of range");
        self.divisor_match[(i - 1) as usize]
    }

    /// Divisor currently matched to integer `t`, if any.
    pub fn matched_divisor_of(&self, t: u64) -> Option<u64> {
        assert!(t > self.m && t <= self.m + self.len, "integer out of range");
        self.integer_match[(t - self.m - 1) as usize]
    }

    /// Admit the next integer `t = m + L + 1` and run one augmenting search
    /// rooted at it. The matching size grows by zero or one and stays
    /// maximum for the extended graph.
    pub fn extend_one(&mut self) {
        self.len += 1;
        let t = self.m.checked_add(self.len).expect("interval end overflows u64");
        self.integer_match.push(None);
        self.visited.fill(false);
        if self.try_augment(t) {
            self.size += 1;
        }
    }

    fn try_augment(&mut self, t: u64) -> bool {
        for i in divisors_up_to(t, self.n) {
            let slot = (i - 1) as usize;
            if self.visited[slot] {
                continue;
            }
            self.visited[slot] = true;
            match self.divisor_match[slot] {
                None => {
                    self.link(i, t);
                    return true;
                }
                Some(prev_t) => {
                    if self.try_augment(prev_t) {
                        self.link(i, t);
                        return true;
                    }
                }
            }
        }
        false
    }

    fn link(&mut self, i: u64, t: u64) {
        self.divisor_match[(i - 1) as usize] = Some(t);
        self.integer_match[(t - self.m - 1) as usize] = Some(i);
    }

    /// Deficient divisor set reached by alternating paths from the exposed
    /// divisors. Its interval neighborhood consists of matched integers
    /// only (an unmatched one would extend the matching), so it loses at
    /// least one exposed divisor in the count; the deficiency is recounted
    /// directly before returning.
    ///
    /// Panics if the matching is already perfect.
    pub fn hall_certificate(&self) -> HallCertificate {
        assert!(
            self.size < self.n,
            "matching is perfect; there is no deficiency to certify"
        );
        let mut in_set = vec![false; self.n as usize];
        let mut queue = VecDeque::new();
        for i in 1..=self.n {
            if self.divisor_match[(i - 1) as usize].is_none() {
                in_set[(i - 1) as usize] = true;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for t in multiples_in_interval(i, self.m, self.len) {
                let matched = self.integer_match[(t - self.m - 1) as usize]
                    .expect("unmatched integer adjacent to the alternating tree");
                let slot = (matched - 1) as usize;
                if !in_set[slot] {
                    in_set[slot] = true;
                    queue.push_back(matched);
                }
            }
        }
        let violator_set: Vec<u64> = (1..=self.n)
            .filter(|&i| in_set[(i - 1) as usize])
            .collect();
        let neighborhood_size = covered_count(&violator_set, self.m, self.len);
        assert!(
            neighborhood_size < violator_set.len() as u64,
            "alternating reachability failed to certify a deficiency"
        );
        HallCertificate {
            violator_set,
            neighborhood_size,
        }
    }

    /// Witness read off a perfect matching. Panics if the matching is not
    /// perfect yet.
    pub fn extract_witness(&self) -> Witness {
        assert!(self.size == self.n, "matching is not perfect yet");
        let assignment = self
            .divisor_match
            .iter()
            .map(|slot| slot.expect("perfect matching fills every divisor"))
            .collect();
        Witness::new(assignment)
    }
}

/// Divisors of `t` that are `<= limit`, ascending. Trial division up to
/// `sqrt(t)` collects both cofactors; when `limit` is below `sqrt(t)` it is
/// cheaper to test each candidate divisor directly.
pub(crate) fn divisors_up_to(t: u64, limit: u64) -> Vec<u64> {
    assert!(t >= 1, "integers in the interval are positive");
    if (limit as u128) * (limit as u128) < t as u128 {
        return (1..=limit).filter(|&d| t.is_multiple_of(d)).collect();
    }
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1u64;
    while (d as u128) * (d as u128) <= t as u128 {
        if t.is_multiple_of(d) {
            if d <= limit {
                low.push(d);
            }
            let q = t / d;
            if q != d && q <= limit {
                high.push(q);
            }
        }
        d += 1;
    }
    // `high` was collected with q descending; all of it exceeds sqrt(t)
    high.reverse();
    low.extend(high);
    low
}
