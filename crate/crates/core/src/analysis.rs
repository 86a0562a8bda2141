//! Measured checks of the inequalities that relate `f` at rescaled
//! instances, and of the asymptotic envelopes around `f(n, n)`.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * every logarithm is natural (`ln`, never `log2` or `log10`);
//! * `ε = 1/100` exactly, and every comparison involving it runs in exact
//!   rational arithmetic, so predicates are bit-reproducible;
//! * floating point appears only in envelope and report *values*
//!   (`lower_envelope`, `upper_envelope`, `gap_lower_term`, displayed
//!   chain sides), never in a predicate that has an exact formulation.
//!
//! The backbone is the rescaling inequality, valid for all `k, n >= 1`:
//!
//! ```text
//! k·n + f(k·n, k·n)  <=  k²·n + f(n, k²·n)                            (R)
//! ```
//!
//! Proof by witness composition, constructive in [`compose_witness`]: give
//! divisor `i` in `(n, k·n]` the value `k·i`, which lands in `(k·n, k²·n]`,
//! and shift a witness for `(n, k²·n)` into `(k²·n, k²·n + f(n, k²·n)]`
//! for the divisors up to `n`. The two blocks live in disjoint ranges, so
//! the union is injective and feasible for the instance `(k·n, m = k·n)`
//! at length `k²·n - k·n + f(n, k²·n)`.
//!
//! On top of (R) sit two measured predicates with `k = ⌈0.6·√(ln n / ln ln n)⌉`:
//!
//! ```text
//! f(k·n, k·n) > (2 + ε)·k²·n                                          (G)
//! ε·k²·n      > f(n, n)                                               (S)
//! ```
//!
//! When both hold, chaining them through (R) bounds the residue gap from
//! below:
//!
//! ```text
//! max_m f(n, m) >= f(n, k²·n) >= k·n + f(k·n, k·n) - k²·n
//!               > (2+ε)·k²·n - k²·n = ε·k²·n + k²·n
//!               > f(n, n) + 0.36·n·ln n / ln ln n
//! ```
//!
//! (G) and (S) are expected to hold only for large `n`; this crate reports
//! them per instance and never asserts them.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{verify_witness, Witness, WitnessViolation};
use crate::store::{SolveCache, StoreError};

type Exact = Ratio<i128>;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("n = {n} is too small; the gap parameters need n >= {min}")]
    UnsupportedN { n: u64, min: u64 },
    #[error("inner witness rejected: {0}")]
    RejectedInnerWitness(#[source] WitnessViolation),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Parameters of the residue-gap analysis at `n`: the rescaling factor
/// `k = ⌈0.6·√(ln n / ln ln n)⌉` and the exact margin `ε = 1/100`.
/// Needs `n >= 3` so that `ln ln n > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapParameters {
    pub n: u64,
    pub k: u64,
    pub epsilon: Exact,
}

pub fn gap_parameters(n: u64) -> Result<GapParameters, AnalysisError> {
    if n < 3 {
        return Err(AnalysisError::UnsupportedN { n, min: 3 });
    }
    let ln_n = (n as f64).ln();
    let k = (0.6 * (ln_n / ln_n.ln()).sqrt()).ceil() as u64;
    assert!(k >= 1);
    Ok(GapParameters {
        n,
        k,
        epsilon: Exact::new(1, 100),
    })
}

/// Both sides of the rescaling inequality (R):
/// `(k·n + f(k·n, k·n), k²·n + f(n, k²·n))`. The left side never exceeds
/// the right, with equality exactly at `k = 1`, where both instances
/// coincide.
pub fn lemma1_sides(k: u64, n: u64, cache: &SolveCache) -> Result<(u64, u64), AnalysisError> {
    assert!(k >= 1 && n >= 1);
    let kn = k * n;
    let k2n = k * kn;
    let lhs = kn + cache.f_value(kn, kn)?;
    let rhs = k2n + cache.f_value(n, k2n)?;
    Ok((lhs, rhs))
}

/// Build the composed witness behind (R): `inner` must be valid for the
/// instance `(n, m = k²·n)` at length `inner_len`; the output is valid for
/// `(k·n, m = k·n)` at length `k²·n - k·n + inner_len`. `k = 1` returns the
/// inner witness unchanged.
pub fn compose_witness(
    k: u64,
    n: u64,
    inner_len: u64,
    inner: &Witness,
) -> Result<Witness, AnalysisError> {
    assert!(k >= 1 && n >= 1);
    let kn = k * n;
    let k2n = k * kn;
    verify_witness(n, k2n, inner_len, inner).map_err(AnalysisError::RejectedInnerWitness)?;
    let mut assignment = Vec::with_capacity(kn as usize);
    for i in 1..=kn {
        if i <= n {
            assignment.push(inner.get(i).expect("inner witness is total on [1, n]"));
        } else {
            assignment.push(k * i);
        }
    }
    let composed = Witness::new(assignment);
    let composed_len = k2n - kn + inner_len;
    verify_witness(kn, kn, composed_len, &composed)
        .expect("composition of a valid inner witness is always valid");
    Ok(composed)
}

/// Interval length the composed witness of [`compose_witness`] lives in.
pub fn composed_len(k: u64, n: u64, inner_len: u64) -> u64 {
    k * k * n - k * n + inner_len
}

/// Measured predicate (G): `f(k·n, k·n) > (2 + ε)·k²·n`, compared exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthReport {
    pub n: u64,
    pub k: u64,
    pub holds: bool,
    /// `f(k·n, k·n)`
    pub lhs: u64,
    /// `(2 + ε)·k²·n`
    pub rhs: Exact,
}

pub fn growth_predicate(n: u64, cache: &SolveCache) -> Result<GrowthReport, AnalysisError> {
    let params = gap_parameters(n)?;
    let k = params.k;
    let kn = k * n;
    let lhs = cache.f_value(kn, kn)?;
    let rhs = (Exact::from_integer(2) + params.epsilon) * Exact::from_integer((k * kn) as i128);
    let holds = Exact::from_integer(lhs as i128) > rhs;
    Ok(GrowthReport {
        n,
        k,
        holds,
        lhs,
        rhs,
    })
}

/// Measured predicate (S): `ε·k²·n > f(n, n)`, compared exactly; the left
/// side is `k²·n / 100` as a reduced rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlackReport {
    pub n: u64,
    pub k: u64,
    pub holds: bool,
    /// `ε·k²·n`
    pub lhs: Exact,
    /// `f(n, n)`
    pub rhs: u64,
}

pub fn slack_predicate(n: u64, cache: &SolveCache) -> Result<SlackReport, AnalysisError> {
    let params = gap_parameters(n)?;
    let k = params.k;
    let lhs = params.epsilon * Exact::from_integer((k * k * n) as i128);
    let rhs = cache.f_value(n, n)?;
    let holds = lhs > Exact::from_integer(rhs as i128);
    Ok(SlackReport {
        n,
        k,
        holds,
        lhs,
        rhs,
    })
}

/// `0.36·n·ln n / ln ln n`, the gap the chain is measured against.
pub fn gap_lower_term(n: u64) -> f64 {
    let ln_n = (n as f64).ln();
    0.36 * n as f64 * ln_n / ln_n.ln()
}

/// One link of the inequality chain. `lhs`/`rhs` are display values; every
/// `holds` flag with an exact formulation is computed exactly, only the
/// final link (whose right side is irrational) compares in `f64`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainLink {
    pub name: &'static str,
    /// `None` for the analytic first link, whose left side is not computed.
    pub lhs: Option<f64>,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluate the five-link chain at `n`. The first link (a maximum
/// dominates the value at one point) holds by construction; the rescaling
/// link holds unconditionally by (R); the identity link is an exact
/// rational identity; the growth and gap links are measurements that may
/// legitimately fail at small `n`.
pub fn chain_report(n: u64, cache: &SolveCache) -> Result<Vec<ChainLink>, AnalysisError> {
    let params = gap_parameters(n)?;
    let k = params.k;
    let kn = k * n;
    let k2n = k * kn;
    let f_shift = cache.f_value(n, k2n)?; // f(n, k²·n)
    let f_scaled = cache.f_value(kn, kn)?; // f(k·n, k·n)
    let f_nn = cache.f_value(n, n)?;

    // chain values, exact where they have exact formulations
    let v2 = i128::from(f_shift);
    let v3 = i128::from(kn) + i128::from(f_scaled) - i128::from(k2n);
    let v4 = (Exact::from_integer(2) + params.epsilon) * Exact::from_integer(k2n as i128)
        - Exact::from_integer(k2n as i128);
    let v4_split = params.epsilon * Exact::from_integer(k2n as i128)
        + Exact::from_integer(k2n as i128);
    let v5 = f_nn as f64 + gap_lower_term(n);

    let rescaling_holds = v2 >= v3;
    assert!(
        rescaling_holds,
        "the rescaling inequality is unconditional; its failure is a solver fault"
    );
    let identity_holds = v4 == v4_split;

    Ok(vec![
        ChainLink {
            name: "max_dominates",
            lhs: None,
            rhs: v2 as f64,
            holds: true,
        },
        ChainLink {
            name: "rescaling",
            lhs: Some(v2 as f64),
            rhs: v3 as f64,
            holds: rescaling_holds,
        },
        ChainLink {
            name: "growth",
            lhs: Some(v3 as f64),
            rhs: exact_to_f64(v4),
            holds: Exact::from_integer(v3) > v4,
        },
        ChainLink {
            name: "identity",
            lhs: Some(exact_to_f64(v4)),
            rhs: exact_to_f64(v4_split),
            holds: identity_holds,
        },
        ChainLink {
            name: "gap",
            lhs: Some(exact_to_f64(v4_split)),
            rhs: v5,
            holds: exact_to_f64(v4_split) > v5,
        },
    ])
}

fn exact_to_f64(x: Exact) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// `(2/√e)·n·√(ln n / ln ln n)`, the measured lower envelope of `f(n, n)`.
/// Note `2/√e = 1.2130… > 1.21`.
pub fn lower_envelope(n: u64) -> f64 {
    let ln_n = (n as f64).ln();
    (2.0 / std::f64::consts::E.sqrt()) * n as f64 * (ln_n / ln_n.ln()).sqrt()
}

/// `2·n·√(ln n)`, the measured upper envelope of `f(n, n)`.
pub fn upper_envelope(n: u64) -> f64 {
    2.0 * n as f64 * (n as f64).ln().sqrt()
}

/// `f(n, n)` against both envelopes. The envelopes are asymptotic: the
/// lower one actually exceeds the upper one for tiny `n`, so their order is
/// asserted only from `n >= 16` on, by direct evaluation per row.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub n: u64,
    pub f_nn: u64,
    pub lower_env: f64,
    pub upper_env: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

pub fn bounds_ratios(ns: &[u64], cache: &SolveCache) -> Result<Vec<BoundsRow>, AnalysisError> {
    ns.par_iter()
        .map(|&n| {
            if n < 3 {
                return Err(AnalysisError::UnsupportedN { n, min: 3 });
            }
            let f_nn = cache.f_value(n, n)?;
            assert!(f_nn >= n && f_nn <= n * n);
            let lower_env = lower_envelope(n);
            let upper_env = upper_envelope(n);
            if n >= 16 {
                assert!(lower_env < upper_env);
            }
            Ok(BoundsRow {
                n,
                f_nn,
                lower_env,
                upper_env,
                ratio_lower: f_nn as f64 / lower_env,
                ratio_upper: f_nn as f64 / upper_env,
            })
        })
        .collect()
}
