//! Shared inputs for the benchmark targets.

/// Diagonal instance sizes the solver benchmarks sweep.
pub const DIAGONAL_SIZES: [u64; 3] = [32, 64, 128];

/// A moderately adversarial residue for growth benchmarks: the worst
/// m for n = 6 found by exhaustive scan.
pub const HARD_SMALL: (u64, u64) = (6, 25);
