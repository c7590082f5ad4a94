//! Exhaustive rank census over the parameter space of stacked persymmetric
//! matrices.
//!
//! A parameter tuple for sizes `(n, k)` is `n` words of `k + 1` bits each.
//! Word `i` produces block `i` of the matrix: the low `k` bits form row
//! `2i`, and the same word shifted right once forms row `2i + 1`.  Rows are
//! therefore two overlapping windows of a shared bit string, which is where
//! the persymmetry comes from.
//!
//! The census walks a contiguous range of tuple indices, ranks each matrix
//! with [`rank_in_place`], and tallies the histogram.  Sharding splits the
//! index range `[0, 2^(n(k+1)))` into `S` contiguous pieces by floor
//! division; shards are independent, carry their own histogram, and merge by
//! plain addition, so they can run in any order or in parallel processes.

use crate::gf2::rank_in_place;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest block count the census accepts.
pub const MAX_N: usize = 8;
/// Largest column count the census accepts.
pub const MAX_K: usize = 16;
/// Default per-invocation budget: refuse to scan more than `2^32` tuples.
pub const DEFAULT_BUDGET_LOG2: u32 = 32;
/// Largest accepted budget exponent.  Above this the shard loop counters
/// would no longer fit comfortably in `u64`.
pub const MAX_BUDGET_LOG2: u32 = 62;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("sizes n={n}, k={k} outside the supported range (n <= {MAX_N}, 1 <= k <= {MAX_K})")]
    Domain { n: usize, k: usize },
    #[error("parameter tuple has {got} bits, sizes n={n}, k={k} need exactly {expected}")]
    TupleLength {
        n: usize,
        k: usize,
        got: usize,
        expected: usize,
    },
    #[error("tuple index {index} is outside the {bits}-bit parameter space")]
    TupleIndex { index: u128, bits: usize },
    #[error("parameter space needs {bits} bits per tuple, more than the 128 supported")]
    SpaceTooLarge { bits: usize },
    #[error("shard index {index} invalid for shard count {count}")]
    Shard { index: u64, count: u64 },
    #[error("budget exponent {log2} too large, the maximum is {MAX_BUDGET_LOG2}")]
    Budget { log2: u32 },
    #[error(
        "refusing census shard for n={n}, k={k}: {tuples} tuples exceed the budget of {budget} \
         (raise the budget or split into more shards)"
    )]
    BudgetExceeded {
        n: usize,
        k: usize,
        tuples: BigUint,
        budget: BigUint,
    },
    #[error("cannot merge distributions for (n={a_n}, k={a_k}) and (n={b_n}, k={b_k})")]
    MergeMismatch {
        a_n: usize,
        a_k: usize,
        b_n: usize,
        b_k: usize,
    },
}

fn check_domain(n: usize, k: usize) -> Result<(), EngineError> {
    if n > MAX_N || k == 0 || k > MAX_K {
        return Err(EngineError::Domain { n, k });
    }
    Ok(())
}

/// Bit width of one parameter tuple for sizes `(n, k)`.
pub fn tuple_bits(n: usize, k: usize) -> usize {
    n * (k + 1)
}

/// Number of parameter tuples for sizes `(n, k)`, i.e. `2^(n(k+1))`.
pub fn total_space(n: usize, k: usize) -> BigUint {
    BigUint::one() << tuple_bits(n, k)
}

/// One point of the parameter space, identified by its canonical integer
/// index.  Bit `i(k+1) + j` of the index is bit `j` of block word `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParameterTuple {
    n: usize,
    k: usize,
    index: u128,
}

impl ParameterTuple {
    /// Tuple from its canonical index.
    pub fn new(n: usize, k: usize, index: u128) -> Result<Self, EngineError> {
        check_domain(n, k)?;
        let bits = tuple_bits(n, k);
        if bits > 128 {
            return Err(EngineError::SpaceTooLarge { bits });
        }
        if bits < 128 && index >> bits != 0 {
            return Err(EngineError::TupleIndex { index, bits });
        }
        Ok(ParameterTuple { n, k, index })
    }

    /// Tuple from individual parameter bits, lowest index first.
    pub fn from_bits(n: usize, k: usize, bits: &[bool]) -> Result<Self, EngineError> {
        check_domain(n, k)?;
        let expected = tuple_bits(n, k);
        if bits.len() != expected {
            return Err(EngineError::TupleLength {
                n,
                k,
                got: bits.len(),
                expected,
            });
        }
        if expected > 128 {
            return Err(EngineError::SpaceTooLarge { bits: expected });
        }
        let mut index = 0u128;
        for (pos, &b) in bits.iter().enumerate() {
            if b {
                index |= 1 << pos;
            }
        }
        Ok(ParameterTuple { n, k, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Canonical integer index of this tuple.
    pub fn index(&self) -> u128 {
        self.index
    }

    /// The `(k+1)`-bit parameter word of block `i`.
    pub fn block_word(&self, i: usize) -> u64 {
        assert!(i < self.n);
        let width = self.k + 1;
        ((self.index >> (i * width)) as u64) & ((1u64 << width) - 1)
    }

    /// The `2n x k` matrix this tuple parameterizes.
    pub fn matrix(&self) -> crate::gf2::BitMatrix {
        let kmask = (1u64 << self.k) - 1;
        let mut rows = Vec::with_capacity(2 * self.n);
        for i in 0..self.n {
            let w = self.block_word(i);
            rows.push(w & kmask);
            rows.push((w >> 1) & kmask);
        }
        crate::gf2::BitMatrix::from_rows(self.k, &rows)
    }

    /// Rank of the parameterized matrix.
    pub fn rank(&self) -> usize {
        let kmask = (1u64 << self.k) - 1;
        let mut rows = [0u64; 2 * MAX_N];
        for i in 0..self.n {
            let w = self.block_word(i);
            rows[2 * i] = w & kmask;
            rows[2 * i + 1] = (w >> 1) & kmask;
        }
        rank_in_place(&mut rows[..2 * self.n])
    }
}

/// Character-sum term attached to one tuple: `2^(2n + k - rank)`.
///
/// Summed over the whole parameter space this equals `2^(n(k+1))` times the
/// average solution count of the rank-one linear problem, which is what ties
/// the census histogram to solution counting.
pub fn exp_sum_value(t: &ParameterTuple) -> BigUint {
    BigUint::one() << (2 * t.n() + t.k() - t.rank())
}

/// Exact rank histogram of (part of) a parameter space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDistribution {
    pub n: usize,
    pub k: usize,
    /// `gamma[i]` counts tuples whose matrix has rank `i`; the histogram
    /// always has `min(2n, k) + 1` entries.
    pub gamma: Vec<BigUint>,
    /// How many tuples this histogram covers.  Equals the full space size
    /// exactly when the distribution is complete.
    pub tuples_scanned: BigUint,
}

impl RankDistribution {
    /// Empty histogram for sizes `(n, k)`.
    pub fn empty(n: usize, k: usize) -> Result<Self, EngineError> {
        check_domain(n, k)?;
        Ok(RankDistribution {
            n,
            k,
            gamma: vec![BigUint::zero(); (2 * n).min(k) + 1],
            tuples_scanned: BigUint::zero(),
        })
    }

    /// Highest possible rank, `min(2n, k)`.
    pub fn max_rank(&self) -> usize {
        (2 * self.n).min(self.k)
    }

    /// Whether every tuple of the space has been tallied.
    pub fn is_complete(&self) -> bool {
        self.tuples_scanned == total_space(self.n, self.k)
    }

    /// Sum of all histogram entries.
    pub fn total(&self) -> BigUint {
        self.gamma.iter().sum()
    }

    /// Adds another shard's counts into this one.  Shards must come from the
    /// same `(n, k)` space and, for the result to mean anything, from
    /// disjoint index ranges; the canonical splitter guarantees that.
    pub fn merge(&mut self, other: &RankDistribution) -> Result<(), EngineError> {
        if self.n != other.n || self.k != other.k {
            return Err(EngineError::MergeMismatch {
                a_n: self.n,
                a_k: self.k,
                b_n: other.n,
                b_k: other.k,
            });
        }
        for (a, b) in self.gamma.iter_mut().zip(&other.gamma) {
            *a += b;
        }
        self.tuples_scanned += &other.tuples_scanned;
        Ok(())
    }
}

/// Index range `[start, end)` of shard `index` out of `count`, splitting the
/// `(n, k)` space contiguously by floor division.
pub fn shard_range(
    n: usize,
    k: usize,
    count: u64,
    index: u64,
) -> Result<(BigUint, BigUint), EngineError> {
    check_domain(n, k)?;
    if count == 0 || index >= count {
        return Err(EngineError::Shard { index, count });
    }
    let total = total_space(n, k);
    let start = &total * index / count;
    let end = total * (index + 1) / count;
    Ok((start, end))
}

/// Census of one shard under the default budget.
pub fn census(
    n: usize,
    k: usize,
    shard_count: u64,
    shard_index: u64,
) -> Result<RankDistribution, EngineError> {
    census_with_budget(n, k, shard_count, shard_index, DEFAULT_BUDGET_LOG2)
}

/// Census of the whole space in a single shard.
pub fn full_census(n: usize, k: usize) -> Result<RankDistribution, EngineError> {
    census(n, k, 1, 0)
}

/// Census of one shard, refusing if it would scan more than `2^budget_log2`
/// tuples.
pub fn census_with_budget(
    n: usize,
    k: usize,
    shard_count: u64,
    shard_index: u64,
    budget_log2: u32,
) -> Result<RankDistribution, EngineError> {
    if budget_log2 > MAX_BUDGET_LOG2 {
        return Err(EngineError::Budget { log2: budget_log2 });
    }
    let (start, end) = shard_range(n, k, shard_count, shard_index)?;
    let width = &end - &start;
    let budget = BigUint::one() << budget_log2;
    if width > budget {
        return Err(EngineError::BudgetExceeded {
            n,
            k,
            tuples: width,
            budget,
        });
    }
    if tuple_bits(n, k) > 128 {
        // Unreachable under any sane budget, but the conversions below need it.
        return Err(EngineError::SpaceTooLarge {
            bits: tuple_bits(n, k),
        });
    }

    let width = width.to_u64().expect("width fits after budget check");
    let mut hist = [0u64; 2 * MAX_N + 1];
    if n == 0 {
        // The empty matrix has rank zero; the space has exactly one tuple.
        hist[0] = width;
    } else if let (Some(s), Some(e)) = (start.to_u64(), end.to_u64()) {
        scan_u64(n, k, s, e, &mut hist);
    } else {
        let s = start.to_u128().expect("start fits in 128 bits");
        scan_u128(n, k, s, width, &mut hist);
    }

    let mut dist = RankDistribution::empty(n, k)?;
    let max_rank = dist.max_rank();
    debug_assert!(hist[max_rank + 1..].iter().all(|&c| c == 0));
    for (i, slot) in dist.gamma.iter_mut().enumerate() {
        *slot = BigUint::from(hist[i]);
    }
    dist.tuples_scanned = BigUint::from(width);
    Ok(dist)
}

/// Runs every shard in sequence and merges.  Useful for exercising the shard
/// split without spawning processes; the result must match a single-shard
/// census bit for bit.
pub fn census_all_shards(
    n: usize,
    k: usize,
    shard_count: u64,
    budget_log2: u32,
) -> Result<RankDistribution, EngineError> {
    let mut acc = RankDistribution::empty(n, k)?;
    for index in 0..shard_count {
        let shard = census_with_budget(n, k, shard_count, index, budget_log2)?;
        acc.merge(&shard)?;
    }
    Ok(acc)
}

/// Hot loop for spaces that fit in 64-bit indices, which is every size the
/// default budget admits.  Keeping the index in one register matters here:
/// this runs up to a few billion times per invocation.
fn scan_u64(n: usize, k: usize, start: u64, end: u64, hist: &mut [u64; 2 * MAX_N + 1]) {
    let kmask = (1u64 << k) - 1;
    let block_bits = k + 1;
    let mut rows = [0u64; 2 * MAX_N];
    for idx in start..end {
        let mut bits = idx;
        for i in 0..n {
            rows[2 * i] = bits & kmask;
            rows[2 * i + 1] = (bits >> 1) & kmask;
            bits >>= block_bits;
        }
        let r = rank_in_place(&mut rows[..2 * n]);
        hist[r] += 1;
    }
}

/// Fallback for shard ranges that start beyond `2^64`.
fn scan_u128(n: usize, k: usize, start: u128, width: u64, hist: &mut [u64; 2 * MAX_N + 1]) {
    let kmask = (1u64 << k) - 1;
    let block_bits = k + 1;
    let mut rows = [0u64; 2 * MAX_N];
    for off in 0..width {
        let mut bits = start + off as u128;
        for i in 0..n {
            rows[2 * i] = bits as u64 & kmask;
            rows[2 * i + 1] = (bits >> 1) as u64 & kmask;
            bits >>= block_bits;
        }
        let r = rank_in_place(&mut rows[..2 * n]);
        hist[r] += 1;
    }
}
