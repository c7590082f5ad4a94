//! Independent solution counters for the degree-bounded polynomial systems.
//!
//! The system has unknowns `Y_1..Y_q` of degree below `k` and an `n x q`
//! coefficient matrix of degree-at-most-1 entries `U_j^(i)`; a solution is
//! any assignment with `sum_i Y_i U_j^(i) = 0` for every row `j`.  Counting
//! solutions is what the scaled census moment predicts, so two oracles that
//! share nothing with the census provide the cross-check:
//!
//! * [`count_naive`] enumerates every assignment outright and tests the
//!   equations with carry-less multiplication;
//! * [`count_kernel`] enumerates only the coefficient matrices, writes the
//!   constraints on the `Y` coefficient bits as a GF(2) system, and adds
//!   `2^dim(kernel)` per matrix.
//!
//! Both refuse work beyond an explicit budget and report the cost estimate
//! that triggered the refusal.

use crate::formulas::CountValue;
use crate::gf2::{poly_mul, rank_in_place, Poly2};
use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

/// Default budget for the naive oracle: `2^22` assignments.
pub const NAIVE_BUDGET_LOG2: u32 = 22;
/// Default budget for the kernel oracle: `2^24` coefficient matrices.
pub const KERNEL_BUDGET_LOG2: u32 = 24;

/// What an oracle run would cost, in binary logarithm of the loop count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostEstimate {
    pub log2_assignments: u32,
    pub budget_log2: u32,
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("system sizes q={q}, n={n}, k={k} outside the supported range")]
    Domain { q: u32, n: usize, k: usize },
    #[error(
        "refusing {method} count for q={q}, n={n}, k={k}: 2^{} loop iterations exceed \
         the 2^{} budget",
        cost.log2_assignments,
        cost.budget_log2
    )]
    BudgetExceeded {
        method: &'static str,
        q: u32,
        n: usize,
        k: usize,
        cost: CostEstimate,
    },
}

fn check_domain(q: u32, n: usize, k: usize) -> Result<(), OracleError> {
    // qk is the GF(2) column count in the kernel formulation and the Y bit
    // count in the naive one; 64 is the packed-row ceiling.
    if q == 0
        || k == 0
        || k > crate::engine::MAX_K
        || n > crate::engine::MAX_N
        || q as usize * k > 64
    {
        return Err(OracleError::Domain { q, n, k });
    }
    Ok(())
}

/// Exhaustive enumeration of all `2^(qk + 2nq)` assignments.
pub fn count_naive(q: u32, n: usize, k: usize) -> Result<CountValue, OracleError> {
    count_naive_with_budget(q, n, k, NAIVE_BUDGET_LOG2)
}

pub fn count_naive_with_budget(
    q: u32,
    n: usize,
    k: usize,
    budget_log2: u32,
) -> Result<CountValue, OracleError> {
    check_domain(q, n, k)?;
    let y_bits = q as usize * k;
    let u_bits = 2 * n * q as usize;
    let log2_assignments = (y_bits + u_bits) as u32;
    if log2_assignments > budget_log2 {
        return Err(OracleError::BudgetExceeded {
            method: "naive",
            q,
            n,
            k,
            cost: CostEstimate {
                log2_assignments,
                budget_log2,
            },
        });
    }

    let kmask = (1u64 << k) - 1;
    let mut ys = vec![Poly2::ZERO; q as usize];
    let mut count: u64 = 0;
    for y_code in 0..1u64 << y_bits {
        for (i, y) in ys.iter_mut().enumerate() {
            *y = Poly2::from_bits((y_code >> (i * k)) & kmask);
        }
        'matrices: for u_code in 0..1u64 << u_bits {
            for j in 0..n {
                let mut acc = Poly2::ZERO;
                for (i, &y) in ys.iter().enumerate() {
                    let pair = (u_code >> (2 * (j * q as usize + i))) & 0b11;
                    acc += poly_mul(y, Poly2::from_bits(pair));
                }
                if !acc.is_zero() {
                    continue 'matrices;
                }
            }
            count += 1;
        }
    }
    // Setting every Y to zero satisfies the system for any coefficient
    // matrix, and the zero matrix accepts every Y.
    debug_assert!(count >= (1u64 << u_bits) + (1u64 << y_bits) - 1);
    Ok(CountValue::new(BigUint::from(count)))
}

/// Kernel-dimension count: `2^(2nq)` coefficient matrices, one GF(2) solve
/// each.
pub fn count_kernel(q: u32, n: usize, k: usize) -> Result<CountValue, OracleError> {
    count_kernel_with_budget(q, n, k, KERNEL_BUDGET_LOG2)
}

pub fn count_kernel_with_budget(
    q: u32,
    n: usize,
    k: usize,
    budget_log2: u32,
) -> Result<CountValue, OracleError> {
    check_domain(q, n, k)?;
    let qk = q as usize * k;
    let u_bits = 2 * n * q as usize;
    if u_bits as u32 > budget_log2 {
        return Err(OracleError::BudgetExceeded {
            method: "kernel",
            q,
            n,
            k,
            cost: CostEstimate {
                log2_assignments: u_bits as u32,
                budget_log2,
            },
        });
    }

    // The unknowns are the qk coefficient bits of the Y polynomials; column
    // i*k + e is the T^e coefficient of Y_i.  Each block row j of the system
    // contributes k + 1 parity constraints, one per output degree d: with
    // U_j^(i) = u0 + u1 T, the T^d coefficient of Y_i U_j^(i) picks up
    // c_(i,d) u0 and c_(i,d-1) u1.
    let rows_per_block = k + 1;
    let mut rows = vec![0u64; n * rows_per_block];
    // Kernel dimensions cannot exceed qk; histogram the solves so the big
    // integer arithmetic happens once at the end.
    let mut dim_hist = vec![0u64; qk + 1];
    for u_code in 0..1u64 << u_bits {
        rows.iter_mut().for_each(|r| *r = 0);
        for j in 0..n {
            for i in 0..q as usize {
                let pair = (u_code >> (2 * (j * q as usize + i))) & 0b11;
                let (u0, u1) = (pair & 1 == 1, pair & 2 == 2);
                for d in 0..rows_per_block {
                    let mut bits = 0u64;
                    if u0 && d < k {
                        bits |= 1 << (i * k + d);
                    }
                    if u1 && d >= 1 {
                        bits |= 1 << (i * k + d - 1);
                    }
                    rows[j * rows_per_block + d] |= bits;
                }
            }
        }
        let rank = rank_in_place(&mut rows);
        dim_hist[qk - rank] += 1;
    }

    let mut count = BigUint::zero();
    for (dim, &times) in dim_hist.iter().enumerate() {
        if times != 0 {
            count += BigUint::from(times) << dim;
        }
    }
    debug_assert!(count >= BigUint::from((1u128 << u_bits) + (1u128 << qk) - 1));
    Ok(CountValue::new(count))
}
