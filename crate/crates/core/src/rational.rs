//! Exact rational linear algebra: dense matrices over `Q`, Gaussian
//! elimination with certificates, and polynomials with rational coefficients.
//!
//! The polynomials here are always polynomials in `Y = 2^n`: rank counts and
//! their closed forms live in `Z[Y]` or `Q[Y]`, and the fitting code needs to
//! manipulate them exactly.  `BigRational` keeps every intermediate value
//! exact; none of this is performance sensitive.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// `BigRational` from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `BigRational` from a ratio of integers.
pub fn rat_frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^e` as an exact rational, `e` possibly negative.
pub fn pow2(e: i64) -> BigRational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// `2^e` as a big integer.
pub fn pow2_int(e: u64) -> BigInt {
    BigInt::one() << e
}

/// Polynomial with rational coefficients, stored dense by exponent.
///
/// The coefficient vector never has a trailing zero, so two equal polynomials
/// compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    /// From coefficients indexed by exponent, lowest first.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    /// Convenience constructor from `(exponent, integer coefficient)` pairs.
    pub fn from_int_terms(terms: &[(usize, i64)]) -> Self {
        let deg = terms.iter().map(|&(e, _)| e).max().unwrap_or(0);
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for &(e, c) in terms {
            coeffs[e] += rat(c);
        }
        RatPoly::from_coeffs(coeffs)
    }

    /// The monomial `c * Y^e`.
    pub fn monomial(e: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); e + 1];
        coeffs[e] = c;
        RatPoly::from_coeffs(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `Y^e` (zero when `e` exceeds the degree).
    pub fn coeff(&self, e: usize) -> BigRational {
        self.coeffs
            .get(e)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Coefficients indexed by exponent, lowest first.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|e| self.coeff(e) + other.coeff(e)).collect();
        RatPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|e| self.coeff(e) - other.coeff(e)).collect();
        RatPoly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Horner evaluation at a rational point.
    pub fn eval(&self, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    /// Evaluation at an integer point.
    pub fn eval_int(&self, y: &BigInt) -> BigRational {
        self.eval(&BigRational::from_integer(y.clone()))
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag}*")?,
            }
            match e {
                0 => {}
                1 => write!(f, "Y")?,
                _ => write!(f, "Y^{e}")?,
            }
        }
        Ok(())
    }
}

/// Dense matrix over `Q`, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<BigRational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RationalMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c) * &x[c])
                    .sum::<BigRational>()
            })
            .collect()
    }

    /// Vector-matrix product `y^T A`.
    pub fn mul_vec_left(&self, y: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(y.len(), self.rows);
        (0..self.cols)
            .map(|c| {
                (0..self.rows)
                    .map(|r| &y[r] * self.get(r, c))
                    .sum::<BigRational>()
            })
            .collect()
    }
}

/// Proof that a linear system `A x = b` has no solution: a row combination
/// `y` with `y^T A = 0` but `y^T b != 0`.
#[derive(Clone, Debug)]
pub struct InconsistencyCertificate {
    pub multipliers: Vec<BigRational>,
    /// The nonzero value of `y^T b`.
    pub violation: BigRational,
}

impl InconsistencyCertificate {
    /// Re-checks the certificate against the original system.
    pub fn verify(&self, a: &RationalMatrix, b: &[BigRational]) -> bool {
        let lhs = a.mul_vec_left(&self.multipliers);
        let combo: BigRational = self.multipliers.iter().zip(b).map(|(y, bi)| y * bi).sum();
        lhs.iter().all(Zero::is_zero) && !combo.is_zero() && combo == self.violation
    }
}

/// What `solve_exact` concluded about `A x = b`.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    /// Exactly one solution.
    Unique(Vec<BigRational>),
    /// Solvable with residual freedom; the particular solution sets every
    /// free column to zero.
    Underdetermined {
        particular: Vec<BigRational>,
        free_cols: Vec<usize>,
    },
    /// No solution, with a checkable witness.
    Inconsistent(InconsistencyCertificate),
}

/// Outcome of an exact solve together with the shape and rank of the system.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

impl SolveResult {
    pub fn is_unique(&self) -> bool {
        matches!(self.outcome, SolveOutcome::Unique(_))
    }

    /// The solution vector for a solvable system, unique or not.
    pub fn solution(&self) -> Option<&[BigRational]> {
        match &self.outcome {
            SolveOutcome::Unique(x) => Some(x),
            SolveOutcome::Underdetermined { particular, .. } => Some(particular),
            SolveOutcome::Inconsistent(_) => None,
        }
    }
}

/// Exact Gaussian elimination on `A x = b`.
///
/// Eliminates on an augmented tableau `[A | b | I]`; the identity block
/// accumulates the row operations, so when a row of the `A` block vanishes
/// while its `b` entry does not, that row of the (transformed) identity block
/// is already the inconsistency witness.  Solutions are re-substituted into
/// the original system before being returned.
pub fn solve_exact(a: &RationalMatrix, b: &[BigRational]) -> SolveResult {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m, "right-hand side length mismatch");

    // Tableau columns: 0..n is A, n is b, n + 1.. is the multiplier block.
    let width = n + 1 + m;
    let mut t = RationalMatrix::zero(m, width);
    for (r, rhs) in b.iter().enumerate() {
        for c in 0..n {
            t.set(r, c, a.get(r, c).clone());
        }
        t.set(r, n, rhs.clone());
        t.set(r, n + 1 + r, BigRational::one());
    }

    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(pr) = (rank..m).find(|&r| !t.get(r, col).is_zero()) else {
            continue;
        };
        for c in 0..width {
            let tmp = t.get(rank, c).clone();
            t.set(rank, c, t.get(pr, c).clone());
            t.set(pr, c, tmp);
        }
        let inv = t.get(rank, col).clone();
        for c in 0..width {
            let v = t.get(rank, c) / &inv;
            t.set(rank, c, v);
        }
        for r in 0..m {
            if r == rank || t.get(r, col).is_zero() {
                continue;
            }
            let factor = t.get(r, col).clone();
            for c in 0..width {
                let v = t.get(r, c) - &factor * t.get(rank, c);
                t.set(r, c, v);
            }
        }
        pivot_col_of_row.push(col);
        rank += 1;
    }

    // Any surviving row with a nonzero b entry certifies inconsistency.
    for r in rank..m {
        let violation = t.get(r, n).clone();
        if !violation.is_zero() {
            let multipliers: Vec<BigRational> =
                (0..m).map(|c| t.get(r, n + 1 + c).clone()).collect();
            let cert = InconsistencyCertificate {
                multipliers,
                violation,
            };
            debug_assert!(cert.verify(a, b));
            return SolveResult {
                outcome: SolveOutcome::Inconsistent(cert),
                rows: m,
                cols: n,
                rank,
            };
        }
    }

    let mut x = vec![BigRational::zero(); n];
    for (row, &col) in pivot_col_of_row.iter().enumerate() {
        x[col] = t.get(row, n).clone();
    }
    debug_assert_eq!(a.mul_vec(&x), b, "solution fails residual check");

    let outcome = if rank == n {
        SolveOutcome::Unique(x)
    } else {
        let free_cols = (0..n).filter(|c| !pivot_col_of_row.contains(c)).collect();
        SolveOutcome::Underdetermined {
            particular: x,
            free_cols,
        }
    };
    SolveResult {
        outcome,
        rows: m,
        cols: n,
        rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(ints: &[i64]) -> Vec<BigRational> {
        ints.iter().map(|&n| rat(n)).collect()
    }

    #[test]
    fn pow2_handles_negative_exponents() {
        assert_eq!(pow2(3), rat(8));
        assert_eq!(pow2(0), rat(1));
        assert_eq!(pow2(-2), rat_frac(1, 4));
    }

    #[test]
    fn poly_normalizes_trailing_zeros() {
        let p = RatPoly::from_coeffs(v(&[1, 0, 0]));
        assert_eq!(p.degree(), Some(0));
        assert_eq!(RatPoly::from_coeffs(v(&[0, 0])), RatPoly::zero());
        assert_eq!(RatPoly::zero().degree(), None);
    }

    #[test]
    fn poly_arith_and_eval() {
        // (Y - 1)(Y - 2) = Y^2 - 3Y + 2
        let a = RatPoly::from_int_terms(&[(1, 1), (0, -1)]);
        let b = RatPoly::from_int_terms(&[(1, 1), (0, -2)]);
        let p = a.mul(&b);
        assert_eq!(p, RatPoly::from_int_terms(&[(2, 1), (1, -3), (0, 2)]));
        assert_eq!(p.eval(&rat(1)), rat(0));
        assert_eq!(p.eval(&rat(4)), rat(6));
        assert_eq!(p.sub(&p), RatPoly::zero());
        assert_eq!(p.coeff(7), rat(0));
    }

    #[test]
    fn poly_display_reads_naturally() {
        let p = RatPoly::from_int_terms(&[(2, 7), (1, -1), (0, 3)]);
        assert_eq!(p.to_string(), "7*Y^2 - Y + 3");
        assert_eq!(RatPoly::zero().to_string(), "0");
    }

    #[test]
    fn solve_unique_system() {
        let a = RationalMatrix::from_rows(&[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        let res = solve_exact(&a, &v(&[1, 2, 3]));
        assert_eq!(res.rank, 3);
        match res.outcome {
            SolveOutcome::Unique(x) => assert_eq!(x, v(&[1, 2, 3])),
            other => panic!("expected unique solution, got {other:?}"),
        }
    }

    #[test]
    fn solve_inconsistent_yields_verifiable_certificate() {
        // x = 0 and x = 1 cannot both hold.
        let a = RationalMatrix::from_rows(&[v(&[1]), v(&[1])]);
        let b = v(&[0, 1]);
        let res = solve_exact(&a, &b);
        assert_eq!(res.rank, 1);
        match res.outcome {
            SolveOutcome::Inconsistent(cert) => {
                assert!(cert.verify(&a, &b));
                assert!(!cert.violation.is_zero());
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn solve_underdetermined_reports_free_columns() {
        // One equation, two unknowns: x + y = 5.
        let a = RationalMatrix::from_rows(&[v(&[1, 1])]);
        let b = v(&[5]);
        let res = solve_exact(&a, &b);
        assert_eq!(res.rank, 1);
        match res.outcome {
            SolveOutcome::Underdetermined {
                particular,
                free_cols,
            } => {
                assert_eq!(free_cols, vec![1]);
                assert_eq!(a.mul_vec(&particular), b);
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn certificate_rejects_wrong_system() {
        let a = RationalMatrix::from_rows(&[v(&[1]), v(&[1])]);
        let res = solve_exact(&a, &v(&[0, 1]));
        let SolveOutcome::Inconsistent(cert) = res.outcome else {
            panic!("expected inconsistency");
        };
        // Same matrix, consistent right-hand side: the witness must fail.
        assert!(!cert.verify(&a, &v(&[1, 1])));
    }

    proptest! {
        /// Systems built as A * x0 = b are always solvable and the returned
        /// solution satisfies the original equations exactly.
        #[test]
        fn constructed_systems_solve_exactly(
            entries in proptest::collection::vec(-9i64..10, 12),
            x0 in proptest::collection::vec(-9i64..10, 3),
        ) {
            let rows: Vec<Vec<BigRational>> = entries.chunks(3).map(v).collect();
            let a = RationalMatrix::from_rows(&rows);
            let b = a.mul_vec(&v(&x0));
            let res = solve_exact(&a, &b);
            let x = res.solution().expect("constructed system must be solvable");
            prop_assert_eq!(a.mul_vec(x), b);
        }
    }
}
