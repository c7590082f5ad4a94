//! Recovering rank polynomials from first principles.
//!
//! Three routes are implemented, mirroring how the closed forms were
//! originally derived:
//!
//! * [`fit_rank_polynomial`] interpolates a polynomial in `Y = 2^n` through
//!   census (or closed-form) samples, optionally dividing out forced roots
//!   first and fixing the leading coefficient;
//! * [`solve_moment_system`] determines the three unknown top rows of the
//!   `k = 9` histogram from the moment identities alone;
//! * [`rank6_quotient_system`] rebuilds the little 3x3 system that pins the
//!   cubic cofactor of the rank-6 polynomial.
//!
//! Each route ends in [`solve_exact`], so underdetermined and inconsistent
//! inputs surface as explicit outcomes instead of bogus fits.

use crate::formulas::{gamma6_fixed_n, gamma_poly, FormulaError};
use crate::rational::{
    pow2, rat, solve_exact, InconsistencyCertificate, RatPoly, RationalMatrix, SolveOutcome,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("degree bound {degree} cannot absorb {roots} forced roots")]
    DegreeBelowRoots { degree: usize, roots: usize },
}

/// Why a fit is impossible.
#[derive(Clone, Debug)]
pub enum FitConflict {
    /// A sample sits at a forced root but its value is nonzero.
    RootClash { n: usize, value: BigUint },
    /// The interpolation constraints contradict each other.
    System(InconsistencyCertificate),
}

#[derive(Clone, Debug)]
pub enum FitOutcome {
    Fitted(RatPoly),
    /// Not enough independent samples; the solution space has this many
    /// free directions.
    Underdetermined {
        free_dim: usize,
    },
    Inconsistent(FitConflict),
}

/// Interpolates a polynomial of the given degree through `(n, value)`
/// samples, where the variable is `Y = 2^n`.
///
/// `forced_roots` lists Y-values where the polynomial must vanish; the
/// corresponding linear factors are divided out before interpolation, which
/// is what makes small-sample fits determined.  Samples that sit exactly on
/// a forced root contribute no equation (their value must be zero, which is
/// checked).  `leading` optionally pins the top coefficient of the quotient,
/// i.e. of the full polynomial.
pub fn fit_rank_polynomial(
    samples: &[(usize, BigUint)],
    degree: usize,
    forced_roots: &[i64],
    leading: Option<BigRational>,
) -> Result<FitOutcome, FitError> {
    if degree < forced_roots.len() {
        return Err(FitError::DegreeBelowRoots {
            degree,
            roots: forced_roots.len(),
        });
    }
    let mut z = RatPoly::from_int_terms(&[(0, 1)]);
    for &r in forced_roots {
        z = z.mul(&RatPoly::from_int_terms(&[(1, 1), (0, -r)]));
    }
    let q_degree = degree - forced_roots.len();
    let unknowns = if leading.is_some() {
        q_degree
    } else {
        q_degree + 1
    };

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (n, value) in samples {
        let x = pow2(*n as i64);
        let zx = z.eval(&x);
        let v = BigRational::from_integer(value.clone().into());
        if zx.is_zero() {
            if !v.is_zero() {
                return Ok(FitOutcome::Inconsistent(FitConflict::RootClash {
                    n: *n,
                    value: value.clone(),
                }));
            }
            continue;
        }
        let mut b = v / &zx;
        if let Some(c) = &leading {
            let mut top = BigRational::one();
            for _ in 0..q_degree {
                top *= &x;
            }
            b -= c * top;
        }
        let mut row = Vec::with_capacity(unknowns);
        let mut p = BigRational::one();
        for _ in 0..unknowns {
            row.push(p.clone());
            p *= &x;
        }
        rows.push(row);
        rhs.push(b);
    }

    let a = if rows.is_empty() {
        RationalMatrix::zero(0, unknowns)
    } else {
        RationalMatrix::from_rows(&rows)
    };
    let res = solve_exact(&a, &rhs);
    match res.outcome {
        SolveOutcome::Unique(coeffs) => {
            let mut q_coeffs = coeffs;
            if let Some(c) = leading {
                q_coeffs.push(c);
            }
            let q = RatPoly::from_coeffs(q_coeffs);
            let p = z.mul(&q);
            for (n, value) in samples {
                let got = p.eval(&pow2(*n as i64));
                assert_eq!(
                    got,
                    BigRational::from_integer(value.clone().into()),
                    "fitted polynomial fails its own sample at n={n}"
                );
            }
            Ok(FitOutcome::Fitted(p))
        }
        SolveOutcome::Underdetermined { free_cols, .. } => Ok(FitOutcome::Underdetermined {
            free_dim: free_cols.len(),
        }),
        SolveOutcome::Inconsistent(cert) => Ok(FitOutcome::Inconsistent(FitConflict::System(cert))),
    }
}

#[derive(Debug, Error)]
pub enum MomentSystemError {
    #[error("moment constraints are mutually inconsistent")]
    Inconsistent(InconsistencyCertificate),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// The `k = 9` histogram rows recovered from the moment identities.
#[derive(Clone, Debug)]
pub struct MomentSystemSolution {
    /// Solved coefficients, keyed by `(rank index, Y exponent)`.
    pub coefficients: BTreeMap<(usize, usize), BigRational>,
    /// All ten rows with the solved coefficients substituted in.
    pub polynomials: Vec<RatPoly>,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub unique: bool,
    /// Unknowns left free when the system is not of full rank.
    pub free: Vec<(usize, usize)>,
}

/// Solves for the rank 7, 8 and 9 rows of the `k = 9` histogram.
///
/// Rows up to rank 6 and the leading terms `255 Y^7`, `511 Y^8`, `Y^10` are
/// taken as known; the remaining 24 coefficients must satisfy the plain,
/// `2^(9-i)`-weighted and `2^(18-2i)`-weighted row sums, each of which is a
/// polynomial identity in `Y` and so contributes one equation per exponent.
/// The system is expected to be uniquely solvable; if it ever is not, the
/// result says so instead of pretending.
pub fn solve_moment_system() -> Result<MomentSystemSolution, MomentSystemError> {
    let mut known = Vec::with_capacity(10);
    for j in 0..=6usize {
        known.push(gamma_poly(j, 9)?);
    }
    known.push(RatPoly::monomial(7, rat(255)));
    known.push(RatPoly::monomial(8, rat(511)));
    known.push(RatPoly::monomial(10, rat(1)));

    let mut unknowns = Vec::new();
    for j in 7..=9usize {
        for e in 0..=(j - 1) {
            unknowns.push((j, e));
        }
    }

    // (weight per rank, right-hand side) for the three identities.
    type RankWeight = Box<dyn Fn(usize) -> BigRational>;
    let identities: [(RankWeight, RatPoly); 3] = [
        (
            Box::new(|_| BigRational::one()),
            RatPoly::from_int_terms(&[(10, 1)]),
        ),
        (
            Box::new(|j| pow2(9 - j as i64)),
            RatPoly::from_int_terms(&[(10, 1), (8, 511)]),
        ),
        (
            Box::new(|j| pow2(18 - 2 * j as i64)),
            RatPoly::from_int_terms(&[(10, 1), (8, 1533), (7, 1530), (6, 259080)]),
        ),
    ];

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (weight, target) in &identities {
        for e in 0..=10usize {
            let mut row = vec![BigRational::zero(); unknowns.len()];
            for (col, &(j, ue)) in unknowns.iter().enumerate() {
                if ue == e {
                    row[col] = weight(j);
                }
            }
            let known_part: BigRational = (0..10).map(|j| weight(j) * known[j].coeff(e)).sum();
            rows.push(row);
            rhs.push(target.coeff(e) - known_part);
        }
    }

    let a = RationalMatrix::from_rows(&rows);
    let res = solve_exact(&a, &rhs);
    let (solution, unique, free) = match res.outcome {
        SolveOutcome::Unique(x) => (x, true, Vec::new()),
        SolveOutcome::Underdetermined {
            particular,
            free_cols,
        } => {
            let free = free_cols.iter().map(|&c| unknowns[c]).collect();
            (particular, false, free)
        }
        SolveOutcome::Inconsistent(cert) => return Err(MomentSystemError::Inconsistent(cert)),
    };

    let mut coefficients = BTreeMap::new();
    let mut polynomials = known;
    for (&(j, e), v) in unknowns.iter().zip(&solution) {
        coefficients.insert((j, e), v.clone());
        polynomials[j] = polynomials[j].add(&RatPoly::monomial(e, v.clone()));
    }
    Ok(MomentSystemSolution {
        coefficients,
        polynomials,
        rows: res.rows,
        cols: res.cols,
        rank: res.rank,
        unique,
        free,
    })
}

/// The 3x3 system for the cubic cofactor of the rank-6 polynomial.
///
/// Since the rank-6 count vanishes for fewer than three blocks, the
/// polynomial factors as `(Y-1)(Y-2)(Y-4)` times a cubic with leading
/// coefficient 127.  Dividing the fixed-n values for `n = 3, 4, 5` by the
/// factor product and moving the leading term across leaves one linear
/// equation per `n` in the three remaining cofactor coefficients.
pub fn rank6_quotient_system(k: usize) -> Result<(RationalMatrix, Vec<BigRational>), FormulaError> {
    if k < 7 {
        // Below k = 7 the rank-6 polynomial does not have this shape.
        return Err(FormulaError::Uncovered { i: 6, k });
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for n in 3..=5usize {
        let y = pow2(n as i64);
        rows.push(vec![&y * &y, y.clone(), BigRational::one()]);
        let divisor = (&y - rat(1)) * (&y - rat(2)) * (&y - rat(4));
        let value = BigRational::from_integer(gamma6_fixed_n(n, k)?.get().clone().into());
        rhs.push(value / divisor - rat(127) * &y * &y * &y);
    }
    Ok((RationalMatrix::from_rows(&rows), rhs))
}

/// Solves the cofactor system; the closed forms in the tables must agree.
pub fn rank6_quotient_solve(k: usize) -> Result<[BigRational; 3], FormulaError> {
    let (a, b) = rank6_quotient_system(k)?;
    let res = solve_exact(&a, &b);
    match res.outcome {
        SolveOutcome::Unique(x) => {
            let [q2, q1, q0]: [BigRational; 3] = x.try_into().expect("three unknowns");
            Ok([q2, q1, q0])
        }
        // The Vandermonde-like matrix is fixed and invertible, so this
        // cannot happen for any k the domain check admits.
        other => unreachable!("cofactor system degenerate: {other:?}"),
    }
}

/// The tabulated closed forms of the cofactor coefficients.
pub fn rank6_quotient_closed(k: usize) -> Result<[BigRational; 3], FormulaError> {
    if k < 7 {
        return Err(FormulaError::Uncovered { i: 6, k });
    }
    let [q2, q1, q0] = crate::formulas::RANK6_QUOTIENT;
    Ok([
        crate::formulas::eval_kcoeff(q2, k),
        crate::formulas::eval_kcoeff(q1, k),
        crate::formulas::eval_kcoeff(q0, k),
    ])
}

/// Rebuilds the full rank-6 polynomial from the solved cofactor.
pub fn rank6_poly_from_quotient(k: usize) -> Result<RatPoly, FormulaError> {
    let [q2, q1, q0] = rank6_quotient_solve(k)?;
    let cubic = RatPoly::from_coeffs(vec![q0, q1, q2, rat(127)]);
    let mut z = RatPoly::from_int_terms(&[(0, 1)]);
    for r in [1, 2, 4] {
        z = z.mul(&RatPoly::from_int_terms(&[(1, 1), (0, -r)]));
    }
    Ok(z.mul(&cubic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::full_census;
    use crate::formulas::gamma_closed;
    use num_traits::ToPrimitive;

    fn census_samples(k: usize, max_n: usize, i: usize) -> Vec<(usize, BigUint)> {
        (0..=max_n)
            .map(|n| {
                let dist = full_census(n, k).unwrap();
                let v = dist.gamma.get(i).cloned().unwrap_or_default();
                (n, v)
            })
            .collect()
    }

    #[test]
    fn plain_interpolation_recovers_linear_row() {
        let samples = census_samples(3, 1, 1);
        let out = fit_rank_polynomial(&samples, 1, &[], None).unwrap();
        match out {
            FitOutcome::Fitted(p) => {
                assert_eq!(p, RatPoly::from_int_terms(&[(1, 3), (0, -3)]));
            }
            other => panic!("expected fit, got {other:?}"),
        }
    }

    #[test]
    fn forced_root_fit_recovers_cubic_row() {
        // Rank-2 row at k = 2 from censuses up to n = 3, with the n = 0 root
        // divided out.
        let samples = census_samples(2, 3, 2);
        let out = fit_rank_polynomial(&samples, 3, &[1], None).unwrap();
        match out {
            FitOutcome::Fitted(p) => {
                assert_eq!(p, RatPoly::from_int_terms(&[(3, 1), (1, -3), (0, 2)]));
            }
            other => panic!("expected fit, got {other:?}"),
        }
    }

    #[test]
    fn sample_poor_sextic_fit_is_underdetermined() {
        // Rank-6 values vanish for n <= 2, so samples up to n = 3 pin only
        // one of the four cofactor coefficients.
        let samples: Vec<(usize, BigUint)> = (0..=3)
            .map(|n| (n, gamma_closed(6, n, 7).unwrap().into_inner()))
            .collect();
        let out = fit_rank_polynomial(&samples, 6, &[1, 2, 4], None).unwrap();
        match out {
            FitOutcome::Underdetermined { free_dim } => assert_eq!(free_dim, 3),
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn pinned_leading_coefficient_makes_the_sextic_unique() {
        let samples: Vec<(usize, BigUint)> = (0..=5)
            .map(|n| (n, gamma6_fixed_n(n, 7).unwrap().into_inner()))
            .collect();
        let out = fit_rank_polynomial(&samples, 6, &[1, 2, 4], Some(rat(127))).unwrap();
        match out {
            FitOutcome::Fitted(p) => assert_eq!(p, gamma_poly(6, 7).unwrap()),
            other => panic!("expected fit, got {other:?}"),
        }
    }

    #[test]
    fn root_clash_is_reported() {
        let samples = vec![(0usize, BigUint::from(5u32))];
        let out = fit_rank_polynomial(&samples, 2, &[1], None).unwrap();
        assert!(matches!(
            out,
            FitOutcome::Inconsistent(FitConflict::RootClash { n: 0, .. })
        ));
    }

    #[test]
    fn contradictory_samples_are_reported() {
        // Degree 1 through three non-collinear points.
        let samples = vec![
            (0usize, BigUint::from(0u32)),
            (1usize, BigUint::from(3u32)),
            (2usize, BigUint::from(100u32)),
        ];
        let out = fit_rank_polynomial(&samples, 1, &[], None).unwrap();
        assert!(matches!(
            out,
            FitOutcome::Inconsistent(FitConflict::System(_))
        ));
    }

    #[test]
    fn degree_must_cover_roots() {
        assert!(matches!(
            fit_rank_polynomial(&[], 1, &[1, 2, 4], None),
            Err(FitError::DegreeBelowRoots { .. })
        ));
    }

    #[test]
    fn moment_system_solves_uniquely() {
        let sol = solve_moment_system().unwrap();
        assert!(sol.unique);
        assert_eq!(sol.rank, 24);
        assert_eq!(sol.cols, 24);
        assert_eq!(sol.rows, 33);
        assert!(sol.free.is_empty());
        // Spot values, including the negative cubic coefficient of the
        // rank-8 row and the vanishing constant of the rank-9 row.
        assert_eq!(sol.coefficients[&(7, 6)], rat(42291));
        assert_eq!(sol.coefficients[&(8, 3)], rat(-57511680));
        assert_eq!(sol.coefficients[&(9, 0)], rat(0));
        assert_eq!(sol.coefficients[&(9, 7)], rat(510));
    }

    #[test]
    fn moment_system_matches_tabulated_rows() {
        let sol = solve_moment_system().unwrap();
        for j in 0..=9usize {
            assert_eq!(
                sol.polynomials[j],
                gamma_poly(j, 9).unwrap(),
                "row {j} diverges from the table"
            );
        }
    }

    #[test]
    fn quotient_solve_matches_closed_forms() {
        for k in 7..=12usize {
            assert_eq!(
                rank6_quotient_solve(k).unwrap(),
                rank6_quotient_closed(k).unwrap(),
                "k={k}"
            );
        }
        let [q2, q1, q0] = rank6_quotient_solve(7).unwrap();
        assert_eq!(q2.to_integer().to_i64(), Some(700));
        assert_eq!(q1.to_integer().to_i64(), Some(-4256));
        assert_eq!(q0.to_integer().to_i64(), Some(-14336));
    }

    #[test]
    fn quotient_product_rebuilds_rank6_rows() {
        for k in 7..=12usize {
            assert_eq!(
                rank6_poly_from_quotient(k).unwrap(),
                gamma_poly(6, k).unwrap(),
                "k={k}"
            );
        }
    }

    #[test]
    fn quotient_system_shape_is_the_expected_vandermonde() {
        let (a, _) = rank6_quotient_system(9).unwrap();
        let expect = [[64, 8, 1], [256, 16, 1], [1024, 32, 1]];
        for (r, row) in expect.iter().enumerate() {
            for (c, value) in row.iter().enumerate() {
                assert_eq!(a.get(r, c), &rat(*value));
            }
        }
        assert!(matches!(
            rank6_quotient_system(6),
            Err(FormulaError::Uncovered { .. })
        ));
    }
}
