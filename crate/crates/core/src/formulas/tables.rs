//! Coefficient data for the closed-form rank counts.
//!
//! Two families live here.  The general-k family covers ranks 0 through 6
//! with coefficients that are rational polynomials in `K = 2^k`, each row
//! valid from some minimum `k` on.  The fixed-k family lists the complete
//! histogram polynomial in `Y = 2^n` for every `k` from 1 to 9 with plain
//! integer coefficients.  Where both apply they must agree; the accessor in
//! the parent module checks that on every call.
//!
//! This file is data plus thin evaluators.  Keep it free of logic so the
//! numbers stay easy to audit against the derivations in the tests.

use crate::rational::{pow2, rat_frac, RatPoly};
use num_rational::BigRational;
use num_traits::Zero;

/// One term `num/den * K^pow` of a coefficient polynomial in `K = 2^k`.
pub(crate) type KTerm = (i64, i64, u32);

/// A full coefficient: the sum of its terms.
pub(crate) type KCoeff = &'static [KTerm];

/// Evaluates a coefficient polynomial at `K = 2^k`.
pub(crate) fn eval_kcoeff(terms: KCoeff, k: usize) -> BigRational {
    let mut acc = BigRational::zero();
    for &(num, den, pow) in terms {
        acc += rat_frac(num, den) * pow2((k as i64) * pow as i64);
    }
    acc
}

/// Builds the rank-`i` polynomial in `Y` from a general-k row at a concrete
/// `k`.  Coefficients are listed highest exponent first.
pub(crate) fn eval_krow(coeffs: &[KCoeff], k: usize) -> RatPoly {
    let deg = coeffs.len() - 1;
    let mut out = vec![BigRational::zero(); coeffs.len()];
    for (pos, &c) in coeffs.iter().enumerate() {
        out[deg - pos] = eval_kcoeff(c, k);
    }
    RatPoly::from_coeffs(out)
}

/// Integer-coefficient polynomial in `Y`, highest exponent first.
pub(crate) fn int_row(coeffs: &[i64]) -> RatPoly {
    let deg = coeffs.len() - 1;
    let mut out = vec![BigRational::zero(); coeffs.len()];
    for (pos, &c) in coeffs.iter().enumerate() {
        out[deg - pos] = crate::rational::rat(c);
    }
    RatPoly::from_coeffs(out)
}

/// General-k closed forms for ranks 0 through 6.  Entry `i` is the minimum
/// valid `k` and the coefficients of `Y^i ... Y^0`.
pub(crate) const GENERAL_ROWS: [(usize, &[KCoeff]); 7] = [
    // rank 0: the zero matrix only
    (1, &[&[(1, 1, 0)]]),
    // rank 1: 3 window shapes times the nonzero multiplicity patterns
    (2, &[&[(3, 1, 0)], &[(-3, 1, 0)]]),
    // rank 2
    (
        3,
        &[
            &[(7, 1, 0)],
            &[(2, 1, 1), (-25, 1, 0)],
            &[(-2, 1, 1), (18, 1, 0)],
        ],
    ),
    // rank 3
    (
        4,
        &[
            &[(15, 1, 0)],
            &[(7, 1, 1), (-133, 1, 0)],
            &[(-21, 1, 1), (294, 1, 0)],
            &[(14, 1, 1), (-176, 1, 0)],
        ],
    ),
    // rank 4
    (
        5,
        &[
            &[(31, 1, 0)],
            &[(35, 2, 1), (-1210, 2, 0)],
            &[(4, 6, 2), (-783, 6, 1), (19028, 6, 0)],
            &[(-2, 1, 2), (269, 1, 1), (-5744, 1, 0)],
            &[(4, 3, 2), (-468, 3, 1), (9440, 3, 0)],
        ],
    ),
    // rank 5
    (
        6,
        &[
            &[(63, 1, 0)],
            &[(155, 4, 1), (-2573, 1, 0)],
            &[(5, 2, 2), (-2565, 4, 1), (29150, 1, 0)],
            &[(-35, 2, 2), (6265, 2, 1), (-247520, 2, 0)],
            &[(35, 1, 2), (-5490, 1, 1), (203872, 1, 0)],
            &[(-20, 1, 2), (2960, 1, 1), (-106752, 1, 0)],
        ],
    ),
    // rank 6
    (
        7,
        &[
            &[(127, 1, 0)],
            &[(651, 8, 1), (-10605, 1, 0)],
            &[(155, 24, 2), (-22661, 8, 1), (748154, 3, 0)],
            &[
                (8, 168, 3),
                (-16723, 168, 2),
                (5026378, 168, 1),
                (-382091648, 168, 0),
            ],
            &[(-1, 3, 3), (5649, 12, 2), (-368711, 3, 1), (8753120, 1, 0)],
            &[(2, 3, 3), (-2437, 3, 2), (597736, 3, 1), (-41276672, 3, 0)],
            &[
                (-8, 21, 3),
                (1304, 3, 2),
                (-310528, 3, 1),
                (147865600, 21, 0),
            ],
        ],
    ),
];

/// Complete histogram polynomials for fixed `k`.  `FIXED_K_ROWS[k - 1][i]`
/// is the rank-`i` polynomial in `Y`, coefficients highest exponent first.
///
/// In each table the top-rank row (`i = k`) has degree `k + 1` rather than
/// `k`; every other row `i` has degree `i`.
pub(crate) const FIXED_K_ROWS: [&[&[i64]]; 9] = [
    // k = 1
    &[&[1], &[1, 0, -1]],
    // k = 2
    &[&[1], &[3, -3], &[1, 0, -3, 2]],
    // k = 3
    &[&[1], &[3, -3], &[7, -9, 2], &[1, 0, -7, 6, 0]],
    // k = 4
    &[
        &[1],
        &[3, -3],
        &[7, 7, -14],
        &[15, -21, -42, 48],
        &[1, 0, -15, 14, 32, -32],
    ],
    // k = 5
    &[
        &[1],
        &[3, -3],
        &[7, 39, -46],
        &[15, 91, -378, 272],
        &[31, -45, -322, 816, -480],
        &[1, 0, -31, 30, 224, -480, 256],
    ],
    // k = 6
    &[
        &[1],
        &[3, -3],
        &[7, 103, -110],
        &[15, 315, -1050, 720],
        &[31, 515, -2450, 3280, -1376],
        &[63, -93, -1650, 5040, -4128, 768],
        &[1, 0, -63, 62, 1120, -2912, 1792, 0],
    ],
    // k = 7
    &[
        &[1],
        &[3, -3],
        &[7, 231, -238],
        &[15, 763, -2394, 1616],
        &[31, 1635, -2610, -4080, 5024],
        &[63, 2387, -11970, -9520, 74592, -55552],
        &[127, -189, -7378, 24240, 35168, -166656, 114688],
        &[1, 0, -127, 126, 4960, -13920, -23808, 98304, -65536],
    ],
    // k = 8
    &[
        &[1],
        &[3, -3],
        &[7, 487, -494],
        &[15, 1659, -5082, 3408],
        &[31, 3875, 13454, -67952, 50592],
        &[63, 7347, 28830, -468720, 1092192, -659712],
        &[127, 10227, -52514, -339760, 2548448, -4804352, 2637824],
        &[
            255, -381, -31122, 105648, 758880, -4617984, 7913472, -4128768,
        ],
        &[
            1, 0, -255, 254, 20832, -60512, -451840, 2523136, -4128768, 2097152,
        ],
    ],
    // k = 9
    &[
        &[1],
        &[3, -3],
        &[7, 999, -1006],
        &[15, 3451, -10458, 6992],
        &[31, 8355, 111118, -392304, 272800],
        &[63, 17267, 356190, -3107440, 6568032, -3834112],
        &[127, 31059, 492094, -6658800, 24491488, -35215104, 16859136],
        &[
            255, 42291, -219618, -4053808, 32840160, -82168576, 81543168, -27983872,
        ],
        // The sign of the Y^3 coefficient is pinned by the constraint that
        // all ten rows sum to Y^10; the moment-system solver in `fit`
        // re-derives this row independently and the tests compare them.
        &[
            511, -765, -127762, 440496, 8456800, -57511680, 118013952, -83951616, 14680064,
        ],
        &[
            1, 0, -511, 510, 85344, -252000, -4912384, 30965760, -57344000, 31457280, 0,
        ],
    ],
];

/// Rank-6 counts at fixed block count `n` as polynomials in `K = 2^k`.
/// Entry `n` holds the minimum valid `k` and the coefficients of
/// `K^3 ... K^0`; ranks above `2n` are impossible, so the first three rows
/// vanish identically.
pub(crate) const RANK6_BY_N: [(usize, [i64; 4]); 6] = [
    (1, [0, 0, 0, 0]),
    (1, [0, 0, 0, 0]),
    (1, [0, 0, 0, 0]),
    (3, [8, -448, 7168, -32768]),
    (4, [120, 123480, -6142080, 66170880]),
    (5, [1240, 3966760, 621071360, -23976878080]),
];

/// Closed forms for the cubic cofactor of the rank-6 polynomial: after the
/// forced roots `Y = 1, 2, 4` are divided out, the quotient is
/// `127 Y^3 + q2 Y^2 + q1 Y + q0` and these are `q2, q1, q0` as polynomials
/// in `K`.
pub(crate) const RANK6_QUOTIENT: [KCoeff; 3] = [
    &[(651, 8, 1), (-9716, 1, 0)],
    &[(155, 24, 2), (-2263, 1, 1), (538784, 3, 0)],
    &[(1, 21, 3), (-163, 3, 2), (38816, 3, 1), (-18483200, 21, 0)],
];

/// Evaluates the rank-6 count at fixed `n` as a rational in `K = 2^k`.
/// Returns `None` outside the tabulated range.
pub(crate) fn rank6_by_n_value(n: usize, k: usize) -> Option<BigRational> {
    let &(min_k, ref coeffs) = RANK6_BY_N.get(n)?;
    if k < min_k {
        return None;
    }
    let mut acc = BigRational::zero();
    for (pos, &c) in coeffs.iter().enumerate() {
        acc += crate::rational::rat(c) * pow2((k as i64) * (3 - pos as i64));
    }
    Some(acc)
}
