//! Linear algebra over GF(2) on bit-packed rows, and polynomial arithmetic
//! over `F2[T]`.
//!
//! A matrix row lives in a single `u64`, bit `j` holding the entry in column
//! `j`.  That caps the column count at 64, which is far beyond anything the
//! census needs (`k <= 16` in practice), and keeps row elimination down to a
//! couple of machine instructions.

use std::fmt;

/// Widest row a packed matrix supports.
pub const MAX_COLS: usize = 64;

/// Dense binary matrix with each row packed into a `u64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_bits: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix of the given shape.
    ///
    /// Panics if `cols` exceeds [`MAX_COLS`].
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(cols <= MAX_COLS, "column count {cols} exceeds {MAX_COLS}");
        BitMatrix {
            rows,
            cols,
            row_bits: vec![0; rows],
        }
    }

    /// Builds a matrix from packed rows.
    ///
    /// Panics if `cols` exceeds [`MAX_COLS`] or if a row has a bit set at or
    /// beyond column `cols`.
    pub fn from_rows(cols: usize, rows: &[u64]) -> Self {
        assert!(cols <= MAX_COLS, "column count {cols} exceeds {MAX_COLS}");
        let mask = mask_low(cols);
        for (i, &r) in rows.iter().enumerate() {
            assert!(r & !mask == 0, "row {i} has bits outside {cols} columns");
        }
        BitMatrix {
            rows: rows.len(),
            cols,
            row_bits: rows.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Packed bits of row `r`.
    pub fn row(&self, r: usize) -> u64 {
        self.row_bits[r]
    }

    /// Entry at row `r`, column `c`.
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(c < self.cols);
        self.row_bits[r] >> c & 1 == 1
    }

    /// Sets the entry at row `r`, column `c`.
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(c < self.cols);
        if value {
            self.row_bits[r] |= 1 << c;
        } else {
            self.row_bits[r] &= !(1 << c);
        }
    }

    /// Transposed copy.  Only used by tests and sanity checks, so it is not
    /// tuned at all.
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Rank over GF(2).  The matrix itself is left untouched.
    pub fn rank(&self) -> usize {
        let mut scratch = self.row_bits.clone();
        rank_in_place(&mut scratch)
    }

    /// Dimension of the right kernel, `cols - rank`.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            if r + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

fn mask_low(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Gaussian elimination on packed rows, returning the rank.
///
/// Pivots are chosen as the lowest set bit of each surviving row, so on exit
/// `rows[..rank]` holds a row echelon basis and the rest are zero.  This is
/// the hot path of the census: for the matrix shapes there (at most a dozen
/// rows) the quadratic row sweep beats anything fancier.
pub fn rank_in_place(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let mut row = rows[i];
        // Reduce against the pivots found so far.  Each pivot row has the
        // lowest set bit of every earlier pivot cleared, so one pass suffices.
        for &pivot in &rows[..rank] {
            if row & (pivot & pivot.wrapping_neg()) != 0 {
                row ^= pivot;
            }
        }
        if row != 0 {
            rows[rank] = row;
            rank += 1;
        }
    }
    for r in rows[rank..].iter_mut() {
        *r = 0;
    }
    rank
}

/// Polynomial over GF(2) in one variable, bit `d` holding the coefficient of
/// `T^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    coeff_bits: u64,
}

impl Poly2 {
    pub const ZERO: Poly2 = Poly2 { coeff_bits: 0 };
    pub const ONE: Poly2 = Poly2 { coeff_bits: 1 };

    pub fn from_bits(coeff_bits: u64) -> Self {
        Poly2 { coeff_bits }
    }

    pub fn bits(self) -> u64 {
        self.coeff_bits
    }

    pub fn is_zero(self) -> bool {
        self.coeff_bits == 0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(self) -> Option<u32> {
        if self.coeff_bits == 0 {
            None
        } else {
            Some(63 - self.coeff_bits.leading_zeros())
        }
    }
}

impl std::ops::Add for Poly2 {
    type Output = Poly2;

    // Coefficient addition in characteristic 2 is exactly XOR.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Poly2) -> Poly2 {
        Poly2 {
            coeff_bits: self.coeff_bits ^ rhs.coeff_bits,
        }
    }
}

impl std::ops::AddAssign for Poly2 {
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Poly2) {
        self.coeff_bits ^= rhs.coeff_bits;
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for d in (0..64).rev() {
            if self.coeff_bits >> d & 1 == 1 {
                if !first {
                    write!(f, " + ")?;
                }
                match d {
                    0 => write!(f, "1")?,
                    1 => write!(f, "T")?,
                    _ => write!(f, "T^{d}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

/// Carry-less product in `F2[T]`.
///
/// Panics if the product would not fit in 64 coefficient bits.  The callers
/// here multiply degree `< k` by degree `<= 1` with `k <= 16`, nowhere close.
pub fn poly_mul(a: Poly2, b: Poly2) -> Poly2 {
    if a.is_zero() || b.is_zero() {
        return Poly2::ZERO;
    }
    let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
    assert!(da + db < 64, "product degree {} overflows", da + db);
    let mut acc = 0u64;
    let mut bits = b.bits();
    let mut shift = 0;
    while bits != 0 {
        if bits & 1 == 1 {
            acc ^= a.bits() << shift;
        }
        bits >>= 1;
        shift += 1;
    }
    Poly2::from_bits(acc)
}
