//! Packed-bit linear algebra over the two-element field.
//!
//! Bits are stored little-endian inside `u64` words: bit `j` of a vector lives
//! in word `j / 64` at position `j % 64`. Pad bits past `len` are always zero,
//! so word-level equality and hashing are exact.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A bit vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GF2Vector {
    len: usize,
    words: Vec<u64>,
}

impl GF2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            if v.len.is_multiple_of(WORD_BITS) {
                v.words.push(0);
            }
            v.len += 1;
            v.set(v.len - 1, b);
        }
        v
    }

    /// Builds a vector of `len` bits from the low bits of `mask`.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask & low_mask(len);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let w = &mut self.words[i / WORD_BITS];
        let m = 1u64 << (i % WORD_BITS);
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The low 64 bits as an integer; only meaningful for `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &GF2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &GF2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl std::ops::BitXor for &GF2Vector {
    type Output = GF2Vector;

    fn bitxor(self, rhs: &GF2Vector) -> GF2Vector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl fmt::Debug for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Vector({self})")
    }
}

impl fmt::Display for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for GF2Vector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(GF2Vector::from_bits)
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A dense matrix over F2, stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GF2Vector>,
}

impl GF2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![GF2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<GF2Vector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Convenience constructor from nested bit arrays (0/1 entries).
    pub fn from_bit_rows<R: AsRef<[u8]>>(cols: usize, rows: &[R]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| GF2Vector::from_bits(r.as_ref().iter().map(|&b| b & 1 == 1)))
            .collect();
        Self::from_rows(cols, rows)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &GF2Vector {
        &self.data[r]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &GF2Vector> {
        self.data.iter()
    }

    pub fn column(&self, c: usize) -> GF2Vector {
        GF2Vector::from_bits(self.data.iter().map(|r| r.get(c)))
    }

    pub fn push_row(&mut self, row: GF2Vector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!(
                "row of length {} pushed onto matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.push(row);
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for (wi, &w) in row.words.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let c = wi * WORD_BITS + w.trailing_zeros() as usize;
                    t.data[c].set(r, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    /// Concatenates `self` and `other` side by side.
    pub fn hstack(&self, other: &GF2Matrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot join {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| GF2Vector::from_bits(a.iter().chain(b.iter())))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols,
            data,
        })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &GF2Matrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {} columns over {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &GF2Vector) -> Result<GF2Vector> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok(GF2Vector::from_bits(self.data.iter().map(|r| r.dot(x))))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(GF2Vector::is_zero)
    }

    /// Reduces `self` in place to row echelon form and returns pivot columns.
    ///
    /// With `reduced` set, pivot columns are also cleared above the pivot.
    fn eliminate(&mut self, reduced: bool) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut top = 0;
        for c in 0..self.cols {
            if top == self.rows {
                break;
            }
            let (wi, bit) = (c / WORD_BITS, 1u64 << (c % WORD_BITS));
            let Some(p) = (top..self.rows).find(|&r| self.data[r].words[wi] & bit != 0) else {
                continue;
            };
            self.data.swap(top, p);
            let (head, tail) = self.data.split_at_mut(top + 1);
            let pivot = &head[top].words[wi..];
            for row in tail.iter_mut() {
                if row.words[wi] & bit != 0 {
                    for (a, b) in row.words[wi..].iter_mut().zip(pivot) {
                        *a ^= b;
                    }
                }
            }
            if reduced {
                let (above, rest) = head.split_at_mut(top);
                let pivot = &rest[0].words[wi..];
                for row in above.iter_mut() {
                    if row.words[wi] & bit != 0 {
                        for (a, b) in row.words[wi..].iter_mut().zip(pivot) {
                            *a ^= b;
                        }
                    }
                }
            }
            pivots.push(c);
            top += 1;
        }
        pivots
    }

    /// Row echelon-reduced copy and its pivot columns.
    pub fn rref(&self) -> (GF2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(true);
        (m, pivots)
    }
}

impl fmt::Debug for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GF2Matrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// One line per row, `0`/`1` characters, no separators.
impl fmt::Display for GF2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.data {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl GF2Matrix {
    /// Parses the line-per-row text form. `cols` is needed for matrices
    /// without rows and is otherwise checked against every line.
    pub fn parse_text(text: &str, cols: Option<usize>) -> Result<Self> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::parse::<GF2Vector>)
            .collect::<Result<Vec<_>>>()?;
        let cols = match (cols, rows.first()) {
            (Some(c), _) => c,
            (None, Some(r)) => r.len(),
            (None, None) => 0,
        };
        Self::from_rows(cols, rows)
    }
}

/// Dimension of the row space.
pub fn rank(m: &GF2Matrix) -> usize {
    let mut work = m.clone();
    work.eliminate(false).len()
}

/// Kernel dimension, `cols - rank`.
pub fn corank(m: &GF2Matrix) -> usize {
    m.cols() - rank(m)
}

/// Rows form a basis of `{x : M x = 0}`.
pub fn kernel_basis(m: &GF2Matrix) -> GF2Matrix {
    let (reduced, pivots) = m.rref();
    let mut is_pivot = vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = GF2Matrix::zeros(0, m.cols());
    for free in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut x = GF2Vector::zeros(m.cols());
        x.set(free, true);
        for (i, &p) in pivots.iter().enumerate() {
            if reduced.get(i, free) {
                x.set(p, true);
            }
        }
        basis.push_row(x).expect("kernel vector has matrix width");
    }
    basis
}

/// Whether the column spans of `a` and `b` coincide.
pub fn column_space_equal(a: &GF2Matrix, b: &GF2Matrix) -> Result<bool> {
    if a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "column spaces live in F2^{} and F2^{}",
            a.rows(),
            b.rows()
        )));
    }
    // Column rank via transposes: row ops on the transpose act on columns.
    let (at, bt) = (a.transpose(), b.transpose());
    let ra = rank(&at);
    let rb = rank(&bt);
    if ra != rb {
        return Ok(false);
    }
    Ok(rank(&at.vstack(&bt)?) == ra)
}

/// Product `A B` over F2.
pub fn mat_mul(a: &GF2Matrix, b: &GF2Matrix) -> Result<GF2Matrix> {
    if a.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut out = GF2Matrix::zeros(a.rows(), b.cols());
    for (dst, arow) in out.data.iter_mut().zip(&a.data) {
        for k in (0..a.cols()).filter(|&k| arow.get(k)) {
            dst.xor_assign(&b.data[k]);
        }
    }
    Ok(out)
}

/// Rank of a list of at most 64-bit rows, each packed in one word.
///
/// Used on hot paths where matrices are narrow; the rows are consumed as
/// scratch space.
pub fn rank_small(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    let len = rows.len();
    while rank < len {
        // Pick the row with the lowest set bit as pivot.
        let mut best = None;
        for (i, &r) in rows.iter().enumerate().skip(rank) {
            if r != 0 {
                best = Some(i);
                break;
            }
        }
        let Some(p) = best else { break };
        rows.swap(rank, p);
        let pivot = rows[rank];
        let bit = pivot & pivot.wrapping_neg();
        for r in rows[rank + 1..].iter_mut() {
            if *r & bit != 0 {
                *r ^= pivot;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[&str]) -> GF2Matrix {
        GF2Matrix::from_rows(cols, rows.iter().map(|r| r.parse().unwrap()).collect()).unwrap()
    }

    /// Rank by enumerating all row combinations: log2 of the row-space size.
    fn rank_by_enumeration(mat: &GF2Matrix) -> usize {
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..(1 << mat.rows()) {
            let mut acc = GF2Vector::zeros(mat.cols());
            for r in 0..mat.rows() {
                if mask >> r & 1 == 1 {
                    acc.xor_assign(mat.row(r));
                }
            }
            seen.insert(acc);
        }
        seen.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&GF2Matrix::identity(3)), 3);
        assert_eq!(rank(&GF2Matrix::zeros(4, 7)), 0);
        let dep = m(3, &["110", "011", "101"]);
        assert_eq!(rank_by_enumeration(&dep), 2);
        assert_eq!(rank(&dep), 2);
        assert_eq!(rank(&GF2Matrix::zeros(0, 0)), 0);
    }

    #[test]
    fn corank_examples() {
        assert_eq!(corank(&GF2Matrix::identity(3)), 0);
        assert_eq!(corank(&GF2Matrix::zeros(0, 5)), 5);
        assert_eq!(corank(&m(3, &["110", "011", "101"])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&GF2Matrix::identity(4)).rows(), 0);
        let k = kernel_basis(&GF2Matrix::zeros(0, 3));
        assert_eq!(k.rows(), 3);
        assert_eq!(rank(&k), 3);

        // Exhaustive check over F2^3 for the nonzero solution of {110, 011}.
        let a = m(3, &["110", "011"]);
        let solutions: Vec<u64> = (1u64..8)
            .filter(|&x| a.mul_vec(&GF2Vector::from_u64(3, x)).unwrap().is_zero())
            .collect();
        assert_eq!(solutions, vec![0b111]);
        let k = kernel_basis(&a);
        assert_eq!(k.rows(), 1);
        assert_eq!(k.row(0).to_string(), "111");
    }

    #[test]
    fn column_space_examples() {
        let a = m(2, &["10", "01"]);
        assert!(column_space_equal(&a, &a).unwrap());
        assert!(!column_space_equal(&GF2Matrix::identity(2), &GF2Matrix::zeros(2, 2)).unwrap());
        // Columns {10, 01} against columns {11, 01}.
        let b = m(2, &["10", "11"]);
        assert!(column_space_equal(&a, &b).unwrap());
        assert!(matches!(
            column_space_equal(&a, &GF2Matrix::zeros(3, 2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn mat_mul_examples() {
        let x = m(3, &["101", "011"]);
        assert_eq!(mat_mul(&GF2Matrix::identity(2), &x).unwrap(), x);
        assert!(mat_mul(&x, &GF2Matrix::zeros(3, 4)).unwrap().is_zero());
        let p = mat_mul(&m(2, &["11", "01"]), &m(2, &["10", "11"])).unwrap();
        assert_eq!(p, m(2, &["01", "11"]));
        assert!(mat_mul(&x, &x).is_err());
    }

    #[test]
    fn text_roundtrip_and_padding() {
        let x = m(70, &[&"1".repeat(70), &"01".repeat(35)]);
        let back = GF2Matrix::parse_text(&x.to_string(), None).unwrap();
        assert_eq!(back, x);
        assert_eq!(x.row(0).words()[1], (1 << 6) - 1);
        assert!(GF2Matrix::parse_text("0120\n", None).is_err());
        assert_eq!(GF2Matrix::parse_text("", Some(4)).unwrap().cols(), 4);
    }

    #[test]
    fn rank_small_matches_general() {
        let a = m(3, &["110", "011", "101"]);
        let mut rows: Vec<u64> = a.row_iter().map(GF2Vector::to_u64).collect();
        assert_eq!(rank_small(&mut rows), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix(max: usize) -> impl Strategy<Value = GF2Matrix> {
            (0..=max, 0..=max).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
                    move |rows| {
                        GF2Matrix::from_rows(
                            c,
                            rows.into_iter().map(GF2Vector::from_bits).collect(),
                        )
                        .unwrap()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn row_rank_equals_column_rank(a in matrix(20)) {
                prop_assert_eq!(rank(&a), rank(&a.transpose()));
            }

            #[test]
            fn rank_plus_corank_is_cols(a in matrix(20)) {
                prop_assert_eq!(rank(&a) + corank(&a), a.cols());
                prop_assert!(rank(&a) <= a.rows().min(a.cols()));
            }

            #[test]
            fn kernel_rows_solve_and_are_independent(a in matrix(20)) {
                let k = kernel_basis(&a);
                prop_assert_eq!(k.rows(), corank(&a));
                prop_assert_eq!(rank(&k), k.rows());
                for x in k.row_iter() {
                    prop_assert!(a.mul_vec(x).unwrap().is_zero());
                }
            }

            #[test]
            fn kernel_size_matches_enumeration(a in matrix(16)) {
                let count = (0u64..(1 << a.cols()))
                    .filter(|&x| a.mul_vec(&GF2Vector::from_u64(a.cols(), x)).unwrap().is_zero())
                    .count();
                prop_assert_eq!(count, 1usize << corank(&a));
            }

            #[test]
            fn rank_small_agrees(a in matrix(16)) {
                let mut rows: Vec<u64> = a.row_iter().map(GF2Vector::to_u64).collect();
                prop_assert_eq!(rank_small(&mut rows), rank(&a));
            }
        }
    }
}
