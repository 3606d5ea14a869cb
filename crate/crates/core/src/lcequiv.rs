//! The binary local Clifford group and local Clifford equivalence deciders.
//!
//! A local Clifford operator acts on F2^{2n} as `n` independent 2x2 blocks:
//! qubit `i` maps its pair `(z_i, x_i)` to `Q_i (z_i, x_i)^T` with
//! `Q_i = [[a, b], [c, d]]` in GL(2, F2). Three deciders are provided:
//!
//! - [`brute_force_check`] walks all `6^n` operators.
//! - [`constructive_check`] looks for a tuple of elements of the second state
//!   that reproduces the support pattern of a basis of the first, then
//!   solves for the operator qubit by qubit.
//! - [`fingerprint_check`] compares dimension invariants.

use std::fmt;
use std::ops::ControlFlow;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{self, GF2Matrix};
use crate::invariants::{self, Budget, Fingerprint, OmegaTuple};
use crate::stabilizer::{PauliVector, Stabilizer};

/// Default qubit limit for [`brute_force_check`].
pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 8;
/// Default qubit limit for [`constructive_check`].
pub const DEFAULT_CONSTRUCTIVE_LIMIT: usize = 6;

/// An element of GL(2, F2), `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Gl2 {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
}

impl Gl2 {
    pub const IDENTITY: Gl2 = Gl2::from_code(0b1001);

    /// From the 4-bit code `abcd` (a is the most significant bit).
    pub const fn from_code(code: u8) -> Gl2 {
        Gl2 {
            a: code & 0b1000 != 0,
            b: code & 0b0100 != 0,
            c: code & 0b0010 != 0,
            d: code & 0b0001 != 0,
        }
    }

    pub fn code(self) -> u8 {
        (self.a as u8) << 3 | (self.b as u8) << 2 | (self.c as u8) << 1 | self.d as u8
    }

    pub fn is_invertible(self) -> bool {
        (self.a & self.d) ^ (self.b & self.c)
    }

    #[inline]
    pub fn apply(self, (z, x): (bool, bool)) -> (bool, bool) {
        ((self.a & z) ^ (self.b & x), (self.c & z) ^ (self.d & x))
    }

    /// Matrix product `self * rhs`.
    pub fn compose(self, rhs: Gl2) -> Gl2 {
        Gl2 {
            a: (self.a & rhs.a) ^ (self.b & rhs.c),
            b: (self.a & rhs.b) ^ (self.b & rhs.d),
            c: (self.c & rhs.a) ^ (self.d & rhs.c),
            d: (self.c & rhs.b) ^ (self.d & rhs.d),
        }
    }
}

impl fmt::Debug for Gl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.a as u8, self.b as u8, self.c as u8, self.d as u8
        )
    }
}

const GL2: [Gl2; 6] = [
    Gl2::IDENTITY,
    Gl2::from_code(0b0110),
    Gl2::from_code(0b0111),
    Gl2::from_code(0b1011),
    Gl2::from_code(0b1101),
    Gl2::from_code(0b1110),
];

/// The six elements of GL(2, F2): identity first, the rest in increasing
/// order of the code `abcd`.
pub fn gl2_elements() -> [Gl2; 6] {
    GL2
}

/// The binary image of a local Clifford operator: one [`Gl2`] per qubit.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LocalCliffordOp {
    factors: Vec<Gl2>,
}

impl LocalCliffordOp {
    pub fn identity(n: usize) -> Self {
        Self {
            factors: vec![Gl2::IDENTITY; n],
        }
    }

    pub fn new(factors: Vec<Gl2>) -> Result<Self> {
        if let Some(i) = factors.iter().position(|f| !f.is_invertible()) {
            return Err(Error::Invalid(format!(
                "factor on qubit {} is singular",
                i + 1
            )));
        }
        Ok(Self { factors })
    }

    /// Operator whose qubit `i` factor is `gl2_elements()[digits[i]]`.
    pub fn from_indices(digits: &[usize]) -> Self {
        Self {
            factors: digits.iter().map(|&d| GL2[d]).collect(),
        }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        Self::from_indices(&(0..n).map(|_| rng.gen_range(0..6)).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Gl2] {
        &self.factors
    }

    /// Factorwise product: `self.compose(other)` acts as `other` first.
    pub fn compose(&self, other: &LocalCliffordOp) -> Result<LocalCliffordOp> {
        if self.n() != other.n() {
            return Err(Error::Dimension(format!(
                "composing operators on {} and {} qubits",
                self.n(),
                other.n()
            )));
        }
        Ok(Self {
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a.compose(*b))
                .collect(),
        })
    }

    pub fn apply_pauli(&self, p: &PauliVector) -> Result<PauliVector> {
        if p.n() != self.n() {
            return Err(Error::Dimension(format!(
                "operator on {} qubits applied to Pauli on {}",
                self.n(),
                p.n()
            )));
        }
        let mut out = p.clone();
        for (i, f) in self.factors.iter().enumerate() {
            out.set_pair(i, f.apply(p.pair(i)));
        }
        Ok(out)
    }

    /// Maps every generator column of `s`.
    pub fn apply(&self, s: &Stabilizer) -> Result<Stabilizer> {
        let n = s.n();
        if n != self.n() {
            return Err(Error::Dimension(format!(
                "operator on {} qubits applied to a {n}-qubit stabilizer",
                self.n()
            )));
        }
        let src = s.matrix();
        let mut out = GF2Matrix::zeros(2 * n, n);
        for (i, f) in self.factors.iter().enumerate() {
            for k in 0..n {
                let (z, x) = f.apply((src.get(i, k), src.get(n + i, k)));
                out.set(i, k, z);
                out.set(n + i, k, x);
            }
        }
        Stabilizer::from_matrix(out)
    }

    /// Text form: one line `i: a b c d` per qubit, 1-based.
    pub fn to_text(&self) -> String {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                format!(
                    "{}: {} {} {} {}\n",
                    i + 1,
                    f.a as u8,
                    f.b as u8,
                    f.c as u8,
                    f.d as u8
                )
            })
            .collect()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (idx, bits) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `i: a b c d`, got {line:?}")))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in {line:?}")))?;
            if idx != factors.len() + 1 {
                return Err(Error::Parse(format!(
                    "expected qubit {}, got {idx}",
                    factors.len() + 1
                )));
            }
            let bits = bits
                .split_whitespace()
                .map(|b| match b {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(Error::Parse(format!("bad bit {b:?} in {line:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let [a, b, c, d] = bits[..] else {
                return Err(Error::Parse(format!("expected four bits in {line:?}")));
            };
            factors.push(Gl2 { a, b, c, d });
        }
        Self::new(factors)
    }

    /// `(A, B, C, D)` diagonal masks; requires `n <= 64`.
    fn masks(&self) -> [u64; 4] {
        let mut m = [0u64; 4];
        for (i, f) in self.factors.iter().enumerate() {
            m[0] |= (f.a as u64) << i;
            m[1] |= (f.b as u64) << i;
            m[2] |= (f.c as u64) << i;
            m[3] |= (f.d as u64) << i;
        }
        m
    }
}

impl fmt::Debug for LocalCliffordOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.factors).finish()
    }
}

impl fmt::Display for LocalCliffordOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn apply(q: &LocalCliffordOp, s: &Stabilizer) -> Result<Stabilizer> {
    q.apply(s)
}

fn check_same_n(s1: &Stabilizer, s2: &Stabilizer) -> Result<()> {
    if s1.n() != s2.n() {
        return Err(Error::Dimension(format!(
            "states on {} and {} qubits",
            s1.n(),
            s2.n()
        )));
    }
    Ok(())
}

/// Whether `q` maps the column space of `s1` onto that of `s2`.
pub fn maps_onto(q: &LocalCliffordOp, s1: &Stabilizer, s2: &Stabilizer) -> Result<bool> {
    gf2::column_space_equal(q.apply(s1)?.matrix(), s2.matrix())
}

#[inline]
fn symplectic_masks((z1, x1): (u64, u64), (z2, x2): (u64, u64)) -> bool {
    ((z1 & x2) ^ (x1 & z2)).count_ones() & 1 == 1
}

/// Searches all `6^n` local Clifford operators, in odometer order with the
/// last qubit's factor varying fastest, and returns the first mapping `s1`
/// onto `s2`.
pub fn brute_force_check(s1: &Stabilizer, s2: &Stabilizer) -> Result<Option<LocalCliffordOp>> {
    brute_force_check_with_limit(s1, s2, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn brute_force_check_with_limit(
    s1: &Stabilizer,
    s2: &Stabilizer,
    limit: usize,
) -> Result<Option<LocalCliffordOp>> {
    check_same_n(s1, s2)?;
    let n = s1.n();
    if n > limit.min(20) {
        return Err(Error::Budget {
            what: "brute-force qubit",
            needed: n as u128,
            limit: limit.min(20) as u128,
        });
    }
    let src = s1.generator_masks();
    let dst = s2.generator_masks();
    let total = 6u64.pow(n as u32);
    let digits_of = |mut idx: u64| {
        let mut d = vec![0usize; n];
        for slot in d.iter_mut().rev() {
            *slot = (idx % 6) as usize;
            idx /= 6;
        }
        d
    };
    // A self-dual target contains Q·v iff Q·v is orthogonal to all of it;
    // Q is invertible, so n images in the target span all of it.
    let found = (0..total).into_par_iter().find_first(|&idx| {
        let [a, b, c, d] = LocalCliffordOp::from_indices(&digits_of(idx)).masks();
        src.iter().all(|&(z, x)| {
            let image = ((a & z) ^ (b & x), (c & z) ^ (d & x));
            dst.iter().all(|&w| !symplectic_masks(image, w))
        })
    });
    let Some(idx) = found else { return Ok(None) };
    let q = LocalCliffordOp::from_indices(&digits_of(idx));
    debug_assert!(maps_onto(&q, s1, s2)?);
    Ok(Some(q))
}

/// Every local Clifford operator mapping `s1` onto `s2`, in odometer order.
pub fn brute_force_all(
    s1: &Stabilizer,
    s2: &Stabilizer,
    limit: usize,
) -> Result<Vec<LocalCliffordOp>> {
    check_same_n(s1, s2)?;
    let n = s1.n();
    if n > limit.min(12) {
        return Err(Error::Budget {
            what: "brute-force qubit",
            needed: n as u128,
            limit: limit.min(12) as u128,
        });
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let q = LocalCliffordOp::from_indices(&digits);
        if maps_onto(&q, s1, s2)? {
            out.push(q);
        }
        let Some(pos) = digits.iter().rposition(|&d| d < 5) else {
            break;
        };
        digits[pos] += 1;
        digits[pos + 1..].fill(0);
    }
    Ok(out)
}

/// A required single-qubit image: `(source, target)` as `(z, x)` pairs.
pub type PairConstraint = ((bool, bool), (bool, bool));

/// First element of [`gl2_elements`] sending every source pair to its target
/// pair, if any.
pub fn build_factor_from_pairs(constraints: &[PairConstraint]) -> Option<Gl2> {
    GL2.into_iter()
        .find(|g| constraints.iter().all(|&(src, dst)| g.apply(src) == dst))
}

/// Decides equivalence by matching the support pattern of `s1`'s generator
/// basis (and of all pairwise generator sums) inside `s2`.
///
/// A matching tuple `w^1..w^n` of `s2` elements fixes, on every qubit, a map
/// from the pairs of `s1`'s generators to those of the `w^k`; that map
/// extends to an invertible 2x2 matrix, and the assembled operator carries
/// the generators of `s1` onto a basis of `s2`. The operator is checked
/// before being returned.
pub fn constructive_check(s1: &Stabilizer, s2: &Stabilizer) -> Result<Option<LocalCliffordOp>> {
    constructive_check_with_limit(s1, s2, DEFAULT_CONSTRUCTIVE_LIMIT)
}

pub fn constructive_check_with_limit(
    s1: &Stabilizer,
    s2: &Stabilizer,
    limit: usize,
) -> Result<Option<LocalCliffordOp>> {
    check_same_n(s1, s2)?;
    let n = s1.n();
    if n > limit {
        return Err(Error::Budget {
            what: "constructive qubit",
            needed: n as u128,
            limit: limit as u128,
        });
    }
    let pattern = invariants::omega_star(s1);
    let src = s1.generator_masks();
    let search = invariants::PatternSearch::new(s2, &pattern, limit)?;
    let mut result = None;
    search.for_each_exact(|tuple| {
        let Some(q) = assemble_operator(n, &src, tuple) else {
            return ControlFlow::Continue(());
        };
        match maps_onto(&q, s1, s2) {
            Ok(true) => {
                result = Some(Ok(q));
                ControlFlow::Break(())
            }
            Ok(false) => ControlFlow::Continue(()),
            Err(e) => {
                result = Some(Err(e));
                ControlFlow::Break(())
            }
        }
    });
    result.transpose()
}

fn assemble_operator(n: usize, src: &[(u64, u64)], dst: &[(u64, u64)]) -> Option<LocalCliffordOp> {
    let bit = |m: u64, i: usize| m >> i & 1 == 1;
    let factors = (0..n)
        .map(|i| {
            let constraints: Vec<_> = src
                .iter()
                .zip(dst)
                .map(|(&(sz, sx), &(dz, dx))| ((bit(sz, i), bit(sx, i)), (bit(dz, i), bit(dx, i))))
                .collect();
            build_factor_from_pairs(&constraints)
        })
        .collect::<Option<Vec<_>>>()?;
    Some(LocalCliffordOp { factors })
}

/// Result of comparing dimension fingerprints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FingerprintVerdict {
    /// All dimension invariants of arity `r` agree. This proves equivalence
    /// only when `r = n`.
    EqualAtR { r: usize },
    /// The first tuple in canonical order where the invariants differ.
    Distinct {
        witness: OmegaTuple,
        left: u32,
        right: u32,
    },
}

impl FingerprintVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, FingerprintVerdict::EqualAtR { .. })
    }
}

pub fn fingerprint_check(
    s1: &Stabilizer,
    s2: &Stabilizer,
    r: usize,
    budget: &Budget,
) -> Result<FingerprintVerdict> {
    check_same_n(s1, s2)?;
    let f1 = invariants::fingerprint(s1, r, budget)?;
    let f2 = invariants::fingerprint(s2, r, budget)?;
    Ok(compare_fingerprints(&f1, &f2))
}

/// Compares two fingerprints of the same shape.
pub fn compare_fingerprints(f1: &Fingerprint, f2: &Fingerprint) -> FingerprintVerdict {
    assert_eq!((f1.n, f1.r), (f2.n, f2.r), "fingerprint shapes differ");
    for (index, (a, b)) in f1.values.iter().zip(&f2.values).enumerate() {
        if a != b {
            return FingerprintVerdict::Distinct {
                witness: OmegaTuple::from_canonical_index(f1.n, f1.r, index as u64),
                left: *a,
                right: *b,
            };
        }
    }
    FingerprintVerdict::EqualAtR { r: f1.r }
}
