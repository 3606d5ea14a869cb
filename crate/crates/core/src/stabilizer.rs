//! Stabilizer states as self-dual subspaces of F2^{2n}.
//!
//! A phase-free Pauli operator on `n` qubits is a vector of length `2n`: the
//! first `n` bits are the z-block, the last `n` the x-block, so that qubit `i`
//! (0-based) carries the pair `(v[i], v[n + i])` with
//! `I = 00`, `X = 01`, `Z = 10`, `Y = 11`. Commutation is measured by the
//! symplectic form `P = [[0, I], [I, 0]]`.
//!
//! Signs are dropped when parsing. Two states whose generators differ only in
//! sign are related by a local Pauli operator, which is itself local Clifford,
//! so nothing computed here depends on them.
//!
//! Qubits are 1-based in every text format and 0-based in the API.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{self, GF2Matrix, GF2Vector};
use crate::lcequiv::LocalCliffordOp;

/// Default cap on `n` for [`Stabilizer::enumerate_elements`].
pub const DEFAULT_ENUMERATION_LIMIT: usize = 16;

/// A phase-free Pauli operator in binary form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliVector {
    n: usize,
    v: GF2Vector,
}

impl PauliVector {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            v: GF2Vector::zeros(2 * n),
        }
    }

    pub fn from_vector(v: GF2Vector) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "Pauli vector needs even length, got {}",
                v.len()
            )));
        }
        Ok(Self { n: v.len() / 2, v })
    }

    /// Builds from z- and x-bit masks (bit `i` is qubit `i`); `n <= 64`.
    pub fn from_masks(n: usize, z: u64, x: u64) -> Self {
        let mut p = Self::identity(n);
        for i in 0..n {
            p.v.set(i, z >> i & 1 == 1);
            p.v.set(n + i, x >> i & 1 == 1);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self) -> &GF2Vector {
        &self.v
    }

    pub fn z(&self, qubit: usize) -> bool {
        self.v.get(qubit)
    }

    pub fn x(&self, qubit: usize) -> bool {
        self.v.get(self.n + qubit)
    }

    /// The `(z, x)` bit pair of one qubit.
    pub fn pair(&self, qubit: usize) -> (bool, bool) {
        (self.z(qubit), self.x(qubit))
    }

    pub fn set_pair(&mut self, qubit: usize, (z, x): (bool, bool)) {
        self.v.set(qubit, z);
        self.v.set(self.n + qubit, x);
    }

    pub fn is_identity(&self) -> bool {
        self.v.is_zero()
    }

    pub fn support(&self) -> QubitSet {
        let mut s = QubitSet::empty(self.n);
        for i in (0..self.n).filter(|&i| self.z(i) || self.x(i)) {
            s.insert(i);
        }
        s
    }

    pub fn weight(&self) -> usize {
        (0..self.n).filter(|&i| self.z(i) || self.x(i)).count()
    }

    pub fn add(&self, other: &PauliVector) -> Result<PauliVector> {
        self.check_same_n(other)?;
        Ok(Self {
            n: self.n,
            v: &self.v ^ &other.v,
        })
    }

    /// `sum_i p_i q_{n+i} + p_{n+i} q_i` mod 2; zero iff the operators commute.
    pub fn symplectic_product(&self, other: &PauliVector) -> Result<bool> {
        self.check_same_n(other)?;
        let parity = (0..self.n).fold(false, |acc, i| {
            acc ^ (self.z(i) & other.x(i)) ^ (self.x(i) & other.z(i))
        });
        Ok(parity)
    }

    fn check_same_n(&self, other: &PauliVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "Pauli operators on {} and {} qubits",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let c = match self.pair(i) {
                (false, false) => 'I',
                (false, true) => 'X',
                (true, false) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliVector({self})")
    }
}

/// Parses a Pauli string such as `"-iXZZY"`. Any sign prefix
/// (`+`, `-`, `+i`, `-i`) is accepted and discarded.
pub fn parse_pauli_string(s: &str, expected_n: Option<usize>) -> Result<PauliVector> {
    let s = s.trim();
    let body = ["+i", "-i", "+", "-"]
        .iter()
        .find_map(|p| s.strip_prefix(p))
        .unwrap_or(s);
    let n = body.chars().count();
    if let Some(want) = expected_n {
        if want != n {
            return Err(Error::Parse(format!(
                "Pauli string {s:?} has length {n}, expected {want}"
            )));
        }
    }
    let mut p = PauliVector::identity(n);
    for (i, c) in body.chars().enumerate() {
        let pair = match c {
            'I' => (false, false),
            'X' => (false, true),
            'Z' => (true, false),
            'Y' => (true, true),
            other => {
                return Err(Error::Parse(format!(
                    "illegal character {other:?} in Pauli string {s:?}"
                )))
            }
        };
        p.set_pair(i, pair);
    }
    Ok(p)
}

impl FromStr for PauliVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pauli_string(s, None)
    }
}

/// A subset of the qubits `{0, .., n-1}`.
///
/// For `n <= 64` a set is identified with the integer `sum_{i in set} 2^i`,
/// which is how sets appear in canonical fingerprint keys.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QubitSet {
    members: GF2Vector,
}

impl QubitSet {
    pub fn empty(n: usize) -> Self {
        Self {
            members: GF2Vector::zeros(n),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            members: GF2Vector::from_bits(std::iter::repeat_n(true, n)),
        }
    }

    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "integer-coded sets need n <= 64");
        assert!(
            n == 64 || mask >> n == 0,
            "mask {mask:#b} has members outside {n} qubits"
        );
        Self {
            members: GF2Vector::from_u64(n, mask),
        }
    }

    /// From 0-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(Error::Invalid(format!("qubit {} outside 1..={n}", i + 1)));
            }
            s.insert(i);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn mask(&self) -> u64 {
        assert!(self.universe() <= 64, "integer-coded sets need n <= 64");
        self.members.to_u64()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.get(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.members.set(i, true)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_zero()
    }

    /// 0-based members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe()).filter(move |&i| self.contains(i))
    }

    pub fn complement(&self) -> QubitSet {
        QubitSet {
            members: GF2Vector::from_bits(self.members.iter().map(|b| !b)),
        }
    }

    pub fn is_subset(&self, other: &QubitSet) -> bool {
        self.universe() == other.universe() && self.iter().all(|i| other.contains(i))
    }

    /// Parses `{1,3}`, `{}` or `∅`. `n` is the universe size.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let t = text.trim();
        if t == "∅" {
            return Ok(Self::empty(n));
        }
        let inner = t
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("qubit set {t:?} must be braced")))?;
        let mut indices = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let one_based: usize = part
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index {part:?}")))?;
            if one_based == 0 {
                return Err(Error::Parse("qubit indices are 1-based".into()));
            }
            indices.push(one_based - 1);
        }
        Self::from_indices(n, indices)
    }
}

impl fmt::Display for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QubitSet{self}")
    }
}

/// Outcome of [`Stabilizer::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub n: usize,
    pub rank: usize,
    /// Anticommuting generator pairs, 0-based column indices `(a, b)` with `a < b`.
    pub anticommuting: Vec<(usize, usize)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.rank == self.n && self.anticommuting.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "valid, n={}", self.n);
        }
        write!(f, "invalid, n={}", self.n)?;
        if self.rank < self.n {
            write!(f, "\n  rank deficiency: rank {} < {}", self.rank, self.n)?;
        }
        for &(a, b) in &self.anticommuting {
            write!(f, "\n  generators {} and {} anticommute", a + 1, b + 1)?;
        }
        Ok(())
    }
}

/// An `n`-qubit stabilizer given by a `2n x n` generator matrix whose columns
/// are the generators.
///
/// Construction does not enforce self-duality; call [`Stabilizer::validate`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Stabilizer {
    n: usize,
    gens: GF2Matrix,
}

impl Stabilizer {
    pub fn from_matrix(gens: GF2Matrix) -> Result<Self> {
        let n = gens.cols();
        if gens.rows() != 2 * n {
            return Err(Error::Dimension(format!(
                "generator matrix must be 2n x n, got {}x{}",
                gens.rows(),
                gens.cols()
            )));
        }
        Ok(Self { n, gens })
    }

    pub fn from_generators(gens: &[PauliVector]) -> Result<Self> {
        let n = gens.len();
        if let Some(g) = gens.iter().find(|g| g.n() != n) {
            return Err(Error::Dimension(format!(
                "{n} generators but generator {g} acts on {} qubits",
                g.n()
            )));
        }
        let cols: Vec<GF2Vector> = gens.iter().map(|g| g.vector().clone()).collect();
        let t = GF2Matrix::from_rows(2 * n, cols)?;
        Self::from_matrix(t.transpose())
    }

    /// Parses generator strings; signs are ignored.
    pub fn from_strings<S: AsRef<str>>(gens: &[S]) -> Result<Self> {
        let n = gens.len();
        let parsed = gens
            .iter()
            .map(|g| parse_pauli_string(g.as_ref(), Some(n)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(&parsed)
    }

    /// Parses the file format: one generator per line, `#` comments.
    pub fn parse_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.is_empty() {
            return Err(Error::Parse("no generators".into()));
        }
        Self::from_strings(&lines)
    }

    pub fn to_text(&self) -> String {
        self.generators().map(|g| format!("{g}\n")).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &GF2Matrix {
        &self.gens
    }

    pub fn generator(&self, k: usize) -> PauliVector {
        PauliVector {
            n: self.n,
            v: self.gens.column(k),
        }
    }

    pub fn generators(&self) -> impl Iterator<Item = PauliVector> + '_ {
        (0..self.n).map(|k| self.generator(k))
    }

    pub fn validate(&self) -> ValidationReport {
        let gens: Vec<PauliVector> = self.generators().collect();
        let mut anticommuting = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if gens[a].symplectic_product(&gens[b]).expect("same n") {
                    anticommuting.push((a, b));
                }
            }
        }
        ValidationReport {
            n: self.n,
            rank: gf2::rank(&self.gens),
            anticommuting,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// All `2^n` elements of the column space. Element `c` is
    /// `sum_j c_j * generator_j` where `c_j` is bit `j` of `c`, for `c` in
    /// `0..2^n` ascending.
    pub fn enumerate_elements(&self) -> Result<Vec<PauliVector>> {
        self.enumerate_elements_with_limit(DEFAULT_ENUMERATION_LIMIT)
    }

    pub fn enumerate_elements_with_limit(&self, limit: usize) -> Result<Vec<PauliVector>> {
        if self.n > limit {
            return Err(Error::Budget {
                what: "enumeration qubit",
                needed: self.n as u128,
                limit: limit as u128,
            });
        }
        let gens: Vec<GF2Vector> = (0..self.n).map(|k| self.gens.column(k)).collect();
        let mut out = Vec::with_capacity(1 << self.n);
        out.push(PauliVector::identity(self.n));
        // Doubling keeps the coefficient order: element c + 2^k = element c + gen k.
        for (k, g) in gens.iter().enumerate() {
            for c in 0..1usize << k {
                let v = &out[c].v ^ g;
                out.push(PauliVector { n: self.n, v });
            }
        }
        Ok(out)
    }

    /// Packed `(z, x)` masks of every element, same order as
    /// [`Stabilizer::enumerate_elements`]. Requires `n <= 64`.
    pub(crate) fn element_masks(&self, limit: usize) -> Result<Vec<(u64, u64)>> {
        if self.n > limit.min(63) {
            return Err(Error::Budget {
                what: "enumeration qubit",
                needed: self.n as u128,
                limit: limit.min(63) as u128,
            });
        }
        let gens = self.generator_masks();
        let mut out = Vec::with_capacity(1 << self.n);
        out.push((0u64, 0u64));
        for (k, &(z, x)) in gens.iter().enumerate() {
            for c in 0..1usize << k {
                let (ez, ex) = out[c];
                out.push((ez ^ z, ex ^ x));
            }
        }
        Ok(out)
    }

    /// Generator columns as `(z, x)` masks; requires `n <= 64`.
    pub(crate) fn generator_masks(&self) -> Vec<(u64, u64)> {
        assert!(self.n <= 64);
        (0..self.n)
            .map(|k| {
                let (mut z, mut x) = (0u64, 0u64);
                for i in 0..self.n {
                    z |= (self.gens.get(i, k) as u64) << i;
                    x |= (self.gens.get(self.n + i, k) as u64) << i;
                }
                (z, x)
            })
            .collect()
    }

    /// Stacks rows `j` and `n + j` for every qubit `j` outside `omega`, in
    /// ascending `j`. Its corank is `log2 |{v in S : supp(v) ⊆ omega}|`.
    pub fn row_pair_submatrix(&self, omega: &QubitSet) -> Result<GF2Matrix> {
        if omega.universe() != self.n {
            return Err(Error::Dimension(format!(
                "qubit set over {} qubits for a {}-qubit stabilizer",
                omega.universe(),
                self.n
            )));
        }
        let mut m = GF2Matrix::zeros(0, self.n);
        for j in omega.complement().iter() {
            m.push_row(self.gens.row(j).clone())?;
            m.push_row(self.gens.row(self.n + j).clone())?;
        }
        Ok(m)
    }

    /// Generator `i` is X on qubit `i` and Z on its neighbours.
    pub fn graph_state(adjacency: &GF2Matrix) -> Result<Self> {
        let n = adjacency.rows();
        if adjacency.cols() != n {
            return Err(Error::Invalid(format!(
                "adjacency matrix must be square, got {}x{}",
                n,
                adjacency.cols()
            )));
        }
        for i in 0..n {
            if adjacency.get(i, i) {
                return Err(Error::Invalid(format!("self-loop on vertex {}", i + 1)));
            }
            for j in i + 1..n {
                if adjacency.get(i, j) != adjacency.get(j, i) {
                    return Err(Error::Invalid(format!(
                        "adjacency not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let mut gens = GF2Matrix::zeros(2 * n, n);
        for i in 0..n {
            gens.set(n + i, i, true);
            for j in 0..n {
                gens.set(j, i, adjacency.get(j, i));
            }
        }
        Self::from_matrix(gens)
    }

    /// Graph state from a 1-based edge list.
    pub fn graph_state_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = GF2Matrix::zeros(n, n);
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(Error::Invalid(format!(
                    "bad edge ({a}, {b}) on {n} vertices"
                )));
            }
            adj.set(a - 1, b - 1, true);
            adj.set(b - 1, a - 1, true);
        }
        Self::graph_state(&adj)
    }

    /// Graph state of a seeded random graph, each edge present with probability 1/2.
    pub fn random_graph_state(n: usize, seed: u64) -> Result<Self> {
        Self::graph_state(&random_adjacency(n, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    /// A seeded random valid stabilizer: a random graph state, transformed by
    /// a random local Clifford operation and a random change of generator basis.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("random stabilizer needs n >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = Self::graph_state(&random_adjacency(n, &mut rng))?;
        let q = LocalCliffordOp::random(n, &mut rng);
        let rotated = q.apply(&graph)?;
        let basis = random_invertible(n, &mut rng);
        Self::from_matrix(gf2::mat_mul(rotated.matrix(), &basis)?)
    }
}

fn random_adjacency<R: Rng>(n: usize, rng: &mut R) -> GF2Matrix {
    let mut adj = GF2Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let e = rng.gen::<bool>();
            adj.set(i, j, e);
            adj.set(j, i, e);
        }
    }
    adj
}

fn random_invertible<R: Rng>(n: usize, rng: &mut R) -> GF2Matrix {
    loop {
        let mut m = GF2Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, rng.gen::<bool>());
            }
        }
        if gf2::rank(&m) == n {
            return m;
        }
    }
}

impl fmt::Debug for Stabilizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().map(|g| g.to_string()).collect();
        write!(f, "Stabilizer[{}]", gens.join(", "))
    }
}

/// Support of a Pauli vector; free-function form of [`PauliVector::support`].
pub fn support(p: &PauliVector) -> QubitSet {
    p.support()
}

pub fn symplectic_product(p: &PauliVector, q: &PauliVector) -> Result<bool> {
    p.symplectic_product(q)
}
