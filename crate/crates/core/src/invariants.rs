//! Local Clifford invariants built from support constraints on tuples of
//! stabilizer elements.
//!
//! A constraint tuple `Ω` of arity `r` holds one qubit set `ω^k` per slot and
//! one set `ω^{kl}` per slot pair `k < l`. Two families are computed:
//!
//! - the count of r-tuples `(v^1..v^r)` with `supp(v^k) = ω^k` and
//!   `supp(v^k + v^l) = ω^{kl}` ([`t_invariant`]);
//! - the dimension of the space of r-tuples with `supp(v^k) ⊆ ω^k` and
//!   `supp(v^k + v^l) ⊆ ω^{kl}` ([`v_dim_invariant`]), evaluated as the
//!   corank of a block matrix over the generator coefficients.
//!
//! The counts of the second family are `2^dim`; the two families determine
//! each other through inclusion-exclusion on the subset lattice of every
//! coordinate ([`moebius_t_from_v`], [`moebius_v_from_t`]).
//!
//! # Canonical order
//!
//! A set is coded as the integer `sum_{i in set} 2^(i-1)` (1-based qubits).
//! A tuple's key lists its `r` singles followed by its pairs in the order
//! `(1,2), (1,3), .., (1,r), (2,3), ..`. Keys are enumerated as an odometer
//! over `0..2^n` per coordinate with the last coordinate varying fastest,
//! which is plain lexicographic order on keys. The canonical index of a key
//! is its base-`2^n` value with the first coordinate most significant.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{self, GF2Matrix, GF2Vector};
use crate::stabilizer::{QubitSet, Stabilizer};

/// Default cap on `r * n` for enumeration-based evaluations.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 25;
/// Default cap on the number of fingerprint entries: `(2^n)^(r(r+1)/2)`.
/// Admits `n = r = 3` and `r = 2` up to `n = 6`.
pub const DEFAULT_FINGERPRINT_BUDGET: u128 = 1 << 18;

/// Resource limits for the exponential code paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum `r * n` for tuple enumeration.
    pub enumeration: usize,
    /// Maximum number of fingerprint entries.
    pub fingerprint_entries: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            enumeration: DEFAULT_ENUMERATION_BUDGET,
            fingerprint_entries: DEFAULT_FINGERPRINT_BUDGET,
        }
    }
}

/// Number of sets in a tuple of arity `r`: `r` singles plus `r(r-1)/2` pairs.
pub fn coordinate_count(r: usize) -> usize {
    r * (r + 1) / 2
}

/// Position of pair `(k, l)`, `k < l`, among the pairs of an arity-`r` tuple.
fn pair_slot(r: usize, k: usize, l: usize) -> usize {
    debug_assert!(k < l && l < r);
    k * (2 * r - k - 1) / 2 + (l - k - 1)
}

/// Constraint data `Ω`: `r` single sets and `r(r-1)/2` pair sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OmegaTuple {
    n: usize,
    r: usize,
    singles: Vec<QubitSet>,
    pairs: Vec<QubitSet>,
}

impl OmegaTuple {
    /// `pairs` must be in canonical order `(1,2), (1,3), .., (2,3), ..`.
    pub fn new(n: usize, singles: Vec<QubitSet>, pairs: Vec<QubitSet>) -> Result<Self> {
        let r = singles.len();
        if r == 0 {
            return Err(Error::Invalid("constraint tuple needs r >= 1".into()));
        }
        if pairs.len() != r * (r - 1) / 2 {
            return Err(Error::Invalid(format!(
                "arity {r} needs {} pair sets, got {}",
                r * (r - 1) / 2,
                pairs.len()
            )));
        }
        if let Some(s) = singles.iter().chain(&pairs).find(|s| s.universe() != n) {
            return Err(Error::Dimension(format!(
                "set over {} qubits in a tuple over {n}",
                s.universe()
            )));
        }
        Ok(Self {
            n,
            r,
            singles,
            pairs,
        })
    }

    /// Builds from integer-coded sets: `r` singles then the pairs.
    pub fn from_key(n: usize, r: usize, key: &[u64]) -> Result<Self> {
        if key.len() != coordinate_count(r) {
            return Err(Error::Invalid(format!(
                "arity {r} key needs {} sets, got {}",
                coordinate_count(r),
                key.len()
            )));
        }
        if n > 64 || key.iter().any(|&m| n < 64 && m >> n != 0) {
            return Err(Error::Invalid(format!(
                "key {key:?} out of range for n={n}"
            )));
        }
        let sets: Vec<QubitSet> = key.iter().map(|&m| QubitSet::from_mask(n, m)).collect();
        let (singles, pairs) = sets.split_at(r);
        Self::new(n, singles.to_vec(), pairs.to_vec())
    }

    /// The tuple at position `index` in canonical order.
    pub fn from_canonical_index(n: usize, r: usize, mut index: u64) -> Self {
        let coords = coordinate_count(r);
        let mask = (1u64 << n) - 1;
        let mut key = vec![0u64; coords];
        for slot in key.iter_mut().rev() {
            *slot = index & mask;
            index >>= n;
        }
        Self::from_key(n, r, &key).expect("canonical index in range")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn single(&self, k: usize) -> &QubitSet {
        &self.singles[k]
    }

    /// The set `ω^{kl}` for 0-based `k < l`.
    pub fn pair(&self, k: usize, l: usize) -> &QubitSet {
        &self.pairs[pair_slot(self.r, k, l)]
    }

    pub fn singles(&self) -> &[QubitSet] {
        &self.singles
    }

    pub fn pairs(&self) -> &[QubitSet] {
        &self.pairs
    }

    /// All sets in key order.
    pub fn sets(&self) -> impl Iterator<Item = &QubitSet> {
        self.singles.iter().chain(&self.pairs)
    }

    /// Integer-coded sets in key order; requires `n <= 64`.
    pub fn key(&self) -> Vec<u64> {
        self.sets().map(QubitSet::mask).collect()
    }

    pub fn canonical_index(&self) -> u128 {
        self.sets()
            .fold(0u128, |acc, s| (acc << self.n) | s.mask() as u128)
    }

    /// Every set full: no constraints at all.
    pub fn unconstrained(n: usize, r: usize) -> Self {
        let full = QubitSet::full(n);
        Self {
            n,
            r,
            singles: vec![full.clone(); r],
            pairs: vec![full; r * (r - 1) / 2],
        }
    }

    /// Parses `r=2; w1={1,2}; w2={2,3}; w12={1,3}`. Whitespace is ignored.
    /// Pair names are `wKL` (arity below 10) or `wK_L`; every set is required.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut r = None;
        let mut named: HashMap<String, QubitSet> = HashMap::new();
        for item in compact.split(';').filter(|i| !i.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected name=value, got {item:?}")))?;
            if name == "r" {
                let v: usize = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad arity {value:?}")))?;
                r = Some(v);
            } else if let Some(label) = name.strip_prefix('w') {
                if named
                    .insert(label.to_string(), QubitSet::parse(value, n)?)
                    .is_some()
                {
                    return Err(Error::Parse(format!("set {name} given twice")));
                }
            } else {
                return Err(Error::Parse(format!("unknown field {name:?}")));
            }
        }
        let r = r.ok_or_else(|| Error::Parse("missing r=".into()))?;
        if r == 0 {
            return Err(Error::Parse("r must be at least 1".into()));
        }
        let mut take = |labels: &[String]| -> Result<QubitSet> {
            labels
                .iter()
                .find_map(|l| named.remove(l))
                .ok_or_else(|| Error::Parse(format!("missing set w{}", labels[0])))
        };
        let mut singles = Vec::with_capacity(r);
        for k in 1..=r {
            singles.push(take(&[k.to_string()])?);
        }
        let mut pairs = Vec::new();
        for k in 1..=r {
            for l in k + 1..=r {
                let mut labels = vec![format!("{k}_{l}")];
                if r < 10 {
                    labels.insert(0, format!("{k}{l}"));
                }
                pairs.push(take(&labels)?);
            }
        }
        if let Some(extra) = named.keys().next() {
            return Err(Error::Parse(format!("unexpected set w{extra}")));
        }
        Self::new(n, singles, pairs)
    }
}

impl fmt::Display for OmegaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={}", self.r)?;
        for (k, s) in self.singles.iter().enumerate() {
            write!(f, "; w{}={s}", k + 1)?;
        }
        for k in 0..self.r {
            for l in k + 1..self.r {
                let sep = if self.r < 10 { "" } else { "_" };
                write!(f, "; w{}{sep}{}={}", k + 1, l + 1, self.pair(k, l))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for OmegaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OmegaTuple({self})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InvariantKind {
    /// Exact-support tuple count.
    T,
    /// Contained-support space dimension.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InvariantValue {
    pub kind: InvariantKind,
    pub value: u64,
}

fn check_tuple(s: &Stabilizer, omega: &OmegaTuple) -> Result<()> {
    if omega.n() != s.n() {
        return Err(Error::Dimension(format!(
            "constraint tuple over {} qubits for a {}-qubit state",
            omega.n(),
            s.n()
        )));
    }
    Ok(())
}

fn check_enumeration(n: usize, r: usize, budget: usize) -> Result<()> {
    if r * n > budget {
        return Err(Error::Budget {
            what: "enumeration (r*n)",
            needed: (r * n) as u128,
            limit: budget as u128,
        });
    }
    Ok(())
}

/// Depth-first search for tuples of stabilizer elements with an exact
/// support pattern. Elements are bucketed by support, so slot `k` only ever
/// draws from elements supported exactly on `ω^k`; every pair constraint is
/// checked as soon as both of its slots are filled.
pub(crate) struct PatternSearch {
    r: usize,
    candidates: Vec<Vec<(u64, u64)>>,
    pairs: Vec<u64>,
}

impl PatternSearch {
    pub(crate) fn new(s: &Stabilizer, omega: &OmegaTuple, qubit_limit: usize) -> Result<Self> {
        check_tuple(s, omega)?;
        let elements = s.element_masks(qubit_limit.max(1))?;
        let mut buckets: HashMap<u64, Vec<(u64, u64)>> = HashMap::new();
        for &(z, x) in &elements {
            buckets.entry(z | x).or_default().push((z, x));
        }
        let candidates = omega
            .singles()
            .iter()
            .map(|w| buckets.get(&w.mask()).cloned().unwrap_or_default())
            .collect();
        Ok(Self {
            r: omega.r(),
            candidates,
            pairs: omega.pairs().iter().map(QubitSet::mask).collect(),
        })
    }

    fn fits(&self, chosen: &[(u64, u64)], k: usize, (z, x): (u64, u64)) -> bool {
        chosen
            .iter()
            .enumerate()
            .all(|(l, &(lz, lx))| ((lz ^ z) | (lx ^ x)) == self.pairs[pair_slot(self.r, l, k)])
    }

    pub(crate) fn count(&self) -> u64 {
        let mut chosen = Vec::with_capacity(self.r);
        self.count_from(&mut chosen)
    }

    fn count_from(&self, chosen: &mut Vec<(u64, u64)>) -> u64 {
        let k = chosen.len();
        if k == self.r {
            return 1;
        }
        let mut total = 0;
        for &cand in &self.candidates[k] {
            if self.fits(chosen, k, cand) {
                chosen.push(cand);
                total += self.count_from(chosen);
                chosen.pop();
            }
        }
        total
    }

    /// Visits matching tuples in bucket order until the visitor breaks.
    pub(crate) fn for_each_exact<F>(&self, mut visit: F)
    where
        F: FnMut(&[(u64, u64)]) -> ControlFlow<()>,
    {
        let mut chosen = Vec::with_capacity(self.r);
        let _ = self.visit_from(&mut chosen, &mut visit);
    }

    fn visit_from<F>(&self, chosen: &mut Vec<(u64, u64)>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[(u64, u64)]) -> ControlFlow<()>,
    {
        let k = chosen.len();
        if k == self.r {
            return visit(chosen);
        }
        for &cand in &self.candidates[k] {
            if self.fits(chosen, k, cand) {
                chosen.push(cand);
                let flow = self.visit_from(chosen, visit);
                chosen.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
}

/// Number of r-tuples of stabilizer elements with exactly the supports of `omega`.
pub fn t_invariant(s: &Stabilizer, omega: &OmegaTuple) -> Result<u64> {
    t_invariant_with_budget(s, omega, &Budget::default())
}

pub fn t_invariant_with_budget(s: &Stabilizer, omega: &OmegaTuple, budget: &Budget) -> Result<u64> {
    check_tuple(s, omega)?;
    check_enumeration(s.n(), omega.r(), budget.enumeration)?;
    Ok(PatternSearch::new(s, omega, s.n())?.count())
}

/// Rows `(z_j, x_j)` of the generator matrix as coefficient masks, per qubit.
fn qubit_row_masks(s: &Stabilizer) -> Vec<(u64, u64)> {
    let n = s.n();
    let m = s.matrix();
    (0..n)
        .map(|j| (m.row(j).to_u64(), m.row(n + j).to_u64()))
        .collect()
}

/// Evaluates dimension invariants of one state with word-sized rows; needs
/// `r * n <= 64`.
struct VDimEvaluator {
    n: usize,
    rows: Vec<(u64, u64)>,
}

impl VDimEvaluator {
    fn new(s: &Stabilizer) -> Self {
        Self {
            n: s.n(),
            rows: qubit_row_masks(s),
        }
    }

    fn eval(&self, r: usize, key: &[u64]) -> u32 {
        let n = self.n;
        let width = r * n;
        let mut basis = [0u64; 64];
        let mut rank = 0usize;
        let mut insert = |mut v: u64| {
            while v != 0 {
                let b = v.trailing_zeros() as usize;
                if basis[b] == 0 {
                    basis[b] = v;
                    rank += 1;
                    return;
                }
                v ^= basis[b];
            }
        };
        let outside = |mask: u64| (0..n).filter(move |&j| mask >> j & 1 == 0);
        for (k, &w) in key[..r].iter().enumerate() {
            for j in outside(w) {
                let (z, x) = self.rows[j];
                insert(z << (k * n));
                insert(x << (k * n));
            }
        }
        let mut slot = r;
        for k in 0..r {
            for l in k + 1..r {
                for j in outside(key[slot]) {
                    let (z, x) = self.rows[j];
                    insert(z << (k * n) | z << (l * n));
                    insert(x << (k * n) | x << (l * n));
                }
                slot += 1;
            }
        }
        (width - rank) as u32
    }
}

/// The constraint matrix on coefficient space F2^{r n}: block row
/// `S_{ω^k}` in block column `k` per slot, and `S_{ω^{kl}}` in both block
/// columns `k` and `l` per pair.
pub fn v_constraint_matrix(s: &Stabilizer, omega: &OmegaTuple) -> Result<GF2Matrix> {
    check_tuple(s, omega)?;
    let (n, r) = (s.n(), omega.r());
    let mut out = GF2Matrix::zeros(0, r * n);
    let mut place = |sub: &GF2Matrix, blocks: &[usize]| -> Result<()> {
        for row in sub.row_iter() {
            let mut wide = GF2Vector::zeros(r * n);
            for c in (0..n).filter(|&c| row.get(c)) {
                for &b in blocks {
                    wide.set(b * n + c, true);
                }
            }
            out.push_row(wide)?;
        }
        Ok(())
    };
    for k in 0..r {
        place(&s.row_pair_submatrix(omega.single(k))?, &[k])?;
    }
    for k in 0..r {
        for l in k + 1..r {
            place(&s.row_pair_submatrix(omega.pair(k, l))?, &[k, l])?;
        }
    }
    Ok(out)
}

/// Dimension of the space of r-tuples whose supports lie inside `omega`.
pub fn v_dim_invariant(s: &Stabilizer, omega: &OmegaTuple) -> Result<u32> {
    check_tuple(s, omega)?;
    if omega.r() * s.n() <= 64 {
        return Ok(VDimEvaluator::new(s).eval(omega.r(), &omega.key()));
    }
    Ok(gf2::corank(&v_constraint_matrix(s, omega)?) as u32)
}

/// Same value as [`v_dim_invariant`], always through [`v_constraint_matrix`].
pub fn v_dim_invariant_dense(s: &Stabilizer, omega: &OmegaTuple) -> Result<u32> {
    Ok(gf2::corank(&v_constraint_matrix(s, omega)?) as u32)
}

/// Counts tuples with contained supports by visiting all `2^{r n}` tuples.
pub fn v_count_oracle(s: &Stabilizer, omega: &OmegaTuple) -> Result<u64> {
    v_count_oracle_with_budget(s, omega, &Budget::default())
}

pub fn v_count_oracle_with_budget(
    s: &Stabilizer,
    omega: &OmegaTuple,
    budget: &Budget,
) -> Result<u64> {
    check_tuple(s, omega)?;
    let (n, r) = (s.n(), omega.r());
    check_enumeration(n, r, budget.enumeration)?;
    let elements = s.element_masks(n)?;
    let singles: Vec<u64> = omega.singles().iter().map(QubitSet::mask).collect();
    let pairs: Vec<u64> = omega.pairs().iter().map(QubitSet::mask).collect();
    let size = elements.len() as u64;
    let mut count = 0;
    let mut idx = vec![0usize; r];
    for t in 0..size.pow(r as u32) {
        let mut rest = t;
        for slot in idx.iter_mut() {
            *slot = (rest % size) as usize;
            rest /= size;
        }
        let singles_ok = (0..r).all(|k| {
            let (z, x) = elements[idx[k]];
            (z | x) & !singles[k] == 0
        });
        let pairs_ok = (0..r).all(|k| {
            (k + 1..r).all(|l| {
                let (zk, xk) = elements[idx[k]];
                let (zl, xl) = elements[idx[l]];
                ((zk ^ zl) | (xk ^ xl)) & !pairs[pair_slot(r, k, l)] == 0
            })
        });
        if singles_ok && pairs_ok {
            count += 1;
        }
    }
    Ok(count)
}

/// Every tuple obtained from `omega0` by shrinking each set to a subset.
pub fn downward_closure(omega0: &OmegaTuple) -> Vec<OmegaTuple> {
    let (n, r) = (omega0.n(), omega0.r());
    let tops = omega0.key();
    let mut out = Vec::new();
    let mut cur = tops.clone();
    loop {
        out.push(OmegaTuple::from_key(n, r, &cur).expect("subsets stay in range"));
        // Odometer over submasks, last coordinate fastest.
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if cur[pos] != 0 {
                cur[pos] = (cur[pos] - 1) & tops[pos];
                for (c, t) in cur[pos + 1..].iter_mut().zip(&tops[pos + 1..]) {
                    *c = *t;
                }
                break;
            }
        }
    }
}

/// Signed inclusion-exclusion: `δ_ω = Σ_{ω' ⊆ ω} (-1)^{|ω|-|ω'|} ε_{ω'}`
/// applied in every coordinate. `counts` must hold the |V| counts for the
/// whole downward closure of `omega0`.
pub fn moebius_t_from_v(counts: &HashMap<OmegaTuple, u64>, omega0: &OmegaTuple) -> Result<u64> {
    let top: u32 = omega0.sets().map(|s| s.len() as u32).sum();
    let mut total: i128 = 0;
    for sub in downward_closure(omega0) {
        let value = *counts
            .get(&sub)
            .ok_or_else(|| Error::Missing(format!("|V| count for {sub}")))?;
        let size: u32 = sub.sets().map(|s| s.len() as u32).sum();
        if (top - size).is_multiple_of(2) {
            total += value as i128;
        } else {
            total -= value as i128;
        }
    }
    u64::try_from(total).map_err(|_| {
        Error::Invalid(format!(
            "counts are inconsistent: signed sum {total} for {omega0}"
        ))
    })
}

/// `ε_ω = Σ_{ω' ⊆ ω} δ_{ω'}` in every coordinate: |V| from |T| counts.
pub fn moebius_v_from_t(counts: &HashMap<OmegaTuple, u64>, omega0: &OmegaTuple) -> Result<u64> {
    downward_closure(omega0)
        .iter()
        .map(|sub| {
            counts
                .get(sub)
                .copied()
                .ok_or_else(|| Error::Missing(format!("|T| count for {sub}")))
        })
        .sum()
}

/// Support pattern of the stored generator basis and its pairwise sums; arity `n`.
pub fn omega_star(s: &Stabilizer) -> OmegaTuple {
    let n = s.n();
    let gens: Vec<_> = s.generators().collect();
    let singles = gens.iter().map(|g| g.support()).collect();
    let mut pairs = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            pairs.push(gens[k].add(&gens[l]).expect("same n").support());
        }
    }
    OmegaTuple::new(n, singles, pairs).expect("generator supports form a tuple")
}

/// Dimension invariants of one state for every tuple of arity `r`, in
/// canonical order (`values[i]` belongs to canonical index `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub n: usize,
    pub r: usize,
    pub values: Vec<u32>,
}

pub const FINGERPRINT_FORMAT: &str = "lc-fingerprint";
pub const FINGERPRINT_VERSION: u32 = 1;

/// `(2^n)^(r(r+1)/2)`, or `None` past `u128`.
pub fn fingerprint_size(n: usize, r: usize) -> Option<u128> {
    let bits = n.checked_mul(coordinate_count(r))?;
    (bits < 128).then(|| 1u128 << bits)
}

pub fn fingerprint(s: &Stabilizer, r: usize, budget: &Budget) -> Result<Fingerprint> {
    let n = s.n();
    if r == 0 {
        return Err(Error::Invalid(
            "fingerprint arity must be at least 1".into(),
        ));
    }
    let size = fingerprint_size(n, r);
    match size {
        Some(sz) if sz <= budget.fingerprint_entries => {}
        _ => {
            return Err(Error::Budget {
                what: "fingerprint entry",
                needed: size.unwrap_or(u128::MAX),
                limit: budget.fingerprint_entries,
            })
        }
    }
    let size = size.expect("checked above") as u64;
    let coords = coordinate_count(r);
    let mask = (1u64 << n) - 1;
    let key_of = |mut index: u64, key: &mut [u64]| {
        for slot in key.iter_mut().rev() {
            *slot = index & mask;
            index >>= n;
        }
    };
    let values = if r * n <= 64 {
        let eval = VDimEvaluator::new(s);
        (0..size)
            .into_par_iter()
            .map_init(
                || vec![0u64; coords],
                |key, index| {
                    key_of(index, key);
                    eval.eval(r, key)
                },
            )
            .collect()
    } else {
        (0..size)
            .into_par_iter()
            .map(|index| {
                let omega = OmegaTuple::from_canonical_index(n, r, index);
                v_dim_invariant_dense(s, &omega)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(Fingerprint { n, r, values })
}

#[derive(Serialize)]
struct FingerprintRecord {
    omega: Vec<u64>,
    dim: u32,
}

#[derive(Serialize)]
struct FingerprintDocument<'a> {
    format: &'a str,
    version: u32,
    n: usize,
    r: usize,
    records: Vec<FingerprintRecord>,
}

impl Fingerprint {
    /// `(key, dim)` pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u64>, u32)> + '_ {
        let coords = coordinate_count(self.r);
        let mask = (1u64 << self.n) - 1;
        self.values.iter().enumerate().map(move |(index, &v)| {
            let mut key = vec![0u64; coords];
            let mut rest = index as u64;
            for slot in key.iter_mut().rev() {
                *slot = rest & mask;
                rest >>= self.n;
            }
            (key, v)
        })
    }

    /// Header line `lc-fingerprint v1 n=<n> r=<r>`, then one line per entry:
    /// the key's integers separated by spaces, ` : `, the dimension.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = format!(
            "{FINGERPRINT_FORMAT} v{FINGERPRINT_VERSION} n={} r={}\n",
            self.n, self.r
        );
        for (key, v) in self.entries() {
            for (i, k) in key.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write!(out, "{k}").unwrap();
            }
            writeln!(out, " : {v}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty fingerprint".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let expected_version = format!("v{FINGERPRINT_VERSION}");
        let (n, r) = match fields[..] {
            [fmt, ver, n, r] if fmt == FINGERPRINT_FORMAT && ver == expected_version => {
                let num = |f: &str, p: &str| -> Result<usize> {
                    f.strip_prefix(p)
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad header field {f:?}")))
                };
                (num(n, "n=")?, num(r, "r=")?)
            }
            _ => return Err(Error::Parse(format!("bad fingerprint header {header:?}"))),
        };
        let mut values = Vec::new();
        for (expected, line) in lines.enumerate() {
            let (key, v) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad record {line:?}")))?;
            let key = key
                .split_whitespace()
                .map(|k| k.parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("bad key in {line:?}")))?;
            let omega = OmegaTuple::from_key(n, r, &key)?;
            if omega.canonical_index() != expected as u128 {
                return Err(Error::Parse(format!(
                    "record {line:?} out of canonical order"
                )));
            }
            values.push(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad value in {line:?}")))?,
            );
        }
        if Some(values.len() as u128) != fingerprint_size(n, r) {
            return Err(Error::Parse(format!(
                "fingerprint has {} records, expected {:?}",
                values.len(),
                fingerprint_size(n, r)
            )));
        }
        Ok(Self { n, r, values })
    }

    /// Serializable view for structured output.
    pub fn document(&self) -> impl Serialize + '_ {
        FingerprintDocument {
            format: FINGERPRINT_FORMAT,
            version: FINGERPRINT_VERSION,
            n: self.n,
            r: self.r,
            records: self
                .entries()
                .map(|(omega, dim)| FingerprintRecord { omega, dim })
                .collect(),
        }
    }
}
