//! Dense-matrix cross-checks for small registers.
//!
//! Basis index bit `n - 1 - i` holds qubit `i` (0-based), so qubit 1 is the
//! most significant tensor factor. Reduced operators are re-embedded on the
//! full register as `reduced ⊗ I` on the traced qubits, which keeps products
//! of reductions over different subsets well typed.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariants::OmegaTuple;
use crate::stabilizer::{PauliVector, QubitSet, Stabilizer};

/// Largest register the dense routines accept.
pub const MAX_DENSE_QUBITS: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A `2^n x 2^n` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    data: Vec<Complex64>,
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Budget {
            what: "dense qubit",
            needed: n as u128,
            limit: MAX_DENSE_QUBITS as u128,
        });
    }
    Ok(())
}

impl DenseOperator {
    pub fn zeros(n: usize) -> Self {
        let dim = 1usize << n;
        Self {
            n,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        let dim = m.dim();
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn mul(&self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, rhs.n, "operator sizes differ");
        let dim = self.dim();
        let mut out = Self::zeros(self.n);
        out.data
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, row)| {
                for k in 0..dim {
                    let a = self.data[i * dim + k];
                    if a == ZERO {
                        continue;
                    }
                    for (dst, b) in row.iter_mut().zip(&rhs.data[k * dim..(k + 1) * dim]) {
                        *dst += a * b;
                    }
                }
            });
        out
    }

    pub fn sub(&self, rhs: &DenseOperator) -> DenseOperator {
        assert_eq!(self.n, rhs.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn adjoint(&self) -> DenseOperator {
        let dim = self.dim();
        let mut out = Self::zeros(self.n);
        for r in 0..dim {
            for c in 0..dim {
                out.data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Tr(self * rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &DenseOperator) -> Complex64 {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|k| self.get(i, k) * rhs.get(k, i))
                    .sum::<Complex64>()
            })
            .sum()
    }

    /// Left multiplication by a phase-free Pauli operator.
    pub fn pauli_mul(&self, p: &PauliVector) -> DenseOperator {
        assert_eq!(p.n(), self.n);
        let (z, x, ys) = basis_masks(p);
        let dim = self.dim();
        let base = Complex64::i().powu(ys);
        let mut out = Self::zeros(self.n);
        for b in 0..dim {
            let sign = if (z & b).count_ones() % 2 == 1 {
                -base
            } else {
                base
            };
            let dst = (b ^ x) * dim;
            for c in 0..dim {
                out.data[dst + c] = sign * self.data[b * dim + c];
            }
        }
        out
    }
}

/// Z and X masks in basis-index bit positions plus the Y count.
fn basis_masks(p: &PauliVector) -> (usize, usize, u32) {
    let n = p.n();
    let (mut z, mut x, mut ys) = (0usize, 0usize, 0u32);
    for q in 0..n {
        let bit = 1 << (n - 1 - q);
        let (pz, px) = p.pair(q);
        if pz {
            z |= bit;
        }
        if px {
            x |= bit;
        }
        ys += (pz & px) as u32;
    }
    (z, x, ys)
}

/// The matrix of a phase-free Pauli operator (`Y` is `σ_y`).
pub fn pauli_matrix(p: &PauliVector) -> Result<DenseOperator> {
    check_size(p.n())?;
    Ok(DenseOperator::identity(p.n()).pauli_mul(p))
}

/// `Π_a (I + g_a) / 2` over the generators, all with sign +1.
pub fn projector(s: &Stabilizer) -> Result<DenseOperator> {
    check_size(s.n())?;
    let mut p = DenseOperator::identity(s.n());
    for g in s.generators() {
        let gp = p.pauli_mul(&g);
        for (a, b) in p.data.iter_mut().zip(&gp.data) {
            *a = (*a + b) * 0.5;
        }
    }
    Ok(p)
}

/// Traces out `traced` and re-embeds the result as `reduced ⊗ I`.
pub fn partial_trace(m: &DenseOperator, traced: &QubitSet) -> Result<DenseOperator> {
    if traced.universe() != m.n() {
        return Err(Error::Dimension(format!(
            "traced set over {} qubits for a {}-qubit operator",
            traced.universe(),
            m.n()
        )));
    }
    let n = m.n();
    let dim = m.dim();
    let tmask = traced.iter().fold(0usize, |acc, q| acc | 1 << (n - 1 - q));
    let keep = !tmask & (dim - 1);
    let subs: Vec<usize> = {
        let mut v = Vec::with_capacity(1 << traced.len());
        let mut t = tmask;
        loop {
            v.push(t);
            if t == 0 {
                break;
            }
            t = (t - 1) & tmask;
        }
        v
    };
    let mut out = DenseOperator::zeros(n);
    for i in 0..dim {
        for j in (0..dim).filter(|j| j & tmask == i & tmask) {
            let (ia, ja) = (i & keep, j & keep);
            out.data[i * dim + j] = subs.iter().map(|&t| m.get(ia | t, ja | t)).sum();
        }
    }
    Ok(out)
}

/// Traces out `traced` and returns the operator on the remaining qubits
/// (kept in their original order).
pub fn reduce(m: &DenseOperator, traced: &QubitSet) -> Result<DenseOperator> {
    let embedded = partial_trace(m, traced)?;
    let n = m.n();
    let kept: Vec<usize> = traced.complement().iter().collect();
    let (small_n, dim) = (kept.len(), m.dim());
    // Embedded entries with all traced bits zero carry the reduced operator.
    let spread = |idx: usize| {
        kept.iter().enumerate().fold(0usize, |acc, (pos, &q)| {
            acc | ((idx >> (small_n - 1 - pos)) & 1) << (n - 1 - q)
        })
    };
    let mut out = DenseOperator::zeros(small_n);
    let small_dim = out.dim();
    for i in 0..small_dim {
        for j in 0..small_dim {
            out.data[i * small_dim + j] = embedded.data[spread(i) * dim + spread(j)];
        }
    }
    Ok(out)
}

/// `Tr{(Tr_{ω̄¹}Ψ)(Tr_{ω̄²}Ψ)(Tr_{ω̄¹²}Ψ)}` with reductions embedded on the
/// full register.
pub fn lu_trace_invariant(s: &Stabilizer, omega: &OmegaTuple) -> Result<f64> {
    if omega.r() != 2 {
        return Err(Error::Invalid(format!(
            "trace invariant needs r = 2, got r = {}",
            omega.r()
        )));
    }
    if omega.n() != s.n() {
        return Err(Error::Dimension(format!(
            "constraint tuple over {} qubits for a {}-qubit state",
            omega.n(),
            s.n()
        )));
    }
    let psi = projector(s)?;
    let a = partial_trace(&psi, &omega.single(0).complement())?;
    let b = partial_trace(&psi, &omega.single(1).complement())?;
    let c = partial_trace(&psi, &omega.pair(0, 1).complement())?;
    Ok(a.mul(&b).trace_product(&c).re)
}
