//! Known-plaintext attacks, keyspace sizing and the completeness diagnostic.

use num_bigint::BigUint;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gfp::{Prime, Untallied};
use crate::keysched::{advance_chain, KeyMaterial};
use crate::matvec::{gauss_jordan_inverse, mat_mat_mul, vec_mat_mul, Matrix, Vector};

/// Largest matrix space the enumeration oracles will walk.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Plaintext blocks as rows of `X`, matching ciphertext blocks as rows of `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KpaSample {
    pub plaintexts: Matrix,
    pub ciphertexts: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KpaOutcome {
    Recovered(Matrix),
    /// `X` is singular; more plaintext/ciphertext pairs are needed.
    InsufficientData,
}

/// Solve `Y = X·K` for the fixed Hill key: `K = X⁻¹·Y`.
pub fn kpa_recover_hill(sample: &KpaSample) -> Result<KpaOutcome> {
    let (x, y) = (&sample.plaintexts, &sample.ciphertexts);
    if x.prime() != y.prime() {
        return Err(Error::ModulusMismatch {
            left: x.prime().value(),
            right: y.prime().value(),
        });
    }
    if x.order() != y.order() {
        return Err(Error::DimensionMismatch {
            expected: x.order(),
            got: y.order(),
        });
    }
    match gauss_jordan_inverse(x, &mut Untallied) {
        Ok(x_inv) => Ok(KpaOutcome::Recovered(mat_mat_mul(
            &x_inv,
            y,
            &mut Untallied,
        )?)),
        Err(Error::Singular) => Ok(KpaOutcome::InsufficientData),
        Err(e) => Err(e),
    }
}

/// Number of n×n matrices `A` (invertible or not) with `m′·A = c`.
///
/// Each column of `A` is constrained by one linear equation `m′·a_j = c_j`.
/// With `m′ ≠ 0` every column has `p^{n−1}` solutions; with `m′ = 0` the
/// system is either trivially satisfied (`c = 0`) or inconsistent.
pub fn variant_solution_count(m_prime: &Vector, c: &Vector) -> Result<BigUint> {
    if m_prime.prime() != c.prime() {
        return Err(Error::ModulusMismatch {
            left: m_prime.prime().value(),
            right: c.prime().value(),
        });
    }
    if m_prime.len() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: m_prime.len(),
            got: c.len(),
        });
    }
    let n = m_prime.len();
    let p = BigUint::from(m_prime.prime().value());
    let rank = usize::from(!m_prime.is_zero());
    if rank == 0 && !c.is_zero() {
        return Ok(BigUint::zero());
    }
    Ok(Pow::pow(&p, n * (n - rank)))
}

fn matrix_from_code(prime: Prime, n: usize, mut code: u64) -> Matrix {
    let pv = prime.value();
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let d = code % pv;
                    code /= pv;
                    d
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
    Matrix::from_u64_rows(prime, &refs).expect("digits are residues")
}

/// Size of the n×n matrix space, if it is small enough to enumerate.
pub fn enumerable_space(n: usize, prime: Prime) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..n * n {
        total = total.checked_mul(prime.value())?;
        if total > ENUMERATION_LIMIT {
            return None;
        }
    }
    Some(total)
}

/// Exhaustively count matrices with `m′·A = c`, optionally only invertible ones.
/// Returns `None` when the space exceeds [`ENUMERATION_LIMIT`].
pub fn enumerate_solution_count(
    m_prime: &Vector,
    c: &Vector,
    invertible_only: bool,
) -> Option<u64> {
    let prime = m_prime.prime();
    let n = m_prime.len();
    let total = enumerable_space(n, prime)?;
    let count = (0..total)
        .map(|code| matrix_from_code(prime, n, code))
        .filter(|a| vec_mat_mul(m_prime, a, &mut Untallied).ok().as_ref() == Some(c))
        .filter(|a| !invertible_only || a.is_nonsingular())
        .count();
    Some(count as u64)
}

/// Exhaustively count |GL(n, p)|. Returns `None` when the space is too large.
pub fn enumerate_general_linear(n: usize, prime: Prime) -> Option<u64> {
    let total = enumerable_space(n, prime)?;
    Some(
        (0..total)
            .filter(|&code| matrix_from_code(prime, n, code).is_nonsingular())
            .count() as u64,
    )
}

/// Brute-force search space for the dynamic scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyspaceSize {
    pub prime: Prime,
    pub n: usize,
    /// Number of ordered bases of F_p^n, `N = ∏_{k<n} (pⁿ − p^k)` (= |GL(n, p)|).
    pub bases: BigUint,
    /// Number of `(I, B, T)` triplets, `L = pⁿ·N²`.
    pub triplets: BigUint,
}

impl KeyspaceSize {
    pub fn log2_bases(&self) -> f64 {
        log2_big(&self.bases)
    }

    pub fn log2_triplets(&self) -> f64 {
        log2_big(&self.triplets)
    }
}

pub fn keyspace_size(n: usize, prime: Prime) -> KeyspaceSize {
    let p = BigUint::from(prime.value());
    let pn: BigUint = Pow::pow(&p, n);
    let mut bases = BigUint::one();
    for k in 0..n {
        let pk: BigUint = Pow::pow(&p, k);
        bases *= &pn - pk;
    }
    let triplets = &pn * &bases * &bases;
    KeyspaceSize {
        prime,
        n,
        bases,
        triplets,
    }
}

/// log₂ of a positive big integer, accurate to f64 precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("at most 64 bits");
    (top as f64).log2() + shift as f64
}

/// Which whitened symbols each ciphertext symbol depends on:
/// `depends[k][j]` is true when `c_j` involves `m′_k`, i.e. `A[k][j] ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessMap {
    pub depends: Vec<Vec<bool>>,
}

impl CompletenessMap {
    /// Every ciphertext symbol depends on every plaintext symbol.
    pub fn is_complete(&self) -> bool {
        self.depends.iter().all(|row| row.iter().all(|&d| d))
    }

    /// `(k, j)` pairs, 1-based, where `c_j` does not depend on `m′_k`.
    pub fn missing(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, row) in self.depends.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if !d {
                    out.push((k + 1, j + 1));
                }
            }
        }
        out
    }
}

pub fn completeness_map(a: &Matrix) -> CompletenessMap {
    CompletenessMap {
        depends: a
            .rows()
            .map(|row| row.iter().map(|e| !e.is_zero()).collect())
            .collect(),
    }
}

/// Fraction of the first `blocks` chain keys with no zero entries.
pub fn chain_completeness(km: &KeyMaterial, blocks: usize) -> f64 {
    if blocks == 0 {
        return 0.0;
    }
    let mut state = km.initial_state();
    let mut complete = 0;
    for i in 0..blocks {
        if completeness_map(&state.key).is_complete() {
            complete += 1;
        }
        if i + 1 < blocks {
            state = advance_chain(km, &state, &mut Untallied);
        }
    }
    complete as f64 / blocks as f64
}
