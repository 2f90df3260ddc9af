//! Dense vectors and square matrices over F_p.
//!
//! Vectors are rows and multiply matrices from the left (`v·A`), so a linear
//! map `T` with matrix `M` acts as `T(v) = v·M` and acts on a matrix row by row.
//!
//! Operation budgets (all tallied, none skipped):
//! - `vec_mat_mul`: n² muls, n(n−1) adds
//! - `mat_mat_mul`: n³ muls, n²(n−1) adds
//! - `gauss_jordan_inverse`: 2n³ muls, 2n³−2n² adds, n inversions

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gfp::{Fe, Prime, Tally, Untallied};

/// Default retry cap for [`sample_nonsingular`].
pub const DEFAULT_SAMPLE_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    prime: Prime,
    entries: Vec<Fe>,
}

/// Row-major n×n matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    prime: Prime,
    n: usize,
    data: Vec<Fe>,
}

fn check_prime(a: Prime, b: Prime) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModulusMismatch {
            left: a.value(),
            right: b.value(),
        })
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

impl Vector {
    pub fn new(prime: Prime, entries: Vec<Fe>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ZeroDimension);
        }
        for e in &entries {
            prime.element(e.value())?;
        }
        Ok(Vector { prime, entries })
    }

    /// Build from residues, rejecting any entry outside `[0, p)`.
    pub fn from_u64s(prime: Prime, entries: &[u64]) -> Result<Self> {
        let entries = entries
            .iter()
            .map(|&x| prime.element(x))
            .collect::<Result<Vec<_>>>()?;
        Vector::new(prime, entries)
    }

    /// Build from signed integers, lifting negatives mod p.
    pub fn from_i64s(prime: Prime, entries: &[i64]) -> Result<Self> {
        Vector::new(
            prime,
            entries.iter().map(|&x| prime.reduce_signed(x)).collect(),
        )
    }

    pub fn zero(prime: Prime, n: usize) -> Result<Self> {
        Vector::new(prime, vec![Fe::ZERO; n])
    }

    pub fn random<R: Rng + ?Sized>(prime: Prime, n: usize, rng: &mut R) -> Result<Self> {
        Vector::new(
            prime,
            (0..n)
                .map(|_| Fe(rng.gen_range(0..prime.value())))
                .collect(),
        )
    }

    pub fn random_nonzero<R: Rng + ?Sized>(prime: Prime, n: usize, rng: &mut R) -> Result<Self> {
        loop {
            let v = Vector::random(prime, n, rng)?;
            if !v.is_zero() {
                return Ok(v);
            }
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn to_u64s(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.value()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Componentwise `self ⊕ other`: n adds.
    pub fn add<T: Tally + ?Sized>(&self, other: &Vector, t: &mut T) -> Result<Vector> {
        self.zip_with(other, |p, a, b| p.add(a, b, t))
    }

    /// Componentwise `self ⊖ other`: n adds.
    pub fn sub<T: Tally + ?Sized>(&self, other: &Vector, t: &mut T) -> Result<Vector> {
        self.zip_with(other, |p, a, b| p.sub(a, b, t))
    }

    fn zip_with(&self, other: &Vector, mut f: impl FnMut(Prime, Fe, Fe) -> Fe) -> Result<Vector> {
        check_prime(self.prime, other.prime)?;
        check_dim(self.len(), other.len())?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(self.prime, a, b))
            .collect();
        Ok(Vector {
            prime: self.prime,
            entries,
        })
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl Matrix {
    pub fn from_rows(prime: Prime, rows: Vec<Vec<Fe>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            for e in row {
                data.push(prime.element(e.value())?);
            }
        }
        Ok(Matrix { prime, n, data })
    }

    pub fn from_u64_rows(prime: Prime, rows: &[&[u64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| prime.element(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(prime, rows)
    }

    /// Build from signed integers, lifting negatives mod p.
    pub fn from_i64_rows(prime: Prime, rows: &[&[i64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| prime.reduce_signed(x)).collect())
            .collect();
        Matrix::from_rows(prime, rows)
    }

    /// Matrix whose rows are the given vectors.
    pub fn from_row_vectors(rows: &[Vector]) -> Result<Self> {
        let first = rows.first().ok_or(Error::ZeroDimension)?;
        for r in rows {
            check_prime(first.prime, r.prime)?;
        }
        Matrix::from_rows(
            first.prime,
            rows.iter().map(|r| r.entries.clone()).collect(),
        )
    }

    pub fn zero(prime: Prime, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Matrix {
            prime,
            n,
            data: vec![Fe::ZERO; n * n],
        })
    }

    pub fn identity(prime: Prime, n: usize) -> Result<Self> {
        let mut m = Matrix::zero(prime, n)?;
        for i in 0..n {
            m.data[i * n + i] = Fe::ONE;
        }
        Ok(m)
    }

    /// Uniformly random matrix (possibly singular).
    pub fn random<R: Rng + ?Sized>(prime: Prime, n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let data = (0..n * n)
            .map(|_| Fe(rng.gen_range(0..prime.value())))
            .collect();
        Ok(Matrix { prime, n, data })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Fe {
        self.data[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[Fe] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    pub fn row_vector(&self, row: usize) -> Vector {
        Vector {
            prime: self.prime,
            entries: self.row(row).to_vec(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Fe]> {
        self.data.chunks(self.n)
    }

    pub fn to_u64_rows(&self) -> Vec<Vec<u64>> {
        self.rows()
            .map(|r| r.iter().map(|e| e.value()).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n)
            .all(|i| (0..self.n).all(|j| self.get(i, j) == if i == j { Fe::ONE } else { Fe::ZERO }))
    }

    pub fn is_nonsingular(&self) -> bool {
        !determinant(self).is_zero()
    }

    /// `self^k` by square-and-multiply, uncounted.
    pub fn pow(&self, mut k: u64) -> Matrix {
        let mut acc = Matrix::identity(self.prime, self.n).expect("n >= 1");
        let mut base = self.clone();
        let mut t = Untallied;
        while k > 0 {
            if k & 1 == 1 {
                acc = mat_mat_mul(&acc, &base, &mut t).expect("same shape");
            }
            k >>= 1;
            if k > 0 {
                base = mat_mat_mul(&base, &base, &mut t).expect("same shape");
            }
        }
        acc
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "]")
    }
}

/// Row vector times matrix, `v·A`.
pub fn vec_mat_mul<T: Tally + ?Sized>(v: &Vector, a: &Matrix, t: &mut T) -> Result<Vector> {
    check_prime(v.prime, a.prime)?;
    check_dim(a.n, v.len())?;
    let p = a.prime;
    let n = a.n;
    let entries = (0..n)
        .map(|j| {
            let mut acc = p.mul(v.entries[0], a.get(0, j), t);
            for k in 1..n {
                let term = p.mul(v.entries[k], a.get(k, j), t);
                acc = p.add(acc, term, t);
            }
            acc
        })
        .collect();
    Ok(Vector { prime: p, entries })
}

/// Matrix product `A·B`. Each row of the result is `row·B`.
pub fn mat_mat_mul<T: Tally + ?Sized>(a: &Matrix, b: &Matrix, t: &mut T) -> Result<Matrix> {
    check_prime(a.prime, b.prime)?;
    check_dim(a.n, b.n)?;
    let mut data = Vec::with_capacity(a.n * a.n);
    for i in 0..a.n {
        data.extend(vec_mat_mul(&a.row_vector(i), b, t)?.entries);
    }
    Ok(Matrix {
        prime: a.prime,
        n: a.n,
        data,
    })
}

/// Determinant by Gaussian elimination, pivoting on the first nonzero entry
/// of each column. Not counted.
pub fn determinant(a: &Matrix) -> Fe {
    let p = a.prime;
    let n = a.n;
    let mut t = Untallied;
    let mut m = a.data.clone();
    let mut det = Fe::ONE;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
            return Fe::ZERO;
        };
        if pivot != col {
            for j in 0..n {
                m.swap(pivot * n + j, col * n + j);
            }
            det = p.neg(det);
        }
        let pv = m[col * n + col];
        det = p.mul(det, pv, &mut t);
        let pv_inv = p.inv(pv, &mut t).expect("pivot is nonzero");
        for r in col + 1..n {
            let f = p.mul(m[r * n + col], pv_inv, &mut t);
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let sub = p.mul(f, m[col * n + j], &mut t);
                m[r * n + j] = p.sub(m[r * n + j], sub, &mut t);
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan elimination on the augmented system `[A | I]`.
///
/// Per pivot column `i`:
/// 1. take the first row `r >= i` with a nonzero entry in column `i`, swap it up;
/// 2. invert the pivot (1 inversion) and scale all 2n entries of the pivot row (2n muls);
/// 3. for each of the other n−1 rows, subtract `f·pivot_row` from all 2n
///    entries, where `f` is that row's entry in column `i` (2n muls, 2n adds per row).
///
/// Summed over n pivots: 2n³ muls, 2n³−2n² adds, n inversions. No product is
/// skipped even when `f` or an entry is zero, so the tally is exact for every input.
pub fn gauss_jordan_inverse<T: Tally + ?Sized>(a: &Matrix, t: &mut T) -> Result<Matrix> {
    let p = a.prime;
    let n = a.n;
    let w = 2 * n;
    let mut aug = vec![Fe::ZERO; n * w];
    for i in 0..n {
        aug[i * w..i * w + n].copy_from_slice(a.row(i));
        aug[i * w + n + i] = Fe::ONE;
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !aug[r * w + col].is_zero())
            .ok_or(Error::Singular)?;
        if pivot != col {
            for j in 0..w {
                aug.swap(pivot * w + j, col * w + j);
            }
        }
        let pv_inv = p.inv(aug[col * w + col], t)?;
        for j in 0..w {
            aug[col * w + j] = p.mul(aug[col * w + j], pv_inv, t);
        }
        for r in (0..n).filter(|&r| r != col) {
            let f = aug[r * w + col];
            for j in 0..w {
                let sub = p.mul(f, aug[col * w + j], t);
                aug[r * w + j] = p.sub(aug[r * w + j], sub, t);
            }
        }
    }
    let data = aug
        .chunks(w)
        .flat_map(|row| row[n..].iter().copied())
        .collect();
    Ok(Matrix { prime: p, n, data })
}

/// Rejection-sample a uniformly random non-singular matrix.
pub fn sample_nonsingular<R: Rng + ?Sized>(n: usize, prime: Prime, rng: &mut R) -> Result<Matrix> {
    sample_nonsingular_tracked(n, prime, rng, DEFAULT_SAMPLE_ATTEMPTS).map(|(m, _)| m)
}

/// Like [`sample_nonsingular`], also returning how many raw draws were needed.
pub fn sample_nonsingular_tracked<R: Rng + ?Sized>(
    n: usize,
    prime: Prime,
    rng: &mut R,
    max_attempts: usize,
) -> Result<(Matrix, usize)> {
    for attempt in 1..=max_attempts {
        let m = Matrix::random(prime, n, rng)?;
        if m.is_nonsingular() {
            return Ok((m, attempt));
        }
    }
    Err(Error::SamplingExhausted(max_attempts))
}

/// Exact probability that a uniform n×n matrix over F_p is invertible:
/// `∏_{k=1}^{n} (1 − p^{−k})`.
pub fn nonsingular_probability(n: usize, prime: Prime) -> BigRational {
    let p = BigUint::from(prime.value());
    let mut acc = BigRational::one();
    for k in 1..=n {
        let pk: BigUint = Pow::pow(&p, k);
        let num = &pk - BigUint::one();
        acc *= BigRational::new(num.into(), pk.into());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::OpCounts;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn a1() -> Matrix {
        Matrix::from_u64_rows(p(29), &[&[1, 2, 0], &[3, 1, 0], &[1, 28, 4]]).unwrap()
    }

    fn t_matrix() -> Matrix {
        Matrix::from_i64_rows(p(29), &[&[1, 0, 1], &[1, 3, -1], &[0, 1, 1]]).unwrap()
    }

    /// All n×n matrices over F_p, as integer rows.
    fn all_matrices(pv: u64, n: usize) -> Vec<Matrix> {
        let total = pv.pow((n * n) as u32);
        (0..total)
            .map(|mut code| {
                let data: Vec<u64> = (0..n * n)
                    .map(|_| {
                        let d = code % pv;
                        code /= pv;
                        d
                    })
                    .collect();
                let rows: Vec<&[u64]> = data.chunks(n).collect();
                Matrix::from_u64_rows(p(pv), &rows).unwrap()
            })
            .collect()
    }

    #[test]
    fn vec_mat_examples() {
        let mut t = Untallied;
        let v = Vector::from_u64s(p(29), &[14, 1, 22]).unwrap();
        assert_eq!(
            vec_mat_mul(&v, &a1(), &mut t).unwrap().to_u64s(),
            vec![10, 7, 1]
        );
        let id = Matrix::identity(p(29), 3).unwrap();
        assert_eq!(vec_mat_mul(&v, &id, &mut t).unwrap(), v);
        let v = Vector::from_u64s(p(5), &[1, 1]).unwrap();
        let a = Matrix::from_u64_rows(p(5), &[&[4, 2], &[0, 3]]).unwrap();
        assert_eq!(vec_mat_mul(&v, &a, &mut t).unwrap().to_u64s(), vec![4, 0]);
    }

    #[test]
    fn dimension_and_modulus_mismatch() {
        let mut t = Untallied;
        let v = Vector::from_u64s(p(29), &[1, 2]).unwrap();
        assert_eq!(
            vec_mat_mul(&v, &a1(), &mut t),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        );
        let v = Vector::from_u64s(p(31), &[1, 2, 3]).unwrap();
        assert_eq!(
            vec_mat_mul(&v, &a1(), &mut t),
            Err(Error::ModulusMismatch {
                left: 31,
                right: 29
            })
        );
        let b = Matrix::identity(p(29), 2).unwrap();
        assert!(mat_mat_mul(&a1(), &b, &mut t).is_err());
        assert!(Vector::from_u64s(p(29), &[29]).is_err());
    }

    #[test]
    fn mat_mat_examples() {
        let mut t = Untallied;
        let id = Matrix::identity(p(29), 3).unwrap();
        assert_eq!(mat_mat_mul(&a1(), &id, &mut t).unwrap(), a1());
        let a2 = mat_mat_mul(&a1(), &t_matrix(), &mut t).unwrap();
        assert_eq!(
            a2.to_u64_rows(),
            vec![vec![3, 6, 28], vec![4, 3, 2], vec![0, 1, 6]]
        );
        let m = Matrix::from_u64_rows(p(2), &[&[1, 1], &[0, 1]]).unwrap();
        assert!(mat_mat_mul(&m, &m, &mut t).unwrap().is_identity());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&Matrix::identity(p(29), 4).unwrap()), Fe::ONE);
        assert!(!determinant(&a1()).is_zero());
        let a = Matrix::from_u64_rows(p(5), &[&[4, 2], &[0, 3]]).unwrap();
        assert_eq!(determinant(&a), Fe(2));
        // needs a row swap: det [[0,1],[1,0]] = -1
        let s = Matrix::from_u64_rows(p(7), &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(determinant(&s), Fe(6));
    }

    #[test]
    fn inverse_examples() {
        let mut t = OpCounts::default();
        let id = Matrix::identity(p(29), 3).unwrap();
        assert_eq!(gauss_jordan_inverse(&id, &mut t).unwrap(), id);
        assert_eq!(t.invs, 3);

        let inv = gauss_jordan_inverse(&a1(), &mut Untallied).unwrap();
        assert!(mat_mat_mul(&inv, &a1(), &mut Untallied)
            .unwrap()
            .is_identity());

        // brute-forced over all 625 matrices mod 5
        let a = Matrix::from_u64_rows(p(5), &[&[4, 2], &[0, 3]]).unwrap();
        let inv = gauss_jordan_inverse(&a, &mut Untallied).unwrap();
        assert_eq!(inv.to_u64_rows(), vec![vec![4, 4], vec![0, 2]]);
    }

    #[test]
    fn inverse_of_singular_fails() {
        let s = Matrix::from_u64_rows(p(29), &[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(
            gauss_jordan_inverse(&s, &mut Untallied),
            Err(Error::Singular)
        );
    }

    #[test]
    fn determinant_agrees_with_invertibility_exhaustively() {
        for pv in [2, 3] {
            for m in all_matrices(pv, 2) {
                let det_nonzero = !determinant(&m).is_zero();
                let inv = gauss_jordan_inverse(&m, &mut Untallied);
                assert_eq!(det_nonzero, inv.is_ok(), "{m}");
                // cofactor oracle
                let r = m.to_u64_rows();
                let cof = (r[0][0] * r[1][1] + pv * pv - r[0][1] * r[1][0] % pv) % pv;
                assert_eq!(determinant(&m).value(), cof, "{m}");
            }
        }
    }

    #[test]
    fn inverse_budget_is_exact_for_all_sizes() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for n in 1..=8u64 {
            let a = sample_nonsingular(n as usize, p(29), &mut rng).unwrap();
            let mut t = OpCounts::default();
            gauss_jordan_inverse(&a, &mut t).unwrap();
            assert_eq!(
                t,
                OpCounts::new(2 * n * n * n - 2 * n * n, 2 * n * n * n, n),
                "n={n}"
            );
        }
    }

    #[test]
    fn product_budgets_are_exact() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for n in 1..=6u64 {
            let a = Matrix::random(p(29), n as usize, &mut rng).unwrap();
            let b = Matrix::random(p(29), n as usize, &mut rng).unwrap();
            let v = Vector::random(p(29), n as usize, &mut rng).unwrap();
            let mut t = OpCounts::default();
            vec_mat_mul(&v, &a, &mut t).unwrap();
            assert_eq!(t, OpCounts::new(n * n - n, n * n, 0));
            let mut t = OpCounts::default();
            mat_mat_mul(&a, &b, &mut t).unwrap();
            assert_eq!(t, OpCounts::new(n * n * n - n * n, n * n * n, 0));
        }
    }

    #[test]
    fn sample_nonsingular_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = sample_nonsingular(1, p(2), &mut rng).unwrap();
            assert_eq!(m.to_u64_rows(), vec![vec![1]]);
        }
        // 6 of the 16 binary 2×2 matrices are invertible
        let invertible = all_matrices(2, 2)
            .iter()
            .filter(|m| m.is_nonsingular())
            .count();
        assert_eq!(invertible, 6);
        let trials = 10_000;
        let hits = (0..trials)
            .filter(|_| Matrix::random(p(2), 2, &mut rng).unwrap().is_nonsingular())
            .count();
        let rate = hits as f64 / trials as f64;
        assert!((rate - 0.375).abs() < 0.02, "rate {rate}");
        let hits = (0..trials)
            .filter(|_| Matrix::random(p(5), 2, &mut rng).unwrap().is_nonsingular())
            .count();
        let rate = hits as f64 / trials as f64;
        assert!((rate - 0.768).abs() < 0.02, "rate {rate}");
    }

    #[test]
    fn sampling_cap_reports_exhaustion() {
        struct Zeros;
        impl rand::RngCore for Zeros {
            fn next_u32(&mut self) -> u32 {
                0
            }
            fn next_u64(&mut self) -> u64 {
                0
            }
            fn fill_bytes(&mut self, d: &mut [u8]) {
                d.fill(0)
            }
            fn try_fill_bytes(&mut self, d: &mut [u8]) -> std::result::Result<(), rand::Error> {
                d.fill(0);
                Ok(())
            }
        }
        assert_eq!(
            sample_nonsingular(2, p(29), &mut Zeros),
            Err(Error::SamplingExhausted(DEFAULT_SAMPLE_ATTEMPTS))
        );
    }

    #[test]
    fn probability_examples() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(nonsingular_probability(1, p(2)), r(1, 2));
        assert_eq!(nonsingular_probability(2, p(2)), r(3, 8));
        assert_eq!(nonsingular_probability(2, p(5)), r(96, 125));
    }

    #[test]
    fn probability_times_space_is_group_order() {
        for (pv, n) in [(2u64, 1usize), (2, 3), (3, 2), (5, 3), (29, 4)] {
            let pb = BigUint::from(pv);
            let space: BigUint = Pow::pow(&pb, n * n);
            let pn: BigUint = Pow::pow(&pb, n);
            let mut gl = BigUint::one();
            for k in 0..n {
                let pk: BigUint = Pow::pow(&pb, k);
                gl *= &pn - pk;
            }
            let scaled =
                nonsingular_probability(n, p(pv)) * BigRational::from_integer(space.into());
            assert_eq!(scaled, BigRational::from_integer(gl.into()));
        }
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(seed in any::<u64>(), n in 1usize..6, pi in 0usize..3) {
            let prime = p([3, 29, 65537][pi]);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = sample_nonsingular(n, prime, &mut rng).unwrap();
            let inv = gauss_jordan_inverse(&a, &mut Untallied).unwrap();
            prop_assert!(mat_mat_mul(&a, &inv, &mut Untallied).unwrap().is_identity());
            prop_assert!(mat_mat_mul(&inv, &a, &mut Untallied).unwrap().is_identity());
        }

        #[test]
        fn product_is_associative(seed in any::<u64>(), n in 1usize..6) {
            let prime = p(29);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let v = Vector::random(prime, n, &mut rng).unwrap();
            let a = Matrix::random(prime, n, &mut rng).unwrap();
            let b = Matrix::random(prime, n, &mut rng).unwrap();
            let mut t = Untallied;
            let lhs = vec_mat_mul(&vec_mat_mul(&v, &a, &mut t).unwrap(), &b, &mut t).unwrap();
            let rhs = vec_mat_mul(&v, &mat_mat_mul(&a, &b, &mut t).unwrap(), &mut t).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
