//! Block encryption and decryption.
//!
//! Block `i` is whitened and then multiplied by its key:
//! `c_i = (m_i ⊕ I_i)·A_i`, and decrypted as `m_i = (c_i·A_i⁻¹) ⊖ I_i`, with
//! `A_i⁻¹` recomputed for every block.
//!
//! [`Encryptor`] and [`Decryptor`] own the chain state and advance it lazily,
//! right before each block after the first, so a message of `b` blocks pays
//! for exactly `b − 1` key updates.

use crate::error::{Error, Result};
use crate::gfp::{Tally, Untallied};
use crate::keysched::{advance_chain, ChainState, KeyMaterial};
use crate::matvec::{gauss_jordan_inverse, vec_mat_mul, Matrix, Vector};

pub type PlainBlock = Vector;
pub type WhitenedBlock = Vector;
pub type CipherBlock = Vector;

/// Whiten and encrypt one block with the key and whitening vector of `state`.
/// Costs n² muls and n² adds.
pub fn encrypt_block<T: Tally + ?Sized>(
    state: &ChainState,
    m: &PlainBlock,
    t: &mut T,
) -> Result<CipherBlock> {
    let whitened = m.add(&state.whitening, t)?;
    vec_mat_mul(&whitened, &state.key, t)
}

/// Decrypt one block. Costs 2n³+n² muls, 2n³−n² adds and n inversions.
pub fn decrypt_block<T: Tally + ?Sized>(
    state: &ChainState,
    c: &CipherBlock,
    t: &mut T,
) -> Result<PlainBlock> {
    if c.len() != state.key.order() {
        return Err(Error::DimensionMismatch {
            expected: state.key.order(),
            got: c.len(),
        });
    }
    let inverse = gauss_jordan_inverse(&state.key, t)
        .expect("chain keys are invertible for valid key material");
    vec_mat_mul(c, &inverse, t)?.sub(&state.whitening, t)
}

/// Streaming encryption session over one message.
#[derive(Debug, Clone)]
pub struct Encryptor<'k> {
    km: &'k KeyMaterial,
    state: ChainState,
    started: bool,
}

impl<'k> Encryptor<'k> {
    pub fn new(km: &'k KeyMaterial) -> Self {
        Encryptor {
            km,
            state: km.initial_state(),
            started: false,
        }
    }

    /// State that the next block will use.
    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn encrypt_next<T: Tally + ?Sized>(
        &mut self,
        m: &PlainBlock,
        t: &mut T,
    ) -> Result<CipherBlock> {
        if self.started {
            self.state = advance_chain(self.km, &self.state, t);
        }
        self.started = true;
        encrypt_block(&self.state, m, t)
    }
}

/// Streaming decryption session over one message.
#[derive(Debug, Clone)]
pub struct Decryptor<'k> {
    km: &'k KeyMaterial,
    state: ChainState,
    started: bool,
}

impl<'k> Decryptor<'k> {
    pub fn new(km: &'k KeyMaterial) -> Self {
        Decryptor {
            km,
            state: km.initial_state(),
            started: false,
        }
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn decrypt_next<T: Tally + ?Sized>(
        &mut self,
        c: &CipherBlock,
        t: &mut T,
    ) -> Result<PlainBlock> {
        if self.started {
            self.state = advance_chain(self.km, &self.state, t);
        }
        self.started = true;
        decrypt_block(&self.state, c, t)
    }
}

pub fn encrypt_message<T: Tally + ?Sized>(
    km: &KeyMaterial,
    blocks: &[PlainBlock],
    t: &mut T,
) -> Result<Vec<CipherBlock>> {
    let mut enc = Encryptor::new(km);
    blocks.iter().map(|m| enc.encrypt_next(m, t)).collect()
}

pub fn decrypt_message<T: Tally + ?Sized>(
    km: &KeyMaterial,
    blocks: &[CipherBlock],
    t: &mut T,
) -> Result<Vec<PlainBlock>> {
    let mut dec = Decryptor::new(km);
    blocks.iter().map(|c| dec.decrypt_next(c, t)).collect()
}

/// Fixed-key Hill cipher over F_p, the baseline the dynamic scheme improves on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalHillKey {
    key: Matrix,
    inverse: Matrix,
}

impl ClassicalHillKey {
    /// The inverse is computed once here and not tallied.
    pub fn new(key: Matrix) -> Result<Self> {
        let inverse = gauss_jordan_inverse(&key, &mut Untallied)?;
        Ok(ClassicalHillKey { key, inverse })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.key
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }
}

/// `x·K`.
pub fn hill_encrypt<T: Tally + ?Sized>(
    k: &ClassicalHillKey,
    m: &PlainBlock,
    t: &mut T,
) -> Result<CipherBlock> {
    vec_mat_mul(m, &k.key, t)
}

/// `y·K⁻¹`.
pub fn hill_decrypt<T: Tally + ?Sized>(
    k: &ClassicalHillKey,
    c: &CipherBlock,
    t: &mut T,
) -> Result<PlainBlock> {
    vec_mat_mul(c, &k.inverse, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::{OpCounts, Prime};
    use crate::keysched::keygen;
    use crate::matvec::sample_nonsingular;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn p(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn example_key() -> KeyMaterial {
        let prime = p(29);
        KeyMaterial::new(
            Matrix::from_i64_rows(prime, &[&[1, 0, 1], &[1, 3, -1], &[0, 1, 1]]).unwrap(),
            Matrix::from_i64_rows(prime, &[&[1, 2, 0], &[3, 1, 0], &[1, -1, 4]]).unwrap(),
            Vector::from_u64s(prime, &[2, 1, 5]).unwrap(),
        )
        .unwrap()
    }

    fn v(xs: &[u64]) -> Vector {
        Vector::from_u64s(p(29), xs).unwrap()
    }

    #[test]
    fn first_block() {
        let km = example_key();
        let c = encrypt_block(&km.initial_state(), &v(&[12, 0, 17]), &mut Untallied).unwrap();
        assert_eq!(c, v(&[10, 7, 1]));
        let m = decrypt_block(&km.initial_state(), &c, &mut Untallied).unwrap();
        assert_eq!(m, v(&[12, 0, 17]));
    }

    #[test]
    fn later_blocks() {
        let km = example_key();
        let mut state = km.initial_state();
        for _ in 0..3 {
            state = advance_chain(&km, &state, &mut Untallied);
        }
        assert_eq!(
            decrypt_block(&state, &v(&[18, 28, 25]), &mut Untallied).unwrap(),
            v(&[0, 17, 3])
        );
        state = advance_chain(
            &km,
            &advance_chain(&km, &state, &mut Untallied),
            &mut Untallied,
        );
        assert_eq!(
            encrypt_block(&state, &v(&[8, 21, 4]), &mut Untallied).unwrap(),
            v(&[0, 28, 6])
        );
    }

    #[test]
    fn zero_block_is_masked() {
        let km = example_key();
        let mut state = km.initial_state();
        for _ in 0..8 {
            let zero = Vector::zero(p(29), 3).unwrap();
            let c = encrypt_block(&state, &zero, &mut Untallied).unwrap();
            let expected = vec_mat_mul(&state.whitening, &state.key, &mut Untallied).unwrap();
            assert_eq!(c, expected);
            assert!(!c.is_zero());
            assert!(decrypt_block(&state, &c, &mut Untallied).unwrap().is_zero());
            state = advance_chain(&km, &state, &mut Untallied);
        }
    }

    #[test]
    fn message_helpers() {
        let km = example_key();
        assert!(encrypt_message(&km, &[], &mut Untallied)
            .unwrap()
            .is_empty());
        assert!(decrypt_message(&km, &[], &mut Untallied)
            .unwrap()
            .is_empty());
        let m1 = v(&[12, 0, 17]);
        let single = encrypt_message(&km, std::slice::from_ref(&m1), &mut Untallied).unwrap();
        let whitened = m1.add(km.initial_vector(), &mut Untallied).unwrap();
        let hill = ClassicalHillKey::new(km.initial_key().clone()).unwrap();
        assert_eq!(
            single[0],
            hill_encrypt(&hill, &whitened, &mut Untallied).unwrap()
        );
    }

    #[test]
    fn wrong_block_length() {
        let km = example_key();
        let short = Vector::from_u64s(p(29), &[1, 2]).unwrap();
        assert!(encrypt_message(&km, std::slice::from_ref(&short), &mut Untallied).is_err());
        assert!(decrypt_message(&km, &[short], &mut Untallied).is_err());
    }

    #[test]
    fn hill_examples() {
        let id = ClassicalHillKey::new(Matrix::identity(p(29), 3).unwrap()).unwrap();
        assert_eq!(
            hill_encrypt(&id, &v(&[4, 5, 6]), &mut Untallied).unwrap(),
            v(&[4, 5, 6])
        );
        let k = ClassicalHillKey::new(example_key().initial_key().clone()).unwrap();
        assert_eq!(
            hill_encrypt(&k, &v(&[14, 1, 22]), &mut Untallied).unwrap(),
            v(&[10, 7, 1])
        );
        let singular = Matrix::from_u64_rows(p(29), &[&[1, 2], &[2, 4]]).unwrap();
        assert!(ClassicalHillKey::new(singular).is_err());
    }

    #[test]
    fn hill_budget_matches_row_product() {
        let k = ClassicalHillKey::new(example_key().initial_key().clone()).unwrap();
        let mut t = OpCounts::default();
        hill_encrypt(&k, &v(&[1, 2, 3]), &mut t).unwrap();
        assert_eq!(t, OpCounts::new(6, 9, 0));
        let mut t = OpCounts::default();
        hill_decrypt(&k, &v(&[1, 2, 3]), &mut t).unwrap();
        assert_eq!(t, OpCounts::new(6, 9, 0));
    }

    #[test]
    fn degenerate_key_is_classical_hill() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let prime = p(29);
        for n in 1..=4 {
            let a1 = sample_nonsingular(n, prime, &mut rng).unwrap();
            let km = KeyMaterial::unsafe_test_new(
                Matrix::identity(prime, n).unwrap(),
                a1.clone(),
                Vector::zero(prime, n).unwrap(),
            )
            .unwrap();
            let hill = ClassicalHillKey::new(a1).unwrap();
            let msg: Vec<_> = (0..10)
                .map(|_| Vector::random(prime, n, &mut rng).unwrap())
                .collect();
            let dyn_ct = encrypt_message(&km, &msg, &mut Untallied).unwrap();
            for (m, c) in msg.iter().zip(&dyn_ct) {
                assert_eq!(&hill_encrypt(&hill, m, &mut Untallied).unwrap(), c);
            }
        }
    }

    proptest! {
        #[test]
        fn roundtrip(seed in any::<u64>(), pi in 0usize..4, ni in 0usize..4, len in 0usize..24) {
            let prime = p([3, 5, 29, 257][pi]);
            let n = [1, 2, 3, 8][ni];
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let km = keygen(n, prime, &mut rng, 1).unwrap();
            let msg: Vec<_> = (0..len).map(|_| Vector::random(prime, n, &mut rng).unwrap()).collect();
            let ct = encrypt_message(&km, &msg, &mut Untallied).unwrap();
            prop_assert_eq!(decrypt_message(&km, &ct, &mut Untallied).unwrap(), msg);
        }

        #[test]
        fn hill_roundtrip(seed in any::<u64>(), n in 1usize..6) {
            let prime = p(31);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let k = ClassicalHillKey::new(sample_nonsingular(n, prime, &mut rng).unwrap()).unwrap();
            let m = Vector::random(prime, n, &mut rng).unwrap();
            let c = hill_encrypt(&k, &m, &mut Untallied).unwrap();
            prop_assert_eq!(hill_decrypt(&k, &c, &mut Untallied).unwrap(), m);
        }
    }
}
