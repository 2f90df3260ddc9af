//! The reference toy example (p = 29, n = 3, six blocks), embedded as data,
//! and a checker that replays it through the cipher.
//!
//! Negative entries are kept as written and lifted mod p on load.

use std::fmt;

use crate::cipher::{decrypt_message, Encryptor};
use crate::error::Result;
use crate::gfp::{Prime, Untallied};
use crate::keysched::KeyMaterial;
use crate::matvec::{Matrix, Vector};

type Row = [i64; 3];

fn rows(m: &[Row; 3]) -> Vec<&[i64]> {
    m.iter().map(|r| r.as_slice()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenExample {
    pub p: u64,
    /// Matrix of `T(v₁,v₂,v₃) = (v₁+v₂, 3v₂+v₃, v₁−v₂+v₃)` acting as `v·M`.
    pub transform: [Row; 3],
    pub initial_vector: Row,
    pub basis: [Row; 3],
    pub messages: [Row; 6],
    pub whitened: [Row; 6],
    pub keys: [[Row; 3]; 6],
    pub ciphertexts: [Row; 6],
}

pub fn reference_example() -> GoldenExample {
    GoldenExample {
        p: 29,
        transform: [[1, 0, 1], [1, 3, -1], [0, 1, 1]],
        initial_vector: [2, 1, 5],
        basis: [[1, 2, 0], [3, 1, 0], [1, 28, 4]],
        messages: [
            [12, 0, 17],
            [2, 7, 5],
            [14, 17, 22],
            [0, 17, 3],
            [0, 19, 5],
            [8, 21, 4],
        ],
        whitened: [
            [14, 1, 22],
            [5, 15, 11],
            [25, 18, 23],
            [12, 21, 14],
            [16, 13, 24],
            [18, 22, 16],
        ],
        keys: [
            [[1, 2, 0], [3, 1, 0], [1, -1, 4]],
            [[3, 6, -1], [4, 3, 2], [0, 1, 6]],
            [[9, 17, -4], [7, 11, 3], [1, 9, 5]],
            [[26, 18, -12], [18, 7, -1], [10, 3, -3]],
            [[15, 13, -4], [25, 20, 10], [13, 6, 4]],
            [[-1, 6, -2], [16, 12, 15], [19, 22, 11]],
        ],
        ciphertexts: [
            [10, 7, 1],
            [17, 28, 4],
            [26, 26, 11],
            [18, 28, 25],
            [7, 3, 17],
            [0, 28, 6],
        ],
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl Checkpoint {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub blocks: usize,
    pub checkpoints: Vec<Checkpoint>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checkpoints.iter().all(Checkpoint::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Checkpoint> {
        self.checkpoints.iter().filter(|c| !c.passed())
    }

    pub fn first_failure(&self) -> Option<&Checkpoint> {
        self.failures().next()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure() {
            None => write!(
                f,
                "PASS: {} blocks, {} checkpoints",
                self.blocks,
                self.checkpoints.len()
            ),
            Some(c) => write!(
                f,
                "FAIL: {} expected {}, got {} ({} of {} checkpoints failed)",
                c.name,
                c.expected,
                c.actual,
                self.failures().count(),
                self.checkpoints.len()
            ),
        }
    }
}

impl GoldenExample {
    pub fn prime(&self) -> Result<Prime> {
        Prime::new(self.p)
    }

    pub fn key_material(&self) -> Result<KeyMaterial> {
        let prime = self.prime()?;
        KeyMaterial::new(
            Matrix::from_i64_rows(prime, &rows(&self.transform))?,
            Matrix::from_i64_rows(prime, &rows(&self.basis))?,
            Vector::from_i64s(prime, &self.initial_vector)?,
        )
    }

    pub fn message_blocks(&self) -> Result<Vec<Vector>> {
        let prime = self.prime()?;
        self.messages
            .iter()
            .map(|m| Vector::from_i64s(prime, m))
            .collect()
    }

    /// Replay encryption and decryption, recording each whitened block, key,
    /// ciphertext and recovered block against the embedded values.
    pub fn verify(&self) -> Result<VerifyReport> {
        let prime = self.prime()?;
        let km = self.key_material()?;
        let messages = self.message_blocks()?;
        let mut checkpoints = Vec::new();
        let mut check = |name: String, expected: String, actual: String| {
            checkpoints.push(Checkpoint {
                name,
                expected,
                actual,
            })
        };

        let mut enc = Encryptor::new(&km);
        let mut ciphertexts = Vec::with_capacity(messages.len());
        for (i, m) in messages.iter().enumerate() {
            let k = i + 1;
            let c = enc.encrypt_next(m, &mut Untallied)?;
            let state = enc.state();
            let whitened = m.add(&state.whitening, &mut Untallied)?;
            check(
                format!("m'{k}"),
                Vector::from_i64s(prime, &self.whitened[i])?.to_string(),
                whitened.to_string(),
            );
            check(
                format!("A{k}"),
                Matrix::from_i64_rows(prime, &rows(&self.keys[i]))?.to_string(),
                state.key.to_string(),
            );
            check(
                format!("c{k}"),
                Vector::from_i64s(prime, &self.ciphertexts[i])?.to_string(),
                c.to_string(),
            );
            ciphertexts.push(c);
        }
        let recovered = decrypt_message(&km, &ciphertexts, &mut Untallied)?;
        for (i, (m, r)) in messages.iter().zip(&recovered).enumerate() {
            check(format!("m{}", i + 1), m.to_string(), r.to_string());
        }
        Ok(VerifyReport {
            blocks: messages.len(),
            checkpoints,
        })
    }
}
