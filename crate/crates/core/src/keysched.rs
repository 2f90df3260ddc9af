//! Shared key material and the dynamic key schedule.
//!
//! The secret is `(I₁, M, A₁)`: an initial whitening vector, the matrix of a
//! non-singular map `T` (acting as `v ↦ v·M`) and an invertible first key
//! whose rows form a basis. Block `i` uses
//!
//! ```text
//! A_i = A_{i-1}·M      (each row of A_{i-1} mapped by T)
//! I_i = I_{i-1}·M
//! ```
//!
//! The chain is advanced one block at a time.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::codec::EncodingMode;
use crate::error::{Error, Result};
use crate::gfp::{Prime, Tally, Untallied};
use crate::matvec::{mat_mat_mul, sample_nonsingular, vec_mat_mul, Matrix, Vector};

pub const KEY_MAGIC: &str = "DYNAHILL-KEY/1";
pub const DEFAULT_ORDER_FLOOR: u64 = 1 << 16;
pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;
const KEYGEN_MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    prime: Prime,
    n: usize,
    transform: Matrix,
    initial_key: Matrix,
    initial_vector: Vector,
}

impl KeyMaterial {
    /// Validates that `M` and `A₁` are invertible n×n matrices over the same
    /// field and that `I₁` is a nonzero length-n vector.
    pub fn new(transform: Matrix, initial_key: Matrix, initial_vector: Vector) -> Result<Self> {
        let km = Self::unsafe_test_new(transform, initial_key, initial_vector)?;
        if km.initial_vector.is_zero() {
            return Err(Error::InvalidKey("initial vector is zero".into()));
        }
        Ok(km)
    }

    /// Same as [`KeyMaterial::new`] but accepts a zero initial vector. Only for
    /// tests that reduce the scheme to the classical cipher.
    #[doc(hidden)]
    pub fn unsafe_test_new(
        transform: Matrix,
        initial_key: Matrix,
        initial_vector: Vector,
    ) -> Result<Self> {
        let prime = transform.prime();
        let n = transform.order();
        if initial_key.prime() != prime || initial_vector.prime() != prime {
            return Err(Error::InvalidKey("components use different moduli".into()));
        }
        if initial_key.order() != n || initial_vector.len() != n {
            return Err(Error::InvalidKey(
                "components have different dimensions".into(),
            ));
        }
        if !transform.is_nonsingular() {
            return Err(Error::InvalidKey(
                "transformation matrix is singular".into(),
            ));
        }
        if !initial_key.is_nonsingular() {
            return Err(Error::InvalidKey("initial key matrix is singular".into()));
        }
        Ok(KeyMaterial {
            prime,
            n,
            transform,
            initial_key,
            initial_vector,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix of the transformation `T`.
    pub fn transform(&self) -> &Matrix {
        &self.transform
    }

    /// `A₁`, whose rows are the initial basis `B₁`.
    pub fn initial_key(&self) -> &Matrix {
        &self.initial_key
    }

    /// `I₁`.
    pub fn initial_vector(&self) -> &Vector {
        &self.initial_vector
    }

    pub fn initial_state(&self) -> ChainState {
        ChainState {
            index: 1,
            key: self.initial_key.clone(),
            whitening: self.initial_vector.clone(),
        }
    }
}

/// Key matrix and whitening vector for block `index` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    pub index: u64,
    pub key: Matrix,
    pub whitening: Vector,
}

/// Apply `T`: `v·M`.
pub fn transform_vector<T: Tally + ?Sized>(
    km: &KeyMaterial,
    v: &Vector,
    t: &mut T,
) -> Result<Vector> {
    vec_mat_mul(v, &km.transform, t)
}

/// Step the schedule from block `i` to block `i+1`.
/// Costs n³+n² muls and n³−n adds.
pub fn advance_chain<T: Tally + ?Sized>(
    km: &KeyMaterial,
    state: &ChainState,
    t: &mut T,
) -> ChainState {
    let key = mat_mat_mul(&state.key, &km.transform, t).expect("state matches key material");
    let whitening = transform_vector(km, &state.whitening, t).expect("state matches key material");
    ChainState {
        index: state.index + 1,
        key,
        whitening,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderResult {
    Exact(u64),
    ExceedsCap,
}

/// Least `k <= cap` with `M^k = I`, or `ExceedsCap`.
///
/// Baby-step/giant-step: store `M^r` for `r < s = ceil(sqrt(cap))`, then walk
/// `M^{gs}`. If the order `t` is at least `s` the baby steps are distinct, and
/// the first giant step that lands in the table gives exactly `gs - r = t`.
pub fn estimate_order(m: &Matrix, cap: u64) -> Result<OrderResult> {
    if !m.is_nonsingular() {
        return Err(Error::Singular);
    }
    let cap = cap.max(1);
    let s = ceil_sqrt(cap);
    let mut t = Untallied;
    let identity = Matrix::identity(m.prime(), m.order())?;
    let mut table: HashMap<Matrix, u64> = HashMap::with_capacity(s as usize);
    table.insert(identity.clone(), 0);
    let mut cur = identity;
    for r in 1..s {
        cur = mat_mat_mul(&cur, m, &mut t)?;
        if cur.is_identity() {
            return Ok(OrderResult::Exact(r));
        }
        table.insert(cur.clone(), r);
    }
    let giant = mat_mat_mul(&cur, m, &mut t)?;
    let mut walk = giant.clone();
    for g in 1..=cap.div_ceil(s) {
        if let Some(&r) = table.get(&walk) {
            let k = g * s - r;
            return Ok(if k <= cap {
                OrderResult::Exact(k)
            } else {
                OrderResult::ExceedsCap
            });
        }
        walk = mat_mat_mul(&walk, &giant, &mut t)?;
    }
    Ok(OrderResult::ExceedsCap)
}

fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while r * r < x {
        r += 1;
    }
    r.max(1)
}

/// The order floor actually enforced: `min(order_floor, p^n - 2)`.
///
/// GL(n, p) contains elements of order `p^n - 1` (Singer cycles) and none
/// larger, so a floor at or above `p^n - 1` could never be met.
pub fn effective_order_floor(n: usize, prime: Prime, order_floor: u64) -> u64 {
    let mut pn: u128 = 1;
    for _ in 0..n {
        pn = pn.saturating_mul(prime.value() as u128);
        if pn > u64::MAX as u128 {
            return order_floor;
        }
    }
    order_floor.min((pn as u64).saturating_sub(2))
}

/// Sample fresh key material, rejecting transformations of small order.
pub fn keygen<R: Rng + ?Sized>(
    n: usize,
    prime: Prime,
    rng: &mut R,
    order_floor: u64,
) -> Result<KeyMaterial> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let initial_key = sample_nonsingular(n, prime, rng)?;
    let initial_vector = Vector::random_nonzero(prime, n, rng)?;
    let floor = effective_order_floor(n, prime, order_floor);
    for _ in 0..KEYGEN_MAX_ATTEMPTS {
        let transform = sample_nonsingular(n, prime, rng)?;
        if floor == 0 || estimate_order(&transform, floor)? == OrderResult::ExceedsCap {
            return KeyMaterial::new(transform, initial_key, initial_vector);
        }
    }
    Err(Error::SamplingExhausted(KEYGEN_MAX_ATTEMPTS))
}

/// Key material together with the plaintext encoding, as stored in a key file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyFile {
    pub material: KeyMaterial,
    pub encoding: EncodingMode,
}

impl KeyFile {
    pub fn new(material: KeyMaterial, encoding: EncodingMode) -> Result<Self> {
        encoding.validate(material.prime)?;
        Ok(KeyFile { material, encoding })
    }

    pub fn to_text(&self) -> String {
        let km = &self.material;
        let mut s = String::new();
        let _ = writeln!(s, "{KEY_MAGIC}");
        let _ = writeln!(s, "p={}", km.prime);
        let _ = writeln!(s, "n={}", km.n);
        let _ = writeln!(s, "enc={}", self.encoding);
        let join = |row: &[crate::gfp::Fe]| {
            row.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        s.push_str("M:\n");
        for row in km.transform.rows() {
            let _ = writeln!(s, "{}", join(row));
        }
        s.push_str("A1:\n");
        for row in km.initial_key.rows() {
            let _ = writeln!(s, "{}", join(row));
        }
        s.push_str("I1:\n");
        let _ = writeln!(s, "{}", join(km.initial_vector.entries()));
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };
        let (line, magic) = next("magic")?;
        if magic != KEY_MAGIC {
            return Err(Error::Parse {
                line,
                msg: format!("expected '{KEY_MAGIC}'"),
            });
        }
        let field = |(line, l): (usize, &str), key: &str| -> Result<(usize, String)> {
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(|v| (line, v.to_string()))
                .ok_or(Error::Parse {
                    line,
                    msg: format!("expected '{key}=...'"),
                })
        };
        let (line, pv) = field(next("p")?, "p")?;
        let prime = pv
            .parse::<u64>()
            .map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })
            .and_then(Prime::new)?;
        let (line, nv) = field(next("n")?, "n")?;
        let n: usize = nv
            .parse()
            .map_err(|e: std::num::ParseIntError| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        if n == 0 {
            return Err(Error::Parse {
                line,
                msg: "n must be at least 1".into(),
            });
        }
        let (line, ev) = field(next("enc")?, "enc")?;
        let encoding: EncodingMode = ev.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("unknown encoding '{ev}'"),
        })?;

        let parse_row = |(line, l): (usize, &str)| -> Result<Vec<u64>> {
            let row = l
                .split(' ')
                .map(|tok| {
                    let v: u64 = tok.parse().map_err(|_| Error::Parse {
                        line,
                        msg: format!("bad number '{tok}'"),
                    })?;
                    if v >= prime.value() {
                        return Err(Error::Parse {
                            line,
                            msg: format!("residue {v} not below p"),
                        });
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            Ok(row)
        };
        let mut section = |name: &str, rows: usize| -> Result<Vec<Vec<u64>>> {
            let (line, header) = next(name)?;
            if header != name {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected '{name}'"),
                });
            }
            (0..rows).map(|_| next("row").and_then(parse_row)).collect()
        };
        let m_rows = section("M:", n)?;
        let a_rows = section("A1:", n)?;
        let i_rows = section("I1:", 1)?;
        if let Some((line, extra)) = lines.next() {
            if !extra.is_empty() || lines.next().is_some() {
                return Err(Error::Parse {
                    line,
                    msg: "trailing content".into(),
                });
            }
        }

        let to_matrix = |rows: &[Vec<u64>]| {
            let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
            Matrix::from_u64_rows(prime, &refs)
        };
        let material = KeyMaterial::new(
            to_matrix(&m_rows)?,
            to_matrix(&a_rows)?,
            Vector::from_u64s(prime, &i_rows[0])?,
        )?;
        KeyFile::new(material, encoding)
    }
}
