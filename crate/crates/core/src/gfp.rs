//! Arithmetic in the prime field F_p.
//!
//! Elements are plain residues; the modulus lives in [`Prime`], which also
//! carries the four field operations. Every operation takes a [`Tally`] so a
//! caller can count additions, multiplications and inversions for one bounded
//! computation. Subtraction is tallied as an addition, and an inversion is a
//! single tally entry no matter how many steps extended Euclid takes.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive). Products of two residues fit in u128.
pub const MAX_MODULUS: u64 = 1 << 61;

/// A validated prime modulus `2 <= p < 2^61`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

/// A residue in `[0, p)`. The modulus is shared context and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub(crate) u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Operation counts for one counting session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
    pub invs: u64,
}

impl OpCounts {
    pub fn new(adds: u64, muls: u64, invs: u64) -> Self {
        OpCounts { adds, muls, invs }
    }

    /// Counts accumulated since `earlier` was snapshotted.
    pub fn since(&self, earlier: &OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds - earlier.adds,
            muls: self.muls - earlier.muls,
            invs: self.invs - earlier.invs,
        }
    }
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;
    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            adds: self.adds + o.adds,
            muls: self.muls + o.muls,
            invs: self.invs + o.invs,
        }
    }
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, o: OpCounts) {
        *self = *self + o;
    }
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} muls, {} adds, {} invs",
            self.muls, self.adds, self.invs
        )
    }
}

/// Sink for field-operation events.
pub trait Tally {
    fn count_add(&mut self);
    fn count_mul(&mut self);
    fn count_inv(&mut self);
}

impl Tally for OpCounts {
    #[inline]
    fn count_add(&mut self) {
        self.adds += 1;
    }
    #[inline]
    fn count_mul(&mut self) {
        self.muls += 1;
    }
    #[inline]
    fn count_inv(&mut self) {
        self.invs += 1;
    }
}

/// A tally that records nothing, for diagnostics outside the cost model.
#[derive(Debug, Clone, Copy, Default)]
pub struct Untallied;

impl Tally for Untallied {
    #[inline]
    fn count_add(&mut self) {}
    #[inline]
    fn count_mul(&mut self) {}
    #[inline]
    fn count_inv(&mut self) {}
}

impl Prime {
    pub fn new(value: u64) -> Result<Self> {
        if value >= MAX_MODULUS {
            return Err(Error::ModulusTooLarge(value));
        }
        if !is_prime(value) {
            return Err(Error::NotPrime(value));
        }
        Ok(Prime(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Reduce an arbitrary integer into the field.
    pub fn reduce(self, x: u64) -> Fe {
        Fe(x % self.0)
    }

    /// Lift a signed integer (e.g. `-1`) into `[0, p)`.
    pub fn reduce_signed(self, x: i64) -> Fe {
        Fe(x.rem_euclid(self.0 as i64) as u64)
    }

    /// Wrap a residue, rejecting values outside `[0, p)`.
    pub fn element(self, x: u64) -> Result<Fe> {
        if x < self.0 {
            Ok(Fe(x))
        } else {
            Err(Error::ResidueOutOfRange {
                value: x,
                modulus: self.0,
            })
        }
    }

    /// Number of bits in `p - 1`, i.e. `floor(log2(p-1)) + 1`.
    pub fn bit_length(self) -> u32 {
        64 - (self.0 - 1).leading_zeros()
    }

    #[inline]
    pub fn add<T: Tally + ?Sized>(self, a: Fe, b: Fe, t: &mut T) -> Fe {
        debug_assert!(a.0 < self.0 && b.0 < self.0);
        t.count_add();
        let s = a.0 + b.0;
        Fe(if s >= self.0 { s - self.0 } else { s })
    }

    #[inline]
    pub fn sub<T: Tally + ?Sized>(self, a: Fe, b: Fe, t: &mut T) -> Fe {
        debug_assert!(a.0 < self.0 && b.0 < self.0);
        t.count_add();
        Fe(if a.0 >= b.0 {
            a.0 - b.0
        } else {
            a.0 + self.0 - b.0
        })
    }

    #[inline]
    pub fn mul<T: Tally + ?Sized>(self, a: Fe, b: Fe, t: &mut T) -> Fe {
        debug_assert!(a.0 < self.0 && b.0 < self.0);
        t.count_mul();
        Fe(((a.0 as u128 * b.0 as u128) % self.0 as u128) as u64)
    }

    /// Multiplicative inverse by extended Euclid; tallied as one inversion.
    pub fn inv<T: Tally + ?Sized>(self, a: Fe, t: &mut T) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        t.count_inv();
        let (mut r0, mut r1) = (self.0 as i128, a.0 as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Fe(s0.rem_euclid(self.0 as i128) as u64))
    }

    pub fn neg(self, a: Fe) -> Fe {
        if a.0 == 0 {
            a
        } else {
            Fe(self.0 - a.0)
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
