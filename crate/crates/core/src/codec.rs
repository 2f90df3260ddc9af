//! Byte streams to F_p blocks and back, plus the `DHC1` ciphertext container.
//!
//! Two symbol encodings are supported:
//! - `direct`: one byte per symbol, needs `p >= 257`;
//! - `digits`: each byte becomes `d` base-p digits, most significant first,
//!   where `d` is the least integer with `p^d >= 256`.
//!
//! The last block is zero-padded; the original byte length travels in the container.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gfp::{Fe, Prime};
use crate::matvec::Vector;

pub const CONTAINER_MAGIC: &[u8; 4] = b"DHC1";
const HEADER_LEN: usize = 4 + 8 + 4 + 1 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EncodingMode {
    Direct,
    Digits,
}

impl EncodingMode {
    /// `direct` when every byte value is a residue, `digits` otherwise.
    pub fn default_for(prime: Prime) -> Self {
        if prime.value() >= 257 {
            EncodingMode::Direct
        } else {
            EncodingMode::Digits
        }
    }

    pub fn validate(self, prime: Prime) -> Result<()> {
        match self {
            EncodingMode::Direct if prime.value() < 257 => {
                Err(Error::DirectModeTooSmall(prime.value()))
            }
            _ => Ok(()),
        }
    }

    /// Symbols emitted per input byte.
    pub fn symbols_per_byte(self, prime: Prime) -> usize {
        match self {
            EncodingMode::Direct => 1,
            EncodingMode::Digits => digits_per_byte(prime),
        }
    }

    fn tag(self) -> u8 {
        match self {
            EncodingMode::Direct => 0,
            EncodingMode::Digits => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(EncodingMode::Direct),
            1 => Ok(EncodingMode::Digits),
            other => Err(Error::Corrupt(format!(
                "unknown encoding mode byte {other}"
            ))),
        }
    }
}

impl fmt::Display for EncodingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingMode::Direct => "direct",
            EncodingMode::Digits => "digits",
        })
    }
}

impl FromStr for EncodingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(EncodingMode::Direct),
            "digits" => Ok(EncodingMode::Digits),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown encoding '{other}'"),
            }),
        }
    }
}

/// Least `d` with `p^d >= 256`, i.e. `ceil(8 / log2 p)`.
pub fn digits_per_byte(prime: Prime) -> usize {
    let p = prime.value();
    let mut d = 1;
    let mut reach = p;
    while reach < 256 {
        reach *= p;
        d += 1;
    }
    d
}

/// Bytes per serialized symbol: `ceil(ceil(log2 p) / 8)`.
pub fn symbol_width(prime: Prime) -> usize {
    (prime.bit_length() as usize).div_ceil(8)
}

fn symbols_for(bytes: &[u8], prime: Prime, mode: EncodingMode) -> Vec<Fe> {
    match mode {
        EncodingMode::Direct => bytes.iter().map(|&b| Fe(b as u64)).collect(),
        EncodingMode::Digits => {
            let d = digits_per_byte(prime);
            let p = prime.value();
            let mut out = Vec::with_capacity(bytes.len() * d);
            for &b in bytes {
                let mut digits = vec![Fe::ZERO; d];
                let mut x = b as u64;
                for slot in digits.iter_mut().rev() {
                    *slot = Fe(x % p);
                    x /= p;
                }
                out.extend(digits);
            }
            out
        }
    }
}

/// Split bytes into zero-padded blocks of `n` symbols.
pub fn encode(bytes: &[u8], prime: Prime, n: usize, mode: EncodingMode) -> Result<Vec<Vector>> {
    mode.validate(prime)?;
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut symbols = symbols_for(bytes, prime, mode);
    let padded = symbols.len().div_ceil(n) * n;
    symbols.resize(padded, Fe::ZERO);
    symbols
        .chunks(n)
        .map(|c| Vector::new(prime, c.to_vec()))
        .collect()
}

/// Inverse of [`encode`]; `original_len` bytes are recovered and padding dropped.
pub fn decode(
    blocks: &[Vector],
    prime: Prime,
    n: usize,
    mode: EncodingMode,
    original_len: usize,
) -> Result<Vec<u8>> {
    mode.validate(prime)?;
    for b in blocks {
        if b.prime() != prime {
            return Err(Error::ModulusMismatch {
                left: prime.value(),
                right: b.prime().value(),
            });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
    }
    let per_byte = mode.symbols_per_byte(prime);
    let needed = original_len * per_byte;
    let available = blocks.len() * n;
    if available < needed {
        return Err(Error::Truncated { needed, available });
    }
    let symbols = blocks.iter().flat_map(|b| b.entries().iter().copied());
    let symbols: Vec<Fe> = symbols.take(needed).collect();
    symbols
        .chunks(per_byte)
        .map(|group| {
            let value = group.iter().fold(0u64, |acc, s| {
                acc.saturating_mul(prime.value()).saturating_add(s.value())
            });
            u8::try_from(value).map_err(|_| {
                Error::Corrupt(format!("symbol group recomposes to {value}, not a byte"))
            })
        })
        .collect()
}

/// Ciphertext container: header plus row-major symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub prime: Prime,
    pub n: usize,
    pub mode: EncodingMode,
    pub original_len: u64,
    pub blocks: Vec<Vector>,
}

impl Container {
    pub fn new(
        prime: Prime,
        n: usize,
        mode: EncodingMode,
        original_len: u64,
        blocks: Vec<Vector>,
    ) -> Result<Self> {
        let c = Container {
            prime,
            n,
            mode,
            original_len,
            blocks,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        self.mode.validate(self.prime)?;
        if self.n == 0 {
            return Err(Error::ZeroDimension);
        }
        for b in &self.blocks {
            if b.prime() != self.prime || b.len() != self.n {
                return Err(Error::Corrupt("block shape disagrees with header".into()));
            }
        }
        let needed = usize::try_from(self.original_len)
            .ok()
            .and_then(|l| l.checked_mul(self.mode.symbols_per_byte(self.prime)))
            .ok_or_else(|| Error::Corrupt("original length overflows".into()))?;
        let available = self.blocks.len() * self.n;
        if available < needed {
            return Err(Error::Truncated { needed, available });
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let width = symbol_width(self.prime);
        let mut out = Vec::with_capacity(HEADER_LEN + self.blocks.len() * self.n * width);
        out.extend_from_slice(CONTAINER_MAGIC);
        out.extend_from_slice(&self.prime.value().to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.push(self.mode.tag());
        out.extend_from_slice(&self.original_len.to_le_bytes());
        out.extend_from_slice(&(self.blocks.len() as u64).to_le_bytes());
        for b in &self.blocks {
            for s in b.entries() {
                out.extend_from_slice(&s.value().to_le_bytes()[..width]);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Corrupt("container shorter than header".into()));
        }
        if &bytes[..4] != CONTAINER_MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
        let prime = Prime::new(u64_at(4)).map_err(|e| Error::Corrupt(e.to_string()))?;
        let n = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let mode = EncodingMode::from_tag(bytes[16])?;
        let original_len = u64_at(17);
        let block_count = u64_at(25);
        if n == 0 {
            return Err(Error::Corrupt("block length 0".into()));
        }
        let width = symbol_width(prime);
        let body = &bytes[HEADER_LEN..];
        let expected = usize::try_from(block_count)
            .ok()
            .and_then(|b| b.checked_mul(n))
            .and_then(|s| s.checked_mul(width))
            .ok_or_else(|| Error::Corrupt("block count overflows".into()))?;
        if body.len() != expected {
            return Err(Error::Corrupt(format!(
                "body is {} bytes, header implies {expected}",
                body.len()
            )));
        }
        let mut blocks = Vec::with_capacity(block_count as usize);
        for chunk in body.chunks(n * width) {
            let entries = chunk
                .chunks(width)
                .map(|s| {
                    let mut buf = [0u8; 8];
                    buf[..width].copy_from_slice(s);
                    prime
                        .element(u64::from_le_bytes(buf))
                        .map_err(|e| Error::Corrupt(e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(Vector::new(prime, entries)?);
        }
        Container::new(prime, n, mode, original_len, blocks)
    }
}
