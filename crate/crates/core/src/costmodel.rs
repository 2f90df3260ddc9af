//! Closed-form operation counts per block and per message, and their check
//! against instrumented runs.
//!
//! Per-block costs for the dynamic scheme (`t > 1`):
//!
//! ```text
//! encrypt: (n³ + n² − n) adds, (n³ + 2n²) muls
//! decrypt: (3n³ − n² − n) adds, (3n³ + 2n²) muls, n inversions
//! ```
//!
//! The first block skips the key update. The other schemes' rows are
//! reference data for comparison only.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::cipher::{hill_decrypt, hill_encrypt, ClassicalHillKey, Decryptor, Encryptor};
use crate::error::{Error, Result};
use crate::gfp::{OpCounts, Prime};
use crate::keysched::KeyMaterial;
use crate::matvec::Vector;

/// `c3·n³ + c2·n² + c1·n + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cubic {
    pub c3: i64,
    pub c2: i64,
    pub c1: i64,
    pub c0: i64,
}

impl Cubic {
    pub const ZERO: Cubic = Cubic::new(0, 0, 0, 0);

    pub const fn new(c3: i64, c2: i64, c1: i64, c0: i64) -> Self {
        Cubic { c3, c2, c1, c0 }
    }

    pub fn eval(&self, n: u64) -> u64 {
        let n = n as i128;
        let v = self.c3 as i128 * n * n * n
            + self.c2 as i128 * n * n
            + self.c1 as i128 * n
            + self.c0 as i128;
        u64::try_from(v).expect("cost polynomials are non-negative for n >= 1")
    }

    pub fn scale(self, k: i64) -> Cubic {
        Cubic::new(self.c3 * k, self.c2 * k, self.c1 * k, self.c0 * k)
    }
}

impl Add for Cubic {
    type Output = Cubic;
    fn add(self, o: Cubic) -> Cubic {
        Cubic::new(
            self.c3 + o.c3,
            self.c2 + o.c2,
            self.c1 + o.c1,
            self.c0 + o.c0,
        )
    }
}

impl fmt::Display for Cubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (c, pow) in [
            (self.c3, "n^3"),
            (self.c2, "n^2"),
            (self.c1, "n"),
            (self.c0, ""),
        ] {
            if c == 0 {
                continue;
            }
            let mag = c.abs();
            let body = match (mag, pow) {
                (_, "") => mag.to_string(),
                (1, _) => pow.to_string(),
                _ => format!("{mag}{pow}"),
            };
            terms.push((c < 0, body));
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (neg, body)) in terms.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Proposed,
    ClassicalHill,
    AffineHill,
    Lin,
    Toorani,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::ClassicalHill,
        Scheme::AffineHill,
        Scheme::Lin,
        Scheme::Toorani,
        Scheme::Proposed,
    ];

    /// Whether this crate implements the scheme (others are reference rows).
    pub fn is_implemented(self) -> bool {
        matches!(self, Scheme::Proposed | Scheme::ClassicalHill)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Proposed => "proposed",
            Scheme::ClassicalHill => "classical-hill",
            Scheme::AffineHill => "affine-hill",
            Scheme::Lin => "lin",
            Scheme::Toorani => "toorani",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.to_string() == s)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    EncryptFirst,
    EncryptRest,
    DecryptFirst,
    DecryptRest,
}

impl Phase {
    pub const ALL: [Phase; 4] = [
        Phase::EncryptFirst,
        Phase::EncryptRest,
        Phase::DecryptFirst,
        Phase::DecryptRest,
    ];

    pub fn is_encrypt(self) -> bool {
        matches!(self, Phase::EncryptFirst | Phase::EncryptRest)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::EncryptFirst => "encrypt-first",
            Phase::EncryptRest => "encrypt-rest",
            Phase::DecryptFirst => "decrypt-first",
            Phase::DecryptRest => "decrypt-rest",
        })
    }
}

impl FromStr for Phase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Phase::ALL
            .into_iter()
            .find(|ph| ph.to_string() == s)
            .ok_or_else(|| Error::UnknownPhase(s.to_string()))
    }
}

/// One row of the per-block comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostFormula {
    pub scheme: Scheme,
    pub phase: Phase,
    pub adds: Cubic,
    pub muls: Cubic,
    pub invs: Cubic,
}

impl CostFormula {
    pub fn eval(&self, n: u64) -> OpCounts {
        OpCounts::new(self.adds.eval(n), self.muls.eval(n), self.invs.eval(n))
    }
}

const N2: Cubic = Cubic::new(0, 1, 0, 0);

/// The per-block cost row for `scheme` in `phase`. Schemes without a
/// first-block distinction return their single encryption/decryption row.
pub fn per_block_cost(scheme: Scheme, phase: Phase) -> CostFormula {
    let enc = phase.is_encrypt();
    let (muls, adds, invs) = match (scheme, phase) {
        (Scheme::Proposed, Phase::EncryptFirst) => (N2, N2, Cubic::ZERO),
        (Scheme::Proposed, Phase::EncryptRest) => {
            (Cubic::new(1, 2, 0, 0), Cubic::new(1, 1, -1, 0), Cubic::ZERO)
        }
        (Scheme::Proposed, Phase::DecryptFirst) => (
            Cubic::new(2, 1, 0, 0),
            Cubic::new(2, -1, 0, 0),
            Cubic::new(0, 0, 1, 0),
        ),
        (Scheme::Proposed, Phase::DecryptRest) => (
            Cubic::new(3, 2, 0, 0),
            Cubic::new(3, -1, -1, 0),
            Cubic::new(0, 0, 1, 0),
        ),
        (Scheme::ClassicalHill, _) => (N2, Cubic::new(0, 1, 0, -1), Cubic::ZERO),
        (Scheme::AffineHill, _) => (N2, N2, Cubic::ZERO),
        (Scheme::Lin, _) => (
            Cubic::new(0, 1, 1, 3),
            Cubic::new(0, 1, 0, 4),
            if enc {
                Cubic::ZERO
            } else {
                Cubic::new(0, 0, 0, 1)
            },
        ),
        (Scheme::Toorani, _) => (
            Cubic::new(0, 1, 2, 0),
            Cubic::new(0, 1, 1, 1),
            if enc {
                Cubic::ZERO
            } else {
                Cubic::new(0, 0, 0, 1)
            },
        ),
    };
    CostFormula {
        scheme,
        phase,
        adds,
        muls,
        invs,
    }
}

/// Whole-message cost for the dynamic scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalCost {
    pub blocks: u64,
    pub encrypt: OpCounts,
    pub decrypt: OpCounts,
}

/// First-block cost plus `(⌈wp/n⌉ − 1)` times the later-block cost.
/// `wp` is the plaintext length in symbols.
pub fn total_cost(wp: u64, n: u64) -> TotalCost {
    assert!(wp >= 1 && n >= 1, "wp and n must be positive");
    let blocks = wp.div_ceil(n);
    let sum = |first: Phase, rest: Phase| {
        let f = per_block_cost(Scheme::Proposed, first).eval(n);
        let r = per_block_cost(Scheme::Proposed, rest).eval(n);
        let k = blocks - 1;
        OpCounts::new(
            f.adds + k * r.adds,
            f.muls + k * r.muls,
            f.invs + k * r.invs,
        )
    };
    TotalCost {
        blocks,
        encrypt: sum(Phase::EncryptFirst, Phase::EncryptRest),
        decrypt: sum(Phase::DecryptFirst, Phase::DecryptRest),
    }
}

/// Bit-operation estimate with unit constants: adds·λ + muls·λ² + invs·λ³.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitCostEstimate {
    pub lambda: u32,
    pub total_bitops: BigUint,
}

pub fn bit_cost(counts: &OpCounts, prime: Prime) -> BitCostEstimate {
    let lambda = prime.bit_length();
    let l = BigUint::from(lambda);
    let total_bitops = BigUint::from(counts.adds) * &l
        + BigUint::from(counts.muls) * &l * &l
        + BigUint::from(counts.invs) * &l * &l * &l;
    BitCostEstimate {
        lambda,
        total_bitops,
    }
}

/// Measured vs. expected counts for one block operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub scheme: Scheme,
    pub phase: Phase,
    pub n: u64,
    pub expected: OpCounts,
    pub measured: OpCounts,
}

impl ValidationReport {
    pub fn is_exact(&self) -> bool {
        self.expected == self.measured
    }

    /// measured − expected, per category `(adds, muls, invs)`.
    pub fn deltas(&self) -> (i64, i64, i64) {
        let d = |m: u64, e: u64| m as i64 - e as i64;
        (
            d(self.measured.adds, self.expected.adds),
            d(self.measured.muls, self.expected.muls),
            d(self.measured.invs, self.expected.invs),
        )
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (da, dm, di) = self.deltas();
        write!(
            f,
            "{} {} n={}: measured ({}) expected ({}) -> {}",
            self.scheme,
            self.phase,
            self.n,
            self.measured,
            self.expected,
            if self.is_exact() {
                "exact".to_string()
            } else {
                format!("MISMATCH (Δmuls {dm:+}, Δadds {da:+}, Δinvs {di:+})")
            }
        )
    }
}

pub fn validate_counters(measured: OpCounts, expected: &CostFormula, n: u64) -> ValidationReport {
    ValidationReport {
        scheme: expected.scheme,
        phase: expected.phase,
        n,
        expected: expected.eval(n),
        measured,
    }
}

/// Per-block counters from one instrumented encryption and decryption of `message`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageMeasurement {
    pub encrypt: Vec<OpCounts>,
    pub decrypt: Vec<OpCounts>,
    pub roundtrip_ok: bool,
}

impl MessageMeasurement {
    pub fn encrypt_total(&self) -> OpCounts {
        self.encrypt
            .iter()
            .copied()
            .fold(OpCounts::default(), Add::add)
    }

    pub fn decrypt_total(&self) -> OpCounts {
        self.decrypt
            .iter()
            .copied()
            .fold(OpCounts::default(), Add::add)
    }

    /// Every block checked against its phase row.
    pub fn reports(&self, n: u64) -> Vec<ValidationReport> {
        let phase = |i: usize, first: Phase, rest: Phase| if i == 0 { first } else { rest };
        let enc = self.encrypt.iter().enumerate().map(|(i, &c)| {
            let f = per_block_cost(
                Scheme::Proposed,
                phase(i, Phase::EncryptFirst, Phase::EncryptRest),
            );
            validate_counters(c, &f, n)
        });
        let dec = self.decrypt.iter().enumerate().map(|(i, &c)| {
            let f = per_block_cost(
                Scheme::Proposed,
                phase(i, Phase::DecryptFirst, Phase::DecryptRest),
            );
            validate_counters(c, &f, n)
        });
        enc.chain(dec).collect()
    }
}

pub fn measure_message(km: &KeyMaterial, message: &[Vector]) -> Result<MessageMeasurement> {
    let mut enc = Encryptor::new(km);
    let mut encrypt = Vec::with_capacity(message.len());
    let mut ciphertext = Vec::with_capacity(message.len());
    for m in message {
        let mut t = OpCounts::default();
        ciphertext.push(enc.encrypt_next(m, &mut t)?);
        encrypt.push(t);
    }
    let mut dec = Decryptor::new(km);
    let mut decrypt = Vec::with_capacity(message.len());
    let mut recovered = Vec::with_capacity(message.len());
    for c in &ciphertext {
        let mut t = OpCounts::default();
        recovered.push(dec.decrypt_next(c, &mut t)?);
        decrypt.push(t);
    }
    Ok(MessageMeasurement {
        encrypt,
        decrypt,
        roundtrip_ok: recovered == message,
    })
}

/// Instrumented classical Hill encryption and decryption of one block,
/// checked against the reference row.
pub fn measure_classical(key: &ClassicalHillKey, block: &Vector) -> Result<[ValidationReport; 2]> {
    let n = key.matrix().order() as u64;
    let mut te = OpCounts::default();
    let c = hill_encrypt(key, block, &mut te)?;
    let mut td = OpCounts::default();
    hill_decrypt(key, &c, &mut td)?;
    Ok([
        validate_counters(
            te,
            &per_block_cost(Scheme::ClassicalHill, Phase::EncryptRest),
            n,
        ),
        validate_counters(
            td,
            &per_block_cost(Scheme::ClassicalHill, Phase::DecryptRest),
            n,
        ),
    ])
}

/// One evaluated table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub scheme: Scheme,
    pub phase: Phase,
    pub n: u64,
    pub counts: OpCounts,
    pub bitops: BigUint,
}

/// All reference rows evaluated at `n`, with bit-cost estimates for `prime`.
/// Single-row schemes appear once per direction (`encrypt-rest`/`decrypt-rest`).
pub fn comparison_table(n: u64, prime: Prime) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for scheme in Scheme::ALL {
        let phases: &[Phase] = if scheme == Scheme::Proposed {
            &Phase::ALL
        } else {
            &[Phase::EncryptRest, Phase::DecryptRest]
        };
        for &phase in phases {
            let counts = per_block_cost(scheme, phase).eval(n);
            rows.push(TableRow {
                scheme,
                phase,
                n,
                counts,
                bitops: bit_cost(&counts, prime).total_bitops,
            });
        }
    }
    rows
}

pub fn render_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("scheme,phase,n,muls,adds,invs,bitops_estimate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.scheme, r.phase, r.n, r.counts.muls, r.counts.adds, r.counts.invs, r.bitops
        ));
    }
    out
}

pub fn render_text(rows: &[TableRow]) -> String {
    let mut out = format!(
        "{:<15} {:<14} {:>4} {:>10} {:>10} {:>6} {:>16}\n",
        "scheme", "phase", "n", "muls", "adds", "invs", "bitops (est.)"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<15} {:<14} {:>4} {:>10} {:>10} {:>6} {:>16}\n",
            r.scheme.to_string(),
            r.phase.to_string(),
            r.n,
            r.counts.muls,
            r.counts.adds,
            r.counts.invs,
            r.bitops
        ));
    }
    out
}
