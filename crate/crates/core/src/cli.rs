//! Command-line interface.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::cipher::{decrypt_message, encrypt_message, ClassicalHillKey, Encryptor};
use crate::codec::{decode, encode, Container, EncodingMode};
use crate::costmodel::{
    comparison_table, measure_classical, measure_message, render_csv, render_text, total_cost,
};
use crate::cryptanalysis::{
    enumerable_space, enumerate_solution_count, keyspace_size, kpa_recover_hill,
    variant_solution_count, KpaOutcome, KpaSample, ENUMERATION_LIMIT,
};
use crate::gfp::{Prime, Untallied};
use crate::golden::reference_example;
use crate::keysched::{
    advance_chain, estimate_order, keygen, KeyFile, OrderResult, DEFAULT_ORDER_CAP,
    DEFAULT_ORDER_FLOOR,
};
use crate::matvec::{mat_mat_mul, sample_nonsingular, vec_mat_mul, Matrix, Vector};

#[derive(Debug, Parser)]
#[command(
    name = "dynahill",
    version,
    about = "Dynamic-key Hill cipher over prime fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key file.
    Keygen {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// Reject transformations whose order is at most this value.
        #[arg(long, default_value_t = DEFAULT_ORDER_FLOOR)]
        order_floor: u64,
        /// Deterministic key generation (for reproducible tests only).
        #[arg(long)]
        seed: Option<u64>,
        /// Plaintext encoding: direct (p >= 257) or digits. Defaults by p.
        #[arg(long)]
        encoding: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a file into a DHC1 container.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a DHC1 container.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Known-plaintext attack on the fixed-key cipher vs. the dynamic scheme.
    AttackDemo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact brute-force keyspace size.
    Keyspace {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Instrumented operation counts vs. the closed-form cost model.
    Bench {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        blocks: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Replay the reference p = 29 example and check every intermediate value.
    VerifyExample,
    /// Order of the key's transformation, searched up to a cap.
    Order {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        cap: u64,
    },
}

fn make_rng(seed: Option<u64>) -> Box<dyn RngCore> {
    match seed {
        Some(s) => Box::new(ChaCha20Rng::seed_from_u64(s)),
        None => Box::new(StdRng::from_entropy()),
    }
}

fn read_key(path: &Path) -> anyhow::Result<KeyFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading key {}", path.display()))?;
    KeyFile::parse(&text).with_context(|| format!("invalid key file {}", path.display()))
}

fn prime(p: u64) -> anyhow::Result<Prime> {
    Ok(Prime::new(p)?)
}

fn positive(n: usize, what: &str) -> anyhow::Result<usize> {
    if n == 0 {
        bail!("{what} must be at least 1");
    }
    Ok(n)
}

/// Run one command, writing its report to `out`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<u8> {
    match cli.command {
        Command::Keygen {
            p,
            n,
            order_floor,
            seed,
            encoding,
            out: path,
        } => {
            let prime = prime(p)?;
            let n = positive(n, "n")?;
            let encoding = match encoding {
                Some(e) => e.parse::<EncodingMode>()?,
                None => EncodingMode::default_for(prime),
            };
            encoding.validate(prime)?;
            let mut rng = make_rng(seed);
            let km = keygen(n, prime, &mut *rng, order_floor)?;
            let kf = KeyFile::new(km, encoding)?;
            fs::write(&path, kf.to_text())
                .with_context(|| format!("writing {}", path.display()))?;
            writeln!(
                out,
                "wrote key (p={p}, n={n}, enc={encoding}) to {}",
                path.display()
            )?;
            Ok(0)
        }
        Command::Encrypt {
            key,
            input,
            out: path,
        } => {
            let kf = read_key(&key)?;
            let km = &kf.material;
            let data = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let blocks = encode(&data, km.prime(), km.n(), kf.encoding)?;
            let ct = encrypt_message(km, &blocks, &mut Untallied)?;
            let container = Container::new(km.prime(), km.n(), kf.encoding, data.len() as u64, ct)?;
            fs::write(&path, container.to_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            writeln!(
                out,
                "encrypted {} bytes into {} blocks",
                data.len(),
                container.blocks.len()
            )?;
            Ok(0)
        }
        Command::Decrypt {
            key,
            input,
            out: path,
        } => {
            let kf = read_key(&key)?;
            let km = &kf.material;
            let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let container = Container::from_bytes(&bytes).context("corrupt container")?;
            if container.prime != km.prime()
                || container.n != km.n()
                || container.mode != kf.encoding
            {
                bail!(
                    "container (p={}, n={}, enc={}) does not match key (p={}, n={}, enc={})",
                    container.prime,
                    container.n,
                    container.mode,
                    km.prime(),
                    km.n(),
                    kf.encoding
                );
            }
            let pt = decrypt_message(km, &container.blocks, &mut Untallied)?;
            let original_len = usize::try_from(container.original_len)?;
            // A wrong key yields garbage symbols; decode only fails on
            // out-of-range symbol groups, so fall back to raw low bytes.
            let data =
                decode(&pt, km.prime(), km.n(), kf.encoding, original_len).or_else(|_| {
                    let per = kf.encoding.symbols_per_byte(km.prime());
                    Ok::<_, anyhow::Error>(
                        pt.iter()
                            .flat_map(|b| b.to_u64s())
                            .step_by(per)
                            .take(original_len)
                            .map(|s| s as u8)
                            .collect(),
                    )
                })?;
            fs::write(&path, &data).with_context(|| format!("writing {}", path.display()))?;
            writeln!(
                out,
                "decrypted {} blocks into {} bytes",
                container.blocks.len(),
                data.len()
            )?;
            Ok(0)
        }
        Command::AttackDemo { p, n, trials, seed } => {
            attack_demo(prime(p)?, positive(n, "n")?, trials, seed, out)?;
            Ok(0)
        }
        Command::Keyspace { p, n } => {
            let k = keyspace_size(positive(n, "n")?, prime(p)?);
            writeln!(out, "p = {p}, n = {n}")?;
            writeln!(out, "N = {}", k.bases)?;
            writeln!(out, "L = p^n * N^2 = {}", k.triplets)?;
            writeln!(out, "log2(N) = {:.4}", k.log2_bases())?;
            writeln!(out, "log2(L) = {:.4}", k.log2_triplets())?;
            Ok(0)
        }
        Command::Bench {
            p,
            n,
            blocks,
            seed,
            format,
        } => bench(
            prime(p)?,
            positive(n, "n")?,
            positive(blocks, "blocks")?,
            seed,
            format,
            out,
        ),
        Command::VerifyExample => {
            let report = reference_example().verify()?;
            writeln!(out, "{report}")?;
            for c in report.failures().skip(1) {
                writeln!(
                    out,
                    "  also: {} expected {}, got {}",
                    c.name, c.expected, c.actual
                )?;
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Order { key, cap } => {
            let kf = read_key(&key)?;
            match estimate_order(kf.material.transform(), cap)? {
                OrderResult::Exact(k) => writeln!(out, "Exact({k})")?,
                OrderResult::ExceedsCap => writeln!(out, "ExceedsCap (order > {cap})")?,
            }
            Ok(0)
        }
    }
}

fn attack_demo(
    prime: Prime,
    n: usize,
    trials: usize,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let mut rng = make_rng(seed);
    let rng = &mut *rng;

    writeln!(
        out,
        "fixed-key Hill, known-plaintext attack (p={prime}, n={n}, {trials} trials)"
    )?;
    let (mut recovered, mut redraws) = (0usize, 0usize);
    for _ in 0..trials {
        let key = sample_nonsingular(n, prime, rng)?;
        loop {
            let x = Matrix::random(prime, n, rng)?;
            let y = mat_mat_mul(&x, &key, &mut Untallied)?;
            match kpa_recover_hill(&KpaSample {
                plaintexts: x,
                ciphertexts: y,
            })? {
                KpaOutcome::Recovered(k) => {
                    recovered += usize::from(k == key);
                    break;
                }
                KpaOutcome::InsufficientData => redraws += 1,
            }
        }
    }
    let rate = if trials == 0 {
        0.0
    } else {
        100.0 * recovered as f64 / trials as f64
    };
    writeln!(
        out,
        "  recovered {recovered}/{trials} keys ({rate:.1}%), {redraws} singular X redrawn"
    )?;

    // Same attack against the dynamic scheme, granting the attacker the
    // whitening vectors: n whitened blocks under n different keys.
    let mut predicted = 0usize;
    for _ in 0..trials {
        let km = keygen(n, prime, rng, 1)?;
        let mut enc = Encryptor::new(&km);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..n {
            let m = Vector::random(prime, n, rng)?;
            let c = enc.encrypt_next(&m, &mut Untallied)?;
            xs.push(m.add(&enc.state().whitening, &mut Untallied)?);
            ys.push(c);
        }
        let sample = KpaSample {
            plaintexts: Matrix::from_row_vectors(&xs)?,
            ciphertexts: Matrix::from_row_vectors(&ys)?,
        };
        if let KpaOutcome::Recovered(k) = kpa_recover_hill(&sample)? {
            let m = Vector::random(prime, n, rng)?;
            let next_state = advance_chain(&km, enc.state(), &mut Untallied);
            let whitened = m.add(&next_state.whitening, &mut Untallied)?;
            let actual = enc.encrypt_next(&m, &mut Untallied)?;
            if vec_mat_mul(&whitened, &k, &mut Untallied)? == actual {
                predicted += 1;
            }
        }
    }
    writeln!(
        out,
        "dynamic scheme, same attack on {n} whitened blocks: recovered matrix predicts the next block in {predicted}/{trials} trials"
    )?;

    let km = keygen(n, prime, rng, 1)?;
    let state = km.initial_state();
    // the count p^(n^2-n) needs m' != 0
    let m_prime = loop {
        let m = Vector::random(prime, n, rng)?;
        let w = m.add(&state.whitening, &mut Untallied)?;
        if !w.is_zero() {
            break w;
        }
    };
    let c = vec_mat_mul(&m_prime, &state.key, &mut Untallied)?;
    writeln!(
        out,
        "dynamic scheme, one pair per key: {n} equations, {} unknowns",
        n * n
    )?;
    writeln!(out, "  m' = {m_prime}, c = {c}")?;
    let count = variant_solution_count(&m_prime, &c)?;
    writeln!(
        out,
        "  matrices A with m'·A = c: p^(n^2-n) = {prime}^{} = {count}",
        n * n - n
    )?;
    match enumerable_space(n, prime) {
        Some(space) => {
            let all = enumerate_solution_count(&m_prime, &c, false).expect("space checked");
            let inv = enumerate_solution_count(&m_prime, &c, true).expect("space checked");
            let verdict = if count == all.into() {
                "match"
            } else {
                "MISMATCH"
            };
            writeln!(
                out,
                "  enumeration over {space} matrices: {all} ({verdict}); {inv} of them invertible"
            )?;
        }
        None => writeln!(
            out,
            "  enumeration skipped: {prime}^{} matrices exceeds the {ENUMERATION_LIMIT} limit",
            n * n
        )?,
    }
    Ok(())
}

fn bench(
    prime: Prime,
    n: usize,
    blocks: usize,
    seed: Option<u64>,
    format: ReportFormat,
    out: &mut dyn Write,
) -> anyhow::Result<u8> {
    let mut rng = make_rng(seed);
    let rng = &mut *rng;
    // order does not affect operation counts
    let km = keygen(n, prime, rng, 1)?;
    let message: Vec<Vector> = (0..blocks)
        .map(|_| Vector::random(prime, n, rng))
        .collect::<Result<_, _>>()?;
    let measured = measure_message(&km, &message)?;
    let nu = n as u64;
    let reports = measured.reports(nu);
    let totals = total_cost((blocks * n) as u64, nu);
    let enc_total = measured.encrypt_total();
    let dec_total = measured.decrypt_total();
    let hill = ClassicalHillKey::new(km.initial_key().clone())?;
    let classical = measure_classical(&hill, &message[0])?;
    let table = comparison_table(nu, prime);

    let proposed_ok = reports.iter().all(|r| r.is_exact())
        && enc_total == totals.encrypt
        && dec_total == totals.decrypt
        && measured.roundtrip_ok;

    match format {
        ReportFormat::Csv => {
            write!(out, "{}", render_csv(&table))?;
            writeln!(out)?;
            writeln!(out, "kind,scheme,phase,block,n,measured_muls,measured_adds,measured_invs,expected_muls,expected_adds,expected_invs,exact")?;
            let mut row = |kind: &str,
                           scheme: String,
                           phase: String,
                           block: String,
                           m: crate::OpCounts,
                           e: crate::OpCounts| {
                writeln!(
                    out,
                    "{kind},{scheme},{phase},{block},{n},{},{},{},{},{},{},{}",
                    m.muls,
                    m.adds,
                    m.invs,
                    e.muls,
                    e.adds,
                    e.invs,
                    m == e
                )
            };
            for (i, r) in reports.iter().enumerate() {
                let block = (i % blocks) + 1;
                row(
                    "block",
                    r.scheme.to_string(),
                    r.phase.to_string(),
                    block.to_string(),
                    r.measured,
                    r.expected,
                )?;
            }
            row(
                "total",
                "proposed".into(),
                "encrypt".into(),
                "all".into(),
                enc_total,
                totals.encrypt,
            )?;
            row(
                "total",
                "proposed".into(),
                "decrypt".into(),
                "all".into(),
                dec_total,
                totals.decrypt,
            )?;
            for r in &classical {
                row(
                    "block",
                    r.scheme.to_string(),
                    r.phase.to_string(),
                    "1".into(),
                    r.measured,
                    r.expected,
                )?;
            }
        }
        ReportFormat::Text => {
            writeln!(
                out,
                "instrumented run: p={prime}, n={n}, {blocks} blocks ({} symbols)",
                blocks * n
            )?;
            for r in &reports {
                writeln!(out, "  {r}")?;
            }
            writeln!(
                out,
                "encryption total: measured ({enc_total}) vs closed form ({}) -> {}",
                totals.encrypt,
                if enc_total == totals.encrypt {
                    "exact"
                } else {
                    "MISMATCH"
                }
            )?;
            writeln!(
                out,
                "decryption total: measured ({dec_total}) vs closed form ({}) -> {}",
                totals.decrypt,
                if dec_total == totals.decrypt {
                    "exact"
                } else {
                    "MISMATCH"
                }
            )?;
            writeln!(
                out,
                "roundtrip: {}",
                if measured.roundtrip_ok {
                    "ok"
                } else {
                    "FAILED"
                }
            )?;
            writeln!(
                out,
                "fixed-key Hill baseline (reference row adds = n^2-1, row product uses n(n-1)):"
            )?;
            for r in &classical {
                writeln!(out, "  {r}")?;
            }
            writeln!(out)?;
            writeln!(
                out,
                "per-block comparison (bit-op estimate = adds*λ + muls*λ^2 + invs*λ^3, λ={}):",
                prime.bit_length()
            )?;
            write!(out, "{}", render_text(&table))?;
        }
    }
    Ok(if proposed_ok { 0 } else { 1 })
}
