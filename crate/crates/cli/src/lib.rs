//! Command implementations behind the `blockmark` binary.
//!
//! Every command is deterministic given its flags and seed. Tabular output
//! is CSV whose first line is a `# scheme: ...` comment naming the
//! primitives and parameters; read it with the comment character set to `#`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use blockmark::chunk::{
    byte_aligned_optimum, continuous_dispute_cost, dispute_payload_bits, optimal_chunk_bits, Variant,
};
use blockmark::crypto::{Alpha, Scheme, SchemeDescriptor};
use blockmark::sim::{self, MatrixRow, MatrixSummary, Scenario, SchemeParams, SweepRow, TradeOutcome};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub const SEED_ENV: &str = "BLOCKMARK_SEED";

#[derive(Debug, Parser)]
#[command(name = "blockmark", version, about = "Fair-exchange trade simulator and cost tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario file, writing transcript.jsonl and outcome.json.
    Run(RunArgs),
    /// Sweep data sizes and write a cost table.
    Bench(BenchArgs),
    /// Report the chunk size minimizing the logarithmic dispute upload.
    ChunkOpt(ChunkOptArgs),
    /// Run every seller behavior against every buyer behavior.
    Matrix(MatrixArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario JSON file.
    pub scenario: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, default_value_t = 256)]
    pub hash_bits: u32,
    /// Ciphertext expansion, e.g. `1`, `3/2` or `1.25`.
    #[arg(long, default_value = "1")]
    pub alpha: Alpha,
    /// 65 selects secp256k1; other widths use a keyed-hash test signature.
    #[arg(long, default_value_t = 65)]
    pub sig_bytes: u32,
}

impl SchemeArgs {
    fn params(&self) -> SchemeParams {
        SchemeParams {
            hash_bits: self.hash_bits,
            alpha: self.alpha,
            sig_bytes: self.sig_bytes,
        }
    }

    fn descriptor(&self) -> Result<SchemeDescriptor> {
        Ok(self.params().scheme()?.descriptor())
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Variants to sweep (on, ologn, o1); all three when omitted.
    #[arg(long, value_delimiter = ',')]
    pub variant: Vec<Variant>,
    /// Data sizes in bits: `4096`, `2^20`, or a doubling range `2^10..2^24`.
    #[arg(long, value_delimiter = ',', default_value = "2^10..2^24")]
    pub size: Vec<SizeSpec>,
    /// Chunk size in bits. Defaults to 368 for ologn and 256 otherwise.
    #[arg(long)]
    pub chunk_bits: Option<u32>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChunkOptArgs {
    #[arg(long, default_value_t = 256)]
    pub hash_bits: u32,
    #[arg(long, default_value = "1")]
    pub alpha: Alpha,
    /// Data size in bits used for the cost scan.
    #[arg(long, default_value = "2^20")]
    pub size: SizeSpec,
    /// JSON output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[arg(long, value_delimiter = ',')]
    pub variant: Vec<Variant>,
    /// Data size in bits.
    #[arg(long, default_value = "1024")]
    pub size: SizeSpec,
    #[arg(long, default_value_t = 64)]
    pub chunk_bits: u32,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One or more sizes in bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeSpec(pub Vec<u64>);

fn parse_size(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let v = match s.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base.trim().parse().map_err(|_| format!("bad size {s:?}"))?;
            let exp: u32 = exp.trim().parse().map_err(|_| format!("bad size {s:?}"))?;
            base.checked_pow(exp).ok_or_else(|| format!("size {s:?} overflows"))?
        }
        None => s.parse().map_err(|_| format!("bad size {s:?}"))?,
    };
    if v == 0 {
        return Err("size must be positive".into());
    }
    Ok(v)
}

impl std::str::FromStr for SizeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (parse_size(lo)?, parse_size(hi)?);
                if lo > hi {
                    return Err(format!("empty range {s:?}"));
                }
                let mut out = vec![];
                let mut n = lo;
                while n <= hi {
                    out.push(n);
                    n = match n.checked_mul(2) {
                        Some(n) => n,
                        None => break,
                    };
                }
                Ok(SizeSpec(out))
            }
            None => Ok(SizeSpec(vec![parse_size(s)?])),
        }
    }
}

fn variants(v: &[Variant]) -> Vec<Variant> {
    let mut v = if v.is_empty() { Variant::ALL.to_vec() } else { v.to_vec() };
    v.sort();
    v.dedup();
    v
}

fn scheme_line(d: &SchemeDescriptor, seed: u64) -> String {
    format!(
        "# scheme: {} hash_bits={} alpha={} sig_bytes={} seed={}\n",
        d.name, d.hash_bits, d.alpha, d.sig_bytes, seed
    )
}

fn write_csv<T: Serialize>(header: &str, rows: &[T], out: &mut dyn Write) -> Result<()> {
    out.write_all(header.as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn emit(path: Option<&Path>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            f(&mut file)
        }
        None => f(stdout),
    }
}

// -- run -----------------------------------------------------------------

pub fn load_scenario(path: &Path, seed: Option<u64>) -> Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut s = Scenario::from_json(&text).with_context(|| format!("loading {}", path.display()))?;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    Ok(s)
}

/// Runs `scenario` and writes `transcript.jsonl` and `outcome.json` into `out`.
pub fn run_to_dir(scenario: &Scenario, out: &Path) -> Result<TradeOutcome> {
    let outcome = sim::run(scenario)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let transcript = outcome.transcript.as_ref().context("run produced no transcript")?;
    fs::write(out.join("transcript.jsonl"), transcript.to_jsonl())?;
    fs::write(out.join("outcome.json"), serde_json::to_string_pretty(&outcome)? + "\n")?;
    Ok(outcome)
}

fn cmd_run(a: &RunArgs, stdout: &mut dyn Write) -> Result<()> {
    let s = load_scenario(&a.scenario, a.seed)?;
    let o = run_to_dir(&s, &a.out)?;
    let blame = match o.contract_blames() {
        Some(p) => format!(" dishonest={p:?}").to_lowercase(),
        None => String::new(),
    };
    writeln!(
        stdout,
        "{} seed={} phase={:?}{} seller={:+} buyer={:+} onchain_bytes={} oracle_agrees={}",
        o.variant, s.seed, o.phase, blame, o.deltas.seller, o.deltas.buyer, o.cost.onchain.onchain_bytes, o.oracle_agrees
    )?;
    Ok(())
}

// -- bench ---------------------------------------------------------------

pub fn default_chunk_bits(v: Variant) -> u32 {
    match v {
        Variant::Logarithmic => 368,
        _ => 256,
    }
}

/// Cost rows for every requested variant and size, sorted by variant then
/// size.
pub fn bench_rows(a: &BenchArgs) -> Result<Vec<SweepRow>> {
    let mut sizes: Vec<u64> = a.size.iter().flat_map(|s| s.0.iter().copied()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rows = vec![];
    for v in variants(&a.variant) {
        let mut base = Scenario::example(v);
        base.chunk_bits = a.chunk_bits.unwrap_or(default_chunk_bits(v));
        base.scheme = a.scheme.params();
        base.seed = a.seed;
        rows.extend(sim::sweep(&base, &sizes).with_context(|| format!("sweeping {v}"))?);
    }
    Ok(rows)
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> Result<()> {
    let header = scheme_line(&a.scheme.descriptor()?, a.seed);
    let rows = bench_rows(a)?;
    emit(a.out.as_deref(), stdout, |w| write_csv(&header, &rows, w))
}

// -- chunk-opt -----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostSample {
    pub chunk_bits: u32,
    /// `(log2(N/L) + 1)·h + α·L`.
    pub continuous_bits: f64,
    /// The logarithmic dispute upload with a whole-level tree.
    pub dispute_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChunkOptReport {
    pub hash_bits: u32,
    pub alpha: Alpha,
    pub n_bits: u64,
    pub optimum_bits: f64,
    /// Integer `L` minimizing the continuous cost.
    pub scan_argmin_bits: u32,
    /// Multiple of 8 next to the optimum with the lower cost.
    pub byte_aligned_bits: u32,
    pub samples: Vec<CostSample>,
}

pub fn chunk_opt(hash_bits: u32, alpha: Alpha, n_bits: u64) -> Result<ChunkOptReport> {
    // Only the hash width and α matter; the signature width is a placeholder.
    Scheme::new(hash_bits, alpha, 65)?;
    let opt = optimal_chunk_bits(hash_bits, alpha);
    let cost = |l: u32| continuous_dispute_cost(n_bits as f64, l as f64, hash_bits, alpha);
    let upper = ((4.0 * opt).ceil() as u64).min(n_bits).max(1) as u32;
    let scan = (1..=upper)
        .min_by(|&a, &b| cost(a).total_cmp(&cost(b)))
        .expect("nonempty scan range");
    let aligned = byte_aligned_optimum(hash_bits, alpha, n_bits as f64);
    let mut points: Vec<u32> = [opt / 4.0, opt / 2.0, opt, 2.0 * opt, 4.0 * opt]
        .iter()
        .map(|&l| ((l / 8.0).round() as u32).max(1) * 8)
        .chain([scan, aligned])
        .collect();
    points.sort_unstable();
    points.dedup();
    let samples = points
        .into_iter()
        .map(|l| CostSample {
            chunk_bits: l,
            continuous_bits: cost(l),
            dispute_bits: dispute_payload_bits(Variant::Logarithmic, n_bits, l, hash_bits, alpha, 0),
        })
        .collect();
    Ok(ChunkOptReport {
        hash_bits,
        alpha,
        n_bits,
        optimum_bits: opt,
        scan_argmin_bits: scan,
        byte_aligned_bits: aligned,
        samples,
    })
}

fn cmd_chunk_opt(a: &ChunkOptArgs, stdout: &mut dyn Write) -> Result<()> {
    let [n] = a.size.0[..] else {
        bail!("chunk-opt takes a single size");
    };
    let report = chunk_opt(a.hash_bits, a.alpha, n)?;
    emit(a.out.as_deref(), stdout, |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })
}

// -- matrix --------------------------------------------------------------

pub fn matrix_rows(a: &MatrixArgs) -> Result<Vec<MatrixRow>> {
    let [n] = a.size.0[..] else {
        bail!("matrix takes a single size");
    };
    let mut rows = vec![];
    for v in variants(&a.variant) {
        let mut base = Scenario::example(v);
        base.data = sim::DataSource::Random { size_bits: n };
        base.chunk_bits = a.chunk_bits;
        base.scheme = a.scheme.params();
        base.seed = a.seed;
        rows.extend(sim::matrix(&base).with_context(|| format!("matrix for {v}"))?);
    }
    Ok(rows)
}

fn cmd_matrix(a: &MatrixArgs, stdout: &mut dyn Write) -> Result<()> {
    let header = scheme_line(&a.scheme.descriptor()?, a.seed);
    let rows = matrix_rows(a)?;
    let MatrixSummary {
        runs,
        agreements,
        disputes,
        honest_party_ok,
    } = sim::summarize(&rows);
    emit(a.out.as_deref(), stdout, |w| write_csv(&header, &rows, w))?;
    eprintln!("{runs} runs, {disputes} disputes, {agreements} agree with the oracle, {honest_party_ok} honest-party checks pass");
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, stdout),
        Command::Bench(a) => cmd_bench(a, stdout),
        Command::ChunkOpt(a) => cmd_chunk_opt(a, stdout),
        Command::Matrix(a) => cmd_matrix(a, stdout),
    }
}
