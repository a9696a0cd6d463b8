//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blockmark::chunk::Variant;
use blockmark::contract::{Party, Phase};
use blockmark::crypto::{Digest, Scheme};
use blockmark::merkle::{verify, MerkleProof, MerkleTree, Side, Sibling};
use blockmark::sim::{
    self, buyer_behaviors, chaos, schedule, seller_behaviors, BuyerBehavior, DataSource, MatrixRow, Scenario,
    SellerBehavior, SweepRow,
};
use blockmark_cli::{chunk_opt, execute, matrix_rows, run_to_dir, Cli, Command};
use clap::Parser;

type Check = Result<String, String>;
type Entry<'a> = (&'static str, &'static str, Option<Duration>, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn parse_cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("blockmark").chain(args.iter().copied())).expect("valid arguments")
}

fn bench_csv(args: &[&str], dir: &Path) -> Result<Vec<SweepRow>, String> {
    let out = dir.join("bench.csv");
    let mut full = vec!["bench"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    execute(&parse_cli(&full), &mut std::io::sink()).map_err(|e| format!("bench failed: {e:#}"))?;
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    ensure!(text.starts_with("# scheme: "), "missing scheme header");
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| format!("unparseable CSV: {e}"))
}

fn doubling(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|k| 1u64 << k).collect()
}

fn ac1() -> Check {
    let r = chunk_opt(256, "1".parse().unwrap(), 1 << 20).map_err(|e| e.to_string())?;
    ensure!((r.optimum_bits - 369.33).abs() < 0.005, "L* = {}", r.optimum_bits);
    let gap = (r.scan_argmin_bits as f64 - r.optimum_bits).abs();
    ensure!(gap <= 8.0, "scan minimum {} is {gap:.2} bits from L*", r.scan_argmin_bits);
    ensure!(r.byte_aligned_bits % 8 == 0, "byte-aligned choice {}", r.byte_aligned_bits);
    Ok(format!(
        "L* = {:.2}, scan argmin {} for N=2^20, byte-aligned {}",
        r.optimum_bits, r.scan_argmin_bits, r.byte_aligned_bits
    ))
}

fn ac2(dir: &Path) -> Check {
    let rows = bench_csv(&["--variant", "o1", "--size", "2^10..2^24", "--chunk-bits", "256"], dir)?;
    ensure!(rows.iter().map(|r| r.n_bits).collect::<Vec<_>>() == doubling(10, 24), "wrong size list");
    for r in &rows {
        ensure!(r.formula_bits == 1032, "N={} formula {}", r.n_bits, r.formula_bits);
        ensure!(r.dispute_content_bits == 1032, "N={} measured {}", r.n_bits, r.dispute_content_bits);
        // kind, index, three length prefixes.
        ensure!(r.dispute_framing_bits == 11 * 8, "N={} framing {}", r.n_bits, r.dispute_framing_bits);
        ensure!(
            r.dispute_onchain_bits == r.formula_bits + r.dispute_framing_bits,
            "N={} serialized {} bits",
            r.n_bits,
            r.dispute_onchain_bits
        );
        ensure!(r.dispute_blames == Some(Party::Seller), "N={} verdict {:?}", r.n_bits, r.dispute_blames);
    }
    Ok(format!("{} sizes 2^10..2^24: 1032 content bits + 88 framing bits each", rows.len()))
}

fn ac3(dir: &Path) -> Check {
    let mut summary = vec![];
    for l in [256u32, 368] {
        let rows = bench_csv(&["--variant", "ologn", "--size", "2^10..2^24", "--chunk-bits", &l.to_string()], dir)?;
        ensure!(rows.len() == 15, "{} rows", rows.len());
        for r in &rows {
            let m = r.n_bits.div_ceil(l as u64);
            let mut depth = 0u64;
            while (1u64 << depth) < m {
                depth += 1;
            }
            let want = (depth + 1) * 256 + l as u64;
            ensure!(r.dispute_content_bits == want, "L={l} N={} measured {} want {want}", r.n_bits, r.dispute_content_bits);
            ensure!(r.formula_bits == want, "L={l} N={} formula {}", r.n_bits, r.formula_bits);
            ensure!(r.dispute_onchain_bits == want + r.dispute_framing_bits, "L={l} N={} framing", r.n_bits);
        }
        for w in rows.windows(2) {
            let step = w[1].dispute_content_bits as i64 - w[0].dispute_content_bits as i64;
            ensure!(step == 256, "L={l} N={}->{} grew by {step}", w[0].n_bits, w[1].n_bits);
        }
        summary.push(format!("L={l}: {}..{} bits", rows[0].dispute_content_bits, rows[14].dispute_content_bits));
    }
    Ok(format!("+256 bits per doubling; {}", summary.join(", ")))
}

fn matrix_for(variant: Variant, chunks: u64) -> Result<Vec<MatrixRow>, String> {
    let size = (chunks * 64).to_string();
    let cli = parse_cli(&["matrix", "--variant", variant.as_str(), "--size", &size, "--chunk-bits", "64", "--seed", "4"]);
    let Command::Matrix(a) = &cli.command else { unreachable!() };
    matrix_rows(a).map_err(|e| format!("{e:#}"))
}

fn ac4() -> Check {
    let d = Scenario::example(Variant::Linear).deposits;
    let (target, dep_s, dep_b) = (d.target as i128, d.seller as i128, d.buyer as i128);
    let mut runs = 0;
    let mut sellers = 0;
    let mut buyers = 0;
    for v in Variant::ALL {
        for m in [1u64, 2, 3, 5, 8, 16] {
            sellers = sellers.max(seller_behaviors(m as u32).len());
            buyers = buyers.max(buyer_behaviors(m as u32).len());
            let rows = matrix_for(v, m)?;
            runs += rows.len();
            for r in &rows {
                let tag = format!("{v} M={m} {} x {}", r.seller, r.buyer);
                ensure!(r.agree, "{tag}: contract {:?} oracle {:?}", r.contract_blames, r.oracle_blames);
                ensure!(r.honest_party_ok, "{tag}: honest party lost coins");
                ensure!(r.phase.is_terminal(), "{tag}: ended in {:?}", r.phase);
                let honest_buyer = r.buyer == BuyerBehavior::Honest.to_string();
                let honest_seller = r.seller == SellerBehavior::Honest.to_string();
                if honest_seller && honest_buyer {
                    ensure!(r.phase == Phase::Settled && r.seller_delta == target, "{tag}: {:?} {}", r.phase, r.seller_delta);
                }
                if r.seller.starts_with("corrupt_chunk") && honest_buyer {
                    // Buyer recovers price and deposit and takes the seller's deposit.
                    ensure!(r.contract_blames == Some(Party::Seller), "{tag}: {:?}", r.contract_blames);
                    ensure!(r.buyer_delta == dep_s && r.seller_delta == -dep_s, "{tag}: deltas {} {}", r.seller_delta, r.buyer_delta);
                }
                if honest_seller && r.buyer.starts_with("false_dispute") {
                    ensure!(r.contract_blames == Some(Party::Buyer), "{tag}: {:?}", r.contract_blames);
                    ensure!(r.seller_delta == target + dep_b, "{tag}: seller delta {}", r.seller_delta);
                }
            }
        }
    }
    ensure!(sellers >= 7 && buyers >= 5, "only {sellers} x {buyers} behaviors");
    Ok(format!("{runs} runs, up to {sellers} seller x {buyers} buyer behaviors, all agree with the oracle"))
}

fn ac5() -> Check {
    let mut refunded = 0;
    for v in Variant::ALL {
        for d in schedule::REGISTER..=schedule::REVEAL {
            let mut s = Scenario::example(v);
            s.data = DataSource::Random { size_bits: 2048 };
            s.seed = d;
            s.network.disconnect_at = Some(d);
            let o = sim::run(&s).map_err(|e| e.to_string())?;
            ensure!((o.deltas.seller, o.deltas.buyer) == (0, 0), "{v} tick {d}: deltas {:?}", o.deltas);
            match o.phase {
                Phase::Refunded => refunded += 1,
                // Nothing was escrowed: the buyer never funded.
                Phase::Created if d <= schedule::BUYER_FUND => {}
                p => return Err(format!("{v} disconnect at tick {d} ended {p:?}")),
            }
        }
    }
    Ok(format!(
        "ticks {}..={} x 3 variants: {refunded} Refunded, ticks {}..={} never escrow anything; all deltas zero",
        schedule::SELLER_FUND,
        schedule::REVEAL,
        schedule::REGISTER,
        schedule::BUYER_FUND
    ))
}

fn ac6() -> Check {
    let mut parts = vec![];
    for (i, v) in Variant::ALL.into_iter().enumerate() {
        let r = chaos(v, Scheme::default(), 1_000 + i as u64, 10_000, 24).map_err(|e| e.to_string())?;
        ensure!(r.sequences == 10_000, "{v}: {} sequences", r.sequences);
        ensure!(r.violations.is_empty(), "{v}: {} violations, first {}", r.violations.len(), r.violations[0]);
        parts.push(format!(
            "{v}: {} actions, {} accepted, {} terminal, {} disputes resolved",
            r.actions, r.accepted, r.terminal, r.disputes_resolved
        ));
    }
    Ok(format!("10^4 sequences per variant; {}", parts.join("; ")))
}

fn ac7() -> Check {
    let mut runs = 0;
    let mut disputed = 0;
    for v in Variant::ALL {
        let m = 8u32;
        let mut base = Scenario::example(v);
        base.data = DataSource::Random { size_bits: 2048 };
        base.seed = 21;
        for buyer in buyer_behaviors(m) {
            let mut s = base.clone();
            s.buyer = buyer;
            let o = sim::run(&s).map_err(|e| e.to_string())?;
            runs += 1;
            ensure!(o.privacy.plaintext_chunks.is_empty(), "{v} honest seller x {buyer}: plaintext {:?} on chain", o.privacy.plaintext_chunks);
            if v != Variant::Linear && o.verdict.is_some() && matches!(buyer, BuyerBehavior::FalseDisputeGenuineChunk(_)) {
                ensure!(o.privacy.ciphertext_chunks.len() == 1 && o.privacy.chunk_hashes.len() == 1, "{v} x {buyer}: {:?}", o.privacy);
                disputed += 1;
            }
        }
        if v == Variant::Linear {
            continue;
        }
        for w in 0..m {
            let mut s = base.clone();
            s.seller = SellerBehavior::CorruptChunk(w);
            let o = sim::run(&s).map_err(|e| e.to_string())?;
            runs += 1;
            ensure!(o.verdict.is_some(), "{v} corrupt {w}: no dispute");
            ensure!(o.privacy.plaintext_chunks.is_empty(), "{v} corrupt {w}: plaintext on chain");
            ensure!(o.privacy.ciphertext_chunks == vec![w], "{v} corrupt {w}: ciphertexts {:?}", o.privacy.ciphertext_chunks);
            ensure!(o.privacy.chunk_hashes == vec![w], "{v} corrupt {w}: hashes {:?}", o.privacy.chunk_hashes);
            disputed += 1;
        }
    }
    Ok(format!("{runs} runs scanned, no plaintext on chain; {disputed} disputed chunked runs expose exactly one chunk"))
}

fn flip(d: &Digest, bit: usize) -> Digest {
    let mut b = d.as_bytes().to_vec();
    b[bit / 8] ^= 1 << (bit % 8);
    Digest::from_bytes(&b).unwrap()
}

fn ac8() -> Check {
    let s = Scheme::default();
    let mut tampers = 0u64;
    for m in 1..=8usize {
        let leaves: Vec<Vec<u8>> = (0..m).map(|i| (0x5eed_0000_0000_0000u64 | i as u64).to_le_bytes().to_vec()).collect();
        let t = MerkleTree::build(&s, leaves.clone()).map_err(|e| e.to_string())?;
        for (i, leaf) in leaves.iter().enumerate() {
            let p = t.prove(i).map_err(|e| e.to_string())?;
            ensure!(verify(&s, t.root(), leaf, &p), "M={m} i={i}: honest proof fails");
            let mut reject = |what: String, leaf: &[u8], q: &MerkleProof| {
                tampers += 1;
                if verify(&s, t.root(), leaf, q) {
                    Err(format!("M={m} i={i}: {what} accepted"))
                } else {
                    Ok(())
                }
            };
            for bit in 0..64 {
                let mut l = leaf.clone();
                l[bit / 8] ^= 1 << (bit % 8);
                reject(format!("leaf bit {bit}"), &l, &p)?;
            }
            for (j, other) in leaves.iter().enumerate() {
                if j != i {
                    reject(format!("leaf {j} substituted"), other, &p)?;
                }
            }
            for bit in 0..32 {
                let mut q = p.clone();
                q.leaf_index ^= 1 << bit;
                reject(format!("index bit {bit}"), leaf, &q)?;
            }
            for j in 0..p.siblings.len() {
                for bit in 0..256 {
                    let mut q = p.clone();
                    q.siblings[j].digest = flip(&q.siblings[j].digest, bit);
                    reject(format!("sibling {j} bit {bit}"), leaf, &q)?;
                }
                let mut q = p.clone();
                q.siblings[j].side = if q.siblings[j].side == Side::Left { Side::Right } else { Side::Left };
                reject(format!("sibling {j} side"), leaf, &q)?;
                let mut q = p.clone();
                q.siblings.remove(j);
                reject(format!("sibling {j} removed"), leaf, &q)?;
            }
            for side in [Side::Left, Side::Right] {
                let mut q = p.clone();
                q.siblings.push(Sibling { digest: t.root().clone(), side });
                reject(format!("extra {side:?} level"), leaf, &q)?;
            }
        }
    }
    let mut complete = 0;
    for m in 1..=16usize {
        let leaves: Vec<Vec<u8>> = (0..m).map(|i| (i as u64).to_be_bytes().to_vec()).collect();
        let t = MerkleTree::build(&s, leaves.clone()).map_err(|e| e.to_string())?;
        for (i, leaf) in leaves.iter().enumerate() {
            let p = t.prove(i).map_err(|e| e.to_string())?;
            let wire = MerkleProof::decode(&p.encode(), s.digest_bytes()).map_err(|e| e.to_string())?;
            ensure!(verify(&s, t.root(), leaf, &wire), "M={m} i={i}: completeness fails");
            complete += 1;
        }
    }
    Ok(format!("{tampers} tampered proofs rejected (M <= 8); {complete} honest proofs verify (M <= 16)"))
}

fn ac9(dir: &Path) -> Check {
    let scenarios = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<_> = std::fs::read_dir(&scenarios)
        .map_err(|e| format!("{}: {e}", scenarios.display()))?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    ensure!(!files.is_empty(), "no scenarios found");
    for f in &files {
        let name = f.file_stem().unwrap().to_string_lossy();
        let mut outputs = vec![];
        for k in 0..2 {
            let out = dir.join(format!("{name}-{k}"));
            let cli = parse_cli(&["run", f.to_str().unwrap(), "--seed", "1234", "--out", out.to_str().unwrap()]);
            execute(&cli, &mut std::io::sink()).map_err(|e| format!("{name}: {e:#}"))?;
            let read = |n: &str| std::fs::read(out.join(n)).map_err(|e| e.to_string());
            outputs.push((read("transcript.jsonl")?, read("outcome.json")?));
        }
        ensure!(outputs[0] == outputs[1], "{name}: outputs differ between runs");
    }
    let mut s = Scenario::example(Variant::Constant);
    s.seller = SellerBehavior::CorruptChunk(1);
    let a = run_to_dir(&s, &dir.join("a")).map_err(|e| e.to_string())?;
    s.seed += 1;
    let b = run_to_dir(&s, &dir.join("b")).map_err(|e| e.to_string())?;
    ensure!(a.transcript != b.transcript, "different seeds gave the same transcript");
    Ok(format!("{} scenario files run twice with byte-identical transcript and outcome", files.len()))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let checks: Vec<Entry> = vec![
        ("AC1", "optimal chunk size", Some(Duration::from_secs(1)), Box::new(ac1)),
        ("AC2", "constant dispute payload", Some(Duration::from_secs(10)), Box::new(|| ac2(dir.path()))),
        ("AC3", "logarithmic dispute payload", None, Box::new(|| ac3(dir.path()))),
        ("AC4", "settlement matrix", Some(Duration::from_secs(60)), Box::new(ac4)),
        ("AC5", "timeout refund safety", None, Box::new(ac5)),
        ("AC6", "coin conservation", None, Box::new(ac6)),
        ("AC7", "privacy", None, Box::new(ac7)),
        ("AC8", "merkle soundness", None, Box::new(ac8)),
        ("AC9", "determinism", None, Box::new(|| ac9(dir.path()))),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, limit, check) in &checks {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if took > *l => Err(format!("took {took:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS {id} {name} ({took:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name} ({took:.2?}): {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
