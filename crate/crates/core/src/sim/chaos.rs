//! Random action sequences against one contract, checking state invariants
//! after every call.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::scenario::ScenarioError;
use super::trade::{build_payload, commitment_of, rng, submission_for};
use crate::chunk::{split, Certificate, OffchainPayload, Variant};
use crate::contract::{Actor, Answer, Contract, ContractConfig, DisputeSubmission, Ledger, Phase};
use crate::crypto::{Digest, PublicKey, Scheme, SymmetricKey};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChaosReport {
    pub sequences: u64,
    pub actions: u64,
    pub accepted: u64,
    pub terminal: u64,
    pub disputes_resolved: u64,
    pub violations: Vec<String>,
}

/// Fixed trade material shared by every sequence of one variant.
struct Material {
    variant: Variant,
    scheme: Scheme,
    cert: Certificate,
    seller_pk: PublicKey,
    key: SymmetricKey,
    payload: OffchainPayload,
    commitment: Option<Digest>,
}

impl Material {
    fn new(variant: Variant, scheme: Scheme, seed: u64) -> Self {
        let mut r = rng(seed, 0);
        let mut data = vec![0u8; 40];
        r.fill_bytes(&mut data);
        let chunked = split(&data, 64).expect("valid chunking");
        let carol = scheme.generate_keypair(&mut r);
        let seller = scheme.generate_keypair(&mut r);
        let key = SymmetricKey::generate(&mut r);
        let cert = Certificate::issue(&scheme, variant, &chunked, &carol);
        let hashes = chunked.chunk_hashes(&scheme);
        let payload = build_payload(variant, &scheme, &chunked, &hashes, &key, &seller.secret);
        Self {
            variant,
            scheme,
            commitment: commitment_of(&scheme, &payload),
            cert,
            seller_pk: seller.public,
            key,
            payload,
        }
    }
}

/// The call that would advance a trade in `phase`, so sequences reach the
/// later phases often enough to matter.
fn next_op(phase: Phase, variant: Variant, r: &mut impl Rng) -> u32 {
    match phase {
        Phase::Created => 0,
        Phase::BuyerFunded => 1,
        Phase::SellerFunded if variant == Variant::Constant => 3,
        Phase::SellerFunded => 2,
        Phase::Committed => 3,
        Phase::Acked => 4,
        Phase::KeyRevealed => [5, 6][r.gen_range(0..2)],
        _ => r.gen_range(0..7),
    }
}

fn actor_for(op: u32, r: &mut impl Rng) -> Actor {
    if r.gen_bool(0.2) {
        return [Actor::Buyer, Actor::Seller, Actor::Carol, Actor::Clock][r.gen_range(0..4)];
    }
    match op {
        0 | 3 | 5 => Actor::Buyer,
        1 | 2 | 4 => Actor::Seller,
        _ => Actor::Clock,
    }
}

fn random_digest(s: &Scheme, r: &mut impl Rng) -> Digest {
    let mut b = vec![0u8; s.digest_bytes()];
    r.fill_bytes(&mut b);
    Digest::from_bytes(&b).expect("nonempty")
}

fn random_submission(m: &Material, r: &mut impl Rng) -> DisputeSubmission {
    let count = m.cert.params.chunk_count as usize;
    let mut sub = submission_for(&m.scheme, &m.payload, None, r.gen_range(0..count));
    match r.gen_range(0..5) {
        0 => {}
        1 => {
            let mut bytes = sub.encode();
            let i = r.gen_range(0..bytes.len());
            bytes[i] ^= 1 << r.gen_range(0..8);
            if let Ok(s) = DisputeSubmission::decode(&bytes) {
                sub = s;
            }
        }
        2 => {
            sub = DisputeSubmission::Linear {
                ciphertext: vec![0; r.gen_range(0..64)],
            }
        }
        3 => {
            if let DisputeSubmission::Constant { index, .. } = &mut sub {
                *index = r.gen_range(0..count as u32 + 2);
            }
            if let DisputeSubmission::Logarithmic { proof, .. } = &mut sub {
                proof.leaf_index = r.gen_range(0..count as u32 + 2);
            }
        }
        _ => {
            let mut b = vec![0u8; m.scheme.digest_bytes()];
            r.fill_bytes(&mut b);
            if let DisputeSubmission::Constant { chunk, .. } | DisputeSubmission::Logarithmic { chunk, .. } = &mut sub {
                chunk.chunk_hash = Digest::from_bytes(&b).expect("nonempty");
            }
        }
    }
    sub
}

/// Runs `sequences` random sequences of up to `max_len` calls each.
pub fn chaos(variant: Variant, scheme: Scheme, seed: u64, sequences: u64, max_len: usize) -> Result<ChaosReport, ScenarioError> {
    let m = Material::new(variant, scheme, seed);
    let mut report = ChaosReport::default();
    let mut r = rng(seed, 100);
    for seq in 0..sequences {
        let seller0 = r.gen_range(0..600u64);
        let buyer0 = r.gen_range(0..3_000u64);
        let supply = seller0 as u128 + buyer0 as u128;
        let config = ContractConfig {
            funding_window: r.gen_range(5..50),
            grace_window: r.gen_range(1..50),
        };
        let mut c = Contract::register_certificate(m.variant, m.scheme, config, Ledger::new(seller0, buyer0), &m.cert, 0)
            .map_err(|e| ScenarioError::Invalid(format!("registration: {e}")))?;
        let mut now = 0u64;
        let mut committed: Option<Digest> = None;
        let mut revealed: Option<SymmetricKey> = None;
        report.sequences += 1;
        for step in 0..r.gen_range(1..=max_len) {
            now = match r.gen_range(0..10) {
                0 => now.saturating_sub(r.gen_range(1..5)),
                1 => now + r.gen_range(10..100),
                _ => now + r.gen_range(0..3),
            };
            let op = if r.gen_bool(0.6) {
                next_op(c.phase(), m.variant, &mut r)
            } else {
                r.gen_range(0..7)
            };
            let actor = actor_for(op, &mut r);
            let accepted = match op {
                0 => {
                    let root = if r.gen_bool(0.8) {
                        m.cert.root.clone()
                    } else {
                        random_digest(&m.scheme, &mut r)
                    };
                    c.buyer_intent_and_fund(actor, &root, r.gen_range(0..2_000), r.gen_range(0..500), now)
                        .is_ok()
                }
                1 => c.seller_fund(actor, r.gen_range(0..300), m.seller_pk.clone(), now).is_ok(),
                2 => {
                    let v = match (&m.commitment, r.gen_bool(0.7)) {
                        (Some(d), true) => d.clone(),
                        _ => random_digest(&m.scheme, &mut r),
                    };
                    c.commit(actor, v, now).is_ok()
                }
                3 => {
                    let a = if r.gen_bool(0.8) { Answer::Yes } else { Answer::No };
                    c.buyer_ack(actor, a, now).is_ok()
                }
                4 => {
                    let k = if r.gen_bool(0.5) {
                        m.key.clone()
                    } else {
                        SymmetricKey::generate(&mut r)
                    };
                    c.reveal_key(actor, k, now).is_ok()
                }
                5 => c.dispute(actor, &random_submission(&m, &mut r), now).is_ok(),
                _ => c.tick(now).map(|t| !t.is_empty()).unwrap_or(false),
            };
            report.actions += 1;
            report.accepted += accepted as u64;

            let st = c.state();
            let mut fail = |what: &str| report.violations.push(format!("sequence {seq} step {step}: {what}"));
            if c.ledger().check().is_err() {
                fail("ledger conservation");
            }
            let held: u128 = c.ledger().balances().values().map(|&b| b as u128).sum::<u128>() + c.ledger().escrowed_total();
            if held != supply {
                fail("coin supply changed");
            }
            if st.phase.is_terminal() && !c.ledger().escrow().is_empty() {
                fail("terminal phase with funds in escrow");
            }
            if st.verdict.is_some() != (st.phase == Phase::DisputeResolved) {
                fail("verdict present iff dispute resolved");
            }
            match (&committed, &st.committed_value) {
                (Some(a), Some(b)) if a != b => fail("commitment changed"),
                (Some(_), None) => fail("commitment cleared"),
                _ => committed = st.committed_value.clone(),
            }
            match (&revealed, &st.revealed_key) {
                (Some(a), Some(b)) if a != b => fail("revealed key changed"),
                (Some(_), None) => fail("revealed key cleared"),
                _ => revealed = st.revealed_key.clone(),
            }
            if m.variant == Variant::Constant && st.committed_value.is_some() {
                fail("constant variant stored a commitment");
            }
        }
        report.terminal += c.phase().is_terminal() as u64;
        report.disputes_resolved += (c.phase() == Phase::DisputeResolved) as u64;
    }
    Ok(report)
}
