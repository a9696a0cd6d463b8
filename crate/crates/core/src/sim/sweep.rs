//! Cost tables over a range of data sizes.
//!
//! Each size runs the real contract through the trading phase, then forks
//! it: one copy settles by timeout (happy-path bytes), the other receives a
//! dispute over a corrupted chunk 0 (dispute bytes). Off-chain sizes come
//! from the closed-form payload length, which the tests pin to real
//! encodings. In the constant variant only the disputed element is signed,
//! since nothing else reaches the chain.

use serde::{Deserialize, Serialize};

use super::scenario::{DataSource, Scenario, ScenarioError, SellerBehavior};
use super::trade::{build_payload, commitment_of, schedule, setup, submission_for, Setup};
use crate::chunk::{
    dispute_payload_bits, payload_encoded_len, payload_framing_bytes, HashedChunk, SignedChunk, Variant,
};
use crate::contract::{Actor, Answer, Contract, DisputeSubmission, Ledger, Party, Phase};
use crate::merkle::depth_for;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variant: Variant,
    pub n_bits: u64,
    pub chunk_bits: u32,
    pub chunk_count: u64,
    pub tree_depth: u32,
    pub happy_phase: Phase,
    pub dispute_phase: Phase,
    pub happy_onchain_bits: u64,
    pub dispute_onchain_bits: u64,
    pub dispute_content_bits: u64,
    pub dispute_framing_bits: u64,
    pub formula_bits: u64,
    pub offchain_bits: u64,
    pub offchain_framing_bits: u64,
    pub dispute_blames: Option<Party>,
    pub adjudication_hashes: u64,
    pub adjudication_decrypt_bits: u64,
    pub adjudication_signature_verifies: u64,
    pub adjudication_merkle_fold_steps: u64,
}

fn invert(c: &[u8]) -> Vec<u8> {
    c.iter().map(|b| !b).collect()
}

/// One row per distinct size, in ascending order. `base` supplies the
/// variant, chunk size, scheme, deposits, seed and windows.
pub fn sweep(base: &Scenario, sizes_bits: &[u64]) -> Result<Vec<SweepRow>, ScenarioError> {
    let mut sizes = sizes_bits.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    sizes.iter().map(|&n| sweep_one(base, n)).collect()
}

fn sweep_one(base: &Scenario, n_bits: u64) -> Result<SweepRow, ScenarioError> {
    use schedule::*;

    let mut s = base.clone();
    s.data = DataSource::Random { size_bits: n_bits };
    s.seller = SellerBehavior::CorruptChunk(0);
    s.network = Default::default();
    let Setup {
        scheme,
        chunked,
        cert,
        seller_public,
        seller_secret,
        key,
        ..
    } = setup(&s)?;
    let variant = s.variant;
    let params = cert.params;
    let hashes = chunked.chunk_hashes(&scheme);
    let shipped = chunked.with_chunk(0, invert(chunked.chunk(0)));

    let (commit, submission) = match variant {
        Variant::Constant => {
            let hc = HashedChunk::seal(&scheme, &key, 0, hashes[0].clone(), shipped.chunk(0));
            let signed = SignedChunk::sign(&scheme, &seller_secret, 0, hc);
            let sub = DisputeSubmission::Constant {
                index: 0,
                chunk: signed.chunk,
                signature: signed.signature,
            };
            (None, sub)
        }
        _ => {
            let payload = build_payload(variant, &scheme, &shipped, &hashes, &key, &seller_secret);
            (commitment_of(&scheme, &payload), submission_for(&scheme, &payload, None, 0))
        }
    };

    let b = s.balances_or_default();
    let fail = |e: crate::contract::ContractError| ScenarioError::Invalid(format!("sweep trade rejected: {e}"));
    let mut c = Contract::register_certificate(variant, scheme, s.config, Ledger::new(b.seller, b.buyer), &cert, REGISTER)
        .map_err(fail)?;
    c.buyer_intent_and_fund(Actor::Buyer, &cert.root, s.deposits.target, s.deposits.buyer, BUYER_FUND)
        .map_err(fail)?;
    c.seller_fund(Actor::Seller, s.deposits.seller, seller_public, SELLER_FUND)
        .map_err(fail)?;
    if let Some(v) = commit {
        c.commit(Actor::Seller, v, COMMIT).map_err(fail)?;
    }
    c.buyer_ack(Actor::Buyer, Answer::Yes, ACK).map_err(fail)?;
    c.reveal_key(Actor::Seller, key, REVEAL).map_err(fail)?;

    let mut happy = c.clone();
    let grace = happy.state().deadlines.grace.expect("key revealed");
    happy.tick(grace + 1).map_err(fail)?;
    let verdict = c.dispute(Actor::Buyer, &submission, DISPUTE).map_err(fail)?;
    let report = c.onchain_footprint();
    let ops = report.adjudication_ops;
    let m = params.chunk_count as u64;
    Ok(SweepRow {
        variant,
        n_bits,
        chunk_bits: s.chunk_bits,
        chunk_count: m,
        tree_depth: depth_for(m),
        happy_phase: happy.phase(),
        dispute_phase: c.phase(),
        happy_onchain_bits: happy.onchain_footprint().onchain_bits(),
        dispute_onchain_bits: report.dispute_bytes.unwrap_or(0) * 8,
        dispute_content_bits: submission.content_bits(),
        dispute_framing_bits: submission.framing_bytes() as u64 * 8,
        formula_bits: dispute_payload_bits(
            variant,
            n_bits,
            s.chunk_bits,
            scheme.hash_bits(),
            scheme.alpha(),
            scheme.sig_bits(),
        ),
        offchain_bits: payload_encoded_len(variant, &scheme, &params) * 8,
        offchain_framing_bits: payload_framing_bytes(variant, m) * 8,
        dispute_blames: Some(verdict.dishonest),
        adjudication_hashes: ops.hashes,
        adjudication_decrypt_bits: ops.decrypt_bits,
        adjudication_signature_verifies: ops.signature_verifies,
        adjudication_merkle_fold_steps: ops.merkle_fold_steps,
    })
}
