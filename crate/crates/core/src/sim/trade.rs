//! End-to-end execution of one scenario over the logical clock.

use std::collections::{BTreeSet, HashMap};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{oracle_adjudicate, OracleView};
use super::scenario::{Balances, BuyerBehavior, DataSource, Fabrication, Scenario, ScenarioError, SellerBehavior};
use super::transcript::{Transcript, TranscriptHeader, FORMAT};
use crate::chunk::{
    chunk_hash_root, dispute_payload_bits, split, Certificate, ChunkedData, HashedChunk, OffchainPayload, SignedChunk,
    Variant,
};
use crate::contract::{
    Actor, Answer, ActionKind, Contract, ContractError, CostReport, DisputeSubmission, Ledger, Party, Phase, Tick,
    Verdict,
};
use crate::crypto::{Digest, PublicKey, Scheme, SecretKey, SymmetricKey};
use crate::merkle::MerkleTree;

/// Ticks at which each step of the trading phase is attempted.
pub mod schedule {
    use crate::contract::Tick;

    pub const REGISTER: Tick = 0;
    pub const BUYER_FUND: Tick = 1;
    pub const SELLER_FUND: Tick = 2;
    pub const DELIVER: Tick = 3;
    pub const COMMIT: Tick = 4;
    pub const ACK: Tick = 5;
    pub const REVEAL: Tick = 6;
    pub const DISPUTE: Tick = 7;
}

/// Independent RNG streams derived from the scenario seed.
mod stream {
    pub const DATA: u64 = 1;
    pub const CAROL: u64 = 2;
    pub const SELLER: u64 = 3;
    pub const KEY: u64 = 4;
    pub const ADVERSARY: u64 = 5;
    pub const PRIOR_KEY: u64 = 6;
    pub const BUYER: u64 = 7;
}

pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceDeltas {
    pub seller: i128,
    pub buyer: i128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostSummary {
    pub onchain: CostReport,
    /// Encoded size of the payload the buyer received (0 if none arrived).
    pub offchain_bytes: u64,
    /// Closed-form dispute size for these parameters.
    pub dispute_formula_bits: u64,
    /// Hash, ciphertext and signature bits of the submitted dispute.
    pub dispute_content_bits: Option<u64>,
    pub dispute_framing_bytes: Option<u64>,
}

/// Chunk ordinals whose bytes occur somewhere in the on-chain log.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub plaintext_chunks: Vec<u32>,
    pub ciphertext_chunks: Vec<u32>,
    pub chunk_hashes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedAction {
    pub tick: Tick,
    pub actor: Actor,
    pub action: ActionKind,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeOutcome {
    pub variant: Variant,
    pub seller: SellerBehavior,
    pub buyer: BuyerBehavior,
    pub phase: Phase,
    pub verdict: Option<Verdict>,
    pub oracle_verdict: Option<Party>,
    pub oracle_agrees: bool,
    pub initial_balances: Balances,
    pub deltas: BalanceDeltas,
    pub buyer_received_valid_data: bool,
    pub cost: CostSummary,
    pub privacy: PrivacyReport,
    pub rejected: Vec<RejectedAction>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub transcript: Option<Transcript>,
}

impl TradeOutcome {
    pub fn contract_blames(&self) -> Option<Party> {
        self.verdict.as_ref().map(|v| v.dishonest)
    }
}

fn invert(chunk: &[u8]) -> Vec<u8> {
    chunk.iter().map(|b| !b).collect()
}

/// Builds a payload from `shipped` plaintext while claiming `claimed` hashes.
pub(crate) fn build_payload(
    variant: Variant,
    scheme: &Scheme,
    shipped: &ChunkedData,
    claimed: &[Digest],
    key: &SymmetricKey,
    signing_key: &SecretKey,
) -> OffchainPayload {
    let sealed = || {
        shipped
            .chunks()
            .iter()
            .zip(claimed)
            .enumerate()
            .map(|(i, (c, h))| HashedChunk::seal(scheme, key, i as u32, h.clone(), c))
    };
    match variant {
        Variant::Linear => OffchainPayload::Linear {
            ciphertext: scheme.encrypt(key, 0, &shipped.join()).bytes,
        },
        Variant::Logarithmic => OffchainPayload::Logarithmic {
            elements: sealed().collect(),
        },
        Variant::Constant => OffchainPayload::Constant {
            elements: sealed()
                .enumerate()
                .map(|(i, hc)| SignedChunk::sign(scheme, signing_key, i as u32, hc))
                .collect(),
        },
    }
}

/// Replaces element `w` of `payload` with element `w` of `other`.
fn splice(payload: &mut OffchainPayload, other: OffchainPayload, w: usize) {
    match (payload, other) {
        (OffchainPayload::Linear { ciphertext }, OffchainPayload::Linear { ciphertext: c }) => *ciphertext = c,
        (OffchainPayload::Logarithmic { elements }, OffchainPayload::Logarithmic { elements: mut o }) => {
            elements[w] = o.swap_remove(w)
        }
        (OffchainPayload::Constant { elements }, OffchainPayload::Constant { elements: mut o }) => {
            elements[w] = o.swap_remove(w)
        }
        _ => unreachable!("payloads of one variant"),
    }
}

pub(crate) fn commitment_of(scheme: &Scheme, payload: &OffchainPayload) -> Option<Digest> {
    match payload {
        OffchainPayload::Linear { ciphertext } => Some(scheme.hash(ciphertext)),
        OffchainPayload::Logarithmic { .. } => payload.data_tree(scheme).map(|t| t.root().clone()),
        OffchainPayload::Constant { .. } => None,
    }
}

/// The element at `index` as the buyer holds it, packaged as a dispute.
pub(crate) fn submission_for(
    scheme: &Scheme,
    payload: &OffchainPayload,
    tree: Option<&MerkleTree>,
    index: usize,
) -> DisputeSubmission {
    match payload {
        OffchainPayload::Linear { ciphertext } => DisputeSubmission::Linear {
            ciphertext: ciphertext.clone(),
        },
        OffchainPayload::Logarithmic { elements } => {
            let built;
            let tree = match tree {
                Some(t) => t,
                None => {
                    built = payload.data_tree(scheme).expect("nonempty payload");
                    &built
                }
            };
            DisputeSubmission::Logarithmic {
                chunk: elements[index].clone(),
                proof: tree.prove(index).expect("index within payload"),
            }
        }
        OffchainPayload::Constant { elements } => DisputeSubmission::Constant {
            index: index as u32,
            chunk: elements[index].chunk.clone(),
            signature: elements[index].signature.clone(),
        },
    }
}

/// Buyer checks before answering "Yes": structure, consistency with the
/// certificate and with what the seller put on-chain.
fn buyer_accepts(scheme: &Scheme, cert: &Certificate, contract: &Contract, payload: &OffchainPayload) -> bool {
    let params = &cert.params;
    let state = contract.state();
    if payload.variant() != state.variant {
        return false;
    }
    let ct_len = scheme.ciphertext_len(params.chunk_bytes());
    let chunks = payload.hashed_chunks();
    let chunk_checks = || {
        chunks.len() == params.chunk_count as usize
            && chunks
                .iter()
                .all(|c| c.ciphertext.len() == ct_len && c.chunk_hash.as_bytes().len() == scheme.digest_bytes())
            && chunk_hash_root(scheme, &chunks.iter().map(|c| c.chunk_hash.clone()).collect::<Vec<_>>())
                == cert.root
    };
    match payload {
        OffchainPayload::Linear { ciphertext } => {
            ciphertext.len() == scheme.ciphertext_len(params.original_len as usize)
                && state.committed_value.as_ref() == Some(&scheme.hash(ciphertext))
        }
        OffchainPayload::Logarithmic { .. } => {
            chunk_checks() && state.committed_value.is_some() && state.committed_value == commitment_of(scheme, payload)
        }
        OffchainPayload::Constant { elements } => {
            let Some(pk) = state.seller_pk.as_ref() else { return false };
            chunk_checks() && elements.iter().enumerate().all(|(i, e)| e.verify(scheme, pk, i as u32))
        }
    }
}

/// Decrypts the payload with `key`; returns the index of the first element
/// that does not match its claim, and whether the whole data came out right.
fn buyer_inspect(
    scheme: &Scheme,
    cert: &Certificate,
    payload: &OffchainPayload,
    key: &SymmetricKey,
    certified: &[u8],
) -> (Option<usize>, bool) {
    match payload {
        OffchainPayload::Linear { ciphertext } => match scheme.decrypt_bytes(key, 0, ciphertext) {
            Ok(pt) => {
                let ok = scheme.hash(&pt) == cert.root;
                ((!ok).then_some(0), pt == certified)
            }
            Err(_) => (Some(0), false),
        },
        _ => {
            let mut first_bad = None;
            let mut joined = Vec::new();
            for (i, c) in payload.hashed_chunks().into_iter().enumerate() {
                match scheme.decrypt_bytes(key, i as u64, &c.ciphertext) {
                    Ok(pt) => {
                        if first_bad.is_none() && scheme.hash(&pt) != c.chunk_hash {
                            first_bad = Some(i);
                        }
                        joined.extend_from_slice(&pt);
                    }
                    Err(_) => {
                        first_bad.get_or_insert(i);
                    }
                }
            }
            joined.truncate(cert.params.original_len as usize);
            (first_bad, joined == certified)
        }
    }
}

fn flip_bit(bytes: &mut [u8]) {
    if let Some(b) = bytes.first_mut() {
        *b ^= 0x01;
    }
}

fn fabricate(
    scheme: &Scheme,
    payload: &OffchainPayload,
    kind: Fabrication,
    index: usize,
    rng: &mut ChaCha20Rng,
) -> DisputeSubmission {
    let mut sub = submission_for(scheme, payload, None, index);
    let random_bytes = |rng: &mut ChaCha20Rng, n: usize| {
        let mut v = vec![0u8; n];
        rng.fill_bytes(&mut v);
        v
    };
    match &mut sub {
        DisputeSubmission::Linear { ciphertext } => match kind {
            Fabrication::RandomLeaf => *ciphertext = random_bytes(rng, ciphertext.len()),
            // The genuine ciphertext, falsely claimed not to decrypt.
            Fabrication::WrongClaim => {}
            Fabrication::TamperedProof | Fabrication::TamperedSignature => flip_bit(ciphertext),
        },
        DisputeSubmission::Logarithmic { chunk, proof } => match kind {
            Fabrication::RandomLeaf => {
                chunk.chunk_hash = Digest::from_bytes(&random_bytes(rng, scheme.digest_bytes())).unwrap();
                chunk.ciphertext = random_bytes(rng, chunk.ciphertext.len());
            }
            Fabrication::WrongClaim => {
                chunk.chunk_hash = Digest::from_bytes(&random_bytes(rng, scheme.digest_bytes())).unwrap();
            }
            Fabrication::TamperedProof | Fabrication::TamperedSignature => match proof.siblings.first_mut() {
                Some(sib) => {
                    let mut d = sib.digest.as_bytes().to_vec();
                    flip_bit(&mut d);
                    sib.digest = Digest::from_bytes(&d).unwrap();
                }
                // A one-leaf tree has no path; tamper with the leaf instead.
                None => flip_bit(&mut chunk.ciphertext),
            },
        },
        DisputeSubmission::Constant { chunk, signature, .. } => match kind {
            Fabrication::RandomLeaf => {
                chunk.chunk_hash = Digest::from_bytes(&random_bytes(rng, scheme.digest_bytes())).unwrap();
                chunk.ciphertext = random_bytes(rng, chunk.ciphertext.len());
            }
            Fabrication::WrongClaim => {
                chunk.chunk_hash = Digest::from_bytes(&random_bytes(rng, scheme.digest_bytes())).unwrap();
            }
            Fabrication::TamperedProof | Fabrication::TamperedSignature => flip_bit(&mut signature.0),
        },
    }
    sub
}

/// Finds which chunk ordinals of `needles` occur in any of `haystacks`.
fn scan(haystacks: &[&[u8]], needles: &[Vec<u8>]) -> Vec<u32> {
    let Some(width) = needles.first().map(|n| n.len()) else { return vec![] };
    if width == 0 {
        return vec![];
    }
    let mut index: HashMap<&[u8], Vec<u32>> = HashMap::new();
    for (i, n) in needles.iter().enumerate() {
        index.entry(&n[..]).or_default().push(i as u32);
    }
    let mut found = BTreeSet::new();
    for hay in haystacks {
        for w in hay.windows(width) {
            if let Some(ids) = index.get(w) {
                found.extend(ids.iter().copied());
            }
        }
    }
    found.into_iter().collect()
}

pub(crate) fn privacy_scan(
    contract: &Contract,
    certified: &ChunkedData,
    delivered: Option<&OffchainPayload>,
    scheme: &Scheme,
) -> PrivacyReport {
    let hay: Vec<&[u8]> = contract.log().iter().map(|r| &r.payload[..]).collect();
    let (cts, hashes): (Vec<Vec<u8>>, Vec<Vec<u8>>) = match delivered {
        Some(OffchainPayload::Linear { ciphertext }) => (vec![ciphertext.clone()], vec![]),
        Some(p) => p
            .hashed_chunks()
            .into_iter()
            .map(|c| (c.ciphertext.clone(), c.chunk_hash.as_bytes().to_vec()))
            .unzip(),
        None => (vec![], vec![]),
    };
    let hashes = if hashes.is_empty() {
        certified.chunk_hashes(scheme).into_iter().map(|d| d.as_bytes().to_vec()).collect()
    } else {
        hashes
    };
    PrivacyReport {
        plaintext_chunks: scan(&hay, certified.chunks()),
        ciphertext_chunks: scan(&hay, &cts),
        chunk_hashes: scan(&hay, &hashes),
    }
}

/// Key material and data for one scenario, derived from its seed.
pub(crate) struct Setup {
    pub scheme: Scheme,
    pub data: Vec<u8>,
    pub chunked: ChunkedData,
    pub cert: Certificate,
    pub seller_public: PublicKey,
    pub seller_secret: SecretKey,
    pub key: SymmetricKey,
}

pub(crate) fn setup(s: &Scenario) -> Result<Setup, ScenarioError> {
    s.validate()?;
    let scheme = s.scheme.scheme()?;
    let data = match &s.data {
        DataSource::Random { size_bits } => {
            let mut d = vec![0u8; (*size_bits / 8) as usize];
            rng(s.seed, stream::DATA).fill_bytes(&mut d);
            d
        }
        DataSource::Hex(h) => hex::decode(h).map_err(|e| ScenarioError::Invalid(format!("data.hex: {e}")))?,
    };
    let chunked = split(&data, s.chunk_bits).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let carol = scheme.generate_keypair(&mut rng(s.seed, stream::CAROL));
    let seller = scheme.generate_keypair(&mut rng(s.seed, stream::SELLER));
    let key = SymmetricKey::generate(&mut rng(s.seed, stream::KEY));
    let cert = Certificate::issue(&scheme, s.variant, &chunked, &carol);
    Ok(Setup {
        scheme,
        data,
        chunked,
        cert,
        seller_public: seller.public,
        seller_secret: seller.secret,
        key,
    })
}

struct Runner {
    contract: Contract,
    disconnect_at: Option<Tick>,
    rejected: Vec<RejectedAction>,
}

impl Runner {
    fn online(&self, t: Tick) -> bool {
        self.disconnect_at.is_none_or(|d| t < d)
    }

    fn attempt<T>(&mut self, t: Tick, actor: Actor, action: ActionKind, f: impl FnOnce(&mut Contract) -> Result<T, ContractError>) -> Option<T> {
        if !self.online(t) {
            return None;
        }
        match f(&mut self.contract) {
            Ok(v) => Some(v),
            Err(e) => {
                self.rejected.push(RejectedAction {
                    tick: t,
                    actor,
                    action,
                    error: e.to_string(),
                });
                None
            }
        }
    }
}

/// Runs one trade to a terminal state (or to quiescence, if the buyer never
/// funds) and cross-checks any verdict against the oracle.
pub fn run(s: &Scenario) -> Result<TradeOutcome, ScenarioError> {
    use schedule::*;

    let Setup {
        scheme,
        data,
        chunked,
        cert,
        seller_public,
        seller_secret,
        key,
    } = setup(s)?;
    let variant = s.variant;
    let balances = s.balances_or_default();
    let mut adversary = rng(s.seed, stream::ADVERSARY);
    let mut buyer_rng = rng(s.seed, stream::BUYER);
    let mut notes = Vec::new();

    // Seller's off-chain material.
    let genuine_hashes = chunked.chunk_hashes(&scheme);
    let rogue_signer = scheme.generate_keypair(&mut adversary);
    let signing_key = match s.seller {
        SellerBehavior::WrongCommitment => &rogue_signer.secret,
        _ => &seller_secret,
    };
    let shipped = match s.seller {
        SellerBehavior::CorruptChunk(w) => chunked.with_chunk(w as usize, invert(chunked.chunk(w as usize))),
        SellerBehavior::CorruptAllChunks => chunked
            .chunks()
            .iter()
            .enumerate()
            .fold(chunked.clone(), |acc, (i, c)| acc.with_chunk(i, invert(c))),
        _ => chunked.clone(),
    };
    let prior_key = SymmetricKey::generate(&mut rng(s.seed, stream::PRIOR_KEY));
    let prior_payload = || build_payload(variant, &scheme, &chunked, &genuine_hashes, &prior_key, &seller_secret);
    let mut payload = build_payload(variant, &scheme, &shipped, &genuine_hashes, &key, signing_key);
    if let SellerBehavior::ReplaySignedChunk(w) = s.seller {
        splice(&mut payload, prior_payload(), w as usize);
    }
    let commit_value = match s.seller {
        SellerBehavior::WrongCommitment => {
            let mut junk = [0u8; 32];
            adversary.fill_bytes(&mut junk);
            Some(scheme.hash(&junk))
        }
        _ => commitment_of(&scheme, &payload),
    };
    let revealed_key = match s.seller {
        SellerBehavior::WrongKey => SymmetricKey::generate(&mut adversary),
        _ => key.clone(),
    };
    let seller_silent = s.seller == SellerBehavior::SilentAfterFunding;

    let contract = Contract::register_certificate(
        variant,
        scheme,
        s.config,
        Ledger::new(balances.seller, balances.buyer),
        &cert,
        REGISTER,
    )
    .map_err(|e| ScenarioError::Invalid(format!("certificate registration failed: {e}")))?;
    let mut r = Runner {
        contract,
        disconnect_at: s.network.disconnect_at,
        rejected: Vec::new(),
    };

    r.attempt(BUYER_FUND, Actor::Buyer, ActionKind::BuyerFund, |c| {
        c.buyer_intent_and_fund(Actor::Buyer, &cert.root, s.deposits.target, s.deposits.buyer, BUYER_FUND)
    });
    if r.contract.phase() == Phase::BuyerFunded {
        r.attempt(SELLER_FUND, Actor::Seller, ActionKind::SellerFund, |c| {
            c.seller_fund(Actor::Seller, s.deposits.seller, seller_public.clone(), SELLER_FUND)
        });
    }
    let funded = r.contract.phase() == Phase::SellerFunded;

    let received = (funded && !seller_silent && !s.network.drop_offchain_payload && r.online(DELIVER))
        .then(|| payload.clone());
    let offchain_bytes = received.as_ref().map_or(0, |p| p.encode().len() as u64);

    if funded && !seller_silent && variant != Variant::Constant {
        if let Some(v) = commit_value.clone() {
            r.attempt(COMMIT, Actor::Seller, ActionKind::Commit, |c| c.commit(Actor::Seller, v, COMMIT));
        }
    }

    let ack_phase = match variant {
        Variant::Constant => Phase::SellerFunded,
        _ => Phase::Committed,
    };
    if r.contract.phase() == ack_phase {
        let answer = match (s.buyer, &received) {
            (BuyerBehavior::NoThenAbort, _) => Some(Answer::No),
            (BuyerBehavior::SilentAfterPayload, _) | (_, None) => None,
            (_, Some(p)) => Some(if buyer_accepts(&scheme, &cert, &r.contract, p) {
                Answer::Yes
            } else {
                Answer::No
            }),
        };
        if let Some(a) = answer {
            r.attempt(ACK, Actor::Buyer, ActionKind::Ack, |c| c.buyer_ack(Actor::Buyer, a, ACK));
        }
    }

    if r.contract.phase() == Phase::Acked && !seller_silent {
        r.attempt(REVEAL, Actor::Seller, ActionKind::RevealKey, |c| {
            c.reveal_key(Actor::Seller, revealed_key.clone(), REVEAL)
        });
    }

    let mut submission = None;
    let mut buyer_received_valid_data = false;
    if r.contract.phase() == Phase::KeyRevealed {
        let held = received.as_ref().expect("buyer acknowledged a received payload");
        let k = r.contract.state().revealed_key.clone().expect("revealed");
        let (first_bad, valid) = buyer_inspect(&scheme, &cert, held, &k, &data);
        buyer_received_valid_data = valid;
        submission = match s.buyer {
            BuyerBehavior::Honest => first_bad.map(|w| submission_for(&scheme, held, None, w)),
            BuyerBehavior::FalseDisputeGenuineChunk(w) => Some(submission_for(&scheme, held, None, w as usize)),
            BuyerBehavior::FalseDisputeFabricated { kind, index } => {
                Some(fabricate(&scheme, held, kind, index as usize, &mut buyer_rng))
            }
            BuyerBehavior::ReplayPriorSignature(w) => {
                let mut forged = held.clone();
                splice(&mut forged, prior_payload(), w as usize);
                let mut sub = submission_for(&scheme, &forged, None, w as usize);
                // The path must still authenticate against what was committed.
                if let (DisputeSubmission::Logarithmic { proof, .. }, DisputeSubmission::Logarithmic { proof: real, .. }) =
                    (&mut sub, submission_for(&scheme, held, None, w as usize))
                {
                    *proof = real;
                }
                notes.push("buyer replays an element signed for an earlier sale of the same data".to_string());
                Some(sub)
            }
            BuyerBehavior::NoThenAbort | BuyerBehavior::SilentAfterPayload => None,
        };
        let accepted = match &submission {
            Some(sub) => r
                .attempt(DISPUTE, Actor::Buyer, ActionKind::Dispute, |c| c.dispute(Actor::Buyer, sub, DISPUTE))
                .is_some(),
            None => false,
        };
        if !accepted {
            submission = None;
        }
    }

    if !r.contract.phase().is_terminal() {
        let d = r.contract.state().deadlines;
        if let Some(end) = d.grace.or(d.funding) {
            r.contract
                .tick(end + 1)
                .expect("clock moves forward past every scheduled action");
        }
    }

    let contract = r.contract;
    let oracle_verdict = match (&submission, &received) {
        (Some(sub), Some(held)) => {
            let committed = contract.state().committed_value.clone();
            let k = contract.state().revealed_key.clone().expect("dispute follows reveal");
            oracle_adjudicate(
                &OracleView {
                    variant,
                    scheme: &scheme,
                    certified: &chunked,
                    delivered: held,
                    committed: committed.as_ref(),
                    key: &k,
                },
                Some(sub),
            )
        }
        _ => None,
    };
    let verdict = contract.verdict().cloned();
    let oracle_agrees = verdict.as_ref().map(|v| v.dishonest) == oracle_verdict;
    if !oracle_agrees {
        notes.push(format!(
            "contract blames {:?}, a fully informed judge blames {:?}",
            verdict.as_ref().map(|v| v.dishonest),
            oracle_verdict
        ));
    }
    contract.ledger().check().expect("ledger conserves coins");

    let final_b = |p: Party| contract.ledger().balance(p) as i128;
    let deltas = BalanceDeltas {
        seller: final_b(Party::Seller) - balances.seller as i128,
        buyer: final_b(Party::Buyer) - balances.buyer as i128,
    };
    let report = contract.onchain_footprint();
    let cost = CostSummary {
        dispute_formula_bits: dispute_payload_bits(
            variant,
            data.len() as u64 * 8,
            s.chunk_bits,
            scheme.hash_bits(),
            scheme.alpha(),
            scheme.sig_bits(),
        ),
        dispute_content_bits: submission.as_ref().map(|s| s.content_bits()),
        dispute_framing_bytes: submission.as_ref().map(|s| s.framing_bytes() as u64),
        offchain_bytes,
        onchain: report,
    };
    let privacy = privacy_scan(&contract, &chunked, received.as_ref(), &scheme);
    let transcript = Transcript {
        header: TranscriptHeader {
            format: FORMAT.to_string(),
            scheme: scheme.descriptor(),
            variant,
            seed: s.seed,
            chunk_params: cert.params,
            config: s.config,
            initial_balances: balances,
            seller: s.seller,
            buyer: s.buyer,
        },
        records: contract.log().to_vec(),
        footer: Transcript::footer_for(&contract),
    };
    Ok(TradeOutcome {
        variant,
        seller: s.seller,
        buyer: s.buyer,
        phase: contract.phase(),
        verdict,
        oracle_verdict,
        oracle_agrees,
        initial_balances: balances,
        deltas,
        buyer_received_valid_data,
        cost,
        privacy,
        rejected: r.rejected,
        notes,
        transcript: Some(transcript),
    })
}
