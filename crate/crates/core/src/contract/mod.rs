//! The simulated arbiter contract.
//!
//! One [`Contract`] instance handles one trade of one certified data set. Every
//! accepted call is appended to an action log whose payload bytes are exactly
//! what the caller uploaded; [`Contract::replay`] rebuilds identical state from
//! that log.
//!
//! Trading phase automaton:
//!
//! ```text
//! Created -> BuyerFunded -> SellerFunded -> Committed -> Acked -> KeyRevealed
//!                                 \______(constant)_____/              |
//!   BuyerFunded..Acked --timeout / "No"--> Refunded                     |
//!   KeyRevealed --grace timeout--> Settled, --dispute--> DisputeResolved
//! ```

mod dispute;
mod ledger;
mod log;

pub use dispute::DisputeSubmission;
pub use ledger::{EscrowKind, EscrowSlot, Ledger, LedgerError, Transfer};
pub use log::{ActionBytes, ActionKind, ActionRecord, CostReport, OpCounters};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chunk::{signing_digest, Certificate, ChunkParams, Variant};
use crate::codec::{DecodeError, Reader, Writer};
use crate::crypto::{Digest, PublicKey, Scheme, Signature, SymmetricKey};
use crate::merkle;

/// Logical time; one tick is one second by convention.
pub type Tick = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Seller,
    Buyer,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Seller => Party::Buyer,
            Party::Buyer => Party::Seller,
        }
    }
}

/// Who submitted an action. `Carol` is the certifier, `Clock` the contract's
/// own timeout processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Carol,
    Seller,
    Buyer,
    Clock,
}

impl From<Party> for Actor {
    fn from(p: Party) -> Self {
        match p {
            Party::Seller => Actor::Seller,
            Party::Buyer => Actor::Buyer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Created,
    BuyerFunded,
    SellerFunded,
    Committed,
    Acked,
    KeyRevealed,
    Settled,
    Refunded,
    DisputeResolved,
}

impl Phase {
    pub fn is_terminal(self) -> bool {
        matches!(self, Phase::Settled | Phase::Refunded | Phase::DisputeResolved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractConfig {
    pub funding_window: Tick,
    pub grace_window: Tick,
}

impl Default for ContractConfig {
    fn default() -> Self {
        Self {
            funding_window: 86_400,
            grace_window: 172_800,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deposits {
    pub target: u64,
    pub seller: u64,
    pub buyer: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deadlines {
    pub funding: Option<Tick>,
    pub grace: Option<Tick>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// Linear: the submitted ciphertext does not hash to the commitment.
    CiphertextNotCommitted,
    /// Linear: the ciphertext decrypts to the certified data.
    DecryptsToCertifiedData,
    /// Logarithmic: the inclusion proof does not reach the committed root.
    InvalidMerkleProof,
    /// Constant: the seller's signature does not cover the submitted chunk.
    InvalidSellerSignature,
    /// Chunked variants: the chunk decrypts to its claimed hash.
    ChunkDecryptsConsistently,
    /// The revealed key does not decrypt committed data to what was promised.
    DecryptionMismatch,
}

/// Digests the arbiter looked at; never ciphertext or plaintext bodies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub chunk_index: u32,
    /// Commitment the submission was checked against (none for constant).
    pub anchor: Option<Digest>,
    /// `hash(ciphertext)` for linear, the claimed chunk hash otherwise.
    pub submitted: Digest,
    /// Hash of the decrypted submission, when decryption was reached.
    pub decrypted: Option<Digest>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub dishonest: Party,
    pub reason: Reason,
    pub evidence: Evidence,
}

/// Everything the contract stores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractState {
    pub variant: Variant,
    pub phase: Phase,
    pub certificate_root: Digest,
    pub chunk_params: ChunkParams,
    pub carol_pk: PublicKey,
    pub seller_pk: Option<PublicKey>,
    pub committed_value: Option<Digest>,
    pub revealed_key: Option<SymmetricKey>,
    pub deposits: Deposits,
    pub deadlines: Deadlines,
    pub verdict: Option<Verdict>,
    /// Tick of the last accepted action.
    pub last_tick: Tick,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("certificate signature does not verify")]
    BadCertificate,
    #[error("certificate is malformed: {0}")]
    MalformedCertificate(&'static str),
    #[error("{action:?} is not allowed in phase {phase:?}")]
    WrongPhase { action: ActionKind, phase: Phase },
    #[error("{action:?} is not available in the {variant} variant")]
    NotInVariant { action: ActionKind, variant: Variant },
    #[error("{caller:?} may not call {action:?}")]
    Unauthorized { action: ActionKind, caller: Actor },
    #[error("target root does not match the certified root")]
    RootMismatch,
    #[error("seller deposit must be positive")]
    ZeroSellerDeposit,
    #[error("malformed {0}")]
    Malformed(&'static str),
    #[error("deadline {deadline} has passed (now {now})")]
    DeadlinePassed { deadline: Tick, now: Tick },
    #[error("clock went backwards: last action at {last}, now {now}")]
    ClockRegression { last: Tick, now: Tick },
    #[error("a dispute was already adjudicated")]
    AlreadyDisputed,
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("empty action log")]
    Empty,
    #[error("record {seq}: {source}")]
    Decode { seq: u64, source: DecodeError },
    #[error("record {seq}: {source}")]
    Rejected { seq: u64, source: ContractError },
    #[error("record {seq} does not match the replayed action")]
    Mismatch { seq: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    scheme: Scheme,
    config: ContractConfig,
    state: ContractState,
    ledger: Ledger,
    log: Vec<ActionRecord>,
}

fn register_payload(variant: Variant, cert: &Certificate) -> Vec<u8> {
    let mut w = Writer::new();
    w.u8(variant.tag())
        .short(cert.root.as_bytes())
        .short(&cert.carol_public_key.0)
        .short(&cert.carol_signature.0)
        .u32(cert.params.chunk_bits)
        .u32(cert.params.chunk_count)
        .u64(cert.params.original_len);
    w.finish()
}

fn decode_register(bytes: &[u8]) -> Result<(Variant, Certificate), DecodeError> {
    let mut r = Reader::new(bytes);
    let variant = Variant::from_tag(r.u8()?)?;
    let root = decode_digest(r.short()?)?;
    let carol_public_key = PublicKey(r.short()?.to_vec());
    let carol_signature = Signature(r.short()?.to_vec());
    let params = ChunkParams {
        chunk_bits: r.u32()?,
        chunk_count: r.u32()?,
        original_len: r.u64()?,
    };
    r.finish()?;
    Ok((
        variant,
        Certificate {
            root,
            carol_signature,
            params,
            carol_public_key,
        },
    ))
}

fn decode_digest(b: &[u8]) -> Result<Digest, DecodeError> {
    Digest::from_bytes(b).map_err(|_| DecodeError::Invalid {
        field: "digest length",
        value: b.len() as u64,
    })
}

fn check_params(p: &ChunkParams) -> Result<(), ContractError> {
    if p.chunk_bits == 0 || !p.chunk_bits.is_multiple_of(8) {
        return Err(ContractError::MalformedCertificate("chunk size"));
    }
    if p.original_len == 0 || p.chunk_count as u64 != (p.original_len * 8).div_ceil(p.chunk_bits as u64) {
        return Err(ContractError::MalformedCertificate("chunk count"));
    }
    Ok(())
}

impl Contract {
    /// Carol posts the certificate; the contract starts in `Created`.
    pub fn register_certificate(
        variant: Variant,
        scheme: Scheme,
        config: ContractConfig,
        ledger: Ledger,
        cert: &Certificate,
        now: Tick,
    ) -> Result<Self, ContractError> {
        if cert.root.as_bytes().len() != scheme.digest_bytes() {
            return Err(ContractError::MalformedCertificate("root length"));
        }
        if cert.carol_public_key.0.is_empty() || cert.carol_public_key.0.len() > u8::MAX as usize {
            return Err(ContractError::MalformedCertificate("public key length"));
        }
        check_params(&cert.params)?;
        if !cert.verify(&scheme) {
            return Err(ContractError::BadCertificate);
        }
        let state = ContractState {
            variant,
            phase: Phase::Created,
            certificate_root: cert.root.clone(),
            chunk_params: cert.params,
            carol_pk: cert.carol_public_key.clone(),
            seller_pk: None,
            committed_value: None,
            revealed_key: None,
            deposits: Deposits::default(),
            deadlines: Deadlines::default(),
            verdict: None,
            last_tick: now,
        };
        let mut contract = Self {
            scheme,
            config,
            state,
            ledger,
            log: Vec::new(),
        };
        let ops = OpCounters {
            signature_verifies: 1,
            ..Default::default()
        };
        contract.record(
            now,
            Actor::Carol,
            ActionKind::RegisterCertificate,
            register_payload(variant, cert),
            ops,
            vec![],
        );
        Ok(contract)
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn config(&self) -> &ContractConfig {
        &self.config
    }

    pub fn state(&self) -> &ContractState {
        &self.state
    }

    pub fn phase(&self) -> Phase {
        self.state.phase
    }

    pub fn variant(&self) -> Variant {
        self.state.variant
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn log(&self) -> &[ActionRecord] {
        &self.log
    }

    pub fn verdict(&self) -> Option<&Verdict> {
        self.state.verdict.as_ref()
    }

    pub fn onchain_footprint(&self) -> CostReport {
        CostReport::from_records(&self.log)
    }

    fn record(
        &mut self,
        now: Tick,
        actor: Actor,
        action: ActionKind,
        payload: Vec<u8>,
        ops: OpCounters,
        transfers: Vec<Transfer>,
    ) {
        self.state.last_tick = now;
        self.log.push(ActionRecord {
            seq: self.log.len() as u64,
            tick: now,
            actor,
            action,
            payload,
            ops,
            transfers,
            phase: self.state.phase,
        });
    }

    fn check_clock(&self, now: Tick) -> Result<(), ContractError> {
        if now < self.state.last_tick {
            return Err(ContractError::ClockRegression {
                last: self.state.last_tick,
                now,
            });
        }
        Ok(())
    }

    fn guard(&self, action: ActionKind, caller: Actor, required: Actor, phase: Phase, now: Tick) -> Result<(), ContractError> {
        self.check_clock(now)?;
        if caller != required {
            return Err(ContractError::Unauthorized { action, caller });
        }
        if self.state.phase != phase {
            return Err(ContractError::WrongPhase {
                action,
                phase: self.state.phase,
            });
        }
        Ok(())
    }

    fn before_funding_deadline(&self, now: Tick) -> Result<(), ContractError> {
        match self.state.deadlines.funding {
            Some(deadline) if now > deadline => Err(ContractError::DeadlinePassed { deadline, now }),
            _ => Ok(()),
        }
    }

    /// The buyer names the data, pays the price and the buyer deposit.
    pub fn buyer_intent_and_fund(
        &mut self,
        caller: Actor,
        target_root: &Digest,
        target: u64,
        buyer_deposit: u64,
        now: Tick,
    ) -> Result<(), ContractError> {
        let action = ActionKind::BuyerFund;
        self.guard(action, caller, Actor::Buyer, Phase::Created, now)?;
        if target_root != &self.state.certificate_root {
            return Err(ContractError::RootMismatch);
        }
        let deadline = now.saturating_add(self.config.funding_window);
        self.ledger.lock(
            &[(EscrowKind::Target, target), (EscrowKind::BuyerDeposit, buyer_deposit)],
            Party::Buyer,
            deadline,
        )?;
        self.state.deposits.target = target;
        self.state.deposits.buyer = buyer_deposit;
        self.state.deadlines.funding = Some(deadline);
        self.state.phase = Phase::BuyerFunded;
        let mut w = Writer::new();
        w.short(target_root.as_bytes()).u64(target).u64(buyer_deposit);
        self.record(now, caller, action, w.finish(), OpCounters::default(), vec![]);
        Ok(())
    }

    /// The seller pays its deposit and registers the key its chunk
    /// signatures verify under.
    pub fn seller_fund(&mut self, caller: Actor, seller_deposit: u64, seller_pk: PublicKey, now: Tick) -> Result<(), ContractError> {
        let action = ActionKind::SellerFund;
        self.guard(action, caller, Actor::Seller, Phase::BuyerFunded, now)?;
        self.before_funding_deadline(now)?;
        if seller_deposit == 0 {
            return Err(ContractError::ZeroSellerDeposit);
        }
        if seller_pk.0.is_empty() || seller_pk.0.len() > u8::MAX as usize {
            return Err(ContractError::Malformed("seller public key"));
        }
        let refundable_after = self.state.deadlines.funding.unwrap_or(now);
        self.ledger
            .lock(&[(EscrowKind::SellerDeposit, seller_deposit)], Party::Seller, refundable_after)?;
        let mut w = Writer::new();
        w.u64(seller_deposit).short(&seller_pk.0);
        self.state.deposits.seller = seller_deposit;
        self.state.seller_pk = Some(seller_pk);
        self.state.phase = Phase::SellerFunded;
        self.record(now, caller, action, w.finish(), OpCounters::default(), vec![]);
        Ok(())
    }

    /// Seller commits to what was shipped off-chain: `hash(ciphertext)` or
    /// the Merkle root over `hash ‖ ciphertext` leaves.
    pub fn commit(&mut self, caller: Actor, value: Digest, now: Tick) -> Result<(), ContractError> {
        let action = ActionKind::Commit;
        if self.state.variant == Variant::Constant {
            return Err(ContractError::NotInVariant {
                action,
                variant: self.state.variant,
            });
        }
        self.guard(action, caller, Actor::Seller, Phase::SellerFunded, now)?;
        self.before_funding_deadline(now)?;
        if value.as_bytes().len() != self.scheme.digest_bytes() {
            return Err(ContractError::Malformed("commitment length"));
        }
        let mut w = Writer::new();
        w.short(value.as_bytes());
        self.state.committed_value = Some(value);
        self.state.phase = Phase::Committed;
        self.record(now, caller, action, w.finish(), OpCounters::default(), vec![]);
        Ok(())
    }

    pub fn buyer_ack(&mut self, caller: Actor, answer: Answer, now: Tick) -> Result<(), ContractError> {
        let action = ActionKind::Ack;
        let expected = match self.state.variant {
            Variant::Constant => Phase::SellerFunded,
            _ => Phase::Committed,
        };
        self.guard(action, caller, Actor::Buyer, expected, now)?;
        self.before_funding_deadline(now)?;
        let transfers = match answer {
            Answer::Yes => {
                self.state.phase = Phase::Acked;
                vec![]
            }
            Answer::No => {
                self.state.phase = Phase::Refunded;
                self.ledger.settle(|_, slot| slot.owner)
            }
        };
        let byte = match answer {
            Answer::Yes => 1,
            Answer::No => 0,
        };
        self.record(now, caller, action, vec![byte], OpCounters::default(), transfers);
        Ok(())
    }

    /// Stores the key verbatim and opens the grace window.
    pub fn reveal_key(&mut self, caller: Actor, key: SymmetricKey, now: Tick) -> Result<(), ContractError> {
        let action = ActionKind::RevealKey;
        self.guard(action, caller, Actor::Seller, Phase::Acked, now)?;
        self.before_funding_deadline(now)?;
        let payload = key.as_bytes().to_vec();
        self.state.revealed_key = Some(key);
        self.state.deadlines.grace = Some(now.saturating_add(self.config.grace_window));
        self.state.phase = Phase::KeyRevealed;
        self.record(now, caller, action, payload, OpCounters::default(), vec![]);
        Ok(())
    }

    /// Adjudicates the first well-formed dispute inside the grace window and
    /// pays every escrow to the honest party.
    pub fn dispute(&mut self, caller: Actor, submission: &DisputeSubmission, now: Tick) -> Result<Verdict, ContractError> {
        let action = ActionKind::Dispute;
        if self.state.verdict.is_some() {
            return Err(ContractError::AlreadyDisputed);
        }
        self.guard(action, caller, Actor::Buyer, Phase::KeyRevealed, now)?;
        if let Some(deadline) = self.state.deadlines.grace {
            if now > deadline {
                return Err(ContractError::DeadlinePassed { deadline, now });
            }
        }
        self.validate_submission(submission)?;
        let (verdict, ops) = self.adjudicate(submission);
        let honest = verdict.dishonest.other();
        let transfers = self.ledger.settle(|_, _| honest);
        self.state.verdict = Some(verdict.clone());
        self.state.phase = Phase::DisputeResolved;
        self.record(now, caller, action, submission.encode(), ops, transfers);
        Ok(verdict)
    }

    /// Processes deadlines. Returns the transfers made, if a deadline fired.
    pub fn tick(&mut self, now: Tick) -> Result<Vec<Transfer>, ContractError> {
        self.check_clock(now)?;
        let funding_expired = matches!(self.state.deadlines.funding, Some(d) if now > d);
        let grace_expired = matches!(self.state.deadlines.grace, Some(d) if now > d);
        let transfers = match self.state.phase {
            Phase::BuyerFunded | Phase::SellerFunded | Phase::Committed | Phase::Acked if funding_expired => {
                self.state.phase = Phase::Refunded;
                self.ledger.settle(|_, slot| slot.owner)
            }
            Phase::KeyRevealed if grace_expired => {
                self.state.phase = Phase::Settled;
                self.ledger.settle(|kind, slot| match kind {
                    EscrowKind::Target => Party::Seller,
                    _ => slot.owner,
                })
            }
            _ => return Ok(vec![]),
        };
        self.record(now, Actor::Clock, ActionKind::Timeout, vec![], OpCounters::default(), transfers.clone());
        Ok(transfers)
    }

    fn validate_submission(&self, sub: &DisputeSubmission) -> Result<(), ContractError> {
        if sub.variant() != self.state.variant {
            return Err(ContractError::Malformed("submission variant"));
        }
        let params = &self.state.chunk_params;
        let check_chunk = |index: u32, hash: &Digest, ct: &[u8]| {
            if index >= params.chunk_count {
                return Err(ContractError::Malformed("chunk index"));
            }
            if hash.as_bytes().len() != self.scheme.digest_bytes() {
                return Err(ContractError::Malformed("chunk hash length"));
            }
            if ct.len() != self.scheme.ciphertext_len(params.chunk_bytes()) {
                return Err(ContractError::Malformed("chunk ciphertext length"));
            }
            Ok(())
        };
        match sub {
            DisputeSubmission::Linear { ciphertext } => {
                if ciphertext.len() != self.scheme.ciphertext_len(params.original_len as usize) {
                    return Err(ContractError::Malformed("ciphertext length"));
                }
            }
            DisputeSubmission::Logarithmic { chunk, proof } => {
                check_chunk(proof.leaf_index, &chunk.chunk_hash, &chunk.ciphertext)?;
            }
            DisputeSubmission::Constant { index, chunk, signature } => {
                check_chunk(*index, &chunk.chunk_hash, &chunk.ciphertext)?;
                if signature.0.len() != self.scheme.sig_bytes() as usize {
                    return Err(ContractError::Malformed("signature length"));
                }
            }
        }
        Ok(())
    }

    fn adjudicate(&self, sub: &DisputeSubmission) -> (Verdict, OpCounters) {
        let scheme = &self.scheme;
        let key = self.state.revealed_key.as_ref().expect("key revealed before dispute");
        let mut ops = OpCounters::default();
        let ct = sub.ciphertext();
        let index = sub.chunk_index();
        let verdict = |dishonest, reason, anchor, submitted, decrypted| Verdict {
            dishonest,
            reason,
            evidence: Evidence {
                chunk_index: index,
                anchor,
                submitted,
                decrypted,
            },
        };
        let decrypt_and_hash = |ops: &mut OpCounters| {
            let pt = scheme
                .decrypt_bytes(key, index as u64, ct)
                .expect("ciphertext length validated");
            ops.decrypt_bits += ct.len() as u64 * 8;
            ops.hashes += 1;
            scheme.hash(&pt)
        };
        let v = match sub {
            DisputeSubmission::Linear { .. } => {
                let committed = self.state.committed_value.clone().expect("committed before dispute");
                let submitted = scheme.hash(ct);
                ops.hashes += 1;
                if submitted != committed {
                    verdict(Party::Buyer, Reason::CiphertextNotCommitted, Some(committed), submitted, None)
                } else {
                    let decrypted = decrypt_and_hash(&mut ops);
                    if decrypted == self.state.certificate_root {
                        verdict(Party::Buyer, Reason::DecryptsToCertifiedData, Some(committed), submitted, Some(decrypted))
                    } else {
                        verdict(Party::Seller, Reason::DecryptionMismatch, Some(committed), submitted, Some(decrypted))
                    }
                }
            }
            DisputeSubmission::Logarithmic { chunk, proof } => {
                let committed = self.state.committed_value.clone().expect("committed before dispute");
                let (ok, stats) = merkle::verify_with_stats(scheme, &committed, &chunk.leaf_bytes(), proof);
                ops.hashes += stats.hashes;
                ops.merkle_fold_steps += stats.fold_steps;
                let claimed = chunk.chunk_hash.clone();
                if !ok {
                    verdict(Party::Buyer, Reason::InvalidMerkleProof, Some(committed), claimed, None)
                } else {
                    self.judge_chunk(decrypt_and_hash(&mut ops), claimed, Some(committed), index)
                }
            }
            DisputeSubmission::Constant { chunk, signature, .. } => {
                let seller_pk = self.state.seller_pk.as_ref().expect("seller registered before dispute");
                let msg = signing_digest(scheme, index, chunk);
                ops.hashes += 1;
                ops.signature_verifies += 1;
                let claimed = chunk.chunk_hash.clone();
                if !scheme.verify(seller_pk, msg.as_bytes(), signature) {
                    verdict(Party::Buyer, Reason::InvalidSellerSignature, None, claimed, None)
                } else {
                    self.judge_chunk(decrypt_and_hash(&mut ops), claimed, None, index)
                }
            }
        };
        (v, ops)
    }

    fn judge_chunk(&self, decrypted: Digest, claimed: Digest, anchor: Option<Digest>, index: u32) -> Verdict {
        let (dishonest, reason) = if decrypted == claimed {
            (Party::Buyer, Reason::ChunkDecryptsConsistently)
        } else {
            (Party::Seller, Reason::DecryptionMismatch)
        };
        Verdict {
            dishonest,
            reason,
            evidence: Evidence {
                chunk_index: index,
                anchor,
                submitted: claimed,
                decrypted: Some(decrypted),
            },
        }
    }

    /// Rebuilds a contract from its action log, re-executing every action.
    /// Fails unless each re-executed action reproduces its record exactly.
    pub fn replay(scheme: Scheme, config: ContractConfig, ledger: Ledger, records: &[ActionRecord]) -> Result<Self, ReplayError> {
        let first = records.first().ok_or(ReplayError::Empty)?;
        let decode = |seq: u64| move |source| ReplayError::Decode { seq, source };
        let reject = |seq: u64| move |source| ReplayError::Rejected { seq, source };
        if first.action != ActionKind::RegisterCertificate || first.actor != Actor::Carol {
            return Err(ReplayError::Mismatch { seq: first.seq });
        }
        let (variant, cert) = decode_register(&first.payload).map_err(decode(first.seq))?;
        let mut c = Contract::register_certificate(variant, scheme, config, ledger, &cert, first.tick)
            .map_err(reject(first.seq))?;
        if c.log[0] != *first {
            return Err(ReplayError::Mismatch { seq: first.seq });
        }
        for rec in &records[1..] {
            let seq = rec.seq;
            let mut r = Reader::new(&rec.payload);
            let now = rec.tick;
            match rec.action {
                ActionKind::RegisterCertificate => return Err(ReplayError::Mismatch { seq }),
                ActionKind::BuyerFund => {
                    let root = decode_digest(r.short().map_err(decode(seq))?).map_err(decode(seq))?;
                    let target = r.u64().map_err(decode(seq))?;
                    let dep = r.u64().map_err(decode(seq))?;
                    r.finish().map_err(decode(seq))?;
                    c.buyer_intent_and_fund(rec.actor, &root, target, dep, now)
                        .map_err(reject(seq))?;
                }
                ActionKind::SellerFund => {
                    let dep = r.u64().map_err(decode(seq))?;
                    let pk = PublicKey(r.short().map_err(decode(seq))?.to_vec());
                    r.finish().map_err(decode(seq))?;
                    c.seller_fund(rec.actor, dep, pk, now).map_err(reject(seq))?;
                }
                ActionKind::Commit => {
                    let value = decode_digest(r.short().map_err(decode(seq))?).map_err(decode(seq))?;
                    r.finish().map_err(decode(seq))?;
                    c.commit(rec.actor, value, now).map_err(reject(seq))?;
                }
                ActionKind::Ack => {
                    let answer = match r.u8().map_err(decode(seq))? {
                        1 => Answer::Yes,
                        0 => Answer::No,
                        v => {
                            return Err(ReplayError::Decode {
                                seq,
                                source: DecodeError::Invalid {
                                    field: "ack answer",
                                    value: v as u64,
                                },
                            })
                        }
                    };
                    r.finish().map_err(decode(seq))?;
                    c.buyer_ack(rec.actor, answer, now).map_err(reject(seq))?;
                }
                ActionKind::RevealKey => {
                    let key = SymmetricKey::from_slice(&rec.payload).ok_or(ReplayError::Decode {
                        seq,
                        source: DecodeError::Invalid {
                            field: "key length",
                            value: rec.payload.len() as u64,
                        },
                    })?;
                    c.reveal_key(rec.actor, key, now).map_err(reject(seq))?;
                }
                ActionKind::Dispute => {
                    let sub = DisputeSubmission::decode(&rec.payload).map_err(decode(seq))?;
                    c.dispute(rec.actor, &sub, now).map_err(reject(seq))?;
                }
                ActionKind::Timeout => {
                    if rec.actor != Actor::Clock || !rec.payload.is_empty() {
                        return Err(ReplayError::Mismatch { seq });
                    }
                    c.tick(now).map_err(reject(seq))?;
                }
            }
            if c.log.last() != Some(rec) {
                return Err(ReplayError::Mismatch { seq });
            }
        }
        Ok(c)
    }
}
