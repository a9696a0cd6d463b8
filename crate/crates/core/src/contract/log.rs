use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::ledger::Transfer;
use super::{Actor, Phase, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    RegisterCertificate,
    BuyerFund,
    SellerFund,
    Commit,
    Ack,
    RevealKey,
    Dispute,
    /// Deadline expiry processed by the contract clock; carries no payload.
    Timeout,
}

/// Work performed by the contract while processing one action.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub hashes: u64,
    pub decrypt_bits: u64,
    pub signature_verifies: u64,
    pub merkle_fold_steps: u64,
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, o: Self) {
        self.hashes += o.hashes;
        self.decrypt_bits += o.decrypt_bits;
        self.signature_verifies += o.signature_verifies;
        self.merkle_fold_steps += o.merkle_fold_steps;
    }
}

/// One accepted on-chain action. `payload` is exactly the bytes uploaded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub seq: u64,
    pub tick: Tick,
    pub actor: Actor,
    pub action: ActionKind,
    #[serde(with = "hex")]
    pub payload: Vec<u8>,
    pub ops: OpCounters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transfers: Vec<Transfer>,
    pub phase: Phase,
}

impl ActionRecord {
    pub fn payload_bytes(&self) -> u64 {
        self.payload.len() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionBytes {
    pub action: ActionKind,
    pub bytes: u64,
}

/// Exact on-chain upload and compute accounting for one contract.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub onchain_bytes: u64,
    /// Bytes of every action other than a dispute.
    pub trading_bytes: u64,
    pub dispute_bytes: Option<u64>,
    pub per_action: Vec<ActionBytes>,
    pub adjudication_ops: OpCounters,
    pub total_ops: OpCounters,
}

impl CostReport {
    pub fn from_records(records: &[ActionRecord]) -> Self {
        let mut report = CostReport::default();
        for r in records {
            let bytes = r.payload_bytes();
            report.onchain_bytes += bytes;
            report.total_ops += r.ops;
            report.per_action.push(ActionBytes { action: r.action, bytes });
            if r.action == ActionKind::Dispute {
                report.dispute_bytes = Some(bytes);
                report.adjudication_ops += r.ops;
            } else {
                report.trading_bytes += bytes;
            }
        }
        report
    }

    pub fn onchain_bits(&self) -> u64 {
        self.onchain_bytes * 8
    }
}
