//! Every seller behavior against every buyer behavior, checked against the
//! oracle.

use serde::{Deserialize, Serialize};

use super::scenario::{BuyerBehavior, Fabrication, Scenario, ScenarioError, SellerBehavior};
use super::trade::{run, TradeOutcome};
use crate::chunk::Variant;
use crate::contract::{Party, Phase};

/// Seller behaviors for a data set of `m` chunks, every corruption index
/// included.
pub fn seller_behaviors(m: u32) -> Vec<SellerBehavior> {
    let mut out = vec![SellerBehavior::Honest];
    out.extend((0..m).map(SellerBehavior::CorruptChunk));
    out.extend([
        SellerBehavior::CorruptAllChunks,
        SellerBehavior::WrongKey,
        SellerBehavior::WrongCommitment,
        SellerBehavior::SilentAfterFunding,
    ]);
    out.extend((0..m).map(SellerBehavior::ReplaySignedChunk));
    out
}

/// Buyer behaviors exercised by the matrix. The prior-sale replay is left
/// out: the constant variant misjudges it by design, see
/// [`BuyerBehavior::ReplayPriorSignature`].
pub fn buyer_behaviors(m: u32) -> Vec<BuyerBehavior> {
    let mut out = vec![BuyerBehavior::Honest];
    for kind in Fabrication::ALL {
        out.push(BuyerBehavior::FalseDisputeFabricated { kind, index: 0 });
        if m > 1 {
            out.push(BuyerBehavior::FalseDisputeFabricated { kind, index: m - 1 });
        }
    }
    out.push(BuyerBehavior::FalseDisputeGenuineChunk(0));
    if m > 1 {
        out.push(BuyerBehavior::FalseDisputeGenuineChunk(m - 1));
    }
    out.extend([BuyerBehavior::NoThenAbort, BuyerBehavior::SilentAfterPayload]);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub variant: Variant,
    pub chunk_count: u64,
    pub seller: String,
    pub buyer: String,
    pub phase: Phase,
    pub contract_blames: Option<Party>,
    pub oracle_blames: Option<Party>,
    pub agree: bool,
    pub seller_delta: i128,
    pub buyer_delta: i128,
    pub buyer_received_valid_data: bool,
    /// Each honest party ends with no loss (an honest buyer who got valid
    /// data pays exactly the price).
    pub honest_party_ok: bool,
}

impl MatrixRow {
    fn from_outcome(s: &Scenario, m: u64, o: &TradeOutcome) -> Self {
        let seller_ok = s.seller != SellerBehavior::Honest || o.deltas.seller >= 0;
        let buyer_ok = s.buyer != BuyerBehavior::Honest
            || o.deltas.buyer >= 0
            || (o.buyer_received_valid_data && o.deltas.buyer == -(s.deposits.target as i128));
        MatrixRow {
            variant: s.variant,
            chunk_count: m,
            seller: s.seller.to_string(),
            buyer: s.buyer.to_string(),
            phase: o.phase,
            contract_blames: o.contract_blames(),
            oracle_blames: o.oracle_verdict,
            agree: o.oracle_agrees,
            seller_delta: o.deltas.seller,
            buyer_delta: o.deltas.buyer,
            buyer_received_valid_data: o.buyer_received_valid_data,
            honest_party_ok: seller_ok && buyer_ok,
        }
    }
}

/// Runs the strategy product for `base.variant` over `base`'s data.
pub fn matrix(base: &Scenario) -> Result<Vec<MatrixRow>, ScenarioError> {
    base.validate()?;
    let m = base.chunk_count()?;
    let mut rows = Vec::new();
    for seller in seller_behaviors(m as u32) {
        for buyer in buyer_behaviors(m as u32) {
            let mut s = base.clone();
            s.seller = seller;
            s.buyer = buyer;
            let outcome = run(&s)?;
            rows.push(MatrixRow::from_outcome(&s, m, &outcome));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub runs: usize,
    pub agreements: usize,
    pub disputes: usize,
    pub honest_party_ok: usize,
}

pub fn summarize(rows: &[MatrixRow]) -> MatrixSummary {
    MatrixSummary {
        runs: rows.len(),
        agreements: rows.iter().filter(|r| r.agree).count(),
        disputes: rows.iter().filter(|r| r.contract_blames.is_some()).count(),
        honest_party_ok: rows.iter().filter(|r| r.honest_party_ok).count(),
    }
}
