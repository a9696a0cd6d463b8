//! Line-delimited JSON transcripts: a header, one line per accepted
//! on-chain action, and a footer with the final state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scenario::{Balances, BuyerBehavior, SellerBehavior};
use crate::chunk::{ChunkParams, Variant};
use crate::contract::{ActionRecord, Contract, ContractConfig, Ledger, Party, Phase, ReplayError, Verdict};
use crate::crypto::{CryptoError, Scheme, SchemeDescriptor};

pub const FORMAT: &str = "blockmark-transcript/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub format: String,
    pub scheme: SchemeDescriptor,
    pub variant: Variant,
    pub seed: u64,
    pub chunk_params: ChunkParams,
    pub config: ContractConfig,
    pub initial_balances: Balances,
    pub seller: SellerBehavior,
    pub buyer: BuyerBehavior,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptFooter {
    pub phase: Phase,
    pub verdict: Option<Verdict>,
    pub final_balances: Balances,
    pub onchain_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TranscriptLine {
    Header(TranscriptHeader),
    Action(ActionRecord),
    Footer(TranscriptFooter),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub records: Vec<ActionRecord>,
    pub footer: TranscriptFooter,
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: {msg}")]
    Structure { line: usize, msg: &'static str },
    #[error("unsupported transcript format {0:?}")]
    Format(String),
    #[error("bad scheme descriptor")]
    Scheme(#[from] CryptoError),
    #[error("replay failed")]
    Replay(#[from] ReplayError),
    #[error("replayed state differs from the footer")]
    FooterMismatch,
}

impl Transcript {
    pub fn footer_for(contract: &Contract) -> TranscriptFooter {
        let l = contract.ledger();
        TranscriptFooter {
            phase: contract.phase(),
            verdict: contract.verdict().cloned(),
            final_balances: Balances {
                seller: l.balance(Party::Seller),
                buyer: l.balance(Party::Buyer),
            },
            onchain_bytes: contract.onchain_footprint().onchain_bytes,
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &TranscriptLine| {
            out.push_str(&serde_json::to_string(line).expect("transcript lines serialize"));
            out.push('\n');
        };
        push(&TranscriptLine::Header(self.header.clone()));
        for r in &self.records {
            push(&TranscriptLine::Action(r.clone()));
        }
        push(&TranscriptLine::Footer(self.footer.clone()));
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, TranscriptError> {
        let mut header = None;
        let mut footer = None;
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            if footer.is_some() {
                return Err(TranscriptError::Structure {
                    line,
                    msg: "content after footer",
                });
            }
            let parsed: TranscriptLine =
                serde_json::from_str(raw).map_err(|source| TranscriptError::Json { line, source })?;
            match parsed {
                TranscriptLine::Header(h) => {
                    if header.is_some() || !records.is_empty() {
                        return Err(TranscriptError::Structure {
                            line,
                            msg: "header must come first, once",
                        });
                    }
                    if h.format != FORMAT {
                        return Err(TranscriptError::Format(h.format));
                    }
                    header = Some(h);
                }
                TranscriptLine::Action(r) => {
                    if header.is_none() {
                        return Err(TranscriptError::Structure {
                            line,
                            msg: "action before header",
                        });
                    }
                    if r.seq != records.len() as u64 {
                        return Err(TranscriptError::Structure {
                            line,
                            msg: "action sequence numbers must be consecutive from 0",
                        });
                    }
                    records.push(r);
                }
                TranscriptLine::Footer(f) => footer = Some(f),
            }
        }
        let header = header.ok_or(TranscriptError::Structure {
            line: 0,
            msg: "missing header",
        })?;
        let footer = footer.ok_or(TranscriptError::Structure {
            line: 0,
            msg: "missing footer",
        })?;
        Ok(Self {
            header,
            records,
            footer,
        })
    }

    /// Re-executes the action log and checks the footer against the result.
    pub fn replay(&self) -> Result<Contract, TranscriptError> {
        let scheme = Scheme::try_from(self.header.scheme.clone())?;
        let b = self.header.initial_balances;
        let contract = Contract::replay(scheme, self.header.config, Ledger::new(b.seller, b.buyer), &self.records)?;
        if contract.variant() != self.header.variant
            || contract.state().chunk_params != self.header.chunk_params
            || Self::footer_for(&contract) != self.footer
        {
            return Err(TranscriptError::FooterMismatch);
        }
        Ok(contract)
    }
}
