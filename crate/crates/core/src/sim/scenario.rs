use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chunk::{chunk_count, Variant};
use crate::contract::{ContractConfig, Deposits, Tick};
use crate::crypto::{Alpha, CryptoError, Scheme};

/// Largest data set a scenario may describe (128 MiB).
pub const MAX_DATA_BITS: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// Seeded pseudorandom bytes.
    Random { size_bits: u64 },
    /// Fixed bytes, hex encoded.
    Hex(String),
}

/// Primitive sizes; the suite is picked from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeParams {
    pub hash_bits: u32,
    pub alpha: Alpha,
    pub sig_bytes: u32,
}

impl Default for SchemeParams {
    fn default() -> Self {
        let s = Scheme::default();
        Self {
            hash_bits: s.hash_bits(),
            alpha: s.alpha(),
            sig_bytes: s.sig_bytes(),
        }
    }
}

impl SchemeParams {
    pub fn scheme(&self) -> Result<Scheme, CryptoError> {
        Scheme::new(self.hash_bits, self.alpha, self.sig_bytes)
    }
}

impl From<Scheme> for SchemeParams {
    fn from(s: Scheme) -> Self {
        Self {
            hash_bits: s.hash_bits(),
            alpha: s.alpha(),
            sig_bytes: s.sig_bytes(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Balances {
    pub seller: u64,
    pub buyer: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkEvents {
    /// From this tick on, neither party gets anything through.
    pub disconnect_at: Option<Tick>,
    /// The off-chain payload never reaches the buyer.
    pub drop_offchain_payload: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SellerBehavior {
    #[default]
    Honest,
    /// Ships chunk `w` with every byte inverted, keeping its genuine hash.
    CorruptChunk(u32),
    CorruptAllChunks,
    /// Reveals a key unrelated to the one used for encryption.
    WrongKey,
    /// Commits to a random digest; in the constant variant, signs chunks
    /// with a key other than the registered one.
    WrongCommitment,
    /// Funds, then never ships, commits or reveals.
    SilentAfterFunding,
    /// Ships element `w` as produced for an earlier sale of the same data
    /// under a different symmetric key.
    ReplaySignedChunk(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fabrication {
    /// Random hash and ciphertext in place of element `index`.
    RandomLeaf,
    /// Real ciphertext with a false claimed hash.
    WrongClaim,
    /// Real element with one bit of its Merkle proof flipped.
    TamperedProof,
    /// Real element with one bit of its signature flipped.
    TamperedSignature,
}

impl Fabrication {
    pub const ALL: [Fabrication; 4] = [
        Fabrication::RandomLeaf,
        Fabrication::WrongClaim,
        Fabrication::TamperedProof,
        Fabrication::TamperedSignature,
    ];
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuyerBehavior {
    #[default]
    Honest,
    FalseDisputeFabricated {
        kind: Fabrication,
        #[serde(default)]
        index: u32,
    },
    /// Disputes element `w` exactly as received.
    FalseDisputeGenuineChunk(u32),
    /// Answers "No" at acknowledgement time.
    NoThenAbort,
    /// Receives the payload and never acknowledges.
    SilentAfterPayload,
    /// Disputes with element `w` taken from an earlier sale by the same
    /// seller. Exposes the signed-chunk replay weakness of the constant
    /// variant.
    ReplayPriorSignature(u32),
}

impl fmt::Display for SellerBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SellerBehavior::Honest => f.write_str("honest"),
            SellerBehavior::CorruptChunk(w) => write!(f, "corrupt_chunk({w})"),
            SellerBehavior::CorruptAllChunks => f.write_str("corrupt_all_chunks"),
            SellerBehavior::WrongKey => f.write_str("wrong_key"),
            SellerBehavior::WrongCommitment => f.write_str("wrong_commitment"),
            SellerBehavior::SilentAfterFunding => f.write_str("silent_after_funding"),
            SellerBehavior::ReplaySignedChunk(w) => write!(f, "replay_signed_chunk({w})"),
        }
    }
}

impl fmt::Display for Fabrication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fabrication::RandomLeaf => "random_leaf",
            Fabrication::WrongClaim => "wrong_claim",
            Fabrication::TamperedProof => "tampered_proof",
            Fabrication::TamperedSignature => "tampered_signature",
        })
    }
}

impl fmt::Display for BuyerBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuyerBehavior::Honest => f.write_str("honest"),
            BuyerBehavior::FalseDisputeFabricated { kind, index } => {
                write!(f, "false_dispute_fabricated({kind},{index})")
            }
            BuyerBehavior::FalseDisputeGenuineChunk(w) => write!(f, "false_dispute_genuine_chunk({w})"),
            BuyerBehavior::NoThenAbort => f.write_str("no_then_abort"),
            BuyerBehavior::SilentAfterPayload => f.write_str("silent_after_payload"),
            BuyerBehavior::ReplayPriorSignature(w) => write!(f, "replay_prior_signature({w})"),
        }
    }
}

/// One fully specified trade. Parses from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub variant: Variant,
    pub data: DataSource,
    pub chunk_bits: u32,
    #[serde(default)]
    pub scheme: SchemeParams,
    pub deposits: Deposits,
    /// Starting balances; defaults to the deposits plus 1000 coins each.
    #[serde(default)]
    pub balances: Option<Balances>,
    #[serde(default)]
    pub seller: SellerBehavior,
    #[serde(default)]
    pub buyer: BuyerBehavior,
    #[serde(default)]
    pub network: NetworkEvents,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub config: ContractConfig,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario JSON")]
    Json(#[from] serde_json::Error),
    #[error("invalid scheme")]
    Scheme(#[from] CryptoError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Invalid(msg.into()))
}

impl Scenario {
    /// A small honest trade, useful as a template.
    pub fn example(variant: Variant) -> Self {
        Self {
            variant,
            data: DataSource::Random { size_bits: 4096 },
            chunk_bits: 256,
            scheme: SchemeParams::default(),
            deposits: Deposits {
                target: 1_000,
                seller: 100,
                buyer: 100,
            },
            balances: None,
            seller: SellerBehavior::Honest,
            buyer: BuyerBehavior::Honest,
            network: NetworkEvents::default(),
            seed: 0,
            config: ContractConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn data_bits(&self) -> Result<u64, ScenarioError> {
        match &self.data {
            DataSource::Random { size_bits } => Ok(*size_bits),
            DataSource::Hex(h) => {
                if h.len() % 2 != 0 || !h.bytes().all(|b| b.is_ascii_hexdigit()) {
                    return invalid("data.hex is not valid hex");
                }
                Ok(h.len() as u64 / 2 * 8)
            }
        }
    }

    pub fn chunk_count(&self) -> Result<u64, ScenarioError> {
        Ok(chunk_count(self.data_bits()?, self.chunk_bits))
    }

    pub fn balances_or_default(&self) -> Balances {
        self.balances.unwrap_or(Balances {
            seller: self.deposits.seller.saturating_add(1_000),
            buyer: self
                .deposits
                .target
                .saturating_add(self.deposits.buyer)
                .saturating_add(1_000),
        })
    }

    /// Checks everything that would otherwise fail mid-run.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.scheme.scheme()?;
        let bits = self.data_bits()?;
        if bits == 0 || bits % 8 != 0 {
            return invalid(format!("data size must be a positive multiple of 8 bits, got {bits}"));
        }
        if bits > MAX_DATA_BITS {
            return invalid(format!("data size {bits} bits exceeds the {MAX_DATA_BITS}-bit limit"));
        }
        if self.chunk_bits == 0 || !self.chunk_bits.is_multiple_of(8) {
            return invalid(format!("chunk_bits must be a positive multiple of 8, got {}", self.chunk_bits));
        }
        let m = chunk_count(bits, self.chunk_bits);
        if m > u32::MAX as u64 {
            return invalid(format!("{m} chunks is too many"));
        }
        let check_index = |what: &str, w: u32| {
            if w as u64 >= m {
                invalid(format!("{what} index {w} out of range for {m} chunks"))
            } else {
                Ok(())
            }
        };
        match self.seller {
            SellerBehavior::CorruptChunk(w) | SellerBehavior::ReplaySignedChunk(w) => check_index("seller", w)?,
            _ => {}
        }
        match self.buyer {
            BuyerBehavior::FalseDisputeFabricated { index: w, .. }
            | BuyerBehavior::FalseDisputeGenuineChunk(w)
            | BuyerBehavior::ReplayPriorSignature(w) => check_index("buyer", w)?,
            _ => {}
        }
        if self.deposits.seller == 0 {
            return invalid("deposits.seller must be positive");
        }
        if self.config.funding_window < 5 {
            return invalid("config.funding_window must cover the 5-tick trading schedule");
        }
        if self.config.grace_window == 0 {
            return invalid("config.grace_window must be positive");
        }
        Ok(())
    }
}
