//! Fair exchange of certified data for coins, arbitrated by a simulated
//! smart contract.
//!
//! A seller ships encrypted data off-chain, commits to it on-chain, and
//! reveals the key once the buyer acknowledges. If the key does not decrypt
//! what was promised, the buyer proves it to the contract with a bounded
//! amount of evidence: the whole ciphertext ([`Variant::Linear`]), one chunk
//! plus a Merkle path ([`Variant::Logarithmic`]), or one seller-signed chunk
//! ([`Variant::Constant`]).
//!
//! * [`crypto`]: hash, cipher and signature suite with explicit sizes
//! * [`merkle`]: trees, inclusion proofs and their wire format
//! * [`chunk`]: chunking, off-chain payloads, certificates, cost formulas
//! * [`contract`]: the arbiter state machine, ledger and action log
//! * [`sim`]: party strategies, scenario runner, oracle, sweeps and matrices

pub mod chunk;
pub mod codec;
pub mod contract;
pub mod crypto;
pub mod merkle;
pub mod sim;

pub use chunk::{Certificate, ChunkParams, ChunkedData, OffchainPayload, Variant};
pub use contract::{Contract, ContractConfig, Phase, Party, Verdict};
pub use crypto::{Alpha, Digest, Scheme, SymmetricKey};
