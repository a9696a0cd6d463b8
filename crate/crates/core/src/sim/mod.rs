//! Trade simulation: scenarios, party behaviors, the logical clock, the
//! off-chain mailbox and cost accounting.
//!
//! A trade follows a fixed schedule. Certificate registration happens at
//! tick 0, then buyer funding (1), seller funding (2), off-chain delivery (3),
//! commitment (4), acknowledgement (5), key reveal (6) and dispute (7). A
//! final tick past the last open deadline lets the contract settle or refund.
//! A disconnect at tick `d` silences both parties from `d` on.

mod chaos;
mod matrix;
mod oracle;
mod scenario;
mod sweep;
mod trade;
mod transcript;

pub use chaos::{chaos, ChaosReport};
pub use matrix::{buyer_behaviors, matrix, seller_behaviors, summarize, MatrixRow, MatrixSummary};
pub use oracle::{oracle_adjudicate, OracleView};
pub use scenario::{
    Balances, BuyerBehavior, DataSource, Fabrication, NetworkEvents, Scenario, ScenarioError, SchemeParams,
    SellerBehavior, MAX_DATA_BITS,
};
pub use sweep::{sweep, SweepRow};
pub use trade::{run, schedule, BalanceDeltas, CostSummary, PrivacyReport, RejectedAction, TradeOutcome};
pub use transcript::{Transcript, TranscriptError, TranscriptFooter, TranscriptHeader, TranscriptLine, FORMAT};
