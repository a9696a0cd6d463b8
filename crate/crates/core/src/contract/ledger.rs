use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Party, Tick};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscrowKind {
    /// The price, paid in by the buyer.
    Target,
    /// Seller's deposit; covers the buyer's upload cost in a dispute.
    SellerDeposit,
    BuyerDeposit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscrowSlot {
    pub owner: Party,
    pub amount: u64,
    /// Locked (nonrefundable) until this tick.
    pub refundable_after: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transfer {
    pub escrow: EscrowKind,
    pub to: Party,
    pub amount: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("{party:?} needs {needed} coins but holds {available}")]
    Insufficient { party: Party, needed: u128, available: u64 },
    #[error("escrow {0:?} is already funded")]
    AlreadyLocked(EscrowKind),
    #[error("coin supply changed: expected {expected}, found {found}")]
    Conservation { expected: u128, found: u128 },
}

/// Party balances plus the three escrow slots. The total supply is fixed at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ledger {
    balances: BTreeMap<Party, u64>,
    escrow: BTreeMap<EscrowKind, EscrowSlot>,
    supply: u128,
}

impl Ledger {
    pub fn new(seller_balance: u64, buyer_balance: u64) -> Self {
        let balances = BTreeMap::from([(Party::Seller, seller_balance), (Party::Buyer, buyer_balance)]);
        Self {
            supply: seller_balance as u128 + buyer_balance as u128,
            balances,
            escrow: BTreeMap::new(),
        }
    }

    pub fn balance(&self, party: Party) -> u64 {
        self.balances.get(&party).copied().unwrap_or(0)
    }

    pub fn balances(&self) -> &BTreeMap<Party, u64> {
        &self.balances
    }

    pub fn escrow(&self) -> &BTreeMap<EscrowKind, EscrowSlot> {
        &self.escrow
    }

    pub fn escrowed_total(&self) -> u128 {
        self.escrow.values().map(|s| s.amount as u128).sum()
    }

    pub fn supply(&self) -> u128 {
        self.supply
    }

    /// Moves coins from a party into escrow, all-or-nothing.
    pub fn lock(&mut self, deposits: &[(EscrowKind, u64)], owner: Party, refundable_after: Tick) -> Result<(), LedgerError> {
        let needed: u128 = deposits.iter().map(|(_, a)| *a as u128).sum();
        let available = self.balance(owner);
        if needed > available as u128 {
            return Err(LedgerError::Insufficient {
                party: owner,
                needed,
                available,
            });
        }
        if let Some((kind, _)) = deposits.iter().find(|(k, _)| self.escrow.contains_key(k)) {
            return Err(LedgerError::AlreadyLocked(*kind));
        }
        *self.balances.entry(owner).or_default() -= needed as u64;
        for &(kind, amount) in deposits {
            self.escrow.insert(
                kind,
                EscrowSlot {
                    owner,
                    amount,
                    refundable_after,
                },
            );
        }
        Ok(())
    }

    pub fn release(&mut self, kind: EscrowKind, to: Party) -> Option<Transfer> {
        let slot = self.escrow.remove(&kind)?;
        *self.balances.entry(to).or_default() += slot.amount;
        Some(Transfer {
            escrow: kind,
            to,
            amount: slot.amount,
        })
    }

    /// Releases every funded slot, recipient chosen per slot.
    pub fn settle(&mut self, mut recipient: impl FnMut(EscrowKind, &EscrowSlot) -> Party) -> Vec<Transfer> {
        let plan: Vec<(EscrowKind, Party)> = self.escrow.iter().map(|(k, s)| (*k, recipient(*k, s))).collect();
        plan.into_iter().filter_map(|(k, to)| self.release(k, to)).collect()
    }

    pub fn check(&self) -> Result<(), LedgerError> {
        let found = self.balances.values().map(|&b| b as u128).sum::<u128>() + self.escrowed_total();
        if found != self.supply {
            return Err(LedgerError::Conservation {
                expected: self.supply,
                found,
            });
        }
        Ok(())
    }
}
