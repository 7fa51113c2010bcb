use serde::{Deserialize, Serialize};

use crate::metric::Edge;

use super::{PartitionError, SubdividedSpanner};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub label: String,
    pub balance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Payment {
    pub payer: usize,
    pub edge: Edge,
    pub amount: f64,
}

/// Credits on the MST pieces of `S'` plus the cluster accounts and payment
/// log the certifier fills in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreditLedger {
    pub c: f64,
    /// Credit per MST piece, in the order of `SubdividedSpanner::mst_pieces`.
    pub piece_credit: Vec<f64>,
    pub accounts: Vec<Account>,
    pub payments: Vec<Payment>,
}

impl CreditLedger {
    pub fn initial_total(&self) -> f64 {
        self.piece_credit.iter().sum()
    }

    pub fn open(&mut self, label: impl Into<String>, balance: f64) -> usize {
        self.accounts.push(Account {
            label: label.into(),
            balance,
        });
        self.accounts.len() - 1
    }

    /// Debits `amount` from `account` for `edge`. Refuses to overdraw
    /// beyond a relative rounding slack of 1e-9.
    pub fn pay(&mut self, account: usize, edge: Edge, amount: f64) -> Result<(), PartitionError> {
        let a = &mut self.accounts[account];
        if amount > a.balance * (1.0 + 1e-9) + f64::MIN_POSITIVE {
            return Err(PartitionError::NegativeBalance {
                account,
                amount,
                balance: a.balance,
            });
        }
        a.balance = (a.balance - amount).max(0.0);
        self.payments.push(Payment {
            payer: account,
            edge,
            amount,
        });
        Ok(())
    }

    pub fn total_paid(&self) -> f64 {
        self.payments.iter().fold(0.0, |a, p| a + p.amount)
    }
}

/// Gives every MST piece of `sp` exactly `c * w0` credits and checks the
/// total against `2 c w(MST)`.
pub fn allocate_credits(sp: &SubdividedSpanner, c: f64) -> Result<CreditLedger, PartitionError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(PartitionError::BadCreditConstant { c });
    }
    let piece_credit = vec![c * sp.w0(); sp.piece_count()];
    let total: f64 = piece_credit.iter().sum();
    let bound = 2.0 * c * sp.mst_weight();
    if total > bound * (1.0 + 1e-9) {
        return Err(PartitionError::CreditOverflow { total, bound });
    }
    Ok(CreditLedger {
        c,
        piece_credit,
        accounts: Vec::new(),
        payments: Vec::new(),
    })
}
