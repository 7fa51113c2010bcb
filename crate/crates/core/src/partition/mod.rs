//! Average MST weight, MST subdivision, credit allocation and the weight
//! classes `L_S`, `J_0` and `Pi_i^j` of spanner edges.

mod classify;
mod credits;
mod subdivide;

pub use classify::{
    check_weight_bounds, classify_all, classify_edges, classify_weight, i_eps, i_n, ClassTotal, EdgeClass,
    LevelPartition, LevelSummary, PartitionReport, WeightBoundReport,
};
pub use credits::{allocate_credits, Account, CreditLedger, Payment};
pub use subdivide::{mst_summary, subdivide, MstSummary, SubdividedSpanner};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PartitionError {
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("an MST needs at least two vertices")]
    SingleVertex,
    #[error("eps must lie strictly between 0 and 1, got {eps}")]
    EpsOutOfRange { eps: f64 },
    #[error("stream index j = {j} outside [0, {i_eps})")]
    StreamOutOfRange { j: usize, i_eps: usize },
    #[error("credit constant must be positive, got {c}")]
    BadCreditConstant { c: f64 },
    #[error("allocated credit {total} exceeds 2 c w(MST) = {bound}")]
    CreditOverflow { total: f64, bound: f64 },
    #[error("account {account} would go negative paying {amount} with {balance} left")]
    NegativeBalance { account: usize, amount: f64, balance: f64 },
}
