//! Greedy `(1+eps)`-spanners of finite metric spaces.
//!
//! [`spanner::greedy_spanner`] builds the spanner, [`spanner`] also verifies
//! stretch and MST containment, [`partition`] splits spanner edges into
//! weight classes and hands out MST credit, and [`certify`] runs the
//! cluster-credit accounting over every level. [`harness`] holds point
//! generators and the sweep driver used by the `spanlab` binary.

pub mod metric;
pub mod spanner;
pub mod partition;
pub mod certify;
pub mod harness;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/greedy.md")]
    mod greedy {}
    #[doc = include_str!("../../../book/src/partition.md")]
    mod partition {}
    #[doc = include_str!("../../../book/src/certifier.md")]
    mod certifier {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
