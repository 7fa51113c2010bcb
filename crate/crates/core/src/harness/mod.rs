//! Point-set generators, the instance pipeline and parameter sweeps.

mod generate;
mod sweep;

pub use generate::{generate, BadSpec, GenKind, GenSpec};
pub use sweep::{
    build_instance, grid, growth_ratios, run_cell, run_sweep, write_csv, Growth, Instance, SweepCell, SweepOptions,
    SweepRow,
};
