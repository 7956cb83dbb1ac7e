//! Coding theorem method: enumerate small 2D machines, tally what the
//! halting ones print, and turn output frequencies into complexity values
//! `km(s) = -log2 m(s)`.
//!
//! Machines use a binary alphabet, absolute moves in the four grid
//! directions and a single halt state reachable from any transition. Runs
//! start in state 1 at the origin of an all-0 tape. A halted machine's
//! output is the bounding box of its 1 cells. These conventions are stamped
//! into every table so tables built under different conventions are never
//! silently mixed.

mod machine;
mod sim;
mod table;

use thiserror::Error;

pub use machine::{
    entry_radix, enumerate_machines, machine_count, MachineRule, Move, Next, Transition, SYMBOLS,
};
pub use sim::{run_machine, HaltResult, MachineOutput, Simulator};
pub use table::{
    build_ctm_table, build_ctm_table_sharded, shard_ranges, tally_range, BlockKey, BuildMode,
    CtmConfig, CtmTable, Provenance, ShapeFilter, TableEntry, Tally, DEFAULT_BUDGET, FORMALISM,
    MAX_EXHAUSTIVE_STATES, OUTPUT_CONVENTION,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CtmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no halting machine produced a tabulated output")]
    EmptyTable,
    #[error("table line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inconsistent table: {0}")]
    Inconsistent(String),
}
