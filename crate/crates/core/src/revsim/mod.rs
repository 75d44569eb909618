//! A deterministic reversible virtual machine.
//!
//! The machine simulates a black-box irreversible step rule with the
//! Landauer embedding (keep a record of every overwritten configuration),
//! undoes it by Lecerf reversal, and saves results with an XOR checkpoint
//! copy. Driving those pieces from a pebbling schedule gives the
//! hierarchical Bennett simulation. Every run is recorded as a [`Trace`]
//! that can be replayed in either direction.

mod bennett;
mod machine;
mod trace;
mod vm;

use thiserror::Error;

use crate::pebble::PebbleError;

pub use bennett::{
    simulate_bennett, simulate_bennett_oracle, simulate_bennett_with_capacity, simulate_chain_walk,
    SimReport, SimRun,
};
pub use machine::{landauer_run, lecerf_reverse, IrrevMachine, StepRule, MAX_TABLE_WIDTH};
pub use trace::{replay_backward, replay_forward, Event, Trace};
pub use vm::{
    apply, bennett_checkpoint_copy, unapply, Context, MicroOp, Slot, TapeChange, VmState,
};

pub(crate) use vm::{put_bits, put_u32, Reader};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("configuration width {0} is not supported")]
    BadWidth(usize),
    #[error("bad step table: {0}")]
    BadTable(String),
    #[error("corrupt history: {0}")]
    CorruptHistory(String),
    #[error("checkpoint slot {slot} is outside capacity {capacity}")]
    SlotOutOfRange { slot: usize, capacity: usize },
    #[error("slot {slot} is in the wrong state for {op}")]
    SlotState { slot: usize, op: MicroOp },
    #[error("checkpoint store of capacity {capacity} overflowed")]
    CapacityExceeded { capacity: usize },
    #[error("step micro-op needs a step rule")]
    MissingRule,
    #[error("oracle micro-op needs an oracle")]
    MissingOracle,
    #[error("tape does not match {op} at clock {clock}")]
    TapeMismatch { op: MicroOp, clock: u64 },
    #[error("machine not clean after move {0}")]
    BoundaryViolation(usize),
    #[error("segment length must be at least 1")]
    BadSegLen,
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
    #[error("cannot decode state: {0}")]
    Decode(String),
    #[error("event {0:?} has no inverse")]
    NonInvertibleEvent(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    IllegalMove(#[from] PebbleError),
}
