//! Reading an execution trace as a pebble game, and the compression
//! argument built on top of it.
//!
//! A node `q_j` counts as pebbled at time `tau` according to the previous
//! and next oracle queries involving it. From the pebbled set we derive the
//! move sequence the machine played, and a [`Description`] that rebuilds the
//! whole chain from a single configuration plus the nodes it does not
//! reveal. Small description systems and a brute-force search for strings
//! none of them can shorten round out the module.

mod description;
mod systems;
mod timeline;

use thiserror::Error;

use crate::oracle::OracleTape;
use crate::revsim::{SimError, Trace};

pub use description::{
    compress, decompress, space_profile, state_at, write_size_report, Description, SizeReport,
    SizeRow, SpacePoint, Triple,
};
pub use systems::{
    describe_duplicate, find_incompressible, ChainSystem, DescriptionSystem, DuplicateSplice,
    InitialPebble, TraceSystem, ZeroCollision, MAX_SEARCH_LENGTH,
};
pub use timeline::{
    checkpoint_moves, pebbled_at, trace_to_moves, Case, Direction, Interval, NodeStatus,
    PebbleTimeline,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("derived move sequence breaks the pebble rules: {0}")]
    RuleViolation(String),
    #[error("reconstruction failed: {0}")]
    ReconstructionFailure(String),
    #[error("no two nodes are equal")]
    NoDuplicate,
    #[error("time {tau} is outside the trace span 0..={len}")]
    TimeOutOfRange { tau: u64, len: u64 },
    #[error("search over descriptions shorter than {0} bits is too large")]
    SearchTooLarge(usize),
    #[error("bad description: {0}")]
    Format(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One oracle call: the tape before (the query string) and after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEvent {
    pub time: u64,
    pub before: OracleTape,
    pub after: OracleTape,
}

pub fn query_events(trace: &Trace) -> Vec<QueryEvent> {
    trace
        .events
        .iter()
        .filter_map(|e| {
            e.tapes.as_ref().map(|(before, after)| QueryEvent {
                time: e.clock,
                before: before.clone(),
                after: after.clone(),
            })
        })
        .collect()
}
