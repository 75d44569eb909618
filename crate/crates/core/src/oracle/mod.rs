//! Self-reversible permutation oracles.
//!
//! A graph oracle encodes a successor function `f` on bit strings: the tape
//! `b` becomes `b#f(b)` and back. Chains `q_0 = 0^S -> q_1 -> ... -> q_t`
//! built from seeded random nodes define the separator language, decided
//! here by direct iteration. The read-only input ROM offers the same
//! protocol for the non-oracle variant of the problem.

mod graph;
mod rom;
mod tape;

use thiserror::Error;

use crate::bits::{BitString, BitsError};

pub use graph::{build_chain_oracle, oracle_call, Chain, GraphOracle};
pub use rom::{rom_access_word, rom_get_size, rom_result_bit, InputRom, MAX_ROM_WIDTH};
pub use tape::{OracleTape, TapeOracle};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("cannot draw {t} distinct nonzero nodes of {width} bits")]
    Infeasible { width: usize, t: usize },
    #[error("node width must be positive")]
    ZeroWidth,
    #[error("width {0} is too large")]
    WidthTooLarge(usize),
    #[error("node {index} has width {got}, expected {expected}")]
    NodeWidth {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("node {0} repeats an earlier node or the start node")]
    RepeatedNode(usize),
    #[error("invalid tape symbol {0:?}")]
    BadTapeSymbol(char),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// Space and time bounds; the chain walked by the separator has
/// `t = floor(T / S)` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub space: usize,
    pub time: usize,
}

impl Bounds {
    pub fn new(space: usize, time: usize) -> Result<Self, OracleError> {
        if space == 0 {
            return Err(OracleError::ZeroWidth);
        }
        if time < space {
            return Err(OracleError::Format(format!(
                "time bound {time} is below space bound {space}"
            )));
        }
        Ok(Self { space, time })
    }

    pub fn chain_length(&self) -> usize {
        self.time / self.space
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorOutcome {
    pub accept: bool,
    pub final_node: BitString,
    pub oracle_calls: usize,
    /// Successor steps actually taken before the loop ended.
    pub steps: usize,
}

/// The separator decider: start at `0^S`, follow successors for up to
/// `floor(T/S)` steps, accept iff the node reached starts with 1.
///
/// After reading `c` off the tape `b#c` the tape is restored to `b` with a
/// second call before `b` is overwritten, so the tape protocol stays exact.
pub fn separator_decide(o: &impl TapeOracle, bounds: Bounds) -> SeparatorOutcome {
    let mut b = BitString::zeros(bounds.space);
    let mut calls = 0;
    let mut steps = 0;
    for _ in 0..bounds.chain_length() {
        let tape = OracleTape::node(&b);
        let answer = o.call(&tape);
        calls += 1;
        match answer.as_pair() {
            Some((head, c)) if head == b => {
                let restored = o.call(&answer);
                calls += 1;
                debug_assert_eq!(restored, tape);
                b = c;
                steps += 1;
            }
            _ => break,
        }
    }
    SeparatorOutcome {
        accept: b.first() == Some(true),
        final_node: b,
        oracle_calls: calls,
        steps,
    }
}
