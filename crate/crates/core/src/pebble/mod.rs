//! The reversible pebble game on a linear chain.
//!
//! Nodes are numbered `1..=t`; node 0 is the always-available start and is
//! never pebbled. A move toggles node `j` and is legal only when `j == 1` or
//! node `j - 1` is currently pebbled.

mod search;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use search::{min_pebbles, min_pebbles_with_cap, SearchOutcome, DEFAULT_STATE_CAP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PebbleError {
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: Move, reason: &'static str },
    #[error("node {node} outside chain 1..={chain_length}")]
    NodeOutOfRange { node: usize, chain_length: usize },
    #[error("k^n overflows for k={k}, n={n}")]
    Overflow { k: usize, n: u32 },
    #[error("branching parameter k must be at least 2, got {0}")]
    BadBranching(usize),
    #[error("node {target} not reachable within {limit} pebbles")]
    NotReachable { target: usize, limit: usize },
    #[error("search over 2^{chain_length} states exceeds the cap of {cap} states")]
    BudgetTooLarge { chain_length: usize, cap: u64 },
    #[error("chain length must be at least 1")]
    EmptyChain,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Pebble,
    Unpebble,
}

impl MoveKind {
    pub fn flipped(self) -> Self {
        match self {
            MoveKind::Pebble => MoveKind::Unpebble,
            MoveKind::Unpebble => MoveKind::Pebble,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub node: usize,
    pub kind: MoveKind,
}

impl Move {
    pub fn pebble(node: usize) -> Self {
        Self {
            node,
            kind: MoveKind::Pebble,
        }
    }

    pub fn unpebble(node: usize) -> Self {
        Self {
            node,
            kind: MoveKind::Unpebble,
        }
    }

    /// The move that undoes this one.
    pub fn inverse(self) -> Self {
        Self {
            node: self.node,
            kind: self.kind.flipped(),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::Pebble => write!(f, "P {}", self.node),
            MoveKind::Unpebble => write!(f, "U {}", self.node),
        }
    }
}

/// The set of pebbled nodes on a chain of `chain_length` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleState {
    chain_length: usize,
    pebbled: BTreeSet<usize>,
}

impl PebbleState {
    pub fn new(chain_length: usize) -> Self {
        Self {
            chain_length,
            pebbled: BTreeSet::new(),
        }
    }

    pub fn chain_length(&self) -> usize {
        self.chain_length
    }

    pub fn pebbled(&self) -> &BTreeSet<usize> {
        &self.pebbled
    }

    pub fn is_pebbled(&self, node: usize) -> bool {
        self.pebbled.contains(&node)
    }

    pub fn count(&self) -> usize {
        self.pebbled.len()
    }

    /// Checks legality without changing anything.
    pub fn check(&self, mv: Move) -> Result<(), PebbleError> {
        if mv.node == 0 || mv.node > self.chain_length {
            return Err(PebbleError::NodeOutOfRange {
                node: mv.node,
                chain_length: self.chain_length,
            });
        }
        if mv.node != 1 && !self.is_pebbled(mv.node - 1) {
            return Err(PebbleError::IllegalMove {
                mv,
                reason: "predecessor is not pebbled",
            });
        }
        match (mv.kind, self.is_pebbled(mv.node)) {
            (MoveKind::Pebble, true) => Err(PebbleError::IllegalMove {
                mv,
                reason: "node is already pebbled",
            }),
            (MoveKind::Unpebble, false) => Err(PebbleError::IllegalMove {
                mv,
                reason: "node is not pebbled",
            }),
            _ => Ok(()),
        }
    }

    pub fn apply_in_place(&mut self, mv: Move) -> Result<(), PebbleError> {
        self.check(mv)?;
        match mv.kind {
            MoveKind::Pebble => self.pebbled.insert(mv.node),
            MoveKind::Unpebble => self.pebbled.remove(&mv.node),
        };
        Ok(())
    }

    pub fn apply_move(&self, mv: Move) -> Result<PebbleState, PebbleError> {
        let mut next = self.clone();
        next.apply_in_place(mv)?;
        Ok(next)
    }
}

/// A move sequence together with the Bennett parameters that produced it.
///
/// Schedules found by search rather than by the recursion carry `k = 0`
/// and `n = 0`; only `target` and `moves` are meaningful for them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub k: usize,
    pub n: u32,
    pub target: usize,
    pub moves: Vec<Move>,
}

impl Schedule {
    pub fn from_moves(target: usize, moves: Vec<Move>) -> Self {
        Self {
            k: 0,
            n: 0,
            target,
            moves,
        }
    }

    /// Highest node index any move touches, or the target if larger.
    pub fn chain_length(&self) -> usize {
        self.moves
            .iter()
            .map(|m| m.node)
            .max()
            .unwrap_or(0)
            .max(self.target)
    }

    /// One move per line, `P <idx>` or `U <idx>`, each newline-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for mv in &self.moves {
            out.push_str(&mv.to_string());
            out.push('\n');
        }
        out
    }
}

/// Parse the line-oriented move format. Blank lines are rejected.
pub fn parse_moves(text: &str) -> Result<Vec<Move>, PebbleError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let err = |msg: &str| PebbleError::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let (kind, idx) = line
                .split_once(' ')
                .ok_or_else(|| err("expected `P <idx>` or `U <idx>`"))?;
            let node: usize = idx.parse().map_err(|_| err("bad node index"))?;
            match kind {
                "P" => Ok(Move::pebble(node)),
                "U" => Ok(Move::unpebble(node)),
                _ => Err(err("move kind must be P or U")),
            }
        })
        .collect()
}

/// Bennett's hierarchical strategy with branching `k` and depth `n`.
///
/// Level 0 is the single move pebbling the node after the current
/// checkpoint. Level `l` runs `k` level-`(l-1)` advances and then undoes all
/// of them except the last, leaving only the checkpoint `k^l` nodes further
/// along. The result has `(2k-1)^n` moves and ends with exactly `{k^n}`.
pub fn bennett_schedule(k: usize, n: u32) -> Result<Schedule, PebbleError> {
    if k < 2 {
        return Err(PebbleError::BadBranching(k));
    }
    let target = k.checked_pow(n).ok_or(PebbleError::Overflow { k, n })?;
    // (2k-1)^n >= k^n, so the move count bounds the allocation too.
    let total = (2 * k - 1)
        .checked_pow(n)
        .ok_or(PebbleError::Overflow { k, n })?;
    let mut moves = Vec::with_capacity(total);
    advance(k, n, 0, &mut moves);
    Ok(Schedule {
        k,
        n,
        target,
        moves,
    })
}

fn advance(k: usize, level: u32, base: usize, out: &mut Vec<Move>) {
    if level == 0 {
        out.push(Move::pebble(base + 1));
        return;
    }
    let span = k.pow(level - 1);
    for i in 0..k {
        advance(k, level - 1, base + i * span, out);
    }
    for i in (0..k - 1).rev() {
        retreat(k, level - 1, base + i * span, out);
    }
}

/// Exact inverse of `advance`: reversed order, flipped kinds.
fn retreat(k: usize, level: u32, base: usize, out: &mut Vec<Move>) {
    let start = out.len();
    advance(k, level, base, out);
    out[start..].reverse();
    for mv in &mut out[start..] {
        *mv = mv.inverse();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub total_moves: usize,
    pub max_pebbles: usize,
    /// 1-based index of the move that first pebbles the target.
    pub first_reach_move: Option<usize>,
    /// In segment-time units: each move is a forward and a backward segment
    /// simulation, and the target counts as reached at the end of the
    /// forward half of its pebbling move, so this is `2m - 1`.
    pub first_reach_time: Option<usize>,
}

/// Replay `schedule` from the empty state and measure it.
pub fn schedule_metrics(schedule: &Schedule) -> Result<Metrics, PebbleError> {
    let mut state = PebbleState::new(schedule.chain_length());
    let mut max_pebbles = 0;
    let mut first_reach_move = None;
    for (i, &mv) in schedule.moves.iter().enumerate() {
        state.apply_in_place(mv)?;
        max_pebbles = max_pebbles.max(state.count());
        if first_reach_move.is_none() && mv.node == schedule.target && mv.kind == MoveKind::Pebble {
            first_reach_move = Some(i + 1);
        }
    }
    Ok(Metrics {
        total_moves: schedule.moves.len(),
        max_pebbles,
        first_reach_move,
        first_reach_time: first_reach_move.map(|m| 2 * m - 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_move_examples() {
        let empty = PebbleState::new(4);
        let one = empty.apply_move(Move::pebble(1)).unwrap();
        assert_eq!(one.pebbled().iter().copied().collect::<Vec<_>>(), vec![1]);
        let two = one.apply_move(Move::pebble(2)).unwrap();
        assert_eq!(
            two.pebbled().iter().copied().collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert!(matches!(
            empty.apply_move(Move::pebble(2)),
            Err(PebbleError::IllegalMove { .. })
        ));
    }

    #[test]
    fn kind_must_match_status() {
        let empty = PebbleState::new(3);
        assert!(matches!(
            empty.apply_move(Move::unpebble(1)),
            Err(PebbleError::IllegalMove { .. })
        ));
        let one = empty.apply_move(Move::pebble(1)).unwrap();
        assert!(one.apply_move(Move::pebble(1)).is_err());
        assert!(matches!(
            one.apply_move(Move::pebble(4)),
            Err(PebbleError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn one_level_k2_hand_unrolled() {
        let s = bennett_schedule(2, 1).unwrap();
        assert_eq!(
            s.moves,
            vec![Move::pebble(1), Move::pebble(2), Move::unpebble(1)]
        );
        assert_eq!(s.target, 2);
    }

    #[test]
    fn figure_values() {
        let m = schedule_metrics(&bennett_schedule(2, 3).unwrap()).unwrap();
        assert_eq!(
            (m.total_moves, m.max_pebbles, m.first_reach_time),
            (27, 4, Some(27))
        );
        let m = schedule_metrics(&bennett_schedule(3, 2).unwrap()).unwrap();
        assert_eq!(
            (m.total_moves, m.max_pebbles, m.first_reach_time),
            (25, 5, Some(25))
        );
    }

    #[test]
    fn depth_zero_is_one_segment() {
        let s = bennett_schedule(3, 0).unwrap();
        assert_eq!(s.moves, vec![Move::pebble(1)]);
        assert_eq!(s.target, 1);
    }

    #[test]
    fn empty_schedule_metrics() {
        let m = schedule_metrics(&Schedule::from_moves(1, vec![])).unwrap();
        assert_eq!(m.total_moves, 0);
        assert_eq!(m.max_pebbles, 0);
        assert_eq!(m.first_reach_move, None);
    }

    #[test]
    fn overflow_and_bad_k() {
        assert!(matches!(
            bennett_schedule(1, 3),
            Err(PebbleError::BadBranching(1))
        ));
        assert!(matches!(
            bennett_schedule(4, 60),
            Err(PebbleError::Overflow { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let s = bennett_schedule(2, 2).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("P 1\nP 2\nU 1\n"));
        assert!(text.ends_with('\n'));
        assert_eq!(parse_moves(&text).unwrap(), s.moves);
        assert!(parse_moves("X 1\n").is_err());
        assert!(parse_moves("P one\n").is_err());
    }
}
