use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::bits::BitString;
use crate::oracle::Chain;
use crate::pebble::{Move, PebbleState};
use crate::revsim::{MicroOp, Slot, Trace};

use super::{AnalysisError, QueryEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" | "fwd" | "f" => Ok(Direction::Forward),
            "backward" | "bwd" | "b" => Ok(Direction::Backward),
            _ => Err(format!("unknown direction {s:?}")),
        }
    }
}

/// Why a node counts as pebbled. `A*` cases look at the previous query
/// involving the node, `B*` cases at the next one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// Previous query was `q_{j-1}`.
    A1,
    /// Previous query was `q_j`.
    A2,
    /// Previous query was `q_j#q_{j+1}`.
    A3,
    /// Next query is `q_j`.
    B1,
    /// Next query is `q_j#q_{j+1}`.
    B2,
    /// Next query is `q_{j-1}#q_j`.
    B3,
}

impl Case {
    pub fn tag(self) -> u8 {
        match self {
            Case::A1 | Case::B1 => 1,
            Case::A2 | Case::B2 => 2,
            Case::A3 | Case::B3 => 3,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Case::A1 | Case::A2 | Case::A3 => Direction::Backward,
            Case::B1 | Case::B2 | Case::B3 => Direction::Forward,
        }
    }

    pub fn from_tag(direction: Direction, tag: u8) -> Option<Case> {
        Some(match (direction, tag) {
            (Direction::Backward, 1) => Case::A1,
            (Direction::Backward, 2) => Case::A2,
            (Direction::Backward, 3) => Case::A3,
            (Direction::Forward, 1) => Case::B1,
            (Direction::Forward, 2) => Case::B2,
            (Direction::Forward, 3) => Case::B3,
            _ => return None,
        })
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.direction() {
            Direction::Backward => 'a',
            Direction::Forward => 'b',
        };
        write!(f, "{side}.{}", self.tag())
    }
}

/// Shape of a query string relative to node `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    /// `q_{j-1}`
    Pred,
    /// `q_{j-1}#q_j`
    PredPair,
    /// `q_j`
    Own,
    /// `q_j#q_{j+1}`
    OwnPair,
}

/// The previous and next queries that make a node pebbled, with their times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NodeStatus {
    pub prev: Option<(u64, Case)>,
    pub next: Option<(u64, Case)>,
}

impl NodeStatus {
    pub fn pebbled(&self) -> bool {
        self.prev.is_some() || self.next.is_some()
    }

    pub fn cause(&self, direction: Direction) -> Option<(u64, Case)> {
        match direction {
            Direction::Backward => self.prev,
            Direction::Forward => self.next,
        }
    }
}

/// A maximal run of times over which a node's status is constant.
/// `to` is inclusive; `None` means the run never ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub from: u64,
    pub to: Option<u64>,
    pub pebbled: bool,
    /// The justifying case, preferring the previous query when both apply.
    pub case: Option<Case>,
}

/// Per-node query history, from which the pebbled status at any time
/// follows.
#[derive(Debug, Clone)]
pub struct PebbleTimeline {
    t: usize,
    /// `touches[j]` lists the queries involving `q_j`, time-sorted.
    touches: Vec<Vec<(u64, Form)>>,
}

impl PebbleTimeline {
    pub fn build(events: &[QueryEvent], chain: &Chain) -> Self {
        let t = chain.t();
        let width = chain.node_width;
        let index: HashMap<BitString, usize> = (0..=t).map(|j| (chain.node(j), j)).collect();
        let mut touches = vec![Vec::new(); t + 1];
        for e in events {
            if let Some(i) = e.before.as_node().and_then(|b| index.get(&b).copied()) {
                if i >= 1 {
                    touches[i].push((e.time, Form::Own));
                }
                if i < t {
                    touches[i + 1].push((e.time, Form::Pred));
                }
            } else if let Some((b, c)) = e.before.as_balanced_pair(width) {
                if let Some(&i) = index.get(&b) {
                    if i < t && c == chain.node(i + 1) {
                        if i >= 1 {
                            touches[i].push((e.time, Form::OwnPair));
                        }
                        touches[i + 1].push((e.time, Form::PredPair));
                    }
                }
            }
        }
        for list in &mut touches {
            list.sort_by_key(|&(time, _)| time);
        }
        Self { t, touches }
    }

    pub fn chain_length(&self) -> usize {
        self.t
    }

    /// Status of node `j` at time `tau`. A query stamped `e` lies in the
    /// past of `tau` iff `e <= tau`.
    pub fn status(&self, j: usize, tau: u64) -> NodeStatus {
        assert!((1..=self.t).contains(&j), "node {j} outside 1..={}", self.t);
        let list = &self.touches[j];
        let split = list.partition_point(|&(e, _)| e <= tau);
        let last = j == self.t;
        let prev = split.checked_sub(1).and_then(|i| {
            let (e, form) = list[i];
            let case = match form {
                Form::Pred => Some(Case::A1),
                Form::Own if !last => Some(Case::A2),
                Form::OwnPair if !last => Some(Case::A3),
                _ => None,
            };
            case.map(|c| (e, c))
        });
        let next = list.get(split).and_then(|&(e, form)| {
            let case = match form {
                Form::Own if !last => Some(Case::B1),
                Form::OwnPair if !last => Some(Case::B2),
                Form::PredPair => Some(Case::B3),
                _ => None,
            };
            case.map(|c| (e, c))
        });
        NodeStatus { prev, next }
    }

    pub fn pebbled(&self, tau: u64) -> BTreeSet<usize> {
        (1..=self.t)
            .filter(|&j| self.status(j, tau).pebbled())
            .collect()
    }

    /// Nodes pebbled at `tau` because of a query in `direction`, with the
    /// time and case of that query.
    pub fn pebbled_via(&self, tau: u64, direction: Direction) -> Vec<(usize, u64, Case)> {
        (1..=self.t)
            .filter_map(|j| {
                self.status(j, tau)
                    .cause(direction)
                    .map(|(e, case)| (j, e, case))
            })
            .collect()
    }

    /// The direction revealing more pebbled nodes; ties go forward.
    pub fn majority_direction(&self, tau: u64) -> Direction {
        let fwd = self.pebbled_via(tau, Direction::Forward).len();
        let bwd = self.pebbled_via(tau, Direction::Backward).len();
        if bwd > fwd {
            Direction::Backward
        } else {
            Direction::Forward
        }
    }

    pub fn intervals(&self, j: usize) -> Vec<Interval> {
        let mut starts = vec![0];
        starts.extend(self.touches[j].iter().map(|&(e, _)| e).filter(|&e| e > 0));
        starts.dedup();
        starts
            .iter()
            .enumerate()
            .map(|(i, &from)| {
                let status = self.status(j, from);
                Interval {
                    from,
                    to: starts.get(i + 1).map(|&next| next - 1),
                    pebbled: status.pebbled(),
                    case: status.prev.or(status.next).map(|(_, c)| c),
                }
            })
            .collect()
    }

    /// Times at which some node's status can change.
    pub fn event_times(&self) -> Vec<u64> {
        let mut times: Vec<u64> = self.touches.iter().flatten().map(|&(e, _)| e).collect();
        times.sort_unstable();
        times.dedup();
        times
    }
}

pub fn pebbled_at(events: &[QueryEvent], chain: &Chain, tau: u64) -> BTreeSet<usize> {
    PebbleTimeline::build(events, chain).pebbled(tau)
}

/// The pebble moves implied by the query history: a move for each node
/// whose status flips at a query, and nothing for queries that change
/// nothing.
pub fn trace_to_moves(events: &[QueryEvent], chain: &Chain) -> Result<Vec<Move>, AnalysisError> {
    let timeline = PebbleTimeline::build(events, chain);
    let times = timeline.event_times();
    let Some(&first) = times.first() else {
        return Ok(Vec::new());
    };
    let mut current = timeline.pebbled(first - 1);
    if !current.is_empty() {
        return Err(AnalysisError::RuleViolation(format!(
            "nodes {current:?} are pebbled before the first query"
        )));
    }
    let mut game = PebbleState::new(chain.t().max(1));
    let mut moves = Vec::new();
    for &e in &times {
        let next = timeline.pebbled(e);
        let added = next.difference(&current).map(|&j| Move::pebble(j));
        let mut removed: Vec<usize> = current.difference(&next).copied().collect();
        removed.reverse();
        let removed = removed.into_iter().map(Move::unpebble);
        let step: Vec<Move> = added.chain(removed).collect();
        for mv in step {
            game.apply_in_place(mv)
                .map_err(|err| AnalysisError::RuleViolation(format!("at time {e}: {err}")))?;
            moves.push(mv);
        }
        current = next;
    }
    Ok(moves)
}

/// Pebble moves of a rule-driven run, read from its checkpoint claims and
/// releases. Such runs make no oracle queries, so the slot a move fills
/// stands in for the node it pebbles.
pub fn checkpoint_moves(trace: &Trace) -> Result<Vec<Move>, AnalysisError> {
    let violation = |msg: String| AnalysisError::RuleViolation(msg);
    let mut node_in: HashMap<usize, usize> = HashMap::new();
    let mut moves = Vec::new();
    let ops: Vec<MicroOp> = trace.ops().collect();
    for (i, op) in ops.iter().enumerate() {
        match *op {
            MicroOp::Claim(slot) => {
                let node =
                    match ops.get(i + 1) {
                        Some(MicroOp::Load(Slot::Origin)) => 1,
                        Some(MicroOp::Load(Slot::Checkpoint(src))) => node_in
                            .get(src)
                            .map(|n| n + 1)
                            .ok_or_else(|| violation(format!("slot {src} is empty")))?,
                        _ => return Err(violation(format!("claim at op {} has no load", i + 1))),
                    };
                node_in.insert(slot, node);
                moves.push(Move::pebble(node));
            }
            MicroOp::Release(slot) => {
                let node = node_in
                    .remove(&slot)
                    .ok_or_else(|| violation(format!("slot {slot} is empty")))?;
                moves.push(Move::unpebble(node));
            }
            _ => {}
        }
    }
    let mut game = PebbleState::new(moves.iter().map(|m| m.node).max().unwrap_or(1));
    for &mv in &moves {
        game.apply_in_place(mv)
            .map_err(|err| violation(err.to_string()))?;
    }
    Ok(moves)
}
