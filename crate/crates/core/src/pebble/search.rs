//! Exhaustive minimal-pebble search.
//!
//! Pebble sets are bitmasks (bit `j-1` is node `j`). For each budget
//! `b = 1, 2, ...` a breadth-first search explores every set reachable from
//! the empty set without ever holding more than `b` pebbles; the first
//! budget under which node `t` gets pebbled is the answer.

use std::collections::VecDeque;

use super::{Move, MoveKind, PebbleError};

/// Largest state space (`2^t`) searched unless the caller raises it.
pub const DEFAULT_STATE_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub min_pebbles: usize,
    /// A shortest move sequence that pebbles node `t` within the budget.
    pub witness: Vec<Move>,
    /// States expanded under the final budget.
    pub states_visited: usize,
}

pub fn min_pebbles(t: usize, pebble_budget_limit: usize) -> Result<SearchOutcome, PebbleError> {
    min_pebbles_with_cap(t, pebble_budget_limit, DEFAULT_STATE_CAP)
}

pub fn min_pebbles_with_cap(
    t: usize,
    pebble_budget_limit: usize,
    state_cap: u64,
) -> Result<SearchOutcome, PebbleError> {
    if t == 0 {
        return Err(PebbleError::EmptyChain);
    }
    if t >= 63 || (1u64 << t) > state_cap {
        return Err(PebbleError::BudgetTooLarge {
            chain_length: t,
            cap: state_cap,
        });
    }
    for budget in 1..=pebble_budget_limit.min(t) {
        if let Some((witness, visited)) = bfs(t, budget) {
            return Ok(SearchOutcome {
                min_pebbles: budget,
                witness,
                states_visited: visited,
            });
        }
    }
    Err(PebbleError::NotReachable {
        target: t,
        limit: pebble_budget_limit,
    })
}

const UNSEEN: u32 = u32::MAX;

fn bfs(t: usize, budget: usize) -> Option<(Vec<Move>, usize)> {
    let states = 1usize << t;
    let goal = 1u64 << (t - 1);
    // parent[s] = predecessor state, UNSEEN if unvisited.
    let mut parent = vec![UNSEEN; states];
    parent[0] = 0;
    let mut queue = VecDeque::from([0u64]);
    let mut visited = 0;
    while let Some(s) = queue.pop_front() {
        visited += 1;
        if s & goal != 0 {
            return Some((rebuild(&parent, s), visited));
        }
        // Lowest node index first.
        for node in 1..=t {
            if node != 1 && s & (1 << (node - 2)) == 0 {
                continue;
            }
            let next = s ^ (1 << (node - 1));
            if next.count_ones() as usize > budget || parent[next as usize] != UNSEEN {
                continue;
            }
            parent[next as usize] = s as u32;
            queue.push_back(next);
        }
    }
    None
}

fn rebuild(parent: &[u32], mut s: u64) -> Vec<Move> {
    let mut moves = Vec::new();
    while s != 0 {
        let p = parent[s as usize] as u64;
        let node = (s ^ p).trailing_zeros() as usize + 1;
        let kind = if s & (1 << (node - 1)) != 0 {
            MoveKind::Pebble
        } else {
            MoveKind::Unpebble
        };
        moves.push(Move { node, kind });
        s = p;
    }
    moves.reverse();
    moves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebble::{schedule_metrics, Schedule};

    #[test]
    fn small_chains() {
        assert_eq!(min_pebbles(1, 4).unwrap().min_pebbles, 1);
        assert_eq!(min_pebbles(8, 8).unwrap().min_pebbles, 4);
    }

    #[test]
    fn witness_is_legal_and_within_budget() {
        let out = min_pebbles(6, 6).unwrap();
        let m = schedule_metrics(&Schedule::from_moves(6, out.witness)).unwrap();
        assert_eq!(m.max_pebbles, out.min_pebbles);
        assert!(m.first_reach_move.is_some());
    }

    #[test]
    fn errors() {
        assert_eq!(
            min_pebbles(8, 3),
            Err(PebbleError::NotReachable {
                target: 8,
                limit: 3
            })
        );
        assert!(matches!(
            min_pebbles_with_cap(12, 12, 1 << 10),
            Err(PebbleError::BudgetTooLarge { .. })
        ));
        assert_eq!(min_pebbles(0, 1), Err(PebbleError::EmptyChain));
    }
}
