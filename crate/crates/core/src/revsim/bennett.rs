use std::collections::HashMap;

use crate::bits::BitString;
use crate::oracle::TapeOracle;
use crate::pebble::{bennett_schedule, Move, MoveKind, PebbleError, PebbleState};

use super::machine::IrrevMachine;
use super::trace::{Event, Trace};
use super::vm::{apply, Context, MicroOp, Slot, VmState};
use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    /// Contents of the target node's checkpoint at the end of the run.
    pub final_checkpoint: BitString,
    pub peak_checkpoints: usize,
    pub peak_history_bits: usize,
    pub total_microops: u64,
    /// Seed of the step rule, when it is seeded.
    pub seed: Option<u64>,
    pub target: usize,
}

/// A finished run: the report plus everything needed to audit it.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub report: SimReport,
    pub trace: Trace,
    pub start: VmState,
    pub end: VmState,
    pub moves: Vec<Move>,
}

/// Simulate `k^n * seg_len` steps of `m` from `init` along the Bennett(k, n)
/// schedule, with `n(k-1)+1` checkpoint slots.
pub fn simulate_bennett(
    m: &IrrevMachine,
    init: &BitString,
    k: usize,
    n: u32,
    seg_len: usize,
) -> Result<SimRun, SimError> {
    let capacity = n as usize * k.saturating_sub(1) + 1;
    simulate_bennett_with_capacity(m, init, k, n, seg_len, capacity)
}

pub fn simulate_bennett_with_capacity(
    m: &IrrevMachine,
    init: &BitString,
    k: usize,
    n: u32,
    seg_len: usize,
    capacity: usize,
) -> Result<SimRun, SimError> {
    if seg_len == 0 {
        return Err(SimError::BadSegLen);
    }
    if init.len() != m.width() {
        return Err(SimError::BadWidth(init.len()));
    }
    let schedule = bennett_schedule(k, n)?;
    let ctx = Context::with_rule(m);
    let start = VmState::new(init.clone(), capacity);
    let mut run = run_moves(&ctx, start, &schedule.moves, schedule.target, |src, dst| {
        rule_pebble_ops(src, dst, seg_len)
    })?;
    run.report.seed = m.seed();
    Ok(run)
}

/// Walk the oracle chain from `q_0 = 0^S` along an arbitrary legal move
/// sequence. Each move makes exactly one oracle query. The target is the
/// highest node pebbled at the end, or node 1 when nothing is.
pub fn simulate_chain_walk(
    oracle: &dyn TapeOracle,
    width: usize,
    moves: &[Move],
    capacity: usize,
) -> Result<SimRun, SimError> {
    if width == 0 {
        return Err(SimError::BadWidth(0));
    }
    let chain_length = moves.iter().map(|m| m.node).max().unwrap_or(1);
    let mut state = PebbleState::new(chain_length);
    for &mv in moves {
        state.apply_in_place(mv)?;
    }
    let target = state.pebbled().iter().next_back().copied().unwrap_or(1);
    let ctx = Context::with_oracle(oracle);
    let start = VmState::new(BitString::zeros(width), capacity);
    run_moves(&ctx, start, moves, target, oracle_pebble_ops)
}

/// The Bennett(k, n) schedule run against an oracle chain.
pub fn simulate_bennett_oracle(
    oracle: &dyn TapeOracle,
    width: usize,
    k: usize,
    n: u32,
) -> Result<SimRun, SimError> {
    let schedule = bennett_schedule(k, n)?;
    let capacity = n as usize * k.saturating_sub(1) + 1;
    let mut run = simulate_chain_walk(oracle, width, &schedule.moves, capacity)?;
    run.report.target = schedule.target;
    run.report.final_checkpoint = target_value(&run.end, &run.moves, schedule.target);
    Ok(run)
}

// Landauer forward, copy out, Lecerf back.
fn rule_pebble_ops(src: Slot, dst: usize, seg_len: usize) -> Vec<MicroOp> {
    let mut ops = vec![MicroOp::Claim(dst), MicroOp::Load(src)];
    ops.extend(std::iter::repeat_n(MicroOp::Step, seg_len));
    ops.push(MicroOp::Copy(dst));
    ops.extend(std::iter::repeat_n(MicroOp::Unstep, seg_len));
    ops.push(MicroOp::Load(src));
    ops
}

// One query: the answer `q_{j-1}#q_j` is copied out and the tape is cleared by
// XOR against the known pair rather than by a second query.
fn oracle_pebble_ops(src: Slot, dst: usize) -> Vec<MicroOp> {
    vec![
        MicroOp::Claim(dst),
        MicroOp::Load(src),
        MicroOp::TapeWrite,
        MicroOp::OracleCall,
        MicroOp::Push,
        MicroOp::TakeSucc,
        MicroOp::TapeJoin,
        MicroOp::Copy(dst),
        MicroOp::Load(Slot::Checkpoint(dst)),
        MicroOp::Pop,
        MicroOp::Load(src),
    ]
}

fn run_moves(
    ctx: &Context,
    start: VmState,
    moves: &[Move],
    target: usize,
    pebble_ops: impl Fn(Slot, usize) -> Vec<MicroOp>,
) -> Result<SimRun, SimError> {
    let capacity = start.capacity();
    let chain_length = moves.iter().map(|m| m.node).max().unwrap_or(1).max(target);
    let mut pebbles = PebbleState::new(chain_length);
    let mut slot_of: HashMap<usize, usize> = HashMap::new();
    let mut vm = start.clone();
    let mut trace = Trace::new(vm.width);
    let mut peak_checkpoints = 0;
    let mut peak_history_bits = 0;

    for (index, &mv) in moves.iter().enumerate() {
        pebbles.check(mv)?;
        let src = match mv.node {
            1 => Slot::Origin,
            j => Slot::Checkpoint(slot_of[&(j - 1)]),
        };
        let ops = match mv.kind {
            MoveKind::Pebble => {
                let dst = (0..capacity)
                    .find(|&i| !vm.occupied[i])
                    .ok_or(SimError::CapacityExceeded { capacity })?;
                slot_of.insert(mv.node, dst);
                pebble_ops(src, dst)
            }
            MoveKind::Unpebble => {
                let dst = slot_of.remove(&mv.node).ok_or(PebbleError::IllegalMove {
                    mv,
                    reason: "node is not pebbled",
                })?;
                pebble_ops(src, dst)
                    .into_iter()
                    .rev()
                    .map(MicroOp::inverse)
                    .collect()
            }
        };
        for op in ops {
            let tapes = apply(ctx, &mut vm, op)?;
            trace.events.push(Event {
                clock: vm.clock,
                op,
                tapes,
            });
            peak_checkpoints = peak_checkpoints.max(vm.occupied_count());
            peak_history_bits = peak_history_bits.max(vm.history.len() * vm.width);
        }
        pebbles.apply_in_place(mv)?;
        if !vm.is_clean() {
            return Err(SimError::BoundaryViolation(index + 1));
        }
    }

    let report = SimReport {
        final_checkpoint: target_value(&vm, moves, target),
        peak_checkpoints,
        peak_history_bits,
        total_microops: vm.clock - start.clock,
        seed: None,
        target,
    };
    Ok(SimRun {
        report,
        trace,
        start,
        end: vm,
        moves: moves.to_vec(),
    })
}

// Re-derive the slot assignment to find where `target` ended up.
fn target_value(vm: &VmState, moves: &[Move], target: usize) -> BitString {
    let mut occupied = vec![false; vm.capacity()];
    let mut slot_of = HashMap::new();
    for mv in moves {
        match mv.kind {
            MoveKind::Pebble => {
                if let Some(i) = occupied.iter().position(|&o| !o) {
                    occupied[i] = true;
                    slot_of.insert(mv.node, i);
                }
            }
            MoveKind::Unpebble => {
                if let Some(i) = slot_of.remove(&mv.node) {
                    occupied[i] = false;
                }
            }
        }
    }
    slot_of
        .get(&target)
        .map(|&i| vm.checkpoints[i].clone())
        .unwrap_or_else(|| BitString::zeros(vm.width))
}
