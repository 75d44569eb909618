//! Register-level reversible machine.
//!
//! Every micro-op has an inverse micro-op; most are their own inverse.
//! Checkpoint copies are XORs, so copying into a clear slot and uncopying
//! from a slot holding the same value are literally the same operation.

use std::fmt;

use crate::bits::BitString;
use crate::oracle::{OracleTape, TapeOracle};

use super::machine::IrrevMachine;
use super::SimError;

/// A source register for `Load`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// The read-only initial configuration.
    Origin,
    Checkpoint(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MicroOp {
    /// `current ^= slot`
    Load(Slot),
    /// `checkpoint[i] ^= current`
    Copy(usize),
    /// Mark a clear slot as in use.
    Claim(usize),
    /// Mark a cleared slot as free again.
    Release(usize),
    /// One forward step of the irreversible rule, saving the old
    /// configuration on the history stack.
    Step,
    Unstep,
    /// Move `current` onto the history stack, leaving zero behind.
    Push,
    Pop,
    /// `tape ^= current` (empty <-> current).
    TapeWrite,
    /// `tape ^= top#current` (empty <-> pair).
    TapeJoin,
    /// `current ^= successor half of the pair on the tape`.
    TakeSucc,
    OracleCall,
}

impl MicroOp {
    pub fn inverse(self) -> MicroOp {
        match self {
            MicroOp::Claim(i) => MicroOp::Release(i),
            MicroOp::Release(i) => MicroOp::Claim(i),
            MicroOp::Step => MicroOp::Unstep,
            MicroOp::Unstep => MicroOp::Step,
            MicroOp::Push => MicroOp::Pop,
            MicroOp::Pop => MicroOp::Push,
            other => other,
        }
    }

    pub fn is_query(self) -> bool {
        self == MicroOp::OracleCall
    }
}

impl fmt::Display for MicroOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MicroOp::Load(Slot::Origin) => f.write_str("load:origin"),
            MicroOp::Load(Slot::Checkpoint(i)) => write!(f, "load:{i}"),
            MicroOp::Copy(i) => write!(f, "copy:{i}"),
            MicroOp::Claim(i) => write!(f, "claim:{i}"),
            MicroOp::Release(i) => write!(f, "release:{i}"),
            MicroOp::Step => f.write_str("step"),
            MicroOp::Unstep => f.write_str("unstep"),
            MicroOp::Push => f.write_str("push"),
            MicroOp::Pop => f.write_str("pop"),
            MicroOp::TapeWrite => f.write_str("tape-write"),
            MicroOp::TapeJoin => f.write_str("tape-join"),
            MicroOp::TakeSucc => f.write_str("take-succ"),
            MicroOp::OracleCall => f.write_str("oracle"),
        }
    }
}

impl std::str::FromStr for MicroOp {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SimError::NonInvertibleEvent(s.to_string());
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let index =
            || -> Result<usize, SimError> { arg.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let op = match kind {
            "load" if arg == Some("origin") => MicroOp::Load(Slot::Origin),
            "load" => MicroOp::Load(Slot::Checkpoint(index()?)),
            "copy" => MicroOp::Copy(index()?),
            "claim" => MicroOp::Claim(index()?),
            "release" => MicroOp::Release(index()?),
            _ if arg.is_some() => return Err(bad()),
            "step" => MicroOp::Step,
            "unstep" => MicroOp::Unstep,
            "push" => MicroOp::Push,
            "pop" => MicroOp::Pop,
            "tape-write" => MicroOp::TapeWrite,
            "tape-join" => MicroOp::TapeJoin,
            "take-succ" => MicroOp::TakeSucc,
            "oracle" => MicroOp::OracleCall,
            _ => return Err(bad()),
        };
        Ok(op)
    }
}

/// Full machine configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VmState {
    pub width: usize,
    pub origin: BitString,
    pub current: BitString,
    pub history: Vec<BitString>,
    pub checkpoints: Vec<BitString>,
    pub occupied: Vec<bool>,
    pub tape: OracleTape,
    pub clock: u64,
}

impl VmState {
    pub fn new(origin: BitString, capacity: usize) -> Self {
        let width = origin.len();
        Self {
            width,
            origin,
            current: BitString::zeros(width),
            history: Vec::new(),
            checkpoints: vec![BitString::zeros(width); capacity],
            occupied: vec![false; capacity],
            tape: OracleTape::empty(),
            clock: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Clean between moves: no history, empty tape, zero work register.
    pub fn is_clean(&self) -> bool {
        self.history.is_empty() && self.tape.is_empty() && self.current.is_zero()
    }

    /// Bits of working storage in use, excluding the read-only origin:
    /// the work register, the history stack, occupied checkpoints and tape.
    pub fn payload_bits(&self) -> usize {
        self.width * (1 + self.history.len() + self.occupied_count()) + self.tape.len()
    }

    fn slot(&self, slot: Slot) -> Result<&BitString, SimError> {
        match slot {
            Slot::Origin => Ok(&self.origin),
            Slot::Checkpoint(i) => self.checkpoints.get(i).ok_or(SimError::SlotOutOfRange {
                slot: i,
                capacity: self.capacity(),
            }),
        }
    }

    fn check_slot(&self, i: usize) -> Result<(), SimError> {
        if i >= self.capacity() {
            return Err(SimError::SlotOutOfRange {
                slot: i,
                capacity: self.capacity(),
            });
        }
        Ok(())
    }

    /// Binary dump: little-endian length-prefixed fields, bits packed
    /// MSB-first into bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_u32(&mut out, self.width as u32);
        out.extend_from_slice(&self.clock.to_le_bytes());
        put_bits(&mut out, &self.origin);
        put_bits(&mut out, &self.current);
        put_u32(&mut out, self.history.len() as u32);
        for h in &self.history {
            put_bits(&mut out, h);
        }
        put_u32(&mut out, self.capacity() as u32);
        for (c, &occ) in self.checkpoints.iter().zip(&self.occupied) {
            out.push(occ as u8);
            put_bits(&mut out, c);
        }
        put_u32(&mut out, self.tape.len() as u32);
        out.extend_from_slice(self.tape.as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SimError> {
        let mut r = Reader { bytes, pos: 0 };
        let width = r.u32()? as usize;
        let clock = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let origin = r.bits(width)?;
        let current = r.bits(width)?;
        let depth = r.u32()? as usize;
        let history = (0..depth)
            .map(|_| r.bits(width))
            .collect::<Result<_, _>>()?;
        let capacity = r.u32()? as usize;
        let mut checkpoints = Vec::with_capacity(capacity.min(1 << 16));
        let mut occupied = Vec::with_capacity(capacity.min(1 << 16));
        for _ in 0..capacity {
            occupied.push(r.take(1)?[0] != 0);
            checkpoints.push(r.bits(width)?);
        }
        let tape_len = r.u32()? as usize;
        let tape = OracleTape::from_symbols(r.take(tape_len)?.to_vec())
            .map_err(|e| SimError::Decode(e.to_string()))?;
        if r.pos != bytes.len() {
            return Err(SimError::Decode("trailing bytes".into()));
        }
        Ok(Self {
            width,
            origin,
            current,
            history,
            checkpoints,
            occupied,
            tape,
            clock,
        })
    }
}

pub(crate) fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

pub(crate) fn put_bits(out: &mut Vec<u8>, b: &BitString) {
    for chunk in b.bits().chunks(8) {
        let mut byte = 0u8;
        for (i, &bit) in chunk.iter().enumerate() {
            byte |= (bit as u8) << (7 - i);
        }
        out.push(byte);
    }
}

pub(crate) struct Reader<'a> {
    pub bytes: &'a [u8],
    pub pos: usize,
}

impl<'a> Reader<'a> {
    pub fn take(&mut self, n: usize) -> Result<&'a [u8], SimError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| SimError::Decode("unexpected end of input".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u32(&mut self) -> Result<u32, SimError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn bits(&mut self, width: usize) -> Result<BitString, SimError> {
        let raw = self.take(width.div_ceil(8))?;
        Ok(BitString::from_bits(
            (0..width)
                .map(|i| raw[i / 8] >> (7 - i % 8) & 1 == 1)
                .collect(),
        ))
    }
}

/// What the machine may consult while executing: a step rule for
/// `Step`/`Unstep` and an oracle for `OracleCall`.
#[derive(Clone, Copy, Default)]
pub struct Context<'a> {
    pub rule: Option<&'a IrrevMachine>,
    pub oracle: Option<&'a dyn TapeOracle>,
}

impl<'a> Context<'a> {
    pub fn with_rule(rule: &'a IrrevMachine) -> Self {
        Self {
            rule: Some(rule),
            oracle: None,
        }
    }

    pub fn with_oracle(oracle: &'a dyn TapeOracle) -> Self {
        Self {
            rule: None,
            oracle: Some(oracle),
        }
    }
}

/// Tape contents around an oracle call.
pub type TapeChange = (OracleTape, OracleTape);

/// Execute `op` forward, advancing the clock.
pub fn apply(
    ctx: &Context,
    state: &mut VmState,
    op: MicroOp,
) -> Result<Option<TapeChange>, SimError> {
    let change = exec(ctx, state, op)?;
    state.clock += 1;
    Ok(change)
}

/// Undo `op`, rewinding the clock. Returns the tape change as seen in
/// forward time (before, after).
pub fn unapply(
    ctx: &Context,
    state: &mut VmState,
    op: MicroOp,
) -> Result<Option<TapeChange>, SimError> {
    let change = exec(ctx, state, op.inverse())?;
    state.clock = state
        .clock
        .checked_sub(1)
        .ok_or_else(|| SimError::ReplayMismatch("clock underflow".into()))?;
    Ok(change.map(|(after, before)| (before, after)))
}

fn exec(ctx: &Context, st: &mut VmState, op: MicroOp) -> Result<Option<TapeChange>, SimError> {
    match op {
        MicroOp::Load(slot) => {
            let v = st.slot(slot)?.clone();
            st.current.xor_assign(&v);
        }
        MicroOp::Copy(i) => {
            st.check_slot(i)?;
            let cur = st.current.clone();
            st.checkpoints[i].xor_assign(&cur);
        }
        MicroOp::Claim(i) => {
            st.check_slot(i)?;
            if st.occupied[i] || !st.checkpoints[i].is_zero() {
                return Err(SimError::SlotState { slot: i, op });
            }
            st.occupied[i] = true;
        }
        MicroOp::Release(i) => {
            st.check_slot(i)?;
            if !st.occupied[i] || !st.checkpoints[i].is_zero() {
                return Err(SimError::SlotState { slot: i, op });
            }
            st.occupied[i] = false;
        }
        MicroOp::Step => {
            let rule = ctx.rule.ok_or(SimError::MissingRule)?;
            let next = rule.step(&st.current);
            let prev = std::mem::replace(&mut st.current, next);
            st.history.push(prev);
        }
        MicroOp::Unstep => {
            let rule = ctx.rule.ok_or(SimError::MissingRule)?;
            let top = st
                .history
                .last()
                .ok_or_else(|| SimError::CorruptHistory("history is empty".into()))?;
            if rule.step(top) != st.current {
                return Err(SimError::CorruptHistory(format!(
                    "record {} does not step to {}",
                    top.to_hex(),
                    st.current.to_hex()
                )));
            }
            st.current = st.history.pop().unwrap();
        }
        MicroOp::Push => {
            let zero = BitString::zeros(st.width);
            let prev = std::mem::replace(&mut st.current, zero);
            st.history.push(prev);
        }
        MicroOp::Pop => {
            if !st.current.is_zero() {
                return Err(SimError::CorruptHistory(
                    "pop into a nonzero register".into(),
                ));
            }
            st.current = st
                .history
                .pop()
                .ok_or_else(|| SimError::CorruptHistory("history is empty".into()))?;
        }
        MicroOp::TapeWrite => {
            let node = OracleTape::node(&st.current);
            st.tape = toggle(&st.tape, node, op, st.clock)?;
        }
        MicroOp::TapeJoin => {
            let top = st
                .history
                .last()
                .ok_or_else(|| SimError::CorruptHistory("history is empty".into()))?;
            let pair = OracleTape::pair(top, &st.current);
            st.tape = toggle(&st.tape, pair, op, st.clock)?;
        }
        MicroOp::TakeSucc => {
            let (_, succ) = st
                .tape
                .as_balanced_pair(st.width)
                .ok_or(SimError::TapeMismatch {
                    op,
                    clock: st.clock,
                })?;
            st.current.xor_assign(&succ);
        }
        MicroOp::OracleCall => {
            let oracle = ctx.oracle.ok_or(SimError::MissingOracle)?;
            let before = st.tape.clone();
            st.tape = oracle.call(&before);
            return Ok(Some((before, st.tape.clone())));
        }
    }
    Ok(None)
}

fn toggle(
    tape: &OracleTape,
    value: OracleTape,
    op: MicroOp,
    clock: u64,
) -> Result<OracleTape, SimError> {
    if tape.is_empty() {
        Ok(value)
    } else if *tape == value {
        Ok(OracleTape::empty())
    } else {
        Err(SimError::TapeMismatch { op, clock })
    }
}

/// The Bennett trick in isolation: XOR the work register into `slot`.
pub fn bennett_checkpoint_copy(vm: &VmState, slot: usize) -> Result<VmState, SimError> {
    let mut next = vm.clone();
    exec(&Context::default(), &mut next, MicroOp::Copy(slot))?;
    Ok(next)
}
