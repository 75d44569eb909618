use crate::bits::BitString;
use crate::oracle::OracleTape;

use super::vm::{apply, unapply, Context, MicroOp, TapeChange, VmState};
use super::SimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// Clock value after the op ran (first op is 1).
    pub clock: u64,
    pub op: MicroOp,
    /// Tape before and after, for oracle calls.
    pub tapes: Option<TapeChange>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub width: usize,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            events: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = MicroOp> + '_ {
        self.events.iter().map(|e| e.op)
    }

    pub fn query_count(&self) -> usize {
        self.events.iter().filter(|e| e.op.is_query()).count()
    }

    /// Header `width=<S>`, then `<clock> <op-kind> [<tape-before> <tape-after>]`
    /// per event. Tapes are `-` when empty, hex for a node, `hex#hex` for a
    /// pair, and `raw:<symbols>` for anything else.
    pub fn to_text(&self) -> String {
        let mut out = format!("width={}\n", self.width);
        for e in &self.events {
            out.push_str(&format!("{} {}", e.clock, e.op));
            if let Some((before, after)) = &e.tapes {
                out.push_str(&format!(
                    " {} {}",
                    encode_tape(before, self.width),
                    encode_tape(after, self.width)
                ));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, SimError> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, msg: &str| SimError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (_, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
        let width: usize = header
            .strip_prefix("width=")
            .and_then(|w| w.trim().parse().ok())
            .ok_or_else(|| parse_err(0, "expected `width=<bits>`"))?;
        let mut trace = Trace::new(width);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let clock = fields[0].parse().map_err(|_| parse_err(i, "bad clock"))?;
            let op: MicroOp = fields
                .get(1)
                .ok_or_else(|| parse_err(i, "missing op kind"))?
                .parse()?;
            let tapes = match (op.is_query(), fields.len()) {
                (true, 4) => Some((
                    decode_tape(fields[2], width).map_err(|m| parse_err(i, &m))?,
                    decode_tape(fields[3], width).map_err(|m| parse_err(i, &m))?,
                )),
                (false, 2) => None,
                _ => return Err(parse_err(i, "wrong number of fields")),
            };
            trace.events.push(Event { clock, op, tapes });
        }
        Ok(trace)
    }
}

fn encode_tape(tape: &OracleTape, width: usize) -> String {
    if tape.is_empty() {
        return "-".into();
    }
    if let Some(b) = tape.as_node().filter(|b| b.len() == width) {
        return b.to_hex();
    }
    if let Some((b, c)) = tape.as_balanced_pair(width) {
        return format!("{}#{}", b.to_hex(), c.to_hex());
    }
    format!("raw:{tape}")
}

fn decode_tape(s: &str, width: usize) -> Result<OracleTape, String> {
    if s == "-" {
        return Ok(OracleTape::empty());
    }
    if let Some(raw) = s.strip_prefix("raw:") {
        return raw
            .parse()
            .map_err(|e: crate::oracle::OracleError| e.to_string());
    }
    let hex = |h: &str| BitString::from_hex(h, width).map_err(|e| e.to_string());
    match s.split_once('#') {
        Some((b, c)) => Ok(OracleTape::pair(&hex(b)?, &hex(c)?)),
        None => Ok(OracleTape::node(&hex(s)?)),
    }
}

/// Run `trace` forward from `start`, checking clocks and recorded tapes.
pub fn replay_forward(ctx: &Context, trace: &Trace, start: &VmState) -> Result<VmState, SimError> {
    let mut state = start.clone();
    for e in &trace.events {
        let change = apply(ctx, &mut state, e.op)?;
        if state.clock != e.clock || change != e.tapes {
            return Err(SimError::ReplayMismatch(format!(
                "forward at clock {}",
                e.clock
            )));
        }
    }
    Ok(state)
}

/// Undo `trace` from `end_state`, applying inverse ops newest first.
pub fn replay_backward(
    ctx: &Context,
    trace: &Trace,
    end_state: &VmState,
) -> Result<VmState, SimError> {
    let mut state = end_state.clone();
    for e in trace.events.iter().rev() {
        if state.clock != e.clock {
            return Err(SimError::ReplayMismatch(format!(
                "state clock {} but event clock {}",
                state.clock, e.clock
            )));
        }
        let change = unapply(ctx, &mut state, e.op)?;
        if change != e.tapes {
            return Err(SimError::ReplayMismatch(format!(
                "tape at clock {}",
                e.clock
            )));
        }
    }
    Ok(state)
}
