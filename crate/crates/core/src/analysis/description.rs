use std::collections::HashSet;
use std::io::Write;

use crate::bits::{bit_width, BitString};
use crate::oracle::{Chain, OracleTape, TapeOracle};
use crate::revsim::{
    apply, put_bits, put_u32, unapply, Context, IrrevMachine, MicroOp, Reader, Trace, VmState,
};

use super::timeline::{Direction, PebbleTimeline};
use super::{query_events, AnalysisError};

/// One node revealed by simulation: node index, signed offset from `tau`
/// to the query that reveals it, and the case tag (1, 2 or 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    pub node: usize,
    pub delta_tau: i64,
    pub tag: u8,
}

/// A description of the chain string `x` built around one machine
/// configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    /// The configuration at `tau`, as a [`VmState`] dump.
    pub snapshot: Vec<u8>,
    pub direction: Direction,
    pub node_width: usize,
    pub t: usize,
    /// The nodes not revealed in `direction`, in chain order.
    pub x_prime: BitString,
    pub triples: Vec<Triple>,
    pub extra_bits: BitString,
}

impl Description {
    pub fn h(&self) -> usize {
        self.triples.len()
    }

    /// Length-prefixed little-endian fields: snapshot, direction, node
    /// width and count, `x'`, triples, extra bits.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_u32(&mut out, self.snapshot.len() as u32);
        out.extend_from_slice(&self.snapshot);
        out.push(match self.direction {
            Direction::Forward => 0,
            Direction::Backward => 1,
        });
        put_u32(&mut out, self.node_width as u32);
        put_u32(&mut out, self.t as u32);
        put_u32(&mut out, self.x_prime.len() as u32);
        put_bits(&mut out, &self.x_prime);
        put_u32(&mut out, self.triples.len() as u32);
        for tr in &self.triples {
            put_u32(&mut out, tr.node as u32);
            out.extend_from_slice(&tr.delta_tau.to_le_bytes());
            out.push(tr.tag);
        }
        put_u32(&mut out, self.extra_bits.len() as u32);
        put_bits(&mut out, &self.extra_bits);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AnalysisError> {
        let bad = |e: crate::revsim::SimError| AnalysisError::Format(e.to_string());
        let mut r = Reader { bytes, pos: 0 };
        let snap_len = r.u32().map_err(bad)? as usize;
        let snapshot = r.take(snap_len).map_err(bad)?.to_vec();
        let direction = match r.take(1).map_err(bad)?[0] {
            0 => Direction::Forward,
            1 => Direction::Backward,
            other => return Err(AnalysisError::Format(format!("direction byte {other}"))),
        };
        let node_width = r.u32().map_err(bad)? as usize;
        let t = r.u32().map_err(bad)? as usize;
        let xp_len = r.u32().map_err(bad)? as usize;
        let x_prime = r.bits(xp_len).map_err(bad)?;
        let h = r.u32().map_err(bad)? as usize;
        let mut triples = Vec::with_capacity(h.min(1 << 16));
        for _ in 0..h {
            let node = r.u32().map_err(bad)? as usize;
            let delta_tau = i64::from_le_bytes(r.take(8).map_err(bad)?.try_into().unwrap());
            let tag = r.take(1).map_err(bad)?[0];
            triples.push(Triple {
                node,
                delta_tau,
                tag,
            });
        }
        let extra_len = r.u32().map_err(bad)? as usize;
        let extra_bits = r.bits(extra_len).map_err(bad)?;
        if r.pos != bytes.len() {
            return Err(AnalysisError::Format("trailing bytes".into()));
        }
        Ok(Self {
            snapshot,
            direction,
            node_width,
            t,
            x_prime,
            triples,
            extra_bits,
        })
    }

    /// Size of each component, both as serialized and in a compact
    /// information-theoretic accounting.
    pub fn sizes(&self) -> Result<SizeReport, AnalysisError> {
        let state = VmState::from_bytes(&self.snapshot)?;
        let h = self.h();
        let max_delta = self
            .triples
            .iter()
            .map(|t| t.delta_tau.unsigned_abs())
            .max()
            .unwrap_or(0);
        let triple_compact = h * (bit_width(self.t as u64) + bit_width(max_delta) + 1 + 2);
        let rows = vec![
            SizeRow::new(
                "snapshot",
                32 + 8 * self.snapshot.len(),
                state.payload_bits(),
            ),
            SizeRow::new("direction", 8, 1),
            SizeRow::new(
                "x_prime",
                32 + 8 * self.x_prime.len().div_ceil(8),
                self.x_prime.len(),
            ),
            SizeRow::new("triples", 32 + h * 104, triple_compact),
            SizeRow::new(
                "extra_bits",
                32 + 8 * self.extra_bits.len().div_ceil(8),
                self.extra_bits.len(),
            ),
        ];
        Ok(SizeReport {
            rows,
            header_bits: 64,
            x_bits: self.t * self.node_width + self.extra_bits.len(),
            h,
            snapshot_payload_bits: state.payload_bits(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeRow {
    pub component: &'static str,
    pub wire_bits: usize,
    pub compact_bits: usize,
}

impl SizeRow {
    fn new(component: &'static str, wire_bits: usize, compact_bits: usize) -> Self {
        Self {
            component,
            wire_bits,
            compact_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub rows: Vec<SizeRow>,
    /// Node width and count fields, present on the wire only.
    pub header_bits: usize,
    /// Length of the described string.
    pub x_bits: usize,
    pub h: usize,
    pub snapshot_payload_bits: usize,
}

impl SizeReport {
    pub fn wire_total(&self) -> usize {
        self.header_bits + self.rows.iter().map(|r| r.wire_bits).sum::<usize>()
    }

    pub fn compact_total(&self) -> usize {
        self.rows.iter().map(|r| r.compact_bits).sum()
    }
}

/// CSV with one row per component, then `total` and `x`.
pub fn write_size_report(report: &SizeReport, out: impl Write) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["component", "wire_bits", "compact_bits"])?;
    for row in &report.rows {
        w.write_record([
            row.component.to_string(),
            row.wire_bits.to_string(),
            row.compact_bits.to_string(),
        ])?;
    }
    w.write_record([
        "total".to_string(),
        report.wire_total().to_string(),
        report.compact_total().to_string(),
    ])?;
    w.write_record([
        "x".to_string(),
        report.x_bits.to_string(),
        report.x_bits.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// The configuration after the trace has run up to clock `tau`.
pub fn state_at(
    ctx: &Context,
    trace: &Trace,
    start: &VmState,
    tau: u64,
) -> Result<VmState, AnalysisError> {
    let len = trace.len() as u64;
    if tau < start.clock || tau - start.clock > len {
        return Err(AnalysisError::TimeOutOfRange {
            tau,
            len: start.clock + len,
        });
    }
    let mut state = start.clone();
    for e in &trace.events[..(tau - start.clock) as usize] {
        apply(ctx, &mut state, e.op)?;
    }
    Ok(state)
}

/// Build the description of `chain` around the configuration at `tau`,
/// revealing the nodes pebbled because of queries in `direction`.
pub fn compress(
    trace: &Trace,
    start: &VmState,
    chain: &Chain,
    tau: u64,
    direction: Direction,
) -> Result<Description, AnalysisError> {
    let oracle = chain.oracle();
    let state = state_at(&Context::with_oracle(&oracle), trace, start, tau)?;
    let timeline = PebbleTimeline::build(&query_events(trace), chain);
    let triples: Vec<Triple> = timeline
        .pebbled_via(tau, direction)
        .into_iter()
        .map(|(node, e, case)| Triple {
            node,
            delta_tau: e as i64 - tau as i64,
            tag: case.tag(),
        })
        .collect();
    let revealed: HashSet<usize> = triples.iter().map(|t| t.node).collect();
    let x_prime = BitString::concat(
        chain
            .nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| !revealed.contains(&(i + 1)))
            .map(|(_, q)| q),
    );
    Ok(Description {
        snapshot: state.to_bytes(),
        direction,
        node_width: chain.node_width,
        t: chain.t(),
        x_prime,
        triples,
        extra_bits: chain.extra_bits.clone(),
    })
}

/// Successors of strings shorter than a node. Empty: a single chain has
/// no shorter nodes.
fn built_in_successor(_b: &BitString) -> Option<BitString> {
    None
}

/// Answers queries from the node values recovered so far.
struct KnownNodes<'a> {
    q: &'a [Option<BitString>],
    width: usize,
}

impl KnownNodes<'_> {
    fn index_of(&self, b: &BitString) -> Option<usize> {
        self.q.iter().position(|v| v.as_ref() == Some(b))
    }
}

impl TapeOracle for KnownNodes<'_> {
    fn call(&self, tape: &OracleTape) -> OracleTape {
        if let Some(b) = tape.as_node() {
            if b.len() < self.width {
                if let Some(c) = built_in_successor(&b) {
                    return OracleTape::pair(&b, &c);
                }
            } else if b.len() == self.width {
                if let Some(c) = self
                    .index_of(&b)
                    .and_then(|j| self.q.get(j + 1))
                    .and_then(|c| c.as_ref())
                {
                    return OracleTape::pair(&b, c);
                }
            }
        } else if let Some((b, c)) = tape.as_pair() {
            let known = if b.len() == self.width {
                self.index_of(&b)
                    .and_then(|j| self.q.get(j + 1))
                    .is_some_and(|next| next.as_ref() == Some(&c))
            } else {
                b.len() < self.width && built_in_successor(&b).as_ref() == Some(&c)
            };
            if known {
                return OracleTape::node(&b);
            }
        }
        tape.clone()
    }
}

fn fail(msg: impl Into<String>) -> AnalysisError {
    AnalysisError::ReconstructionFailure(msg.into())
}

/// Read the node a triple points at off the tape seen at its query.
/// Forward simulation sees the query string; backward simulation sees the
/// answer.
fn read_node(tape: &OracleTape, width: usize, direction: Direction, tag: u8) -> Option<BitString> {
    let single = || tape.as_node().filter(|b| b.len() == width);
    let pair = || tape.as_balanced_pair(width);
    match (direction, tag) {
        (Direction::Forward, 1) | (Direction::Backward, 3) => single(),
        (Direction::Forward, 2) | (Direction::Backward, 2) => pair().map(|(b, _)| b),
        (Direction::Forward, 3) | (Direction::Backward, 1) => pair().map(|(_, c)| c),
        _ => None,
    }
}

/// Rebuild `x` from a description by simulating `program` from the stored
/// configuration. `program[i]` is the micro-op executed at clock `i + 1`.
pub fn decompress(
    d: &Description,
    program: &[MicroOp],
    rule: Option<&IrrevMachine>,
) -> Result<BitString, AnalysisError> {
    let (t, width) = (d.t, d.node_width);
    if width == 0 {
        return Err(fail("node width is zero"));
    }
    let h = d.h();
    if h > t || Some(d.x_prime.len()) != (t - h).checked_mul(width) {
        return Err(fail(format!(
            "x' has {} bits, expected {} nodes of {width}",
            d.x_prime.len(),
            t.saturating_sub(h)
        )));
    }
    let mut seen = HashSet::new();
    for tr in &d.triples {
        let sign_ok = match d.direction {
            Direction::Forward => tr.delta_tau >= 1,
            Direction::Backward => tr.delta_tau <= 0,
        };
        if !(1..=t).contains(&tr.node) || !seen.insert(tr.node) || !sign_ok {
            return Err(fail(format!("bad triple {tr:?}")));
        }
    }

    let mut q: Vec<Option<BitString>> = vec![None; t + 1];
    q[0] = Some(BitString::zeros(width));
    let mut stored = d.x_prime.chunks(width).0.into_iter();
    for (j, slot) in q.iter_mut().enumerate().skip(1) {
        if !seen.contains(&j) {
            *slot = stored.next();
        }
    }

    let mut state = VmState::from_bytes(&d.snapshot).map_err(|e| fail(format!("snapshot: {e}")))?;
    if state.width != width {
        return Err(fail(format!(
            "snapshot width {} differs from node width {width}",
            state.width
        )));
    }
    if h > 0 {
        let tau = state.clock;
        let reach = d
            .triples
            .iter()
            .map(|tr| match d.direction {
                Direction::Forward => tr.delta_tau as u64,
                Direction::Backward => 1 + tr.delta_tau.unsigned_abs(),
            })
            .max()
            .unwrap_or(0);
        for s in 1..=reach {
            let (index, delta) = match d.direction {
                Direction::Forward => (tau.checked_add(s - 1), s as i64),
                Direction::Backward => (tau.checked_sub(s), 1 - s as i64),
            };
            let op = index
                .and_then(|i| program.get(i as usize))
                .copied()
                .ok_or_else(|| fail(format!("program ends before step {s}")))?;
            if op.is_query() {
                for tr in d.triples.iter().filter(|tr| tr.delta_tau == delta) {
                    let b =
                        read_node(&state.tape, width, d.direction, tr.tag).ok_or_else(|| {
                            fail(format!(
                                "tape at offset {delta} does not fit tag {}",
                                tr.tag
                            ))
                        })?;
                    q[tr.node] = Some(b);
                }
            }
            let oracle = KnownNodes { q: &q, width };
            let ctx = Context {
                rule,
                oracle: Some(&oracle),
            };
            let result = match d.direction {
                Direction::Forward => apply(&ctx, &mut state, op),
                Direction::Backward => unapply(&ctx, &mut state, op),
            };
            result.map_err(|e| fail(format!("simulation step {s}: {e}")))?;
        }
    }

    let mut x = BitString::new();
    for (j, v) in q.iter().enumerate().skip(1) {
        x.extend_from(
            v.as_ref()
                .ok_or_else(|| fail(format!("node {j} never recovered")))?,
        );
    }
    x.extend_from(&d.extra_bits);
    Ok(x)
}

/// Number of pebbled nodes and working storage at one time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpacePoint {
    pub tau: u64,
    pub pebbled: usize,
    pub payload_bits: usize,
}

/// Pebbled-node count against machine storage at every time of the trace.
pub fn space_profile(
    trace: &Trace,
    start: &VmState,
    chain: &Chain,
) -> Result<Vec<SpacePoint>, AnalysisError> {
    let oracle = chain.oracle();
    let ctx = Context::with_oracle(&oracle);
    let timeline = PebbleTimeline::build(&query_events(trace), chain);
    let mut state = start.clone();
    let point = |state: &VmState| SpacePoint {
        tau: state.clock,
        pebbled: timeline.pebbled(state.clock).len(),
        payload_bits: state.payload_bits(),
    };
    let mut out = vec![point(&state)];
    for e in &trace.events {
        apply(&ctx, &mut state, e.op)?;
        out.push(point(&state));
    }
    Ok(out)
}
