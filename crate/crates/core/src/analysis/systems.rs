use crate::bits::{bit_width, BitString};
use crate::revsim::{IrrevMachine, MicroOp, VmState};

use super::description::{decompress, Description, Triple};
use super::timeline::Direction;
use super::AnalysisError;

/// Longest target length `find_incompressible` will enumerate.
pub const MAX_SEARCH_LENGTH: usize = 24;

/// A total function from descriptions to the strings they describe.
///
/// `try_expand` returns `None` for strings that are not well-formed
/// descriptions; `expand` then falls back to the identity.
pub trait DescriptionSystem {
    fn try_expand(&self, d: &BitString) -> Option<BitString>;

    fn expand(&self, d: &BitString) -> BitString {
        self.try_expand(d).unwrap_or_else(|| d.clone())
    }
}

impl<F: Fn(&BitString) -> BitString> DescriptionSystem for F {
    fn try_expand(&self, d: &BitString) -> Option<BitString> {
        Some(self(d))
    }
}

struct Cursor<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bits: &'a BitString) -> Self {
        Self { bits, pos: 0 }
    }

    fn take(&mut self, width: usize) -> Option<u64> {
        let end = self
            .pos
            .checked_add(width)
            .filter(|&e| e <= self.bits.len())?;
        let v = self.bits.slice(self.pos, end).to_u64().ok()?;
        self.pos = end;
        Some(v)
    }

    fn rest(&self) -> BitString {
        self.bits.slice(self.pos, self.bits.len())
    }
}

fn index_width(t: usize) -> usize {
    bit_width(t.saturating_sub(1) as u64)
}

/// Insert `node` so that it becomes node number `k` (1-based) of `x`.
fn splice_in(x: &BitString, width: usize, k: usize, node: &BitString) -> Option<BitString> {
    let at = (k - 1).checked_mul(width).filter(|&a| a <= x.len())?;
    let mut out = x.slice(0, at);
    out.extend_from(node);
    out.extend_from(&x.slice(at, x.len()));
    Some(out)
}

/// Descriptions `(j, k, x')` of strings whose nodes `j < k` are equal:
/// `x'` is the string with node `k` removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuplicateSplice {
    pub node_width: usize,
    pub t: usize,
}

impl DuplicateSplice {
    pub fn encode(&self, j: usize, k: usize, x_prime: &BitString) -> BitString {
        let w = index_width(self.t);
        let mut d = BitString::from_u64((j - 1) as u64, w);
        d.extend_from(&BitString::from_u64((k - 1) as u64, w));
        d.extend_from(x_prime);
        d
    }
}

impl DescriptionSystem for DuplicateSplice {
    fn try_expand(&self, d: &BitString) -> Option<BitString> {
        let w = index_width(self.t);
        let mut c = Cursor::new(d);
        let j = c.take(w)? as usize + 1;
        let k = c.take(w)? as usize + 1;
        if j >= k || k > self.t || self.node_width == 0 {
            return None;
        }
        let x_prime = c.rest();
        let end = j * self.node_width;
        if end > x_prime.len() {
            return None;
        }
        let q_j = x_prime.slice(end - self.node_width, end);
        splice_in(&x_prime, self.node_width, k, &q_j)
    }
}

/// Descriptions `(j, x')` of strings whose node `j` is all zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCollision {
    pub node_width: usize,
    pub t: usize,
}

impl ZeroCollision {
    pub fn encode(&self, j: usize, x_prime: &BitString) -> BitString {
        let mut d = BitString::from_u64((j - 1) as u64, index_width(self.t));
        d.extend_from(x_prime);
        d
    }
}

impl DescriptionSystem for ZeroCollision {
    fn try_expand(&self, d: &BitString) -> Option<BitString> {
        let mut c = Cursor::new(d);
        let j = c.take(index_width(self.t))? as usize + 1;
        if j > self.t {
            return None;
        }
        splice_in(
            &c.rest(),
            self.node_width,
            j,
            &BitString::zeros(self.node_width),
        )
    }
}

fn bytes_to_bits(bytes: &[u8]) -> BitString {
    BitString::from_bits(
        bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| b >> i & 1 == 1))
            .collect(),
    )
}

fn bits_to_bytes(bits: &BitString) -> Option<Vec<u8>> {
    if !bits.len().is_multiple_of(8) {
        return None;
    }
    Some(
        bits.bits()
            .chunks(8)
            .map(|c| c.iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
            .collect(),
    )
}

/// Serialized [`Description`]s, expanded by re-simulating a fixed program.
#[derive(Debug, Clone)]
pub struct TraceSystem {
    pub program: Vec<MicroOp>,
    pub rule: Option<IrrevMachine>,
}

impl TraceSystem {
    pub fn encode(d: &Description) -> BitString {
        bytes_to_bits(&d.to_bytes())
    }
}

impl DescriptionSystem for TraceSystem {
    fn try_expand(&self, d: &BitString) -> Option<BitString> {
        let desc = Description::from_bytes(&bits_to_bytes(d)?).ok()?;
        decompress(&desc, &self.program, self.rule.as_ref()).ok()
    }
}

/// Descriptions `(j, delta_tau, tag, x')` of a node revealed by simulating
/// the program forward from its known start state; `x'` is the string
/// with node `j` removed.
#[derive(Debug, Clone)]
pub struct InitialPebble {
    pub program: Vec<MicroOp>,
    pub rule: Option<IrrevMachine>,
    pub node_width: usize,
    pub t: usize,
    start_bytes: Vec<u8>,
}

impl InitialPebble {
    pub fn new(program: Vec<MicroOp>, start: &VmState, node_width: usize, t: usize) -> Self {
        Self {
            program,
            rule: None,
            node_width,
            t,
            start_bytes: start.to_bytes(),
        }
    }

    fn delta_width(&self) -> usize {
        bit_width(self.program.len() as u64)
    }

    pub fn encode(&self, j: usize, delta_tau: u64, tag: u8, x_prime: &BitString) -> BitString {
        let mut d = BitString::from_u64((j - 1) as u64, index_width(self.t));
        d.extend_from(&BitString::from_u64(delta_tau, self.delta_width()));
        d.extend_from(&BitString::from_u64(tag as u64, 2));
        d.extend_from(x_prime);
        d
    }
}

impl DescriptionSystem for InitialPebble {
    fn try_expand(&self, d: &BitString) -> Option<BitString> {
        let mut c = Cursor::new(d);
        let j = c.take(index_width(self.t))? as usize + 1;
        let delta_tau = c.take(self.delta_width())? as i64;
        let tag = c.take(2)? as u8;
        let rest = c.rest();
        let node_bits = (self.t - 1) * self.node_width;
        if j > self.t || delta_tau < 1 || rest.len() < node_bits {
            return None;
        }
        let desc = Description {
            snapshot: self.start_bytes.clone(),
            direction: Direction::Forward,
            node_width: self.node_width,
            t: self.t,
            x_prime: rest.slice(0, node_bits),
            triples: vec![Triple {
                node: j,
                delta_tau,
                tag,
            }],
            extra_bits: rest.slice(node_bits, rest.len()),
        };
        decompress(&desc, &self.program, self.rule.as_ref()).ok()
    }
}

/// The four formats behind a two-bit prefix: `00` duplicate splice, `01`
/// zero collision, `10` trace-based, `11` initial pebble.
pub struct ChainSystem {
    pub duplicate: DuplicateSplice,
    pub zero: ZeroCollision,
    pub trace: TraceSystem,
    pub initial: InitialPebble,
}

impl ChainSystem {
    pub fn tagged(tag: u8, body: &BitString) -> BitString {
        let mut d = BitString::from_u64(tag as u64, 2);
        d.extend_from(body);
        d
    }
}

impl DescriptionSystem for ChainSystem {
    fn try_expand(&self, d: &BitString) -> Option<BitString> {
        let tag = Cursor::new(d).take(2)?;
        let body = d.slice(2, d.len());
        match tag {
            0 => self.duplicate.try_expand(&body),
            1 => self.zero.try_expand(&body),
            2 => self.trace.try_expand(&body),
            _ => self.initial.try_expand(&body),
        }
    }
}

/// The numerically least string of length `len` that no description
/// shorter than `len` expands to. One always exists: there are `2^len`
/// candidates but only `2^len - 1` shorter descriptions.
pub fn find_incompressible(
    sys: &dyn DescriptionSystem,
    len: usize,
) -> Result<BitString, AnalysisError> {
    if len > MAX_SEARCH_LENGTH {
        return Err(AnalysisError::SearchTooLarge(len));
    }
    let mut described = vec![false; 1 << len];
    for dlen in 0..len {
        for v in 0..1u64 << dlen {
            let y = sys.expand(&BitString::from_u64(v, dlen));
            if y.len() == len {
                described[y.to_u64().expect("len <= 24") as usize] = true;
            }
        }
    }
    let v = described
        .iter()
        .position(|&d| !d)
        .expect("fewer descriptions than strings");
    Ok(BitString::from_u64(v as u64, len))
}

/// The first pair of equal nodes `j < k` in `x`, and `x` with node `k`
/// removed.
pub fn describe_duplicate(
    x: &BitString,
    node_width: usize,
) -> Result<(usize, usize, BitString), AnalysisError> {
    if node_width == 0 {
        return Err(AnalysisError::Format("node width must be positive".into()));
    }
    let (nodes, _) = x.chunks(node_width);
    for j in 0..nodes.len() {
        for k in j + 1..nodes.len() {
            if nodes[j] == nodes[k] {
                let mut x_prime = x.slice(0, k * node_width);
                x_prime.extend_from(&x.slice((k + 1) * node_width, x.len()));
                return Ok((j + 1, k + 1, x_prime));
            }
        }
    }
    Err(AnalysisError::NoDuplicate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn empty_system() {
        let sys = |_: &BitString| BitString::new();
        assert_eq!(find_incompressible(&sys, 1).unwrap(), bs("0"));
    }

    #[test]
    fn identity_system() {
        let sys = |d: &BitString| d.clone();
        assert_eq!(find_incompressible(&sys, 2).unwrap(), bs("00"));
        assert_eq!(find_incompressible(&sys, 0).unwrap(), BitString::new());
    }

    #[test]
    fn duplicate_of_identical_halves() {
        let (j, k, xp) = describe_duplicate(&bs("0101"), 2).unwrap();
        assert_eq!((j, k, xp.clone()), (1, 2, bs("01")));
        let sys = DuplicateSplice {
            node_width: 2,
            t: 2,
        };
        assert_eq!(sys.expand(&sys.encode(j, k, &xp)), bs("0101"));
        assert!(matches!(
            describe_duplicate(&bs("000110"), 2),
            Err(AnalysisError::NoDuplicate)
        ));
    }

    #[test]
    fn duplicate_system_least_incompressible() {
        // Oracle: enumerate every shorter description directly.
        let sys = DuplicateSplice {
            node_width: 3,
            t: 2,
        };
        let mut image = std::collections::HashSet::new();
        for len in 0..6 {
            for v in 0..1u64 << len {
                let y = sys.expand(&BitString::from_u64(v, len));
                if y.len() == 6 {
                    image.insert(y);
                }
            }
        }
        let y = find_incompressible(&sys, 6).unwrap();
        assert!(!image.contains(&y));
        assert_ne!(y.slice(0, 3), y.slice(3, 6));
        assert_eq!(y, bs("000001"));
    }

    #[test]
    fn zero_collision_round_trip() {
        let sys = ZeroCollision {
            node_width: 3,
            t: 3,
        };
        let d = sys.encode(2, &bs("101110"));
        assert_eq!(sys.expand(&d), bs("101000110"));
        // Index 4 of 3 nodes is malformed and falls back to the identity.
        let bad = sys.encode(4, &bs("101"));
        assert_eq!(sys.expand(&bad), bad);
    }

    #[test]
    fn invalid_duplicate_falls_back() {
        let sys = DuplicateSplice {
            node_width: 2,
            t: 4,
        };
        // j == k
        let d = bs("0101");
        assert_eq!(sys.expand(&d), d);
    }
}
