use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;

use super::tape::{OracleTape, TapeOracle};
use super::OracleError;

/// Self-reversible oracle embodying an outdegree-1 graph with successor
/// function `f`: `b <-> b#f(b)` wherever `f(b)` is defined, identity on
/// every other tape.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphOracle {
    successor: HashMap<BitString, BitString>,
}

impl GraphOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: impl IntoIterator<Item = (BitString, BitString)>) -> Self {
        Self {
            successor: edges.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, from: BitString, to: BitString) {
        self.successor.insert(from, to);
    }

    pub fn successor(&self, b: &BitString) -> Option<&BitString> {
        self.successor.get(b)
    }

    pub fn edge_count(&self) -> usize {
        self.successor.len()
    }
}

impl TapeOracle for GraphOracle {
    fn call(&self, tape: &OracleTape) -> OracleTape {
        if let Some(b) = tape.as_node() {
            return match self.successor.get(&b) {
                Some(c) => OracleTape::pair(&b, c),
                None => tape.clone(),
            };
        }
        if let Some((b, c)) = tape.as_pair() {
            if self.successor.get(&b) == Some(&c) {
                return OracleTape::node(&b);
            }
        }
        tape.clone()
    }
}

pub fn oracle_call(o: &impl TapeOracle, tape: &OracleTape) -> OracleTape {
    o.call(tape)
}

/// The chain `q_0 = 0^S, q_1, ..., q_t` of node identifiers, plus any
/// leftover bits of the string the nodes were cut from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub node_width: usize,
    /// `q_1..q_t`; `q_0` is implicit.
    pub nodes: Vec<BitString>,
    pub seed: u64,
    pub extra_bits: BitString,
}

impl Chain {
    pub fn new(node_width: usize, nodes: Vec<BitString>) -> Result<Self, OracleError> {
        let chain = Self {
            node_width,
            nodes,
            seed: 0,
            extra_bits: BitString::new(),
        };
        chain.validate()?;
        Ok(chain)
    }

    /// Cut `x` into `floor(|x|/S)` nodes; the remainder becomes the extra bits.
    pub fn from_bits(x: &BitString, node_width: usize) -> Result<Self, OracleError> {
        if node_width == 0 {
            return Err(OracleError::ZeroWidth);
        }
        let (nodes, extra_bits) = x.chunks(node_width);
        let chain = Self {
            node_width,
            nodes,
            seed: 0,
            extra_bits,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn t(&self) -> usize {
        self.nodes.len()
    }

    pub fn start(&self) -> BitString {
        BitString::zeros(self.node_width)
    }

    /// `q_j` for `0 <= j <= t`.
    pub fn node(&self, j: usize) -> BitString {
        if j == 0 {
            self.start()
        } else {
            self.nodes[j - 1].clone()
        }
    }

    pub fn last(&self) -> BitString {
        self.node(self.t())
    }

    /// The full string `x = q_1 ... q_t ++ extra`.
    pub fn to_bits(&self) -> BitString {
        let mut x = BitString::concat(&self.nodes);
        x.extend_from(&self.extra_bits);
        x
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.node_width == 0 {
            return Err(OracleError::ZeroWidth);
        }
        let mut seen = HashSet::from([self.start()]);
        for (i, q) in self.nodes.iter().enumerate() {
            if q.len() != self.node_width {
                return Err(OracleError::NodeWidth {
                    index: i + 1,
                    expected: self.node_width,
                    got: q.len(),
                });
            }
            if !seen.insert(q.clone()) {
                return Err(OracleError::RepeatedNode(i + 1));
            }
        }
        Ok(())
    }

    /// `f(q_{j-1}) = q_j` for `1 <= j <= t`.
    pub fn oracle(&self) -> GraphOracle {
        GraphOracle::from_edges((1..=self.t()).map(|j| (self.node(j - 1), self.node(j))))
    }

    /// Header `S=<bits> t=<len> seed=<u64>`, then one hex node per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("S={} t={} seed={}\n", self.node_width, self.t(), self.seed);
        for q in &self.nodes {
            out.push_str(&q.to_hex());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, OracleError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or(OracleError::Format("missing header".into()))?;
        let fields = parse_header(header, &["S", "t", "seed"])?;
        let (width, t, seed) = (fields[0] as usize, fields[1] as usize, fields[2]);
        let nodes = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| BitString::from_hex(l.trim(), width).map_err(OracleError::from))
            .collect::<Result<Vec<_>, _>>()?;
        if nodes.len() != t {
            return Err(OracleError::Format(format!(
                "header declares t={t} but {} nodes follow",
                nodes.len()
            )));
        }
        let mut chain = Self::new(width, nodes)?;
        chain.seed = seed;
        Ok(chain)
    }
}

/// Parses `key=value` tokens in the given order.
pub(crate) fn parse_header(line: &str, keys: &[&str]) -> Result<Vec<u64>, OracleError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != keys.len() {
        return Err(OracleError::Format(format!("bad header {line:?}")));
    }
    tokens
        .iter()
        .zip(keys)
        .map(|(tok, key)| {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| OracleError::Format(format!("bad header token {tok:?}")))?;
            if k != *key {
                return Err(OracleError::Format(format!(
                    "expected key {key}, found {k}"
                )));
            }
            v.parse()
                .map_err(|_| OracleError::Format(format!("bad value for {key}: {v:?}")))
        })
        .collect()
}

/// Draws `q_1..q_t` from a seeded generator, resampling until every node is
/// distinct from the others and from `0^S`.
pub fn build_chain_oracle(
    width: usize,
    t: usize,
    seed: u64,
) -> Result<(GraphOracle, Chain), OracleError> {
    if width == 0 {
        return Err(OracleError::ZeroWidth);
    }
    if width > 64 {
        return Err(OracleError::WidthTooLarge(width));
    }
    if width < 64 && (t as u128) + 1 > (1u128 << width) {
        return Err(OracleError::Infeasible { width, t });
    }
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::from([0u64]);
    let mut nodes = Vec::with_capacity(t);
    while nodes.len() < t {
        let v = rng.gen::<u64>() & mask;
        if seen.insert(v) {
            nodes.push(BitString::from_u64(v, width));
        }
    }
    let chain = Chain {
        node_width: width,
        nodes,
        seed,
        extra_bits: BitString::new(),
    };
    Ok((chain.oracle(), chain))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn graph_oracle_cases() {
        // a -> c, c -> d; d has no successor.
        let (a, c, d) = (bs("00"), bs("01"), bs("10"));
        let o = GraphOracle::from_edges([(a.clone(), c.clone()), (c.clone(), d.clone())]);
        let t_a = OracleTape::node(&a);
        let t_ac = OracleTape::pair(&a, &c);
        assert_eq!(o.call(&t_a), t_ac);
        assert_eq!(o.call(&t_ac), t_a);
        assert_eq!(o.call(&OracleTape::node(&d)), OracleTape::node(&d));
        // A pair whose right half is not the successor is left alone.
        let wrong = OracleTape::pair(&a, &d);
        assert_eq!(o.call(&wrong), wrong);
    }

    #[test]
    fn minimal_chain() {
        let (o, chain) = build_chain_oracle(4, 1, 99).unwrap();
        assert_eq!(chain.t(), 1);
        assert!(!chain.nodes[0].is_zero());
        assert_eq!(o.successor(&bs("0000")), Some(&chain.nodes[0]));
    }

    #[test]
    fn pigeonhole() {
        assert_eq!(
            build_chain_oracle(2, 4, 0).unwrap_err(),
            OracleError::Infeasible { width: 2, t: 4 }
        );
        // Exactly fills the space: 3 nonzero 2-bit values.
        assert!(build_chain_oracle(2, 3, 0).is_ok());
    }

    #[test]
    fn chain_text_round_trip() {
        let (_, chain) = build_chain_oracle(10, 5, 3).unwrap();
        let text = chain.to_text();
        assert!(text.starts_with("S=10 t=5 seed=3\n"));
        assert_eq!(Chain::from_text(&text).unwrap(), chain);
        assert!(Chain::from_text("S=4 t=2 seed=0\n1\n").is_err());
        assert!(matches!(
            Chain::from_text("S=4 t=2 seed=0\n1\n1\n"),
            Err(OracleError::RepeatedNode(2))
        ));
    }

    #[test]
    fn from_bits_keeps_extras() {
        let mut long = bs("0110");
        long.extend_from(&bs("111"));
        let chain = Chain::from_bits(&long, 2).unwrap();
        assert_eq!(chain.t(), 3);
        assert_eq!(chain.extra_bits, bs("1"));
        assert_eq!(chain.to_bits(), long);
    }
}
