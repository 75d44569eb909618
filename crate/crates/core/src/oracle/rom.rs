//! Read-only input memory accessed through a self-reversible tape protocol.

use crate::bits::BitString;

use super::graph::{parse_header, Chain};
use super::tape::{OracleTape, TapeOracle};
use super::OracleError;

/// `2^b` words of `b` bits each, addressed big-endian from `0^b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputRom {
    word_width: usize,
    words: Vec<BitString>,
}

/// Widths beyond this would need more than 2^24 words.
pub const MAX_ROM_WIDTH: usize = 24;

impl InputRom {
    pub fn new(word_width: usize, words: Vec<BitString>) -> Result<Self, OracleError> {
        if word_width > MAX_ROM_WIDTH {
            return Err(OracleError::WidthTooLarge(word_width));
        }
        if words.len() != 1usize << word_width {
            return Err(OracleError::Format(format!(
                "ROM with b={word_width} needs {} words, got {}",
                1usize << word_width,
                words.len()
            )));
        }
        if let Some((i, w)) = words
            .iter()
            .enumerate()
            .find(|(_, w)| w.len() != word_width)
        {
            return Err(OracleError::NodeWidth {
                index: i,
                expected: word_width,
                got: w.len(),
            });
        }
        Ok(Self { word_width, words })
    }

    /// `I[q_{j-1}] = q_j` along the chain, `0^b` everywhere else.
    pub fn from_chain(chain: &Chain) -> Result<Self, OracleError> {
        let b = chain.node_width;
        if b > MAX_ROM_WIDTH {
            return Err(OracleError::WidthTooLarge(b));
        }
        let mut words = vec![BitString::zeros(b); 1 << b];
        for j in 1..=chain.t() {
            let addr = chain.node(j - 1).to_u64()? as usize;
            words[addr] = chain.node(j);
        }
        Self::new(b, words)
    }

    pub fn word_width(&self) -> usize {
        self.word_width
    }

    pub fn word(&self, addr: &BitString) -> Option<&BitString> {
        if addr.len() != self.word_width {
            return None;
        }
        // Width is at most MAX_ROM_WIDTH, so this never overflows.
        self.words.get(addr.to_u64().ok()? as usize)
    }

    pub fn words(&self) -> &[BitString] {
        &self.words
    }

    /// Header `b=<bits>`, then `2^b` hex words in address order.
    pub fn to_text(&self) -> String {
        let mut out = format!("b={}\n", self.word_width);
        for w in &self.words {
            out.push_str(&w.to_hex());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, OracleError> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or(OracleError::Format("missing header".into()))?;
        let b = parse_header(header, &["b"])?[0] as usize;
        if b > MAX_ROM_WIDTH {
            return Err(OracleError::WidthTooLarge(b));
        }
        let words = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| BitString::from_hex(l.trim(), b).map_err(OracleError::from))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(b, words)
    }
}

/// "Get input size": empty tape <-> `b` in binary; anything else is a no-op.
pub fn rom_get_size(rom: &InputRom, tape: &OracleTape) -> OracleTape {
    let size = OracleTape::node(&binary(rom.word_width as u64));
    if tape.is_empty() {
        size
    } else if *tape == size {
        OracleTape::empty()
    } else {
        tape.clone()
    }
}

fn binary(v: u64) -> BitString {
    let width = crate::bits::bit_width(v);
    BitString::from_u64(v, width)
}

/// "Access input word": address `a` <-> `a#I[a]`; anything else is a no-op.
pub fn rom_access_word(rom: &InputRom, tape: &OracleTape) -> OracleTape {
    if let Some(a) = tape.as_node() {
        if let Some(w) = rom.word(&a) {
            return OracleTape::pair(&a, w);
        }
        return tape.clone();
    }
    if let Some((a, w)) = tape.as_pair() {
        if rom.word(&a) == Some(&w) {
            return OracleTape::node(&a);
        }
    }
    tape.clone()
}

impl TapeOracle for InputRom {
    fn call(&self, tape: &OracleTape) -> OracleTape {
        rom_access_word(self, tape)
    }
}

/// First bit of `I[I[...I[0^b]...]]` with `iterations` lookups, by direct
/// pointer chasing.
pub fn rom_result_bit(rom: &InputRom, iterations: usize) -> bool {
    let mut addr = BitString::zeros(rom.word_width);
    for _ in 0..iterations {
        addr = rom.word(&addr).expect("address has word width").clone();
    }
    addr.first().unwrap_or(false)
}
