use std::fmt;
use std::str::FromStr;

use crate::bits::BitString;

use super::OracleError;

/// Contents of an oracle (or input-access) tape: a finite string over
/// `{0, 1, #}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OracleTape(Vec<u8>);

impl OracleTape {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn node(b: &BitString) -> Self {
        Self(
            b.bits()
                .iter()
                .map(|&x| if x { b'1' } else { b'0' })
                .collect(),
        )
    }

    /// The pair form `b#c`.
    pub fn pair(b: &BitString, c: &BitString) -> Self {
        let mut out = Self::node(b).0;
        out.push(b'#');
        out.extend(Self::node(c).0);
        Self(out)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// Builds a tape from raw symbols; anything outside `{0,1,#}` is rejected.
    pub fn from_symbols(symbols: Vec<u8>) -> Result<Self, OracleError> {
        if let Some(&bad) = symbols.iter().find(|&&c| !matches!(c, b'0' | b'1' | b'#')) {
            return Err(OracleError::BadTapeSymbol(bad as char));
        }
        Ok(Self(symbols))
    }

    /// `Some(b)` when the tape holds a plain bit string (no separator).
    pub fn as_node(&self) -> Option<BitString> {
        if self.0.contains(&b'#') {
            return None;
        }
        Some(to_bits(&self.0))
    }

    /// `Some((b, c))` when the tape holds exactly one separator.
    pub fn as_pair(&self) -> Option<(BitString, BitString)> {
        let mut it = self.0.iter().enumerate().filter(|(_, &c)| c == b'#');
        let (pos, _) = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some((to_bits(&self.0[..pos]), to_bits(&self.0[pos + 1..])))
    }

    /// Pair form with both halves `width` bits long.
    pub fn as_balanced_pair(&self, width: usize) -> Option<(BitString, BitString)> {
        self.as_pair()
            .filter(|(b, c)| b.len() == width && c.len() == width)
    }
}

fn to_bits(s: &[u8]) -> BitString {
    BitString::from_bits(s.iter().map(|&c| c == b'1').collect())
}

impl FromStr for OracleTape {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_symbols(s.as_bytes().to_vec())
    }
}

impl fmt::Display for OracleTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Only ASCII '0', '1', '#' are ever stored.
        f.write_str(std::str::from_utf8(&self.0).unwrap())
    }
}

impl fmt::Debug for OracleTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleTape({self:?})", self = self.to_string())
    }
}

/// A permutation of tape contents applied in one step.
///
/// Every implementation in this crate is self-reversible: calling twice
/// restores the original tape.
pub trait TapeOracle {
    fn call(&self, tape: &OracleTape) -> OracleTape;
}

impl<T: TapeOracle + ?Sized> TapeOracle for &T {
    fn call(&self, tape: &OracleTape) -> OracleTape {
        (**self).call(tape)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        let t: OracleTape = "01#10".parse().unwrap();
        let (b, c) = t.as_pair().unwrap();
        assert_eq!((b.to_string(), c.to_string()), ("01".into(), "10".into()));
        assert!(t.as_node().is_none());
        assert!("0#1#1".parse::<OracleTape>().unwrap().as_pair().is_none());
        assert_eq!(OracleTape::empty().as_node(), Some(BitString::new()));
        assert!("012".parse::<OracleTape>().is_err());
        assert!(t.as_balanced_pair(2).is_some());
        assert!(t.as_balanced_pair(3).is_none());
    }
}
