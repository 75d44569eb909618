use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EulerError;

/// Largest configuration width for an explicit table.
pub const MAX_WIDTH: usize = 20;

/// An irreversible machine given by its full transition table. A
/// configuration without an entry halts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitMachine {
    width: usize,
    next: Vec<Option<u32>>,
    preds: Vec<Vec<u32>>,
    initial: u32,
}

impl ExplicitMachine {
    pub fn new(width: usize, next: Vec<Option<u32>>, initial: u32) -> Result<Self, EulerError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(EulerError::BadWidth(width));
        }
        let size = 1usize << width;
        if next.len() != size {
            return Err(EulerError::Format(format!(
                "table has {} entries, expected {size}",
                next.len()
            )));
        }
        if let Some(bad) = next
            .iter()
            .flatten()
            .chain([&initial])
            .find(|&&c| c as usize >= size)
        {
            return Err(EulerError::ConfigOutOfRange {
                config: *bad,
                width,
            });
        }
        let mut preds = vec![Vec::new(); size];
        for (c, n) in next.iter().enumerate() {
            if let Some(n) = n {
                preds[*n as usize].push(c as u32);
            }
        }
        Ok(Self {
            width,
            next,
            preds,
            initial,
        })
    }

    pub fn from_edges(
        width: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        initial: u32,
    ) -> Result<Self, EulerError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(EulerError::BadWidth(width));
        }
        let mut next = vec![None; 1 << width];
        for (a, b) in edges {
            let slot = next
                .get_mut(a as usize)
                .ok_or(EulerError::ConfigOutOfRange { config: a, width })?;
            if slot.replace(b).is_some() {
                return Err(EulerError::Format(format!("two successors for {a:x}")));
            }
        }
        Self::new(width, next, initial)
    }

    /// A seeded random table in which roughly one configuration in
    /// `halt_every` halts and every other one steps to a uniform successor.
    /// The initial configuration is drawn from the same generator.
    pub fn random(width: usize, halt_every: u32, seed: u64) -> Result<Self, EulerError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(EulerError::BadWidth(width));
        }
        let size = 1u32 << width;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let next = (0..size)
            .map(|_| (rng.gen_range(0..halt_every.max(1)) != 0).then(|| rng.gen_range(0..size)))
            .collect();
        let initial = rng.gen_range(0..size);
        Self::new(width, next, initial)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn with_initial(mut self, initial: u32) -> Result<Self, EulerError> {
        if initial as usize >= self.next.len() {
            return Err(EulerError::ConfigOutOfRange {
                config: initial,
                width: self.width,
            });
        }
        self.initial = initial;
        Ok(self)
    }

    pub fn successor(&self, c: u32) -> Option<u32> {
        self.next[c as usize]
    }

    pub fn is_halting(&self, c: u32) -> bool {
        self.next[c as usize].is_none()
    }

    /// Every `c'` with `successor(c') = c`, ascending.
    pub fn predecessors(&self, c: u32) -> &[u32] {
        &self.preds[c as usize]
    }

    /// Plain forward run from the initial configuration: the halting
    /// configuration, or `None` if the run enters a cycle.
    pub fn run_direct(&self) -> Option<u32> {
        let mut c = self.initial;
        for _ in 0..=self.next.len() {
            match self.successor(c) {
                None => return Some(c),
                Some(n) => c = n,
            }
        }
        None
    }

    /// Header `width=<bits> initial=<hex>`, then `<hex> -> <hex>` per
    /// defined transition.
    pub fn to_text(&self) -> String {
        let mut out = format!("width={} initial={:x}\n", self.width, self.initial);
        for (c, n) in self.next.iter().enumerate() {
            if let Some(n) = n {
                out.push_str(&format!("{c:x} -> {n:x}\n"));
            }
        }
        out
    }

    /// Parses the table format. `initial` defaults to 0 when the header
    /// omits it.
    pub fn from_text(text: &str) -> Result<Self, EulerError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines.next().ok_or(EulerError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut width = None;
        let mut initial = 0u32;
        for tok in header.split_whitespace() {
            let parse_err = || EulerError::Parse {
                line: 1,
                msg: format!("bad header token {tok:?}"),
            };
            match tok.split_once('=') {
                Some(("width", v)) => width = Some(v.parse::<usize>().map_err(|_| parse_err())?),
                Some(("initial", v)) => {
                    initial = u32::from_str_radix(v, 16).map_err(|_| parse_err())?
                }
                _ => return Err(parse_err()),
            }
        }
        let width = width.ok_or(EulerError::Parse {
            line: 1,
            msg: "header needs width=<bits>".into(),
        })?;
        if width == 0 || width > MAX_WIDTH {
            return Err(EulerError::BadWidth(width));
        }
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (i, line) in lines {
            let err = |msg: &str| EulerError::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let (a, b) = line
                .split_once("->")
                .ok_or_else(|| err("expected `<hex> -> <hex>`"))?;
            let a = u32::from_str_radix(a.trim(), 16).map_err(|_| err("bad source"))?;
            let b = u32::from_str_radix(b.trim(), 16).map_err(|_| err("bad target"))?;
            if !seen.insert(a) {
                return Err(err("configuration listed twice"));
            }
            edges.push((a, b));
        }
        Self::from_edges(width, edges, initial)
    }
}

/// The complete binary in-tree of depth `depth` in heap numbering: node
/// `i > 1` steps to `i / 2`, the root `1` halts. The initial configuration
/// is the leftmost leaf `2^depth`.
pub fn binary_in_tree(depth: u32, width: usize) -> Result<ExplicitMachine, EulerError> {
    if depth as usize + 1 > width {
        return Err(EulerError::BadWidth(width));
    }
    let nodes = (1u32 << (depth + 1)) - 1;
    ExplicitMachine::from_edges(width, (2..=nodes).map(|i| (i, i / 2)), 1 << depth)
}
