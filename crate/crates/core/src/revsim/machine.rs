use crate::bits::BitString;

use super::SimError;

/// Largest width accepted for an explicit step table.
pub const MAX_TABLE_WIDTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepRule {
    /// `table[c]` is the successor of configuration `c`.
    Table(Vec<u64>),
    /// A fixed pseudo-random function of the configuration, keyed by a seed.
    Seeded(u64),
}

/// A deterministic, generally irreversible, transition rule on `width`-bit
/// configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrevMachine {
    width: usize,
    rule: StepRule,
}

impl IrrevMachine {
    pub fn table(width: usize, table: Vec<u64>) -> Result<Self, SimError> {
        if width == 0 || width > MAX_TABLE_WIDTH {
            return Err(SimError::BadWidth(width));
        }
        if table.len() != 1 << width {
            return Err(SimError::BadTable(format!(
                "expected {} entries, got {}",
                1usize << width,
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >> width != 0) {
            return Err(SimError::BadTable(format!(
                "entry {v} exceeds {width} bits"
            )));
        }
        Ok(Self {
            width,
            rule: StepRule::Table(table),
        })
    }

    pub fn seeded(width: usize, seed: u64) -> Result<Self, SimError> {
        if width == 0 || width > 64 {
            return Err(SimError::BadWidth(width));
        }
        Ok(Self {
            width,
            rule: StepRule::Seeded(seed),
        })
    }

    /// The constant rule `c -> 0^S`.
    pub fn constant_zero(width: usize) -> Result<Self, SimError> {
        Self::table(width, vec![0; 1 << width])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rule(&self) -> &StepRule {
        &self.rule
    }

    pub fn seed(&self) -> Option<u64> {
        match self.rule {
            StepRule::Seeded(s) => Some(s),
            StepRule::Table(_) => None,
        }
    }

    pub fn step(&self, c: &BitString) -> BitString {
        assert_eq!(c.len(), self.width, "configuration width");
        let x = c.to_u64().expect("width <= 64");
        let next = match &self.rule {
            StepRule::Table(t) => t[x as usize],
            StepRule::Seeded(seed) => mix(x, *seed) & mask(self.width),
        };
        BitString::from_u64(next, self.width)
    }

    /// Plain irreversible iteration.
    pub fn run(&self, init: &BitString, steps: usize) -> BitString {
        (0..steps).fold(init.clone(), |c, _| self.step(&c))
    }
}

fn mask(width: usize) -> u64 {
    if width == 64 {
        u64::MAX
    } else {
        (1 << width) - 1
    }
}

// splitmix64 finalizer over the seeded input.
fn mix(x: u64, seed: u64) -> u64 {
    let mut z = x ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Landauer embedding: run `steps` steps, keeping each overwritten
/// configuration as one history record.
pub fn landauer_run(
    m: &IrrevMachine,
    init: &BitString,
    steps: usize,
) -> (BitString, Vec<BitString>) {
    let mut history = Vec::with_capacity(steps);
    let mut current = init.clone();
    for _ in 0..steps {
        let next = m.step(&current);
        history.push(std::mem::replace(&mut current, next));
    }
    (current, history)
}

/// Lecerf reversal: consume `history` from the top, checking each record
/// against the forward rule, and return the configuration it started from.
pub fn lecerf_reverse(
    m: &IrrevMachine,
    final_config: &BitString,
    mut history: Vec<BitString>,
) -> Result<BitString, SimError> {
    let mut current = final_config.clone();
    while let Some(prev) = history.pop() {
        if m.step(&prev) != current {
            return Err(SimError::CorruptHistory(format!(
                "record {} does not step to {}",
                prev.to_hex(),
                current.to_hex()
            )));
        }
        current = prev;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps() {
        let m = IrrevMachine::seeded(8, 1).unwrap();
        let init = BitString::from_u64(0x5a, 8);
        let (fin, hist) = landauer_run(&m, &init, 0);
        assert_eq!(fin, init);
        assert!(hist.is_empty());
        assert_eq!(lecerf_reverse(&m, &fin, hist).unwrap(), init);
    }

    #[test]
    fn constant_rule_records_erased_word() {
        let m = IrrevMachine::constant_zero(4).unwrap();
        let init: BitString = "1000".parse().unwrap();
        let (fin, hist) = landauer_run(&m, &init, 1);
        assert!(fin.is_zero());
        assert_eq!(hist, vec![init.clone()]);
        assert_eq!(lecerf_reverse(&m, &fin, hist).unwrap(), init);
    }

    #[test]
    fn seeded_rule_matches_direct_iteration() {
        let m = IrrevMachine::seeded(16, 77).unwrap();
        let init = BitString::from_u64(1234, 16);
        let mut direct = init.clone();
        for _ in 0..10 {
            direct = m.step(&direct);
        }
        let (fin, hist) = landauer_run(&m, &init, 10);
        assert_eq!(fin, direct);
        assert_eq!(hist.len(), 10);
    }

    #[test]
    fn truncated_history_is_detected() {
        let m = IrrevMachine::seeded(16, 5).unwrap();
        let init = BitString::from_u64(42, 16);
        let (fin, mut hist) = landauer_run(&m, &init, 6);
        hist.pop();
        assert!(matches!(
            lecerf_reverse(&m, &fin, hist),
            Err(SimError::CorruptHistory(_))
        ));
    }

    #[test]
    fn table_validation() {
        assert!(IrrevMachine::table(2, vec![0, 1, 2]).is_err());
        assert!(IrrevMachine::table(2, vec![0, 1, 2, 4]).is_err());
        assert!(IrrevMachine::table(17, vec![]).is_err());
        let m = IrrevMachine::table(2, vec![1, 2, 3, 3]).unwrap();
        assert_eq!(m.run(&BitString::zeros(2), 5).to_u64().unwrap(), 3);
    }
}
