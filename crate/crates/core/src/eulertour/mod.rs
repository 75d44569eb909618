//! Linear-space reversible search by an Euler tour of the configuration
//! tree.
//!
//! Every configuration has a fixed, ordered list of edge slots: its
//! predecessors in ascending order, then its successor. The tour leaves
//! each configuration through the slot after the one it arrived by (the
//! right-hand rule). That step is a bijection on (configuration, slot)
//! pairs, so the tour can be run backwards as easily as forwards, and it
//! needs only a constant number of configuration-sized registers however
//! long it runs. Configurations wider than the cap are treated as absent.

mod machine;

use std::collections::HashSet;

use thiserror::Error;

pub use machine::{binary_in_tree, ExplicitMachine, MAX_WIDTH};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EulerError {
    #[error("configuration width {0} is not supported")]
    BadWidth(usize),
    #[error("configuration {config:x} does not fit in {width} bits")]
    ConfigOutOfRange { config: u32, width: usize },
    #[error("tour did not return to its start within {0} steps")]
    StepCapExceeded(u64),
    #[error("tour step is not a bijection at {0:?}")]
    BijectivityViolation(TourState),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("format error: {0}")]
    Format(String),
}

/// Position of the tour: a configuration and the slot it leaves by next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TourState {
    pub config: u32,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TourOutcome {
    /// A halting configuration was visited; `found_at` is the tour step at
    /// which it was first reached.
    Found {
        config: u32,
        found_at: u64,
        length: u64,
    },
    /// The tour closed without meeting a halting configuration.
    NotFound { length: u64 },
}

impl TourOutcome {
    pub fn length(&self) -> u64 {
        match *self {
            TourOutcome::Found { length, .. } | TourOutcome::NotFound { length } => length,
        }
    }

    pub fn config(&self) -> Option<u32> {
        match *self {
            TourOutcome::Found { config, .. } => Some(config),
            TourOutcome::NotFound { .. } => None,
        }
    }
}

/// Peak bits held in live registers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpaceMeter {
    live: usize,
    peak: usize,
}

impl SpaceMeter {
    pub fn alloc(&mut self, bits: usize) {
        self.live += bits;
        self.peak = self.peak.max(self.live);
    }

    pub fn free(&mut self, bits: usize) {
        self.live -= bits;
    }

    pub fn peak(&self) -> usize {
        self.peak
    }
}

/// The machine seen through a width cap.
#[derive(Debug, Clone, Copy)]
pub struct Tour<'a> {
    m: &'a ExplicitMachine,
    cap: usize,
}

impl<'a> Tour<'a> {
    pub fn new(m: &'a ExplicitMachine, width_cap: usize) -> Self {
        Self { m, cap: width_cap }
    }

    fn fits(&self, c: u32) -> bool {
        self.cap >= 32 || c < 1u32 << self.cap
    }

    /// Predecessors within the cap: a prefix of the ascending list.
    fn preds(&self, c: u32) -> &'a [u32] {
        let all = self.m.predecessors(c);
        &all[..all.partition_point(|&p| self.fits(p))]
    }

    fn succ(&self, c: u32) -> Option<u32> {
        self.m.successor(c).filter(|&n| self.fits(n))
    }

    pub fn degree(&self, c: u32) -> usize {
        self.preds(c).len() + self.succ(c).is_some() as usize
    }

    /// Bits per configuration register.
    pub fn config_bits(&self) -> usize {
        self.cap.min(self.m.width())
    }

    /// The neighbour behind `slot` of `c`, and the slot of the neighbour
    /// that leads back.
    fn follow(&self, c: u32, slot: usize) -> (u32, usize) {
        let preds = self.preds(c);
        if slot < preds.len() {
            let u = preds[slot];
            (u, self.preds(u).len())
        } else {
            let w = self.succ(c).expect("slot within degree");
            let back = self
                .preds(w)
                .binary_search(&c)
                .expect("c precedes its successor");
            (w, back)
        }
    }

    pub fn start(&self) -> Option<TourState> {
        let c = self.m.initial();
        (self.fits(c) && self.degree(c) > 0).then_some(TourState { config: c, slot: 0 })
    }

    pub fn step(&self, s: TourState) -> TourState {
        let (w, arrival) = self.follow(s.config, s.slot);
        TourState {
            config: w,
            slot: (arrival + 1) % self.degree(w),
        }
    }

    pub fn unstep(&self, s: TourState) -> TourState {
        let deg = self.degree(s.config);
        let arrival = (s.slot + deg - 1) % deg;
        let (v, slot) = self.follow(s.config, arrival);
        TourState { config: v, slot }
    }

    fn metered_step(&self, s: TourState, meter: &mut SpaceMeter) -> TourState {
        let regs = self.config_bits() + self.slot_bits();
        meter.alloc(regs);
        let next = self.step(s);
        meter.free(regs);
        next
    }

    fn slot_bits(&self) -> usize {
        self.config_bits() + 1
    }
}

/// Tour the configuration tree around the initial configuration, back to
/// the starting state, and report any halting configuration met on the
/// way.
pub fn euler_tour(
    m: &ExplicitMachine,
    width_cap: usize,
    step_cap: u64,
) -> Result<TourOutcome, EulerError> {
    run_tour(m, width_cap, step_cap, |_| {}).map(|(outcome, _)| outcome)
}

fn run_tour(
    m: &ExplicitMachine,
    width_cap: usize,
    step_cap: u64,
    mut visit: impl FnMut(TourState),
) -> Result<(TourOutcome, SpaceMeter), EulerError> {
    let tour = Tour::new(m, width_cap);
    let mut meter = SpaceMeter::default();
    let initial = m.initial();
    let mut found = (tour.fits(initial) && m.is_halting(initial)).then_some((initial, 0));
    meter.alloc(tour.config_bits() + tour.slot_bits());
    let mut length = 0;
    if let Some(start) = tour.start() {
        let mut s = start;
        loop {
            visit(s);
            if length == step_cap {
                return Err(EulerError::StepCapExceeded(step_cap));
            }
            s = tour.metered_step(s, &mut meter);
            length += 1;
            if found.is_none() && m.is_halting(s.config) {
                found = Some((s.config, length));
            }
            if s == start {
                break;
            }
        }
    }
    let outcome = match found {
        Some((config, found_at)) => TourOutcome::Found {
            config,
            found_at,
            length,
        },
        None => TourOutcome::NotFound { length },
    };
    Ok((outcome, meter))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourAudit {
    pub outcome: TourOutcome,
    /// Distinct tour states, each checked to have one successor and one
    /// predecessor inside the tour.
    pub states_checked: usize,
    pub peak_bits: usize,
    /// Running the tour backwards from its end restored the start state.
    pub reverse_ok: bool,
}

/// Run the tour while recording its states, then check that the step is a
/// bijection on them and that the reversed tour retraces them exactly.
pub fn tour_audit(
    m: &ExplicitMachine,
    width_cap: usize,
    step_cap: u64,
) -> Result<TourAudit, EulerError> {
    let mut states = Vec::new();
    let (outcome, meter) = run_tour(m, width_cap, step_cap, |s| states.push(s))?;
    let tour = Tour::new(m, width_cap);
    let mut seen = HashSet::with_capacity(states.len());
    for (i, &s) in states.iter().enumerate() {
        if !seen.insert(s) {
            return Err(EulerError::BijectivityViolation(s));
        }
        let next = tour.step(s);
        let expected = states.get(i + 1).copied().unwrap_or(states[0]);
        if next != expected || tour.unstep(next) != s {
            return Err(EulerError::BijectivityViolation(s));
        }
    }
    let reverse_ok = match tour.start() {
        None => states.is_empty(),
        Some(start) => {
            let mut s = start;
            let mut ok = true;
            for &expected in states.iter().rev() {
                s = tour.unstep(s);
                ok &= s == expected;
            }
            ok && s == start
        }
    };
    Ok(TourAudit {
        outcome,
        states_checked: states.len(),
        peak_bits: meter.peak(),
        reverse_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn machine(width: usize, edges: &[(u32, u32)], initial: u32) -> ExplicitMachine {
        ExplicitMachine::from_edges(width, edges.iter().copied(), initial).unwrap()
    }

    #[test]
    fn predecessor_lists() {
        let m = machine(2, &[(0, 2), (1, 2)], 0);
        assert_eq!(m.predecessors(2), &[0, 1]);
        assert!(m.predecessors(0).is_empty());
        let m = machine(2, &[(3, 3)], 3);
        assert_eq!(m.predecessors(3), &[3]);
    }

    #[test]
    fn initial_halting() {
        let m = machine(2, &[], 1);
        let out = euler_tour(&m, 2, 10).unwrap();
        assert_eq!(
            out,
            TourOutcome::Found {
                config: 1,
                found_at: 0,
                length: 0
            }
        );
        let audit = tour_audit(&m, 2, 10).unwrap();
        assert_eq!(audit.states_checked, 0);
        assert!(audit.reverse_ok);
    }

    #[test]
    fn linear_chain() {
        let m = machine(2, &[(1, 2), (2, 3)], 1);
        let out = euler_tour(&m, 2, 100).unwrap();
        assert_eq!(out.config(), Some(3));
        // Two edges, each walked once in each direction.
        assert_eq!(out.length(), 4);
    }

    #[test]
    fn oversize_branch_is_pruned() {
        // 4 -> 2 sits above a 2-bit cap; 1 -> 2 -> 3 stays.
        let m = machine(3, &[(1, 2), (2, 3), (4, 2), (5, 4)], 1);
        let full = euler_tour(&m, 3, 100).unwrap();
        let capped = euler_tour(&m, 2, 100).unwrap();
        assert_eq!(full.config(), Some(3));
        assert_eq!(capped.config(), Some(3));
        assert_eq!(full.length(), 8);
        assert_eq!(capped.length(), 4);
    }

    #[test]
    fn cycle_is_not_found() {
        let m = machine(2, &[(0, 1), (1, 2), (2, 1)], 0);
        assert!(matches!(
            euler_tour(&m, 2, 100).unwrap(),
            TourOutcome::NotFound { .. }
        ));
        assert!(tour_audit(&m, 2, 100).unwrap().reverse_ok);
    }

    #[test]
    fn step_cap() {
        let m = binary_in_tree(4, 6).unwrap();
        assert_eq!(
            euler_tour(&m, 6, 5).unwrap_err(),
            EulerError::StepCapExceeded(5)
        );
    }

    #[test]
    fn five_config_tree_reverses() {
        // 1,2 -> 3; 3,4 -> 5; 5 halts.
        let m = machine(3, &[(1, 3), (2, 3), (3, 5), (4, 5)], 2);
        let audit = tour_audit(&m, 3, 100).unwrap();
        assert!(audit.reverse_ok);
        assert_eq!(audit.states_checked, 8);
        assert_eq!(audit.outcome.config(), Some(5));
    }

    #[test]
    fn text_round_trip() {
        let m = machine(4, &[(1, 3), (2, 3), (3, 0xf)], 2);
        let text = m.to_text();
        assert_eq!(text, "width=4 initial=2\n1 -> 3\n2 -> 3\n3 -> f\n");
        assert_eq!(ExplicitMachine::from_text(&text).unwrap(), m);
        assert!(ExplicitMachine::from_text("width=2\n1 -> 2\n1 -> 3\n").is_err());
        assert!(ExplicitMachine::from_text("width=2\n1 -> 9\n").is_err());
        let default_initial = ExplicitMachine::from_text("width=2\n1 -> 2\n").unwrap();
        assert_eq!(default_initial.initial(), 0);
    }

    #[test]
    fn random_tables_agree_with_direct_run() {
        for seed in 0..40 {
            let m = ExplicitMachine::random(6, 8, seed).unwrap();
            let out = euler_tour(&m, 6, 1 << 16).unwrap();
            assert_eq!(out.config(), m.run_direct(), "seed {seed}");
            assert!(tour_audit(&m, 6, 1 << 16).unwrap().reverse_ok);
        }
    }

    #[test]
    fn tree_family_space_is_flat() {
        let peaks: Vec<usize> = (2..=6)
            .map(|d| {
                tour_audit(&binary_in_tree(d, 11).unwrap(), 11, 1 << 20)
                    .unwrap()
                    .peak_bits
            })
            .collect();
        assert!(peaks.windows(2).all(|w| w[0] == w[1]), "{peaks:?}");
    }
}
