use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    PebbleBennett,
    PebbleSearch,
    SimBennett,
    SimAudit,
    OracleSeparator,
    EulerRun,
    EulerFamily,
    /// Bennett metrics over the full `k` by `n` grid.
    Sweep,
    /// Peak checkpoint storage of the best strategy for each `t`.
    SpaceBound,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::PebbleBennett,
        Experiment::PebbleSearch,
        Experiment::SimBennett,
        Experiment::SimAudit,
        Experiment::OracleSeparator,
        Experiment::EulerRun,
        Experiment::EulerFamily,
        Experiment::Sweep,
        Experiment::SpaceBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::PebbleBennett => "pebble-bennett",
            Experiment::PebbleSearch => "pebble-search",
            Experiment::SimBennett => "sim-bennett",
            Experiment::SimAudit => "sim-audit",
            Experiment::OracleSeparator => "oracle-separator",
            Experiment::EulerRun => "euler-run",
            Experiment::EulerFamily => "euler-family",
            Experiment::Sweep => "sweep",
            Experiment::SpaceBound => "space-bound",
        }
    }

    /// CSV header. Every schema starts with `experiment,trial,seed`.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Experiment::PebbleBennett | Experiment::Sweep => &[
                "experiment",
                "trial",
                "seed",
                "k",
                "n",
                "moves",
                "formula_moves",
                "max_pebbles",
                "pebble_bound",
                "first_reach_time",
                "verdict",
            ],
            Experiment::PebbleSearch => &[
                "experiment",
                "trial",
                "seed",
                "t",
                "min_pebbles",
                "log_bound",
                "states_visited",
                "verdict",
            ],
            Experiment::SimBennett => &[
                "experiment",
                "trial",
                "seed",
                "k",
                "n",
                "seg_len",
                "width",
                "peak_checkpoints",
                "peak_history_bits",
                "microops",
                "verdict",
            ],
            Experiment::SimAudit => &[
                "experiment",
                "trial",
                "seed",
                "k",
                "n",
                "seg_len",
                "width",
                "events",
                "state_bytes",
                "verdict",
            ],
            Experiment::OracleSeparator => &[
                "experiment",
                "trial",
                "seed",
                "space",
                "t",
                "accept",
                "expected",
                "rom_bit",
                "oracle_calls",
                "verdict",
            ],
            Experiment::EulerRun => &[
                "experiment",
                "trial",
                "seed",
                "width",
                "width_cap",
                "found",
                "direct",
                "length",
                "peak_bits",
                "verdict",
            ],
            Experiment::EulerFamily => &[
                "experiment",
                "trial",
                "seed",
                "depth",
                "width_cap",
                "length",
                "peak_bits",
                "growth",
                "verdict",
            ],
            Experiment::SpaceBound => &[
                "experiment",
                "trial",
                "seed",
                "t",
                "space",
                "min_pebbles",
                "peak_checkpoints",
                "space_bits",
                "bound_bits",
                "verdict",
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| config_err("experiment", format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub k: Vec<usize>,
    pub n: Vec<u32>,
    pub t: Vec<usize>,
    pub depth: Vec<u32>,
    /// Node width `S` for oracle chains.
    pub space: usize,
    pub seg_len: usize,
    /// Configuration width of simulated machines and random tables.
    pub width: usize,
    pub seed: u64,
    pub trials: usize,
    /// Euler-tour size cutoff; the machine width when unset.
    pub width_cap: Option<usize>,
    pub step_cap: u64,
    pub halt_every: u32,
    pub budget: usize,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        let grid = experiment == Experiment::Sweep;
        Self {
            experiment,
            k: if grid { vec![2, 3, 4] } else { vec![2] },
            n: if grid { (0..=4).collect() } else { vec![3] },
            t: vec![8],
            depth: (2..=10).collect(),
            space: 8,
            seg_len: 1,
            width: 8,
            seed: 0,
            trials: 1,
            width_cap: None,
            step_cap: 1 << 24,
            halt_every: 8,
            budget: 16,
            output: None,
        }
    }

    /// Set one field from its textual form. Keys match the command-line
    /// flags; `-` and `_` are interchangeable. Lists are comma separated
    /// and may contain inclusive ranges such as `2-4`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "experiment" => self.experiment = value.parse()?,
            "k" => self.k = parse_list(&key, value)?,
            "n" => self.n = parse_list(&key, value)?,
            "t" => self.t = parse_list(&key, value)?,
            "depth" => self.depth = parse_list(&key, value)?,
            "space" | "s" => self.space = parse_one(&key, value)?,
            "seg_len" => self.seg_len = parse_one(&key, value)?,
            "width" => self.width = parse_one(&key, value)?,
            "seed" => self.seed = parse_one(&key, value)?,
            "trials" => self.trials = parse_one(&key, value)?,
            "width_cap" => self.width_cap = Some(parse_one(&key, value)?),
            "step_cap" => self.step_cap = parse_one(&key, value)?,
            "halt_every" => self.halt_every = parse_one(&key, value)?,
            "budget" => self.budget = parse_one(&key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(config_err(&key, "unknown key".into())),
        }
        Ok(())
    }

    /// Apply a `key = value` file. Blank lines and `#` comments are
    /// skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ExperimentError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err("config", format!("line {}: expected key=value", i + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let nonempty = |field: &str, len: usize| {
            if len == 0 {
                Err(config_err(field, "list is empty".into()))
            } else {
                Ok(())
            }
        };
        nonempty("k", self.k.len())?;
        nonempty("n", self.n.len())?;
        nonempty("t", self.t.len())?;
        nonempty("depth", self.depth.len())?;
        if let Some(&k) = self.k.iter().find(|&&k| k < 2) {
            return Err(config_err("k", format!("{k} is below 2")));
        }
        if let Some(&t) = self.t.iter().find(|&&t| t == 0) {
            return Err(config_err("t", format!("{t} is not a chain length")));
        }
        for (field, v) in [
            ("trials", self.trials),
            ("seg_len", self.seg_len),
            ("width", self.width),
            ("space", self.space),
        ] {
            if v == 0 {
                return Err(config_err(field, "must be positive".into()));
            }
        }
        if self.width_cap == Some(0) {
            return Err(config_err("width_cap", "must be positive".into()));
        }
        if self.step_cap == 0 {
            return Err(config_err("step_cap", "must be positive".into()));
        }
        Ok(())
    }
}

fn config_err(field: &str, msg: String) -> ExperimentError {
    ExperimentError::Config {
        field: field.to_string(),
        msg,
    }
}

fn parse_one<T: FromStr>(field: &str, value: &str) -> Result<T, ExperimentError> {
    value
        .parse()
        .map_err(|_| config_err(field, format!("cannot parse {value:?}")))
}

fn parse_list<T>(field: &str, value: &str) -> Result<Vec<T>, ExperimentError>
where
    T: FromStr + TryFrom<u64>,
{
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u64 = parse_one(field, lo.trim())?;
                let hi: u64 = parse_one(field, hi.trim())?;
                if lo > hi {
                    return Err(config_err(field, format!("empty range {part:?}")));
                }
                for v in lo..=hi {
                    out.push(T::try_from(v).map_err(|_| config_err(field, "out of range".into()))?);
                }
            }
            None => out.push(parse_one(field, part)?),
        }
    }
    Ok(out)
}
