//! Seeded experiments over the other modules, one CSV row per trial.
//!
//! Trial `i` of a run uses seed `seed + i`, so a configuration fully
//! determines its output.

mod config;

use std::io::Write;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::bits::BitString;
use crate::eulertour::{binary_in_tree, tour_audit, EulerError, ExplicitMachine};
use crate::oracle::{
    build_chain_oracle, rom_result_bit, separator_decide, Bounds, InputRom, OracleError,
};
use crate::pebble::{bennett_schedule, min_pebbles, schedule_metrics, PebbleError};
use crate::revsim::{
    replay_backward, simulate_bennett, simulate_chain_walk, Context, IrrevMachine, SimError,
};

pub use config::{Experiment, ExperimentConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error(transparent)]
    Pebble(#[from] PebbleError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One trial. `values` line up with `experiment.columns()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub experiment: Experiment,
    pub values: Vec<String>,
}

impl ReportRow {
    pub fn get(&self, column: &str) -> Option<&str> {
        let i = self
            .experiment
            .columns()
            .iter()
            .position(|&c| c == column)?;
        self.values.get(i).map(String::as_str)
    }

    /// True when the row's verdict is a success.
    pub fn passed(&self) -> bool {
        matches!(self.get("verdict"), Some("OK" | "MATCH" | "RESTORED"))
    }
}

struct RowBuilder {
    experiment: Experiment,
    values: Vec<String>,
}

impl RowBuilder {
    fn new(experiment: Experiment, trial: usize, seed: u64) -> Self {
        Self {
            experiment,
            values: vec![experiment.to_string(), trial.to_string(), seed.to_string()],
        }
    }

    fn push(mut self, v: impl ToString) -> Self {
        self.values.push(v.to_string());
        self
    }

    fn verdict(self, ok: bool, pass: &str, fail: &str) -> ReportRow {
        let row = self.push(if ok { pass } else { fail });
        debug_assert_eq!(row.values.len(), row.experiment.columns().len());
        ReportRow {
            experiment: row.experiment,
            values: row.values,
        }
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ReportRow>, ExperimentError> {
    config.validate()?;
    let e = config.experiment;
    let mut rows = Vec::new();
    match e {
        Experiment::PebbleBennett | Experiment::Sweep => {
            for &k in &config.k {
                for &n in &config.n {
                    rows.push(bennett_row(e, rows.len(), config.seed, k, n)?);
                }
            }
        }
        Experiment::PebbleSearch => {
            for &t in &config.t {
                let out = min_pebbles(t, config.budget)?;
                let bound = log_bound(t);
                rows.push(
                    RowBuilder::new(e, rows.len(), config.seed)
                        .push(t)
                        .push(out.min_pebbles)
                        .push(bound)
                        .push(out.states_visited)
                        .verdict(out.min_pebbles >= bound, "OK", "BELOW_BOUND"),
                );
            }
        }
        Experiment::SimBennett | Experiment::SimAudit => {
            for &k in &config.k {
                for &n in &config.n {
                    for i in 0..config.trials {
                        let seed = config.seed.wrapping_add(i as u64);
                        rows.push(sim_row(e, rows.len(), seed, config, k, n)?);
                    }
                }
            }
        }
        Experiment::OracleSeparator => {
            for &t in &config.t {
                for i in 0..config.trials {
                    let seed = config.seed.wrapping_add(i as u64);
                    let (oracle, chain) = build_chain_oracle(config.space, t, seed)?;
                    let out =
                        separator_decide(&oracle, Bounds::new(config.space, config.space * t)?);
                    let expected = chain.node(t).first() == Some(true);
                    let rom_bit = rom_result_bit(&InputRom::from_chain(&chain)?, t);
                    rows.push(
                        RowBuilder::new(e, rows.len(), seed)
                            .push(config.space)
                            .push(t)
                            .push(out.accept)
                            .push(expected)
                            .push(rom_bit)
                            .push(out.oracle_calls)
                            .verdict(
                                out.accept == expected && rom_bit == expected,
                                "MATCH",
                                "MISMATCH",
                            ),
                    );
                }
            }
        }
        Experiment::EulerRun => {
            let cap = config.width_cap.unwrap_or(config.width);
            for i in 0..config.trials {
                let seed = config.seed.wrapping_add(i as u64);
                let m = ExplicitMachine::random(config.width, config.halt_every, seed)?;
                let audit = tour_audit(&m, cap, config.step_cap)?;
                let found = audit.outcome.config();
                let direct = m.run_direct();
                let show =
                    |c: Option<u32>| c.map_or_else(|| "none".to_string(), |c| format!("{c:x}"));
                let comparable = cap >= config.width;
                rows.push(
                    RowBuilder::new(e, rows.len(), seed)
                        .push(config.width)
                        .push(cap)
                        .push(show(found))
                        .push(show(direct))
                        .push(audit.outcome.length())
                        .push(audit.peak_bits)
                        .verdict(
                            audit.reverse_ok && (!comparable || found == direct),
                            "MATCH",
                            "MISMATCH",
                        ),
                );
            }
        }
        Experiment::EulerFamily => {
            let mut prev: Option<u64> = None;
            for &depth in &config.depth {
                let cap = config
                    .width_cap
                    .unwrap_or(config.width.max(depth as usize + 1));
                let m = binary_in_tree(depth, cap)?;
                let audit = tour_audit(&m, cap, config.step_cap)?;
                let length = audit.outcome.length();
                let growth = prev.filter(|&p| p > 0).map_or_else(
                    || "-".to_string(),
                    |p| format!("{:.3}", length as f64 / p as f64),
                );
                prev = Some(length);
                rows.push(
                    RowBuilder::new(e, rows.len(), config.seed)
                        .push(depth)
                        .push(cap)
                        .push(length)
                        .push(audit.peak_bits)
                        .push(growth)
                        .verdict(
                            audit.reverse_ok && audit.outcome.config() == Some(1),
                            "OK",
                            "FAIL",
                        ),
                );
            }
        }
        Experiment::SpaceBound => {
            for &t in &config.t {
                rows.push(space_row(
                    e,
                    rows.len(),
                    config.seed,
                    config.space,
                    t,
                    config.budget,
                )?);
            }
        }
    }
    Ok(rows)
}

fn log_bound(t: usize) -> usize {
    t.ilog2() as usize + 1
}

fn bennett_row(
    e: Experiment,
    trial: usize,
    seed: u64,
    k: usize,
    n: u32,
) -> Result<ReportRow, ExperimentError> {
    let metrics = schedule_metrics(&bennett_schedule(k, n)?)?;
    let formula = (2 * k as u64 - 1).pow(n);
    let bound = n as usize * (k - 1) + 1;
    let reach = metrics
        .first_reach_time
        .map_or("-".to_string(), |t| t.to_string());
    let ok = metrics.total_moves as u64 == formula && metrics.max_pebbles <= bound;
    Ok(RowBuilder::new(e, trial, seed)
        .push(k)
        .push(n)
        .push(metrics.total_moves)
        .push(formula)
        .push(metrics.max_pebbles)
        .push(bound)
        .push(reach)
        .verdict(ok, "OK", "FAIL"))
}

fn sim_row(
    e: Experiment,
    trial: usize,
    seed: u64,
    config: &ExperimentConfig,
    k: usize,
    n: u32,
) -> Result<ReportRow, ExperimentError> {
    let m = IrrevMachine::seeded(config.width, seed)?;
    let init = seeded_input(seed, config.width);
    let run = simulate_bennett(&m, &init, k, n, config.seg_len)?;
    let row = RowBuilder::new(e, trial, seed)
        .push(k)
        .push(n)
        .push(config.seg_len)
        .push(config.width);
    if e == Experiment::SimAudit {
        let back = replay_backward(&Context::with_rule(&m), &run.trace, &run.end)?;
        let bytes = run.start.to_bytes();
        Ok(row.push(run.trace.len()).push(bytes.len()).verdict(
            back.to_bytes() == bytes,
            "RESTORED",
            "DIVERGED",
        ))
    } else {
        let steps = k.pow(n) * config.seg_len;
        let direct = m.run(&init, steps);
        Ok(row
            .push(run.report.peak_checkpoints)
            .push(run.report.peak_history_bits)
            .push(run.report.total_microops)
            .verdict(direct == run.report.final_checkpoint, "MATCH", "MISMATCH"))
    }
}

/// Walks the best schedule for `t` on a seeded chain and reports the peak
/// checkpoint storage against `S(floor(log2 t) + 1)`.
fn space_row(
    e: Experiment,
    trial: usize,
    seed: u64,
    space: usize,
    t: usize,
    budget: usize,
) -> Result<ReportRow, ExperimentError> {
    let best = min_pebbles(t, budget)?;
    let (oracle, _) = build_chain_oracle(space, t, seed)?;
    let run = simulate_chain_walk(&oracle, space, &best.witness, best.min_pebbles)?;
    let space_bits = run.report.peak_checkpoints * space;
    let bound_bits = space * log_bound(t);
    Ok(RowBuilder::new(e, trial, seed)
        .push(t)
        .push(space)
        .push(best.min_pebbles)
        .push(run.report.peak_checkpoints)
        .push(space_bits)
        .push(bound_bits)
        .verdict(space_bits >= bound_bits, "OK", "BELOW_BOUND"))
}

/// Deterministic starting configuration for seeded trials.
pub fn seeded_input(seed: u64, width: usize) -> BitString {
    let mixed = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(17);
    let mask = if width >= 64 {
        u64::MAX
    } else {
        (1 << width) - 1
    };
    BitString::from_u64(mixed & mask, width)
}

/// CSV: the experiment's header, then one line per row.
pub fn emit_report(
    experiment: Experiment,
    rows: &[ReportRow],
    out: impl Write,
) -> Result<(), ExperimentError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(experiment.columns())?;
    for row in rows {
        if row.experiment != experiment {
            return Err(ExperimentError::Config {
                field: "experiment".into(),
                msg: format!("row from {} in a {} report", row.experiment, experiment),
            });
        }
        w.write_record(&row.values)?;
    }
    w.flush()?;
    Ok(())
}
