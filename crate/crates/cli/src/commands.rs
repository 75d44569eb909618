use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use revlab::analysis::{
    compress, decompress, find_incompressible, query_events, trace_to_moves, write_size_report,
    ChainSystem, Description, DescriptionSystem, Direction, DuplicateSplice, InitialPebble,
    PebbleTimeline, TraceSystem, ZeroCollision,
};
use revlab::eulertour::{binary_in_tree, euler_tour, tour_audit, ExplicitMachine, TourOutcome};
use revlab::experiment::{
    emit_report, run_experiment, seeded_input, Experiment, ExperimentConfig, ReportRow,
};
use revlab::oracle::{
    build_chain_oracle, rom_result_bit, separator_decide, Bounds, Chain, InputRom,
};
use revlab::pebble::{bennett_schedule, min_pebbles, parse_moves, Move, PebbleState};
use revlab::revsim::{simulate_bennett, simulate_chain_walk, IrrevMachine, SimRun};

use crate::{ChainArgs, Params, RunArgs, TableArgs};

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn build_config(e: Experiment, params: &Params) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::new(e);
    if let Some(path) = &params.config {
        config.apply_text(&read(path)?)?;
        config.experiment = e;
    }
    let flags = [
        ("k", &params.k),
        ("n", &params.n),
        ("t", &params.t),
        ("depth", &params.depth),
        ("space", &params.space),
        ("seg_len", &params.seg_len),
        ("width", &params.width),
        ("seed", &params.seed),
        ("trials", &params.trials),
        ("width_cap", &params.width_cap),
        ("step_cap", &params.step_cap),
        ("halt_every", &params.halt_every),
        ("budget", &params.budget),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    if let Some(p) = &params.output {
        config.output = Some(p.clone());
    }
    Ok(config)
}

fn write_rows(e: Experiment, rows: &[ReportRow], output: Option<&Path>) -> Result<bool> {
    let mut out = sink(output)?;
    emit_report(e, rows, &mut out)?;
    out.flush()?;
    Ok(rows.iter().all(ReportRow::passed))
}

pub fn experiment(e: Experiment, params: &Params) -> Result<bool> {
    let config = build_config(e, params)?;
    let rows = run_experiment(&config)?;
    write_rows(config.experiment, &rows, config.output.as_deref())
}

pub fn bennett_moves(params: &Params) -> Result<bool> {
    let config = build_config(Experiment::PebbleBennett, params)?;
    let schedule = bennett_schedule(config.k[0], config.n[0])?;
    let mut out = sink(config.output.as_deref())?;
    out.write_all(schedule.to_text().as_bytes())?;
    Ok(true)
}

pub fn search_witness(params: &Params) -> Result<bool> {
    let config = build_config(Experiment::PebbleSearch, params)?;
    let found = min_pebbles(config.t[0], config.budget)?;
    let mut out = sink(config.output.as_deref())?;
    for mv in &found.witness {
        writeln!(out, "{mv}")?;
    }
    Ok(true)
}

pub fn save_sim_trace(params: &Params, path: &Path) -> Result<()> {
    let config = build_config(Experiment::SimBennett, params)?;
    config.validate()?;
    let m = IrrevMachine::seeded(config.width, config.seed)?;
    let init = seeded_input(config.seed, config.width);
    let run = simulate_bennett(&m, &init, config.k[0], config.n[0], config.seg_len)?;
    fs::write(path, run.trace.to_text()).with_context(|| format!("writing {}", path.display()))
}

fn load_chain(args: &ChainArgs) -> Result<Chain> {
    match &args.chain {
        Some(path) => Ok(Chain::from_text(&read(path)?)?),
        None => Ok(build_chain_oracle(args.space, args.t, args.seed)?.1),
    }
}

pub fn oracle_build(args: &ChainArgs, output: Option<&Path>) -> Result<bool> {
    let chain = load_chain(args)?;
    sink(output)?.write_all(chain.to_text().as_bytes())?;
    Ok(true)
}

pub fn oracle_separator(
    args: &ChainArgs,
    trials: Option<usize>,
    output: Option<std::path::PathBuf>,
) -> Result<bool> {
    if let Some(trials) = trials {
        if args.chain.is_some() {
            bail!("--trials draws seeded chains and cannot be combined with --chain");
        }
        let params = Params {
            space: Some(args.space.to_string()),
            t: Some(args.t.to_string()),
            seed: Some(args.seed.to_string()),
            trials: Some(trials.to_string()),
            output,
            ..Params::default()
        };
        return experiment(Experiment::OracleSeparator, &params);
    }
    let chain = load_chain(args)?;
    let bounds = Bounds::new(chain.node_width, chain.node_width * chain.t())?;
    let out = separator_decide(&chain.oracle(), bounds);
    let mut w = sink(output.as_deref())?;
    writeln!(
        w,
        "{} final={} calls={}",
        if out.accept { "accept" } else { "reject" },
        out.final_node.to_hex(),
        out.oracle_calls
    )?;
    Ok(out.accept)
}

pub fn oracle_rom(args: &ChainArgs, output: Option<&Path>) -> Result<bool> {
    let chain = load_chain(args)?;
    let rom = InputRom::from_chain(&chain)?;
    let bit = rom_result_bit(&rom, chain.t());
    sink(output)?.write_all(rom.to_text().as_bytes())?;
    eprintln!("result bit {}", bit as u8);
    Ok(bit)
}

/// The chain, the moves walked on it and the resulting run.
struct Walk {
    chain: Chain,
    run: SimRun,
}

fn walk(args: &RunArgs) -> Result<Walk> {
    let moves: Vec<Move> = match &args.moves {
        Some(path) => parse_moves(&read(path)?)?,
        None => bennett_schedule(args.k, args.n)?.moves,
    };
    let chain = match &args.chain {
        Some(path) => Chain::from_text(&read(path)?)?,
        None => {
            let t = moves.iter().map(|m| m.node).max().unwrap_or(1);
            build_chain_oracle(args.space, t, args.seed)?.1
        }
    };
    let mut state = PebbleState::new(chain.t());
    let mut capacity = 1;
    for &mv in &moves {
        state.apply_in_place(mv)?;
        capacity = capacity.max(state.count());
    }
    let run = simulate_chain_walk(&chain.oracle(), chain.node_width, &moves, capacity)?;
    if let Some(path) = &args.trace_out {
        fs::write(path, run.trace.to_text())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Walk { chain, run })
}

pub fn analyze_pebbles(args: &RunArgs, derive: bool, output: Option<&Path>) -> Result<bool> {
    let Walk { chain, run } = walk(args)?;
    let events = query_events(&run.trace);
    let mut out = sink(output)?;
    if derive {
        let moves = trace_to_moves(&events, &chain)?;
        for mv in &moves {
            writeln!(out, "{mv}")?;
        }
        return Ok(moves == run.moves);
    }
    let timeline = PebbleTimeline::build(&events, &chain);
    writeln!(out, "tau,count,pebbled,majority")?;
    for tau in std::iter::once(0).chain(timeline.event_times()) {
        let set = timeline.pebbled(tau);
        let nodes: Vec<String> = set.iter().map(usize::to_string).collect();
        writeln!(
            out,
            "{tau},{},{},{}",
            set.len(),
            nodes.join(" "),
            timeline.majority_direction(tau)
        )?;
    }
    Ok(true)
}

fn print_sizes(d: &Description) -> Result<()> {
    write_size_report(&d.sizes()?, io::stdout().lock())?;
    Ok(())
}

pub fn analyze_compress(
    args: &RunArgs,
    tau: u64,
    direction: Option<&str>,
    output: &Path,
    report_sizes: bool,
) -> Result<bool> {
    let Walk { chain, run } = walk(args)?;
    let direction = match direction {
        Some(s) => s.parse::<Direction>().map_err(|e| anyhow!("{e}"))?,
        None => PebbleTimeline::build(&query_events(&run.trace), &chain).majority_direction(tau),
    };
    let d = compress(&run.trace, &run.start, &chain, tau, direction)?;
    fs::write(output, d.to_bytes()).with_context(|| format!("writing {}", output.display()))?;
    if report_sizes {
        print_sizes(&d)?;
    } else {
        println!("h={} direction={direction}", d.h());
    }
    Ok(true)
}

pub fn analyze_decompress(args: &RunArgs, input: &Path, report_sizes: bool) -> Result<bool> {
    let Walk { chain, run } = walk(args)?;
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let d = Description::from_bytes(&bytes)?;
    let program: Vec<_> = run.trace.ops().collect();
    let x = decompress(&d, &program, None)?;
    if report_sizes {
        print_sizes(&d)?;
    } else {
        println!("{}", x.to_hex());
    }
    Ok(x == chain.to_bits())
}

pub fn analyze_incompressible(args: &RunArgs, system: &str, len: usize) -> Result<bool> {
    let Walk { chain, run } = walk(args)?;
    let (width, t) = (chain.node_width, chain.t());
    let program: Vec<_> = run.trace.ops().collect();
    let duplicate = DuplicateSplice {
        node_width: width,
        t,
    };
    let zero = ZeroCollision {
        node_width: width,
        t,
    };
    let trace = TraceSystem {
        program: program.clone(),
        rule: None,
    };
    let initial = InitialPebble::new(program, &run.start, width, t);
    let sys: Box<dyn DescriptionSystem> = match system {
        "duplicate" => Box::new(duplicate),
        "zero" => Box::new(zero),
        "trace" => Box::new(trace),
        "initial" => Box::new(initial),
        "chain" => Box::new(ChainSystem {
            duplicate,
            zero,
            trace,
            initial,
        }),
        other => bail!("unknown description system {other:?}"),
    };
    println!("{}", find_incompressible(sys.as_ref(), len)?);
    Ok(true)
}

fn load_table(args: &TableArgs) -> Result<ExplicitMachine> {
    match (&args.table, args.depth, args.random) {
        (Some(path), None, None) => Ok(ExplicitMachine::from_text(&read(path)?)?),
        (None, Some(depth), None) => {
            let width = args.width_cap.unwrap_or(depth as usize + 1);
            Ok(binary_in_tree(depth, width)?)
        }
        (None, None, Some(width)) => {
            Ok(ExplicitMachine::random(width, args.halt_every, args.seed)?)
        }
        _ => bail!("give exactly one of --table, --depth or --random"),
    }
}

pub fn euler_run(args: &TableArgs) -> Result<bool> {
    let m = load_table(args)?;
    let cap = args.width_cap.unwrap_or(m.width());
    match euler_tour(&m, cap, args.step_cap)? {
        TourOutcome::Found {
            config,
            found_at,
            length,
        } => {
            println!("found {config:x} at step {found_at}, tour length {length}");
            Ok(true)
        }
        TourOutcome::NotFound { length } => {
            println!("not found, tour length {length}");
            Ok(false)
        }
    }
}

pub fn euler_audit(args: &TableArgs) -> Result<bool> {
    let m = load_table(args)?;
    let cap = args.width_cap.unwrap_or(m.width());
    let audit = tour_audit(&m, cap, args.step_cap)?;
    let found = audit
        .outcome
        .config()
        .map_or_else(|| "none".to_string(), |c| format!("{c:x}"));
    println!(
        "states={} length={} found={found} peak_bits={} reverse={}",
        audit.states_checked,
        audit.outcome.length(),
        audit.peak_bits,
        if audit.reverse_ok { "ok" } else { "FAILED" }
    );
    Ok(audit.reverse_ok)
}
