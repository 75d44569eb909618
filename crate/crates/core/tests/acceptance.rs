//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS or FAIL line, including when all pass.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revlab::analysis::{
    compress, decompress, find_incompressible, ChainSystem, Description, DescriptionSystem,
    Direction, DuplicateSplice, InitialPebble, PebbleTimeline, TraceSystem, ZeroCollision,
};
use revlab::bits::BitString;
use revlab::eulertour::{binary_in_tree, euler_tour, tour_audit, ExplicitMachine};
use revlab::oracle::{
    build_chain_oracle, rom_access_word, rom_result_bit, separator_decide, Bounds, InputRom,
    OracleTape, TapeOracle,
};
use revlab::pebble::{bennett_schedule, min_pebbles, schedule_metrics};
use revlab::revsim::{
    replay_backward, simulate_bennett, simulate_bennett_oracle, simulate_chain_walk, Context,
    IrrevMachine, SimRun,
};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, u64, Check); 11] = [
        (1, "Bennett schedule figures", 1, bennett_figures),
        (2, "Bennett formula sweep", 5, formula_sweep),
        (3, "minimal pebble counts", 60, minimal_pebbles),
        (4, "backward replay restores start", 30, reversibility_audit),
        (
            5,
            "simulation equals direct run",
            30,
            simulation_correctness,
        ),
        (6, "oracle self-reversibility", 30, oracle_self_reversible),
        (7, "separator ground truth", 10, separator_truth),
        (
            8,
            "compress/decompress round trip",
            60,
            compression_round_trip,
        ),
        (9, "Euler tour equivalence and space", 60, euler_tour_checks),
        (10, "incompressible strings exist", 30, incompressibility),
        (11, "space grows with log t", 60, space_lower_bound),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(limit) => Err(format!(
                "{detail}; took {:.2}s, limit {limit}s",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        match result {
            Ok(detail) => println!(
                "criterion {id:>2} PASS  {name} ({:.2}s): {detail}",
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {id:>2} FAIL  {name} ({:.2}s): {why}",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn bennett_figures() -> Result<String, String> {
    for (k, n, moves, reach, peak) in [(2, 3, 27, 27, 4), (3, 2, 25, 25, 5)] {
        let s = bennett_schedule(k, n).map_err(|e| e.to_string())?;
        let m = schedule_metrics(&s).map_err(|e| e.to_string())?;
        ensure!(m.total_moves == moves, "({k},{n}) moves {}", m.total_moves);
        ensure!(
            m.first_reach_time == Some(reach),
            "({k},{n}) reach {:?}",
            m.first_reach_time
        );
        ensure!(m.max_pebbles == peak, "({k},{n}) peak {}", m.max_pebbles);
    }
    Ok("(2,3): 27/27/4, (3,2): 25/25/5".into())
}

fn formula_sweep() -> Result<String, String> {
    let mut cases = 0;
    for k in 2..=4usize {
        for n in 0..=4u32 {
            let s = bennett_schedule(k, n).map_err(|e| e.to_string())?;
            let m = schedule_metrics(&s).map_err(|e| e.to_string())?;
            ensure!(
                m.total_moves == (2 * k - 1).pow(n),
                "({k},{n}) moves {}",
                m.total_moves
            );
            let bound = n as usize * (k - 1) + 1;
            ensure!(
                m.max_pebbles <= bound,
                "({k},{n}) peak {} > {bound}",
                m.max_pebbles
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} (k, n) pairs"))
}

fn minimal_pebbles() -> Result<String, String> {
    let min = |t| {
        min_pebbles(t, 16)
            .map(|o| o.min_pebbles)
            .map_err(|e| e.to_string())
    };
    for (t, want) in [(1, 1), (2, 2), (3, 2), (4, 3), (8, 4)] {
        ensure!(min(t)? == want, "t={t}: got {}, want {want}", min(t)?);
    }
    let mut seen = Vec::new();
    for t in 1..=12usize {
        let p = min(t)?;
        let bound = t.ilog2() as usize + 1;
        ensure!(p >= bound, "t={t}: {p} < {bound}");
        seen.push(p);
    }
    Ok(format!("t=1..12 -> {seen:?}"))
}

/// 108 seeded runs over k in {2,3}, n in {1,2,3}.
fn seeded_runs() -> impl Iterator<Item = (IrrevMachine, BitString, usize, u32, usize, u64)> {
    (0..108u64).map(|seed| {
        let k = 2 + (seed % 2) as usize;
        let n = 1 + (seed / 2 % 3) as u32;
        let seg_len = 1 + (seed / 6 % 3) as usize;
        let width = 6 + (seed % 7) as usize;
        let m = IrrevMachine::seeded(width, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = BitString::from_u64(rng.gen::<u64>() & ((1 << width) - 1), width);
        (m, init, k, n, seg_len, seed)
    })
}

fn run(m: &IrrevMachine, init: &BitString, k: usize, n: u32, seg: usize) -> Result<SimRun, String> {
    simulate_bennett(m, init, k, n, seg).map_err(|e| e.to_string())
}

fn reversibility_audit() -> Result<String, String> {
    let mut runs = 0;
    for (m, init, k, n, seg_len, seed) in seeded_runs() {
        let r = run(&m, &init, k, n, seg_len)?;
        let back = replay_backward(&Context::with_rule(&m), &r.trace, &r.end)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(
            back.to_bytes() == r.start.to_bytes(),
            "seed {seed}: start state not restored"
        );
        runs += 1;
    }
    Ok(format!("{runs} runs restored bit-exactly"))
}

fn simulation_correctness() -> Result<String, String> {
    let mut runs = 0;
    for (m, init, k, n, seg_len, seed) in seeded_runs() {
        let r = run(&m, &init, k, n, seg_len)?;
        let direct = m.run(&init, k.pow(n) * seg_len);
        ensure!(
            r.report.final_checkpoint == direct,
            "seed {seed}: final checkpoint differs"
        );
        runs += 1;
    }
    Ok(format!("{runs} machines match the direct run"))
}

fn all_tapes(max_len: usize) -> Vec<OracleTape> {
    let mut out = vec![OracleTape::empty()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for t in &layer {
            for s in *b"01#" {
                let mut u: Vec<u8> = t.clone();
                u.push(s);
                next.push(u);
            }
        }
        out.extend(
            next.iter()
                .map(|u| OracleTape::from_symbols(u.clone()).unwrap()),
        );
        layer = next;
    }
    out
}

fn oracle_self_reversible() -> Result<String, String> {
    let short = all_tapes(12);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut calls = 0usize;
    for seed in 0..20u64 {
        let width = 3 + (seed % 3) as usize;
        let t = (1 << width) - 1 - (seed as usize % 3);
        let (oracle, chain) = build_chain_oracle(width, t, seed).map_err(|e| e.to_string())?;
        let rom = InputRom::from_chain(&chain).map_err(|e| e.to_string())?;
        // Longer tapes, biased toward well-formed queries so both oracles
        // take their non-trivial branch.
        let long: Vec<OracleTape> = (0..10_000)
            .map(|i| {
                let len = rng.gen_range(13..40);
                let mut s: Vec<u8> = (0..len)
                    .map(|_| b"01#"[rng.gen_range(0..3)])
                    .collect();
                if i % 2 == 0 {
                    s.retain(|&c| c != b'#');
                }
                OracleTape::from_symbols(s).unwrap()
            })
            .collect();
        for tape in short.iter().chain(&long) {
            ensure!(
                oracle.call(&oracle.call(tape)) == *tape,
                "chain {seed}: {tape:?}"
            );
            ensure!(
                rom_access_word(&rom, &rom_access_word(&rom, tape)) == *tape,
                "rom {seed}: {tape:?}"
            );
            calls += 4;
        }
    }
    Ok(format!(
        "{} tapes per oracle, {calls} calls",
        short.len() + 10_000
    ))
}

fn separator_truth() -> Result<String, String> {
    let mut accepted = 0;
    for seed in 0..100u64 {
        let width = 4 + (seed % 13) as usize;
        let t = (1 + (seed * 7 % 64) as usize).min((1 << width) - 1);
        let (oracle, chain) = build_chain_oracle(width, t, seed).map_err(|e| e.to_string())?;
        let bounds = Bounds::new(width, width * t).map_err(|e| e.to_string())?;
        let out = separator_decide(&oracle, bounds);
        let truth = chain.node(t).first() == Some(true);
        ensure!(
            out.accept == truth,
            "seed {seed}: decided {}, truth {truth}",
            out.accept
        );
        let rom = InputRom::from_chain(&chain).map_err(|e| e.to_string())?;
        ensure!(
            rom_result_bit(&rom, t) == truth,
            "seed {seed}: ROM bit differs"
        );
        accepted += out.accept as usize;
    }
    Ok(format!("100 chains, {accepted} accepted"))
}

fn compression_round_trip() -> Result<String, String> {
    let mut checked = 0;
    let mut mutations = 0;
    for (k, n) in [(2usize, 2u32), (2, 3)] {
        let t = k.pow(n);
        let (oracle, chain) = build_chain_oracle(8, t, 40 + n as u64).map_err(|e| e.to_string())?;
        let r = simulate_bennett_oracle(&oracle, 8, k, n).map_err(|e| e.to_string())?;
        let program: Vec<_> = r.trace.ops().collect();
        let len = r.trace.len() as u64;
        let x = chain.to_bits();
        let taus: Vec<u64> = (0..=6).map(|i| i * len / 6).collect();
        for &tau in &taus {
            for dir in [Direction::Forward, Direction::Backward] {
                let d =
                    compress(&r.trace, &r.start, &chain, tau, dir).map_err(|e| e.to_string())?;
                let wire = Description::from_bytes(&d.to_bytes()).map_err(|e| e.to_string())?;
                let back =
                    decompress(&wire, &program, None).map_err(|e| format!("tau {tau}: {e}"))?;
                ensure!(back == x, "({k},{n}) tau {tau} {dir}: wrong x");
                checked += 1;
                for bad in tampered(&d) {
                    let out = decompress(&bad, &program, None);
                    ensure!(
                        out.ok().as_ref() != Some(&x),
                        "({k},{n}) tau {tau} {dir}: tampering missed"
                    );
                    mutations += 1;
                }
            }
        }
        let majority = PebbleTimeline::build(&revlab::analysis::query_events(&r.trace), &chain);
        for &tau in &taus {
            let p = majority.pebbled(tau).len();
            let d = compress(
                &r.trace,
                &r.start,
                &chain,
                tau,
                majority.majority_direction(tau),
            )
            .map_err(|e| e.to_string())?;
            ensure!(
                2 * d.h() >= p,
                "tau {tau}: h={} below p/2 with p={p}",
                d.h()
            );
        }
    }
    Ok(format!(
        "{checked} round trips, {mutations} mutations rejected"
    ))
}

/// Altered copies of a description, each of which must fail to rebuild `x`.
fn tampered(d: &Description) -> Vec<Description> {
    let mut out = Vec::new();
    for i in 0..d.x_prime.len() {
        let mut m = d.clone();
        let mut bits = m.x_prime.bits().to_vec();
        bits[i] = !bits[i];
        m.x_prime = BitString::from_bits(bits);
        out.push(m);
    }
    for i in 0..d.triples.len() {
        let mut m = d.clone();
        m.triples[i].delta_tau += 1;
        out.push(m);
        let mut m = d.clone();
        m.triples[i].tag = m.triples[i].tag % 3 + 1;
        out.push(m);
    }
    let mut m = d.clone();
    m.direction = match d.direction {
        Direction::Forward => Direction::Backward,
        Direction::Backward => Direction::Forward,
    };
    if !d.triples.is_empty() {
        out.push(m);
    }
    if d.snapshot.len() > 1 {
        let mut m = d.clone();
        m.snapshot.truncate(d.snapshot.len() - 1);
        out.push(m);
    }
    out
}

fn euler_tour_checks() -> Result<String, String> {
    let mut found = 0;
    for seed in 0..100u64 {
        let width = 4 + (seed % 7) as usize;
        let m = ExplicitMachine::random(width, 6, seed).map_err(|e| e.to_string())?;
        let out = euler_tour(&m, width, 1 << 24).map_err(|e| e.to_string())?;
        ensure!(out.config() == m.run_direct(), "seed {seed}: tour {out:?}");
        found += out.config().is_some() as usize;
    }
    let mut lengths = Vec::new();
    let mut peaks = Vec::new();
    for depth in 2..=10 {
        let m = binary_in_tree(depth, 11).map_err(|e| e.to_string())?;
        let audit = tour_audit(&m, 11, 1 << 24).map_err(|e| e.to_string())?;
        ensure!(audit.reverse_ok, "depth {depth}: reverse replay failed");
        lengths.push(audit.outcome.length());
        peaks.push(audit.peak_bits);
    }
    ensure!(
        peaks.windows(2).all(|w| w[0] == w[1]),
        "peak storage varies: {peaks:?}"
    );
    ensure!(
        peaks[0] <= 4 * 11 + 2,
        "peak {} above 4 width_cap + 2",
        peaks[0]
    );
    for w in lengths.windows(2) {
        ensure!(10 * w[1] >= 18 * w[0], "tour lengths {lengths:?}");
    }
    Ok(format!(
        "100 tables ({found} halting), lengths {lengths:?}, peak {} bits",
        peaks[0]
    ))
}

/// Strings of length `len` reachable from some shorter description,
/// counted independently of the library search.
fn check_incompressible(sys: &dyn DescriptionSystem, len: usize) -> Result<(), String> {
    let y = find_incompressible(sys, len).map_err(|e| e.to_string())?;
    ensure!(y.len() == len, "length {}", y.len());
    for dlen in 0..len {
        for v in 0..1u64 << dlen {
            let d = BitString::from_u64(v, dlen);
            ensure!(sys.expand(&d) != y, "{y} has a {dlen}-bit description {d}");
        }
    }
    Ok(())
}

fn incompressibility() -> Result<String, String> {
    let (oracle, chain) = build_chain_oracle(3, 2, 5).map_err(|e| e.to_string())?;
    let r = simulate_bennett_oracle(&oracle, 3, 2, 1).map_err(|e| e.to_string())?;
    let program: Vec<_> = r.trace.ops().collect();
    let (w, t) = (chain.node_width, chain.t());
    let duplicate = DuplicateSplice { node_width: w, t };
    let zero = ZeroCollision { node_width: w, t };
    let trace = TraceSystem {
        program: program.clone(),
        rule: None,
    };
    let initial = InitialPebble::new(program, &r.start, w, t);
    let identity = |d: &BitString| d.clone();
    let systems: Vec<(&str, Box<dyn DescriptionSystem>)> = vec![
        ("identity", Box::new(identity)),
        ("duplicate", Box::new(duplicate)),
        ("zero", Box::new(zero)),
        ("trace", Box::new(trace.clone())),
        ("initial", Box::new(initial.clone())),
        (
            "chain",
            Box::new(ChainSystem {
                duplicate,
                zero,
                trace,
                initial,
            }),
        ),
    ];
    for (name, sys) in &systems {
        for len in 1..=12 {
            check_incompressible(sys.as_ref(), len)
                .map_err(|e| format!("{name} len {len}: {e}"))?;
        }
    }
    Ok(format!("{} systems, lengths 1..=12", systems.len()))
}

fn space_lower_bound() -> Result<String, String> {
    let space = 10;
    let mut bits = Vec::new();
    for t in [2usize, 4, 8, 16] {
        let best = min_pebbles(t, 16).map_err(|e| e.to_string())?;
        let (oracle, _) = build_chain_oracle(space, t, t as u64).map_err(|e| e.to_string())?;
        let r = simulate_chain_walk(&oracle, space, &best.witness, best.min_pebbles)
            .map_err(|e| e.to_string())?;
        let used = r.report.peak_checkpoints * space;
        let bound = space * (t.ilog2() as usize + 1);
        ensure!(used >= bound, "t={t}: {used} bits < {bound}");
        bits.push(used);
    }
    Ok(format!("S=10, peak bits for t=2,4,8,16: {bits:?}"))
}
