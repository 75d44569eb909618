use revlab::analysis::{checkpoint_moves, query_events, trace_to_moves};
use revlab::bits::BitString;
use revlab::oracle::build_chain_oracle;
use revlab::pebble::bennett_schedule;
use revlab::revsim::{simulate_bennett, simulate_bennett_oracle, IrrevMachine};

#[test]
fn oracle_trace_replays_as_bennett_schedule() {
    for (k, n) in [
        (2usize, 0u32),
        (2, 1),
        (2, 2),
        (2, 3),
        (3, 1),
        (3, 2),
        (4, 2),
    ] {
        let t = k.pow(n);
        let (oracle, chain) = build_chain_oracle(12, t, 100 + t as u64).unwrap();
        let run = simulate_bennett_oracle(&oracle, 12, k, n).unwrap();
        let moves = trace_to_moves(&query_events(&run.trace), &chain).unwrap();
        assert_eq!(moves, bennett_schedule(k, n).unwrap().moves, "k={k} n={n}");
    }
}

#[test]
fn rule_trace_replays_as_bennett_schedule() {
    let m = IrrevMachine::seeded(10, 9).unwrap();
    for (k, n) in [(2, 2), (2, 3), (3, 2)] {
        let run = simulate_bennett(&m, &BitString::from_u64(1, 10), k, n, 2).unwrap();
        assert_eq!(
            checkpoint_moves(&run.trace).unwrap(),
            bennett_schedule(k, n).unwrap().moves
        );
    }
}

#[test]
fn queries_match_move_count() {
    let (oracle, _) = build_chain_oracle(9, 8, 1).unwrap();
    let run = simulate_bennett_oracle(&oracle, 9, 2, 3).unwrap();
    assert_eq!(run.trace.query_count(), 27);
    assert_eq!(run.report.peak_checkpoints, 4);
}
