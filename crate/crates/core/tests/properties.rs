use proptest::prelude::*;

use revlab::bits::BitString;
use revlab::eulertour::{tour_audit, ExplicitMachine};
use revlab::oracle::{build_chain_oracle, rom_access_word, InputRom, OracleTape, TapeOracle};
use revlab::pebble::{Move, PebbleState};
use revlab::revsim::{
    bennett_checkpoint_copy, replay_backward, simulate_bennett, Context, IrrevMachine, VmState,
};

fn tape() -> impl Strategy<Value = OracleTape> {
    prop::collection::vec(prop::sample::select(vec![b'0', b'1', b'#']), 0..24)
        .prop_map(|s| OracleTape::from_symbols(s).unwrap())
}

proptest! {
    #[test]
    fn legal_moves_are_involutions(
        t in 1usize..10,
        picks in prop::collection::vec(0usize..100, 0..40),
    ) {
        let mut state = PebbleState::new(t);
        for p in picks {
            let node = 1 + p % t;
            let mv = if state.is_pebbled(node) { Move::unpebble(node) } else { Move::pebble(node) };
            if let Ok(next) = state.apply_move(mv) {
                prop_assert_eq!(next.apply_move(mv.inverse()).unwrap(), state.clone());
                state = next;
            }
        }
    }

    #[test]
    fn chain_oracle_is_its_own_inverse(seed in any::<u64>(), width in 2usize..7, tape in tape()) {
        let t = (1 << width) - 1;
        let (oracle, chain) = build_chain_oracle(width, t.min(12), seed).unwrap();
        prop_assert_eq!(oracle.call(&oracle.call(&tape)), tape.clone());
        let rom = InputRom::from_chain(&chain).unwrap();
        prop_assert_eq!(rom_access_word(&rom, &rom_access_word(&rom, &tape)), tape);
    }

    #[test]
    fn checkpoint_copy_twice_is_identity(current in any::<u16>(), held in any::<u16>(), slot in 0usize..3) {
        let mut vm = VmState::new(BitString::zeros(16), 3);
        vm.current = BitString::from_u64(current as u64, 16);
        vm.checkpoints[slot] = BitString::from_u64(held as u64, 16);
        vm.occupied[slot] = true;
        let once = bennett_checkpoint_copy(&vm, slot).unwrap();
        prop_assert_eq!(
            once.checkpoints[slot].to_u64().unwrap(),
            (current ^ held) as u64
        );
        prop_assert_eq!(bennett_checkpoint_copy(&once, slot).unwrap(), vm);
    }

    #[test]
    fn seeded_runs_reverse(seed in any::<u64>(), k in 2usize..4, n in 0u32..3, seg in 1usize..4) {
        let m = IrrevMachine::seeded(9, seed).unwrap();
        let init = BitString::from_u64(seed & 0x1ff, 9);
        let run = simulate_bennett(&m, &init, k, n, seg).unwrap();
        prop_assert_eq!(&run.report.final_checkpoint, &m.run(&init, k.pow(n) * seg));
        let back = replay_backward(&Context::with_rule(&m), &run.trace, &run.end).unwrap();
        prop_assert_eq!(back, run.start);
    }

    #[test]
    fn tour_matches_direct_run(seed in any::<u64>(), width in 1usize..9, halt_every in 1u32..10) {
        let m = ExplicitMachine::random(width, halt_every, seed).unwrap();
        let audit = tour_audit(&m, width, 1 << 22).unwrap();
        prop_assert!(audit.reverse_ok);
        prop_assert_eq!(audit.outcome.config(), m.run_direct());
    }
}
