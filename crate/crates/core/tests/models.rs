use std::collections::BTreeSet;

use strictlin::explorer::{explore, parse_program, DEFAULT_BOUND};
use strictlin::models::adt::default_alphabet;
use strictlin::models::{
    run_in_isolation, AfPseudo, CoarseQueue, HwQueue, HwState, MsQueue, MsState, ObjectModel, QueueState,
};
use strictlin::repro::{ms_workloads, FIG2_PROGRAM, SEC52_PROGRAM};
use strictlin::spec::{injectivity_scan, SeqSpec, SpecState};
use strictlin::value::Value;

/// Each method run alone from `state` returns exactly the outcomes of the
/// sequential specification, and does nothing observable where the
/// specification is undefined.
fn agrees_in_isolation<M, Z>(model: &M, spec: &Z, states: &[M::State])
where
    M: ObjectModel,
    Z: SeqSpec<State = M::State>,
{
    for state in states {
        for method in spec.methods() {
            for input in spec.inputs(&method) {
                let local = model.invoke(&method, &input).expect("method exists");
                let iso = run_in_isolation(model, &local, state, 10_000);
                assert!(!iso.truncated);
                let expected: BTreeSet<(M::State, Value)> =
                    spec.apply(&method, state, &input).unwrap().into_iter().collect();
                assert_eq!(iso.returns, expected, "{method}({input}) at {state:?}");
                if expected.is_empty() {
                    assert!(iso.aborts || !iso.modifies_state, "{method}({input}) at {state:?}");
                }
            }
        }
    }
}

#[test]
fn hw_queue_agrees_with_its_specification() {
    let hw = HwQueue::new(4);
    let states = HwState::enumerate(4, 5, &default_alphabet());
    agrees_in_isolation(&hw, &hw.seq_spec(), &states);
}

#[test]
fn ms_queue_agrees_with_its_specification() {
    let ms = MsQueue::new(4);
    let states = MsState::enumerate(4, 4, &default_alphabet());
    agrees_in_isolation(&ms, &ms.seq_spec(), &states);
}

#[test]
fn coarse_queue_agrees_with_its_specification() {
    let coarse = CoarseQueue::new(3);
    let states: Vec<QueueState> = (0..=2)
        .flat_map(|len| {
            itertools::Itertools::multi_cartesian_product((0..len).map(|_| default_alphabet().into_iter()))
                .map(QueueState)
                .collect::<Vec<_>>()
        })
        .collect();
    agrees_in_isolation(&coarse, &coarse.seq_spec(), &states);
}

#[test]
fn ms_invariants_hold_on_reachable_configurations() {
    let ms = MsQueue::new(4);
    for text in ms_workloads() {
        let p = parse_program(&text).unwrap();
        let ex = explore(&p, &ms, &p.initial_client(), &ms.initial_state(), DEFAULT_BOUND).unwrap();
        assert!(!ex.budget_exhausted());
        for c in ex.configs() {
            assert!(c.shared.structural_invariant(), "{}", c.shared.render());
        }
        for c in ex.terminal_configs() {
            assert!(c.shared.is_well_formed(), "{}", c.shared.render());
        }
    }
}

#[test]
fn hw_methods_are_purely_blocking_on_reachable_states() {
    let hw = HwQueue::new(4);
    let mut states = BTreeSet::new();
    for text in [FIG2_PROGRAM, SEC52_PROGRAM] {
        let p = parse_program(text).unwrap();
        let ex = explore(&p, &hw, &p.initial_client(), &hw.initial_state(), DEFAULT_BOUND).unwrap();
        states.extend(ex.configs().map(|c| c.shared.clone()));
    }
    assert!(states.len() > 10);
    let spec = hw.seq_spec();
    for state in &states {
        for method in spec.methods() {
            for input in spec.inputs(&method) {
                let local = hw.invoke(&method, &input).unwrap();
                let iso = run_in_isolation(&hw, &local, state, 10_000);
                assert!(iso.is_purely_blocking(), "{method}({input}) at {}", state.render());
            }
        }
    }
}

#[test]
fn af_pseudo_is_injective_on_canonical_states() {
    let states = MsState::enumerate(4, 4, &default_alphabet());
    let report = injectivity_scan(&AfPseudo, &states).unwrap();
    assert!(report.is_injective());
    assert_eq!(report.certificate.unwrap().len(), states.len());
}
