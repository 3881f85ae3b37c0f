use strictlin::checker::{
    check_concurrent_implementation, check_general, check_strict, find_strict_linearization, RecordedExecution,
};
use strictlin::explorer::{enumerate_executions, parse_program, ExploreOptions, Projection};
use strictlin::models::adt::default_alphabet;
use strictlin::models::{AfHwQueue, CoarseQueue, HwQueue, HwState, ObjectModel, QueueSpec};
use strictlin::repro::{fig3_execution, FIG2_PROGRAM};
use strictlin::spec::{RenamingFunction, SeqSpec};

fn recorded<M: ObjectModel>(model: &M, text: &str) -> Vec<RecordedExecution<M::State>> {
    let p = parse_program(text).unwrap();
    let init = model.initial_state();
    let opts = ExploreOptions {
        projection: Projection::History,
        ..ExploreOptions::default()
    };
    enumerate_executions(&p, model, &p.initial_client(), &init, &opts)
        .unwrap()
        .iter()
        .map(|r| RecordedExecution::from_result(&init, r).unwrap())
        .collect()
}

#[test]
fn coarse_queue_executions_are_strictly_linearizable() {
    let coarse = CoarseQueue::new(4);
    let report = check_strict(&recorded(&coarse, FIG2_PROGRAM), &coarse.seq_spec()).unwrap();
    assert!(report.passed, "{report}");
}

#[test]
fn hw_queue_fails_strict_and_fig3_is_among_the_failures() {
    let hw = HwQueue::new(4);
    let execs = recorded(&hw, FIG2_PROGRAM);
    let report = check_strict(&execs, &hw.seq_spec()).unwrap();
    assert!(!report.passed);
    let fig3 = fig3_execution().unwrap();
    assert!(execs.contains(&fig3));
    let failing: Vec<&str> = report
        .executions
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.history.as_str())
        .collect();
    assert!(failing.contains(&fig3.history.to_string().as_str()));
    assert!(find_strict_linearization(&fig3, &hw.seq_spec()).unwrap().is_none());
}

#[test]
fn hw_queue_is_generally_linearizable_against_the_queue() {
    let hw = HwQueue::new(4);
    let adt = QueueSpec::standard();
    let rf = RenamingFunction::identity(&adt.methods());
    let report = check_general(&recorded(&hw, FIG2_PROGRAM), &adt, &AfHwQueue, &rf).unwrap();
    assert!(report.passed, "{report}");
}

#[test]
fn hw_concurrent_implementation_verdicts() {
    let hw = HwQueue::new(4);
    let execs = recorded(&hw, FIG2_PROGRAM);
    let states = HwState::enumerate(4, 5, &default_alphabet());
    let adt = QueueSpec::standard();
    let rf = RenamingFunction::identity(&adt.methods());
    // The sequential part fails at the empty array, where the HW dequeue has
    // no outcome; every execution reaches AF(final).
    let report = check_concurrent_implementation(&execs, &hw.seq_spec(), &adt, &AfHwQueue, &rf, &states).unwrap();
    assert!(!report.passed);
    assert!(report.refinement.as_deref().unwrap().contains("no concrete outcome"));
    assert!(report.executions.iter().all(|v| v.passed));

    // Against the blocking queue only the array bound remains: a full array
    // admits no enqueue.
    let blocking = QueueSpec::blocking();
    let report =
        check_concurrent_implementation(&execs, &hw.seq_spec(), &blocking, &AfHwQueue, &rf, &states).unwrap();
    assert!(!report.passed);
    let refinement = report.refinement.as_deref().unwrap();
    assert!(refinement.contains("Enqueue") && refinement.contains("back=5"), "{refinement}");
    assert!(report.executions.iter().all(|v| v.passed));
}

#[test]
fn broken_model_that_loses_a_value_fails_general() {
    use strictlin::history::parse_history;
    let lost = parse_history(
        "t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\n\
         t=2 op=2 inv Dequeue\nt=2 op=2 ret EMPTY\n",
    )
    .unwrap();
    let spec = QueueSpec::standard();
    let exec = RecordedExecution::incomplete(spec.initial_state(), lost);
    let rf = RenamingFunction::identity(&spec.methods());
    let report = check_general(&[exec], &spec, &strictlin::spec::IdentityAf, &rf).unwrap();
    assert!(!report.passed);
    assert!(report.first_failure().unwrap().witness.is_none());
}
