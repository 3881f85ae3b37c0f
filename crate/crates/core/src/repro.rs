//! Named reproductions. The command-line `reproduce` subcommand and the
//! acceptance suite both run these.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::checker::{
    brute_force_is_linearizable, brute_force_linearizations, check_concurrent_implementation, check_general,
    check_strict, count_linearization_orders, find_linearization, find_strict_linearization, CheckError,
    RecordedExecution,
};
use crate::explorer::{
    compare_theorem6, detect_divergence_theorem10, enumerate_executions, explore, parse_program, replay_schedule,
    run_atomic, AtomicModel, ExploreError, ExploreOptions, FinalState, Outcome, Program, Projection, DEFAULT_BOUND,
};
use crate::history::{linearizes, linearizes_by_bijection, Event, History, Operation};
use crate::models::adt::{default_alphabet, DEQUEUE, ENQUEUE};
use crate::models::{
    AfHwQueue, AfMultiset, AfPseudo, CoarseQueue, HwQueue, HwQueueSeq, MsQueue, MsQueueSeq, MsState, MultisetAdt,
    ObjectModel, PseudoQueueAdt, QueueSpec,
};
use crate::spec::{injectivity_scan, RenamingFunction, SeqSpec, SpecState};
use crate::value::Value;

/// Two enqueuers and a dequeuer on one queue.
pub const FIG2_PROGRAM: &str = "\
thread { call Q.Enqueue('c') }
thread { call Q.Enqueue('d') }
thread { call Q.Dequeue() }
";

/// Thread schedule of the execution in which the dequeuer takes `d` while
/// `c` ends up in the first slot.
pub const FIG3_SCHEDULE: [u32; 12] = [1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 1];

/// A dequeue racing an enqueue, with the result observed by the client.
pub const SEC62_PROGRAM: &str = "\
thread { call y = Q.Dequeue() }
thread { call Q.Enqueue('c') }
";

/// Three phases: two enqueues and a dequeue; a client write into the array;
/// two more dequeues. The client write can leave a reserved slot empty.
pub const SEC52_PROGRAM: &str = "\
var x = 'x'
var p1 = 0
var p2 = 0
var p3 = 0
var w = 0
thread {
  call Q.Enqueue('c'); let p1 = 1
  await p1 == 1 && p2 == 1 && p3 == 1
  write Q.items[1] <- x; let w = 1
  call Q.Dequeue()
}
thread {
  call Q.Enqueue('d'); let p2 = 1
  await w == 1
  call Q.Dequeue()
}
thread { call Q.Dequeue(); let p3 = 1 }
";

pub const FUZZ_SEED: u64 = 0x5eed_0002;
pub const FUZZ_TRIPLES: usize = 1000;
pub const PROGRAM_SEED: u64 = 0x5eed_0008;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Reproduction {
    pub name: &'static str,
    /// Acceptance criterion it backs.
    pub criterion: u8,
    pub summary: &'static str,
}

pub const CATALOG: &[Reproduction] = &[
    Reproduction {
        name: "fig2",
        criterion: 1,
        summary: "final states of Enqueue(c) | Enqueue(d) | Dequeue on hw-queue and on its atomic version",
    },
    Reproduction {
        name: "fig3",
        criterion: 2,
        summary: "the recorded execution is generally but not strictly linearizable",
    },
    Reproduction {
        name: "sec62-observation",
        criterion: 3,
        summary: "a client observes different dequeue results on hw-queue and on adt-queue",
    },
    Reproduction {
        name: "sec52-divergence",
        criterion: 4,
        summary: "a three-phase program diverges on hw-queue but not on its atomic version",
    },
    Reproduction {
        name: "prop2-fuzz",
        criterion: 5,
        summary: "transitivity of the linearizability relation on generated triples",
    },
    Reproduction {
        name: "oracle-equivalence",
        criterion: 6,
        summary: "search checker against permutation oracle on all small two-thread queue histories",
    },
    Reproduction {
        name: "propH-msqueue-strict",
        criterion: 7,
        summary: "ms-queue strict linearizability and implementation of pseudo-queue and multiset",
    },
    Reproduction {
        name: "theorem6-control",
        criterion: 8,
        summary: "client traces and final states of coarse-queue match its atomic version; hw-queue differs",
    },
];

#[derive(Debug, thiserror::Error)]
pub enum ReproError {
    #[error("unknown reproduction `{0}` (try `list`)")]
    Unknown(String),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Spec(#[from] crate::spec::SpecError),
    #[error("{0}")]
    Program(String),
}

/// Result of one reproduction.
#[derive(Clone, Debug, Serialize)]
pub struct ReproOutput {
    pub name: String,
    pub criterion: u8,
    pub passed: bool,
    /// One-line verdict.
    pub summary: String,
    pub text: String,
    pub details: serde_json::Value,
    pub millis: u128,
}

pub fn reproduce(name: &str) -> Result<ReproOutput, ReproError> {
    let entry = CATALOG
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| ReproError::Unknown(name.into()))?;
    let started = Instant::now();
    let (passed, summary, text, details) = match entry.name {
        "fig2" => fig2()?,
        "fig3" => fig3()?,
        "sec62-observation" => sec62()?,
        "sec52-divergence" => sec52()?,
        "prop2-fuzz" => prop2_fuzz(FUZZ_SEED, FUZZ_TRIPLES)?,
        "oracle-equivalence" => oracle_equivalence(5)?,
        "propH-msqueue-strict" => msqueue_checks(4)?,
        "theorem6-control" => theorem6_control()?,
        _ => unreachable!("catalog entries are dispatched"),
    };
    Ok(ReproOutput {
        name: entry.name.into(),
        criterion: entry.criterion,
        passed,
        summary,
        text,
        details,
        millis: started.elapsed().as_millis(),
    })
}

pub fn catalog_text() -> String {
    CATALOG
        .iter()
        .map(|r| format!("{:<22} {}\n", r.name, r.summary))
        .collect()
}

type Parts = (bool, String, String, serde_json::Value);

fn program(text: &str) -> Result<Program, ReproError> {
    parse_program(text).map_err(|e| ReproError::Program(e.to_string()))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn shared_states<S: SpecState>(finals: &BTreeSet<FinalState<S>>) -> Vec<String> {
    finals
        .iter()
        .filter_map(|f| match f {
            FinalState::State { shared, .. } => Some(shared.render()),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Rendered final object states of [`FIG2_PROGRAM`] on hw-queue (N=4) and on
/// the atomic version of its specification.
pub fn fig2_states() -> Result<(Vec<String>, Vec<String>), ReproError> {
    let p = program(FIG2_PROGRAM)?;
    let hw = HwQueue::new(4);
    let client = p.initial_client();
    let concrete = explore(&p, &hw, &client, &hw.initial_state(), DEFAULT_BOUND)?;
    let atomic = explore(&p, &AtomicModel::new(hw.seq_spec()), &client, &hw.initial_state(), DEFAULT_BOUND)?;
    Ok((shared_states(&concrete.final_states()), shared_states(&atomic.final_states())))
}

fn fig2() -> Result<Parts, ReproError> {
    let (concrete, atomic) = fig2_states()?;
    let subset = atomic.iter().all(|s| concrete.contains(s));
    let passed = concrete.len() == 4 && atomic.len() == 2 && subset;
    let mut text = String::new();
    writeln!(text, "P(hw-queue,N=4): {} final states", concrete.len()).unwrap();
    for s in &concrete {
        writeln!(text, "  {s}").unwrap();
    }
    writeln!(text, "P(ato(hw-queue-seq)): {} final states", atomic.len()).unwrap();
    for s in &atomic {
        writeln!(text, "  {s}").unwrap();
    }
    writeln!(text, "atomic states are a subset: {}", yes(subset)).unwrap();
    let summary = format!("{} concrete final states, {} atomic, subset: {}", concrete.len(), atomic.len(), yes(subset));
    Ok((passed, summary, text, json!({ "concrete": concrete, "atomic": atomic })))
}

/// The scheduled two-enqueue, one-dequeue execution, recorded on hw-queue (N=4).
pub fn fig3_execution() -> Result<RecordedExecution<crate::models::HwState>, ReproError> {
    let p = program(FIG2_PROGRAM)?;
    let hw = HwQueue::new(4);
    let initial = hw.initial_state();
    let result = replay_schedule(&p, &hw, &p.initial_client(), &initial, &FIG3_SCHEDULE)?;
    Ok(RecordedExecution::from_result(&initial, &result)?)
}

fn fig3() -> Result<Parts, ReproError> {
    let exec = fig3_execution()?;
    let seq = HwQueueSeq::new(4);
    let adt = QueueSpec::standard();
    let rf = RenamingFunction::identity(&adt.methods());
    let strict = find_strict_linearization(&exec, &seq)?;
    let loose = find_linearization(&exec, &seq)?;
    let general = check_general(std::slice::from_ref(&exec), &adt, &AfHwQueue, &rf)?;
    let recorded = exec.final_state().map(SpecState::render).unwrap_or_default();
    let legal: Vec<String> = loose
        .as_ref()
        .map(|l| l.finals.iter().map(SpecState::render).collect())
        .unwrap_or_default();
    let orders = count_linearization_orders(&exec.history)?;
    let brute = brute_force_linearizations(&exec.history)?.len();
    let passed = strict.is_none() && general.passed && loose.is_some() && !legal.contains(&recorded);
    let mut text = String::new();
    writeln!(text, "recorded history:").unwrap();
    write!(text, "{}", exec.history).unwrap();
    writeln!(text, "recorded final state: {recorded}").unwrap();
    if let Some(l) = &loose {
        writeln!(text, "only linearization against hw-queue-seq:").unwrap();
        write!(text, "{}", l.witness).unwrap();
        writeln!(text, "its legal final states: {}", legal.join(", ")).unwrap();
    }
    writeln!(text, "strict (hw-queue-seq): {}", if strict.is_some() { "pass" } else { "fail" }).unwrap();
    writeln!(text, "general (adt-queue, af-hw-queue): {}", if general.passed { "pass" } else { "fail" }).unwrap();
    writeln!(text, "orders extending happened-before: {orders} (permutation oracle: {brute})").unwrap();
    let summary = format!(
        "strict {}, general {}; recorded {recorded} vs legal {}",
        if strict.is_some() { "pass" } else { "fail" },
        if general.passed { "pass" } else { "fail" },
        legal.join(", ")
    );
    Ok((
        passed,
        summary,
        text,
        json!({
            "history": exec.history.to_string(),
            "recorded_final": recorded,
            "legal_finals": legal,
            "strict": strict.is_some(),
            "general": general.passed,
            "orders": orders,
            "brute_force_orders": brute,
        }),
    ))
}

fn y_values<S>(results: &[crate::explorer::ExecutionResult<S>]) -> Vec<String> {
    results
        .iter()
        .filter_map(|r| match &r.outcome {
            Outcome::Terminated { client, .. } => client.get("y").map(Value::to_string),
            _ => None,
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Final values of `y` in [`SEC62_PROGRAM`] on hw-queue and on adt-queue.
pub fn sec62_observations() -> Result<(Vec<String>, Vec<String>), ReproError> {
    let p = program(SEC62_PROGRAM)?;
    let opts = ExploreOptions {
        projection: Projection::Client,
        ..ExploreOptions::default()
    };
    let hw = HwQueue::new(4);
    let on_hw = enumerate_executions(&p, &hw, &p.initial_client(), &hw.initial_state(), &opts)?;
    let adt = QueueSpec::standard();
    let on_adt = run_atomic(&p, &adt, &p.initial_client(), &adt.initial_state(), &opts)?;
    Ok((y_values(&on_hw), y_values(&on_adt)))
}

fn sec62() -> Result<Parts, ReproError> {
    let (hw, adt) = sec62_observations()?;
    let passed = hw == ["'c'"] && adt == ["'c'", "EMPTY"];
    let summary = format!("y on hw-queue: {{{}}}; y on adt-queue: {{{}}}", hw.join(", "), adt.join(", "));
    let text = format!("{summary}\nobservations differ: {}\n", yes(hw != adt));
    Ok((passed, summary, text, json!({ "hw_queue": hw, "adt_queue": adt })))
}

fn sec52() -> Result<Parts, ReproError> {
    let p = program(SEC52_PROGRAM)?;
    let hw = HwQueue::new(4);
    let report = detect_divergence_theorem10(
        &p,
        &hw,
        &hw.seq_spec(),
        &p.initial_client(),
        &hw.initial_state(),
        DEFAULT_BOUND,
    )?;
    let word = |d: &crate::explorer::DivergenceSummary| {
        if d.diverges() {
            "divergent schedule found"
        } else {
            "all schedules terminate"
        }
    };
    let summary = format!("P(HW): {}; P(Ato_HW): {}", word(&report.concrete), word(&report.atomic));
    let passed = report.concrete.object_divergent
        && !report.atomic.diverges()
        && !report.concrete.budget_exhausted
        && !report.atomic.budget_exhausted;
    let text = format!("{summary}\n{report}");
    Ok((passed, summary, text, serde_json::to_value(&report).expect("serialises")))
}

fn random_history(rng: &mut ChaCha8Rng) -> History {
    let threads = rng.gen_range(1..=3u32);
    let total = rng.gen_range(1..=6usize);
    let values = [Value::Unit, Value::sym("a"), Value::sym("b"), Value::Empty];
    let mut per_thread: Vec<Vec<Event>> = vec![Vec::new(); threads as usize];
    for op in 1..=total as u32 {
        let t = rng.gen_range(1..=threads);
        let (method, arg) = if rng.gen_bool(0.5) {
            (ENQUEUE, if rng.gen_bool(0.5) { Value::sym("a") } else { Value::sym("b") })
        } else {
            (DEQUEUE, Value::Unit)
        };
        let events = &mut per_thread[(t - 1) as usize];
        events.push(Event::inv(t, op, method, arg));
        events.push(Event::ret(t, op, values.choose(rng).expect("non-empty").clone()));
    }
    for events in per_thread.iter_mut() {
        if !events.is_empty() && rng.gen_bool(0.25) {
            events.pop();
        }
    }
    let mut cursors = vec![0usize; per_thread.len()];
    let mut merged = Vec::new();
    loop {
        let live: Vec<usize> = (0..per_thread.len())
            .filter(|&i| cursors[i] < per_thread[i].len())
            .collect();
        let Some(&i) = live.choose(rng) else {
            break;
        };
        merged.push(per_thread[i][cursors[i]].clone());
        cursors[i] += 1;
    }
    History::new(merged).expect("generated history is well-formed")
}

/// Applies up to `steps` adjacent swaps of events from different threads,
/// never moving an invocation ahead of a response. Each swap keeps the
/// per-thread projections and only adds happened-before pairs.
fn tighten(h: &History, rng: &mut ChaCha8Rng, steps: usize) -> History {
    let mut events = h.events().to_vec();
    for _ in 0..steps {
        if events.len() < 2 {
            break;
        }
        let i = rng.gen_range(0..events.len() - 1);
        let (a, b) = (&events[i], &events[i + 1]);
        if a.thread != b.thread && !(a.is_response() && b.is_inv()) {
            events.swap(i, i + 1);
        }
    }
    History::new(events).expect("swaps keep histories well-formed")
}

/// Triples `h1 ⊑ h2 ⊑ h3` built by [`tighten`]; returns `(generated,
/// failures)` where a failure is a triple with `h1 ⋢ h3`.
pub fn prop2_fuzz_counts(seed: u64, triples: usize) -> (usize, Vec<(History, History, History)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..triples {
        let h1 = random_history(&mut rng);
        let s1 = rng.gen_range(0..12);
        let h2 = tighten(&h1, &mut rng, s1);
        let s2 = rng.gen_range(0..12);
        let h3 = tighten(&h2, &mut rng, s2);
        assert!(linearizes(&h1, &h2) && linearizes(&h2, &h3), "construction broke ⊑");
        if !(linearizes(&h1, &h3) && linearizes_by_bijection(&h1, &h3)) {
            failures.push((h1, h2, h3));
        }
    }
    (triples, failures)
}

fn prop2_fuzz(seed: u64, triples: usize) -> Result<Parts, ReproError> {
    let (n, failures) = prop2_fuzz_counts(seed, triples);
    let summary = format!("{n} triples, {} transitivity failures (seed {seed:#x})", failures.len());
    let mut text = format!("{summary}\n");
    for (h1, h2, h3) in failures.iter().take(3) {
        writeln!(text, "h1:\n{h1}h2:\n{h2}h3:\n{h3}").unwrap();
    }
    Ok((failures.is_empty(), summary, text, json!({ "triples": n, "failures": failures.len(), "seed": seed })))
}

#[derive(Clone, Copy)]
enum Slot {
    Enq(&'static str),
    Deq(Option<&'static str>),
}

fn op_events(thread: u32, op: u32, slot: Slot, pending: bool) -> Vec<Event> {
    let (inv, ret) = match slot {
        Slot::Enq(x) => (Event::inv(thread, op, ENQUEUE, Value::sym(x)), Event::ret(thread, op, Value::Unit)),
        Slot::Deq(r) => (
            Event::inv(thread, op, DEQUEUE, Value::Unit),
            Event::ret(thread, op, r.map_or(Value::Empty, Value::sym)),
        ),
    };
    if pending {
        vec![inv]
    } else {
        vec![inv, ret]
    }
}

fn sequences(len: usize, last_pending: bool) -> Vec<Vec<Slot>> {
    let complete = [
        Slot::Enq("a"),
        Slot::Enq("b"),
        Slot::Deq(Some("a")),
        Slot::Deq(Some("b")),
        Slot::Deq(None),
    ];
    let pending = [Slot::Enq("a"), Slot::Enq("b"), Slot::Deq(None)];
    let mut out: Vec<Vec<Slot>> = vec![Vec::new()];
    for i in 0..len {
        let choices: &[Slot] = if last_pending && i + 1 == len { &pending } else { &complete };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}

/// Every two-thread history of at most `max_ops` operations over
/// `{Enqueue a, Enqueue b, Dequeue}` with dequeue results in `{a, b, EMPTY}`;
/// each thread's last operation may be pending. Interleavings that induce the
/// same happened-before relation are generated once.
pub fn two_thread_histories(max_ops: usize) -> Vec<History> {
    let mut out = Vec::new();
    for n in 0..=max_ops {
        for k in 0..=n {
            let m = n - k;
            for p1 in [false, true] {
                for p2 in [false, true] {
                    if (p1 && k == 0) || (p2 && m == 0) {
                        continue;
                    }
                    for s1 in sequences(k, p1) {
                        for s2 in sequences(m, p2) {
                            let t1: Vec<Event> = s1
                                .iter()
                                .enumerate()
                                .flat_map(|(i, &s)| op_events(1, i as u32 + 1, s, p1 && i + 1 == k))
                                .collect();
                            let t2: Vec<Event> = s2
                                .iter()
                                .enumerate()
                                .flat_map(|(i, &s)| op_events(2, (k + i) as u32 + 1, s, p2 && i + 1 == m))
                                .collect();
                            interleave(&t1, &t2, &mut out);
                        }
                    }
                }
            }
        }
    }
    out
}

fn interleave(t1: &[Event], t2: &[Event], out: &mut Vec<History>) {
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let total = t1.len() + t2.len();
    for positions in itertools::Itertools::combinations(0..total, t1.len()) {
        let mut events = Vec::with_capacity(total);
        let (mut i, mut j) = (0, 0);
        for slot in 0..total {
            if positions.contains(&slot) {
                events.push(t1[i].clone());
                i += 1;
            } else {
                events.push(t2[j].clone());
                j += 1;
            }
        }
        let h = History::new(events).expect("merged threads are well-formed");
        let key: Vec<(usize, usize)> = h
            .happened_before()
            .pairs()
            .iter()
            .map(|(a, b)| (a.0 as usize, b.0 as usize))
            .collect();
        if seen.insert(key) {
            out.push(h);
        }
    }
}

fn oracle_candidates(op: &Operation) -> Vec<Value> {
    if op.method == ENQUEUE {
        vec![Value::Unit]
    } else {
        vec![Value::sym("a"), Value::sym("b"), Value::Empty]
    }
}

/// `(histories, linearizable, disagreements)` for the search checker against
/// the permutation oracle over [`two_thread_histories`].
pub fn oracle_equivalence_counts(max_ops: usize) -> Result<(usize, usize, Vec<History>), CheckError> {
    let spec = QueueSpec::standard();
    let start = spec.initial_state();
    let mut linearizable = 0;
    let mut disagreements = Vec::new();
    let histories = two_thread_histories(max_ops);
    for h in &histories {
        let exec = RecordedExecution::incomplete(start.clone(), h.clone());
        let fast = find_linearization(&exec, &spec)?;
        if let Some(l) = &fast {
            let valid = linearizes(&l.completion, &l.witness) && !l.finals.is_empty();
            if !valid {
                disagreements.push(h.clone());
                continue;
            }
        }
        let oracle = brute_force_is_linearizable(&spec, &start, h, oracle_candidates)?;
        if fast.is_some() != oracle {
            disagreements.push(h.clone());
        }
        linearizable += usize::from(oracle);
    }
    Ok((histories.len(), linearizable, disagreements))
}

fn oracle_equivalence(max_ops: usize) -> Result<Parts, ReproError> {
    let (n, lin, bad) = oracle_equivalence_counts(max_ops)?;
    let summary = format!("{n} histories ({lin} linearizable), {} disagreements", bad.len());
    let mut text = format!("{summary}\n");
    for h in bad.iter().take(3) {
        writeln!(text, "disagreement:\n{h}").unwrap();
    }
    Ok((
        bad.is_empty(),
        summary,
        text,
        json!({ "histories": n, "linearizable": lin, "disagreements": bad.len() }),
    ))
}

/// Two-thread programs with two calls per thread over `{Enqueue a, Enqueue
/// b, Dequeue}`, skipping those with four enqueues (they overflow a pool of
/// four nodes).
pub fn ms_workloads() -> Vec<String> {
    let calls = ["call Q.Enqueue('a')", "call Q.Enqueue('b')", "call y = Q.Dequeue()"];
    let mut out = Vec::new();
    for a in calls {
        for b in calls {
            for c in calls {
                for d in calls {
                    let enqueues = [a, b, c, d].iter().filter(|s| s.contains("Enqueue")).count();
                    if enqueues == 4 {
                        continue;
                    }
                    out.push(format!("var y = 0\nthread {{ {a}; {b} }}\nthread {{ {c}; {d} }}\n"));
                }
            }
        }
    }
    out
}

fn msqueue_checks(p: usize) -> Result<Parts, ReproError> {
    let model = MsQueue::new(p);
    let seq = MsQueueSeq::new(p);
    let initial = model.initial_state();
    let alphabet = default_alphabet();
    // Sampled states keep a free node so that Enqueue stays defined.
    let sampled = MsState::enumerate(p, p - 1, &alphabet);
    let all_states = MsState::enumerate(p, p, &alphabet);
    let rf = RenamingFunction::identity(&seq.methods());
    let rf_multiset = RenamingFunction::new([(ENQUEUE, crate::models::adt::ADD), (DEQUEUE, crate::models::adt::REMOVE)])
        .expect("bijective");
    let opts = ExploreOptions {
        projection: Projection::History,
        ..ExploreOptions::default()
    };
    let mut execs = Vec::new();
    let workloads = ms_workloads();
    for text in &workloads {
        let prog = program(text)?;
        for r in enumerate_executions(&prog, &model, &prog.initial_client(), &initial, &opts)? {
            if matches!(r.outcome, Outcome::BudgetExhausted) {
                return Err(ReproError::Program(format!("budget exhausted on\n{text}")));
            }
            execs.push(RecordedExecution::from_result(&initial, &r)?);
        }
    }
    let strict = check_strict(&execs, &seq)?;
    let pseudo = check_concurrent_implementation(&execs, &seq, &PseudoQueueAdt::new(), &AfPseudo, &rf, &sampled)?;
    let injectivity = injectivity_scan(&AfPseudo, &all_states)?;
    let multiset = check_concurrent_implementation(&execs, &seq, &MultisetAdt::new(), &AfMultiset, &rf_multiset, &sampled)?;
    let parts = [
        ("(a) strict vs ms-queue-seq", strict.passed),
        ("(b) impl of adt-pseudo-queue via af-pseudo", pseudo.passed),
        ("(b) af-pseudo injective", injectivity.is_injective()),
        ("(c) impl of adt-multiset via af-multiset", multiset.passed),
    ];
    let passed = parts.iter().all(|(_, ok)| *ok);
    let mut text = format!(
        "ms-queue,P={p}: {} workloads, {} executions, {} sampled states\n",
        workloads.len(),
        execs.len(),
        sampled.len()
    );
    for (what, ok) in parts {
        writeln!(text, "{what}: {}", if ok { "pass" } else { "fail" }).unwrap();
    }
    writeln!(
        text,
        "af-pseudo scan: {} states, {} collisions",
        injectivity.states_scanned,
        injectivity.collisions.len()
    )
    .unwrap();
    for report in [&strict, &pseudo, &multiset] {
        if !report.passed {
            write!(text, "{report}").unwrap();
        }
    }
    let summary = format!(
        "{} executions: strict {}, pseudo-queue {}, injective {}, multiset {}",
        execs.len(),
        yes(strict.passed),
        yes(pseudo.passed),
        yes(injectivity.is_injective()),
        yes(multiset.passed)
    );
    Ok((
        passed,
        summary,
        text,
        json!({
            "executions": execs.len(),
            "workloads": workloads.len(),
            "strict": strict.passed,
            "pseudo_queue": pseudo.passed,
            "pseudo_refinement": pseudo.refinement,
            "af_pseudo_states": injectivity.states_scanned,
            "af_pseudo_collisions": injectivity.collisions.len(),
            "multiset": multiset.passed,
            "multiset_refinement": multiset.refinement,
        }),
    ))
}

/// Seeded client programs for the positive control: two or three threads of
/// one or two calls, at most four enqueues in total, with dequeue results
/// stored in client variables.
pub fn generated_programs(seed: u64, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let threads = rng.gen_range(2..=3);
        let mut vars = Vec::new();
        let mut bodies = Vec::new();
        let mut enqueues = 0;
        for t in 1..=threads {
            let mut stmts = Vec::new();
            for i in 1..=rng.gen_range(1..=2) {
                if enqueues < 4 && rng.gen_bool(0.5) {
                    enqueues += 1;
                    let x = if rng.gen_bool(0.5) { "a" } else { "b" };
                    stmts.push(format!("call Q.Enqueue('{x}')"));
                } else {
                    let var = format!("r{t}{i}");
                    stmts.push(format!("call {var} = Q.Dequeue()"));
                    vars.push(var);
                }
            }
            bodies.push(format!("thread {{ {} }}", stmts.join("; ")));
        }
        let mut text: String = vars.iter().map(|v| format!("var {v} = 0\n")).collect();
        for b in bodies {
            text.push_str(&b);
            text.push('\n');
        }
        if !out.contains(&text) {
            out.push(text);
        }
    }
    out
}

fn theorem6_control() -> Result<Parts, ReproError> {
    let coarse = CoarseQueue::new(4);
    let spec = coarse.seq_spec();
    let mut programs = vec![FIG2_PROGRAM.to_string()];
    programs.extend(generated_programs(PROGRAM_SEED, 3));
    let mut text = String::new();
    let mut all_equal = true;
    let mut rows = Vec::new();
    for (i, src) in programs.iter().enumerate() {
        let p = program(src)?;
        let r = compare_theorem6(&p, &coarse, &spec, &p.initial_client(), &coarse.initial_state(), DEFAULT_BOUND)?;
        let ok = r.mt_equal() && r.ms_equal() && !r.budget_exhausted;
        all_equal &= ok;
        writeln!(text, "program {i}:\n{src}{r}").unwrap();
        rows.push(json!({ "program": src, "mt_equal": r.mt_equal(), "ms_equal": r.ms_equal() }));
    }
    let hw = HwQueue::new(4);
    let p = program(FIG2_PROGRAM)?;
    let r = compare_theorem6(&p, &hw, &hw.seq_spec(), &p.initial_client(), &hw.initial_state(), DEFAULT_BOUND)?;
    writeln!(text, "hw-queue on program 0:\n{r}").unwrap();
    let hw_differs = !r.ms_equal();
    let summary = format!(
        "coarse-queue MT/MS equal on {} programs: {}; hw-queue MS differs: {}",
        programs.len(),
        yes(all_equal),
        yes(hw_differs)
    );
    Ok((
        all_equal && hw_differs,
        summary,
        text,
        json!({ "coarse": rows, "hw_ms_equal": r.ms_equal(), "hw_mt_equal": r.mt_equal() }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names_are_unique_and_dispatch() {
        let names: BTreeSet<_> = CATALOG.iter().map(|r| r.name).collect();
        assert_eq!(names.len(), CATALOG.len());
        assert!(matches!(reproduce("nope"), Err(ReproError::Unknown(_))));
        let criteria: BTreeSet<_> = CATALOG.iter().map(|r| r.criterion).collect();
        assert_eq!(criteria.len(), CATALOG.len());
    }

    #[test]
    fn shipped_programs_parse() {
        for text in [FIG2_PROGRAM, SEC62_PROGRAM, SEC52_PROGRAM] {
            parse_program(text).unwrap();
        }
        for text in ms_workloads().iter().chain(&generated_programs(PROGRAM_SEED, 3)) {
            parse_program(text).unwrap();
        }
        assert_eq!(ms_workloads().len(), 81 - 16);
    }

    #[test]
    fn tighten_only_adds_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let h = random_history(&mut rng);
            let t = tighten(&h, &mut rng, 10);
            assert!(linearizes(&h, &t));
            assert!(h.happened_before().is_subset(&t.happened_before()));
        }
    }

    #[test]
    fn small_history_enumeration() {
        // One operation: 5 complete choices plus 3 pending, on either thread.
        let one: Vec<_> = two_thread_histories(1).into_iter().filter(|h| h.operations().len() == 1).collect();
        assert_eq!(one.len(), 16);
        assert_eq!(two_thread_histories(0).len(), 1);
    }

    #[test]
    fn fig3_execution_matches_schedule() {
        let exec = fig3_execution().unwrap();
        assert_eq!(exec.final_state().unwrap().render(), "back=3 items=[c,·,·,·]");
        assert_eq!(exec.history.operations().len(), 3);
    }
}
