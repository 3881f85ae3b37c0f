//! Named models, specifications and abstraction functions, and the runners
//! behind the command-line subcommands.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;
use serde_json::json;

use crate::checker::{
    check_concurrent_implementation, check_general, check_strict, CheckError, CheckMode, CheckReport,
    RecordedExecution,
};
use crate::explorer::{
    compare_theorem6, detect_divergence_theorem10, explore, ExploreError, FinalState, Program, Projection,
};
use crate::history::History;
use crate::models::adt::{default_alphabet, ENQUEUE};
use crate::models::{
    AfHwQueue, AfMultiset, AfPseudo, AfQueue, CoarseQueue, HwQueue, HwQueueSeq, HwState, MsQueue, MsQueueSeq,
    MsState, MultisetAdt, ObjectModel, PseudoQueueAdt, QueueSpec, QueueState,
};
use crate::spec::{AbstractionFunction, IdentityAf, RenamingFunction, SeqSpec, SpecState};
use crate::value::Value;

pub const DEFAULT_SIZE: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown {kind} `{name}` (try `list`)")]
    Unknown { kind: &'static str, name: String },
    #[error("bad parameter `{0}`")]
    BadParam(String),
    #[error("{0}")]
    Incompatible(String),
    #[error("initial state: {0}")]
    Init(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Explore(#[from] ExploreError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelId {
    Hw { n: usize },
    Ms { p: usize },
    Coarse { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecId {
    HwSeq { n: Option<usize> },
    MsSeq { p: Option<usize> },
    CoarseSeq { cap: Option<usize> },
    Queue,
    BlockingQueue,
    Multiset,
    Pseudo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AfId {
    Identity,
    Queue,
    Multiset,
    Pseudo,
    HwQueue,
}

/// `(name, description)` rows printed by `list`.
pub const MODELS: &[(&str, &str)] = &[
    ("hw-queue[,N=4]", "array queue with fetch-and-increment reservation and swap-based dequeue"),
    ("ms-queue[,P=4]", "lock-free linked queue over a pool of P nodes, dummy head"),
    ("coarse-queue[,cap=4]", "lock-protected queue, one atomic step per call"),
];

pub const SPECS: &[(&str, &str)] = &[
    ("hw-queue-seq[,N=4]", "sequential specification of hw-queue"),
    ("ms-queue-seq[,P=4]", "sequential specification of ms-queue over canonical states"),
    ("coarse-queue-seq[,cap=4]", "bounded FIFO queue"),
    ("adt-queue", "FIFO queue; Dequeue on empty returns EMPTY"),
    ("adt-blocking-queue", "FIFO queue; Dequeue on empty is undefined"),
    ("adt-multiset", "Add/Remove multiset; Remove returns any member"),
    ("adt-pseudo-queue", "queue whose first element is a held message"),
];

pub const AFS: &[(&str, &str)] = &[
    ("af-hw-queue", "hw-queue -> adt-queue: non-null items in index order"),
    ("af-queue", "ms-queue -> adt-queue: values after the dummy"),
    ("af-multiset", "ms-queue -> adt-multiset: values after the dummy"),
    ("af-pseudo", "ms-queue -> adt-pseudo-queue: all values, dummy included"),
    ("identity", "a specification to itself"),
];

fn split_params<'a>(s: &'a str, key: &str) -> Result<(&'a str, Option<usize>), RegistryError> {
    let mut parts = s.split(',');
    let name = parts.next().unwrap_or_default().trim();
    let mut value = None;
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| RegistryError::BadParam(part.to_string()))?;
        if !k.trim().eq_ignore_ascii_case(key) {
            return Err(RegistryError::BadParam(part.to_string()));
        }
        let n: usize = v.trim().parse().map_err(|_| RegistryError::BadParam(part.to_string()))?;
        value = Some(n);
    }
    Ok((name, value))
}

impl FromStr for ModelId {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.split(',').next().unwrap_or_default().trim();
        let id = match name {
            "hw-queue" => {
                let n = split_params(s, "N")?.1.unwrap_or(DEFAULT_SIZE);
                if n == 0 {
                    return Err(RegistryError::BadParam("N=0".into()));
                }
                ModelId::Hw { n }
            }
            "ms-queue" => {
                let p = split_params(s, "P")?.1.unwrap_or(DEFAULT_SIZE);
                if !(2..=255).contains(&p) {
                    return Err(RegistryError::BadParam(format!("P={p} (2..=255)")));
                }
                ModelId::Ms { p }
            }
            "coarse-queue" => ModelId::Coarse {
                cap: split_params(s, "cap")?.1.unwrap_or(DEFAULT_SIZE),
            },
            _ => {
                return Err(RegistryError::Unknown {
                    kind: "model",
                    name: s.into(),
                })
            }
        };
        Ok(id)
    }
}

impl FromStr for SpecId {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let name = s.split(',').next().unwrap_or_default().trim();
        let plain = |id: SpecId| {
            if s.contains(',') {
                Err(RegistryError::BadParam(s.into()))
            } else {
                Ok(id)
            }
        };
        match name {
            "hw-queue-seq" => Ok(SpecId::HwSeq {
                n: split_params(s, "N")?.1,
            }),
            "ms-queue-seq" => Ok(SpecId::MsSeq {
                p: split_params(s, "P")?.1,
            }),
            "coarse-queue-seq" => Ok(SpecId::CoarseSeq {
                cap: split_params(s, "cap")?.1,
            }),
            "adt-queue" => plain(SpecId::Queue),
            "adt-blocking-queue" => plain(SpecId::BlockingQueue),
            "adt-multiset" => plain(SpecId::Multiset),
            "adt-pseudo-queue" => plain(SpecId::Pseudo),
            _ => Err(RegistryError::Unknown {
                kind: "specification",
                name: s.into(),
            }),
        }
    }
}

impl FromStr for AfId {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "identity" => Ok(AfId::Identity),
            "af-queue" => Ok(AfId::Queue),
            "af-multiset" => Ok(AfId::Multiset),
            "af-pseudo" => Ok(AfId::Pseudo),
            "af-hw-queue" => Ok(AfId::HwQueue),
            _ => Err(RegistryError::Unknown {
                kind: "abstraction function",
                name: s.into(),
            }),
        }
    }
}

impl fmt::Display for AfId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AfId::Identity => "identity",
            AfId::Queue => "af-queue",
            AfId::Multiset => "af-multiset",
            AfId::Pseudo => "af-pseudo",
            AfId::HwQueue => "af-hw-queue",
        })
    }
}

/// What to check explored executions or a history against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckRequest {
    pub mode: CheckMode,
    /// Concrete sequential specification; defaults to the model's own.
    pub spec: Option<SpecId>,
    pub adt: Option<SpecId>,
    pub af: Option<AfId>,
}

/// Text for standard output, machine-readable form, and whether every check
/// passed.
#[derive(Clone, Debug, Serialize)]
pub struct RunOutput {
    pub passed: bool,
    pub text: String,
    pub json: serde_json::Value,
}

type Checker<S> = Box<dyn Fn(&[RecordedExecution<S>]) -> Result<CheckReport, CheckError>>;

fn incompatible(what: String) -> RegistryError {
    RegistryError::Incompatible(what)
}

fn abc() -> Vec<Value> {
    default_alphabet()
}

fn queue_states(max_len: usize) -> Vec<QueueState> {
    (0..=max_len)
        .flat_map(|len| {
            std::iter::repeat_n(abc(), len)
                .multi_cartesian_product()
                .map(QueueState)
                .collect::<Vec<_>>()
        })
        .unique()
        .collect()
}

fn identity_rf<Z: SeqSpec + ?Sized>(spec: &Z) -> RenamingFunction {
    RenamingFunction::identity(&spec.methods())
}

/// Builds the check closure for one concrete specification and a resolved
/// `(adt, af)` pair.
fn build<Z, A, F>(mode: CheckMode, spec: Z, adt: A, af: F, states: Vec<Z::State>) -> Checker<Z::State>
where
    Z: SeqSpec + 'static,
    A: SeqSpec + 'static,
    F: AbstractionFunction<Z::State, Abstract = A::State> + 'static,
{
    let rf = identity_rf(&spec);
    Box::new(move |execs| match mode {
        CheckMode::Strict => check_strict(execs, &spec),
        CheckMode::General => check_general(execs, &adt, &af, &rf),
        CheckMode::Impl => check_concurrent_implementation(execs, &spec, &adt, &af, &rf, &states),
    })
}

fn hw_checker(n: usize, req: &CheckRequest) -> Result<Checker<HwState>, RegistryError> {
    let spec = HwQueueSeq::new(n);
    let states = HwState::enumerate(n, n, &abc());
    match (req.mode, req.adt, req.af.unwrap_or(AfId::HwQueue)) {
        (CheckMode::Strict, _, _) => Ok(build(req.mode, spec, QueueSpec::standard(), AfHwQueue, states)),
        (_, None | Some(SpecId::Queue), AfId::HwQueue) => {
            Ok(build(req.mode, spec, QueueSpec::standard(), AfHwQueue, states))
        }
        (_, Some(SpecId::BlockingQueue), AfId::HwQueue) => {
            Ok(build(req.mode, spec, QueueSpec::blocking(), AfHwQueue, states))
        }
        (_, Some(SpecId::HwSeq { .. }), AfId::Identity) => {
            Ok(build(req.mode, spec.clone(), spec, IdentityAf, states))
        }
        (_, adt, af) => Err(incompatible(format!(
            "hw-queue states cannot be checked against {adt:?} with {af}"
        ))),
    }
}

fn ms_checker(p: usize, req: &CheckRequest) -> Result<Checker<MsState>, RegistryError> {
    let spec = MsQueueSeq::new(p);
    // Non-full pools: every sampled state accepts one more Enqueue.
    let states = MsState::enumerate(p, p - 1, &abc());
    let default_af = match req.adt {
        Some(SpecId::Multiset) => AfId::Multiset,
        Some(SpecId::Pseudo) => AfId::Pseudo,
        Some(SpecId::MsSeq { .. }) => AfId::Identity,
        _ => AfId::Queue,
    };
    let mode = req.mode;
    match (mode, req.adt, req.af.unwrap_or(default_af)) {
        (CheckMode::Strict, _, _) => Ok(build(mode, spec, QueueSpec::standard(), AfQueue, states)),
        (_, None | Some(SpecId::Queue), AfId::Queue) => Ok(build(mode, spec, QueueSpec::standard(), AfQueue, states)),
        (_, Some(SpecId::BlockingQueue), AfId::Queue) => {
            Ok(build(mode, spec, QueueSpec::blocking(), AfQueue, states))
        }
        (_, Some(SpecId::Multiset), AfId::Multiset) => Ok(build(mode, spec, MultisetAdt::new(), AfMultiset, states)),
        (_, Some(SpecId::Pseudo), AfId::Pseudo) => Ok(build(mode, spec, PseudoQueueAdt::new(), AfPseudo, states)),
        (_, Some(SpecId::MsSeq { .. }), AfId::Identity) => Ok(build(mode, spec.clone(), spec, IdentityAf, states)),
        (_, adt, af) => Err(incompatible(format!(
            "ms-queue states cannot be checked against {adt:?} with {af}"
        ))),
    }
}

fn queue_checker(spec: QueueSpec, cap: Option<usize>, req: &CheckRequest) -> Result<Checker<QueueState>, RegistryError> {
    let states = queue_states(cap.unwrap_or(DEFAULT_SIZE));
    let af = req.af.unwrap_or(AfId::Identity);
    if af != AfId::Identity {
        return Err(incompatible(format!("queue states take the identity abstraction, not {af}")));
    }
    let adt = match req.adt {
        None => spec.clone(),
        Some(SpecId::Queue) => QueueSpec::standard(),
        Some(SpecId::BlockingQueue) => QueueSpec::blocking(),
        Some(SpecId::CoarseSeq { cap }) => QueueSpec::bounded(cap.unwrap_or(DEFAULT_SIZE)),
        Some(other) => return Err(incompatible(format!("queue states cannot be checked against {other:?}"))),
    };
    Ok(build(req.mode, spec, adt, IdentityAf, states))
}

fn pseudo_checker(req: &CheckRequest) -> Result<Checker<QueueState>, RegistryError> {
    match (req.adt, req.af.unwrap_or(AfId::Identity)) {
        (None | Some(SpecId::Pseudo), AfId::Identity) => Ok(build(
            req.mode,
            PseudoQueueAdt::new(),
            PseudoQueueAdt::new(),
            IdentityAf,
            queue_states(DEFAULT_SIZE),
        )),
        (adt, af) => Err(incompatible(format!("adt-pseudo-queue against {adt:?} with {af}"))),
    }
}

fn multiset_checker(req: &CheckRequest) -> Result<Checker<crate::models::MultisetState>, RegistryError> {
    match (req.adt, req.af.unwrap_or(AfId::Identity)) {
        (None | Some(SpecId::Multiset), AfId::Identity) => {
            let states = queue_states(DEFAULT_SIZE)
                .into_iter()
                .map(|q| crate::models::MultisetState::new(q.0))
                .unique()
                .collect();
            Ok(build(req.mode, MultisetAdt::new(), MultisetAdt::new(), IdentityAf, states))
        }
        (adt, af) => Err(incompatible(format!("adt-multiset against {adt:?} with {af}"))),
    }
}

/// Enqueues `values` one by one from `start` through `spec`.
pub fn initial_from_values<Z: SeqSpec + ?Sized>(
    spec: &Z,
    start: Z::State,
    values: &[Value],
) -> Result<Z::State, RegistryError> {
    let mut state = start;
    for v in values {
        let outcomes = spec
            .apply(ENQUEUE, &state, v)
            .map_err(|e| RegistryError::Init(e.to_string()))?;
        let Some((next, _)) = outcomes.into_iter().next() else {
            return Err(RegistryError::Init(format!("Enqueue({v}) is undefined at {}", state.render())));
        };
        state = next;
    }
    Ok(state)
}

/// Parses `--init` text: comma-separated values.
pub fn parse_init(text: &str) -> Result<Vec<Value>, RegistryError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Value>().map_err(|e| RegistryError::Init(e.to_string())))
        .collect()
}

fn render_finals<S: SpecState>(finals: &BTreeSet<FinalState<S>>) -> Vec<String> {
    finals.iter().map(FinalState::render).collect()
}

fn explore_with<M>(
    model: &M,
    seq: &impl SeqSpec<State = M::State>,
    program: &Program,
    bound: usize,
    init: &[Value],
    checker: Option<Checker<M::State>>,
) -> Result<RunOutput, RegistryError>
where
    M: ObjectModel,
{
    let initial = initial_from_values(seq, model.initial_state(), init)?;
    let client = program.initial_client();
    let ex = explore(program, model, &client, &initial, bound)?;
    let finals = render_finals(&ex.final_states());
    let mut text = String::new();
    writeln!(text, "model: {}", model.name()).unwrap();
    writeln!(text, "initial: {}", initial.render()).unwrap();
    writeln!(text, "configurations: {}, transitions: {}", ex.node_count(), ex.transitions()).unwrap();
    if ex.budget_exhausted() {
        writeln!(text, "note: transition budget {bound} exhausted; results are partial").unwrap();
    }
    writeln!(text, "final states ({}):", finals.len()).unwrap();
    for f in &finals {
        writeln!(text, "  {f}").unwrap();
    }
    let divergence = if ex.has_object_divergence() {
        "divergent schedule found (object)"
    } else if ex.has_client_divergence() {
        "divergent schedule found (client)"
    } else {
        "all schedules terminate"
    };
    writeln!(text, "divergence: {divergence}").unwrap();
    let mut passed = true;
    let mut report_json = serde_json::Value::Null;
    if let Some(checker) = checker {
        let execs = ex
            .results(Projection::History)
            .iter()
            .map(|r| RecordedExecution::from_result(&initial, r))
            .collect::<Result<Vec<_>, _>>()?;
        let report = checker(&execs)?;
        passed = report.passed;
        write!(text, "{report}").unwrap();
        report_json = serde_json::to_value(&report).expect("report serialises");
    }
    Ok(RunOutput {
        passed,
        text,
        json: json!({
            "model": model.name(),
            "initial": initial.render(),
            "configurations": ex.node_count(),
            "transitions": ex.transitions(),
            "budget_exhausted": ex.budget_exhausted(),
            "final_states": finals,
            "object_divergent": ex.has_object_divergence(),
            "client_divergent": ex.has_client_divergence(),
            "check": report_json,
        }),
    })
}

fn model_spec_mismatch(model: ModelId, spec: SpecId) -> RegistryError {
    incompatible(format!("{spec:?} is not a sequential specification of {model:?}"))
}

/// `explore`: all executions of `program` on `model`, optionally checked.
pub fn run_explore(
    model: ModelId,
    program: &Program,
    bound: usize,
    init: &[Value],
    check: Option<CheckRequest>,
) -> Result<RunOutput, RegistryError> {
    if let Some(spec) = check.and_then(|c| c.spec) {
        let ok = matches!(
            (model, spec),
            (ModelId::Hw { .. }, SpecId::HwSeq { .. })
                | (ModelId::Ms { .. }, SpecId::MsSeq { .. })
                | (ModelId::Coarse { .. }, SpecId::CoarseSeq { .. })
        );
        if !ok {
            return Err(model_spec_mismatch(model, spec));
        }
    }
    match model {
        ModelId::Hw { n } => {
            let checker = check.map(|c| hw_checker(n, &c)).transpose()?;
            explore_with(&HwQueue::new(n), &HwQueueSeq::new(n), program, bound, init, checker)
        }
        ModelId::Ms { p } => {
            let checker = check.map(|c| ms_checker(p, &c)).transpose()?;
            explore_with(&MsQueue::new(p), &MsQueueSeq::new(p), program, bound, init, checker)
        }
        ModelId::Coarse { cap } => {
            let seq = QueueSpec::bounded(cap);
            let checker = check.map(|c| queue_checker(seq.clone(), Some(cap), &c)).transpose()?;
            explore_with(&CoarseQueue::new(cap), &seq, program, bound, init, checker)
        }
    }
}

fn compare_with<M, Z>(
    model: &M,
    spec: &Z,
    program: &Program,
    bound: usize,
    init: &[Value],
) -> Result<RunOutput, RegistryError>
where
    M: ObjectModel,
    Z: SeqSpec<State = M::State> + Clone,
{
    let initial = initial_from_values(spec, model.initial_state(), init)?;
    let client = program.initial_client();
    let t6 = compare_theorem6(program, model, spec, &client, &initial, bound)?;
    let t10 = detect_divergence_theorem10(program, model, spec, &client, &initial, bound)?;
    let text = format!("{t6}{t10}");
    Ok(RunOutput {
        passed: t6.mt_equal() && t6.ms_equal() && t10.agrees(),
        text,
        json: json!({
            "model": t6.model,
            "spec": t6.spec,
            "mt_equal": t6.mt_equal(),
            "ms_equal": t6.ms_equal(),
            "concrete_finals": render_finals(&t6.concrete_finals),
            "atomic_finals": render_finals(&t6.atomic_finals),
            "budget_exhausted": t6.budget_exhausted,
            "divergence": t10,
        }),
    })
}

/// `compare`: observable behaviour of `program` on `model` and on the atomic
/// version of `spec` (default: the model's own specification).
pub fn run_compare(
    model: ModelId,
    spec: Option<SpecId>,
    program: &Program,
    bound: usize,
    init: &[Value],
) -> Result<RunOutput, RegistryError> {
    match (model, spec) {
        (ModelId::Hw { n }, None | Some(SpecId::HwSeq { .. })) => {
            let n_spec = match spec {
                Some(SpecId::HwSeq { n: Some(m) }) => m,
                _ => n,
            };
            compare_with(&HwQueue::new(n), &HwQueueSeq::new(n_spec), program, bound, init)
        }
        (ModelId::Ms { p }, None | Some(SpecId::MsSeq { .. })) => {
            compare_with(&MsQueue::new(p), &MsQueueSeq::new(p), program, bound, init)
        }
        (ModelId::Coarse { cap }, None | Some(SpecId::CoarseSeq { .. })) => {
            let spec_cap = match spec {
                Some(SpecId::CoarseSeq { cap: Some(c) }) => c,
                _ => cap,
            };
            compare_with(&CoarseQueue::new(cap), &QueueSpec::bounded(spec_cap), program, bound, init)
        }
        (ModelId::Coarse { cap }, Some(SpecId::Queue)) => {
            compare_with(&CoarseQueue::new(cap), &QueueSpec::standard(), program, bound, init)
        }
        (ModelId::Coarse { cap }, Some(SpecId::BlockingQueue)) => {
            compare_with(&CoarseQueue::new(cap), &QueueSpec::blocking(), program, bound, init)
        }
        (m, Some(s)) => Err(model_spec_mismatch(m, s)),
    }
}

fn check_history_with<Z: SeqSpec>(
    spec: &Z,
    history: &History,
    init: &[Value],
    checker: Checker<Z::State>,
) -> Result<RunOutput, RegistryError> {
    let initial = initial_from_values(spec, spec.initial_state(), init)?;
    let exec = RecordedExecution::incomplete(initial, history.clone());
    let report = checker(std::slice::from_ref(&exec))?;
    let mut text = report.to_string();
    if report.mode == CheckMode::Strict {
        text.push_str("note: a history file records no final state; final states are unconstrained\n");
    }
    Ok(RunOutput {
        passed: report.passed,
        text,
        json: serde_json::to_value(&report).expect("report serialises"),
    })
}

/// `check-history`: one history from `spec`'s initial state (after `init`).
pub fn run_check_history(history: &History, spec: SpecId, init: &[Value], req: CheckRequest) -> Result<RunOutput, RegistryError> {
    let size = |x: Option<usize>| x.unwrap_or(DEFAULT_SIZE);
    match spec {
        SpecId::HwSeq { n } => check_history_with(&HwQueueSeq::new(size(n)), history, init, hw_checker(size(n), &req)?),
        SpecId::MsSeq { p } => {
            let p = size(p);
            if !(2..=255).contains(&p) {
                return Err(RegistryError::BadParam(format!("P={p}")));
            }
            check_history_with(&MsQueueSeq::new(p), history, init, ms_checker(p, &req)?)
        }
        SpecId::CoarseSeq { cap } => {
            let s = QueueSpec::bounded(size(cap));
            check_history_with(&s, history, init, queue_checker(s.clone(), Some(size(cap)), &req)?)
        }
        SpecId::Queue => {
            let s = QueueSpec::standard();
            check_history_with(&s, history, init, queue_checker(s.clone(), None, &req)?)
        }
        SpecId::BlockingQueue => {
            let s = QueueSpec::blocking();
            check_history_with(&s, history, init, queue_checker(s.clone(), None, &req)?)
        }
        SpecId::Pseudo => check_history_with(&PseudoQueueAdt::new(), history, init, pseudo_checker(&req)?),
        SpecId::Multiset => {
            if !init.is_empty() {
                return Err(RegistryError::Init("adt-multiset has no Enqueue; --init is unsupported".into()));
            }
            check_history_with(&MultisetAdt::new(), history, init, multiset_checker(&req)?)
        }
    }
}

/// The `list` catalog: models, specifications, abstraction functions.
pub fn catalog_text() -> String {
    let mut text = String::new();
    for (title, rows) in [("models", MODELS), ("specifications", SPECS), ("abstraction functions", AFS)] {
        writeln!(text, "{title}:").unwrap();
        for (name, what) in rows {
            writeln!(text, "  {name:<26} {what}").unwrap();
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explorer::{parse_program, DEFAULT_BOUND};
    use crate::history::parse_history;

    #[test]
    fn names_parse_with_parameters() {
        assert_eq!("hw-queue".parse::<ModelId>().unwrap(), ModelId::Hw { n: 4 });
        assert_eq!("hw-queue,N=6".parse::<ModelId>().unwrap(), ModelId::Hw { n: 6 });
        assert_eq!("ms-queue,P=3".parse::<ModelId>().unwrap(), ModelId::Ms { p: 3 });
        assert_eq!("coarse-queue,cap=2".parse::<ModelId>().unwrap(), ModelId::Coarse { cap: 2 });
        assert!("ms-queue,P=1".parse::<ModelId>().is_err());
        assert!("hw-queue,P=4".parse::<ModelId>().is_err());
        assert!("stack".parse::<ModelId>().is_err());
        assert_eq!("adt-queue".parse::<SpecId>().unwrap(), SpecId::Queue);
        assert_eq!("hw-queue-seq,N=3".parse::<SpecId>().unwrap(), SpecId::HwSeq { n: Some(3) });
        assert!("adt-queue,N=3".parse::<SpecId>().is_err());
        assert_eq!("af-pseudo".parse::<AfId>().unwrap(), AfId::Pseudo);
        assert!("af-stack".parse::<AfId>().is_err());
    }

    #[test]
    fn init_values_are_enqueued() {
        let values = parse_init("'a', 'b'").unwrap();
        let s = initial_from_values(&HwQueueSeq::new(4), HwState::fresh(4), &values).unwrap();
        assert_eq!(s.render(), "back=3 items=[a,b,·,·]");
        assert!(initial_from_values(&QueueSpec::bounded(1), QueueState::default(), &values).is_err());
    }

    #[test]
    fn explore_coarse_with_strict_check_passes() {
        let p = parse_program("thread { call Q.Enqueue('a') }\nthread { call y = Q.Dequeue() }").unwrap();
        let req = CheckRequest {
            mode: CheckMode::Strict,
            spec: None,
            adt: None,
            af: None,
        };
        let out = run_explore(ModelId::Coarse { cap: 4 }, &p, DEFAULT_BOUND, &[], Some(req)).unwrap();
        assert!(out.passed, "{}", out.text);
        assert_eq!(out.json["final_states"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn incompatible_pairs_are_rejected() {
        let p = Program::default();
        let req = CheckRequest {
            mode: CheckMode::General,
            spec: None,
            adt: Some(SpecId::Multiset),
            af: None,
        };
        assert!(matches!(
            run_explore(ModelId::Hw { n: 4 }, &p, 10, &[], Some(req)),
            Err(RegistryError::Incompatible(_))
        ));
        assert!(run_compare(ModelId::Hw { n: 4 }, Some(SpecId::Queue), &p, 10, &[]).is_err());
    }

    #[test]
    fn check_history_general_and_strict() {
        let h = parse_history("t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\nt=2 op=2 inv Dequeue\nt=2 op=2 ret 'a'\n")
            .unwrap();
        let req = |mode| CheckRequest {
            mode,
            spec: None,
            adt: None,
            af: None,
        };
        let out = run_check_history(&h, SpecId::Queue, &[], req(CheckMode::General)).unwrap();
        assert!(out.passed);
        let out = run_check_history(&h, SpecId::Queue, &[Value::sym("b")], req(CheckMode::General)).unwrap();
        assert!(!out.passed);
        let out = run_check_history(&h, SpecId::MsSeq { p: None }, &[], req(CheckMode::Strict)).unwrap();
        assert!(out.passed, "{}", out.text);
    }

    #[test]
    fn catalog_lists_every_name() {
        let text = catalog_text();
        for (name, _) in MODELS.iter().chain(SPECS).chain(AFS) {
            assert!(text.contains(name));
        }
    }
}
