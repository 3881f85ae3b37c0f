//! Strict linearizability, general linearizability and concurrent
//! implementation checks over recorded executions.
//!
//! The search is depth-first over the next operation to linearize among the
//! operations minimal in happened-before, threading the specification state
//! and matching recorded returns. Pending operations may be linearized with
//! any outcome or dropped. An aborted operation is placed after every
//! operation that returned normally, is legal only where its method is
//! undefined, and leaves the state unchanged. Visited `(linearized set,
//! state)` pairs that failed are memoised.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::explorer::{ExecutionResult, Outcome};
use crate::history::{linearizes_by_bijection, Event, History, HistoryError, Label, Operation, Response};
use crate::spec::{
    legal_seq_outcomes, is_sequential_implementation, AbstractionFunction, RenamingFunction, SeqSpec,
    SpecError, SpecState,
};
use crate::value::Value;

/// Largest history the memoised search accepts.
pub const MAX_SEARCH_OPS: usize = 64;
/// Largest history the permutation oracle accepts.
pub const MAX_BRUTE_FORCE_OPS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error("strict linearization needs a terminated execution")]
    NotTerminated,
    #[error("terminated execution has a pending operation")]
    PendingInTerminated,
    #[error("{ops} operations exceed the limit of {limit}")]
    TooLarge { ops: usize, limit: usize },
    #[error("history must be complete")]
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ExecutionStatus<S> {
    Terminated { final_state: S },
    Incomplete,
}

/// `(initial, history, final)` for a terminated run, or an initial state and
/// a history for a run that aborted, diverged or was cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecordedExecution<S> {
    pub initial: S,
    pub history: History,
    pub status: ExecutionStatus<S>,
}

impl<S: SpecState> RecordedExecution<S> {
    pub fn terminated(initial: S, history: History, final_state: S) -> Result<Self, CheckError> {
        if !history.pending().is_empty() {
            return Err(CheckError::PendingInTerminated);
        }
        Ok(RecordedExecution {
            initial,
            history,
            status: ExecutionStatus::Terminated { final_state },
        })
    }

    pub fn incomplete(initial: S, history: History) -> Self {
        RecordedExecution {
            initial,
            history,
            status: ExecutionStatus::Incomplete,
        }
    }

    /// Records an explored execution; only terminated ones carry a final state.
    pub fn from_result(initial: &S, result: &ExecutionResult<S>) -> Result<Self, CheckError> {
        let history = History::from_trace(result.trace.iter().filter(|e| !e.is_client()))?;
        match &result.outcome {
            Outcome::Terminated { shared, .. } => Self::terminated(initial.clone(), history, shared.clone()),
            _ => Ok(Self::incomplete(initial.clone(), history)),
        }
    }

    pub fn final_state(&self) -> Option<&S> {
        match &self.status {
            ExecutionStatus::Terminated { final_state } => Some(final_state),
            ExecutionStatus::Incomplete => None,
        }
    }
}

/// A witness: the chosen completion, the sequential history it linearizes
/// to, and the legal final states of that sequential history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linearization<S> {
    pub completion: History,
    pub witness: History,
    pub finals: BTreeSet<S>,
}

struct Search<'a, Z: SeqSpec + ?Sized> {
    spec: &'a Z,
    ops: Vec<Operation>,
    /// Bit `j` of `preds[i]`: operation `j` returned before `i` was invoked.
    preds: Vec<u64>,
    required: u64,
    returned: u64,
    aborted: u64,
    target: Option<&'a Z::State>,
    failed: HashSet<(u64, Z::State)>,
    path: Vec<(usize, Response)>,
}

impl<'a, Z: SeqSpec + ?Sized> Search<'a, Z> {
    fn new(spec: &'a Z, history: &History, target: Option<&'a Z::State>) -> Result<Self, CheckError> {
        let mut ops = history.operations();
        if ops.len() > MAX_SEARCH_OPS {
            return Err(CheckError::TooLarge {
                ops: ops.len(),
                limit: MAX_SEARCH_OPS,
            });
        }
        ops.sort_by_key(|o| o.id);
        let mut preds = vec![0u64; ops.len()];
        let (mut required, mut returned, mut aborted) = (0, 0, 0);
        for (i, o) in ops.iter().enumerate() {
            for (j, p) in ops.iter().enumerate() {
                if matches!(p.response, Some((r, _)) if r < o.inv_index) {
                    preds[i] |= 1 << j;
                }
            }
            match o.response {
                Some((_, Response::Ret(_))) => {
                    required |= 1 << i;
                    returned |= 1 << i;
                }
                Some((_, Response::Abort)) => {
                    required |= 1 << i;
                    aborted |= 1 << i;
                }
                None => {}
            }
        }
        Ok(Search {
            spec,
            ops,
            preds,
            required,
            returned,
            aborted,
            target,
            failed: HashSet::new(),
            path: Vec::new(),
        })
    }

    fn run(&mut self, start: &Z::State) -> Result<bool, CheckError> {
        self.dfs(0, start)
    }

    fn dfs(&mut self, done: u64, state: &Z::State) -> Result<bool, CheckError> {
        if done & self.required == self.required && self.target.is_none_or(|t| t == state) {
            return Ok(true);
        }
        if self.failed.contains(&(done, state.clone())) {
            return Ok(false);
        }
        for i in 0..self.ops.len() {
            let bit = 1u64 << i;
            if done & bit != 0 || self.preds[i] & !done != 0 {
                continue;
            }
            let op = &self.ops[i];
            let outcomes = self.spec.apply(&op.method, state, &op.arg)?;
            if self.aborted & bit != 0 {
                if self.returned & !done != 0 || !outcomes.is_empty() {
                    continue;
                }
                self.path.push((i, Response::Abort));
                if self.dfs(done | bit, state)? {
                    return Ok(true);
                }
                self.path.pop();
                continue;
            }
            let recorded = match &op.response {
                Some((_, Response::Ret(v))) => Some(v.clone()),
                _ => None,
            };
            for (next, out) in outcomes {
                if recorded.as_ref().is_some_and(|v| *v != out) {
                    continue;
                }
                self.path.push((i, Response::Ret(out)));
                if self.dfs(done | bit, &next)? {
                    return Ok(true);
                }
                self.path.pop();
            }
        }
        self.failed.insert((done, state.clone()));
        Ok(false)
    }

    fn witness(&self) -> History {
        let mut events = Vec::with_capacity(self.path.len() * 2);
        for (i, response) in &self.path {
            let o = &self.ops[*i];
            events.push(Event::inv(o.thread, o.id.0, &o.method, o.arg.clone()));
            events.push(match response {
                Response::Ret(v) => Event::ret(o.thread, o.id.0, v.clone()),
                Response::Abort => Event::abort(o.thread, o.id.0),
            });
        }
        History::new(events).expect("operation ids are unique")
    }

    fn completion(&self, history: &History) -> History {
        let closed: Vec<&(usize, Response)> = self
            .path
            .iter()
            .filter(|(i, _)| self.ops[*i].is_pending())
            .collect();
        let kept: HashSet<_> = closed.iter().map(|(i, _)| self.ops[*i].id).collect();
        let mut events: Vec<Event> = history
            .events()
            .iter()
            .filter(|e| !(e.is_inv() && history_pending(history, e) && !kept.contains(&e.op.unwrap())))
            .cloned()
            .collect();
        for (i, response) in closed {
            let o = &self.ops[*i];
            if let Response::Ret(v) = response {
                events.push(Event::ret(o.thread, o.id.0, v.clone()));
            }
        }
        History::new(events).expect("completion of a valid history")
    }
}

fn history_pending(history: &History, e: &Event) -> bool {
    let op = e.op.expect("history events carry op ids");
    !history
        .events()
        .iter()
        .any(|r| r.op == Some(op) && r.is_response())
}

fn search<Z: SeqSpec + ?Sized>(
    spec: &Z,
    start: &Z::State,
    history: &History,
    target: Option<&Z::State>,
) -> Result<Option<Linearization<Z::State>>, CheckError> {
    let mut s = Search::new(spec, history, target)?;
    if !s.run(start)? {
        return Ok(None);
    }
    let witness = s.witness();
    let finals = legal_seq_outcomes(spec, start, &witness)?;
    Ok(Some(Linearization {
        completion: s.completion(history),
        witness,
        finals,
    }))
}

/// First witness for linearizability of `exec`'s history from its initial
/// state; final states are not constrained.
pub fn find_linearization<Z: SeqSpec + ?Sized>(
    exec: &RecordedExecution<Z::State>,
    spec: &Z,
) -> Result<Option<Linearization<Z::State>>, CheckError> {
    search(spec, &exec.initial, &exec.history, None)
}

/// First witness whose legal final states include the recorded final state.
pub fn find_strict_linearization<Z: SeqSpec + ?Sized>(
    exec: &RecordedExecution<Z::State>,
    spec: &Z,
) -> Result<Option<Linearization<Z::State>>, CheckError> {
    let Some(final_state) = exec.final_state() else {
        return Err(CheckError::NotTerminated);
    };
    search(spec, &exec.initial, &exec.history, Some(final_state))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Strict,
    General,
    Impl,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Strict => "strict",
            CheckMode::General => "general",
            CheckMode::Impl => "impl",
        })
    }
}

/// Verdict for one execution. Histories are in the line format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExecutionVerdict {
    pub index: usize,
    pub passed: bool,
    pub history: String,
    pub final_state: Option<String>,
    pub witness: Option<String>,
    pub witness_finals: Vec<String>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub mode: CheckMode,
    pub spec: String,
    pub passed: bool,
    /// Outcome of the sequential-implementation part of an `impl` check.
    pub refinement: Option<String>,
    pub executions: Vec<ExecutionVerdict>,
}

impl CheckReport {
    fn new(mode: CheckMode, spec: &str, executions: Vec<ExecutionVerdict>, refinement: Option<(bool, String)>) -> Self {
        let refinement_ok = refinement.as_ref().is_none_or(|(ok, _)| *ok);
        CheckReport {
            mode,
            spec: spec.to_string(),
            passed: refinement_ok && executions.iter().all(|v| v.passed),
            refinement: refinement.map(|(_, text)| text),
            executions,
        }
    }

    pub fn first_failure(&self) -> Option<&ExecutionVerdict> {
        self.executions.iter().find(|v| !v.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} check against {}: {} ({} executions)",
            self.mode,
            self.spec,
            if self.passed { "PASS" } else { "FAIL" },
            self.executions.len()
        )?;
        if let Some(r) = &self.refinement {
            writeln!(f, "sequential implementation: {r}")?;
        }
        match self.first_failure() {
            Some(v) => {
                writeln!(f, "counterexample: execution #{}", v.index)?;
                if let Some(reason) = &v.reason {
                    writeln!(f, "reason: {reason}")?;
                }
                write!(f, "{}", v.history)?;
                if let Some(s) = &v.final_state {
                    writeln!(f, "final state: {s}")?;
                }
                if let Some(w) = &v.witness {
                    writeln!(f, "nearest witness:")?;
                    write!(f, "{w}")?;
                    writeln!(f, "legal finals: {}", v.witness_finals.join(", "))?;
                }
            }
            None if self.executions.len() == 1 => {
                let v = &self.executions[0];
                if let Some(w) = &v.witness {
                    writeln!(f, "witness:")?;
                    write!(f, "{w}")?;
                    if !v.witness_finals.is_empty() {
                        writeln!(f, "legal finals: {}", v.witness_finals.join(", "))?;
                    }
                }
            }
            None => {}
        }
        Ok(())
    }
}

fn verdict<S: SpecState>(
    index: usize,
    history: &History,
    final_state: Option<String>,
    found: Option<&Linearization<S>>,
    reason: Option<String>,
) -> ExecutionVerdict {
    ExecutionVerdict {
        index,
        passed: reason.is_none(),
        history: history.to_string(),
        final_state,
        witness: found.map(|l| l.witness.to_string()),
        witness_finals: found
            .map(|l| l.finals.iter().map(SpecState::render).collect())
            .unwrap_or_default(),
        reason,
    }
}

/// Strict linearizability of every execution against the object's own
/// sequential specification.
pub fn check_strict<Z: SeqSpec + ?Sized>(
    execs: &[RecordedExecution<Z::State>],
    spec: &Z,
) -> Result<CheckReport, CheckError> {
    let mut verdicts = Vec::with_capacity(execs.len());
    for (index, exec) in execs.iter().enumerate() {
        let v = match exec.final_state() {
            None => {
                let found = find_linearization(exec, spec)?;
                let reason = found.is_none().then(|| "no legal linearization".to_string());
                verdict(index, &exec.history, None, found.as_ref(), reason)
            }
            Some(final_state) => {
                let rendered = Some(final_state.render());
                match find_strict_linearization(exec, spec)? {
                    Some(l) => verdict(index, &exec.history, rendered, Some(&l), None),
                    None => {
                        let loose = find_linearization(exec, spec)?;
                        let reason = if loose.is_some() {
                            "no linearization reaches the recorded final state"
                        } else {
                            "no legal linearization"
                        };
                        verdict(index, &exec.history, rendered, loose.as_ref(), Some(reason.into()))
                    }
                }
            }
        };
        verdicts.push(v);
    }
    Ok(CheckReport::new(CheckMode::Strict, spec.name(), verdicts, None))
}

fn general_verdicts<C, A, F>(
    execs: &[RecordedExecution<C>],
    adt: &A,
    af: &F,
    rf: &RenamingFunction,
    with_finals: bool,
) -> Result<Vec<ExecutionVerdict>, CheckError>
where
    C: SpecState,
    A: SeqSpec + ?Sized,
    F: AbstractionFunction<C, Abstract = A::State> + ?Sized,
{
    let mut verdicts = Vec::with_capacity(execs.len());
    for (index, exec) in execs.iter().enumerate() {
        let renamed = rf.apply_to(&exec.history);
        let start = af.abstract_state(&exec.initial)?;
        let loose = search(adt, &start, &renamed, None)?;
        let rendered = exec.final_state().map(SpecState::render);
        let v = match (&loose, exec.final_state()) {
            (None, _) => verdict::<A::State>(index, &renamed, rendered, None, Some("no legal linearization".into())),
            (Some(l), Some(final_state)) if with_finals => {
                let image = af.abstract_state(final_state)?;
                match search(adt, &start, &renamed, Some(&image))? {
                    Some(strict) => verdict(index, &renamed, rendered, Some(&strict), None),
                    None => verdict(
                        index,
                        &renamed,
                        rendered,
                        Some(l),
                        Some(format!(
                            "no linearization reaches the abstract final state {}",
                            image.render()
                        )),
                    ),
                }
            }
            (Some(l), _) => verdict(index, &renamed, rendered, Some(l), None),
        };
        verdicts.push(v);
    }
    Ok(verdicts)
}

/// General linearizability: histories renamed through `rf`, checked against
/// `adt` from the abstraction of each initial state.
pub fn check_general<C, A, F>(
    execs: &[RecordedExecution<C>],
    adt: &A,
    af: &F,
    rf: &RenamingFunction,
) -> Result<CheckReport, CheckError>
where
    C: SpecState,
    A: SeqSpec + ?Sized,
    F: AbstractionFunction<C, Abstract = A::State> + ?Sized,
{
    let verdicts = general_verdicts(execs, adt, af, rf, false)?;
    Ok(CheckReport::new(CheckMode::General, adt.name(), verdicts, None))
}

/// Concurrent implementation of `adt`: the model's specification implements
/// it on the sampled `states`, and every execution linearizes against it with
/// the abstract final state reachable for terminated runs.
pub fn check_concurrent_implementation<Z, A, F>(
    execs: &[RecordedExecution<Z::State>],
    model_spec: &Z,
    adt: &A,
    af: &F,
    rf: &RenamingFunction,
    states: &[Z::State],
) -> Result<CheckReport, CheckError>
where
    Z: SeqSpec + ?Sized,
    A: SeqSpec + ?Sized,
    F: AbstractionFunction<Z::State, Abstract = A::State> + ?Sized,
{
    let refinement = is_sequential_implementation(model_spec, adt, af, rf, states)?;
    let verdicts = general_verdicts(execs, adt, af, rf, true)?;
    Ok(CheckReport::new(
        CheckMode::Impl,
        adt.name(),
        verdicts,
        Some((refinement.passed(), refinement.to_string())),
    ))
}

/// Every complete sequential permutation `h'` of the complete history `h`
/// with `h ⊑ h'`, decided by explicit bijection search.
pub fn brute_force_linearizations(h: &History) -> Result<BTreeSet<History>, CheckError> {
    let ops = h.operations();
    if ops.len() > MAX_BRUTE_FORCE_OPS {
        return Err(CheckError::TooLarge {
            ops: ops.len(),
            limit: MAX_BRUTE_FORCE_OPS,
        });
    }
    if ops.iter().any(Operation::is_pending) {
        return Err(CheckError::Incomplete);
    }
    let mut found = BTreeSet::new();
    for order in ops.iter().permutations(ops.len()) {
        let candidate = sequential(&order)?;
        if linearizes_by_bijection(h, &candidate) {
            found.insert(candidate);
        }
    }
    Ok(found)
}

/// Oracle legality: some completion of `h` (pending returns drawn from
/// `candidates`) has a permutation that is a legal sequential history from
/// `start` and that `h` linearizes to, by explicit bijection search.
/// Permutations are grown one operation at a time and abandoned once their
/// prefix is illegal.
pub fn brute_force_is_linearizable<Z, F>(spec: &Z, start: &Z::State, h: &History, candidates: F) -> Result<bool, CheckError>
where
    Z: SeqSpec + ?Sized,
    F: Fn(&Operation) -> Vec<Value>,
{
    let ops = h.operations();
    if ops.len() > MAX_BRUTE_FORCE_OPS {
        return Err(CheckError::TooLarge {
            ops: ops.len(),
            limit: MAX_BRUTE_FORCE_OPS,
        });
    }
    fn grow<Z: SeqSpec + ?Sized>(
        spec: &Z,
        completion: &History,
        ops: &[Operation],
        order: &mut Vec<usize>,
        frontier: BTreeSet<Z::State>,
    ) -> Result<bool, CheckError> {
        if order.len() == ops.len() {
            let seq: Vec<&Operation> = order.iter().map(|&i| &ops[i]).collect();
            return Ok(linearizes_by_bijection(completion, &sequential(&seq)?));
        }
        for i in 0..ops.len() {
            if order.contains(&i) {
                continue;
            }
            let op = &ops[i];
            let mut next = BTreeSet::new();
            for state in &frontier {
                let outcomes = spec.apply(&op.method, state, &op.arg)?;
                match &op.response {
                    Some((_, Response::Ret(v))) => {
                        next.extend(outcomes.into_iter().filter(|(_, out)| out == v).map(|(s, _)| s))
                    }
                    _ if outcomes.is_empty() => {
                        next.insert(state.clone());
                    }
                    _ => {}
                }
            }
            if next.is_empty() {
                continue;
            }
            order.push(i);
            if grow(spec, completion, ops, order, next)? {
                return Ok(true);
            }
            order.pop();
        }
        Ok(false)
    }
    for completion in h.completions(candidates) {
        let ops = completion.operations();
        if grow(spec, &completion, &ops, &mut Vec::new(), BTreeSet::from([start.clone()]))? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn sequential(order: &[&Operation]) -> Result<History, CheckError> {
    let mut events = Vec::with_capacity(order.len() * 2);
    for o in order {
        events.push(Event::inv(o.thread, o.id.0, &o.method, o.arg.clone()));
        events.push(Event {
            thread: o.thread,
            op: Some(o.id),
            label: match &o.response {
                Some((_, Response::Ret(v))) => Label::Ret(v.clone()),
                _ => Label::RetAbort,
            },
        });
    }
    Ok(History::new(events)?)
}

/// Number of leaves of the linearization search tree of a complete history
/// when every operation is allowed: the orders extending happened-before.
pub fn count_linearization_orders(h: &History) -> Result<usize, CheckError> {
    fn count(preds: &[u64], done: u64, all: u64) -> usize {
        if done == all {
            return 1;
        }
        (0..preds.len())
            .filter(|&i| done & (1 << i) == 0 && preds[i] & !done == 0)
            .map(|i| count(preds, done | (1 << i), all))
            .sum()
    }
    if !h.pending().is_empty() {
        return Err(CheckError::Incomplete);
    }
    let ops = h.operations();
    if ops.len() > MAX_SEARCH_OPS {
        return Err(CheckError::TooLarge {
            ops: ops.len(),
            limit: MAX_SEARCH_OPS,
        });
    }
    let preds: Vec<u64> = ops
        .iter()
        .map(|o| {
            ops.iter()
                .enumerate()
                .filter(|(_, p)| matches!(p.response, Some((r, _)) if r < o.inv_index))
                .fold(0u64, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let all = if ops.len() == 64 { u64::MAX } else { (1u64 << ops.len()) - 1 };
    Ok(count(&preds, 0, all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::parse_history;
    use crate::models::{QueueSpec, QueueState};
    use crate::spec::IdentityAf;

    fn sym(s: &str) -> Value {
        Value::sym(s)
    }

    fn queue() -> QueueSpec {
        QueueSpec::standard()
    }

    fn hist(text: &str) -> History {
        parse_history(text).unwrap()
    }

    fn q(xs: &[&str]) -> QueueState {
        QueueState(xs.iter().map(|s| sym(s)).collect())
    }

    #[test]
    fn empty_history_has_empty_witness() {
        let exec = RecordedExecution::incomplete(q(&[]), History::empty());
        let l = find_linearization(&exec, &queue()).unwrap().unwrap();
        assert!(l.witness.is_empty());
        assert_eq!(l.finals, BTreeSet::from([q(&[])]));
    }

    #[test]
    fn illegal_return_has_no_witness() {
        let exec = RecordedExecution::incomplete(q(&[]), hist("t=1 op=1 inv Dequeue\nt=1 op=1 ret 'x'\n"));
        assert!(find_linearization(&exec, &queue()).unwrap().is_none());
    }

    #[test]
    fn overlapping_dequeue_linearizes_after_enqueue() {
        let h = hist(
            "t=2 op=1 inv Dequeue\n\
             t=1 op=2 inv Enqueue 'a'\n\
             t=1 op=2 ret unit\n\
             t=2 op=1 ret 'a'\n",
        );
        let exec = RecordedExecution::terminated(q(&[]), h.clone(), q(&[])).unwrap();
        let l = find_strict_linearization(&exec, &queue()).unwrap().unwrap();
        assert!(crate::history::linearizes(&h, &l.witness));
        let ops: Vec<_> = l.witness.operations().iter().map(|o| o.method.clone()).collect();
        assert_eq!(ops, ["Enqueue", "Dequeue"]);
    }

    #[test]
    fn sequential_execution_is_its_own_witness() {
        let h = hist(
            "t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\n\
             t=1 op=2 inv Enqueue 'b'\nt=1 op=2 ret unit\n\
             t=2 op=3 inv Dequeue\nt=2 op=3 ret 'a'\n",
        );
        let exec = RecordedExecution::terminated(q(&[]), h.clone(), q(&["b"])).unwrap();
        let l = find_strict_linearization(&exec, &queue()).unwrap().unwrap();
        assert_eq!(l.witness, h);
        let wrong = RecordedExecution::terminated(q(&[]), h, q(&["a"])).unwrap();
        assert!(find_strict_linearization(&wrong, &queue()).unwrap().is_none());
    }

    #[test]
    fn strict_requires_termination() {
        let exec = RecordedExecution::incomplete(q(&[]), History::empty());
        assert_eq!(find_strict_linearization(&exec, &queue()), Err(CheckError::NotTerminated));
        let pending = hist("t=1 op=1 inv Dequeue\n");
        assert_eq!(
            RecordedExecution::terminated(q(&[]), pending, q(&[])).unwrap_err(),
            CheckError::PendingInTerminated
        );
    }

    #[test]
    fn pending_operations_are_closed_or_dropped() {
        // The pending enqueue must take effect for the dequeue to return 'a'.
        let h = hist(
            "t=1 op=1 inv Enqueue 'a'\n\
             t=2 op=2 inv Dequeue\n\
             t=2 op=2 ret 'a'\n",
        );
        let exec = RecordedExecution::incomplete(q(&[]), h.clone());
        let l = find_linearization(&exec, &queue()).unwrap().unwrap();
        assert_eq!(l.completion.len(), 4);
        assert!(crate::history::linearizes(&l.completion, &l.witness));
        // A pending dequeue that cannot return anything useful is dropped.
        let h = hist("t=1 op=1 inv Dequeue\n");
        let l = find_linearization(&RecordedExecution::incomplete(q(&[]), h), &QueueSpec::blocking())
            .unwrap()
            .unwrap();
        assert!(l.completion.is_empty());
    }

    #[test]
    fn aborted_operation_needs_undefined_method() {
        let h = hist("t=1 op=1 inv Dequeue\nt=1 op=1 abort\n");
        let blocking = QueueSpec::blocking();
        let exec = RecordedExecution::incomplete(q(&[]), h.clone());
        assert!(find_linearization(&exec, &blocking).unwrap().is_some());
        assert!(find_linearization(&exec, &queue()).unwrap().is_none());
        let full = RecordedExecution::incomplete(q(&["a"]), h);
        assert!(find_linearization(&full, &blocking).unwrap().is_none());
    }

    #[test]
    fn aborted_operation_goes_after_returned_ones() {
        // The enqueue overlaps the abort; placing the abort first would be
        // legal on the empty queue but aborts end the run.
        let h = hist(
            "t=1 op=1 inv Dequeue\n\
             t=2 op=2 inv Enqueue 'a'\n\
             t=2 op=2 ret unit\n\
             t=1 op=1 abort\n",
        );
        let exec = RecordedExecution::incomplete(q(&[]), h);
        assert!(find_linearization(&exec, &QueueSpec::blocking()).unwrap().is_none());
    }

    #[test]
    fn check_strict_on_empty_set_passes() {
        let report = check_strict(&[], &queue()).unwrap();
        assert!(report.passed);
        assert!(report.first_failure().is_none());
    }

    #[test]
    fn general_check_detects_lost_value() {
        let h = hist(
            "t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\n\
             t=2 op=2 inv Dequeue\nt=2 op=2 ret EMPTY\n",
        );
        let exec = RecordedExecution::terminated(q(&[]), h, q(&[])).unwrap();
        let rf = RenamingFunction::identity(&queue().methods());
        let report = check_general(&[exec], &queue(), &IdentityAf, &rf).unwrap();
        assert!(!report.passed);
        assert_eq!(report.first_failure().unwrap().index, 0);
    }

    #[test]
    fn brute_force_small_cases() {
        let overlapping = hist(
            "t=1 op=1 inv Enqueue 'a'\nt=2 op=2 inv Enqueue 'b'\n\
             t=1 op=1 ret unit\nt=2 op=2 ret unit\n",
        );
        assert_eq!(brute_force_linearizations(&overlapping).unwrap().len(), 2);
        assert_eq!(count_linearization_orders(&overlapping).unwrap(), 2);
        let disjoint = hist(
            "t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\n\
             t=2 op=2 inv Enqueue 'b'\nt=2 op=2 ret unit\n",
        );
        assert_eq!(brute_force_linearizations(&disjoint).unwrap().len(), 1);
        assert_eq!(count_linearization_orders(&disjoint).unwrap(), 1);
        assert_eq!(
            brute_force_linearizations(&hist("t=1 op=1 inv Dequeue\n")).unwrap_err(),
            CheckError::Incomplete
        );
    }

    #[test]
    fn brute_force_size_guard() {
        let text: String = (1..=8)
            .map(|i| format!("t={i} op={i} inv Enqueue 'a'\nt={i} op={i} ret unit\n"))
            .collect();
        assert!(matches!(
            brute_force_linearizations(&hist(&text)),
            Err(CheckError::TooLarge { ops: 8, .. })
        ));
    }

    #[test]
    fn report_serialises_witness_in_line_format() {
        let h = hist("t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\n");
        let exec = RecordedExecution::terminated(q(&[]), h.clone(), q(&["a"])).unwrap();
        let report = check_strict(&[exec], &queue()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["mode"], "strict");
        assert_eq!(json["executions"][0]["witness"], h.to_string());
    }
}
