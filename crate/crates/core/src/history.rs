//! Events, histories, completions and the linearizability relation.
//!
//! A [`History`] is the invocation/response skeleton of an execution. The
//! relation `h ⊑ h'` ([`linearizes`]) holds when `h'` is a permutation of `h`
//! with identical per-thread subsequences that keeps every "response before
//! invocation" pair of `h` in the same order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::value::Value;

pub type ThreadId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpId(pub u32);

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

/// Atomic actions that are neither invocations nor responses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    /// Evaluation of a call argument.
    Eval(Value),
    /// Client assignment, including the assignment of a returned value.
    Assign { var: String, value: Value },
    /// Client read of an object cell.
    Read { var: String, cell: String, value: Value },
    /// Client write of an object cell.
    Write { cell: String, value: Value },
    /// Evaluation of a branch or loop condition.
    Test(bool),
    /// Atomic region over client variables.
    Atomic(Vec<(String, Value)>),
    /// One step of an operation body.
    Object(String),
    /// Runtime error.
    Fault(String),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Eval(v) => write!(f, "eval {v}"),
            Action::Assign { var, value } => write!(f, "{var}:={value}"),
            Action::Read { var, cell, value } => write!(f, "{var}:=[{cell}]={value}"),
            Action::Write { cell, value } => write!(f, "[{cell}]:={value}"),
            Action::Test(b) => write!(f, "test {b}"),
            Action::Atomic(assigns) => {
                let body = assigns
                    .iter()
                    .map(|(x, v)| format!("{x}:={v}"))
                    .join(",");
                write!(f, "<{body}>")
            }
            Action::Object(s) => f.write_str(s),
            Action::Fault(s) => write!(f, "fault {s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Inv { method: String, arg: Value },
    Ret(Value),
    RetAbort,
    Act(Action),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    pub thread: ThreadId,
    pub op: Option<OpId>,
    pub label: Label,
}

impl Event {
    pub fn inv(thread: ThreadId, op: u32, method: &str, arg: Value) -> Event {
        Event {
            thread,
            op: Some(OpId(op)),
            label: Label::Inv {
                method: method.to_string(),
                arg,
            },
        }
    }

    pub fn ret(thread: ThreadId, op: u32, value: Value) -> Event {
        Event {
            thread,
            op: Some(OpId(op)),
            label: Label::Ret(value),
        }
    }

    pub fn abort(thread: ThreadId, op: u32) -> Event {
        Event {
            thread,
            op: Some(OpId(op)),
            label: Label::RetAbort,
        }
    }

    pub fn is_inv(&self) -> bool {
        matches!(self.label, Label::Inv { .. })
    }

    /// `Ret` or `RetAbort`.
    pub fn is_response(&self) -> bool {
        matches!(self.label, Label::Ret(_) | Label::RetAbort)
    }

    pub fn is_client(&self) -> bool {
        self.op.is_none()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = self.op.map(|o| o.0);
        match (&self.label, op) {
            (Label::Inv { method, arg }, Some(o)) => {
                write!(f, "t={} op={} inv {} {}", self.thread, o, method, arg)
            }
            (Label::Ret(v), Some(o)) => write!(f, "t={} op={} ret {}", self.thread, o, v),
            (Label::RetAbort, Some(o)) => write!(f, "t={} op={} abort", self.thread, o),
            (Label::Act(a), Some(o)) => write!(f, "t={} op={} act {}", self.thread, o, a),
            (Label::Act(a), None) => write!(f, "t={} act {}", self.thread, a),
            (label, None) => write!(f, "t={} {:?}", self.thread, label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HistoryError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("event {index}: {reason}")]
    Structure { index: usize, reason: String },
}

/// How an operation ended, if it did.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Response {
    Ret(Value),
    Abort,
}

/// Summary of one method call inside a history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub id: OpId,
    pub thread: ThreadId,
    pub method: String,
    pub arg: Value,
    pub inv_index: usize,
    pub response: Option<(usize, Response)>,
}

impl Operation {
    pub fn is_pending(&self) -> bool {
        self.response.is_none()
    }
}

/// A sequence of invocation and response events with unique operation ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct History {
    events: Vec<Event>,
}

impl History {
    /// Validates the structural invariants: only `Inv`/`Ret`/`RetAbort`
    /// labels, every event carries an op id, each op id has at most one
    /// invocation and one response, and a response follows its invocation on
    /// the same thread.
    pub fn new(events: Vec<Event>) -> Result<History, HistoryError> {
        let mut invoked: HashMap<OpId, ThreadId> = HashMap::new();
        let mut responded: BTreeSet<OpId> = BTreeSet::new();
        for (index, e) in events.iter().enumerate() {
            let structure = |reason: String| HistoryError::Structure { index, reason };
            let op = e
                .op
                .ok_or_else(|| structure("event without operation id".into()))?;
            match &e.label {
                Label::Inv { .. } => {
                    if invoked.insert(op, e.thread).is_some() {
                        return Err(structure(format!("duplicate invocation of {op}")));
                    }
                }
                Label::Ret(_) | Label::RetAbort => match invoked.get(&op) {
                    None => return Err(structure(format!("response of {op} before invocation"))),
                    Some(t) if *t != e.thread => {
                        return Err(structure(format!(
                            "response of {op} on thread {} but invoked on thread {t}",
                            e.thread
                        )))
                    }
                    Some(_) => {
                        if !responded.insert(op) {
                            return Err(structure(format!("duplicate response of {op}")));
                        }
                    }
                },
                Label::Act(_) => return Err(structure("action events are not part of a history".into())),
            }
        }
        Ok(History { events })
    }

    /// Keeps the invocation and response events of a trace.
    pub fn from_trace<'a>(trace: impl IntoIterator<Item = &'a Event>) -> Result<History, HistoryError> {
        History::new(
            trace
                .into_iter()
                .filter(|e| !matches!(e.label, Label::Act(_)))
                .cloned()
                .collect(),
        )
    }

    pub fn empty() -> History {
        History::default()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn threads(&self) -> BTreeSet<ThreadId> {
        self.events.iter().map(|e| e.thread).collect()
    }

    /// Operations in invocation order.
    pub fn operations(&self) -> Vec<Operation> {
        let mut ops: Vec<Operation> = Vec::new();
        let mut index_of: HashMap<OpId, usize> = HashMap::new();
        for (i, e) in self.events.iter().enumerate() {
            let op = e.op.expect("history events carry op ids");
            match &e.label {
                Label::Inv { method, arg } => {
                    index_of.insert(op, ops.len());
                    ops.push(Operation {
                        id: op,
                        thread: e.thread,
                        method: method.clone(),
                        arg: arg.clone(),
                        inv_index: i,
                        response: None,
                    });
                }
                Label::Ret(v) => ops[index_of[&op]].response = Some((i, Response::Ret(v.clone()))),
                Label::RetAbort => ops[index_of[&op]].response = Some((i, Response::Abort)),
                Label::Act(_) => unreachable!("validated on construction"),
            }
        }
        ops
    }

    /// The subsequence of events performed by thread `t`.
    pub fn project_thread(&self, t: ThreadId) -> History {
        History {
            events: self.events.iter().filter(|e| e.thread == t).cloned().collect(),
        }
    }

    /// Every response is immediately preceded by its matching invocation.
    pub fn is_sequential(&self) -> bool {
        let mut open: Option<OpId> = None;
        for e in &self.events {
            if e.is_inv() {
                if open.is_some() {
                    return false;
                }
                open = e.op;
            } else {
                if open != e.op {
                    return false;
                }
                open = None;
            }
        }
        true
    }

    /// Every per-thread projection is sequential.
    pub fn is_well_formed(&self) -> bool {
        self.threads()
            .into_iter()
            .all(|t| self.project_thread(t).is_sequential())
    }

    pub fn is_complete(&self) -> bool {
        self.is_well_formed() && self.pending().is_empty()
    }

    /// Invoked operations without a response.
    pub fn pending(&self) -> BTreeSet<OpId> {
        self.operations()
            .into_iter()
            .filter(Operation::is_pending)
            .map(|o| o.id)
            .collect()
    }

    /// The happened-before order on operations: `o < o'` when the response of
    /// `o` precedes the invocation of `o'`.
    pub fn happened_before(&self) -> OpOrder {
        let ops = self.operations();
        let mut pairs = BTreeSet::new();
        for a in &ops {
            let Some((ret_index, _)) = a.response else {
                continue;
            };
            for b in &ops {
                if ret_index < b.inv_index {
                    pairs.insert((a.id, b.id));
                }
            }
        }
        OpOrder {
            ops: ops.iter().map(|o| o.id).collect(),
            pairs,
        }
    }

    /// Complete histories obtained by dropping or closing each pending
    /// operation. Closed operations get a response appended at the end, with
    /// a value drawn from `candidates(op)`; every append order is produced.
    /// Aborted operations count as already closed.
    pub fn completions<'a, F>(&'a self, candidates: F) -> impl Iterator<Item = History> + 'a
    where
        F: Fn(&Operation) -> Vec<Value> + 'a,
    {
        let ops = self.operations();
        let pending: Vec<Operation> = ops.into_iter().filter(Operation::is_pending).collect();
        let values: Vec<Vec<Value>> = pending.iter().map(&candidates).collect();
        let k = pending.len();
        (0u64..(1u64 << k)).flat_map(move |mask| {
            let kept: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let dropped: BTreeSet<OpId> = (0..k)
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| pending[i].id)
                .collect();
            let base: Vec<Event> = self
                .events
                .iter()
                .filter(|e| !(e.is_inv() && dropped.contains(&e.op.unwrap())))
                .cloned()
                .collect();
            let n = kept.len();
            let pending = pending.clone();
            let values = values.clone();
            kept.into_iter()
                .permutations(n)
                .flat_map(move |order| {
                    let choices: Vec<Vec<Value>> = order.iter().map(|&i| values[i].clone()).collect();
                    let base = base.clone();
                    let pending = pending.clone();
                    choices
                        .into_iter()
                        .multi_cartesian_product_or_unit()
                        .map(move |vals| {
                            let mut events = base.clone();
                            for (&i, v) in order.iter().zip(vals) {
                                let o = &pending[i];
                                events.push(Event {
                                    thread: o.thread,
                                    op: Some(o.id),
                                    label: Label::Ret(v),
                                });
                            }
                            History { events }
                        })
                        .collect::<Vec<_>>()
                })
        })
    }

    /// Replaces method names through `rename`; names it does not map are kept.
    pub fn rename_methods(&self, rename: impl Fn(&str) -> Option<String>) -> History {
        History {
            events: self
                .events
                .iter()
                .map(|e| match &e.label {
                    Label::Inv { method, arg } => Event {
                        thread: e.thread,
                        op: e.op,
                        label: Label::Inv {
                            method: rename(method).unwrap_or_else(|| method.clone()),
                            arg: arg.clone(),
                        },
                    },
                    _ => e.clone(),
                })
                .collect(),
        }
    }
}

/// `multi_cartesian_product` yields nothing for zero factors; a completion
/// with no closed operations still needs the single empty assignment.
trait CartesianOrUnit: Iterator<Item = Vec<Value>> + Sized {
    fn multi_cartesian_product_or_unit(self) -> Box<dyn Iterator<Item = Vec<Value>>>;
}

impl<I: Iterator<Item = Vec<Value>>> CartesianOrUnit for I {
    fn multi_cartesian_product_or_unit(self) -> Box<dyn Iterator<Item = Vec<Value>>> {
        let factors: Vec<Vec<Value>> = self.collect();
        if factors.is_empty() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(factors.into_iter().multi_cartesian_product())
        }
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Strict partial order on the operations of one history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpOrder {
    ops: Vec<OpId>,
    pairs: BTreeSet<(OpId, OpId)>,
}

impl OpOrder {
    pub fn precedes(&self, a: OpId, b: OpId) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn pairs(&self) -> &BTreeSet<(OpId, OpId)> {
        &self.pairs
    }

    pub fn operations(&self) -> &[OpId] {
        &self.ops
    }

    pub fn is_subset(&self, other: &OpOrder) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn is_strict_partial_order(&self) -> bool {
        let irreflexive = self.pairs.iter().all(|(a, b)| a != b);
        let transitive = self.pairs.iter().all(|&(a, b)| {
            self.pairs
                .range((b, OpId(0))..)
                .take_while(|(x, _)| *x == b)
                .all(|&(_, c)| self.pairs.contains(&(a, c)))
        });
        irreflexive && transitive
    }
}

/// `h ⊑ h_seq`, decided through the canonical event correspondence: equal
/// per-thread projections, and every response-before-invocation pair of `h`
/// keeps its order in `h_seq`.
pub fn linearizes(h: &History, h_seq: &History) -> bool {
    if h.len() != h_seq.len() {
        return false;
    }
    let threads = h.threads();
    if threads != h_seq.threads() {
        return false;
    }
    if !threads
        .iter()
        .all(|&t| h.project_thread(t) == h_seq.project_thread(t))
    {
        return false;
    }
    let position: HashMap<&Event, usize> = h_seq
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let mapped: Vec<usize> = h.events.iter().map(|e| position[e]).collect();
    for (i, ei) in h.events.iter().enumerate() {
        if !ei.is_response() {
            continue;
        }
        for (j, ej) in h.events.iter().enumerate().skip(i + 1) {
            if ej.is_inv() && mapped[i] > mapped[j] {
                return false;
            }
        }
    }
    true
}

/// `h ⊑ h_seq` decided literally: searches for a bijection between event
/// positions that preserves event identity and every response-before-
/// invocation pair. Exponential in the worst case; used as an oracle.
pub fn linearizes_by_bijection(h: &History, h_seq: &History) -> bool {
    if h.len() != h_seq.len() {
        return false;
    }
    let threads: BTreeSet<ThreadId> = h.threads().union(&h_seq.threads()).copied().collect();
    if !threads
        .iter()
        .all(|&t| h.project_thread(t) == h_seq.project_thread(t))
    {
        return false;
    }
    let n = h.len();
    let mut assignment = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        i: usize,
        h: &History,
        h_seq: &History,
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == h.len() {
            return true;
        }
        for j in 0..h_seq.len() {
            if used[j] || h.events[i] != h_seq.events[j] {
                continue;
            }
            // Earlier responses must map before this invocation.
            let consistent = !h.events[i].is_inv()
                || (0..i).all(|k| !h.events[k].is_response() || assignment[k] < j);
            if !consistent {
                continue;
            }
            used[j] = true;
            assignment[i] = j;
            if extend(i + 1, h, h_seq, assignment, used) {
                return true;
            }
            used[j] = false;
            assignment[i] = usize::MAX;
        }
        false
    }
    extend(0, h, h_seq, &mut assignment, &mut used)
}

/// Parses the line format
/// `t=<int> op=<int> inv <method> <value>` | `t=<int> op=<int> ret <value>` |
/// `t=<int> op=<int> abort`, ignoring blank lines and `#` comments.
/// A missing invocation argument reads as `unit`.
pub fn parse_history(text: &str) -> Result<History, HistoryError> {
    let mut events = Vec::new();
    let mut line_of_event = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| HistoryError::Parse {
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(err("expected `t=<int> op=<int> <kind> ...`"));
        }
        let thread: ThreadId = tokens[0]
            .strip_prefix("t=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("bad thread field"))?;
        let op: u32 = tokens[1]
            .strip_prefix("op=")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err("bad op field"))?;
        let value = |tok: &str| -> Result<Value, HistoryError> {
            tok.parse::<Value>().map_err(|e| err(&e.to_string()))
        };
        let label = match (tokens[2], &tokens[3..]) {
            ("inv", [method]) => Label::Inv {
                method: method.to_string(),
                arg: Value::Unit,
            },
            ("inv", [method, arg]) => Label::Inv {
                method: method.to_string(),
                arg: value(arg)?,
            },
            ("ret", [v]) => Label::Ret(value(v)?),
            ("abort", []) => Label::RetAbort,
            ("inv" | "ret" | "abort", _) => return Err(err("wrong number of fields")),
            (other, _) => return Err(err(&format!("unknown event kind `{other}`"))),
        };
        events.push(Event {
            thread,
            op: Some(OpId(op)),
            label,
        });
        line_of_event.push(lineno + 1);
    }
    History::new(events).map_err(|e| match e {
        HistoryError::Structure { index, reason } => HistoryError::Parse {
            line: line_of_event[index],
            reason,
        },
        other => other,
    })
}

pub fn serialize_history(h: &History) -> String {
    h.to_string()
}

/// Per-thread operation counts, handy in reports.
pub fn thread_op_counts(h: &History) -> BTreeMap<ThreadId, usize> {
    let mut counts = BTreeMap::new();
    for e in h.events() {
        if e.is_inv() {
            *counts.entry(e.thread).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Value {
        Value::sym(s)
    }

    fn h(events: Vec<Event>) -> History {
        History::new(events).unwrap()
    }

    #[test]
    fn project_thread_examples() {
        assert!(History::empty().project_thread(1).is_empty());
        let hist = h(vec![
            Event::inv(1, 1, "enq", sym("c")),
            Event::inv(2, 2, "deq", Value::Unit),
            Event::ret(1, 1, Value::Unit),
        ]);
        assert_eq!(
            hist.project_thread(1),
            h(vec![Event::inv(1, 1, "enq", sym("c")), Event::ret(1, 1, Value::Unit)])
        );
    }

    #[test]
    fn well_formed_examples() {
        assert!(History::empty().is_well_formed());
        let two_pending = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(1, 2, "m", Value::Unit),
        ]);
        assert!(!two_pending.is_well_formed());
        let interleaved = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::ret(2, 2, Value::Unit),
        ]);
        assert!(interleaved.is_well_formed());
        assert!(!interleaved.is_sequential());
    }

    #[test]
    fn sequential_examples() {
        let seq = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
            Event::ret(2, 2, Value::Unit),
        ]);
        assert!(seq.is_sequential());
        let overlapping = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::ret(2, 2, Value::Unit),
        ]);
        assert!(!overlapping.is_sequential());
    }

    #[test]
    fn pending_examples() {
        let hist = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
        ]);
        assert_eq!(hist.pending(), BTreeSet::from([OpId(2)]));
        let complete = h(vec![Event::inv(1, 1, "m", Value::Unit), Event::ret(1, 1, Value::Unit)]);
        assert!(complete.pending().is_empty());
    }

    #[test]
    fn completions_counts() {
        let complete = h(vec![Event::inv(1, 1, "m", Value::Unit), Event::ret(1, 1, Value::Unit)]);
        let all: Vec<History> = complete.completions(|_| vec![Value::Unit]).collect();
        assert_eq!(all, vec![complete.clone()]);

        let one = h(vec![Event::inv(1, 1, "m", Value::Unit)]);
        assert_eq!(one.completions(|_| vec![Value::Unit]).count(), 2);

        let two = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
        ]);
        let all: Vec<History> = two.completions(|_| vec![Value::Unit]).collect();
        assert_eq!(all.len(), 5);
        assert!(all.iter().all(History::is_complete));
    }

    #[test]
    fn completions_treat_abort_as_closed() {
        let hist = h(vec![Event::inv(1, 1, "m", Value::Unit), Event::abort(1, 1)]);
        let all: Vec<History> = hist.completions(|_| vec![Value::Unit]).collect();
        assert_eq!(all, vec![hist.clone()]);
    }

    #[test]
    fn happened_before_examples() {
        let seq = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::inv(1, 2, "m", Value::Unit),
            Event::ret(1, 2, Value::Unit),
            Event::inv(2, 3, "m", Value::Unit),
            Event::ret(2, 3, Value::Unit),
        ]);
        let order = seq.happened_before();
        assert!(order.precedes(OpId(1), OpId(2)));
        assert!(order.precedes(OpId(2), OpId(3)));
        assert!(order.precedes(OpId(1), OpId(3)));
        assert_eq!(order.pairs().len(), 3);
        let overlapping = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::ret(2, 2, Value::Unit),
        ]);
        assert!(overlapping.happened_before().pairs().is_empty());
    }

    #[test]
    fn linearizes_examples() {
        let a = h(vec![Event::inv(1, 1, "m", Value::Unit), Event::ret(1, 1, Value::Unit)]);
        let b = h(vec![Event::inv(2, 2, "m", Value::Unit), Event::ret(2, 2, Value::Unit)]);
        let ab = h([a.events(), b.events()].concat());
        let ba = h([b.events(), a.events()].concat());
        assert!(linearizes(&ab, &ab));
        assert!(!linearizes(&ab, &ba));
        assert!(!linearizes_by_bijection(&ab, &ba));
        let overlapping = h(vec![
            Event::inv(1, 1, "m", Value::Unit),
            Event::inv(2, 2, "m", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::ret(2, 2, Value::Unit),
        ]);
        assert!(linearizes(&overlapping, &ab));
        assert!(linearizes(&overlapping, &ba));
        assert!(linearizes_by_bijection(&overlapping, &ba));
    }

    #[test]
    fn parse_examples() {
        let hist = parse_history("t=1 op=1 inv Enqueue 'c'\n").unwrap();
        assert_eq!(hist.events(), &[Event::inv(1, 1, "Enqueue", sym("c"))]);
        let err = parse_history("# header\nt=1 op=1 ret unit\n").unwrap_err();
        assert!(matches!(err, HistoryError::Parse { line: 2, .. }), "{err}");
        let dup = parse_history("t=1 op=1 inv A 1\nt=2 op=1 inv B 2\n").unwrap_err();
        assert!(matches!(dup, HistoryError::Parse { line: 2, .. }));
        assert!(matches!(
            parse_history("t=x op=1 abort").unwrap_err(),
            HistoryError::Parse { line: 1, .. }
        ));
        assert!(parse_history("t=1 op=1 frob").is_err());
    }

    #[test]
    fn serialize_is_line_format() {
        let hist = h(vec![
            Event::inv(1, 1, "Enqueue", sym("c")),
            Event::inv(2, 2, "Dequeue", Value::Unit),
            Event::ret(1, 1, Value::Unit),
            Event::abort(2, 2),
        ]);
        let text = serialize_history(&hist);
        assert_eq!(
            text,
            "t=1 op=1 inv Enqueue 'c'\nt=2 op=2 inv Dequeue unit\nt=1 op=1 ret unit\nt=2 op=2 abort\n"
        );
        assert_eq!(parse_history(&text).unwrap(), hist);
    }
}
