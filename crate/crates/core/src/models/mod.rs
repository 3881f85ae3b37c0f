//! Executable fine-grained objects and their sequential specifications.
//!
//! An [`ObjectModel`] is a step machine: each call gets a local state, and
//! [`ObjectModel::step`] lists the atomic transitions available from a
//! `(local, shared)` pair. An empty list means the call is blocked.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use crate::spec::SpecState;
use crate::value::Value;

pub mod adt;
pub mod coarse;
pub mod hw;
pub mod ms;

pub use adt::{MultisetAdt, MultisetState, OnEmpty, PseudoQueueAdt, QueueSpec, QueueState};
pub use coarse::CoarseQueue;
pub use hw::{AfHwQueue, HwQueue, HwQueueSeq, HwState};
pub use ms::{AfMultiset, AfPseudo, AfQueue, MsQueue, MsQueueSeq, MsState};

/// What a call does after one atomic step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Next<L> {
    Continue(L),
    Return(Value),
    /// Runtime error; the whole program aborts.
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Step<L, S> {
    /// Human-readable description of the atomic action.
    pub action: String,
    pub shared: S,
    pub next: Next<L>,
}

pub trait ObjectModel: Send + Sync {
    type State: SpecState;
    type Local: Clone + Debug + Eq + Hash + Send + Sync;

    fn name(&self) -> String;

    fn methods(&self) -> Vec<String>;

    fn initial_state(&self) -> Self::State;

    /// Local state of a fresh call; `None` for an unknown method.
    fn invoke(&self, method: &str, arg: &Value) -> Option<Self::Local>;

    fn step(&self, local: &Self::Local, shared: &Self::State) -> Vec<Step<Self::Local, Self::State>>;

    /// When true the invocation, the whole body and the response form one
    /// transition, which is only enabled when [`ObjectModel::step`] offers one.
    fn atomic_calls(&self) -> bool {
        false
    }

    /// Well-formedness of quiescent states.
    fn is_well_formed(&self, _state: &Self::State) -> bool {
        true
    }

    /// Invariant expected of every reachable state, including states in the
    /// middle of operations.
    fn invariant(&self, state: &Self::State) -> bool {
        self.is_well_formed(state)
    }

    /// Representative used when comparing states across executions.
    fn canonical(&self, state: &Self::State) -> Self::State {
        state.clone()
    }
}

/// Behaviour of one call run with no other thread interfering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isolation<S: Ord> {
    /// Canonical final states and return values.
    pub returns: BTreeSet<(S, Value)>,
    pub aborts: bool,
    /// Some path revisits a `(local, shared)` pair.
    pub diverges: bool,
    /// Some reachable shared state differs from the starting one.
    pub modifies_state: bool,
    /// The step limit was hit before the search finished.
    pub truncated: bool,
}

impl<S: Ord> Isolation<S> {
    /// Terminates, or never touches the object state.
    pub fn is_purely_blocking(&self) -> bool {
        !self.truncated && (!self.diverges || !self.modifies_state)
    }
}

pub fn run_in_isolation<M: ObjectModel + ?Sized>(
    model: &M,
    local: &M::Local,
    shared: &M::State,
    limit: usize,
) -> Isolation<M::State> {
    let mut out = Isolation {
        returns: BTreeSet::new(),
        aborts: false,
        diverges: false,
        modifies_state: false,
        truncated: false,
    };
    let mut done: HashSet<(M::Local, M::State)> = HashSet::new();
    let mut on_stack: HashSet<(M::Local, M::State)> = HashSet::new();
    // Iterative DFS: (node, next successor index, successors).
    type Frame<L, S> = ((L, S), usize, Vec<Step<L, S>>);
    let start = (local.clone(), shared.clone());
    let mut stack: Vec<Frame<M::Local, M::State>> = Vec::new();
    let mut visited = 0usize;
    let succ = |node: &(M::Local, M::State)| model.step(&node.0, &node.1);
    on_stack.insert(start.clone());
    let first = succ(&start);
    if first.is_empty() {
        // Blocked from the start: spins without effect.
        out.diverges = true;
    }
    stack.push((start, 0, first));
    while let Some((node, idx, steps)) = stack.last_mut() {
        if *idx == steps.len() {
            let node = node.clone();
            stack.pop();
            on_stack.remove(&node);
            done.insert(node);
            continue;
        }
        let step = steps[*idx].clone();
        *idx += 1;
        if step.shared != *shared {
            out.modifies_state = true;
        }
        match step.next {
            Next::Return(v) => {
                out.returns.insert((model.canonical(&step.shared), v));
            }
            Next::Abort => out.aborts = true,
            Next::Continue(l) => {
                let child = (l, step.shared);
                if on_stack.contains(&child) {
                    out.diverges = true;
                    continue;
                }
                if done.contains(&child) {
                    continue;
                }
                visited += 1;
                if visited > limit {
                    out.truncated = true;
                    break;
                }
                let steps = succ(&child);
                if steps.is_empty() {
                    out.diverges = true;
                }
                on_stack.insert(child.clone());
                stack.push((child, 0, steps));
            }
        }
    }
    out
}
