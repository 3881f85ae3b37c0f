//! Exhaustive interleaving exploration of client programs over object models.
//!
//! A configuration holds the client variables, each thread's program counter
//! and call phase, and the object's shared state. The explorer builds the
//! whole configuration graph (hashing configurations, bounded by a transition
//! budget), finds fair cycles for divergence, and reads projected traces off
//! the graph.
//!
//! Transitions of one thread, in order, for `call y = Q.M(e)`:
//! evaluate `e` (client), invoke (object), one transition per body step (the
//! last one carries the response), assign `y` (client). With no argument the
//! evaluation is skipped; with no target the last body step also moves the
//! program counter. Models with [`ObjectModel::atomic_calls`] fuse the
//! invocation, body and response into one transition.
//!
//! A thread that cannot move (a blocked body step, a false `await`) spins in
//! place. A cycle counts as divergence only when it is fair: every unfinished
//! thread steps inside it or spins somewhere on it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::history::{Action, Event, Label, OpId, ThreadId};
use crate::models::{Next, ObjectModel};
use crate::spec::SpecState;
use crate::value::Value;

mod atomic;
mod program;
mod report;

pub use atomic::{run_atomic, AtomicModel};
pub use program::{parse_program, ClientState, CmpOp, Cond, EvalError, Expr, Program, ProgramError, Stmt};
pub use report::{
    compare_theorem6, detect_divergence_theorem10, DivergenceSummary, Theorem10Report, Theorem6Report,
};

use program::{CompiledThread, Instr};

/// Default transition budget.
pub const DEFAULT_BOUND: usize = 200_000;

/// Which events a projected trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Projection {
    /// Every event, object steps included.
    Full,
    /// Client actions plus invocations and responses.
    Interface,
    /// Invocations and responses only.
    History,
    /// Client actions only.
    Client,
}

impl Projection {
    pub fn keeps(self, e: &Event) -> bool {
        let object_step = matches!(e.label, Label::Act(_)) && e.op.is_some();
        match self {
            Projection::Full => true,
            Projection::Interface => !object_step,
            Projection::History => !matches!(e.label, Label::Act(_)),
            Projection::Client => e.is_client(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    /// Maximum number of transitions generated.
    pub bound: usize,
    pub projection: Projection,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            bound: DEFAULT_BOUND,
            projection: Projection::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExploreError {
    #[error("model {model} has no method `{method}`")]
    UnknownMethod { model: String, method: String },
    #[error("initial object state is not well-formed: {0}")]
    IllFormedInitial(String),
    #[error("schedule step {step}: thread {thread} cannot move")]
    NotEnabled { step: usize, thread: ThreadId },
    #[error("schedule ended before the program finished")]
    ScheduleIncomplete,
}

/// Where a thread is inside its current call.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CallPhase<L> {
    Idle,
    /// Argument evaluated, invocation next.
    Evaluated(Value),
    Running(L),
    /// Response received, assignment of the target next.
    Returned(Value),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThreadState<L> {
    pub pc: usize,
    pub call: CallPhase<L>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config<S, L> {
    pub client: ClientState,
    pub threads: Vec<ThreadState<L>>,
    pub shared: S,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Outcome<S> {
    Terminated { client: ClientState, shared: S },
    Aborted,
    ClientDivergent,
    ObjectDivergent,
    /// The transition budget ran out on this path.
    BudgetExhausted,
}

impl<S> Outcome<S> {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Outcome::ClientDivergent | Outcome::ObjectDivergent)
    }
}

/// One explored execution: its projected trace and how it ended. Divergent
/// executions carry the trace up to the point where the fair cycle is entered.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExecutionResult<S> {
    pub trace: Vec<Event>,
    pub outcome: Outcome<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TraceEnd {
    Terminated,
    Aborted,
    Diverged,
}

/// A client-side trace, the unit of comparison for MT.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClientTrace {
    pub events: Vec<Event>,
    pub end: TraceEnd,
}

impl fmt::Display for ClientTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.events.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}] {:?}", body.join("; "), self.end)
    }
}

/// A member of MS: a final configuration, the abort marker or `⊥`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FinalState<S> {
    State { client: ClientState, shared: S },
    Abort,
    Diverge,
}

impl<S: SpecState> FinalState<S> {
    pub fn render(&self) -> String {
        match self {
            FinalState::State { client, shared } => {
                let vars: Vec<String> = client.iter().map(|(x, v)| format!("{x}={v}")).collect();
                format!("{} | {}", shared.render(), vars.join(" "))
            }
            FinalState::Abort => "abort".into(),
            FinalState::Diverge => "⊥".into(),
        }
    }
}

/// MT: client projections of terminated, aborted and client-divergent
/// results. Results should come from a [`Projection::Client`] run; other
/// events are filtered out here anyway.
pub fn client_traces<S>(results: &[ExecutionResult<S>]) -> BTreeSet<ClientTrace> {
    results
        .iter()
        .filter_map(|r| {
            let end = match r.outcome {
                Outcome::Terminated { .. } => TraceEnd::Terminated,
                Outcome::Aborted => TraceEnd::Aborted,
                Outcome::ClientDivergent => TraceEnd::Diverged,
                Outcome::ObjectDivergent | Outcome::BudgetExhausted => return None,
            };
            Some(ClientTrace {
                events: r.trace.iter().filter(|e| e.is_client()).cloned().collect(),
                end,
            })
        })
        .collect()
}

/// MS: final configurations, `abort`, and `⊥` for client divergence.
pub fn final_states<S: Clone + Ord>(results: &[ExecutionResult<S>]) -> BTreeSet<FinalState<S>> {
    results
        .iter()
        .filter_map(|r| match &r.outcome {
            Outcome::Terminated { client, shared } => Some(FinalState::State {
                client: client.clone(),
                shared: shared.clone(),
            }),
            Outcome::Aborted => Some(FinalState::Abort),
            Outcome::ClientDivergent => Some(FinalState::Diverge),
            _ => None,
        })
        .collect()
}

/// Where a transition leads.
enum Target<S, L> {
    To(Config<S, L>),
    Abort,
}

struct Move<S, L> {
    events: Vec<Event>,
    /// Carries an operation event.
    object: bool,
    target: Target<S, L>,
}

enum ThreadMoves<S, L> {
    Finished,
    /// Spins in place; `object` when the spin is inside a call.
    Blocked { object: bool },
    Enabled(Vec<Move<S, L>>),
}

struct Machine<'m, M: ObjectModel + ?Sized> {
    model: &'m M,
    threads: Vec<CompiledThread>,
}

impl<'m, M: ObjectModel + ?Sized> Machine<'m, M> {
    fn new(program: &Program, model: &'m M) -> Result<Self, ExploreError> {
        let known = model.methods();
        for m in program.methods() {
            if !known.contains(&m) {
                return Err(ExploreError::UnknownMethod {
                    model: model.name(),
                    method: m,
                });
            }
        }
        Ok(Machine {
            model,
            threads: program.threads.iter().map(|t| CompiledThread::compile(t)).collect(),
        })
    }

    fn initial(&self, client: &ClientState, shared: &M::State) -> Config<M::State, M::Local> {
        Config {
            client: client.clone(),
            threads: self
                .threads
                .iter()
                .map(|t| ThreadState {
                    pc: t.normalize(0),
                    call: CallPhase::Idle,
                })
                .collect(),
            shared: shared.clone(),
        }
    }

    fn is_finished(&self, cfg: &Config<M::State, M::Local>, i: usize) -> bool {
        let th = &cfg.threads[i];
        th.pc == self.threads[i].end() && th.call == CallPhase::Idle
    }

    fn is_terminal(&self, cfg: &Config<M::State, M::Local>) -> bool {
        (0..cfg.threads.len()).all(|i| self.is_finished(cfg, i))
    }

    fn moves(&self, cfg: &Config<M::State, M::Local>, i: usize) -> ThreadMoves<M::State, M::Local> {
        let code = &self.threads[i];
        let tid = (i + 1) as ThreadId;
        let op = Some(OpId(tid));
        let th = &cfg.threads[i];
        let client_event = |a: Action| Event {
            thread: tid,
            op: None,
            label: Label::Act(a),
        };
        let fault = |msg: String| {
            ThreadMoves::Enabled(vec![Move {
                events: vec![client_event(Action::Fault(msg))],
                object: false,
                target: Target::Abort,
            }])
        };
        let with = |pc: usize, call: CallPhase<M::Local>, client: Option<ClientState>, shared: Option<M::State>| {
            let mut next = cfg.clone();
            next.threads[i] = ThreadState {
                pc: code.normalize(pc),
                call,
            };
            if let Some(c) = client {
                next.client = c;
            }
            if let Some(s) = shared {
                next.shared = s;
            }
            next
        };
        let instr = code.code.get(th.pc);
        let call_target = || match instr {
            Some(Instr::Call { target, .. }) => target.clone(),
            _ => None,
        };

        // Body steps, optionally prefixed by the invocation.
        let body = |local: &M::Local, prefix: Vec<Event>| -> ThreadMoves<M::State, M::Local> {
            let steps = self.model.step(local, &cfg.shared);
            if steps.is_empty() {
                return ThreadMoves::Blocked { object: true };
            }
            let target_var = call_target();
            ThreadMoves::Enabled(
                steps
                    .into_iter()
                    .map(|step| {
                        let mut events = prefix.clone();
                        events.push(Event {
                            thread: tid,
                            op,
                            label: Label::Act(Action::Object(step.action)),
                        });
                        let target = match step.next {
                            Next::Continue(l) => Target::To(with(th.pc, CallPhase::Running(l), None, Some(step.shared))),
                            Next::Return(v) => {
                                events.push(Event {
                                    thread: tid,
                                    op,
                                    label: Label::Ret(v.clone()),
                                });
                                Target::To(match target_var {
                                    Some(_) => with(th.pc, CallPhase::Returned(v), None, Some(step.shared)),
                                    None => with(th.pc + 1, CallPhase::Idle, None, Some(step.shared)),
                                })
                            }
                            Next::Abort => {
                                events.push(Event {
                                    thread: tid,
                                    op,
                                    label: Label::RetAbort,
                                });
                                Target::Abort
                            }
                        };
                        Move {
                            events,
                            object: true,
                            target,
                        }
                    })
                    .collect(),
            )
        };

        let invoke = |arg: Value| -> ThreadMoves<M::State, M::Local> {
            let Some(Instr::Call { method, .. }) = instr else {
                unreachable!("invocation outside a call");
            };
            let Some(local) = self.model.invoke(method, &arg) else {
                return fault(format!("unknown method {method}"));
            };
            let inv = Event {
                thread: tid,
                op,
                label: Label::Inv {
                    method: method.clone(),
                    arg,
                },
            };
            if self.model.atomic_calls() {
                body(&local, vec![inv])
            } else {
                ThreadMoves::Enabled(vec![Move {
                    events: vec![inv],
                    object: true,
                    target: Target::To(with(th.pc, CallPhase::Running(local), None, None)),
                }])
            }
        };

        match &th.call {
            CallPhase::Running(local) => return body(local, vec![]),
            CallPhase::Evaluated(v) => return invoke(v.clone()),
            CallPhase::Returned(v) => {
                let var = call_target().expect("returned phase implies a target");
                let mut client = cfg.client.clone();
                client.insert(var.clone(), v.clone());
                return ThreadMoves::Enabled(vec![Move {
                    events: vec![client_event(Action::Assign { var, value: v.clone() })],
                    object: false,
                    target: Target::To(with(th.pc + 1, CallPhase::Idle, Some(client), None)),
                }]);
            }
            CallPhase::Idle => {}
        }
        let Some(instr) = instr else {
            return ThreadMoves::Finished;
        };
        let env = &cfg.client;
        let step_client = |a: Action, pc: usize, client: Option<ClientState>, shared: Option<M::State>| {
            ThreadMoves::Enabled(vec![Move {
                events: vec![client_event(a)],
                object: false,
                target: Target::To(with(pc, CallPhase::Idle, client, shared)),
            }])
        };
        match instr {
            Instr::Call { arg: Some(e), .. } => match e.eval(env) {
                Ok(v) => ThreadMoves::Enabled(vec![Move {
                    events: vec![client_event(Action::Eval(v.clone()))],
                    object: false,
                    target: Target::To(with(th.pc, CallPhase::Evaluated(v), None, None)),
                }]),
                Err(EvalError(msg)) => fault(msg),
            },
            Instr::Call { arg: None, .. } => invoke(Value::Unit),
            Instr::Read { target, cell } => match cfg.shared.read_cell(cell) {
                Some(v) => {
                    let mut client = env.clone();
                    client.insert(target.clone(), v.clone());
                    step_client(
                        Action::Read {
                            var: target.clone(),
                            cell: cell.clone(),
                            value: v,
                        },
                        th.pc + 1,
                        Some(client),
                        None,
                    )
                }
                None => fault(format!("no cell {cell}")),
            },
            Instr::Write { cell, expr } => match expr.eval(env) {
                Ok(v) => {
                    let mut shared = cfg.shared.clone();
                    if !shared.write_cell(cell, v.clone()) {
                        return fault(format!("no cell {cell}"));
                    }
                    step_client(
                        Action::Write {
                            cell: cell.clone(),
                            value: v,
                        },
                        th.pc + 1,
                        None,
                        Some(shared),
                    )
                }
                Err(EvalError(msg)) => fault(msg),
            },
            Instr::Assign { var, expr } => match expr.eval(env) {
                Ok(v) => {
                    let mut client = env.clone();
                    client.insert(var.clone(), v.clone());
                    step_client(
                        Action::Assign {
                            var: var.clone(),
                            value: v,
                        },
                        th.pc + 1,
                        Some(client),
                        None,
                    )
                }
                Err(EvalError(msg)) => fault(msg),
            },
            Instr::Atomic { guard, assigns } => {
                match guard.as_ref().map(|g| g.eval(env)).transpose() {
                    Err(EvalError(msg)) => return fault(msg),
                    Ok(Some(false)) => return ThreadMoves::Blocked { object: false },
                    Ok(_) => {}
                }
                let mut values = Vec::new();
                for (x, e) in assigns {
                    match e.eval(env) {
                        Ok(v) => values.push((x.clone(), v)),
                        Err(EvalError(msg)) => return fault(msg),
                    }
                }
                let mut client = env.clone();
                client.extend(values.iter().cloned());
                let action = if values.is_empty() {
                    Action::Test(true)
                } else {
                    Action::Atomic(values)
                };
                step_client(action, th.pc + 1, Some(client), None)
            }
            Instr::Branch { cond, target } => match cond.eval(env) {
                Ok(b) => step_client(Action::Test(b), if b { th.pc + 1 } else { *target }, None, None),
                Err(EvalError(msg)) => fault(msg),
            },
            Instr::Jump(t) => step_client(Action::Test(true), *t, None, None),
        }
    }
}

/// Gives operations ids `1, 2, ...` in invocation order, replacing the
/// per-thread placeholders used during search.
pub fn renumber_ops(trace: &[Event]) -> Vec<Event> {
    let mut current: HashMap<ThreadId, u32> = HashMap::new();
    let mut next = 0;
    trace
        .iter()
        .map(|e| {
            let mut e = e.clone();
            if e.op.is_some() {
                if e.is_inv() {
                    next += 1;
                    current.insert(e.thread, next);
                }
                e.op = current.get(&e.thread).map(|&o| OpId(o));
            }
            e
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NodeKind {
    Live,
    Terminal,
    Cut,
    Abort,
}

struct Edge {
    target: u32,
    thread: u32,
    object: bool,
    events: Vec<Event>,
}

const ABORT: u32 = 0;

/// The explored configuration graph of one program run.
pub struct Exploration<S, L> {
    configs: IndexSet<Config<S, L>>,
    /// Indexed by node id; node 0 is the abort sink and node `k + 1` is
    /// `configs[k]`.
    kinds: Vec<NodeKind>,
    edges: Vec<Vec<Edge>>,
    spins: Vec<Vec<(u32, bool)>>,
    unfinished: Vec<Vec<u32>>,
    canonical: HashMap<u32, S>,
    object_div: Vec<bool>,
    client_div: Vec<bool>,
    transitions: usize,
}

/// Builds the configuration graph of `program` over `model`.
pub fn explore<M: ObjectModel + ?Sized>(
    program: &Program,
    model: &M,
    client: &ClientState,
    shared: &M::State,
    bound: usize,
) -> Result<Exploration<M::State, M::Local>, ExploreError> {
    if !model.is_well_formed(shared) {
        return Err(ExploreError::IllFormedInitial(shared.render()));
    }
    let machine = Machine::new(program, model)?;
    let mut ex = Exploration {
        configs: IndexSet::new(),
        kinds: vec![NodeKind::Abort],
        edges: vec![vec![]],
        spins: vec![vec![]],
        unfinished: vec![vec![]],
        canonical: HashMap::new(),
        object_div: vec![],
        client_div: vec![],
        transitions: 0,
    };
    let intern = |ex: &mut Exploration<M::State, M::Local>, cfg: Config<M::State, M::Local>, work: &mut Vec<u32>| {
        let (idx, fresh) = ex.configs.insert_full(cfg);
        let id = (idx + 1) as u32;
        if fresh {
            ex.kinds.push(NodeKind::Live);
            ex.edges.push(vec![]);
            ex.spins.push(vec![]);
            ex.unfinished.push(vec![]);
            work.push(id);
        }
        id
    };
    let mut work = Vec::new();
    intern(&mut ex, machine.initial(client, shared), &mut work);
    while let Some(id) = work.pop() {
        let cfg = ex.configs[(id - 1) as usize].clone();
        if machine.is_terminal(&cfg) {
            ex.kinds[id as usize] = NodeKind::Terminal;
            ex.canonical.insert(id, model.canonical(&cfg.shared));
            continue;
        }
        if ex.transitions >= bound {
            ex.kinds[id as usize] = NodeKind::Cut;
            continue;
        }
        let mut edges = Vec::new();
        let mut spins = Vec::new();
        let mut unfinished = Vec::new();
        for i in 0..cfg.threads.len() {
            let tid = (i + 1) as u32;
            match machine.moves(&cfg, i) {
                ThreadMoves::Finished => continue,
                ThreadMoves::Blocked { object } => spins.push((tid, object)),
                ThreadMoves::Enabled(moves) => {
                    for m in moves {
                        let target = match m.target {
                            Target::Abort => ABORT,
                            Target::To(next) => intern(&mut ex, next, &mut work),
                        };
                        edges.push(Edge {
                            target,
                            thread: tid,
                            object: m.object,
                            events: m.events,
                        });
                    }
                }
            }
            unfinished.push(tid);
        }
        ex.transitions += edges.len();
        ex.edges[id as usize] = edges;
        ex.spins[id as usize] = spins;
        ex.unfinished[id as usize] = unfinished;
    }
    ex.analyse_divergence();
    Ok(ex)
}

impl<S: SpecState, L: Clone + Eq + std::hash::Hash> Exploration<S, L> {
    pub fn node_count(&self) -> usize {
        self.configs.len()
    }

    pub fn transitions(&self) -> usize {
        self.transitions
    }

    /// Some path was cut by the transition budget.
    pub fn budget_exhausted(&self) -> bool {
        self.kinds.contains(&NodeKind::Cut)
    }

    pub fn configs(&self) -> impl Iterator<Item = &Config<S, L>> {
        self.configs.iter()
    }

    /// Configurations where every thread has finished.
    pub fn terminal_configs(&self) -> impl Iterator<Item = &Config<S, L>> {
        self.configs
            .iter()
            .enumerate()
            .filter(|(k, _)| self.kinds[k + 1] == NodeKind::Terminal)
            .map(|(_, c)| c)
    }

    pub fn can_abort(&self) -> bool {
        self.edges.iter().flatten().any(|e| e.target == ABORT)
    }

    pub fn has_object_divergence(&self) -> bool {
        self.object_div.contains(&true)
    }

    pub fn has_client_divergence(&self) -> bool {
        self.client_div.contains(&true)
    }

    /// MS computed straight from the graph.
    pub fn final_states(&self) -> BTreeSet<FinalState<S>> {
        let mut out: BTreeSet<FinalState<S>> = self
            .canonical
            .iter()
            .map(|(id, s)| FinalState::State {
                client: self.configs[(*id - 1) as usize].client.clone(),
                shared: s.clone(),
            })
            .collect();
        if self.can_abort() {
            out.insert(FinalState::Abort);
        }
        if self.has_client_divergence() {
            out.insert(FinalState::Diverge);
        }
        out
    }

    fn analyse_divergence(&mut self) {
        self.object_div = self.fair_cycles(true);
        self.client_div = self.fair_cycles(false);
    }

    /// Marks nodes on fair cycles. With `object` set, cycles over all edges
    /// and spins that include object activity; otherwise cycles over client
    /// edges and client spins only.
    fn fair_cycles(&self, object: bool) -> Vec<bool> {
        let keep_edge = |e: &Edge| object || !e.object;
        let keep_spin = |spin_object: bool| object || !spin_object;
        let n = self.kinds.len();
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            g.add_node(());
        }
        for (u, es) in self.edges.iter().enumerate() {
            for e in es.iter().filter(|e| keep_edge(e)) {
                g.add_edge(NodeIndex::new(u), NodeIndex::new(e.target as usize), ());
            }
        }
        let sccs = tarjan_scc(&g);
        let mut scc_of = vec![0usize; n];
        for (k, scc) in sccs.iter().enumerate() {
            for v in scc {
                scc_of[v.index()] = k;
            }
        }
        let mut marked = vec![false; n];
        for (k, scc) in sccs.iter().enumerate() {
            let mut movers: BTreeSet<u32> = BTreeSet::new();
            let mut cyclic = false;
            let mut object_activity = false;
            for v in scc {
                let u = v.index();
                for e in self.edges[u].iter().filter(|e| keep_edge(e)) {
                    if scc_of[e.target as usize] == k {
                        cyclic = true;
                        object_activity |= e.object;
                        movers.insert(e.thread);
                    }
                }
                for &(t, object) in &self.spins[u] {
                    if keep_spin(object) {
                        cyclic = true;
                        object_activity |= object;
                        movers.insert(t);
                    }
                }
            }
            if !cyclic {
                continue;
            }
            let u0 = scc[0].index();
            let fair = self.unfinished[u0].iter().all(|t| movers.contains(t));
            if fair && (!object || object_activity) {
                for v in scc {
                    marked[v.index()] = true;
                }
            }
        }
        marked
    }

    fn outcomes_at(&self, node: u32, out: &mut Vec<Outcome<S>>) {
        let u = node as usize;
        match self.kinds[u] {
            NodeKind::Abort => out.push(Outcome::Aborted),
            NodeKind::Terminal => out.push(Outcome::Terminated {
                client: self.configs[u - 1].client.clone(),
                shared: self.canonical[&node].clone(),
            }),
            NodeKind::Cut => out.push(Outcome::BudgetExhausted),
            NodeKind::Live => {}
        }
        if self.object_div.get(u) == Some(&true) {
            out.push(Outcome::ObjectDivergent);
        }
        if self.client_div.get(u) == Some(&true) {
            out.push(Outcome::ClientDivergent);
        }
    }

    fn closure(&self, seed: impl IntoIterator<Item = u32>, projection: Projection) -> Vec<u32> {
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut stack: Vec<u32> = seed.into_iter().collect();
        while let Some(u) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            for e in &self.edges[u as usize] {
                if !e.events.iter().any(|ev| projection.keeps(ev)) {
                    stack.push(e.target);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Distinct `(projected trace, outcome)` pairs, sorted.
    ///
    /// Paths with the same projected word are merged (a subset construction
    /// over the edges the projection hides). A word that revisits a merged
    /// state is cut there, so cycles with visible events are unrolled once.
    pub fn results(&self, projection: Projection) -> Vec<ExecutionResult<S>> {
        struct DState {
            outcomes: Vec<usize>,
            succ: Option<Vec<(Vec<Event>, usize)>>,
        }
        let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut states: Vec<(Vec<u32>, DState)> = Vec::new();
        let mut outcome_pool: Vec<Outcome<S>> = Vec::new();
        let mut outcome_ids: HashMap<Outcome<S>, usize> = HashMap::new();

        let mut intern = |nodes: Vec<u32>, states: &mut Vec<(Vec<u32>, DState)>| -> usize {
            if let Some(&id) = ids.get(&nodes) {
                return id;
            }
            let mut outs = Vec::new();
            for &u in &nodes {
                self.outcomes_at(u, &mut outs);
            }
            let mut out_ids: Vec<usize> = outs
                .into_iter()
                .map(|o| {
                    *outcome_ids.entry(o.clone()).or_insert_with(|| {
                        outcome_pool.push(o);
                        outcome_pool.len() - 1
                    })
                })
                .collect();
            out_ids.sort_unstable();
            out_ids.dedup();
            let id = states.len();
            ids.insert(nodes.clone(), id);
            states.push((
                nodes,
                DState {
                    outcomes: out_ids,
                    succ: None,
                },
            ));
            id
        };

        let start = intern(self.closure([1], projection), &mut states);
        let mut found: BTreeSet<(Vec<Event>, usize)> = BTreeSet::new();
        let mut word: Vec<Event> = Vec::new();
        let mut on_stack: Vec<bool> = vec![];
        // Frames: (dfa state, next successor index, word length on entry).
        let mut stack: Vec<(usize, usize, usize)> = vec![(start, 0, 0)];
        let mark = |on: &mut Vec<bool>, i: usize, v: bool| {
            if on.len() <= i {
                on.resize(i + 1, false);
            }
            on[i] = v;
        };
        mark(&mut on_stack, start, true);
        for &o in &states[start].1.outcomes {
            found.insert((vec![], o));
        }
        while let Some(&(d, idx, wlen)) = stack.last() {
            if states[d].1.succ.is_none() {
                let mut groups: BTreeMap<Vec<Event>, BTreeSet<u32>> = BTreeMap::new();
                for &u in &states[d].0 {
                    for e in &self.edges[u as usize] {
                        let visible: Vec<Event> = e.events.iter().filter(|ev| projection.keeps(ev)).cloned().collect();
                        if !visible.is_empty() {
                            groups.entry(visible).or_default().insert(e.target);
                        }
                    }
                }
                let succ = groups
                    .into_iter()
                    .map(|(w, targets)| {
                        let nodes = self.closure(targets, projection);
                        (w, intern(nodes, &mut states))
                    })
                    .collect();
                states[d].1.succ = Some(succ);
            }
            let succ_len = states[d].1.succ.as_ref().map_or(0, Vec::len);
            if idx >= succ_len {
                stack.pop();
                mark(&mut on_stack, d, false);
                word.truncate(wlen);
                continue;
            }
            let (w, next) = states[d].1.succ.as_ref().expect("computed")[idx].clone();
            stack.last_mut().expect("non-empty").1 += 1;
            word.truncate(wlen);
            word.extend(w);
            if on_stack.get(next) == Some(&true) {
                continue;
            }
            let renumbered = renumber_ops(&word);
            for &o in &states[next].1.outcomes {
                found.insert((renumbered.clone(), o));
            }
            mark(&mut on_stack, next, true);
            stack.push((next, 0, word.len()));
        }
        let mut out: Vec<ExecutionResult<S>> = found
            .into_iter()
            .map(|(trace, o)| ExecutionResult {
                trace,
                outcome: outcome_pool[o].clone(),
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Explores and returns the projected execution results.
pub fn enumerate_executions<M: ObjectModel + ?Sized>(
    program: &Program,
    model: &M,
    client: &ClientState,
    shared: &M::State,
    opts: &ExploreOptions,
) -> Result<Vec<ExecutionResult<M::State>>, ExploreError> {
    Ok(explore(program, model, client, shared, opts.bound)?.results(opts.projection))
}

/// Runs one schedule, given as the thread (numbered from 1) that moves at
/// each step. When a thread has several transitions the first is taken.
pub fn replay_schedule<M: ObjectModel + ?Sized>(
    program: &Program,
    model: &M,
    client: &ClientState,
    shared: &M::State,
    schedule: &[ThreadId],
) -> Result<ExecutionResult<M::State>, ExploreError> {
    let machine = Machine::new(program, model)?;
    let mut cfg = machine.initial(client, shared);
    let mut trace = Vec::new();
    for (step, &thread) in schedule.iter().enumerate() {
        let i = (thread as usize).wrapping_sub(1);
        if i >= cfg.threads.len() {
            return Err(ExploreError::NotEnabled { step, thread });
        }
        let ThreadMoves::Enabled(moves) = machine.moves(&cfg, i) else {
            return Err(ExploreError::NotEnabled { step, thread });
        };
        let m = moves.into_iter().next().expect("enabled means non-empty");
        trace.extend(m.events);
        match m.target {
            Target::To(next) => cfg = next,
            Target::Abort => {
                if step + 1 != schedule.len() {
                    return Err(ExploreError::NotEnabled { step: step + 1, thread });
                }
                return Ok(ExecutionResult {
                    trace: renumber_ops(&trace),
                    outcome: Outcome::Aborted,
                });
            }
        }
    }
    if !machine.is_terminal(&cfg) {
        return Err(ExploreError::ScheduleIncomplete);
    }
    Ok(ExecutionResult {
        trace: renumber_ops(&trace),
        outcome: Outcome::Terminated {
            client: cfg.client,
            shared: model.canonical(&cfg.shared),
        },
    })
}
