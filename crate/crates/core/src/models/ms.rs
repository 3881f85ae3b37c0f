//! The Michael–Scott lock-free queue over a bounded node store of `P` nodes.
//!
//! ```text
//! Enqueue(v):  n := new_node(); n.value := v; n.next := null;
//!              loop { t := Tail; tn := t.next;
//!                     if t = Tail { if tn = null { if cas(t.next, tn, n) break }
//!                                   else cas(Tail, t, tn) } }
//!              cas(Tail, t, n)
//! Dequeue():   loop { h := Head; t := Tail; hn := h.next;
//!                     if h = Head { if h = t { if hn = null return EMPTY;
//!                                              cas(Tail, t, hn) }
//!                                   else { ret := hn.value;
//!                                          if cas(Head, h, hn) return ret } } }
//! ```
//!
//! One transition per line; `new_node` takes the lowest free index and nodes
//! are never reclaimed during a run. Dequeued nodes stay allocated, so states
//! are compared in [`MsQueue::canonical`] form: the list from `Head` renumbered
//! `0..k` and everything else free.

use itertools::Itertools;

use super::adt::{default_alphabet, MultisetState, QueueState, DEQUEUE, ENQUEUE};
use super::{Next, ObjectModel, Step};
use crate::spec::{AbstractionFunction, SeqSpec, SpecError, SpecState};
use crate::value::Value;

pub type NodeId = u8;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub value: Value,
    pub next: Option<NodeId>,
    pub allocated: bool,
}

impl Node {
    fn free() -> Node {
        Node {
            value: Value::Null,
            next: None,
            allocated: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MsState {
    pub nodes: Vec<Node>,
    pub head: NodeId,
    pub tail: NodeId,
}

impl MsState {
    /// A single dummy node holding `null`.
    pub fn fresh(p: usize) -> MsState {
        MsState::from_list(p, &[Value::Null])
    }

    /// The canonical state whose list holds `values`, dummy first.
    pub fn from_list(p: usize, values: &[Value]) -> MsState {
        assert!(!values.is_empty() && values.len() <= p, "list must fit the pool");
        let mut nodes = vec![Node::free(); p];
        for (i, v) in values.iter().enumerate() {
            nodes[i] = Node {
                value: v.clone(),
                next: (i + 1 < values.len()).then_some((i + 1) as NodeId),
                allocated: true,
            };
        }
        MsState {
            nodes,
            head: 0,
            tail: (values.len() - 1) as NodeId,
        }
    }

    pub fn pool_size(&self) -> usize {
        self.nodes.len()
    }

    fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    /// Node ids from `Head` along `next`; `None` on a cycle or a dangling link.
    pub fn list(&self) -> Option<Vec<NodeId>> {
        let mut out = Vec::new();
        let mut cur = Some(self.head);
        while let Some(id) = cur {
            if out.len() >= self.nodes.len() || (id as usize) >= self.nodes.len() || out.contains(&id) {
                return None;
            }
            if !self.node(id).allocated {
                return None;
            }
            out.push(id);
            cur = self.node(id).next;
        }
        Some(out)
    }

    /// Values along the list, dummy first.
    pub fn list_values(&self) -> Option<Vec<Value>> {
        self.list()
            .map(|ids| ids.iter().map(|&id| self.node(id).value.clone()).collect())
    }

    /// Acyclic, and `Tail` is the last node.
    pub fn is_well_formed(&self) -> bool {
        self.list().is_some_and(|ids| ids.last() == Some(&self.tail))
    }

    /// What holds in every reachable configuration: acyclic, `Tail` on the
    /// list and at most one node behind its end.
    pub fn structural_invariant(&self) -> bool {
        let Some(ids) = self.list() else {
            return false;
        };
        match ids.iter().position(|&id| id == self.tail) {
            Some(at) => at + 2 >= ids.len(),
            None => false,
        }
    }

    pub fn canonical(&self) -> MsState {
        match self.list_values() {
            Some(values) if self.structural_invariant() => {
                let ids = self.list().expect("checked");
                let tail_at = ids.iter().position(|&id| id == self.tail).expect("checked");
                let mut c = MsState::from_list(self.pool_size(), &values);
                c.tail = tail_at as NodeId;
                c
            }
            _ => self.clone(),
        }
    }

    /// Every canonical well-formed state whose list has at most `max_len`
    /// nodes; the dummy value ranges over `null` and `alphabet`, the others
    /// over `alphabet`.
    pub fn enumerate(p: usize, max_len: usize, alphabet: &[Value]) -> Vec<MsState> {
        let mut dummies = vec![Value::Null];
        dummies.extend(alphabet.iter().cloned());
        let mut out = Vec::new();
        for len in 1..=max_len.min(p) {
            for dummy in &dummies {
                for rest in (1..len).map(|_| alphabet.iter().cloned()).multi_cartesian_product() {
                    let mut values = vec![dummy.clone()];
                    values.extend(rest);
                    out.push(MsState::from_list(p, &values));
                }
            }
        }
        out
    }
}

impl SpecState for MsState {
    fn render(&self) -> String {
        let body = match self.list() {
            Some(ids) => ids
                .iter()
                .map(|&id| format!("n{id}:{}", self.node(id).value.cell()))
                .join(","),
            None => "<malformed>".into(),
        };
        format!("head=n{} list=[{}] tail=n{}", self.head, body, self.tail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MsLocal {
    EnqAlloc { value: Value },
    EnqReadTail { n: NodeId },
    EnqReadNext { n: NodeId, t: NodeId },
    EnqCheck { n: NodeId, t: NodeId, tn: Option<NodeId> },
    EnqLink { n: NodeId, t: NodeId },
    EnqHelp { n: NodeId, t: NodeId, tn: NodeId },
    EnqSwing { n: NodeId, t: NodeId },
    DeqReadHead,
    DeqReadTail { h: NodeId },
    DeqReadNext { h: NodeId, t: NodeId },
    DeqCheck { h: NodeId, t: NodeId, hn: Option<NodeId> },
    DeqHelp { t: NodeId, hn: NodeId },
    DeqReadValue { h: NodeId, hn: NodeId },
    DeqSwing { h: NodeId, hn: NodeId, ret: Value },
}

#[derive(Clone, Debug)]
pub struct MsQueue {
    p: usize,
}

impl MsQueue {
    pub fn new(p: usize) -> MsQueue {
        assert!((2..=u8::MAX as usize).contains(&p), "MS queue needs 2..=255 nodes");
        MsQueue { p }
    }

    pub fn pool_size(&self) -> usize {
        self.p
    }

    pub fn seq_spec(&self) -> MsQueueSeq {
        MsQueueSeq::new(self.p)
    }
}

fn cont(action: String, shared: &MsState, next: MsLocal) -> Step<MsLocal, MsState> {
    Step {
        action,
        shared: shared.clone(),
        next: Next::Continue(next),
    }
}

impl ObjectModel for MsQueue {
    type State = MsState;
    type Local = MsLocal;

    fn name(&self) -> String {
        format!("ms-queue,P={}", self.p)
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    fn initial_state(&self) -> MsState {
        MsState::fresh(self.p)
    }

    fn invoke(&self, method: &str, arg: &Value) -> Option<MsLocal> {
        match method {
            ENQUEUE => Some(MsLocal::EnqAlloc { value: arg.clone() }),
            DEQUEUE => Some(MsLocal::DeqReadHead),
            _ => None,
        }
    }

    fn step(&self, local: &MsLocal, s: &MsState) -> Vec<Step<MsLocal, MsState>> {
        use MsLocal::*;
        let step = match local.clone() {
            EnqAlloc { value } => match s.nodes.iter().position(|n| !n.allocated) {
                None => Step {
                    action: "n:=new_node() exhausted the pool".into(),
                    shared: s.clone(),
                    next: Next::Abort,
                },
                Some(i) => {
                    let mut s2 = s.clone();
                    s2.nodes[i] = Node {
                        value: value.clone(),
                        next: None,
                        allocated: true,
                    };
                    let n = i as NodeId;
                    Step {
                        action: format!("n:=new_node()=n{n}; n.value:={value}"),
                        shared: s2,
                        next: Next::Continue(EnqReadTail { n }),
                    }
                }
            },
            EnqReadTail { n } => cont(format!("t:=Tail=n{}", s.tail), s, EnqReadNext { n, t: s.tail }),
            EnqReadNext { n, t } => {
                let tn = s.node(t).next;
                cont(format!("tn:=t.next={}", show(tn)), s, EnqCheck { n, t, tn })
            }
            EnqCheck { n, t, tn } => {
                if t != s.tail {
                    cont("t!=Tail".into(), s, EnqReadTail { n })
                } else {
                    match tn {
                        None => cont("t=Tail, tn=null".into(), s, EnqLink { n, t }),
                        Some(tn) => cont("t=Tail, tn!=null".into(), s, EnqHelp { n, t, tn }),
                    }
                }
            }
            EnqLink { n, t } => {
                if s.node(t).next.is_none() {
                    let mut s2 = s.clone();
                    s2.nodes[t as usize].next = Some(n);
                    Step {
                        action: format!("cas(n{t}.next,null,n{n})=true"),
                        shared: s2,
                        next: Next::Continue(EnqSwing { n, t }),
                    }
                } else {
                    cont(format!("cas(n{t}.next,null,n{n})=false"), s, EnqReadTail { n })
                }
            }
            EnqHelp { n, t, tn } => {
                let (s2, ok) = cas_tail(s, t, tn);
                Step {
                    action: format!("cas(Tail,n{t},n{tn})={ok}"),
                    shared: s2,
                    next: Next::Continue(EnqReadTail { n }),
                }
            }
            EnqSwing { n, t } => {
                let (s2, ok) = cas_tail(s, t, n);
                Step {
                    action: format!("cas(Tail,n{t},n{n})={ok}"),
                    shared: s2,
                    next: Next::Return(Value::Unit),
                }
            }
            DeqReadHead => cont(format!("h:=Head=n{}", s.head), s, DeqReadTail { h: s.head }),
            DeqReadTail { h } => cont(format!("t:=Tail=n{}", s.tail), s, DeqReadNext { h, t: s.tail }),
            DeqReadNext { h, t } => {
                let hn = s.node(h).next;
                cont(format!("hn:=h.next={}", show(hn)), s, DeqCheck { h, t, hn })
            }
            DeqCheck { h, t, hn } => {
                if h != s.head {
                    cont("h!=Head".into(), s, DeqReadHead)
                } else if h == t {
                    match hn {
                        None => Step {
                            action: "h=Head, h=t, hn=null".into(),
                            shared: s.clone(),
                            next: Next::Return(Value::Empty),
                        },
                        Some(hn) => cont("h=Head, h=t, hn!=null".into(), s, DeqHelp { t, hn }),
                    }
                } else {
                    match hn {
                        Some(hn) => cont("h=Head, h!=t".into(), s, DeqReadValue { h, hn }),
                        None => Step {
                            action: "h=Head, h!=t, hn=null".into(),
                            shared: s.clone(),
                            next: Next::Abort,
                        },
                    }
                }
            }
            DeqHelp { t, hn } => {
                let (s2, ok) = cas_tail(s, t, hn);
                Step {
                    action: format!("cas(Tail,n{t},n{hn})={ok}"),
                    shared: s2,
                    next: Next::Continue(DeqReadHead),
                }
            }
            DeqReadValue { h, hn } => {
                let ret = s.node(hn).value.clone();
                cont(format!("ret:=n{hn}.value={ret}"), s, DeqSwing { h, hn, ret })
            }
            DeqSwing { h, hn, ret } => {
                if s.head == h {
                    let mut s2 = s.clone();
                    s2.head = hn;
                    Step {
                        action: format!("cas(Head,n{h},n{hn})=true"),
                        shared: s2,
                        next: Next::Return(ret),
                    }
                } else {
                    cont(format!("cas(Head,n{h},n{hn})=false"), s, DeqReadHead)
                }
            }
        };
        vec![step]
    }

    fn is_well_formed(&self, state: &MsState) -> bool {
        state.pool_size() == self.p && state.is_well_formed()
    }

    fn invariant(&self, state: &MsState) -> bool {
        state.pool_size() == self.p && state.structural_invariant()
    }

    fn canonical(&self, state: &MsState) -> MsState {
        state.canonical()
    }
}

fn show(id: Option<NodeId>) -> String {
    id.map_or_else(|| "null".into(), |i| format!("n{i}"))
}

fn cas_tail(s: &MsState, expected: NodeId, new: NodeId) -> (MsState, bool) {
    if s.tail == expected {
        let mut s2 = s.clone();
        s2.tail = new;
        (s2, true)
    } else {
        (s.clone(), false)
    }
}

/// `ms-queue-seq`, over canonical states: `Enqueue` appends a node (undefined
/// when the list fills the pool); `Dequeue` makes the second node the new
/// dummy and returns its value, or returns `EMPTY` on a dummy-only list.
#[derive(Clone, Debug)]
pub struct MsQueueSeq {
    p: usize,
    alphabet: Vec<Value>,
}

impl MsQueueSeq {
    pub fn new(p: usize) -> MsQueueSeq {
        MsQueueSeq {
            p,
            alphabet: default_alphabet(),
        }
    }
}

impl SeqSpec for MsQueueSeq {
    type State = MsState;

    fn name(&self) -> &str {
        "ms-queue-seq"
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    fn initial_state(&self) -> MsState {
        MsState::fresh(self.p)
    }

    fn apply(&self, method: &str, state: &MsState, input: &Value) -> Result<Vec<(MsState, Value)>, SpecError> {
        let values = state
            .list_values()
            .ok_or_else(|| SpecError::NotWellFormed(state.render()))?;
        match method {
            ENQUEUE => {
                if values.len() >= self.p {
                    return Ok(vec![]);
                }
                let mut next = values;
                next.push(input.clone());
                Ok(vec![(MsState::from_list(self.p, &next), Value::Unit)])
            }
            DEQUEUE => Ok(if values.len() == 1 {
                vec![(state.canonical(), Value::Empty)]
            } else {
                let ret = values[1].clone();
                vec![(MsState::from_list(self.p, &values[1..]), ret)]
            }),
            _ => Err(SpecError::UnknownMethod {
                spec: self.name().into(),
                method: method.into(),
            }),
        }
    }

    fn inputs(&self, method: &str) -> Vec<Value> {
        match method {
            ENQUEUE => self.alphabet.clone(),
            _ => vec![Value::Unit],
        }
    }

    fn is_valid_state(&self, state: &MsState) -> bool {
        state.pool_size() == self.p && state.is_well_formed()
    }
}

fn well_formed_values(af: &str, state: &MsState) -> Result<Vec<Value>, SpecError> {
    if !state.is_well_formed() {
        return Err(SpecError::NotWellFormed(format!("{af}: {}", state.render())));
    }
    Ok(state.list_values().expect("well-formed"))
}

/// `af-queue`: the values after the dummy, as a queue.
#[derive(Clone, Copy, Debug, Default)]
pub struct AfQueue;

impl AbstractionFunction<MsState> for AfQueue {
    type Abstract = QueueState;

    fn name(&self) -> &str {
        "af-queue"
    }

    fn abstract_state(&self, concrete: &MsState) -> Result<QueueState, SpecError> {
        let values = well_formed_values(self.name(), concrete)?;
        Ok(QueueState(values[1..].to_vec()))
    }
}

/// `af-multiset`: the values after the dummy, as a multiset.
#[derive(Clone, Copy, Debug, Default)]
pub struct AfMultiset;

impl AbstractionFunction<MsState> for AfMultiset {
    type Abstract = MultisetState;

    fn name(&self) -> &str {
        "af-multiset"
    }

    fn abstract_state(&self, concrete: &MsState) -> Result<MultisetState, SpecError> {
        let values = well_formed_values(self.name(), concrete)?;
        Ok(MultisetState::new(values[1..].to_vec()))
    }
}

/// `af-pseudo`: every value on the list, dummy included.
#[derive(Clone, Copy, Debug, Default)]
pub struct AfPseudo;

impl AbstractionFunction<MsState> for AfPseudo {
    type Abstract = QueueState;

    fn name(&self) -> &str {
        "af-pseudo"
    }

    fn abstract_state(&self, concrete: &MsState) -> Result<QueueState, SpecError> {
        Ok(QueueState(well_formed_values(self.name(), concrete)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::run_in_isolation;

    fn sym(s: &str) -> Value {
        Value::sym(s)
    }

    #[test]
    fn render_matches_the_documented_form() {
        let s = MsState::from_list(4, &[Value::Null, sym("a")]);
        assert_eq!(s.render(), "head=n0 list=[n0:·,n1:a] tail=n1");
    }

    #[test]
    fn sequential_enqueue_dequeue() {
        let model = MsQueue::new(4);
        let s0 = model.initial_state();
        let enq = run_in_isolation(&model, &model.invoke(ENQUEUE, &Value::Int(1)).unwrap(), &s0, 1000);
        assert_eq!(enq.returns.len(), 1);
        let (s1, _) = enq.returns.iter().next().unwrap().clone();
        let deq = run_in_isolation(&model, &MsLocal::DeqReadHead, &s1, 1000);
        let (s2, ret) = deq.returns.iter().next().unwrap().clone();
        assert_eq!(ret, Value::Int(1));
        assert_eq!(s2, MsState::from_list(4, &[Value::Int(1)]));
    }

    #[test]
    fn dequeue_on_fresh_queue_returns_empty() {
        let model = MsQueue::new(2);
        let iso = run_in_isolation(&model, &MsLocal::DeqReadHead, &model.initial_state(), 100);
        assert_eq!(
            iso.returns.into_iter().collect::<Vec<_>>(),
            vec![(MsState::fresh(2), Value::Empty)]
        );
    }

    #[test]
    fn canonical_drops_dequeued_nodes() {
        let mut s = MsState::from_list(4, &[Value::Null, sym("a"), sym("b")]);
        s.head = 1;
        assert_eq!(s.canonical(), MsState::from_list(4, &[sym("a"), sym("b")]));
    }

    #[test]
    fn abstraction_functions_on_small_lists() {
        let dummy_only = MsState::from_list(4, &[sym("v")]);
        assert_eq!(AfQueue.abstract_state(&dummy_only).unwrap(), QueueState(vec![]));
        assert_eq!(AfPseudo.abstract_state(&dummy_only).unwrap(), QueueState(vec![sym("v")]));
        assert_eq!(AfMultiset.abstract_state(&dummy_only).unwrap(), MultisetState::default());

        let ab = MsState::from_list(4, &[Value::Null, sym("a"), sym("b")]);
        assert_eq!(AfQueue.abstract_state(&ab).unwrap(), QueueState(vec![sym("a"), sym("b")]));

        let other_dummy = MsState::from_list(4, &[sym("a"), sym("a"), sym("b")]);
        assert_eq!(
            AfQueue.abstract_state(&ab).unwrap(),
            AfQueue.abstract_state(&other_dummy).unwrap()
        );
        assert_ne!(
            AfPseudo.abstract_state(&ab).unwrap(),
            AfPseudo.abstract_state(&other_dummy).unwrap()
        );
    }

    #[test]
    fn abstraction_rejects_malformed_states() {
        let mut lagging = MsState::from_list(4, &[Value::Null, sym("a")]);
        lagging.tail = 0;
        assert!(lagging.structural_invariant());
        assert!(!lagging.is_well_formed());
        assert!(AfQueue.abstract_state(&lagging).is_err());
    }

    #[test]
    fn enumeration_size() {
        // Dummy in {null,a,b}; lists of 1..=3 nodes: 3 * (1 + 2 + 4).
        assert_eq!(MsState::enumerate(4, 3, &default_alphabet()).len(), 21);
    }
}
