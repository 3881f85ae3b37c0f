//! Abstract data types: queue, multiset and pseudo-queue.

use itertools::Itertools;

use crate::spec::{SeqSpec, SpecError, SpecState};
use crate::value::Value;

pub const ENQUEUE: &str = "Enqueue";
pub const DEQUEUE: &str = "Dequeue";
pub const ADD: &str = "Add";
pub const REMOVE: &str = "Remove";

/// The default two-symbol input alphabet.
pub fn default_alphabet() -> Vec<Value> {
    vec![Value::sym("a"), Value::sym("b")]
}

/// A sequence of values, front first.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QueueState(pub Vec<Value>);

impl SpecState for QueueState {
    fn render(&self) -> String {
        format!("<{}>", self.0.iter().map(Value::cell).join(","))
    }
}

/// A multiset kept as a sorted vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultisetState(Vec<Value>);

impl MultisetState {
    pub fn new(mut values: Vec<Value>) -> MultisetState {
        values.sort();
        MultisetState(values)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }
}

impl SpecState for MultisetState {
    fn render(&self) -> String {
        format!("{{{}}}", self.0.iter().map(Value::cell).join(","))
    }
}

/// What `Dequeue` does on an empty queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnEmpty {
    ReturnEmpty,
    Block,
}

/// FIFO queue. `Enqueue(seq, x) = (seq⌢x, unit)`; `Dequeue` pops the front,
/// and on the empty queue either returns `EMPTY` or is undefined.
/// A capacity makes `Enqueue` undefined on a full queue.
#[derive(Clone, Debug)]
pub struct QueueSpec {
    name: String,
    alphabet: Vec<Value>,
    capacity: Option<usize>,
    on_empty: OnEmpty,
}

impl QueueSpec {
    /// `adt-queue`.
    pub fn standard() -> QueueSpec {
        QueueSpec {
            name: "adt-queue".into(),
            alphabet: default_alphabet(),
            capacity: None,
            on_empty: OnEmpty::ReturnEmpty,
        }
    }

    /// `adt-blocking-queue`: Dequeue is partial on the empty queue.
    pub fn blocking() -> QueueSpec {
        QueueSpec {
            name: "adt-blocking-queue".into(),
            on_empty: OnEmpty::Block,
            ..QueueSpec::standard()
        }
    }

    /// `coarse-queue-seq`: the sequential specification of the coarse-grained
    /// queue model.
    pub fn bounded(capacity: usize) -> QueueSpec {
        QueueSpec {
            name: "coarse-queue-seq".into(),
            capacity: Some(capacity),
            ..QueueSpec::standard()
        }
    }

    pub fn with_alphabet(mut self, alphabet: Vec<Value>) -> QueueSpec {
        self.alphabet = alphabet;
        self
    }
}

impl SeqSpec for QueueSpec {
    type State = QueueState;

    fn name(&self) -> &str {
        &self.name
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    fn initial_state(&self) -> QueueState {
        QueueState::default()
    }

    fn apply(&self, method: &str, state: &QueueState, input: &Value) -> Result<Vec<(QueueState, Value)>, SpecError> {
        match method {
            ENQUEUE => {
                if self.capacity.is_some_and(|c| state.0.len() >= c) {
                    return Ok(vec![]);
                }
                let mut next = state.clone();
                next.0.push(input.clone());
                Ok(vec![(next, Value::Unit)])
            }
            DEQUEUE => match state.0.split_first() {
                Some((front, rest)) => Ok(vec![(QueueState(rest.to_vec()), front.clone())]),
                None => Ok(match self.on_empty {
                    OnEmpty::ReturnEmpty => vec![(state.clone(), Value::Empty)],
                    OnEmpty::Block => vec![],
                }),
            },
            _ => Err(SpecError::UnknownMethod {
                spec: self.name.clone(),
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

    fn is_valid_state(&self, state: &QueueState) -> bool {
        self.capacity.is_none_or(|c| state.0.len() <= c)
    }
}

/// `adt-multiset`: `Add(m, e) = (m ∪ {e}, unit)`; `Remove(m)` may return any
/// member. `Remove` on the empty multiset returns `EMPTY`.
#[derive(Clone, Debug)]
pub struct MultisetAdt {
    alphabet: Vec<Value>,
}

impl MultisetAdt {
    pub fn new() -> MultisetAdt {
        MultisetAdt {
            alphabet: default_alphabet(),
        }
    }

    pub fn with_alphabet(alphabet: Vec<Value>) -> MultisetAdt {
        MultisetAdt { alphabet }
    }
}

impl Default for MultisetAdt {
    fn default() -> Self {
        MultisetAdt::new()
    }
}

impl SeqSpec for MultisetAdt {
    type State = MultisetState;

    fn name(&self) -> &str {
        "adt-multiset"
    }

    fn methods(&self) -> Vec<String> {
        vec![ADD.into(), REMOVE.into()]
    }

    fn initial_state(&self) -> MultisetState {
        MultisetState::default()
    }

    fn apply(
        &self,
        method: &str,
        state: &MultisetState,
        input: &Value,
    ) -> Result<Vec<(MultisetState, Value)>, SpecError> {
        match method {
            ADD => {
                let mut values = state.0.clone();
                values.push(input.clone());
                Ok(vec![(MultisetState::new(values), Value::Unit)])
            }
            REMOVE => {
                if state.0.is_empty() {
                    return Ok(vec![(state.clone(), Value::Empty)]);
                }
                Ok(state
                    .0
                    .iter()
                    .dedup()
                    .map(|e| {
                        let mut rest = state.0.clone();
                        let at = rest.iter().position(|x| x == e).expect("member");
                        rest.remove(at);
                        (MultisetState(rest), e.clone())
                    })
                    .collect())
            }
            _ => Err(SpecError::UnknownMethod {
                spec: self.name().into(),
                method: method.into(),
            }),
        }
    }

    fn inputs(&self, method: &str) -> Vec<Value> {
        match method {
            ADD => self.alphabet.clone(),
            _ => vec![Value::Unit],
        }
    }

    fn is_valid_state(&self, state: &MultisetState) -> bool {
        state.0.windows(2).all(|w| w[0] <= w[1])
    }
}

/// `adt-pseudo-queue`: a queue whose first element stays put as a held
/// message. `Dequeue` on `y⌢seq'` with `|seq'| > 0` drops `y` and returns the
/// new front (which becomes the held message); on a one-element queue it
/// returns `EMPTY`; on the empty sequence it is undefined.
#[derive(Clone, Debug)]
pub struct PseudoQueueAdt {
    alphabet: Vec<Value>,
}

impl PseudoQueueAdt {
    pub fn new() -> PseudoQueueAdt {
        PseudoQueueAdt {
            alphabet: default_alphabet(),
        }
    }
}

impl Default for PseudoQueueAdt {
    fn default() -> Self {
        PseudoQueueAdt::new()
    }
}

impl SeqSpec for PseudoQueueAdt {
    type State = QueueState;

    fn name(&self) -> &str {
        "adt-pseudo-queue"
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    /// The held message of a fresh queue is `null`.
    fn initial_state(&self) -> QueueState {
        QueueState(vec![Value::Null])
    }

    fn apply(&self, method: &str, state: &QueueState, input: &Value) -> Result<Vec<(QueueState, Value)>, SpecError> {
        match method {
            ENQUEUE => {
                let mut next = state.clone();
                next.0.push(input.clone());
                Ok(vec![(next, Value::Unit)])
            }
            DEQUEUE => Ok(match state.0.len() {
                0 => vec![],
                1 => vec![(state.clone(), Value::Empty)],
                _ => {
                    let rest = state.0[1..].to_vec();
                    let front = rest[0].clone();
                    vec![(QueueState(rest), front)]
                }
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
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(xs: &[&str]) -> QueueState {
        QueueState(xs.iter().map(|s| Value::sym(s)).collect())
    }

    #[test]
    fn queue_examples() {
        let adt = QueueSpec::standard();
        assert_eq!(
            adt.apply(ENQUEUE, &q(&[]), &Value::sym("c")).unwrap(),
            vec![(q(&["c"]), Value::Unit)]
        );
        assert_eq!(
            adt.apply(DEQUEUE, &q(&[]), &Value::Unit).unwrap(),
            vec![(q(&[]), Value::Empty)]
        );
        assert_eq!(
            adt.apply(DEQUEUE, &q(&["a", "b"]), &Value::Unit).unwrap(),
            vec![(q(&["b"]), Value::sym("a"))]
        );
        assert!(QueueSpec::blocking()
            .apply(DEQUEUE, &q(&[]), &Value::Unit)
            .unwrap()
            .is_empty());
        assert!(QueueSpec::bounded(1)
            .apply(ENQUEUE, &q(&["a"]), &Value::sym("b"))
            .unwrap()
            .is_empty());
        assert!(matches!(
            adt.apply("Push", &q(&[]), &Value::Unit),
            Err(SpecError::UnknownMethod { .. })
        ));
    }

    #[test]
    fn multiset_remove_is_relational() {
        let adt = MultisetAdt::new();
        let m = MultisetState::new(vec![Value::sym("b"), Value::sym("a")]);
        let out = adt.apply(REMOVE, &m, &Value::Unit).unwrap();
        assert_eq!(
            out,
            vec![
                (MultisetState::new(vec![Value::sym("b")]), Value::sym("a")),
                (MultisetState::new(vec![Value::sym("a")]), Value::sym("b")),
            ]
        );
        let twice = MultisetState::new(vec![Value::sym("a"), Value::sym("a")]);
        assert_eq!(adt.apply(REMOVE, &twice, &Value::Unit).unwrap().len(), 1);
    }

    #[test]
    fn pseudo_queue_examples() {
        let adt = PseudoQueueAdt::new();
        assert_eq!(
            adt.apply(DEQUEUE, &q(&["x"]), &Value::Unit).unwrap(),
            vec![(q(&["x"]), Value::Empty)]
        );
        assert_eq!(
            adt.apply(DEQUEUE, &q(&["x", "a", "b"]), &Value::Unit).unwrap(),
            vec![(q(&["a", "b"]), Value::sym("a"))]
        );
        assert!(adt.apply(DEQUEUE, &q(&[]), &Value::Unit).unwrap().is_empty());
    }
}
