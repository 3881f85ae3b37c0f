//! A lock-protected bounded FIFO: every method body is one atomic step.

use super::adt::{QueueSpec, QueueState, DEQUEUE, ENQUEUE};
use super::{Next, ObjectModel, Step};
use crate::value::Value;

pub const DEFAULT_CAPACITY: usize = 4;

#[derive(Clone, Debug)]
pub struct CoarseQueue {
    capacity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoarseLocal {
    Enqueue(Value),
    Dequeue,
}

impl CoarseQueue {
    pub fn new(capacity: usize) -> CoarseQueue {
        CoarseQueue { capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn seq_spec(&self) -> QueueSpec {
        QueueSpec::bounded(self.capacity)
    }
}

impl Default for CoarseQueue {
    fn default() -> Self {
        CoarseQueue::new(DEFAULT_CAPACITY)
    }
}

impl ObjectModel for CoarseQueue {
    type State = QueueState;
    type Local = CoarseLocal;

    fn name(&self) -> String {
        format!("coarse-queue,cap={}", self.capacity)
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    fn initial_state(&self) -> QueueState {
        QueueState::default()
    }

    fn invoke(&self, method: &str, arg: &Value) -> Option<CoarseLocal> {
        match method {
            ENQUEUE => Some(CoarseLocal::Enqueue(arg.clone())),
            DEQUEUE => Some(CoarseLocal::Dequeue),
            _ => None,
        }
    }

    fn step(&self, local: &CoarseLocal, shared: &QueueState) -> Vec<Step<CoarseLocal, QueueState>> {
        let step = match local {
            CoarseLocal::Enqueue(v) if shared.0.len() >= self.capacity => Step {
                action: format!("lock; append {v} overflows"),
                shared: shared.clone(),
                next: Next::Abort,
            },
            CoarseLocal::Enqueue(v) => {
                let mut s = shared.clone();
                s.0.push(v.clone());
                Step {
                    action: format!("lock; append {v}; unlock"),
                    shared: s,
                    next: Next::Return(Value::Unit),
                }
            }
            CoarseLocal::Dequeue => match shared.0.split_first() {
                Some((front, rest)) => Step {
                    action: format!("lock; pop {front}; unlock"),
                    shared: QueueState(rest.to_vec()),
                    next: Next::Return(front.clone()),
                },
                None => Step {
                    action: "lock; empty; unlock".into(),
                    shared: shared.clone(),
                    next: Next::Return(Value::Empty),
                },
            },
        };
        vec![step]
    }

    fn is_well_formed(&self, state: &QueueState) -> bool {
        state.0.len() <= self.capacity
    }
}
