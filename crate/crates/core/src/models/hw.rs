//! The Herlihy–Wing array queue over a bounded array of `N` cells.
//!
//! ```text
//! Enqueue(v):  t := INC(back); items[t] := v
//! Dequeue():   loop { range := back - 1;
//!                     for i in 1..=range { temp := swap(items[i], null);
//!                                          if temp != null { return temp } } }
//! ```
//!
//! Steps: `INC(back)`, the store (which also returns), the `range` snapshot,
//! and one `swap` per index with its null test folded in. `Dequeue` spins
//! forever while every scanned cell is null.

use itertools::Itertools;

use super::adt::{DEQUEUE, ENQUEUE};
use super::{Next, ObjectModel, Step};
use crate::spec::{SeqSpec, SpecError, SpecState};
use crate::value::Value;

/// `back` is the smallest unused index; `items` is 1-based in renderings and
/// cell addresses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HwState {
    pub back: usize,
    pub items: Vec<Value>,
}

impl HwState {
    pub fn fresh(n: usize) -> HwState {
        HwState {
            back: 1,
            items: vec![Value::Null; n],
        }
    }

    pub fn capacity(&self) -> usize {
        self.items.len()
    }

    fn item(&self, i: usize) -> &Value {
        &self.items[i - 1]
    }

    fn set_item(&mut self, i: usize, v: Value) {
        self.items[i - 1] = v;
    }

    fn parse_index(&self, addr: &str) -> Option<usize> {
        let i: usize = addr.strip_prefix("items[")?.strip_suffix(']')?.parse().ok()?;
        (1..=self.capacity()).contains(&i).then_some(i)
    }

    /// All states with `back <= max_back` and cells drawn from `alphabet` or
    /// null at indices below `back` (cells at or above `back` stay null).
    pub fn enumerate(n: usize, max_back: usize, alphabet: &[Value]) -> Vec<HwState> {
        let mut cell_values = vec![Value::Null];
        cell_values.extend(alphabet.iter().cloned());
        let mut out = Vec::new();
        for back in 1..=max_back.min(n + 1) {
            let used = back - 1;
            for prefix in (0..used).map(|_| cell_values.iter().cloned()).multi_cartesian_product() {
                let mut items = prefix;
                items.resize(n, Value::Null);
                out.push(HwState { back, items });
            }
        }
        out
    }
}

impl SpecState for HwState {
    fn render(&self) -> String {
        format!(
            "back={} items=[{}]",
            self.back,
            self.items.iter().map(Value::cell).join(",")
        )
    }

    fn read_cell(&self, addr: &str) -> Option<Value> {
        if addr == "back" {
            return Some(Value::Int(self.back as i64));
        }
        self.parse_index(addr).map(|i| self.item(i).clone())
    }

    fn write_cell(&mut self, addr: &str, value: Value) -> bool {
        match self.parse_index(addr) {
            Some(i) => {
                self.set_item(i, value);
                true
            }
            None => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HwLocal {
    /// Before `INC(back)`.
    EnqReserve { value: Value },
    /// Slot reserved; the store is next.
    EnqStore { value: Value, slot: usize },
    /// About to snapshot `range := back - 1`.
    DeqSnapshot,
    /// About to swap `items[index]`.
    DeqScan { index: usize, range: usize },
}

#[derive(Clone, Debug)]
pub struct HwQueue {
    n: usize,
}

impl HwQueue {
    pub fn new(n: usize) -> HwQueue {
        assert!(n >= 1, "HW queue needs at least one cell");
        HwQueue { n }
    }

    pub fn capacity(&self) -> usize {
        self.n
    }

    /// The companion sequential specification.
    pub fn seq_spec(&self) -> HwQueueSeq {
        HwQueueSeq::new(self.n)
    }
}

impl ObjectModel for HwQueue {
    type State = HwState;
    type Local = HwLocal;

    fn name(&self) -> String {
        format!("hw-queue,N={}", self.n)
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    fn initial_state(&self) -> HwState {
        HwState::fresh(self.n)
    }

    fn invoke(&self, method: &str, arg: &Value) -> Option<HwLocal> {
        match method {
            ENQUEUE => Some(HwLocal::EnqReserve { value: arg.clone() }),
            DEQUEUE => Some(HwLocal::DeqSnapshot),
            _ => None,
        }
    }

    fn step(&self, local: &HwLocal, shared: &HwState) -> Vec<Step<HwLocal, HwState>> {
        let step = match local {
            HwLocal::EnqReserve { value } => {
                let slot = shared.back;
                if slot > self.n {
                    Step {
                        action: format!("t:=INC(back)={slot} overflows N={}", self.n),
                        shared: shared.clone(),
                        next: Next::Abort,
                    }
                } else {
                    let mut s = shared.clone();
                    s.back += 1;
                    Step {
                        action: format!("t:=INC(back)={slot}"),
                        shared: s,
                        next: Next::Continue(HwLocal::EnqStore {
                            value: value.clone(),
                            slot,
                        }),
                    }
                }
            }
            HwLocal::EnqStore { value, slot } => {
                let mut s = shared.clone();
                s.set_item(*slot, value.clone());
                Step {
                    action: format!("items[{slot}]:={value}"),
                    shared: s,
                    next: Next::Return(Value::Unit),
                }
            }
            HwLocal::DeqSnapshot => {
                let range = shared.back - 1;
                let next = if range == 0 {
                    HwLocal::DeqSnapshot
                } else {
                    HwLocal::DeqScan { index: 1, range }
                };
                Step {
                    action: format!("range:=back-1={range}"),
                    shared: shared.clone(),
                    next: Next::Continue(next),
                }
            }
            HwLocal::DeqScan { index, range } => {
                let mut s = shared.clone();
                let temp = s.item(*index).clone();
                s.set_item(*index, Value::Null);
                let next = if !temp.is_null() {
                    Next::Return(temp.clone())
                } else if index < range {
                    Next::Continue(HwLocal::DeqScan {
                        index: index + 1,
                        range: *range,
                    })
                } else {
                    Next::Continue(HwLocal::DeqSnapshot)
                };
                Step {
                    action: format!("swap(items[{index}],null)={temp}"),
                    shared: s,
                    next,
                }
            }
        };
        vec![step]
    }

    fn is_well_formed(&self, state: &HwState) -> bool {
        state.capacity() == self.n && (1..=self.n + 1).contains(&state.back)
    }
}

/// `hw-queue-seq`: `Enqueue` stores at `items[back]` and increments `back`
/// (undefined once the array is full); `Dequeue` empties and returns the first
/// non-null cell below `back`, and is undefined when there is none.
#[derive(Clone, Debug)]
pub struct HwQueueSeq {
    n: usize,
    alphabet: Vec<Value>,
}

impl HwQueueSeq {
    pub fn new(n: usize) -> HwQueueSeq {
        HwQueueSeq {
            n,
            alphabet: super::adt::default_alphabet(),
        }
    }
}

impl SeqSpec for HwQueueSeq {
    type State = HwState;

    fn name(&self) -> &str {
        "hw-queue-seq"
    }

    fn methods(&self) -> Vec<String> {
        vec![ENQUEUE.into(), DEQUEUE.into()]
    }

    fn initial_state(&self) -> HwState {
        HwState::fresh(self.n)
    }

    fn apply(&self, method: &str, state: &HwState, input: &Value) -> Result<Vec<(HwState, Value)>, SpecError> {
        match method {
            ENQUEUE => {
                if state.back > self.n {
                    return Ok(vec![]);
                }
                let mut s = state.clone();
                s.set_item(state.back, input.clone());
                s.back += 1;
                Ok(vec![(s, Value::Unit)])
            }
            DEQUEUE => {
                let first = (1..state.back).find(|&i| !state.item(i).is_null());
                Ok(match first {
                    Some(i) => {
                        let mut s = state.clone();
                        let v = s.item(i).clone();
                        s.set_item(i, Value::Null);
                        vec![(s, v)]
                    }
                    None => vec![],
                })
            }
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

    fn is_valid_state(&self, state: &HwState) -> bool {
        state.capacity() == self.n && (1..=self.n + 1).contains(&state.back)
    }
}

/// Dense-prefix reading of an HW state as a queue: the non-null cells below
/// `back`, in index order.
#[derive(Clone, Copy, Debug, Default)]
pub struct AfHwQueue;

impl crate::spec::AbstractionFunction<HwState> for AfHwQueue {
    type Abstract = super::QueueState;

    fn name(&self) -> &str {
        "af-hw-queue"
    }

    fn abstract_state(&self, concrete: &HwState) -> Result<super::QueueState, SpecError> {
        Ok(super::QueueState(
            (1..concrete.back)
                .map(|i| concrete.item(i))
                .filter(|v| !v.is_null())
                .cloned()
                .collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::run_in_isolation;

    fn c() -> Value {
        Value::sym("c")
    }

    #[test]
    fn sequential_enqueue_then_dequeue() {
        let model = HwQueue::new(4);
        let s0 = model.initial_state();
        let enq = run_in_isolation(&model, &model.invoke(ENQUEUE, &c()).unwrap(), &s0, 100);
        let (s1, ret) = enq.returns.iter().next().unwrap().clone();
        assert_eq!(ret, Value::Unit);
        assert_eq!(s1.render(), "back=2 items=[c,·,·,·]");
        let deq = run_in_isolation(&model, &model.invoke(DEQUEUE, &Value::Unit).unwrap(), &s1, 100);
        let (s2, ret) = deq.returns.iter().next().unwrap().clone();
        assert_eq!(ret, c());
        assert!(s2.items.iter().all(Value::is_null));
    }

    #[test]
    fn dequeue_on_all_null_spins_without_effect() {
        let model = HwQueue::new(4);
        let state = HwState {
            back: 3,
            items: vec![Value::Null; 4],
        };
        let iso = run_in_isolation(&model, &HwLocal::DeqSnapshot, &state, 100);
        assert!(iso.returns.is_empty());
        assert!(iso.diverges);
        assert!(!iso.modifies_state);
        assert!(iso.is_purely_blocking());
    }

    #[test]
    fn enqueue_past_capacity_aborts() {
        let model = HwQueue::new(1);
        let full = HwState {
            back: 2,
            items: vec![c()],
        };
        let iso = run_in_isolation(&model, &model.invoke(ENQUEUE, &c()).unwrap(), &full, 10);
        assert!(iso.aborts && iso.returns.is_empty());
        assert!(HwQueueSeq::new(1).apply(ENQUEUE, &full, &c()).unwrap().is_empty());
    }

    #[test]
    fn cells_are_addressable() {
        let mut s = HwState::fresh(4);
        assert!(s.write_cell("items[1]", c()));
        assert!(!s.write_cell("items[5]", c()));
        assert!(!s.write_cell("items[0]", c()));
        assert_eq!(s.read_cell("items[1]"), Some(c()));
        assert_eq!(s.read_cell("back"), Some(Value::Int(1)));
        assert_eq!(s.read_cell("head"), None);
    }

    #[test]
    fn enumeration_size() {
        // back in 1..=4 with 3 choices per used cell: 1 + 3 + 9 + 27.
        assert_eq!(HwState::enumerate(4, 4, &[Value::sym("a"), Value::sym("b")]).len(), 40);
    }
}
