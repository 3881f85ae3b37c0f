//! Sequential specifications, abstraction and renaming functions, and the
//! sequential-implementation checks relating a concrete specification to an
//! abstract data type.
//!
//! Methods are relations: [`SeqSpec::apply`] returns every `(state', output)`
//! the method allows, and an empty set means the call is outside the
//! method's domain (an atomic caller blocks there).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug};
use std::hash::Hash;

use crate::history::{History, Response};
use crate::value::Value;

/// Object or abstract state usable by the explorer and the checkers.
pub trait SpecState: Clone + Debug + Eq + Ord + Hash + Send + Sync {
    /// Canonical single-line rendering for reports and golden files.
    fn render(&self) -> String;

    /// Value of a client-addressable cell (e.g. `items[1]`).
    fn read_cell(&self, _addr: &str) -> Option<Value> {
        None
    }

    /// Stores into a client-addressable cell; `false` when the address does
    /// not exist.
    fn write_cell(&mut self, _addr: &str, _value: Value) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("{spec}: unknown method `{method}`")]
    UnknownMethod { spec: String, method: String },
    #[error("{0}: state outside the abstraction function's domain")]
    NotWellFormed(String),
    #[error("renaming is not a bijection: {0}")]
    Renaming(String),
}

/// A sequential specification; with [`SeqSpec::initial_state`] as the
/// distinguished initial state it also serves as an abstract data type.
pub trait SeqSpec: Send + Sync {
    type State: SpecState;

    fn name(&self) -> &str;

    fn methods(&self) -> Vec<String>;

    fn initial_state(&self) -> Self::State;

    /// Outcome set of `method` on `(state, input)`. Empty = out of domain.
    fn apply(
        &self,
        method: &str,
        state: &Self::State,
        input: &Value,
    ) -> Result<Vec<(Self::State, Value)>, SpecError>;

    /// The finite input set enumerated by the bounded checks.
    fn inputs(&self, method: &str) -> Vec<Value>;

    /// State-domain membership.
    fn is_valid_state(&self, _state: &Self::State) -> bool {
        true
    }
}

/// Every abstract data type in this crate is a [`SeqSpec`].
pub use SeqSpec as Adt;

/// Maps well-formed concrete states onto abstract states.
pub trait AbstractionFunction<C>: Send + Sync {
    type Abstract: SpecState;

    fn name(&self) -> &str;

    fn abstract_state(&self, concrete: &C) -> Result<Self::Abstract, SpecError>;
}

/// The identity abstraction, relating a specification to itself.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityAf;

impl<S: SpecState> AbstractionFunction<S> for IdentityAf {
    type Abstract = S;

    fn name(&self) -> &str {
        "identity"
    }

    fn abstract_state(&self, concrete: &S) -> Result<S, SpecError> {
        Ok(concrete.clone())
    }
}

/// Bijection from object method names to ADT method names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenamingFunction {
    forward: BTreeMap<String, String>,
    backward: BTreeMap<String, String>,
}

impl RenamingFunction {
    pub fn new<I, A, B>(pairs: I) -> Result<RenamingFunction, SpecError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            if forward.insert(a.clone(), b.clone()).is_some() {
                return Err(SpecError::Renaming(format!("`{a}` mapped twice")));
            }
            if backward.insert(b.clone(), a).is_some() {
                return Err(SpecError::Renaming(format!("`{b}` is the image of two methods")));
            }
        }
        Ok(RenamingFunction { forward, backward })
    }

    pub fn identity<S: AsRef<str>>(methods: &[S]) -> RenamingFunction {
        RenamingFunction::new(methods.iter().map(|m| (m.as_ref(), m.as_ref())))
            .expect("identity on distinct names")
    }

    pub fn rename(&self, method: &str) -> Option<&str> {
        self.forward.get(method).map(String::as_str)
    }

    pub fn inverse(&self, method: &str) -> Option<&str> {
        self.backward.get(method).map(String::as_str)
    }

    pub fn apply_to(&self, h: &History) -> History {
        h.rename_methods(|m| self.rename(m).map(str::to_string))
    }
}

/// States reachable by running `h_seq` from `start`, keeping only outcomes
/// whose output matches the recorded response. Empty means `h_seq` is not a
/// legal sequential execution from `start`.
///
/// An aborted operation is legal exactly where the method is undefined and
/// leaves the state unchanged; pending invocations are ignored.
pub fn legal_seq_outcomes<S: SeqSpec + ?Sized>(
    spec: &S,
    start: &S::State,
    h_seq: &History,
) -> Result<BTreeSet<S::State>, SpecError> {
    let mut frontier: BTreeSet<S::State> = BTreeSet::from([start.clone()]);
    for op in h_seq.operations() {
        let Some((_, response)) = op.response else {
            continue;
        };
        let mut next = BTreeSet::new();
        for state in &frontier {
            let outcomes = spec.apply(&op.method, state, &op.arg)?;
            match &response {
                Response::Ret(v) => next.extend(
                    outcomes
                        .into_iter()
                        .filter(|(_, out)| out == v)
                        .map(|(s, _)| s),
                ),
                Response::Abort => {
                    if outcomes.is_empty() {
                        next.insert(state.clone());
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(next);
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Why a concrete specification fails to implement an ADT at one state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementCounterexample<C, A> {
    pub state: C,
    pub abstract_state: A,
    /// ADT method name.
    pub method: String,
    pub input: Value,
    pub kind: RefinementFailure<C, A>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefinementFailure<C, A> {
    /// The ADT method is defined but the concrete one has no outcome; carries
    /// one abstract outcome that cannot be matched.
    MissingOutcome { expected: (A, Value) },
    /// A concrete outcome the ADT relation does not allow.
    DisallowedOutcome { concrete: (C, Value), image: A },
    /// The concrete method is defined where the ADT method blocks.
    DomainNotLifted,
    /// The ADT has no method under the renaming.
    Unmapped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefinementVerdict<C, A> {
    Pass { states_checked: usize },
    Counterexample(Box<RefinementCounterexample<C, A>>),
}

impl<C, A> RefinementVerdict<C, A> {
    pub fn passed(&self) -> bool {
        matches!(self, RefinementVerdict::Pass { .. })
    }
}

impl<C: SpecState, A: SpecState> fmt::Display for RefinementVerdict<C, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefinementVerdict::Pass { states_checked } => {
                write!(f, "pass over {states_checked} sampled states")
            }
            RefinementVerdict::Counterexample(cx) => {
                write!(
                    f,
                    "counterexample at {} (abstract {}): {}({}) ",
                    cx.state.render(),
                    cx.abstract_state.render(),
                    cx.method,
                    cx.input
                )?;
                match &cx.kind {
                    RefinementFailure::MissingOutcome { expected } => write!(
                        f,
                        "has no concrete outcome; abstract allows ({}, {})",
                        expected.0.render(),
                        expected.1
                    ),
                    RefinementFailure::DisallowedOutcome { concrete, image } => write!(
                        f,
                        "concrete outcome ({}, {}) maps to ({}, {}) which the ADT forbids",
                        concrete.0.render(),
                        concrete.1,
                        image.render(),
                        concrete.1
                    ),
                    RefinementFailure::DomainNotLifted => {
                        f.write_str("is defined concretely but blocks abstractly")
                    }
                    RefinementFailure::Unmapped => f.write_str("has no renamed counterpart"),
                }
            }
        }
    }
}

/// Bounded sequential-implementation check over the sampled `states`.
///
/// For every sampled concrete state, ADT method and declared input on which
/// the ADT method is defined at the abstract image: the renamed concrete
/// method must have an outcome, and each concrete outcome must map to an
/// outcome the ADT allows. For functional ADTs this is exactly "the abstract
/// outcome has a concrete witness"; for relational ADTs such as the multiset
/// it asks the concrete choice to be one of the allowed ones.
///
/// States rejected by the concrete spec's domain predicate are a model bug and
/// surface as an error.
pub fn is_sequential_implementation<Z, A, F>(
    model_spec: &Z,
    adt: &A,
    af: &F,
    rf: &RenamingFunction,
    states: &[Z::State],
) -> Result<RefinementVerdict<Z::State, A::State>, SpecError>
where
    Z: SeqSpec + ?Sized,
    A: SeqSpec + ?Sized,
    F: AbstractionFunction<Z::State, Abstract = A::State> + ?Sized,
{
    for state in states {
        if !model_spec.is_valid_state(state) {
            return Err(SpecError::NotWellFormed(state.render()));
        }
        let abstract_state = af.abstract_state(state)?;
        for method in adt.methods() {
            for input in adt.inputs(&method) {
                let expected = adt.apply(&method, &abstract_state, &input)?;
                if expected.is_empty() {
                    continue;
                }
                let cx = |kind| {
                    Ok(RefinementVerdict::Counterexample(Box::new(RefinementCounterexample {
                        state: state.clone(),
                        abstract_state: abstract_state.clone(),
                        method: method.clone(),
                        input: input.clone(),
                        kind,
                    })))
                };
                let Some(concrete_method) = rf.inverse(&method) else {
                    return cx(RefinementFailure::Unmapped);
                };
                let outcomes = model_spec.apply(concrete_method, state, &input)?;
                if outcomes.is_empty() {
                    return cx(RefinementFailure::MissingOutcome {
                        expected: expected[0].clone(),
                    });
                }
                for (next, out) in outcomes {
                    let image = af.abstract_state(&next)?;
                    if !expected.iter().any(|(a, v)| *a == image && *v == out) {
                        return cx(RefinementFailure::DisallowedOutcome {
                            concrete: (next, out),
                            image,
                        });
                    }
                }
            }
        }
    }
    Ok(RefinementVerdict::Pass {
        states_checked: states.len(),
    })
}

/// Every in-domain concrete `(state, input)` maps to an in-domain abstract
/// `(AF(state), input)`.
pub fn check_domain_lifting<Z, A, F>(
    model_spec: &Z,
    adt: &A,
    af: &F,
    rf: &RenamingFunction,
    states: &[Z::State],
) -> Result<RefinementVerdict<Z::State, A::State>, SpecError>
where
    Z: SeqSpec + ?Sized,
    A: SeqSpec + ?Sized,
    F: AbstractionFunction<Z::State, Abstract = A::State> + ?Sized,
{
    for state in states {
        if !model_spec.is_valid_state(state) {
            return Err(SpecError::NotWellFormed(state.render()));
        }
        let abstract_state = af.abstract_state(state)?;
        for method in model_spec.methods() {
            for input in model_spec.inputs(&method) {
                if model_spec.apply(&method, state, &input)?.is_empty() {
                    continue;
                }
                let cx = |name: String, kind| {
                    Ok(RefinementVerdict::Counterexample(Box::new(RefinementCounterexample {
                        state: state.clone(),
                        abstract_state: abstract_state.clone(),
                        method: name,
                        input: input.clone(),
                        kind,
                    })))
                };
                let Some(abstract_method) = rf.rename(&method) else {
                    return cx(method.clone(), RefinementFailure::Unmapped);
                };
                if adt.apply(abstract_method, &abstract_state, &input)?.is_empty() {
                    return cx(abstract_method.to_string(), RefinementFailure::DomainNotLifted);
                }
            }
        }
    }
    Ok(RefinementVerdict::Pass {
        states_checked: states.len(),
    })
}

/// Outcome of scanning an abstraction function for image collisions.
#[derive(Clone, Debug)]
pub struct InjectivityReport<C, A> {
    pub states_scanned: usize,
    pub collisions: Vec<(C, C, A)>,
    /// Inverse map on the scanned states, present when no collision was found.
    pub certificate: Option<BTreeMap<A, C>>,
}

impl<C, A> InjectivityReport<C, A> {
    pub fn is_injective(&self) -> bool {
        self.collisions.is_empty()
    }
}

pub fn injectivity_scan<C, F>(af: &F, states: &[C]) -> Result<InjectivityReport<C, F::Abstract>, SpecError>
where
    C: SpecState,
    F: AbstractionFunction<C> + ?Sized,
{
    let mut inverse: BTreeMap<F::Abstract, C> = BTreeMap::new();
    let mut collisions = Vec::new();
    for state in states {
        let image = af.abstract_state(state)?;
        match inverse.get(&image) {
            Some(prev) if prev != state => collisions.push((prev.clone(), state.clone(), image)),
            Some(_) => {}
            None => {
                inverse.insert(image, state.clone());
            }
        }
    }
    let certificate = collisions.is_empty().then_some(inverse);
    Ok(InjectivityReport {
        states_scanned: states.len(),
        collisions,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renaming_must_be_bijective() {
        assert!(RenamingFunction::new([("a", "x"), ("b", "x")]).is_err());
        assert!(RenamingFunction::new([("a", "x"), ("a", "y")]).is_err());
        let rf = RenamingFunction::new([("Enqueue", "Add"), ("Dequeue", "Remove")]).unwrap();
        assert_eq!(rf.rename("Enqueue"), Some("Add"));
        assert_eq!(rf.inverse("Remove"), Some("Dequeue"));
        assert_eq!(rf.rename("Add"), None);
    }
}
