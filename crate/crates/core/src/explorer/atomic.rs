//! The atomic version of an object: each call is one transition guarded by
//! the method's domain, and spins while outside it.

use super::{enumerate_executions, ClientState, ExecutionResult, ExploreError, ExploreOptions, Program};
use crate::models::{Next, ObjectModel, Step};
use crate::spec::SeqSpec;
use crate::value::Value;

#[derive(Clone, Debug)]
pub struct AtomicModel<Z> {
    spec: Z,
}

impl<Z: SeqSpec> AtomicModel<Z> {
    pub fn new(spec: Z) -> AtomicModel<Z> {
        AtomicModel { spec }
    }

    pub fn spec(&self) -> &Z {
        &self.spec
    }
}

impl<Z: SeqSpec> ObjectModel for AtomicModel<Z> {
    type State = Z::State;
    type Local = (String, Value);

    fn name(&self) -> String {
        format!("ato({})", self.spec.name())
    }

    fn methods(&self) -> Vec<String> {
        self.spec.methods()
    }

    fn initial_state(&self) -> Z::State {
        self.spec.initial_state()
    }

    fn invoke(&self, method: &str, arg: &Value) -> Option<(String, Value)> {
        self.spec
            .methods()
            .iter()
            .any(|m| m == method)
            .then(|| (method.to_string(), arg.clone()))
    }

    fn step(&self, local: &(String, Value), shared: &Z::State) -> Vec<Step<(String, Value), Z::State>> {
        let (method, arg) = local;
        match self.spec.apply(method, shared, arg) {
            Ok(outcomes) => outcomes
                .into_iter()
                .map(|(next, ret)| Step {
                    action: format!("{method}({arg})={ret}"),
                    shared: next,
                    next: Next::Return(ret),
                })
                .collect(),
            Err(e) => vec![Step {
                action: e.to_string(),
                shared: shared.clone(),
                next: Next::Abort,
            }],
        }
    }

    fn atomic_calls(&self) -> bool {
        true
    }

    fn is_well_formed(&self, state: &Z::State) -> bool {
        self.spec.is_valid_state(state)
    }
}

/// [`enumerate_executions`] over the atomic version of `spec`.
pub fn run_atomic<Z: SeqSpec + Clone>(
    program: &Program,
    spec: &Z,
    client: &ClientState,
    initial: &Z::State,
    opts: &ExploreOptions,
) -> Result<Vec<ExecutionResult<Z::State>>, ExploreError> {
    enumerate_executions(program, &AtomicModel::new(spec.clone()), client, initial, opts)
}
