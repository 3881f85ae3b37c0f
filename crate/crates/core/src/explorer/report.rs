//! Side-by-side runs of a program over an object and over the atomic version
//! of a specification.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{client_traces, explore, AtomicModel, ClientState, ClientTrace, ExploreError, FinalState, Program, Projection};
use crate::models::ObjectModel;
use crate::spec::{SeqSpec, SpecState};

/// MT and MS of `P(Z)` against `P(Ato_Z)`.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem6Report<S> {
    pub model: String,
    pub spec: String,
    pub concrete_traces: usize,
    pub atomic_traces: usize,
    pub concrete_finals: BTreeSet<FinalState<S>>,
    pub atomic_finals: BTreeSet<FinalState<S>>,
    pub mt_only_concrete: Vec<ClientTrace>,
    pub mt_only_atomic: Vec<ClientTrace>,
    pub ms_only_concrete: Vec<FinalState<S>>,
    pub ms_only_atomic: Vec<FinalState<S>>,
    /// Either side hit the transition budget; equalities are then partial.
    pub budget_exhausted: bool,
}

impl<S> Theorem6Report<S> {
    pub fn mt_equal(&self) -> bool {
        self.mt_only_concrete.is_empty() && self.mt_only_atomic.is_empty()
    }

    pub fn ms_equal(&self) -> bool {
        self.ms_only_concrete.is_empty() && self.ms_only_atomic.is_empty()
    }
}

impl<S: SpecState> fmt::Display for Theorem6Report<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eq = |b: bool| if b { "equal" } else { "differ" };
        writeln!(
            f,
            "MT: {} ({} traces on {}, {} on ato({}))",
            eq(self.mt_equal()),
            self.concrete_traces,
            self.model,
            self.atomic_traces,
            self.spec
        )?;
        for t in &self.mt_only_concrete {
            writeln!(f, "  only {}: {t}", self.model)?;
        }
        for t in &self.mt_only_atomic {
            writeln!(f, "  only ato: {t}")?;
        }
        writeln!(
            f,
            "MS: {} ({} final states on {}, {} on ato({}))",
            eq(self.ms_equal()),
            self.concrete_finals.len(),
            self.model,
            self.atomic_finals.len(),
            self.spec
        )?;
        for s in &self.ms_only_concrete {
            writeln!(f, "  only {}: {}", self.model, s.render())?;
        }
        for s in &self.ms_only_atomic {
            writeln!(f, "  only ato: {}", s.render())?;
        }
        if self.budget_exhausted {
            writeln!(f, "note: transition budget exhausted; sets are partial")?;
        }
        Ok(())
    }
}

fn diff<T: Ord + Clone>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Vec<T> {
    a.difference(b).cloned().collect()
}

pub fn compare_theorem6<M, Z>(
    program: &Program,
    model: &M,
    spec: &Z,
    client: &ClientState,
    initial: &M::State,
    bound: usize,
) -> Result<Theorem6Report<M::State>, ExploreError>
where
    M: ObjectModel + ?Sized,
    Z: SeqSpec<State = M::State> + Clone,
{
    let concrete = explore(program, model, client, initial, bound)?;
    let atomic_model = AtomicModel::new(spec.clone());
    let atomic = explore(program, &atomic_model, client, initial, bound)?;
    let mt_c = client_traces(&concrete.results(Projection::Client));
    let mt_a = client_traces(&atomic.results(Projection::Client));
    let ms_c = concrete.final_states();
    let ms_a = atomic.final_states();
    Ok(Theorem6Report {
        model: model.name(),
        spec: spec.name().to_string(),
        concrete_traces: mt_c.len(),
        atomic_traces: mt_a.len(),
        mt_only_concrete: diff(&mt_c, &mt_a),
        mt_only_atomic: diff(&mt_a, &mt_c),
        ms_only_concrete: diff(&ms_c, &ms_a),
        ms_only_atomic: diff(&ms_a, &ms_c),
        concrete_finals: ms_c,
        atomic_finals: ms_a,
        budget_exhausted: concrete.budget_exhausted() || atomic.budget_exhausted(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceSummary {
    pub object_divergent: bool,
    pub client_divergent: bool,
    pub budget_exhausted: bool,
}

impl DivergenceSummary {
    pub fn diverges(&self) -> bool {
        self.object_divergent || self.client_divergent
    }
}

impl fmt::Display for DivergenceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.object_divergent, self.client_divergent) {
            (false, false) if self.budget_exhausted => f.write_str("no divergence within the budget"),
            (false, false) => f.write_str("all schedules terminate"),
            (true, false) => f.write_str("divergent schedule found (object)"),
            (false, true) => f.write_str("divergent schedule found (client)"),
            (true, true) => f.write_str("divergent schedule found (object and client)"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem10Report {
    pub model: String,
    pub spec: String,
    pub concrete: DivergenceSummary,
    pub atomic: DivergenceSummary,
}

impl Theorem10Report {
    /// Both sides agree on whether the program can diverge.
    pub fn agrees(&self) -> bool {
        self.concrete.diverges() == self.atomic.diverges()
    }
}

impl fmt::Display for Theorem10Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "P({}): {}", self.model, self.concrete)?;
        writeln!(f, "P(ato({})): {}", self.spec, self.atomic)
    }
}

pub fn detect_divergence_theorem10<M, Z>(
    program: &Program,
    model: &M,
    spec: &Z,
    client: &ClientState,
    initial: &M::State,
    bound: usize,
) -> Result<Theorem10Report, ExploreError>
where
    M: ObjectModel + ?Sized,
    Z: SeqSpec<State = M::State> + Clone,
{
    let summary = |object_divergent, client_divergent, budget_exhausted| DivergenceSummary {
        object_divergent,
        client_divergent,
        budget_exhausted,
    };
    let concrete = explore(program, model, client, initial, bound)?;
    let atomic = explore(program, &AtomicModel::new(spec.clone()), client, initial, bound)?;
    Ok(Theorem10Report {
        model: model.name(),
        spec: spec.name().to_string(),
        concrete: summary(
            concrete.has_object_divergence(),
            concrete.has_client_divergence(),
            concrete.budget_exhausted(),
        ),
        atomic: summary(
            atomic.has_object_divergence(),
            atomic.has_client_divergence(),
            atomic.budget_exhausted(),
        ),
    })
}
