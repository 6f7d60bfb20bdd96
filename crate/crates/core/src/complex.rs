//! The immediate snapshot complex `P(r)` of a round counter.
//!
//! Facets are the executions `(supp, W_1, ..., W_t)` in which every process
//! appears in exactly `r(p)` rounds. All other simplices are reached by
//! repeatedly ghosting one active process, which is how [`Complex::build`]
//! closes the facet set.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::round_counter::RoundCounter;
use crate::witness::{Layer, Simplex, StructureClass};
use crate::{ProcessId, ProcessSet};

/// Size caps guarding [`Complex::build`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_cardinality: u64,
    pub max_processes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_cardinality: 8,
            max_processes: 4,
        }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits {
            max_cardinality: u64::MAX,
            max_processes: usize::MAX,
        }
    }

    pub fn check(&self, counter: &RoundCounter) -> Result<()> {
        let size = counter.budgets().len();
        let reason = if size > self.max_processes {
            format!("{size} processes > {}", self.max_processes)
        } else if counter.cardinality() > self.max_cardinality {
            format!("|r| = {} > {}", counter.cardinality(), self.max_cardinality)
        } else {
            return Ok(());
        };
        Err(Error::LimitExceeded {
            counter: counter.to_string(),
            reason,
        })
    }
}

/// Does `s` index a simplex of `P(counter)`?
pub fn is_simplex_of(s: &Simplex, counter: &RoundCounter) -> bool {
    if s.classify() != StructureClass::WitnessStructure || s.support() != counter.support() {
        return false;
    }
    let tf = s.trace_form_unchecked();
    tf.traces.iter().all(|(p, trace)| {
        let allowed = counter.get(*p).map_or(0, |b| b as usize + 1);
        if tf.active.contains(p) {
            trace.len() == allowed
        } else {
            trace.len() <= allowed
        }
    })
}

/// `V(σ)`: the vertices `Γ_{A∖{p}}(σ)` for `p ∈ A(σ)`.
pub fn vertices(s: &Simplex) -> Result<BTreeSet<Simplex>> {
    s.require(StructureClass::WitnessStructure)?;
    let active = s.active_set();
    if active.is_empty() {
        return Err(Error::Precondition("the empty simplex has no vertices".into()));
    }
    Ok(active
        .iter()
        .map(|p| {
            let mut rest = active.clone();
            rest.remove(p);
            s.ghost_unchecked(&rest)
        })
        .collect())
}

/// All faces `Γ_S(σ)`, `S ⊆ A(σ)`, including `σ` and the empty simplex.
pub fn faces(s: &Simplex) -> Result<BTreeSet<Simplex>> {
    s.require(StructureClass::WitnessStructure)?;
    let active: Vec<ProcessId> = s.active_set().into_iter().collect();
    Ok((0u64..1 << active.len())
        .map(|mask| {
            let set: ProcessSet = active
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            s.ghost_unchecked(&set)
        })
        .collect())
}

/// Is `tau` a face of `sigma`? Decided by ghosting `A(σ) ∖ A(τ)`.
pub fn face_check(tau: &Simplex, sigma: &Simplex) -> bool {
    if tau.classify() != StructureClass::WitnessStructure
        || sigma.classify() != StructureClass::WitnessStructure
        || tau.support() != sigma.support()
    {
        return false;
    }
    let (a_tau, a_sigma) = (tau.active_set(), sigma.active_set());
    if !a_tau.is_subset(&a_sigma) {
        return false;
    }
    let diff = a_sigma.difference(&a_tau).copied().collect();
    sigma.ghost_unchecked(&diff) == *tau
}

/// Extends `s` to a facet `σ̃` of `P(counter)` with `Γ_{G(σ)}(σ̃) = σ`: every
/// ghost is witnessed again until its budget is used up.
pub fn complete_to_facet(s: &Simplex, counter: &RoundCounter) -> Result<Simplex> {
    if !is_simplex_of(s, counter) {
        return Err(Error::NotASimplex {
            key: s.key(),
            counter: counter.to_string(),
        });
    }
    let mut layers: Vec<Layer> = s
        .layers()
        .iter()
        .map(|l| Layer::new(l.union(), ProcessSet::new()))
        .collect();
    let missing: BTreeMap<ProcessId, usize> = s
        .ghost_set()
        .into_iter()
        .map(|p| {
            let budget = counter.get(p).unwrap_or(0) as usize + 1;
            (p, budget - s.trace_unchecked(p).len())
        })
        .collect();
    let extra = missing.values().copied().max().unwrap_or(0);
    for i in 1..=extra {
        let seen = missing
            .iter()
            .filter(|(_, &m)| m >= i)
            .map(|(&p, _)| p)
            .collect();
        layers.push(Layer::new(seen, ProcessSet::new()));
    }
    Ok(Simplex::new(layers).expect("completion is nonempty"))
}

/// Every facet of `P(counter)`, in a deterministic order.
pub fn facets(counter: &RoundCounter) -> Vec<Simplex> {
    let support = counter.support();
    let remaining: BTreeMap<ProcessId, u32> = counter
        .budgets()
        .iter()
        .filter(|(_, &b)| b > 0)
        .map(|(&p, &b)| (p, b))
        .collect();
    let mut out: Vec<Simplex> = first_rounds(&remaining)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut rounds = vec![first.clone()];
            let mut rem = remaining.clone();
            consume(&mut rem, &first);
            let mut acc = Vec::new();
            executions(&mut rem, &mut rounds, &support, &mut acc);
            acc
        })
        .collect();
    if remaining.is_empty() {
        out.push(Simplex::facet(support, &[]));
    }
    out.sort();
    out
}

fn first_rounds(remaining: &BTreeMap<ProcessId, u32>) -> Vec<ProcessSet> {
    let live: Vec<ProcessId> = remaining
        .iter()
        .filter(|(_, &b)| b > 0)
        .map(|(&p, _)| p)
        .collect();
    (1u64..1 << live.len())
        .map(|mask| {
            live.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

fn consume(remaining: &mut BTreeMap<ProcessId, u32>, round: &ProcessSet) {
    for p in round {
        *remaining.get_mut(p).expect("live process") -= 1;
    }
}

fn executions(
    remaining: &mut BTreeMap<ProcessId, u32>,
    rounds: &mut Vec<ProcessSet>,
    support: &ProcessSet,
    out: &mut Vec<Simplex>,
) {
    let next = first_rounds(remaining);
    if next.is_empty() {
        out.push(Simplex::facet(support.clone(), rounds));
        return;
    }
    for round in next {
        consume(remaining, &round);
        rounds.push(round);
        executions(remaining, rounds, support, out);
        let round = rounds.pop().expect("pushed above");
        for p in &round {
            *remaining.get_mut(p).expect("live process") += 1;
        }
    }
}

/// A fully materialized complex `P(r)`, empty simplex included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    counter: RoundCounter,
    /// Simplices by dimension; index 0 holds the empty simplex.
    levels: Vec<BTreeSet<Simplex>>,
}

impl Complex {
    /// Builds `P(counter)` under the default [`Limits`].
    pub fn build(counter: &RoundCounter) -> Result<Complex> {
        Complex::build_with(counter, &Limits::default())
    }

    pub fn build_with(counter: &RoundCounter, limits: &Limits) -> Result<Complex> {
        if counter.budgets().is_empty() {
            return Err(Error::EmptySupport);
        }
        limits.check(counter)?;
        let n = counter.budgets().len();
        let mut levels = vec![BTreeSet::new(); n + 1];
        levels[n] = facets(counter).into_iter().collect();
        for d in (0..n).rev() {
            let next: BTreeSet<Simplex> = levels[d + 1]
                .par_iter()
                .flat_map_iter(|s| {
                    s.active_set()
                        .into_iter()
                        .map(move |p| s.ghost_unchecked(&[p].into()))
                })
                .collect();
            levels[d] = next;
        }
        Ok(Complex {
            counter: counter.clone(),
            levels,
        })
    }

    pub fn counter(&self) -> &RoundCounter {
        &self.counter
    }

    /// `|supp r| − 1`.
    pub fn dimension(&self) -> i64 {
        self.levels.len() as i64 - 2
    }

    /// Simplices of dimension `d`, where `d = −1` is the empty simplex.
    pub fn of_dimension(&self, d: i64) -> impl Iterator<Item = &Simplex> {
        usize::try_from(d + 1)
            .ok()
            .and_then(|i| self.levels.get(i))
            .into_iter()
            .flatten()
    }

    pub fn facets(&self) -> impl Iterator<Item = &Simplex> {
        self.of_dimension(self.dimension())
    }

    /// All simplices by increasing dimension.
    pub fn simplices(&self) -> impl Iterator<Item = &Simplex> {
        self.levels.iter().flatten()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        let d = s.dimension() + 1;
        usize::try_from(d)
            .ok()
            .and_then(|i| self.levels.get(i))
            .is_some_and(|level| level.contains(s))
    }

    /// Number of simplices, the empty one included.
    pub fn len(&self) -> usize {
        self.levels.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn keys(&self) -> BTreeSet<String> {
        self.simplices().map(Simplex::key).collect()
    }

    pub fn f_vector(&self) -> FVector {
        FVector {
            empty: self.levels[0].len() as u64,
            counts: self.levels[1..].iter().map(|l| l.len() as u64).collect(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector().euler_characteristic()
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Entry {
            key: String,
            dim: i64,
            vertices: Vec<String>,
        }
        #[derive(Serialize)]
        struct Export<'a> {
            counter: &'a RoundCounter,
            simplices: Vec<Entry>,
        }
        let simplices = self
            .simplices()
            .map(|s| Entry {
                key: s.key(),
                dim: s.dimension(),
                vertices: vertices(s)
                    .map(|vs| vs.iter().map(Simplex::key).collect())
                    .unwrap_or_default(),
            })
            .collect();
        let export = Export {
            counter: &self.counter,
            simplices,
        };
        Ok(serde_json::to_string_pretty(&export)?)
    }
}

/// Face numbers by dimension, with the empty simplex kept apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FVector {
    /// Count at dimension −1.
    pub empty: u64,
    /// `counts[d]` is the number of `d`-simplices.
    pub counts: Vec<u64>,
}

impl FVector {
    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}
