//! The trace-form presentation `(A, G, {Tr(p)})` of a prestructure.

use std::collections::{BTreeMap, BTreeSet};

use super::{Layer, Round, StructureClass, WitnessPrestructure};
use crate::error::{Error, Result};
use crate::{ProcessId, ProcessSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceForm {
    pub active: ProcessSet,
    pub ghosts: ProcessSet,
    pub traces: BTreeMap<ProcessId, BTreeSet<Round>>,
}

impl TraceForm {
    /// `t = max ∪ Tr(p)`, 0 for a trace form without processes.
    pub fn last_round(&self) -> Round {
        self.traces
            .values()
            .filter_map(|t| t.last().copied())
            .max()
            .unwrap_or(0)
    }

    /// Checks (T1), (T2), disjointness of `A` and `G`, and that traces are
    /// given exactly for `A ∪ G`.
    pub fn validate(&self) -> Result<()> {
        if !self.active.is_disjoint(&self.ghosts) {
            return Err(Error::InvalidTraceForm("A and G intersect".into()));
        }
        let keys: ProcessSet = self.traces.keys().copied().collect();
        let members: ProcessSet = self.active.union(&self.ghosts).copied().collect();
        if keys != members {
            return Err(Error::InvalidTraceForm(
                "traces must be given exactly for A ∪ G".into(),
            ));
        }
        if let Some((p, _)) = self.traces.iter().find(|(_, t)| !t.contains(&0)) {
            return Err(Error::InvalidTraceForm(format!("0 ∉ Tr({p})")));
        }
        let t = self.last_round();
        let covered: BTreeSet<Round> = self.traces.values().flatten().copied().collect();
        if covered.len() != t + 1 && !self.traces.is_empty() {
            return Err(Error::InvalidTraceForm(
                "the traces do not cover every round 0..=t".into(),
            ));
        }
        Ok(())
    }

    /// Restricts every trace to `0..=q`.
    pub fn truncate(&mut self, q: Round) {
        for t in self.traces.values_mut() {
            t.retain(|&i| i <= q);
        }
    }

    /// (TS): the last round is witnessed by an active process, or everything
    /// sits in round 0 when nothing is active.
    pub fn is_stable(&self) -> bool {
        if self.active.is_empty() {
            return self.traces.values().all(|t| t.len() == 1);
        }
        self.max_active_round() == Some(self.last_round())
    }

    pub(crate) fn max_active_round(&self) -> Option<Round> {
        self.active
            .iter()
            .filter_map(|p| self.traces[p].last().copied())
            .max()
    }

    pub(crate) fn into_prestructure(self) -> WitnessPrestructure {
        let t = self.last_round();
        let mut layers = vec![Layer::default(); t + 1];
        for (&p, trace) in &self.traces {
            let last = *trace.last().expect("traces contain 0");
            let ghost = self.ghosts.contains(&p);
            for &i in trace {
                if ghost && i == last {
                    layers[i].ghosts.insert(p);
                } else {
                    layers[i].seen.insert(p);
                }
            }
        }
        WitnessPrestructure::from_layers(layers)
    }
}

impl WitnessPrestructure {
    pub fn to_trace_form(&self) -> Result<TraceForm> {
        self.require(StructureClass::Prestructure)?;
        Ok(self.trace_form_unchecked())
    }

    pub(crate) fn trace_form_unchecked(&self) -> TraceForm {
        let ghosts = self.ghost_set();
        let support = self.support();
        let active = support.difference(&ghosts).copied().collect();
        let mut traces: BTreeMap<ProcessId, BTreeSet<Round>> =
            support.iter().map(|&p| (p, BTreeSet::new())).collect();
        for (i, layer) in self.layers().iter().enumerate() {
            for p in layer.seen.iter().chain(&layer.ghosts) {
                if let Some(t) = traces.get_mut(p) {
                    t.insert(i);
                }
            }
        }
        TraceForm {
            active,
            ghosts,
            traces,
        }
    }

    pub fn from_trace_form(tf: TraceForm) -> Result<Self> {
        tf.validate()?;
        Ok(tf.into_prestructure())
    }
}
