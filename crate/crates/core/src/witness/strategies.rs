//! proptest generators for prestructures and witness structures.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::{Layer, TraceForm, WitnessPrestructure};
use crate::{ProcessId, ProcessSet};

fn mask_to_set(mask: u32) -> ProcessSet {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// A facet `(supp, W_1, ..., W_t)` over `0..n`.
pub fn facet(max_n: u32, max_t: usize) -> impl Strategy<Value = WitnessPrestructure> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(1..(1u32 << n), 0..=max_t).prop_map(move |rounds| {
            let rounds: Vec<ProcessSet> = rounds.into_iter().map(mask_to_set).collect();
            WitnessPrestructure::facet((0..n).collect(), &rounds)
        })
    })
}

/// A witness structure `Γ_S(τ)` for a random facet `τ` and random `S`.
pub fn witness_structure(max_n: u32, max_t: usize) -> impl Strategy<Value = WitnessPrestructure> {
    (facet(max_n, max_t), any::<u32>()).prop_map(|(f, mask)| {
        let s = f.support().into_iter().filter(|p| mask & (1 << p) != 0).collect();
        f.ghost(&s).unwrap()
    })
}

/// A prestructure from a random trace form satisfying (T1) and (T2).
pub fn prestructure(max_n: u32, max_t: usize) -> impl Strategy<Value = WitnessPrestructure> {
    (1..=max_n, 0..=max_t).prop_flat_map(|(n, t)| {
        let traces = prop::collection::vec(prop::collection::btree_set(1..=t.max(1), 0..=t), n as usize);
        (traces, 0..(1u32 << n)).prop_map(move |(traces, ghost_mask)| {
            let mut traces: Vec<BTreeSet<usize>> = traces
                .into_iter()
                .map(|mut tr| {
                    tr.retain(|&i| i <= t);
                    tr.insert(0);
                    tr
                })
                .collect();
            // spread any uncovered round over the processes so (T2) holds
            for i in 1..=t {
                if !traces.iter().any(|tr| tr.contains(&i)) {
                    let k = i % traces.len();
                    traces[k].insert(i);
                }
            }
            let ghosts = mask_to_set(ghost_mask);
            let support: ProcessSet = (0..n).collect();
            let tf = TraceForm {
                active: support.difference(&ghosts).copied().collect(),
                ghosts,
                traces: (0..n).zip(traces).collect::<BTreeMap<ProcessId, _>>(),
            };
            WitnessPrestructure::from_trace_form(tf).unwrap()
        })
    })
}

/// A stable prestructure, usually not canonical: a witness structure with
/// ghost-only columns spliced in before nonempty ones.
pub fn stable_prestructure(max_n: u32, max_t: usize) -> impl Strategy<Value = WitnessPrestructure> {
    (witness_structure(max_n, max_t), prop::collection::vec(0..3usize, 0..=max_t)).prop_map(
        |(w, inserts)| {
            let layers = w.into_layers();
            let mut out = vec![layers[0].clone()];
            for (i, layer) in layers.into_iter().enumerate().skip(1) {
                let k = inserts.get(i - 1).copied().unwrap_or(0);
                // push the ghosts of this column into the spliced empty ones
                let mut ghosts: Vec<ProcessId> = layer.ghosts.iter().copied().collect();
                for _ in 0..k {
                    if let Some(g) = ghosts.pop() {
                        out.push(Layer::new(ProcessSet::new(), [g].into()));
                    }
                }
                out.push(Layer::new(layer.seen, ghosts.into_iter().collect()));
            }
            WitnessPrestructure::from_layers(out)
        },
    )
}

/// A subset of `set` selected by `mask` over its sorted elements.
pub fn subset(set: &ProcessSet, mask: u32) -> ProcessSet {
    set.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &p)| p)
        .collect()
}
