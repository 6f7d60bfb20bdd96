//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use isc_core::{Layer, ProcessId, ProcessSet, RoundCounter, TraceForm, WitnessPrestructure};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

/// Draws `count` values from `strategy` with a fixed seed.
pub fn sample<S: Strategy>(strategy: S, count: usize) -> Vec<S::Value> {
    let mut runner = TestRunner::deterministic();
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy").current())
        .collect()
}

pub fn subset(set: &ProcessSet, mask: u32) -> ProcessSet {
    set.iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &p)| p)
        .collect()
}

/// A dense counter with `1..=max_n` processes and total budget `≤ max_total`.
pub fn counter(max_n: usize, max_total: u32) -> impl Strategy<Value = RoundCounter> {
    prop::collection::vec(0..=max_total, 1..=max_n).prop_map(move |mut budgets| {
        let mut total = 0;
        for b in budgets.iter_mut() {
            *b = (*b).min(max_total - total);
            total += *b;
        }
        RoundCounter::dense(&budgets)
    })
}

/// The facet of an execution chosen by `masks`: each round takes the live
/// processes selected by the next mask, or the first live one.
pub fn facet_from_masks(counter: &RoundCounter, masks: &[u32]) -> WitnessPrestructure {
    let mut remaining: BTreeMap<ProcessId, u32> = counter.budgets().clone();
    let mut rounds = Vec::new();
    let mut masks = masks.iter().cycle();
    loop {
        let live: ProcessSet = remaining.iter().filter(|(_, &b)| b > 0).map(|(&p, _)| p).collect();
        if live.is_empty() {
            break;
        }
        let mut round = subset(&live, *masks.next().expect("cycle"));
        if round.is_empty() {
            round.insert(*live.first().expect("live"));
        }
        for p in &round {
            *remaining.get_mut(p).expect("live") -= 1;
        }
        rounds.push(round);
    }
    WitnessPrestructure::facet(counter.support(), &rounds)
}

/// A simplex of `P(r)`: random counter, random facet, random ghost set.
pub fn simplex(max_n: usize, max_total: u32) -> impl Strategy<Value = (RoundCounter, WitnessPrestructure)> {
    (counter(max_n, max_total), prop::collection::vec(any::<u32>(), 1..8), any::<u32>()).prop_map(
        |(r, masks, ghosts)| {
            let facet = facet_from_masks(&r, &masks);
            let s = subset(&facet.support(), ghosts);
            let sigma = facet.ghost(&s).expect("ghosting a facet");
            (r, sigma)
        },
    )
}

/// A prestructure from a random trace form.
pub fn prestructure(max_n: u32, max_t: usize) -> impl Strategy<Value = WitnessPrestructure> {
    (1..=max_n, 0..=max_t).prop_flat_map(|(n, t)| {
        let traces = prop::collection::vec(prop::collection::btree_set(0..=t, 0..=t), n as usize);
        (traces, 0..(1u32 << n)).prop_map(move |(traces, ghost_mask)| {
            let mut traces: Vec<BTreeSet<usize>> = traces
                .into_iter()
                .map(|mut tr| {
                    tr.insert(0);
                    tr
                })
                .collect();
            for i in 1..=t {
                if !traces.iter().any(|tr| tr.contains(&i)) {
                    let k = i % traces.len();
                    traces[k].insert(i);
                }
            }
            let support: ProcessSet = (0..n).collect();
            let ghosts = subset(&support, ghost_mask);
            let tf = TraceForm {
                active: support.difference(&ghosts).copied().collect(),
                ghosts,
                traces: (0..n).zip(traces).collect(),
            };
            WitnessPrestructure::from_trace_form(tf).expect("valid trace form")
        })
    })
}

/// A stable prestructure that is usually not canonical: ghosts of a witness
/// structure are pushed into extra columns with empty `W`.
pub fn stable_prestructure(max_n: usize, max_total: u32) -> impl Strategy<Value = WitnessPrestructure> {
    (simplex(max_n, max_total), prop::collection::vec(0..3usize, 8)).prop_map(|((_, sigma), inserts)| {
        let layers = sigma.into_layers();
        let mut out = vec![layers[0].clone()];
        for (i, layer) in layers.into_iter().enumerate().skip(1) {
            let mut ghosts: Vec<ProcessId> = layer.ghosts.iter().copied().collect();
            for _ in 0..inserts[(i - 1) % inserts.len()] {
                if let Some(g) = ghosts.pop() {
                    out.push(Layer::new(ProcessSet::new(), [g].into()));
                }
            }
            out.push(Layer::new(layer.seen, ghosts.into_iter().collect()));
        }
        WitnessPrestructure::new(out).expect("nonempty")
    })
}

/// Every dense counter with `1..=max_n` entries and total `≤ max_total`.
pub fn all_counters(max_n: usize, max_total: u32) -> Vec<RoundCounter> {
    fn extend(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<RoundCounter>) {
        if left == 0 {
            out.push(RoundCounter::dense(prefix));
            return;
        }
        for b in 0..=budget {
            prefix.push(b);
            extend(prefix, left - 1, budget - b, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for n in 1..=max_n {
        extend(&mut Vec::new(), n, max_total, &mut out);
    }
    out
}
