//! Witness prestructures and witness structures.
//!
//! A prestructure is a finite sequence of pairs `(W_i, G_i)` of process sets.
//! `W_i` holds the processes whose writes are witnessed in round `i`, `G_i` the
//! processes last witnessed in round `i` that have since become ghosts. Witness
//! structures (every `W_i`, `i ≥ 1`, nonempty) index the simplices of the
//! immediate snapshot complexes.
//!
//! The canonical text encoding renders each pair as `w,w,..|g,g,..` with sorted
//! elements and joins pairs with `;`, e.g. `0,1,2,3|4;2|0;1|2,3`.

mod ops;
#[cfg(test)]
pub(crate) mod strategies;
mod trace;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::{ProcessId, ProcessSet};

pub use trace::TraceForm;

/// Round index inside a prestructure.
pub type Round = usize;

/// One column `(W_i, G_i)` of a prestructure.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Layer {
    pub seen: ProcessSet,
    pub ghosts: ProcessSet,
}

impl Layer {
    pub fn new(seen: ProcessSet, ghosts: ProcessSet) -> Self {
        Layer { seen, ghosts }
    }

    pub fn from_slices(seen: &[ProcessId], ghosts: &[ProcessId]) -> Self {
        Layer {
            seen: seen.iter().copied().collect(),
            ghosts: ghosts.iter().copied().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty() && self.ghosts.is_empty()
    }

    pub fn union(&self) -> ProcessSet {
        self.seen.union(&self.ghosts).copied().collect()
    }
}

/// Strictest condition set satisfied by a raw pair sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StructureClass {
    Invalid,
    Prestructure,
    StablePrestructure,
    WitnessStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessPrestructure {
    layers: Vec<Layer>,
}

/// Simplices of `P(r)` are witness structures.
pub type Simplex = WitnessPrestructure;

/// `supp`, ghost set, active set and dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedSets {
    pub support: ProcessSet,
    pub ghosts: ProcessSet,
    pub active: ProcessSet,
    pub dimension: i64,
}

impl WitnessPrestructure {
    /// Wraps a raw pair sequence. Only emptiness is rejected here; use
    /// [`Self::classify`] to find out which conditions hold.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidPrestructure(
                "a prestructure has at least the pair (W_0, G_0)".into(),
            ));
        }
        Ok(WitnessPrestructure { layers })
    }

    pub(crate) fn from_layers(layers: Vec<Layer>) -> Self {
        debug_assert!(!layers.is_empty());
        WitnessPrestructure { layers }
    }

    /// Convenience constructor: `&[(W_i, G_i)]`.
    pub fn from_pairs(pairs: &[(&[ProcessId], &[ProcessId])]) -> Result<Self> {
        Self::new(pairs.iter().map(|(w, g)| Layer::from_slices(w, g)).collect())
    }

    /// The structure `((∅, supp))` indexing the empty simplex.
    pub fn empty(support: ProcessSet) -> Self {
        WitnessPrestructure {
            layers: vec![Layer::new(ProcessSet::new(), support)],
        }
    }

    /// The facet `(supp, W_1, ..., W_t)` with every ghost row empty.
    pub fn facet(support: ProcessSet, rounds: &[ProcessSet]) -> Self {
        let mut layers = Vec::with_capacity(rounds.len() + 1);
        layers.push(Layer::new(support, ProcessSet::new()));
        layers.extend(rounds.iter().map(|w| Layer::new(w.clone(), ProcessSet::new())));
        WitnessPrestructure { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    /// `t`, the index of the last pair.
    pub fn last_round(&self) -> Round {
        self.layers.len() - 1
    }

    pub fn classify(&self) -> StructureClass {
        classify_layers(&self.layers)
    }

    pub(crate) fn require(&self, expected: StructureClass) -> Result<()> {
        let found = self.classify();
        if found == StructureClass::Invalid {
            return Err(Error::InvalidPrestructure(self.to_string()));
        }
        if found < expected {
            return Err(Error::WrongClass { expected, found });
        }
        Ok(())
    }

    pub fn support(&self) -> ProcessSet {
        self.layers[0].union()
    }

    pub fn ghost_set(&self) -> ProcessSet {
        self.layers
            .iter()
            .flat_map(|l| l.ghosts.iter().copied())
            .collect()
    }

    pub fn active_set(&self) -> ProcessSet {
        let ghosts = self.ghost_set();
        self.support().difference(&ghosts).copied().collect()
    }

    pub fn dimension(&self) -> i64 {
        self.active_set().len() as i64 - 1
    }

    pub fn derived_sets(&self) -> Result<DerivedSets> {
        self.require(StructureClass::Prestructure)?;
        let support = self.support();
        let ghosts = self.ghost_set();
        let active: ProcessSet = support.difference(&ghosts).copied().collect();
        let dimension = active.len() as i64 - 1;
        Ok(DerivedSets {
            support,
            ghosts,
            active,
            dimension,
        })
    }

    /// `Tr(p) = { i : p ∈ W_i ∪ G_i }`.
    pub fn trace(&self, p: ProcessId) -> Result<BTreeSet<Round>> {
        if !self.layers[0].seen.contains(&p) && !self.layers[0].ghosts.contains(&p) {
            return Err(Error::NotInSupport(p));
        }
        Ok(self.trace_unchecked(p))
    }

    pub(crate) fn trace_unchecked(&self, p: ProcessId) -> BTreeSet<Round> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.seen.contains(&p) || l.ghosts.contains(&p))
            .map(|(i, _)| i)
            .collect()
    }

    /// `last(p) = max{ -1 ≤ i ≤ t : p ∈ W_i }` with `W_{-1} = supp`.
    pub fn last(&self, p: ProcessId) -> Result<i64> {
        if !self.support().contains(&p) {
            return Err(Error::NotInSupport(p));
        }
        Ok(self
            .layers
            .iter()
            .rposition(|l| l.seen.contains(&p))
            .map_or(-1, |i| i as i64))
    }

    pub fn is_empty_structure(&self) -> bool {
        self.layers.len() == 1 && self.layers[0].seen.is_empty()
    }

    /// Applies a renaming of process ids to every set.
    pub fn relabel(&self, f: impl Fn(ProcessId) -> ProcessId) -> Self {
        let map = |s: &ProcessSet| s.iter().map(|&p| f(p)).collect::<ProcessSet>();
        WitnessPrestructure {
            layers: self
                .layers
                .iter()
                .map(|l| Layer::new(map(&l.seen), map(&l.ghosts)))
                .collect(),
        }
    }

    /// The canonical text encoding; also available through `Display`.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

fn classify_layers(layers: &[Layer]) -> StructureClass {
    let Some(first) = layers.first() else {
        return StructureClass::Invalid;
    };
    let base = &first.seen;
    for layer in &layers[1..] {
        // (P1) and (P4)
        if !layer.seen.is_subset(base) || !layer.ghosts.is_subset(base) || layer.is_empty() {
            return StructureClass::Invalid;
        }
    }
    for (i, li) in layers.iter().enumerate() {
        for lj in &layers[i..] {
            // (P3) for i ≤ j
            if !li.ghosts.is_disjoint(&lj.seen) {
                return StructureClass::Invalid;
            }
        }
        for lj in &layers[i + 1..] {
            // (P2) for i < j
            if !li.ghosts.is_disjoint(&lj.ghosts) {
                return StructureClass::Invalid;
            }
        }
    }
    if layers[1..].iter().all(|l| !l.seen.is_empty()) {
        StructureClass::WitnessStructure
    } else if layers.len() == 1 || !layers[layers.len() - 1].seen.is_empty() {
        StructureClass::StablePrestructure
    } else {
        StructureClass::Prestructure
    }
}

pub(crate) fn format_set(set: &ProcessSet) -> String {
    let parts: Vec<String> = set.iter().map(ProcessId::to_string).collect();
    parts.join(",")
}

pub(crate) fn parse_set(text: &str) -> Result<ProcessSet> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(ProcessSet::new());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<ProcessId>()
                .map_err(|e| Error::Parse(format!("bad process id {s:?}: {e}")))
        })
        .collect()
}

impl fmt::Display for WitnessPrestructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}|{}", format_set(&layer.seen), format_set(&layer.ghosts))?;
        }
        Ok(())
    }
}

impl FromStr for WitnessPrestructure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let layers = s
            .trim()
            .split(';')
            .map(|pair| {
                let (w, g) = pair
                    .split_once('|')
                    .ok_or_else(|| Error::Parse(format!("pair {pair:?} has no '|'")))?;
                Ok(Layer::new(parse_set(w)?, parse_set(g)?))
            })
            .collect::<Result<Vec<_>>>()?;
        WitnessPrestructure::new(layers)
    }
}

impl serde::Serialize for WitnessPrestructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for WitnessPrestructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn set(xs: &[ProcessId]) -> ProcessSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn classifies_the_three_examples() {
        assert_eq!(sigma1().classify(), StructureClass::Prestructure);
        assert_eq!(sigma2().classify(), StructureClass::StablePrestructure);
        assert_eq!(sigma3().classify(), StructureClass::WitnessStructure);
    }

    #[test]
    fn classify_rejects_each_axiom() {
        // (P1): W_1 not inside W_0
        assert_eq!(ws("0|;1|").classify(), StructureClass::Invalid);
        // (P2): ghost twice
        assert_eq!(ws("0,1|;0|1;0|1").classify(), StructureClass::Invalid);
        // (P3): ghost seen later
        assert_eq!(ws("0,1|;0|1;1|").classify(), StructureClass::Invalid);
        assert_eq!(ws("0|1;1|").classify(), StructureClass::Invalid);
        // (P4): empty column
        assert_eq!(ws("0|;|").classify(), StructureClass::Invalid);
        assert!(WitnessPrestructure::new(vec![]).is_err());
    }

    #[test]
    fn derived_sets_of_examples() {
        let d = sigma1().derived_sets().unwrap();
        assert_eq!(d.support, set(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(d.ghosts, set(&[1, 3, 4, 5]));
        assert_eq!(d.active, set(&[0, 2]));
        assert_eq!(d.dimension, 1);

        let d = sigma3().derived_sets().unwrap();
        assert_eq!(d.support, set(&[0, 1, 2, 3, 4]));
        assert_eq!(d.ghosts, set(&[0, 2, 3, 4]));
        assert_eq!(d.active, set(&[1]));
        assert_eq!(d.dimension, 0);
        assert_eq!(sigma2().dimension(), 0);

        let d = ws("|0,1").derived_sets().unwrap();
        assert_eq!(d.support, set(&[0, 1]));
        assert_eq!(d.ghosts, set(&[0, 1]));
        assert!(d.active.is_empty());
        assert_eq!(d.dimension, -1);
    }

    #[test]
    fn traces_and_last() {
        let s = sigma1();
        assert_eq!(s.trace(1).unwrap(), [0, 1, 2].into());
        assert_eq!(s.trace(3).unwrap(), [0, 3, 4].into());
        assert_eq!(s.trace(5).unwrap(), [0].into());
        assert_eq!(s.trace(0).unwrap(), [0].into());
        assert_eq!(s.trace(2).unwrap(), [0, 3].into());
        assert_eq!(s.trace(4).unwrap(), [0, 3].into());
        assert_eq!(s.last(5).unwrap(), -1);
        assert_eq!(s.last(1).unwrap(), 1);
        assert_eq!(s.last(3).unwrap(), 3);
        assert!(matches!(s.trace(9), Err(Error::NotInSupport(9))));
        assert!(s.last(9).is_err());
    }

    #[test]
    fn encoding_is_bit_exact() {
        assert_eq!(sigma3().key(), "0,1,2,3|4;2|0;1|2,3");
        assert_eq!(ws("|0,1").key(), "|0,1");
        let round: WitnessPrestructure = sigma1().key().parse().unwrap();
        assert_eq!(round, sigma1());
        assert!("0,1".parse::<WitnessPrestructure>().is_err());
        assert!("0,x|".parse::<WitnessPrestructure>().is_err());
    }
}
