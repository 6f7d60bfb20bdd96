//! Round counters: finitely supported maps from process ids to round budgets.
//!
//! An absent key means the process is not part of the protocol at all (⊥). A
//! present key with budget 0 is a passive process.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{ProcessId, ProcessSet};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoundCounter {
    budgets: BTreeMap<ProcessId, u32>,
}

impl RoundCounter {
    pub fn new(budgets: BTreeMap<ProcessId, u32>) -> Self {
        RoundCounter { budgets }
    }

    /// The dense counter `(r_0, ..., r_n)`.
    pub fn dense(budgets: &[u32]) -> Self {
        RoundCounter {
            budgets: budgets
                .iter()
                .enumerate()
                .map(|(i, &b)| (i as ProcessId, b))
                .collect(),
        }
    }

    pub fn get(&self, p: ProcessId) -> Option<u32> {
        self.budgets.get(&p).copied()
    }

    pub fn budgets(&self) -> &BTreeMap<ProcessId, u32> {
        &self.budgets
    }

    pub fn support(&self) -> ProcessSet {
        self.budgets.keys().copied().collect()
    }

    pub fn cardinality(&self) -> u64 {
        self.budgets.values().map(|&b| u64::from(b)).sum()
    }

    pub fn active(&self) -> ProcessSet {
        self.budgets
            .iter()
            .filter(|(_, &b)| b >= 1)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn passive(&self) -> ProcessSet {
        self.budgets
            .iter()
            .filter(|(_, &b)| b == 0)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn active_passive(&self) -> (ProcessSet, ProcessSet) {
        (self.active(), self.passive())
    }

    /// True when the support is exactly `{0, ..., n}`.
    pub fn is_dense(&self) -> bool {
        self.budgets
            .keys()
            .enumerate()
            .all(|(i, &p)| i as ProcessId == p)
    }

    /// Re-indexes the support onto `0..|supp|` preserving order.
    pub fn canonical(&self) -> RoundCounter {
        RoundCounter::dense(&self.budgets.values().copied().collect::<Vec<_>>())
    }

    /// The order-preserving relabeling `supp r -> 0..|supp r|` used by [`Self::canonical`].
    pub fn canonical_relabeling(&self) -> BTreeMap<ProcessId, ProcessId> {
        self.budgets
            .keys()
            .enumerate()
            .map(|(i, &p)| (p, i as ProcessId))
            .collect()
    }

    /// `result(i) = r(perm(i))`.
    pub fn permute(&self, perm: &Permutation) -> RoundCounter {
        let inverse = perm.inverse();
        RoundCounter {
            budgets: self
                .budgets
                .iter()
                .map(|(&p, &b)| (inverse.apply(p), b))
                .collect(),
        }
    }

    /// `r ↓ S`: one round of execution by every member of `set`.
    pub fn execute(&self, set: &ProcessSet) -> Result<RoundCounter> {
        let mut budgets = self.budgets.clone();
        for p in set {
            match budgets.get_mut(p) {
                Some(b) if *b >= 1 => *b -= 1,
                _ => {
                    return Err(Error::Precondition(format!(
                        "process {p} is not active in {self}"
                    )))
                }
            }
        }
        Ok(RoundCounter { budgets })
    }

    /// Sort key used by facet-count memo tables: zero entries and ids dropped,
    /// budgets sorted descending.
    pub fn shape(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.budgets.values().copied().filter(|&b| b > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Parses `"2,1,1"` (dense) or a JSON array/object.
    pub fn parse(text: &str) -> Result<RoundCounter> {
        let text = text.trim();
        if text.starts_with('[') || text.starts_with('{') {
            return Ok(serde_json::from_str(text)?);
        }
        let text = text.trim_start_matches('(').trim_end_matches(')');
        if text.is_empty() {
            return Ok(RoundCounter::default());
        }
        let budgets = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad budget {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RoundCounter::dense(&budgets))
    }
}

impl FromStr for RoundCounter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RoundCounter::parse(s)
    }
}

impl fmt::Display for RoundCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dense() {
            let parts: Vec<String> = self.budgets.values().map(u32::to_string).collect();
            write!(f, "({})", parts.join(","))
        } else {
            let parts: Vec<String> = self
                .budgets
                .iter()
                .map(|(p, b)| format!("{p}:{b}"))
                .collect();
            write!(f, "{{{}}}", parts.join(","))
        }
    }
}

impl Serialize for RoundCounter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_dense() {
            serializer.collect_seq(self.budgets.values())
        } else {
            serializer.collect_map(self.budgets.iter().map(|(p, b)| (p.to_string(), b)))
        }
    }
}

impl<'de> Deserialize<'de> for RoundCounter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Dense(Vec<u32>),
            Sparse(BTreeMap<String, u32>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Dense(v) => Ok(RoundCounter::dense(&v)),
            Repr::Sparse(m) => {
                let mut budgets = BTreeMap::new();
                for (k, b) in m {
                    let p: ProcessId = k
                        .parse()
                        .map_err(|_| de::Error::custom(format!("bad process id {k:?}")))?;
                    budgets.insert(p, b);
                }
                Ok(RoundCounter { budgets })
            }
        }
    }
}

/// A finitely supported bijection of the process ids, identity outside its table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Permutation {
    map: BTreeMap<ProcessId, ProcessId>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (ProcessId, ProcessId)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if let Some(prev) = map.insert(from, to) {
                if prev != to {
                    return Err(Error::NotBijective(format!(
                        "{from} mapped to both {prev} and {to}"
                    )));
                }
            }
        }
        let domain: ProcessSet = map.keys().copied().collect();
        let image: ProcessSet = map.values().copied().collect();
        if image.len() != map.len() {
            return Err(Error::NotBijective("two points share an image".into()));
        }
        if domain != image {
            return Err(Error::NotBijective(
                "table does not permute its own support".into(),
            ));
        }
        map.retain(|k, v| k != v);
        Ok(Permutation { map })
    }

    pub fn swap(a: ProcessId, b: ProcessId) -> Self {
        Permutation::from_pairs([(a, b), (b, a)]).expect("a swap is a bijection")
    }

    pub fn apply(&self, p: ProcessId) -> ProcessId {
        self.map.get(&p).copied().unwrap_or(p)
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn apply_set(&self, set: &ProcessSet) -> ProcessSet {
        set.iter().map(|&p| self.apply(p)).collect()
    }
}
