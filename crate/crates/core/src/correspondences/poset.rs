//! Witness posets: the knowledge order of a (partial) execution.
//!
//! The token `(p, i)` stands for what process `p` knows after its `i`-th
//! step, `(p, 0)` being its input. `(p, i) > (q, j)` means that `p` after
//! step `i` knows what `q` knew after step `j`. A process with no tokens at
//! all is absent; absent processes are exactly the round-0 ghosts of the
//! corresponding witness structure.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::execution::Execution;
use crate::complex::{facets, is_simplex_of, FVector, Limits};
use crate::error::{Error, Result};
use crate::round_counter::RoundCounter;
use crate::witness::{format_set, Layer, Simplex, StructureClass};
use crate::{ProcessId, ProcessSet};

/// `(p, i)`: the knowledge of `p` after step `i`.
pub type Token = (ProcessId, u32);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WitnessPoset {
    counter: RoundCounter,
    elements: BTreeSet<Token>,
    /// Pairs `(above, below)`, transitively closed.
    relation: BTreeSet<(Token, Token)>,
}

#[derive(Serialize, Deserialize)]
struct PosetJson {
    elements: Vec<Token>,
    relation: Vec<(Token, Token)>,
}

impl WitnessPoset {
    /// Assembles a poset and validates it.
    pub fn new(
        counter: RoundCounter,
        elements: BTreeSet<Token>,
        relation: BTreeSet<(Token, Token)>,
    ) -> Result<Self> {
        let z = WitnessPoset {
            counter,
            elements,
            relation,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn counter(&self) -> &RoundCounter {
        &self.counter
    }

    pub fn elements(&self) -> &BTreeSet<Token> {
        &self.elements
    }

    pub fn relation(&self) -> &BTreeSet<(Token, Token)> {
        &self.relation
    }

    pub fn greater(&self, a: Token, b: Token) -> bool {
        self.relation.contains(&(a, b))
    }

    /// `k_p` for every process of the counter, `-1` when `p` is absent.
    pub fn levels(&self) -> BTreeMap<ProcessId, i64> {
        let mut out: BTreeMap<ProcessId, i64> =
            self.counter.budgets().keys().map(|&p| (p, -1)).collect();
        for &(p, i) in &self.elements {
            let e = out.entry(p).or_insert(-1);
            *e = (*e).max(i64::from(i));
        }
        out
    }

    /// `A(Z)`: processes that ran their whole budget.
    pub fn active(&self) -> ProcessSet {
        self.levels()
            .into_iter()
            .filter(|&(p, k)| self.counter.get(p).is_some_and(|b| k == i64::from(b)))
            .map(|(p, _)| p)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.active() == self.counter.support()
    }

    /// Every process of the counter has at least its input token.
    pub fn all_present(&self) -> bool {
        self.levels().values().all(|&k| k >= 0)
    }

    /// `U(p, i)`: the tokens strictly below `(p, i)`.
    pub fn below(&self, t: Token) -> BTreeSet<Token> {
        self.relation
            .range((t, (0, 0))..=(t, (ProcessId::MAX, u32::MAX)))
            .map(|&(_, b)| b)
            .collect()
    }

    /// Checks the witness poset axioms, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPoset(msg));
        for &(p, i) in &self.elements {
            match self.counter.get(p) {
                None => return Err(Error::NotInSupport(p)),
                Some(b) if i > b => return bad(format!("token ({p},{i}) exceeds budget {b}")),
                _ => {}
            }
            if i > 0 && !self.elements.contains(&(p, i - 1)) {
                return bad(format!("token ({p},{i}) without ({p},{})", i - 1));
            }
        }
        for &(a, b) in &self.relation {
            if !self.elements.contains(&a) || !self.elements.contains(&b) {
                return bad(format!("relation {a:?} > {b:?} uses unknown tokens"));
            }
            if a == b {
                return bad(format!("{a:?} > {a:?}"));
            }
            for c in self.below(b) {
                if !self.greater(a, c) {
                    return bad(format!("relation not transitively closed at {a:?} > {b:?} > {c:?}"));
                }
            }
        }
        // (1) each process's tokens form a chain
        for &(p, i) in &self.elements {
            if i > 0 && !self.greater((p, i), (p, i - 1)) {
                return bad(format!("({p},{i}) is not above ({p},{})", i - 1));
            }
        }
        // (2) the strict down-sets of non-input tokens are ordered compatibly
        let steps: Vec<Token> = self.elements.iter().copied().filter(|t| t.1 >= 1).collect();
        let downs: BTreeMap<Token, BTreeSet<Token>> =
            steps.iter().map(|&t| (t, self.below(t))).collect();
        for &(p, i) in &steps {
            for &(q, j) in &steps {
                let (up, uq) = (&downs[&(p, i)], &downs[&(q, j)]);
                let p_sees = self.greater((p, i), (q, j - 1));
                let q_sees = self.greater((q, j), (p, i - 1));
                let ok = (uq.is_superset(up) && uq != up && q_sees && !p_sees)
                    || (up.is_superset(uq) && up != uq && p_sees && !q_sees)
                    || (up == uq && p_sees && q_sees);
                if !ok {
                    return bad(format!("tokens ({p},{i}) and ({q},{j}) are not ordered compatibly"));
                }
            }
        }
        // (3) maximal elements are the final tokens of the active processes
        let maximal: BTreeSet<Token> = self
            .elements
            .iter()
            .copied()
            .filter(|&t| !self.relation.iter().any(|&(_, b)| b == t))
            .collect();
        let expected: BTreeSet<Token> = self
            .active()
            .into_iter()
            .map(|p| (p, self.counter.get(p).expect("active")))
            .collect();
        if maximal != expected {
            return bad("maximal elements are not the final tokens of the active processes".into());
        }
        Ok(())
    }

    /// The lower ideal generated by the final tokens of `set ⊆ A(Z)`.
    pub fn ideal(&self, set: &ProcessSet) -> Result<WitnessPoset> {
        let active = self.active();
        if !set.is_subset(&active) {
            return Err(Error::Precondition(format!(
                "{{{}}} is not a subset of A(Z) = {{{}}}",
                format_set(set),
                format_set(&active)
            )));
        }
        let mut elements = BTreeSet::new();
        for &p in set {
            let top = (p, self.counter.get(p).expect("active"));
            elements.insert(top);
            elements.extend(self.below(top));
        }
        let relation = self
            .relation
            .iter()
            .copied()
            .filter(|(a, b)| elements.contains(a) && elements.contains(b))
            .collect();
        Ok(WitnessPoset {
            counter: self.counter.clone(),
            elements,
            relation,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&PosetJson {
            elements: self.elements.iter().copied().collect(),
            relation: self.relation.iter().copied().collect(),
        })?)
    }

    /// Parses the JSON form and validates against `counter`.
    pub fn from_json(counter: &RoundCounter, text: &str) -> Result<WitnessPoset> {
        let raw: PosetJson = serde_json::from_str(text)?;
        WitnessPoset::new(
            counter.clone(),
            raw.elements.into_iter().collect(),
            raw.relation.into_iter().collect(),
        )
    }
}

/// Builds the order from per-process step rounds: `steps[p][i−1]` is the
/// round of the `i`-th step of `p` and `levels[p]` its last token index.
/// `(p, i) > (q, j)` iff `i ≥ 1` and `q` takes step `j + 1` no later than `p`
/// takes step `i`.
fn order_from_steps(
    counter: &RoundCounter,
    levels: &BTreeMap<ProcessId, i64>,
    steps: &BTreeMap<ProcessId, Vec<usize>>,
) -> WitnessPoset {
    let elements: BTreeSet<Token> = levels
        .iter()
        .flat_map(|(&p, &k)| (0..=k).map(move |i| (p, i as u32)))
        .collect();
    let mut relation = BTreeSet::new();
    for &(p, i) in &elements {
        if i == 0 {
            continue;
        }
        let at = steps[&p][i as usize - 1];
        for &(q, j) in &elements {
            if steps[&q].get(j as usize).is_some_and(|&r| at >= r) {
                relation.insert(((p, i), (q, j)));
            }
        }
    }
    WitnessPoset {
        counter: counter.clone(),
        elements,
        relation,
    }
}

/// The complete witness poset of an execution.
pub fn exec_to_poset(e: &Execution) -> WitnessPoset {
    let counter = e.counter();
    let steps: BTreeMap<ProcessId, Vec<usize>> = counter
        .budgets()
        .keys()
        .map(|&p| {
            let rounds = e
                .rounds()
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains(&p))
                .map(|(i, _)| i + 1)
                .collect();
            (p, rounds)
        })
        .collect();
    let levels = counter
        .budgets()
        .iter()
        .map(|(&p, &b)| (p, i64::from(b)))
        .collect();
    order_from_steps(counter, &levels, &steps)
}

/// Groups the non-input tokens by their strict down-set, ordered by inclusion.
fn layers_by_downset(z: &WitnessPoset) -> Result<Vec<(BTreeSet<Token>, ProcessSet)>> {
    let mut groups: BTreeMap<BTreeSet<Token>, Vec<ProcessId>> = BTreeMap::new();
    for &t in z.elements.iter().filter(|t| t.1 >= 1) {
        groups.entry(z.below(t)).or_default().push(t.0);
    }
    let mut groups: Vec<(BTreeSet<Token>, Vec<ProcessId>)> = groups.into_iter().collect();
    groups.sort_by_key(|(u, _)| u.len());
    let mut out: Vec<(BTreeSet<Token>, ProcessSet)> = Vec::with_capacity(groups.len());
    for (u, members) in groups {
        if let Some((prev, _)) = out.last() {
            if !prev.is_subset(&u) {
                return Err(Error::InvalidPoset("down-sets do not form a chain".into()));
            }
        }
        let set: ProcessSet = members.iter().copied().collect();
        if set.len() != members.len() {
            return Err(Error::InvalidPoset(
                "two steps of one process share a down-set".into(),
            ));
        }
        out.push((u, set));
    }
    Ok(out)
}

/// Reads the execution off a complete witness poset.
pub fn poset_to_exec(z: &WitnessPoset) -> Result<Execution> {
    z.validate()?;
    if !z.is_complete() {
        return Err(Error::InvalidPoset("the poset is not complete".into()));
    }
    let rounds = layers_by_downset(z)?.into_iter().map(|(_, w)| w).collect();
    let e = Execution::new(z.counter.clone(), rounds)?;
    if exec_to_poset(&e) != *z {
        return Err(Error::InvalidPoset("the poset is not the order of an execution".into()));
    }
    Ok(e)
}

/// The witness poset of a simplex of `P(counter)`.
pub fn witness_to_poset(s: &Simplex, counter: &RoundCounter) -> Result<WitnessPoset> {
    if !is_simplex_of(s, counter) {
        return Err(Error::NotASimplex {
            key: s.key(),
            counter: counter.to_string(),
        });
    }
    let layers = s.layers();
    let mut levels = BTreeMap::new();
    let mut steps = BTreeMap::new();
    for &p in counter.budgets().keys() {
        let seen = layers.iter().filter(|l| l.seen.contains(&p)).count();
        levels.insert(p, seen as i64 - 1);
        let rounds: Vec<usize> = layers
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, l)| l.seen.contains(&p) || l.ghosts.contains(&p))
            .map(|(i, _)| i)
            .collect();
        steps.insert(p, rounds);
    }
    Ok(order_from_steps(counter, &levels, &steps))
}

/// The simplex of `P(r)` indexed by a witness poset.
pub fn poset_to_witness(z: &WitnessPoset) -> Result<Simplex> {
    z.validate()?;
    let support = z.counter.support();
    let seen0: ProcessSet = z.elements.iter().filter(|t| t.1 == 0).map(|t| t.0).collect();
    let groups = layers_by_downset(z)?;
    let mut layers = vec![Layer::new(
        seen0.clone(),
        support.difference(&seen0).copied().collect(),
    )];
    layers.extend(groups.iter().map(|(_, w)| Layer::new(w.clone(), ProcessSet::new())));
    for (p, k) in z.levels() {
        let budget = i64::from(z.counter.get(p).expect("support"));
        if k < 0 || k >= budget {
            continue;
        }
        let last = (p, k as u32);
        let m = groups
            .iter()
            .position(|(u, _)| u.contains(&last))
            .ok_or_else(|| Error::InvalidPoset(format!("({p},{k}) is never witnessed")))?;
        layers[m + 1].ghosts.insert(p);
    }
    let s = Simplex::new(layers)?;
    if s.classify() != StructureClass::WitnessStructure
        || witness_to_poset(&s, &z.counter).ok().as_ref() != Some(z)
    {
        return Err(Error::InvalidPoset(
            "the poset does not index a simplex of the complex".into(),
        ));
    }
    Ok(s)
}

/// Is `z` a witness poset for its counter?
pub fn poset_validate(z: &WitnessPoset) -> bool {
    z.validate().is_ok()
}

/// `I(Z, A)`, the union of the local views of the processes in `set`.
pub fn poset_ideal(z: &WitnessPoset, set: &ProcessSet) -> Result<WitnessPoset> {
    z.ideal(set)
}

/// The complex `C(r)` of witness posets, ordered by `|A(Z)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetComplex {
    counter: RoundCounter,
    /// `levels[k]` holds the posets with `|A(Z)| = k`.
    levels: Vec<BTreeSet<WitnessPoset>>,
}

impl PosetComplex {
    pub fn counter(&self) -> &RoundCounter {
        &self.counter
    }

    pub fn posets(&self) -> impl Iterator<Item = &WitnessPoset> {
        self.levels.iter().flatten()
    }

    /// Posets with a single active process.
    pub fn vertices(&self) -> impl Iterator<Item = &WitnessPoset> {
        self.levels.get(1).into_iter().flatten()
    }

    pub fn facets(&self) -> impl Iterator<Item = &WitnessPoset> {
        self.levels.last().into_iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, z: &WitnessPoset) -> bool {
        self.levels
            .get(z.active().len())
            .is_some_and(|level| level.contains(z))
    }

    pub fn f_vector(&self) -> FVector {
        FVector {
            empty: self.levels[0].len() as u64,
            counts: self.levels[1..].iter().map(|l| l.len() as u64).collect(),
        }
    }
}

/// Enumerates `C(r)`: complete posets of all executions, closed under lower
/// ideals.
pub fn build_c(counter: &RoundCounter, limits: &Limits) -> Result<PosetComplex> {
    if counter.budgets().is_empty() {
        return Err(Error::EmptySupport);
    }
    limits.check(counter)?;
    let n = counter.budgets().len();
    let mut levels = vec![BTreeSet::new(); n + 1];
    levels[n] = facets(counter)
        .par_iter()
        .map(|f| exec_to_poset(&Execution::from_facet(f, counter).expect("facet")))
        .collect();
    for k in (0..n).rev() {
        levels[k] = levels[k + 1]
            .par_iter()
            .flat_map_iter(|z: &WitnessPoset| {
                let active = z.active();
                active
                    .iter()
                    .map(|p| {
                        let mut rest = active.clone();
                        rest.remove(p);
                        z.ideal(&rest).expect("subset of A(Z)")
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    Ok(PosetComplex {
        counter: counter.clone(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::witness::fixtures::ws;

    fn rc(s: &str) -> RoundCounter {
        s.parse().unwrap()
    }

    fn exec(counter: &str, rounds: &[&[ProcessId]]) -> Execution {
        Execution::new(
            rc(counter),
            rounds.iter().map(|r| r.iter().copied().collect()).collect(),
        )
        .unwrap()
    }

    fn rel(pairs: &[(Token, Token)]) -> BTreeSet<(Token, Token)> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn synchronous_execution() {
        let z = exec_to_poset(&exec("1,1", &[&[0, 1]]));
        assert_eq!(
            *z.relation(),
            rel(&[((0, 1), (0, 0)), ((0, 1), (1, 0)), ((1, 1), (0, 0)), ((1, 1), (1, 0))])
        );
        assert!(!z.greater((0, 1), (1, 1)) && !z.greater((1, 1), (0, 1)));
        assert!(poset_validate(&z));
        assert!(z.is_complete());
    }

    #[test]
    fn sequential_execution() {
        let z = exec_to_poset(&exec("1,1", &[&[0], &[1]]));
        assert_eq!(
            *z.relation(),
            rel(&[((0, 1), (0, 0)), ((1, 1), (0, 0)), ((1, 1), (1, 0))])
        );
        assert!(poset_validate(&z));
    }

    #[test]
    fn validation_rejects_mutations() {
        let z = exec_to_poset(&exec("1,1", &[&[0], &[1]]));
        let mut dropped = z.relation().clone();
        dropped.remove(&((1, 1), (0, 0)));
        let err = WitnessPoset::new(z.counter().clone(), z.elements().clone(), dropped).unwrap_err();
        assert!(err.to_string().contains("ordered compatibly"), "{err}");
        let z = exec_to_poset(&exec("1,1", &[&[0, 1]]));
        let bare = WitnessPoset::new(rc("1,1"), z.elements().clone(), BTreeSet::new());
        assert!(bare.is_err());
        let mut open = z.relation().clone();
        open.insert(((0, 1), (1, 1)));
        assert!(WitnessPoset::new(z.counter().clone(), z.elements().clone(), open).is_err());
    }

    #[test]
    fn executions_round_trip() {
        for counter in ["1,1", "2,1", "1,1,1", "2,0,1"] {
            for e in Execution::all(&rc(counter)) {
                let z = exec_to_poset(&e);
                assert!(poset_validate(&z), "{e}");
                assert_eq!(poset_to_exec(&z).unwrap(), e);
            }
        }
        let partial = exec_to_poset(&exec("1,1", &[&[0], &[1]])).ideal(&[0].into()).unwrap();
        assert!(poset_to_exec(&partial).is_err());
    }

    #[test]
    fn facets_map_like_executions() {
        let r = rc("2,1");
        for e in Execution::all(&r) {
            assert_eq!(witness_to_poset(&e.to_facet(), &r).unwrap(), exec_to_poset(&e));
        }
    }

    #[test]
    fn structures_round_trip() {
        for counter in ["1,1", "2,1", "1,1,1", "0,1,1"] {
            let r = rc(counter);
            for s in Complex::build(&r).unwrap().simplices() {
                let z = witness_to_poset(s, &r).unwrap();
                assert!(poset_validate(&z), "{s}");
                assert_eq!(z.active(), s.active_set());
                assert_eq!(poset_to_witness(&z).unwrap(), *s, "{s}");
            }
        }
    }

    #[test]
    fn ghosting_is_taking_ideals() {
        let r = rc("1,1");
        for s in Complex::build(&r).unwrap().simplices() {
            let z = witness_to_poset(s, &r).unwrap();
            let active: Vec<ProcessId> = s.active_set().into_iter().collect();
            for mask in 0u32..1 << active.len() {
                let ghosted: ProcessSet = active
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p)
                    .collect();
                let kept = s.active_set().difference(&ghosted).copied().collect();
                let lhs = witness_to_poset(&s.ghost(&ghosted).unwrap(), &r).unwrap();
                assert_eq!(lhs, z.ideal(&kept).unwrap(), "{s} minus {ghosted:?}");
            }
        }
    }

    #[test]
    fn ideals_nest() {
        let c = build_c(&rc("1,1"), &Limits::default()).unwrap();
        for z in c.posets() {
            assert_eq!(z.ideal(&z.active()).unwrap(), *z);
            let a = z.active();
            for b in [ProcessSet::new(), [0].into(), [1].into(), a.clone()] {
                if b.is_subset(&a) {
                    for sub in [ProcessSet::new(), [0].into(), [1].into()] {
                        if sub.is_subset(&b) {
                            assert_eq!(z.ideal(&b).unwrap().ideal(&sub).unwrap(), z.ideal(&sub).unwrap());
                        }
                    }
                }
            }
        }
        let z = c.facets().next().unwrap();
        assert!(z.ideal(&[2].into()).is_err());
    }

    #[test]
    fn the_complex_of_posets() {
        let c = build_c(&rc("1,1"), &Limits::default()).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.posets().filter(|z| z.all_present()).count(), 5);
        assert_eq!(c.facets().count(), 3);
        for counter in ["1,1", "2,1", "1,1,1"] {
            let r = rc(counter);
            let c = build_c(&r, &Limits::default()).unwrap();
            let p = Complex::build(&r).unwrap();
            assert_eq!(c.f_vector(), p.f_vector(), "{counter}");
            assert!(c.posets().all(poset_validate));
            assert!(c.vertices().all(|z| z.active().len() == 1));
        }
    }

    #[test]
    fn local_view() {
        let z = exec_to_poset(&exec("1,1", &[&[0], &[1]]));
        let view = z.ideal(&[0].into()).unwrap();
        let expected: BTreeSet<Token> = [(0, 0), (0, 1)].into();
        assert_eq!(*view.elements(), expected);
        assert_eq!(poset_to_witness(&view).unwrap(), ws("0|1;0|"));
    }

    #[test]
    fn json() {
        let z = exec_to_poset(&exec("1,1", &[&[0], &[1]]));
        let text = z.to_json().unwrap();
        assert!(text.starts_with("{\"elements\":[[0,0],[0,1],[1,0],[1,1]],\"relation\":[[[0,1],[0,0]]"));
        assert_eq!(WitnessPoset::from_json(&rc("1,1"), &text).unwrap(), z);
        assert!(WitnessPoset::from_json(&rc("1,1"), "{\"elements\":[[0,0],[0,1]],\"relation\":[]}").is_err());
    }
}
