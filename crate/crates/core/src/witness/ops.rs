//! Stabilization, stabilization modulo a set, canonical form and ghosting.

use super::{Layer, StructureClass, TraceForm, WitnessPrestructure};
use crate::error::{Error, Result};
use crate::ProcessSet;

impl WitnessPrestructure {
    /// Truncates every trace at the last round still witnessed by an active
    /// process (round 0 when nothing is active). The result is stable, and a
    /// stable input is returned unchanged.
    pub fn stabilize(&self) -> Result<Self> {
        self.require(StructureClass::Prestructure)?;
        let mut tf = self.trace_form_unchecked();
        let q = tf.max_active_round().unwrap_or(0);
        tf.truncate(q);
        Ok(tf.into_prestructure())
    }

    /// Moves `set ⊆ A(σ)` into the ghost set and truncates every trace at the
    /// last round witnessed by a remaining active process.
    pub fn stabilize_mod(&self, set: &ProcessSet) -> Result<Self> {
        self.require(StructureClass::Prestructure)?;
        let tf = self.trace_form_unchecked();
        if !set.is_subset(&tf.active) {
            return Err(Error::Precondition(format!(
                "{{{}}} is not a subset of the active set of {self}",
                super::format_set(set)
            )));
        }
        Ok(stabilized_mod(tf, set).into_prestructure())
    }

    /// Deletes empty `W` columns, merging their ghost content into the next
    /// nonempty column. Requires a stable prestructure; the result is a witness
    /// structure.
    pub fn canonical_form(&self) -> Result<Self> {
        self.require(StructureClass::StablePrestructure)?;
        Ok(self.canonical_form_unchecked())
    }

    pub(crate) fn canonical_form_unchecked(&self) -> Self {
        let layers = self.layers();
        let mut out = Vec::with_capacity(layers.len());
        out.push(layers[0].clone());
        let mut pending = ProcessSet::new();
        for layer in &layers[1..] {
            pending.extend(layer.ghosts.iter().copied());
            if !layer.seen.is_empty() {
                out.push(Layer::new(layer.seen.clone(), std::mem::take(&mut pending)));
            }
        }
        debug_assert!(pending.is_empty(), "input was not stable");
        WitnessPrestructure::from_layers(out)
    }

    /// `Γ_S(σ) = C(st_S(σ))`, the face of `σ` obtained by ghosting `set`.
    pub fn ghost(&self, set: &ProcessSet) -> Result<Self> {
        self.require(StructureClass::WitnessStructure)?;
        let tf = self.trace_form_unchecked();
        if !set.is_subset(&tf.active) {
            return Err(Error::Precondition(format!(
                "{{{}}} is not a subset of the active set of {self}",
                super::format_set(set)
            )));
        }
        Ok(stabilized_mod(tf, set)
            .into_prestructure()
            .canonical_form_unchecked())
    }

    /// Ghosting for callers that already know `self` is a witness structure and
    /// `set ⊆ A(self)`.
    pub(crate) fn ghost_unchecked(&self, set: &ProcessSet) -> Self {
        if set.is_empty() {
            return self.clone();
        }
        stabilized_mod(self.trace_form_unchecked(), set)
            .into_prestructure()
            .canonical_form_unchecked()
    }
}

fn stabilized_mod(mut tf: TraceForm, set: &ProcessSet) -> TraceForm {
    for p in set {
        tf.active.remove(p);
        tf.ghosts.insert(*p);
    }
    let q = tf.max_active_round().unwrap_or(0);
    tf.truncate(q);
    tf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::fixtures::*;
    use crate::ProcessId;

    fn set(xs: &[ProcessId]) -> ProcessSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn stabilizes_the_worked_table() {
        let s = ws("0,1,2,3,4|;1|;0,3,4|;2,3|;1|3;1|2;|1");
        assert_eq!(s.classify(), StructureClass::Prestructure);
        assert_eq!(s.stabilize().unwrap(), ws("0,1,3,4|2;|1;0,4|3"));
    }

    #[test]
    fn stabilize_fixes_stable_and_empty() {
        assert_eq!(sigma2().stabilize().unwrap(), sigma2());
        assert_eq!(sigma3().stabilize().unwrap(), sigma3());
        let two_active = ws("0,1|;0|;1|");
        assert_eq!(two_active.stabilize().unwrap(), two_active);
        assert_eq!(ws("|0").stabilize().unwrap(), ws("|0"));
    }

    #[test]
    fn stabilize_mod_examples() {
        let s = ws("0,1,2,3|;3|;1,2|;3|0;3|1");
        assert_eq!(
            s.stabilize_mod(&set(&[3])).unwrap(),
            ws("1,2,3|0;|3;2|1")
        );
        assert_eq!(sigma3().stabilize_mod(&set(&[])).unwrap(), sigma3());
        assert_eq!(s.stabilize_mod(&set(&[])).unwrap(), s);
        // ghosting everything collapses to round 0 with every process a ghost
        assert_eq!(
            s.stabilize_mod(&set(&[2, 3])).unwrap(),
            WitnessPrestructure::empty(set(&[0, 1, 2, 3]))
        );
        assert!(s.stabilize_mod(&set(&[0])).is_err());
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(sigma2().canonical_form().unwrap(), sigma3());
        assert_eq!(sigma3().canonical_form().unwrap(), sigma3());
        assert_eq!(
            ws("1,2,3|0;|3;2|1").canonical_form().unwrap(),
            ws("1,2,3|0;2|1,3")
        );
        assert!(matches!(
            sigma1().canonical_form(),
            Err(Error::WrongClass { .. })
        ));
    }

    #[test]
    fn ghosting_examples() {
        let s = ws("0,1,2,3|;3|;1,2|;3|0;3|1");
        assert_eq!(s.ghost(&set(&[3])).unwrap(), ws("1,2,3|0;2|1,3"));
        assert_eq!(s.ghost(&set(&[])).unwrap(), s);
        assert_eq!(
            ws("0,1|;0,1|").ghost(&set(&[1])).unwrap(),
            ws("0,1|;0|1")
        );
        assert!(sigma2().ghost(&set(&[1])).is_err());
        assert!(sigma3().ghost(&set(&[0])).is_err());
        let empty = ws("|0,1");
        assert_eq!(empty.ghost(&set(&[])).unwrap(), empty);
    }

    /// Recursive characterization of `st_S`, peeling the last column.
    fn stabilize_mod_recursive(sigma: &WitnessPrestructure, s: &ProcessSet) -> WitnessPrestructure {
        let layers = sigma.layers();
        let t = layers.len() - 1;
        if t == 0 {
            let l = &layers[0];
            let seen = l.seen.difference(s).copied().collect();
            let ghosts = l.ghosts.union(s).copied().collect();
            return WitnessPrestructure::from_layers(vec![Layer::new(seen, ghosts)]);
        }
        let last = &layers[t];
        if last.seen.is_subset(s) {
            let prefix = WitnessPrestructure::from_layers(layers[..t].to_vec());
            let widened = s.union(&last.ghosts).copied().collect();
            return stabilize_mod_recursive(&prefix, &widened);
        }
        let mut tf = sigma.trace_form_unchecked();
        for p in s {
            tf.active.remove(p);
            tf.ghosts.insert(*p);
        }
        tf.into_prestructure()
    }

    /// Column-wise closed form of `st_S` via the sets `J_i`.
    fn stabilize_mod_columns(sigma: &WitnessPrestructure, s: &ProcessSet) -> WitnessPrestructure {
        let layers = sigma.layers();
        let remaining: ProcessSet = sigma.active_set().difference(s).copied().collect();
        let q = (0..layers.len())
            .rev()
            .find(|&i| !layers[i].seen.is_disjoint(&remaining))
            .unwrap_or(0);
        let moved: ProcessSet = s.union(&sigma.ghost_set()).copied().collect();
        let out = (0..=q)
            .map(|i| {
                let later: ProcessSet = layers[i + 1..=q].iter().flat_map(Layer::union).collect();
                let j: ProcessSet = layers[i]
                    .seen
                    .iter()
                    .filter(|p| moved.contains(p) && !later.contains(p))
                    .copied()
                    .collect();
                Layer::new(
                    layers[i].seen.difference(&j).copied().collect(),
                    layers[i].ghosts.union(&j).copied().collect(),
                )
            })
            .collect();
        WitnessPrestructure::from_layers(out)
    }

    fn trace_len(sigma: &WitnessPrestructure, p: ProcessId) -> usize {
        sigma.trace(p).unwrap().len()
    }

    mod laws {
        use super::*;
        use crate::witness::strategies::{self, subset};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(400))]

            #[test]
            fn stabilize_is_idempotent_and_stable(s in strategies::prestructure(5, 6)) {
                let st = s.stabilize().unwrap();
                prop_assert!(st.classify() >= StructureClass::StablePrestructure);
                prop_assert_eq!(st.stabilize().unwrap(), st.clone());
                if s.classify() >= StructureClass::StablePrestructure {
                    prop_assert_eq!(st, s);
                }
            }

            #[test]
            fn stabilize_mod_matches_oracles(s in strategies::prestructure(5, 6), mask in any::<u32>()) {
                let set = subset(&s.active_set(), mask);
                let st = s.stabilize_mod(&set).unwrap();
                prop_assert_eq!(&st, &stabilize_mod_recursive(&s, &set));
                prop_assert_eq!(&st, &stabilize_mod_columns(&s, &set));
                prop_assert!(st.classify() >= StructureClass::StablePrestructure);
            }

            #[test]
            fn stabilize_mod_composes(s in strategies::prestructure(5, 6), a in any::<u32>(), b in any::<u32>()) {
                let active = s.active_set();
                let first = subset(&active, a);
                let rest: ProcessSet = active.difference(&first).copied().collect();
                let second = subset(&rest, b);
                let both: ProcessSet = first.union(&second).copied().collect();
                let lhs = s.stabilize_mod(&first).unwrap().stabilize_mod(&second).unwrap();
                prop_assert_eq!(lhs, s.stabilize_mod(&both).unwrap());
            }

            #[test]
            fn canonical_form_commutes_with_stabilize_mod(s in strategies::stable_prestructure(5, 5), mask in any::<u32>()) {
                prop_assert!(s.classify() >= StructureClass::StablePrestructure);
                let set = subset(&s.active_set(), mask);
                let c = s.canonical_form().unwrap();
                prop_assert_eq!(c.classify(), StructureClass::WitnessStructure);
                let lhs = c.stabilize_mod(&set).unwrap().canonical_form().unwrap();
                let rhs = s.stabilize_mod(&set).unwrap().canonical_form().unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn ghosting_composes(s in strategies::witness_structure(5, 6), a in any::<u32>(), b in any::<u32>()) {
                let active = s.active_set();
                let first = subset(&active, a);
                let rest: ProcessSet = active.difference(&first).copied().collect();
                let second = subset(&rest, b);
                let both: ProcessSet = first.union(&second).copied().collect();
                let lhs = s.ghost(&first).unwrap().ghost(&second).unwrap();
                prop_assert_eq!(&lhs, &s.ghost(&both).unwrap());
                prop_assert_eq!(lhs.classify(), StructureClass::WitnessStructure);
                prop_assert_eq!(s.ghost_unchecked(&both), lhs);
            }

            #[test]
            fn ghosting_one_process_never_lengthens_traces(s in strategies::witness_structure(5, 6), pick in any::<usize>()) {
                let active: Vec<ProcessId> = s.active_set().into_iter().collect();
                prop_assume!(!active.is_empty());
                let p = active[pick % active.len()];
                let g = s.ghost(&[p].into()).unwrap();
                let t = s.last_round();
                let sole_last = s.layers()[t].seen == ProcessSet::from([p]);
                for q in s.support() {
                    prop_assert!(trace_len(&g, q) <= trace_len(&s, q));
                    if !sole_last {
                        prop_assert_eq!(trace_len(&g, q), trace_len(&s, q));
                    }
                }
            }
        }
    }
}

