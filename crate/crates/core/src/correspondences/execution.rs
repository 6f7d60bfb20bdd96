//! Protocol executions `(W_1, ..., W_t)`: in round `i` the processes of `W_i`
//! write and then snapshot the memory.

use crate::complex::{facets, is_simplex_of};
use crate::error::{Error, Result};
use crate::round_counter::RoundCounter;
use crate::witness::{format_set, parse_set, Simplex};
use crate::{ProcessId, ProcessSet};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Execution {
    counter: RoundCounter,
    rounds: Vec<ProcessSet>,
}

impl Execution {
    /// Checks that rounds are nonempty and that every process runs exactly
    /// its budget.
    pub fn new(counter: RoundCounter, rounds: Vec<ProcessSet>) -> Result<Self> {
        let support = counter.support();
        for round in &rounds {
            if round.is_empty() {
                return Err(Error::InvalidExecution("empty round".into()));
            }
            if let Some(p) = round.iter().find(|p| !support.contains(p)) {
                return Err(Error::NotInSupport(*p));
            }
        }
        for (&p, &budget) in counter.budgets() {
            let runs = rounds.iter().filter(|r| r.contains(&p)).count();
            if runs != budget as usize {
                return Err(Error::InvalidExecution(format!(
                    "process {p} runs {runs} times, budget is {budget}"
                )));
            }
        }
        Ok(Execution { counter, rounds })
    }

    pub fn counter(&self) -> &RoundCounter {
        &self.counter
    }

    pub fn rounds(&self) -> &[ProcessSet] {
        &self.rounds
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// `M(p, k)`: how often `p` runs in rounds `1..=k`.
    pub fn prefix_count(&self, p: ProcessId, k: usize) -> Result<u32> {
        if self.counter.get(p).is_none() {
            return Err(Error::NotInSupport(p));
        }
        if k > self.rounds.len() {
            return Err(Error::Precondition(format!(
                "round {k} beyond the {} rounds of the execution",
                self.rounds.len()
            )));
        }
        Ok(self.rounds[..k].iter().filter(|r| r.contains(&p)).count() as u32)
    }

    /// `ρ(p, k)`: the round of the `k`-th run of `p`, `k ≥ 1`.
    pub fn occurrence(&self, p: ProcessId, k: u32) -> Result<usize> {
        if self.counter.get(p).is_none() {
            return Err(Error::NotInSupport(p));
        }
        if k == 0 {
            return Err(Error::Precondition("occurrences are counted from 1".into()));
        }
        self.rounds
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(&p))
            .nth(k as usize - 1)
            .map(|(i, _)| i + 1)
            .ok_or_else(|| Error::Precondition(format!("process {p} runs fewer than {k} times")))
    }

    /// Parses rounds joined by `;`, e.g. `0,1;0`; `-` is the empty execution.
    pub fn parse(counter: &RoundCounter, text: &str) -> Result<Self> {
        let text = text.trim();
        let rounds = if text == "-" || text.is_empty() {
            Vec::new()
        } else {
            text.split(';').map(parse_set).collect::<Result<_>>()?
        };
        Execution::new(counter.clone(), rounds)
    }

    /// The facet `(supp, W_1, ..., W_t)` of `P(r)`.
    pub fn to_facet(&self) -> Simplex {
        Simplex::facet(self.counter.support(), &self.rounds)
    }

    pub fn from_facet(s: &Simplex, counter: &RoundCounter) -> Result<Self> {
        if !is_simplex_of(s, counter) || !s.ghost_set().is_empty() {
            return Err(Error::InvalidExecution(format!("{s} is not a facet of P{counter}")));
        }
        Execution::new(
            counter.clone(),
            s.layers()[1..].iter().map(|l| l.seen.clone()).collect(),
        )
    }

    /// Every execution for `counter`.
    pub fn all(counter: &RoundCounter) -> Vec<Execution> {
        facets(counter)
            .iter()
            .map(|f| Execution::from_facet(f, counter).expect("facets are executions"))
            .collect()
    }
}

impl std::fmt::Display for Execution {
    /// Rounds joined by `;`, e.g. `0,1;0`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.rounds.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.rounds.iter().map(format_set).collect();
        f.write_str(&parts.join(";"))
    }
}

/// `(M(p, k), ρ(p, k))`, the second part absent when `p` runs fewer than `k`
/// times.
pub fn exec_occurrence(e: &Execution, p: ProcessId, k: usize) -> Result<(u32, Option<usize>)> {
    let m = e.prefix_count(p, k)?;
    let rho = u32::try_from(k)
        .ok()
        .filter(|&k| k >= 1)
        .and_then(|k| e.occurrence(p, k).ok());
    Ok((m, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exec(budgets: &[u32], rounds: &[&[ProcessId]]) -> Execution {
        Execution::new(
            RoundCounter::dense(budgets),
            rounds.iter().map(|r| r.iter().copied().collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn occurrences() {
        let e = exec(&[2, 1], &[&[0, 1], &[0]]);
        assert_eq!(exec_occurrence(&e, 0, 2).unwrap(), (2, Some(2)));
        assert_eq!(e.occurrence(0, 1).unwrap(), 1);
        assert!(e.occurrence(1, 2).is_err());
        assert!(e.prefix_count(0, 3).is_err());
        assert!(e.prefix_count(5, 1).is_err());
        let e = exec(&[1, 1], &[&[1], &[0]]);
        assert_eq!(e.prefix_count(0, 1).unwrap(), 0);
        assert_eq!(exec_occurrence(&e, 1, 2).unwrap(), (1, None));
    }

    #[test]
    fn text_form() {
        let e = exec(&[2, 1], &[&[0, 1], &[0]]);
        assert_eq!(e.to_string(), "0,1;0");
        assert_eq!(Execution::parse(e.counter(), "0,1;0").unwrap(), e);
        let idle = RoundCounter::dense(&[0, 0]);
        assert_eq!(Execution::parse(&idle, "-").unwrap().to_string(), "-");
        assert!(Execution::parse(e.counter(), "0;0").is_err());
    }

    #[test]
    fn validation() {
        let r = RoundCounter::dense(&[1, 1]);
        assert!(Execution::new(r.clone(), vec![[0].into()]).is_err());
        assert!(Execution::new(r.clone(), vec![[0, 1].into(), ProcessSet::new()]).is_err());
        assert!(Execution::new(r, vec![[0, 2].into()]).is_err());
    }

    #[test]
    fn facets_round_trip() {
        let r = RoundCounter::dense(&[2, 1, 1]);
        for e in Execution::all(&r) {
            assert_eq!(Execution::from_facet(&e.to_facet(), &r).unwrap(), e);
        }
    }

    proptest! {
        #[test]
        fn occurrence_laws(budgets in prop::collection::vec(0u32..4, 1..4), pick in any::<usize>()) {
            let r = RoundCounter::dense(&budgets);
            let all = Execution::all(&r);
            let e = &all[pick % all.len()];
            for (&p, &b) in r.budgets() {
                for k in 1..b {
                    prop_assert!(e.occurrence(p, k + 1).unwrap() > e.occurrence(p, k).unwrap());
                }
                for k in 1..=b {
                    let rho = e.occurrence(p, k).unwrap();
                    prop_assert_eq!(e.prefix_count(p, rho).unwrap(), k);
                }
                for k in 1..=e.len() {
                    prop_assert!(e.prefix_count(p, k).unwrap() >= e.prefix_count(p, k - 1).unwrap());
                    if e.rounds()[k - 1].contains(&p) {
                        let m = e.prefix_count(p, k).unwrap();
                        prop_assert_eq!(e.occurrence(p, m).unwrap(), k);
                    }
                }
            }
        }
    }
}
