//! Facet counts of `P(r)` without building the complex.
//!
//! `f(r) = Σ_{∅≠S⊆act r} f(r↓S)` with `f(r) = 1` once at most one process is
//! active. Counts depend only on the multiset of nonzero budgets, so the memo
//! is keyed by [`RoundCounter::shape`].

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::round_counter::RoundCounter;

/// Memo table of facet counts, shareable across threads.
#[derive(Debug, Default)]
pub struct CountTable {
    memo: RwLock<HashMap<Vec<u32>, BigUint>>,
}

impl CountTable {
    pub fn new() -> Self {
        CountTable::default()
    }

    pub fn count(&self, counter: &RoundCounter) -> BigUint {
        self.count_shape(counter.shape())
    }

    /// Count for a budget list in any order; zeros are ignored.
    pub fn count_budgets(&self, budgets: &[u32]) -> BigUint {
        self.count(&RoundCounter::dense(budgets))
    }

    fn count_shape(&self, shape: Vec<u32>) -> BigUint {
        if shape.len() <= 1 {
            return BigUint::one();
        }
        if let Some(v) = self.memo.read().expect("memo lock").get(&shape) {
            return v.clone();
        }
        let n = shape.len();
        let mut total = BigUint::zero();
        for mask in 1u64..1 << n {
            let mut next: Vec<u32> = shape
                .iter()
                .enumerate()
                .map(|(i, &b)| if mask & (1 << i) != 0 { b - 1 } else { b })
                .filter(|&b| b > 0)
                .collect();
            next.sort_unstable_by(|a, b| b.cmp(a));
            total += self.count_shape(next);
        }
        self.memo
            .write()
            .expect("memo lock")
            .insert(shape, total.clone());
        total
    }

    pub fn len(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn shared_table() -> &'static CountTable {
    static TABLE: OnceLock<CountTable> = OnceLock::new();
    TABLE.get_or_init(CountTable::new)
}

/// Number of facets of `P(counter)`.
pub fn count_facets(counter: &RoundCounter) -> BigUint {
    shared_table().count(counter)
}

/// `f(m, n)` by the two-variable recursion
/// `f(m, n) = f(m, n−1) + f(m−1, n) + f(m−1, n−1)`.
pub fn count_facets_2d(m: u32, n: u32) -> BigUint {
    let (m, n) = (m as usize, n as usize);
    let mut row: Vec<BigUint> = vec![BigUint::one(); n + 1];
    for _ in 1..=m {
        let mut next = vec![BigUint::one(); n + 1];
        for j in 1..=n {
            next[j] = &next[j - 1] + &row[j] + &row[j - 1];
        }
        row = next;
    }
    row.swap_remove(n)
}

/// Checks `F · (1 − Σ_{∅≠S⊆[vars]} Π_{j∈S} x_j) = 1` on every monomial of
/// total degree at most `max_degree`, where `F = Σ f(α) x^α`.
pub fn verify_generating_function(max_degree: u32, vars: usize) -> bool {
    let table = shared_table();
    monomials(vars, max_degree).into_iter().all(|alpha| {
        let mut coeff = BigInt::from(table.count_budgets(&alpha));
        for mask in 1u64..1 << vars {
            let mut shifted = alpha.clone();
            let fits = (0..vars).all(|j| {
                if mask & (1 << j) == 0 {
                    return true;
                }
                match shifted[j].checked_sub(1) {
                    Some(v) => {
                        shifted[j] = v;
                        true
                    }
                    None => false,
                }
            });
            if fits {
                coeff -= BigInt::from(table.count_budgets(&shifted));
            }
        }
        let expected = if alpha.iter().all(|&a| a == 0) {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        coeff == expected
    })
}

/// Exponent vectors in `vars` variables with total degree `≤ max_degree`.
pub fn monomials(vars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..vars {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                let used: u32 = prefix.iter().sum();
                (0..=max_degree - used).map(move |e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out
}
