// SPDX-License-Identifier: Apache-2.0

//! Two-level covers: canonical sum of products, Quine–McCluskey prime
//! generation, and essential-then-greedy cover selection.

use std::collections::{BTreeMap, BTreeSet};

use super::table::{TruthTable, MAX_MINIMIZE_INPUTS};
use super::LogicError;

/// A product term over `n` inputs. Bit `n-1-j` of both masks corresponds
/// to input position `j`, matching minterm indices. A care bit of 1 means
/// the literal is present; its polarity is the corresponding value bit.
/// Don't-care positions carry value 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Implicant {
    pub care: u32,
    pub values: u32,
}

impl Implicant {
    pub fn from_minterm(minterm: u32, input_count: usize) -> Implicant {
        Implicant {
            care: (1u32 << input_count) - 1,
            values: minterm,
        }
    }

    pub fn covers(&self, minterm: u32) -> bool {
        minterm & self.care == self.values
    }

    pub fn literal_count(&self) -> u32 {
        self.care.count_ones()
    }

    /// Combines two implicants with equal care masks whose values differ
    /// in exactly one cared bit.
    pub fn combine(&self, other: &Implicant) -> Option<Implicant> {
        if self.care != other.care {
            return None;
        }
        let diff = self.values ^ other.values;
        if diff.count_ones() != 1 {
            return None;
        }
        Some(Implicant {
            care: self.care & !diff,
            values: self.values & !diff,
        })
    }

    /// All minterms covered over `input_count` variables.
    pub fn minterms(&self, input_count: usize) -> Vec<u32> {
        let all = 1u32 << input_count;
        (0..all).filter(|&m| self.covers(m)).collect()
    }

    /// Literal form like `A'BC`. The tautology (empty care mask) renders
    /// as `1`.
    pub fn literal_string(&self, inputs: &[String]) -> String {
        if self.care == 0 {
            return "1".to_string();
        }
        let n = inputs.len();
        let mut out = String::new();
        for (j, name) in inputs.iter().enumerate() {
            let bit = 1u32 << (n - 1 - j);
            if self.care & bit != 0 {
                out.push_str(name);
                if self.values & bit == 0 {
                    out.push('\'');
                }
            }
        }
        out
    }
}

/// An ordered list of implicants for one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SopCover {
    pub input_count: usize,
    pub implicants: Vec<Implicant>,
}

impl SopCover {
    pub fn evaluate(&self, minterm: u32) -> bool {
        self.implicants.iter().any(|i| i.covers(minterm))
    }

    pub fn literal_count(&self) -> u32 {
        self.implicants.iter().map(Implicant::literal_count).sum()
    }

    pub fn product_count(&self) -> usize {
        self.implicants.len()
    }

    /// Sum-of-products form like `A'BC + AB'C`. Empty covers render `0`.
    pub fn sop_string(&self, inputs: &[String]) -> String {
        if self.implicants.is_empty() {
            return "0".to_string();
        }
        self.implicants
            .iter()
            .map(|i| i.literal_string(inputs))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// One full-care implicant per minterm, in ascending minterm order.
pub fn canonical_sop(table: &TruthTable, output: &str) -> SopCover {
    let n = table.input_count();
    let implicants = table
        .on_set(output)
        .iter()
        .map(|&m| Implicant::from_minterm(m, n))
        .collect();
    SopCover {
        input_count: n,
        implicants,
    }
}

/// Exactly the prime implicants of `output`, by iterated pairwise
/// combination of adjacent implicants.
pub fn qm_primes(table: &TruthTable, output: &str) -> Result<BTreeSet<Implicant>, LogicError> {
    let n = table.input_count();
    if n > MAX_MINIMIZE_INPUTS {
        return Err(LogicError::Size {
            inputs: n,
            limit: MAX_MINIMIZE_INPUTS,
        });
    }
    let mut current: BTreeSet<Implicant> = canonical_sop(table, output)
        .implicants
        .into_iter()
        .collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        // Group by popcount of cared values; only adjacent groups combine.
        let mut groups: BTreeMap<u32, Vec<Implicant>> = BTreeMap::new();
        for imp in &current {
            groups
                .entry(imp.values.count_ones())
                .or_default()
                .push(*imp);
        }
        let mut combined_from: BTreeSet<Implicant> = BTreeSet::new();
        let mut next: BTreeSet<Implicant> = BTreeSet::new();
        for (&ones, group) in &groups {
            if let Some(higher) = groups.get(&(ones + 1)) {
                for a in group {
                    for b in higher {
                        if let Some(merged) = a.combine(b) {
                            combined_from.insert(*a);
                            combined_from.insert(*b);
                            next.insert(merged);
                        }
                    }
                }
            }
        }
        for imp in &current {
            if !combined_from.contains(imp) {
                primes.insert(*imp);
            }
        }
        current = next;
    }
    Ok(primes)
}

/// Essential primes first, then greedy covering by (most uncovered
/// minterms, fewest literals, lexicographically smallest (care, values)).
pub fn select_cover(primes: &BTreeSet<Implicant>, table: &TruthTable, output: &str) -> SopCover {
    let n = table.input_count();
    let on_set = table.on_set(output);

    let mut cover: Vec<Implicant> = Vec::new();
    let mut covered: BTreeSet<u32> = BTreeSet::new();

    let mut essentials: BTreeSet<Implicant> = BTreeSet::new();
    for &m in on_set {
        let covering: Vec<&Implicant> = primes.iter().filter(|p| p.covers(m)).collect();
        if covering.len() == 1 {
            essentials.insert(*covering[0]);
        }
    }
    for prime in &essentials {
        cover.push(*prime);
        covered.extend(prime.minterms(n).into_iter().filter(|m| on_set.contains(m)));
    }

    while covered.len() < on_set.len() {
        let best = primes
            .iter()
            .filter(|p| !cover.contains(p))
            .map(|p| {
                let gain = p
                    .minterms(n)
                    .into_iter()
                    .filter(|m| on_set.contains(m) && !covered.contains(m))
                    .count();
                (p, gain)
            })
            .filter(|&(_, gain)| gain > 0)
            .max_by(|(a, ga), (b, gb)| {
                ga.cmp(gb)
                    .then(b.literal_count().cmp(&a.literal_count()))
                    .then(b.cmp(a))
            })
            .map(|(p, _)| *p)
            .expect("primes cover the on-set");
        cover.push(best);
        covered.extend(best.minterms(n).into_iter().filter(|m| on_set.contains(m)));
    }

    let result = SopCover {
        input_count: n,
        implicants: cover,
    };
    // Minimization soundness: the cover must equal the function pointwise.
    for m in 0..table.row_count() {
        assert_eq!(
            result.evaluate(m),
            on_set.contains(&m),
            "cover diverges from `{output}` on minterm {m}"
        );
    }
    result
}

/// Convenience pipeline: primes then cover selection.
pub fn minimize(table: &TruthTable, output: &str) -> Result<SopCover, LogicError> {
    let primes = qm_primes(table, output)?;
    Ok(select_cover(&primes, table, output))
}
