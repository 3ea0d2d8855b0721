//! Exact enumeration over finite outcome grids for event functionals.
//!
//! A deterministic assignment fixes one outcome index per (site, setting),
//! shared across all terms; that sharing is the hidden-variable coupling.
//! Assignments are mixed-radix numbers with one digit per slot in
//! site-major, setting-minor order, so the enumeration index is itself the
//! lexicographic key.

use crate::error::{Error, Result};
use crate::scenario::EventFunctional;

use super::scan::ChunkBest;

/// One outcome index per (site, setting).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridAssignment {
    outcomes: Vec<Vec<usize>>,
}

impl GridAssignment {
    pub fn from_outcomes(f: &EventFunctional, outcomes: Vec<Vec<usize>>) -> Result<Self> {
        let scenario = f.scenario();
        if outcomes.len() != scenario.parties()
            || outcomes
                .iter()
                .zip(scenario.settings())
                .any(|(row, &s)| row.len() != s)
        {
            return Err(Error::DimensionMismatch(
                "one outcome index per (site, setting) is required".into(),
            ));
        }
        for (n, row) in outcomes.iter().enumerate() {
            for (s, &o) in row.iter().enumerate() {
                let alphabet = scenario.alphabet_size(n, s);
                if o >= alphabet {
                    return Err(Error::Validation {
                        path: format!("assignment[{}][{}]", n + 1, s + 1),
                        message: format!("outcome index {o} out of range 0..{alphabet}"),
                    });
                }
            }
        }
        Ok(GridAssignment { outcomes })
    }

    pub fn outcome(&self, site: usize, setting: usize) -> usize {
        self.outcomes[site][setting]
    }

    pub fn outcomes(&self) -> &[Vec<usize>] {
        &self.outcomes
    }
}

struct GridTerm {
    gamma: f64,
    /// slot of (site n, settings[n]) for each site
    site_slots: Vec<u32>,
    /// mixed-radix strides over this term's per-site alphabets
    site_strides: Vec<u64>,
    /// sorted codes of the outcome tuples in the event
    codes: Vec<u64>,
}

impl GridTerm {
    #[inline]
    fn value(&self, digits: &[u32]) -> f64 {
        let mut code = 0u64;
        for (&slot, &stride) in self.site_slots.iter().zip(&self.site_strides) {
            code += digits[slot as usize] as u64 * stride;
        }
        if self.codes.binary_search(&code).is_ok() {
            self.gamma
        } else {
            0.0
        }
    }
}

pub(crate) struct CompiledGrid {
    radices: Vec<u64>,
    strides: Vec<u64>,
    terms: Vec<GridTerm>,
    slot_terms: Vec<Vec<u32>>,
    pub total: u128,
}

impl CompiledGrid {
    pub fn compile(f: &EventFunctional) -> Self {
        let scenario = f.scenario();
        let mut radices = Vec::new();
        let mut slot_of = vec![Vec::new(); scenario.parties()];
        for n in 0..scenario.parties() {
            for s in 0..scenario.settings()[n] {
                slot_of[n].push(radices.len());
                radices.push(scenario.alphabet_size(n, s) as u64);
            }
        }
        let total: u128 = radices.iter().map(|&r| r as u128).product();
        let mut strides = vec![1u64; radices.len()];
        if total <= u64::MAX as u128 {
            for i in (0..radices.len().saturating_sub(1)).rev() {
                strides[i] = strides[i + 1] * radices[i + 1];
            }
        }
        let mut terms = Vec::with_capacity(f.terms().len());
        let mut slot_terms = vec![Vec::new(); radices.len()];
        for term in f.terms() {
            let id = terms.len() as u32;
            let site_slots: Vec<u32> = term
                .settings
                .iter()
                .enumerate()
                .map(|(n, &s)| slot_of[n][s] as u32)
                .collect();
            let mut site_strides = vec![1u64; scenario.parties()];
            for n in (0..scenario.parties().saturating_sub(1)).rev() {
                site_strides[n] = site_strides[n + 1]
                    * scenario.alphabet_size(n + 1, term.settings[n + 1]) as u64;
            }
            let mut codes: Vec<u64> = term
                .outcomes
                .iter()
                .map(|tuple| {
                    tuple
                        .iter()
                        .zip(&site_strides)
                        .map(|(&o, &st)| o as u64 * st)
                        .sum()
                })
                .collect();
            codes.sort_unstable();
            for &slot in &site_slots {
                slot_terms[slot as usize].push(id);
            }
            terms.push(GridTerm {
                gamma: term.gamma,
                site_slots,
                site_strides,
                codes,
            });
        }
        CompiledGrid {
            radices,
            strides,
            terms,
            slot_terms,
            total,
        }
    }

    fn decode(&self, index: u64) -> Vec<u32> {
        self.radices
            .iter()
            .zip(&self.strides)
            .map(|(&r, &st)| ((index / st) % r) as u32)
            .collect()
    }

    pub fn eval_index(&self, index: u64) -> f64 {
        let digits = self.decode(index);
        self.terms.iter().map(|t| t.value(&digits)).sum()
    }

    pub fn scan_range(&self, range: std::ops::Range<u64>) -> ChunkBest {
        let mut digits = self.decode(range.start);
        let mut contrib: Vec<f64> = self.terms.iter().map(|t| t.value(&digits)).collect();
        let mut value: f64 = contrib.iter().sum();
        let mut best = ChunkBest::seed(value, range.start as u128, range.start);
        let mut stamp = vec![0u64; self.terms.len()];
        let mut changed = Vec::with_capacity(self.radices.len());
        for i in range.start + 1..range.end {
            // advance the odometer fully before touching any term: a term
            // may straddle a wrapped slot and the slot that absorbs the carry
            changed.clear();
            let mut slot = self.radices.len() - 1;
            loop {
                digits[slot] += 1;
                changed.push(slot);
                if digits[slot] as u64 != self.radices[slot] {
                    break;
                }
                digits[slot] = 0;
                slot -= 1;
            }
            for &slot in &changed {
                for &t in &self.slot_terms[slot] {
                    if stamp[t as usize] != i {
                        stamp[t as usize] = i;
                        let new = self.terms[t as usize].value(&digits);
                        value += new - contrib[t as usize];
                        contrib[t as usize] = new;
                    }
                }
            }
            best.consider(value, || i as u128, i);
        }
        best
    }

    /// Per-site outcome index vectors for the assignment at `index`.
    pub fn outcomes_at(&self, f: &EventFunctional, index: u64) -> Vec<Vec<usize>> {
        let digits = self.decode(index);
        let scenario = f.scenario();
        let mut out = Vec::with_capacity(scenario.parties());
        let mut slot = 0;
        for n in 0..scenario.parties() {
            out.push(
                (0..scenario.settings()[n])
                    .map(|_| {
                        let d = digits[slot] as usize;
                        slot += 1;
                        d
                    })
                    .collect(),
            );
        }
        out
    }

    #[cfg(test)]
    pub fn index_of(&self, a: &GridAssignment) -> u64 {
        let mut index = 0u64;
        let mut slot = 0;
        for row in a.outcomes() {
            for &o in row {
                index += o as u64 * self.strides[slot];
                slot += 1;
            }
        }
        index
    }
}
