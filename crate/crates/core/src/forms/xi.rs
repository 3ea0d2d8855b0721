//! Exact enumeration over block assignments for probability functionals.
//!
//! Per (site, setting) an assignment activates at most one of the Q_n event
//! blocks; the feasible set per site is the set of 0/1 vectors with at most
//! one 1 per setting block. Assignments are encoded as mixed-radix digits,
//! one digit per (site, setting) slot in site-major order: digit 0 = no
//! block, digit q = block q active.

use crate::error::{Error, Result};
use crate::scenario::ProbabilityFunctional;

use super::scan::ChunkBest;

/// One 0/1 vector per site with block structure (setting-major,
/// block-minor) and at most one active block per setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiAssignment {
    bits: Vec<Vec<u8>>,
}

impl XiAssignment {
    /// Builds from expanded per-site 0/1 vectors of length `S_n * Q_n`.
    pub fn from_bits(f: &ProbabilityFunctional, bits: Vec<Vec<u8>>) -> Result<Self> {
        let scenario = f.scenario();
        if bits.len() != scenario.parties() {
            return Err(Error::DimensionMismatch(
                "one bit vector per site is required".into(),
            ));
        }
        for (n, row) in bits.iter().enumerate() {
            let q = f.blocks_per_setting()[n];
            let expected = scenario.settings()[n] * q;
            if row.len() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "site {} expects {} components, got {}",
                    n + 1,
                    expected,
                    row.len()
                )));
            }
            for (i, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::Validation {
                        path: format!("assignment[{}][{}]", n + 1, i),
                        message: format!("components are 0/1, got {b}"),
                    });
                }
            }
            for s in 0..scenario.settings()[n] {
                let active: u8 = row[s * q..(s + 1) * q].iter().sum();
                if active > 1 {
                    return Err(Error::Validation {
                        path: format!("assignment[{}]", n + 1),
                        message: format!(
                            "setting {} activates {} blocks; at most one is allowed",
                            s + 1,
                            active
                        ),
                    });
                }
            }
        }
        Ok(XiAssignment { bits })
    }

    /// Active block index at (site, setting), if any.
    pub fn active_block(
        &self,
        f: &ProbabilityFunctional,
        site: usize,
        setting: usize,
    ) -> Option<usize> {
        let q = f.blocks_per_setting()[site];
        (0..q).find(|&b| self.bits[site][setting * q + b] == 1)
    }

    pub fn bits(&self) -> &[Vec<u8>] {
        &self.bits
    }
}

struct XiTerm {
    gamma: f64,
    /// (slot, required digit) pairs; the term contributes gamma iff all match.
    requires: Vec<(u32, u32)>,
}

/// Probability form flattened to mixed-radix slots.
pub(crate) struct CompiledXi {
    /// radix per slot = Q_n + 1
    radices: Vec<u64>,
    strides: Vec<u64>,
    /// slot -> (site, setting)
    slot_site: Vec<(usize, usize)>,
    terms: Vec<XiTerm>,
    slot_terms: Vec<Vec<u32>>,
    pub total: u128,
}

impl CompiledXi {
    pub fn compile(f: &ProbabilityFunctional) -> Self {
        let scenario = f.scenario();
        let mut radices = Vec::new();
        let mut slot_site = Vec::new();
        let mut slot_of = vec![Vec::new(); scenario.parties()];
        for n in 0..scenario.parties() {
            for s in 0..scenario.settings()[n] {
                slot_of[n].push(radices.len());
                radices.push(f.blocks_per_setting()[n] as u64 + 1);
                slot_site.push((n, s));
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
        for (key, &gamma) in f.terms() {
            let id = terms.len() as u32;
            let requires: Vec<(u32, u32)> = key
                .sites
                .iter()
                .zip(key.settings.iter().zip(&key.blocks))
                .map(|(&n, (&s, &q))| (slot_of[n][s] as u32, q as u32 + 1))
                .collect();
            for &(slot, _) in &requires {
                slot_terms[slot as usize].push(id);
            }
            terms.push(XiTerm { gamma, requires });
        }
        CompiledXi {
            radices,
            strides,
            slot_site,
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

    fn term_value(&self, term: &XiTerm, digits: &[u32]) -> f64 {
        if term
            .requires
            .iter()
            .all(|&(slot, digit)| digits[slot as usize] == digit)
        {
            term.gamma
        } else {
            0.0
        }
    }

    pub fn eval_index(&self, index: u64) -> f64 {
        let digits = self.decode(index);
        self.terms.iter().map(|t| self.term_value(t, &digits)).sum()
    }

    /// Lexicographic key over the expanded 0/1 coordinates. Within one
    /// setting the expansion orders block vectors as: none < block Q < ...
    /// < block 1, which the digit rank below reproduces.
    fn lex_key(&self, digits: &[u32]) -> u128 {
        let mut key: u128 = 0;
        for (slot, &d) in digits.iter().enumerate() {
            let radix = self.radices[slot] as u128;
            let rank = if d == 0 { 0 } else { radix - d as u128 };
            key = key * radix + rank;
        }
        key
    }

    pub fn scan_range(&self, range: std::ops::Range<u64>) -> ChunkBest {
        let mut digits = self.decode(range.start);
        let mut contrib: Vec<f64> = self
            .terms
            .iter()
            .map(|t| self.term_value(t, &digits))
            .collect();
        let mut value: f64 = contrib.iter().sum();
        let mut best = ChunkBest::seed(value, self.lex_key(&digits), range.start);
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
                        let new = self.term_value(&self.terms[t as usize], &digits);
                        value += new - contrib[t as usize];
                        contrib[t as usize] = new;
                    }
                }
            }
            best.consider(value, || self.lex_key(&digits), i);
        }
        best
    }

    /// Expanded 0/1 per-site vectors for the assignment at `index`.
    pub fn bits_at(&self, f: &ProbabilityFunctional, index: u64) -> Vec<Vec<u8>> {
        let digits = self.decode(index);
        let scenario = f.scenario();
        let mut bits: Vec<Vec<u8>> = (0..scenario.parties())
            .map(|n| vec![0u8; scenario.settings()[n] * f.blocks_per_setting()[n]])
            .collect();
        for (slot, &d) in digits.iter().enumerate() {
            if d > 0 {
                let (n, s) = self.slot_site[slot];
                bits[n][s * f.blocks_per_setting()[n] + (d as usize - 1)] = 1;
            }
        }
        bits
    }

    /// Index of an explicit assignment (inverse of `bits_at`).
    #[cfg(test)]
    pub fn index_of(&self, f: &ProbabilityFunctional, a: &XiAssignment) -> u64 {
        let mut index = 0u64;
        for (slot, &(n, s)) in self.slot_site.iter().enumerate() {
            let digit = a.active_block(f, n, s).map(|q| q as u64 + 1).unwrap_or(0);
            index += digit * self.strides[slot];
        }
        index
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::scenario::{ProbabilityKey, Scenario};

    fn two_block_functional() -> ProbabilityFunctional {
        let scenario = Arc::new(Scenario::uniform_finite(2, 2, vec![0.0, 1.0, 2.0]).unwrap());
        let events = vec![
            vec![vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
            vec![vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
        ];
        ProbabilityFunctional::new(
            scenario,
            vec![2, 2],
            events,
            [(
                ProbabilityKey {
                    sites: vec![0, 1],
                    settings: vec![0, 0],
                    blocks: vec![0, 0],
                },
                1.0,
            )],
        )
        .unwrap()
    }

    #[test]
    fn xi_assignment_rejects_two_active_blocks_per_setting() {
        let f = two_block_functional();
        assert!(XiAssignment::from_bits(&f, vec![vec![1, 1, 0, 0], vec![0; 4]]).is_err());
        let ok = XiAssignment::from_bits(&f, vec![vec![1, 0, 0, 1], vec![0, 1, 0, 0]]).unwrap();
        assert_eq!(ok.active_block(&f, 0, 0), Some(0));
        assert_eq!(ok.active_block(&f, 0, 1), Some(1));
        assert_eq!(ok.active_block(&f, 1, 1), None);
    }

    #[test]
    fn total_counts_all_block_assignments() {
        let f = two_block_functional();
        let cx = CompiledXi::compile(&f);
        // (Q+1)^S per site = 9, two sites
        assert_eq!(cx.total, 81);
    }

    #[test]
    fn incremental_scan_matches_direct_evaluation() {
        let f = two_block_functional();
        let cx = CompiledXi::compile(&f);
        let best = cx.scan_range(0..81);
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for i in 0..81 {
            let v = cx.eval_index(i);
            max = max.max(v);
            min = min.min(v);
        }
        assert_eq!(best.max.value, max);
        assert_eq!(best.min.value, min);
    }

    #[test]
    fn bits_roundtrip_through_index() {
        let f = two_block_functional();
        let cx = CompiledXi::compile(&f);
        for index in [0u64, 1, 17, 80] {
            let bits = cx.bits_at(&f, index);
            let a = XiAssignment::from_bits(&f, bits).unwrap();
            assert_eq!(cx.index_of(&f, &a), index);
        }
    }
}
