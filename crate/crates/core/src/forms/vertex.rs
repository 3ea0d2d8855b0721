//! Exact enumeration of multilinear forms over hypercube vertices.
//!
//! A vertex fixes one sign per (site, setting); coordinates are numbered
//! site-major, setting-minor, and packed into a `u64` (bit set = +1).
//! Vertices are visited in Gray-code order so each step flips a single
//! coordinate and only the terms touching it are updated.

use crate::error::{Error, Result};
use crate::scenario::{CorrelationFunctional, Scenario};

use super::scan::ChunkBest;

/// One sign per (site, setting): a vertex of the hypercube `[-1,1]^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexAssignment {
    dims: Vec<usize>,
    bits: u64,
}

impl VertexAssignment {
    /// Builds from per-site sign vectors; every entry must be -1 or +1.
    pub fn from_signs(scenario: &Scenario, signs: &[Vec<i8>]) -> Result<Self> {
        let dims = scenario.settings().to_vec();
        if signs.len() != dims.len() || signs.iter().zip(&dims).any(|(row, &s)| row.len() != s) {
            return Err(Error::DimensionMismatch(
                "sign vectors do not match the scenario's settings".into(),
            ));
        }
        let mut bits = 0u64;
        let mut coord = 0;
        for row in signs {
            for &sign in row {
                match sign {
                    1 => bits |= 1 << coord,
                    -1 => {}
                    other => {
                        return Err(Error::Validation {
                            path: "signs".into(),
                            message: format!("vertex component must be -1 or +1, got {other}"),
                        })
                    }
                }
                coord += 1;
            }
        }
        Ok(VertexAssignment { dims, bits })
    }

    pub fn all_plus(scenario: &Scenario) -> Self {
        let dims = scenario.settings().to_vec();
        let d: usize = dims.iter().sum();
        VertexAssignment {
            dims,
            bits: mask(d),
        }
    }

    pub(crate) fn from_code(scenario: &Scenario, code: u64) -> Self {
        VertexAssignment {
            dims: scenario.settings().to_vec(),
            bits: code,
        }
    }

    pub(crate) fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn sign(&self, site: usize, setting: usize) -> f64 {
        let offset: usize = self.dims[..site].iter().sum();
        sign_of_bit(self.bits, offset + setting)
    }

    /// Per-site sign vectors, the serialized form.
    pub fn to_signs(&self) -> Vec<Vec<i8>> {
        let mut out = Vec::with_capacity(self.dims.len());
        let mut coord = 0;
        for &s in &self.dims {
            out.push(
                (0..s)
                    .map(|_| {
                        let sign = if self.bits >> coord & 1 == 1 { 1 } else { -1 };
                        coord += 1;
                        sign
                    })
                    .collect(),
            );
        }
        out
    }
}

#[inline]
fn sign_of_bit(code: u64, coord: usize) -> f64 {
    if code >> coord & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
pub(crate) fn mask(d: usize) -> u64 {
    if d == 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

/// Lexicographic key of a vertex: coordinate 0 is most significant and
/// -1 sorts before +1, so smaller key = lexicographically smaller assignment.
#[inline]
pub(crate) fn lex_key(code: u64, d: usize) -> u128 {
    (code.reverse_bits() >> (64 - d)) as u128
}

/// Form data flattened to global coordinates for the scan loop.
pub(crate) struct CompiledCorrelation {
    pub d: usize,
    terms: Vec<CompiledTerm>,
    /// coordinate -> indices of terms containing it
    coord_terms: Vec<Vec<u32>>,
}

struct CompiledTerm {
    gamma: f64,
    coords: Vec<u32>,
}

impl CompiledCorrelation {
    pub fn compile(f: &CorrelationFunctional) -> Self {
        let scenario = f.scenario();
        let offsets = scenario.coord_offsets();
        let d = scenario.total_setting_dim();
        let mut terms = Vec::with_capacity(f.terms().len());
        let mut coord_terms = vec![Vec::new(); d];
        for (key, &gamma) in f.terms() {
            let id = terms.len() as u32;
            let coords: Vec<u32> = key
                .sites
                .iter()
                .zip(&key.settings)
                .map(|(&n, &s)| (offsets[n] + s) as u32)
                .collect();
            for &c in &coords {
                coord_terms[c as usize].push(id);
            }
            terms.push(CompiledTerm { gamma, coords });
        }
        CompiledCorrelation {
            d,
            terms,
            coord_terms,
        }
    }

    /// Direct evaluation at a vertex code.
    pub fn eval_code(&self, code: u64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut prod = t.gamma;
                for &c in &t.coords {
                    prod *= sign_of_bit(code, c as usize);
                }
                prod
            })
            .sum()
    }

    /// Evaluation at a real point of `[-1,1]^d` (coordinates global order).
    pub fn eval_point(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut prod = t.gamma;
                for &c in &t.coords {
                    prod *= point[c as usize];
                }
                prod
            })
            .sum()
    }

    /// Scans Gray-code indices `range` over the free coordinates.
    ///
    /// With `pin_first` the first global coordinate is held at +1 and the
    /// free coordinates are 1..d; candidate indices are vertex codes.
    pub fn scan_range(&self, range: std::ops::Range<u64>, pin_first: bool) -> ChunkBest {
        let shift = usize::from(pin_first);
        let code_of = |i: u64| {
            let g = i ^ (i >> 1);
            if pin_first {
                (g << 1) | 1
            } else {
                g
            }
        };
        let mut code = code_of(range.start);
        let mut contrib: Vec<f64> = self
            .terms
            .iter()
            .map(|t| {
                let mut prod = t.gamma;
                for &c in &t.coords {
                    prod *= sign_of_bit(code, c as usize);
                }
                prod
            })
            .collect();
        let mut value: f64 = contrib.iter().sum();
        let mut best = ChunkBest::seed(value, lex_key(code, self.d), code);
        for i in range.start + 1..range.end {
            let coord = i.trailing_zeros() as usize + shift;
            code ^= 1 << coord;
            for &t in &self.coord_terms[coord] {
                let c = &mut contrib[t as usize];
                value -= 2.0 * *c;
                *c = -*c;
            }
            best.consider(value, || lex_key(code, self.d), code);
        }
        best
    }
}
