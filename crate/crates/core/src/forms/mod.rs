//! Multilinear form evaluation and tight LHV bounds by exact enumeration.
//!
//! Correlation functionals are optimized over the `2^d` sign vertices,
//! probability functionals over block assignments with at most one active
//! block per setting, and event functionals over full outcome grids. All
//! three scans are exact (no sampling), deterministic for any worker count,
//! and return self-witnessing extrema: re-evaluating the reported argmin /
//! argmax reproduces the reported bounds bit-exactly.

mod audit;
mod grid;
mod scan;
mod vertex;
mod xi;

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{
    CorrelationFunctional, EventFunctional, Functional, ProbabilityFunctional, Scenario,
};

pub use audit::{lemma1_audit, AuditEscape, AuditReport};
pub use grid::GridAssignment;
pub use scan::TIE_TOLERANCE;
pub use vertex::VertexAssignment;
pub use xi::XiAssignment;

use grid::CompiledGrid;
use scan::{merge_max, run_chunked, Candidate};
use vertex::{lex_key, mask, CompiledCorrelation};
use xi::CompiledXi;

/// Default ceiling on exact enumeration: 2^30 assignments (d <= 30 for
/// vertex scans). Exceeding it is an error carrying the estimated count.
pub const DEFAULT_MAX_ASSIGNMENTS: u64 = 1 << 30;

/// Enumeration limits and worker count for bound computations.
#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    /// Hard ceiling on the number of enumerated assignments.
    pub max_assignments: u64,
    /// `None`: ambient rayon pool; `Some(1)`: stay on the calling thread;
    /// `Some(n)`: dedicated pool. Results are identical in every case.
    pub threads: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            max_assignments: DEFAULT_MAX_ASSIGNMENTS,
            threads: None,
        }
    }
}

impl ScanConfig {
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.max_assignments = cap;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    fn admit(&self, total: u128) -> Result<u64> {
        if total > self.max_assignments as u128 {
            return Err(Error::CapExceeded {
                required: total,
                cap: self.max_assignments,
            });
        }
        Ok(total as u64)
    }
}

/// Extremal assignment, serialized as per-site arrays: signs (+-1) for
/// vertex scans, 0/1 block vectors for block scans, outcome indices for
/// grid scans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Signs(Vec<Vec<i8>>),
    Blocks(Vec<Vec<u8>>),
    Outcomes(Vec<Vec<usize>>),
}

/// Result of one exact bound computation.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub min: f64,
    pub max: f64,
    pub argmin: Witness,
    pub argmax: Witness,
    pub vertices_scanned: u64,
    pub elapsed: Duration,
}

impl BoundReport {
    pub fn to_json(&self, include_timing: bool) -> serde_json::Value {
        let mut value = serde_json::json!({
            "min": self.min,
            "max": self.max,
            "argmin": self.argmin,
            "argmax": self.argmax,
            "vertices_scanned": self.vertices_scanned,
        });
        if include_timing {
            value["elapsed_ms"] = serde_json::json!(self.elapsed.as_millis() as u64);
        }
        value
    }
}

fn require_normalized(scenario: &Scenario) -> Result<()> {
    for n in 0..scenario.parties() {
        for s in 0..scenario.settings()[n] {
            let space = scenario.outcome_space(n, s);
            if !space.is_normalized() {
                return Err(Error::NotNormalized {
                    site: n + 1,
                    setting: s + 1,
                    detail: format!(
                        "found [{}, {}]; apply normalize_outcomes first",
                        space.min_value(),
                        space.max_value()
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Value of the multilinear correlation form at a vertex:
/// sum over terms of gamma times the product of the listed signs.
pub fn evaluate_correlation_form(f: &CorrelationFunctional, v: &VertexAssignment) -> Result<f64> {
    if v.dims() != f.scenario().settings() {
        return Err(Error::DimensionMismatch(
            "vertex assignment does not match the functional's scenario".into(),
        ));
    }
    Ok(f.terms()
        .iter()
        .map(|(key, &gamma)| {
            let mut prod = gamma;
            for (&n, &s) in key.sites.iter().zip(&key.settings) {
                prod *= v.sign(n, s);
            }
            prod
        })
        .sum())
}

/// Value of the probability form at a block assignment: sum over terms of
/// gamma times the product of the listed 0/1 block indicators.
pub fn evaluate_probability_form(f: &ProbabilityFunctional, a: &XiAssignment) -> Result<f64> {
    let scenario = f.scenario();
    if a.bits().len() != scenario.parties()
        || a.bits()
            .iter()
            .enumerate()
            .any(|(n, row)| row.len() != scenario.settings()[n] * f.blocks_per_setting()[n])
    {
        return Err(Error::DimensionMismatch(
            "block assignment does not match the functional's scenario".into(),
        ));
    }
    Ok(f.terms()
        .iter()
        .map(|(key, &gamma)| {
            let all_active = key
                .sites
                .iter()
                .zip(key.settings.iter().zip(&key.blocks))
                .all(|(&n, (&s, &q))| a.active_block(f, n, s) == Some(q));
            if all_active {
                gamma
            } else {
                0.0
            }
        })
        .sum())
}

/// Value of the event form at a grid assignment: sum over terms of gamma
/// times the indicator of the induced outcome tuple lying in the event.
pub fn evaluate_event_form(f: &EventFunctional, a: &GridAssignment) -> Result<f64> {
    let scenario = f.scenario();
    if a.outcomes().len() != scenario.parties()
        || a.outcomes()
            .iter()
            .zip(scenario.settings())
            .any(|(row, &s)| row.len() != s)
    {
        return Err(Error::DimensionMismatch(
            "grid assignment does not match the functional's scenario".into(),
        ));
    }
    Ok(f.terms()
        .iter()
        .map(|term| {
            let tuple: Vec<usize> = term
                .settings
                .iter()
                .enumerate()
                .map(|(n, &s)| a.outcome(n, s))
                .collect();
            if term.outcomes.binary_search(&tuple).is_ok() {
                term.gamma
            } else {
                0.0
            }
        })
        .sum())
}

/// Tight LHV bounds of a correlation functional: exact min and max over all
/// `2^d` sign vertices, with witnesses.
///
/// Requires a normalized scenario (every alphabet spans exactly [-1, +1]);
/// the bounds then constrain every LHV behavior with those alphabets.
pub fn lhv_bounds_correlation(f: &CorrelationFunctional, cfg: &ScanConfig) -> Result<BoundReport> {
    let start = Instant::now();
    require_normalized(f.scenario())?;
    let d = f.scenario().total_setting_dim();
    if d > 63 {
        return Err(Error::CapExceeded {
            required: 1u128 << d.min(127),
            cap: cfg.max_assignments,
        });
    }
    if f.is_empty() {
        return Ok(empty_report(
            Witness::Signs(VertexAssignment::all_plus(f.scenario()).to_signs()),
            start,
        ));
    }
    let total = cfg.admit(1u128 << d)?;
    let cc = CompiledCorrelation::compile(f);
    let best = run_chunked(total, cfg.threads, |range| cc.scan_range(range, false))?;
    let argmin = VertexAssignment::from_code(f.scenario(), best.min.index);
    let argmax = VertexAssignment::from_code(f.scenario(), best.max.index);
    Ok(BoundReport {
        min: cc.eval_code(best.min.index),
        max: cc.eval_code(best.max.index),
        argmin: Witness::Signs(argmin.to_signs()),
        argmax: Witness::Signs(argmax.to_signs()),
        vertices_scanned: best.scanned,
        elapsed: start.elapsed(),
    })
}

/// Tight LHV bound of a full-correlation functional (every term touches all
/// N sites): max |F| over vertices, with min = -max by the sign-flip
/// symmetry of full forms.
///
/// Enumerates half the vertex set (first coordinate pinned to +1); flipping
/// every sign of site 1 negates the form, so the half scan covers both
/// extrema.
pub fn lhv_bounds_full_correlation(
    f: &CorrelationFunctional,
    cfg: &ScanConfig,
) -> Result<BoundReport> {
    let start = Instant::now();
    require_normalized(f.scenario())?;
    if !f.is_full_correlation() {
        return Err(Error::InvalidFunctional(
            "functional has terms over proper site subsets; use lhv_bounds_correlation".into(),
        ));
    }
    let d = f.scenario().total_setting_dim();
    if d > 63 {
        return Err(Error::CapExceeded {
            required: 1u128 << (d - 1).min(127),
            cap: cfg.max_assignments,
        });
    }
    if f.is_empty() {
        return Ok(empty_report(
            Witness::Signs(VertexAssignment::all_plus(f.scenario()).to_signs()),
            start,
        ));
    }
    let total = cfg.admit(1u128 << (d - 1))?;
    let cc = CompiledCorrelation::compile(f);
    let best = run_chunked(total, cfg.threads, |range| cc.scan_range(range, true))?;
    let site1_mask = mask(f.scenario().settings()[0]);
    // the other half of the cube is the site-1 flip of the scanned half,
    // where the form takes the negated values
    let mirrored_min = Candidate {
        value: -best.min.value,
        key: lex_key(best.min.index ^ site1_mask, d),
        index: best.min.index ^ site1_mask,
    };
    let top = merge_max(best.max, mirrored_min);
    let max = cc.eval_code(top.index);
    let argmax = VertexAssignment::from_code(f.scenario(), top.index);
    let argmin_code = top.index ^ site1_mask;
    let argmin = VertexAssignment::from_code(f.scenario(), argmin_code);
    debug_assert_eq!(cc.eval_code(argmin_code), -max);
    Ok(BoundReport {
        min: -max,
        max,
        argmin: Witness::Signs(argmin.to_signs()),
        argmax: Witness::Signs(argmax.to_signs()),
        vertices_scanned: best.scanned,
        elapsed: start.elapsed(),
    })
}

/// Tight LHV bounds of a probability functional: exact min and max over all
/// block assignments (at most one active block per setting), with witnesses.
pub fn lhv_bounds_probability(f: &ProbabilityFunctional, cfg: &ScanConfig) -> Result<BoundReport> {
    let start = Instant::now();
    let cx = CompiledXi::compile(f);
    if f.is_empty() {
        return Ok(empty_report(Witness::Blocks(cx.bits_at(f, 0)), start));
    }
    let total = cfg.admit(cx.total)?;
    let best = run_chunked(total, cfg.threads, |range| cx.scan_range(range))?;
    Ok(BoundReport {
        min: cx.eval_index(best.min.index),
        max: cx.eval_index(best.max.index),
        argmin: Witness::Blocks(cx.bits_at(f, best.min.index)),
        argmax: Witness::Blocks(cx.bits_at(f, best.max.index)),
        vertices_scanned: best.scanned,
        elapsed: start.elapsed(),
    })
}

/// Tight LHV bounds of an event functional: exact inf and sup over all
/// deterministic outcome assignments (one outcome per (site, setting),
/// shared across terms), with witnesses.
pub fn lhv_bounds_events(f: &EventFunctional, cfg: &ScanConfig) -> Result<BoundReport> {
    let start = Instant::now();
    let cg = CompiledGrid::compile(f);
    if f.is_empty() {
        return Ok(empty_report(Witness::Outcomes(cg.outcomes_at(f, 0)), start));
    }
    let total = cfg.admit(cg.total)?;
    let best = run_chunked(total, cfg.threads, |range| cg.scan_range(range))?;
    Ok(BoundReport {
        min: cg.eval_index(best.min.index),
        max: cg.eval_index(best.max.index),
        argmin: Witness::Outcomes(cg.outcomes_at(f, best.min.index)),
        argmax: Witness::Outcomes(cg.outcomes_at(f, best.max.index)),
        vertices_scanned: best.scanned,
        elapsed: start.elapsed(),
    })
}

/// Bound computation dispatched on the functional kind.
pub fn lhv_bounds(f: &Functional, cfg: &ScanConfig) -> Result<BoundReport> {
    match f {
        Functional::Correlation(f) => lhv_bounds_correlation(f, cfg),
        Functional::Probability(f) => lhv_bounds_probability(f, cfg),
        Functional::Event(f) => lhv_bounds_events(f, cfg),
    }
}

fn empty_report(witness: Witness, start: Instant) -> BoundReport {
    BoundReport {
        min: 0.0,
        max: 0.0,
        argmin: witness.clone(),
        argmax: witness,
        vertices_scanned: 0,
        elapsed: start.elapsed(),
    }
}

/// Number of l-dimensional hypercube faces counted with axis-order
/// multiplicity: `d! / (d-l)! * 2^(d-l)`. Exact; overflow is an error,
/// never a wrap.
pub fn face_count(d: u32, l: u32) -> Result<u128> {
    if l > d {
        return Err(Error::InvalidArgument(format!(
            "face dimension l={l} exceeds cube dimension d={d}"
        )));
    }
    let overflow = || Error::FaceCountOverflow { d, l };
    let mut count: u128 = 1;
    for k in (d - l + 1)..=d {
        count = count.checked_mul(k as u128).ok_or_else(overflow)?;
    }
    for _ in 0..(d - l) {
        count = count.checked_mul(2).ok_or_else(overflow)?;
    }
    Ok(count)
}
