//! Randomized interior audit of vertex bounds.
//!
//! The multilinear objective is harmonic, so its extrema over the solid
//! hypercube sit at vertices; sampling the interior therefore can never
//! escape the vertex bounds. The audit draws seeded uniform points of
//! `[-1,1]^d`, evaluates the objective at each, and reports the tightest
//! sampled values, the margin to the vertex bounds, and any escape (an
//! escape is a failure of the implementation, not of the sampler).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::Result;
use crate::scenario::CorrelationFunctional;

use super::vertex::CompiledCorrelation;
use super::{lhv_bounds_correlation, ScanConfig};

/// A sampled point whose value left the vertex bounds.
#[derive(Debug, Clone, Serialize)]
pub struct AuditEscape {
    /// Per-site coordinate vectors of the offending point.
    pub point: Vec<Vec<f64>>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub samples: u64,
    pub seed: u64,
    pub bound_min: f64,
    pub bound_max: f64,
    pub sampled_min: f64,
    pub sampled_max: f64,
    /// `sampled_min - bound_min`; nonnegative when the audit passes.
    pub lower_margin: f64,
    /// `bound_max - sampled_max`; nonnegative when the audit passes.
    pub upper_margin: f64,
    pub escapes: Vec<AuditEscape>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.escapes.is_empty()
    }
}

/// Samples `samples` points with each coordinate uniform in [-1, 1] and
/// checks every objective value against the exact vertex bounds.
pub fn lemma1_audit(
    f: &CorrelationFunctional,
    samples: u64,
    seed: u64,
    cfg: &ScanConfig,
) -> Result<AuditReport> {
    let bounds = lhv_bounds_correlation(f, cfg)?;
    let cc = CompiledCorrelation::compile(f);
    let offsets = f.scenario().coord_offsets();
    let settings = f.scenario().settings().to_vec();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut point = vec![0.0f64; cc.d];
    let mut sampled_min = f64::INFINITY;
    let mut sampled_max = f64::NEG_INFINITY;
    let mut escapes = Vec::new();
    for _ in 0..samples {
        for coord in point.iter_mut() {
            *coord = rng.random_range(-1.0..=1.0);
        }
        let value = cc.eval_point(&point);
        sampled_min = sampled_min.min(value);
        sampled_max = sampled_max.max(value);
        if value < bounds.min || value > bounds.max {
            escapes.push(AuditEscape {
                point: offsets
                    .iter()
                    .zip(&settings)
                    .map(|(&o, &s)| point[o..o + s].to_vec())
                    .collect(),
                value,
            });
        }
    }
    if samples == 0 {
        sampled_min = bounds.min;
        sampled_max = bounds.max;
    }
    Ok(AuditReport {
        samples,
        seed,
        bound_min: bounds.min,
        bound_max: bounds.max,
        sampled_min,
        sampled_max,
        lower_margin: sampled_min - bounds.min,
        upper_margin: bounds.max - sampled_max,
        escapes,
    })
}
