//! Chunked extremum scan over a dense index space.
//!
//! The index space `0..total` is split into contiguous ranges whose layout
//! depends only on `total`, never on the worker count. Chunks are scanned
//! independently (in parallel under the `parallel` feature) and folded in
//! chunk order with a deterministic tie-break, so the result is identical
//! for any thread count.

use std::ops::Range;

use crate::error::Result;

/// Values closer than this are ties, broken toward the smaller lex key.
pub const TIE_TOLERANCE: f64 = 1e-12;

const MIN_CHUNK: u64 = 1 << 10;
const TARGET_CHUNKS: u64 = 256;

/// One extremum candidate: objective value, lexicographic key of the
/// assignment, and enough state (`index`) to rebuild the assignment.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub value: f64,
    pub key: u128,
    pub index: u64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ChunkBest {
    pub min: Candidate,
    pub max: Candidate,
    pub scanned: u64,
}

impl ChunkBest {
    pub fn seed(value: f64, key: u128, index: u64) -> Self {
        let c = Candidate { value, key, index };
        ChunkBest {
            min: c,
            max: c,
            scanned: 1,
        }
    }

    #[inline]
    pub fn consider(&mut self, value: f64, key: impl Fn() -> u128, index: u64) {
        self.scanned += 1;
        if value > self.max.value + TIE_TOLERANCE {
            self.max = Candidate {
                value,
                key: key(),
                index,
            };
        } else if value >= self.max.value - TIE_TOLERANCE {
            let key = key();
            if key < self.max.key {
                self.max = Candidate { value, key, index };
            }
        }
        if value < self.min.value - TIE_TOLERANCE {
            self.min = Candidate {
                value,
                key: key(),
                index,
            };
        } else if value <= self.min.value + TIE_TOLERANCE {
            let key = key();
            if key < self.min.key {
                self.min = Candidate { value, key, index };
            }
        }
    }

    fn merge(mut self, other: ChunkBest) -> ChunkBest {
        self.scanned += other.scanned;
        self.max = merge_max(self.max, other.max);
        self.min = merge_min(self.min, other.min);
        self
    }
}

pub(crate) fn merge_max(incumbent: Candidate, challenger: Candidate) -> Candidate {
    if challenger.value > incumbent.value + TIE_TOLERANCE
        || (challenger.value >= incumbent.value - TIE_TOLERANCE && challenger.key < incumbent.key)
    {
        challenger
    } else {
        incumbent
    }
}

pub(crate) fn merge_min(incumbent: Candidate, challenger: Candidate) -> Candidate {
    if challenger.value < incumbent.value - TIE_TOLERANCE
        || (challenger.value <= incumbent.value + TIE_TOLERANCE && challenger.key < incumbent.key)
    {
        challenger
    } else {
        incumbent
    }
}

fn chunk_ranges(total: u64) -> Vec<Range<u64>> {
    let chunk = total.div_ceil(TARGET_CHUNKS).max(MIN_CHUNK);
    let mut out = Vec::with_capacity((total / chunk + 1) as usize);
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        out.push(start..end);
        start = end;
    }
    out
}

/// Scans `0..total` and returns the fold of per-chunk results in chunk order.
///
/// `threads`: `None` uses the ambient rayon pool, `Some(1)` stays on the
/// calling thread, `Some(n)` runs inside a dedicated pool of `n` workers.
/// Without the `parallel` feature every choice runs sequentially.
pub(crate) fn run_chunked<F>(total: u64, threads: Option<usize>, scan: F) -> Result<ChunkBest>
where
    F: Fn(Range<u64>) -> ChunkBest + Sync,
{
    assert!(total > 0, "scan over an empty index space");
    let ranges = chunk_ranges(total);
    let results = execute(ranges, threads, &scan)?;
    Ok(results
        .into_iter()
        .reduce(ChunkBest::merge)
        .expect("at least one chunk"))
}

#[cfg(feature = "parallel")]
fn execute<F>(ranges: Vec<Range<u64>>, threads: Option<usize>, scan: &F) -> Result<Vec<ChunkBest>>
where
    F: Fn(Range<u64>) -> ChunkBest + Sync,
{
    use rayon::prelude::*;
    match threads {
        Some(1) => Ok(ranges.into_iter().map(scan).collect()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::error::Error::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(|| ranges.into_par_iter().map(scan).collect()))
        }
        None => Ok(ranges.into_par_iter().map(scan).collect()),
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<F>(ranges: Vec<Range<u64>>, _threads: Option<usize>, scan: &F) -> Result<Vec<ChunkBest>>
where
    F: Fn(Range<u64>) -> ChunkBest + Sync,
{
    Ok(ranges.into_iter().map(scan).collect())
}
