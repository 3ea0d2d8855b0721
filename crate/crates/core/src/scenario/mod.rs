//! Experiment data model: parties, settings per site, outcome alphabets,
//! and the coefficient functionals defined over them.
//!
//! Site and setting indices are 0-based everywhere in the API; the on-disk
//! format ([`format`]) is 1-based and converts at the boundary. Outcome
//! identity is by list index, never by value comparison.

mod format;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use format::{document_from_json, document_to_json, load_document, save_document};

/// Loads just the scenario of a document, discarding any functionals.
pub fn load_scenario(path: &std::path::Path) -> Result<Arc<Scenario>> {
    Ok(load_document(path)?.scenario)
}

/// Outcome alphabet of one measurement.
#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeSpace {
    /// Finite list of distinct real values, sorted ascending.
    FiniteReal(Vec<f64>),
    /// Only the extremes of an interval; sufficient for correlation bounds,
    /// which depend on nothing else.
    IntervalExtremes { lo: f64, hi: f64 },
}

impl OutcomeSpace {
    pub fn binary_pm1() -> Self {
        OutcomeSpace::FiniteReal(vec![-1.0, 1.0])
    }

    /// Number of outcomes, `None` for interval extremes.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            OutcomeSpace::FiniteReal(values) => Some(values.len()),
            OutcomeSpace::IntervalExtremes { .. } => None,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match self {
            OutcomeSpace::FiniteReal(values) => Some(values),
            OutcomeSpace::IntervalExtremes { .. } => None,
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            OutcomeSpace::FiniteReal(values) => values[0],
            OutcomeSpace::IntervalExtremes { lo, .. } => *lo,
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            OutcomeSpace::FiniteReal(values) => *values.last().unwrap(),
            OutcomeSpace::IntervalExtremes { hi, .. } => *hi,
        }
    }

    /// Exactly min = -1 and max = +1.
    pub fn is_normalized(&self) -> bool {
        self.min_value() == -1.0 && self.max_value() == 1.0
    }

    fn validate(&self, site: usize, setting: usize) -> Result<()> {
        let path = || format!("outcomes.{}.{}", site + 1, setting + 1);
        match self {
            OutcomeSpace::FiniteReal(values) => {
                if values.is_empty() {
                    return Err(Error::Validation {
                        path: path(),
                        message: "outcome list is empty".into(),
                    });
                }
                for (i, v) in values.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::Validation {
                            path: format!("{}.values[{i}]", path()),
                            message: format!("non-finite outcome value {v}"),
                        });
                    }
                }
                for w in values.windows(2) {
                    if w[0] >= w[1] {
                        return Err(Error::Validation {
                            path: format!("{}.values", path()),
                            message: format!(
                                "outcome values must be strictly increasing, got {} then {}",
                                w[0], w[1]
                            ),
                        });
                    }
                }
                Ok(())
            }
            OutcomeSpace::IntervalExtremes { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                    return Err(Error::Validation {
                        path: path(),
                        message: format!("interval requires finite lo < hi, got [{lo}, {hi}]"),
                    });
                }
                Ok(())
            }
        }
    }
}

/// An N-partite correlation experiment: S_n measurements per site, with an
/// outcome alphabet per (site, setting).
///
/// Immutable after construction; shared across parallel workers by `Arc`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    settings: Vec<usize>,
    outcomes: Vec<Vec<OutcomeSpace>>,
}

impl Scenario {
    pub fn new(settings: Vec<usize>, outcomes: Vec<Vec<OutcomeSpace>>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::Validation {
                path: "parties".into(),
                message: "at least one party is required".into(),
            });
        }
        for (n, &s) in settings.iter().enumerate() {
            if s == 0 {
                return Err(Error::Validation {
                    path: format!("settings[{}]", n + 1),
                    message: "every site needs at least one setting".into(),
                });
            }
        }
        if outcomes.len() != settings.len() {
            return Err(Error::Validation {
                path: "outcomes".into(),
                message: format!(
                    "outcome spaces given for {} sites, scenario has {}",
                    outcomes.len(),
                    settings.len()
                ),
            });
        }
        for (n, per_site) in outcomes.iter().enumerate() {
            if per_site.len() != settings[n] {
                return Err(Error::Validation {
                    path: format!("outcomes.{}", n + 1),
                    message: format!(
                        "site {} has {} settings but {} outcome spaces",
                        n + 1,
                        settings[n],
                        per_site.len()
                    ),
                });
            }
            for (s, space) in per_site.iter().enumerate() {
                space.validate(n, s)?;
            }
        }
        Ok(Scenario { settings, outcomes })
    }

    /// N parties, each with `settings_per_site` measurements and outcomes {-1, +1}.
    pub fn uniform_binary(parties: usize, settings_per_site: usize) -> Scenario {
        Scenario::new(
            vec![settings_per_site; parties],
            vec![vec![OutcomeSpace::binary_pm1(); settings_per_site]; parties],
        )
        .expect("binary scenario is always valid")
    }

    /// N parties, each with `settings_per_site` measurements over the same
    /// finite value list.
    pub fn uniform_finite(
        parties: usize,
        settings_per_site: usize,
        values: Vec<f64>,
    ) -> Result<Scenario> {
        Scenario::new(
            vec![settings_per_site; parties],
            vec![vec![OutcomeSpace::FiniteReal(values.clone()); settings_per_site]; parties],
        )
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    pub fn outcome_space(&self, site: usize, setting: usize) -> &OutcomeSpace {
        &self.outcomes[site][setting]
    }

    /// d = S_1 + ... + S_N, the vertex-enumeration dimension.
    pub fn total_setting_dim(&self) -> usize {
        self.settings.iter().sum()
    }

    /// First global coordinate index of each site (site-major, setting-minor).
    pub fn coord_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.settings.len());
        let mut acc = 0;
        for &s in &self.settings {
            offsets.push(acc);
            acc += s;
        }
        offsets
    }

    pub fn is_normalized(&self) -> bool {
        self.outcomes
            .iter()
            .flatten()
            .all(OutcomeSpace::is_normalized)
    }

    pub fn all_finite(&self) -> bool {
        self.outcomes
            .iter()
            .flatten()
            .all(|o| matches!(o, OutcomeSpace::FiniteReal(_)))
    }

    fn require_all_finite(&self, context: &str) -> Result<()> {
        for (n, per_site) in self.outcomes.iter().enumerate() {
            for (s, space) in per_site.iter().enumerate() {
                if !matches!(space, OutcomeSpace::FiniteReal(_)) {
                    return Err(Error::InvalidFunctional(format!(
                        "{context} requires finite outcome alphabets; site {}, setting {} is an interval",
                        n + 1,
                        s + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Alphabet size at (site, setting); finite scenarios only.
    pub fn alphabet_size(&self, site: usize, setting: usize) -> usize {
        self.outcomes[site][setting]
            .cardinality()
            .expect("finite alphabet")
    }

    /// Same shape: parties, settings, and alphabet sizes agree.
    pub fn same_shape(&self, other: &Scenario) -> bool {
        self.settings == other.settings
            && self.outcomes.iter().zip(&other.outcomes).all(|(a, b)| {
                a.iter()
                    .zip(b)
                    .all(|(x, y)| x.cardinality() == y.cardinality())
            })
    }
}

/// Invertible map `λ ↦ scale·λ + offset` with `scale > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: f64,
}

impl AffineMap {
    pub fn apply(&self, value: f64) -> f64 {
        self.scale * value + self.offset
    }
}

/// Rescales every outcome space so its extremes are exactly -1 and +1,
/// returning the new scenario and the per-(site, setting) affine maps.
///
/// The mapped extremes are written as the literals -1.0 and +1.0, so the
/// normalized invariant holds bit-exactly; interior values go through the
/// affine map. Idempotent: a normalized space gets the identity map.
pub fn normalize_outcomes(scenario: &Scenario) -> Result<(Scenario, Vec<Vec<AffineMap>>)> {
    let mut new_outcomes = Vec::with_capacity(scenario.parties());
    let mut maps = Vec::with_capacity(scenario.parties());
    for (n, per_site) in scenario.outcomes.iter().enumerate() {
        let mut site_spaces = Vec::with_capacity(per_site.len());
        let mut site_maps = Vec::with_capacity(per_site.len());
        for (s, space) in per_site.iter().enumerate() {
            let lo = space.min_value();
            let hi = space.max_value();
            if lo == hi {
                return Err(Error::DegenerateOutcomeSpace {
                    site: n + 1,
                    setting: s + 1,
                });
            }
            let map = AffineMap {
                scale: 2.0 / (hi - lo),
                offset: -(hi + lo) / (hi - lo),
            };
            let new_space = match space {
                OutcomeSpace::FiniteReal(values) => {
                    let last = values.len() - 1;
                    let mapped: Vec<f64> = values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| {
                            if i == 0 {
                                -1.0
                            } else if i == last {
                                1.0
                            } else {
                                map.apply(v)
                            }
                        })
                        .collect();
                    OutcomeSpace::FiniteReal(mapped)
                }
                OutcomeSpace::IntervalExtremes { .. } => {
                    OutcomeSpace::IntervalExtremes { lo: -1.0, hi: 1.0 }
                }
            };
            site_spaces.push(new_space);
            site_maps.push(map);
        }
        new_outcomes.push(site_spaces);
        maps.push(site_maps);
    }
    let normalized = Scenario::new(scenario.settings.clone(), new_outcomes)?;
    Ok((normalized, maps))
}

/// Key of one correlation term: an ordered site subset and one setting per
/// listed site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorrelationKey {
    pub sites: Vec<usize>,
    pub settings: Vec<usize>,
}

impl CorrelationKey {
    pub fn new(sites: Vec<usize>, settings: Vec<usize>) -> Self {
        CorrelationKey { sites, settings }
    }

    fn validate(&self, scenario: &Scenario, path: &str) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::Validation {
                path: format!("{path}.sites"),
                message: "a term must touch at least one site".into(),
            });
        }
        if self.sites.len() != self.settings.len() {
            return Err(Error::Validation {
                path: path.to_string(),
                message: format!(
                    "{} sites but {} settings",
                    self.sites.len(),
                    self.settings.len()
                ),
            });
        }
        for w in self.sites.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Validation {
                    path: format!("{path}.sites"),
                    message: "sites must be strictly increasing".into(),
                });
            }
        }
        for (&n, &s) in self.sites.iter().zip(&self.settings) {
            if n >= scenario.parties() {
                return Err(Error::Validation {
                    path: format!("{path}.sites"),
                    message: format!("site {} out of range 1..={}", n + 1, scenario.parties()),
                });
            }
            if s >= scenario.settings[n] {
                return Err(Error::Validation {
                    path: format!("{path}.settings"),
                    message: format!(
                        "setting {} out of range 1..={} at site {}",
                        s + 1,
                        scenario.settings[n],
                        n + 1
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Sparse real coefficient map γ over (site subset, setting tuple) keys.
/// Site subsets of every size 1..=N are permitted; a "full-correlation"
/// functional uses only subsets of all N sites.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFunctional {
    scenario: Arc<Scenario>,
    terms: BTreeMap<CorrelationKey, f64>,
}

impl CorrelationFunctional {
    /// Duplicate keys are summed.
    pub fn new(
        scenario: Arc<Scenario>,
        terms: impl IntoIterator<Item = (CorrelationKey, f64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<CorrelationKey, f64> = BTreeMap::new();
        for (i, (key, gamma)) in terms.into_iter().enumerate() {
            let path = format!("terms[{i}]");
            key.validate(&scenario, &path)?;
            if !gamma.is_finite() {
                return Err(Error::Validation {
                    path: format!("{path}.gamma"),
                    message: format!("non-finite coefficient {gamma}"),
                });
            }
            *map.entry(key).or_insert(0.0) += gamma;
        }
        Ok(CorrelationFunctional {
            scenario,
            terms: map,
        })
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn terms(&self) -> &BTreeMap<CorrelationKey, f64> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every term touches all N sites.
    pub fn is_full_correlation(&self) -> bool {
        let n = self.scenario.parties();
        self.terms.keys().all(|k| k.sites.len() == n)
    }

    /// Pointwise sum of two functionals over the same scenario.
    pub fn add(&self, other: &CorrelationFunctional) -> Result<CorrelationFunctional> {
        if self.scenario != other.scenario {
            return Err(Error::ScenarioMismatch(
                "cannot add functionals over different scenarios".into(),
            ));
        }
        CorrelationFunctional::new(
            self.scenario.clone(),
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(k, &g)| (k.clone(), g)),
        )
    }
}

/// Key of one probability term: site subset, one setting and one event block
/// per listed site.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProbabilityKey {
    pub sites: Vec<usize>,
    pub settings: Vec<usize>,
    /// 0-based block indices, one per listed site.
    pub blocks: Vec<usize>,
}

/// Coefficients γ over (settings, outcome-block) multi-indices, together
/// with the event sets the blocks stand for.
///
/// Per (site, setting) the Q_n blocks are pairwise disjoint nonempty outcome
/// sets whose union is a proper subset of the alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityFunctional {
    scenario: Arc<Scenario>,
    /// Q_n per site.
    blocks_per_setting: Vec<usize>,
    /// `events[site][setting][block]` = sorted outcome indices.
    events: Vec<Vec<Vec<Vec<usize>>>>,
    terms: BTreeMap<ProbabilityKey, f64>,
}

impl ProbabilityFunctional {
    pub fn new(
        scenario: Arc<Scenario>,
        blocks_per_setting: Vec<usize>,
        events: Vec<Vec<Vec<Vec<usize>>>>,
        terms: impl IntoIterator<Item = (ProbabilityKey, f64)>,
    ) -> Result<Self> {
        scenario.require_all_finite("a probability functional")?;
        if blocks_per_setting.len() != scenario.parties() {
            return Err(Error::Validation {
                path: "blocks".into(),
                message: format!(
                    "{} block counts for {} sites",
                    blocks_per_setting.len(),
                    scenario.parties()
                ),
            });
        }
        for (n, &q) in blocks_per_setting.iter().enumerate() {
            if q == 0 {
                return Err(Error::Validation {
                    path: format!("blocks[{}]", n + 1),
                    message: "every site needs at least one event block".into(),
                });
            }
        }
        if events.len() != scenario.parties() {
            return Err(Error::Validation {
                path: "events".into(),
                message: "one event table per site is required".into(),
            });
        }
        for (n, per_site) in events.iter().enumerate() {
            if per_site.len() != scenario.settings()[n] {
                return Err(Error::Validation {
                    path: format!("events.{}", n + 1),
                    message: format!(
                        "site {} has {} settings but {} event rows",
                        n + 1,
                        scenario.settings()[n],
                        per_site.len()
                    ),
                });
            }
            for (s, per_setting) in per_site.iter().enumerate() {
                let path = format!("events.{}.{}", n + 1, s + 1);
                if per_setting.len() != blocks_per_setting[n] {
                    return Err(Error::Validation {
                        path,
                        message: format!(
                            "expected {} blocks, got {}",
                            blocks_per_setting[n],
                            per_setting.len()
                        ),
                    });
                }
                let alphabet = scenario.alphabet_size(n, s);
                let mut seen = vec![false; alphabet];
                let mut union = 0usize;
                for (q, block) in per_setting.iter().enumerate() {
                    let path = format!("{path}.{}", q + 1);
                    if block.is_empty() {
                        return Err(Error::Validation {
                            path,
                            message: "event block is empty".into(),
                        });
                    }
                    let mut prev: Option<usize> = None;
                    for &idx in block {
                        if idx >= alphabet {
                            return Err(Error::Validation {
                                path: path.clone(),
                                message: format!("outcome index {idx} out of range 0..{alphabet}"),
                            });
                        }
                        if prev.is_some_and(|p| p >= idx) {
                            return Err(Error::Validation {
                                path: path.clone(),
                                message: "outcome indices must be strictly increasing".into(),
                            });
                        }
                        if seen[idx] {
                            return Err(Error::Validation {
                                path: path.clone(),
                                message: format!(
                                    "outcome index {idx} appears in two blocks; blocks must be disjoint"
                                ),
                            });
                        }
                        seen[idx] = true;
                        union += 1;
                        prev = Some(idx);
                    }
                }
                if union >= alphabet {
                    return Err(Error::Validation {
                        path,
                        message:
                            "the union of event blocks must be a proper subset of the alphabet"
                                .into(),
                    });
                }
            }
        }
        let mut map: BTreeMap<ProbabilityKey, f64> = BTreeMap::new();
        for (i, (key, gamma)) in terms.into_iter().enumerate() {
            let path = format!("terms[{i}]");
            CorrelationKey::new(key.sites.clone(), key.settings.clone())
                .validate(&scenario, &path)?;
            if key.blocks.len() != key.sites.len() {
                return Err(Error::Validation {
                    path: format!("{path}.blocks"),
                    message: format!("{} blocks for {} sites", key.blocks.len(), key.sites.len()),
                });
            }
            for (&n, &q) in key.sites.iter().zip(&key.blocks) {
                if q >= blocks_per_setting[n] {
                    return Err(Error::Validation {
                        path: format!("{path}.blocks"),
                        message: format!(
                            "block {} out of range 1..={} at site {}",
                            q + 1,
                            blocks_per_setting[n],
                            n + 1
                        ),
                    });
                }
            }
            if !gamma.is_finite() {
                return Err(Error::Validation {
                    path: format!("{path}.gamma"),
                    message: format!("non-finite coefficient {gamma}"),
                });
            }
            *map.entry(key).or_insert(0.0) += gamma;
        }
        Ok(ProbabilityFunctional {
            scenario,
            blocks_per_setting,
            events,
            terms: map,
        })
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn blocks_per_setting(&self) -> &[usize] {
        &self.blocks_per_setting
    }

    /// Sorted outcome indices of block `q` at (site, setting).
    pub fn event(&self, site: usize, setting: usize, block: usize) -> &[usize] {
        &self.events[site][setting][block]
    }

    pub fn terms(&self) -> &BTreeMap<ProbabilityKey, f64> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// One event term: a full setting tuple, an explicit set of outcome tuples
/// over that tuple's grid, and a coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTerm {
    /// One setting per site, length N.
    pub settings: Vec<usize>,
    /// Sorted, duplicate-free outcome-index tuples, each of length N.
    pub outcomes: Vec<Vec<usize>>,
    pub gamma: f64,
}

/// Coefficients over arbitrary (not necessarily product-form) events on
/// finite outcome grids. Events under one setting tuple may overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct EventFunctional {
    scenario: Arc<Scenario>,
    terms: Vec<EventTerm>,
}

impl EventFunctional {
    pub fn new(scenario: Arc<Scenario>, terms: Vec<EventTerm>) -> Result<Self> {
        scenario.require_all_finite("an event functional")?;
        let n_parties = scenario.parties();
        let mut canonical = Vec::with_capacity(terms.len());
        for (i, term) in terms.into_iter().enumerate() {
            let path = format!("terms[{i}]");
            if term.settings.len() != n_parties {
                return Err(Error::Validation {
                    path: format!("{path}.settings"),
                    message: format!(
                        "expected one setting per site ({n_parties}), got {}",
                        term.settings.len()
                    ),
                });
            }
            for (n, &s) in term.settings.iter().enumerate() {
                if s >= scenario.settings()[n] {
                    return Err(Error::Validation {
                        path: format!("{path}.settings"),
                        message: format!(
                            "setting {} out of range 1..={} at site {}",
                            s + 1,
                            scenario.settings()[n],
                            n + 1
                        ),
                    });
                }
            }
            if !term.gamma.is_finite() {
                return Err(Error::Validation {
                    path: format!("{path}.gamma"),
                    message: format!("non-finite coefficient {}", term.gamma),
                });
            }
            let mut outcomes = term.outcomes;
            for tuple in &outcomes {
                if tuple.len() != n_parties {
                    return Err(Error::Validation {
                        path: format!("{path}.event"),
                        message: format!(
                            "outcome tuple length {} does not match {n_parties} sites",
                            tuple.len()
                        ),
                    });
                }
                for (n, &o) in tuple.iter().enumerate() {
                    let alphabet = scenario.alphabet_size(n, term.settings[n]);
                    if o >= alphabet {
                        return Err(Error::Validation {
                            path: format!("{path}.event"),
                            message: format!(
                                "outcome index {o} out of range 0..{alphabet} at site {}",
                                n + 1
                            ),
                        });
                    }
                }
            }
            outcomes.sort();
            outcomes.dedup();
            canonical.push(EventTerm {
                settings: term.settings,
                outcomes,
                gamma: term.gamma,
            });
        }
        Ok(EventFunctional {
            scenario,
            terms: canonical,
        })
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn terms(&self) -> &[EventTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Any of the three functional kinds a scenario file can carry.
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    Correlation(CorrelationFunctional),
    Probability(ProbabilityFunctional),
    Event(EventFunctional),
}

impl Functional {
    pub fn kind(&self) -> &'static str {
        match self {
            Functional::Correlation(_) => "correlation",
            Functional::Probability(_) => "probability",
            Functional::Event(_) => "event",
        }
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        match self {
            Functional::Correlation(f) => f.scenario(),
            Functional::Probability(f) => f.scenario(),
            Functional::Event(f) => f.scenario(),
        }
    }
}

/// A self-describing document: one scenario plus any number of functionals
/// over it. One file is everything a CLI invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDocument {
    pub scenario: Arc<Scenario>,
    pub functionals: Vec<Functional>,
}
