//! On-disk JSON format for scenario documents.
//!
//! Site, setting, and block indices are 1-based in files and converted at
//! this boundary; outcome indices are 0-based positions into the value list
//! of the relevant alphabet.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{
    CorrelationFunctional, CorrelationKey, EventFunctional, EventTerm, Functional, OutcomeSpace,
    ProbabilityFunctional, ProbabilityKey, Scenario, ScenarioDocument,
};

#[derive(Debug, Serialize, Deserialize)]
struct RawDocument {
    parties: usize,
    settings: Vec<usize>,
    outcomes: BTreeMap<String, RawOutcomeSpace>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    functionals: Vec<RawFunctional>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawOutcomeSpace {
    Finite { values: Vec<f64> },
    Interval { lo: f64, hi: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawFunctional {
    Correlation {
        terms: Vec<RawCorrelationTerm>,
    },
    Probability {
        events: BTreeMap<String, Vec<usize>>,
        terms: Vec<RawProbabilityTerm>,
    },
    Event {
        terms: Vec<RawEventTerm>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct RawCorrelationTerm {
    sites: Vec<usize>,
    settings: Vec<usize>,
    gamma: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawProbabilityTerm {
    sites: Vec<usize>,
    settings: Vec<usize>,
    blocks: Vec<usize>,
    gamma: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawEventTerm {
    settings: Vec<usize>,
    event: Vec<Vec<usize>>,
    gamma: f64,
}

fn parse_indices(key: &str, expected: usize, path: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.len() != expected {
        return Err(Error::Validation {
            path: path.to_string(),
            message: format!("key `{key}` must have {expected} dot-separated indices"),
        });
    }
    parts
        .iter()
        .map(|p| {
            let v: usize = p.parse().map_err(|_| Error::Validation {
                path: path.to_string(),
                message: format!("key `{key}` has a non-integer component `{p}`"),
            })?;
            if v == 0 {
                return Err(Error::Validation {
                    path: path.to_string(),
                    message: format!("key `{key}` uses 1-based indices; 0 is invalid"),
                });
            }
            Ok(v - 1)
        })
        .collect()
}

fn to_zero_based(indices: &[usize], path: &str) -> Result<Vec<usize>> {
    indices
        .iter()
        .map(|&v| {
            if v == 0 {
                Err(Error::Validation {
                    path: path.to_string(),
                    message: "indices are 1-based; 0 is invalid".into(),
                })
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&v| v + 1).collect()
}

fn scenario_from_raw(raw: &RawDocument) -> Result<Arc<Scenario>> {
    if raw.parties != raw.settings.len() {
        return Err(Error::Validation {
            path: "settings".into(),
            message: format!(
                "parties is {} but settings lists {} sites",
                raw.parties,
                raw.settings.len()
            ),
        });
    }
    let mut outcomes: Vec<Vec<Option<OutcomeSpace>>> =
        raw.settings.iter().map(|&s| vec![None; s]).collect();
    for (key, space) in &raw.outcomes {
        let idx = parse_indices(key, 2, "outcomes")?;
        let (site, setting) = (idx[0], idx[1]);
        if site >= raw.settings.len() || setting >= raw.settings[site] {
            return Err(Error::Validation {
                path: format!("outcomes.{key}"),
                message: "site or setting out of range".into(),
            });
        }
        outcomes[site][setting] = Some(match space {
            RawOutcomeSpace::Finite { values } => OutcomeSpace::FiniteReal(values.clone()),
            RawOutcomeSpace::Interval { lo, hi } => {
                OutcomeSpace::IntervalExtremes { lo: *lo, hi: *hi }
            }
        });
    }
    let mut resolved = Vec::with_capacity(outcomes.len());
    for (n, per_site) in outcomes.into_iter().enumerate() {
        let mut spaces = Vec::with_capacity(per_site.len());
        for (s, space) in per_site.into_iter().enumerate() {
            spaces.push(space.ok_or_else(|| Error::Validation {
                path: format!("outcomes.{}.{}", n + 1, s + 1),
                message: "missing outcome space".into(),
            })?);
        }
        resolved.push(spaces);
    }
    Ok(Arc::new(Scenario::new(raw.settings.clone(), resolved)?))
}

fn probability_from_raw(
    scenario: &Arc<Scenario>,
    events: &BTreeMap<String, Vec<usize>>,
    terms: &[RawProbabilityTerm],
) -> Result<ProbabilityFunctional> {
    // Q_n is inferred as the largest block index present for site n; the
    // event map must then be total over 1..=Q_n for every setting.
    let mut blocks_per_setting = vec![0usize; scenario.parties()];
    let mut parsed: Vec<((usize, usize, usize), Vec<usize>)> = Vec::with_capacity(events.len());
    for (key, outcome_indices) in events {
        let idx = parse_indices(key, 3, "events")?;
        let (site, setting, block) = (idx[0], idx[1], idx[2]);
        if site >= scenario.parties() || setting >= scenario.settings()[site] {
            return Err(Error::Validation {
                path: format!("events.{key}"),
                message: "site or setting out of range".into(),
            });
        }
        blocks_per_setting[site] = blocks_per_setting[site].max(block + 1);
        parsed.push(((site, setting, block), outcome_indices.clone()));
    }
    for (n, &q) in blocks_per_setting.iter().enumerate() {
        if q == 0 {
            return Err(Error::Validation {
                path: "events".into(),
                message: format!("no event blocks declared for site {}", n + 1),
            });
        }
    }
    let mut tables: Vec<Vec<Vec<Option<Vec<usize>>>>> = scenario
        .settings()
        .iter()
        .enumerate()
        .map(|(n, &s)| vec![vec![None; blocks_per_setting[n]]; s])
        .collect();
    for ((site, setting, block), outcome_indices) in parsed {
        tables[site][setting][block] = Some(outcome_indices);
    }
    let mut resolved = Vec::with_capacity(tables.len());
    for (n, per_site) in tables.into_iter().enumerate() {
        let mut site_rows = Vec::with_capacity(per_site.len());
        for (s, per_setting) in per_site.into_iter().enumerate() {
            let mut row = Vec::with_capacity(per_setting.len());
            for (q, block) in per_setting.into_iter().enumerate() {
                row.push(block.ok_or_else(|| Error::Validation {
                    path: format!("events.{}.{}.{}", n + 1, s + 1, q + 1),
                    message: "missing event block".into(),
                })?);
            }
            site_rows.push(row);
        }
        resolved.push(site_rows);
    }
    let keys = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let path = format!("terms[{i}]");
            Ok((
                ProbabilityKey {
                    sites: to_zero_based(&t.sites, &path)?,
                    settings: to_zero_based(&t.settings, &path)?,
                    blocks: to_zero_based(&t.blocks, &path)?,
                },
                t.gamma,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    ProbabilityFunctional::new(scenario.clone(), blocks_per_setting, resolved, keys)
}

fn functional_from_raw(scenario: &Arc<Scenario>, raw: &RawFunctional) -> Result<Functional> {
    match raw {
        RawFunctional::Correlation { terms } => {
            let keys = terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let path = format!("terms[{i}]");
                    Ok((
                        CorrelationKey::new(
                            to_zero_based(&t.sites, &path)?,
                            to_zero_based(&t.settings, &path)?,
                        ),
                        t.gamma,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Functional::Correlation(CorrelationFunctional::new(
                scenario.clone(),
                keys,
            )?))
        }
        RawFunctional::Probability { events, terms } => Ok(Functional::Probability(
            probability_from_raw(scenario, events, terms)?,
        )),
        RawFunctional::Event { terms } => {
            let parsed = terms
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let path = format!("terms[{i}]");
                    Ok(EventTerm {
                        settings: to_zero_based(&t.settings, &path)?,
                        outcomes: t.event.clone(),
                        gamma: t.gamma,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Functional::Event(EventFunctional::new(
                scenario.clone(),
                parsed,
            )?))
        }
    }
}

fn raw_from_document(doc: &ScenarioDocument) -> RawDocument {
    let scenario = &doc.scenario;
    let mut outcomes = BTreeMap::new();
    for n in 0..scenario.parties() {
        for s in 0..scenario.settings()[n] {
            let raw = match scenario.outcome_space(n, s) {
                OutcomeSpace::FiniteReal(values) => RawOutcomeSpace::Finite {
                    values: values.clone(),
                },
                OutcomeSpace::IntervalExtremes { lo, hi } => {
                    RawOutcomeSpace::Interval { lo: *lo, hi: *hi }
                }
            };
            outcomes.insert(format!("{}.{}", n + 1, s + 1), raw);
        }
    }
    let functionals = doc
        .functionals
        .iter()
        .map(|f| match f {
            Functional::Correlation(f) => RawFunctional::Correlation {
                terms: f
                    .terms()
                    .iter()
                    .map(|(k, &gamma)| RawCorrelationTerm {
                        sites: one_based(&k.sites),
                        settings: one_based(&k.settings),
                        gamma,
                    })
                    .collect(),
            },
            Functional::Probability(f) => {
                let mut events = BTreeMap::new();
                for n in 0..f.scenario().parties() {
                    for s in 0..f.scenario().settings()[n] {
                        for q in 0..f.blocks_per_setting()[n] {
                            events.insert(
                                format!("{}.{}.{}", n + 1, s + 1, q + 1),
                                f.event(n, s, q).to_vec(),
                            );
                        }
                    }
                }
                RawFunctional::Probability {
                    events,
                    terms: f
                        .terms()
                        .iter()
                        .map(|(k, &gamma)| RawProbabilityTerm {
                            sites: one_based(&k.sites),
                            settings: one_based(&k.settings),
                            blocks: one_based(&k.blocks),
                            gamma,
                        })
                        .collect(),
                }
            }
            Functional::Event(f) => RawFunctional::Event {
                terms: f
                    .terms()
                    .iter()
                    .map(|t| RawEventTerm {
                        settings: one_based(&t.settings),
                        event: t.outcomes.clone(),
                        gamma: t.gamma,
                    })
                    .collect(),
            },
        })
        .collect();
    RawDocument {
        parties: scenario.parties(),
        settings: scenario.settings().to_vec(),
        outcomes,
        functionals,
    }
}

/// Parses a scenario document from a JSON value.
pub fn document_from_json(value: &serde_json::Value) -> Result<ScenarioDocument> {
    let raw: RawDocument =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let scenario = scenario_from_raw(&raw)?;
    let functionals = raw
        .functionals
        .iter()
        .map(|f| functional_from_raw(&scenario, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioDocument {
        scenario,
        functionals,
    })
}

/// Serializes a scenario document to its JSON value.
pub fn document_to_json(doc: &ScenarioDocument) -> serde_json::Value {
    serde_json::to_value(raw_from_document(doc)).expect("document serialization cannot fail")
}

/// Loads and validates a scenario document from a file.
pub fn load_document(path: &Path) -> Result<ScenarioDocument> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    document_from_json(&value)
}

/// Writes a scenario document as pretty-printed JSON.
pub fn save_document(doc: &ScenarioDocument, path: &Path) -> Result<()> {
    let value = document_to_json(doc);
    let text = serde_json::to_string_pretty(&value).expect("json to string");
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
