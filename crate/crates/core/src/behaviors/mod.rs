//! Concrete behaviors (families of joint outcome distributions), functional
//! evaluation on them, no-signaling checks, and LHV membership.
//!
//! A behavior stores one dense probability table per setting tuple, indexed
//! row-major with the last site fastest. LHV membership is decided by
//! linear feasibility over deterministic strategies: a strategy fixes one
//! outcome index per (site, setting), and a behavior is LHV exactly when
//! nonnegative strategy weights reproduce every table. Infeasibility yields
//! a separating linear functional, re-checked independently of the solver.

mod simplex;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{
    document_from_json, document_to_json, Functional, Scenario, ScenarioDocument,
};

use simplex::{solve_equality_feasibility, Phase1Outcome};

/// Table normalization and no-signaling tolerance.
pub const TABLE_TOLERANCE: f64 = 1e-9;
/// Entries no lower than this are clamped to zero on load.
pub const ENTRY_CLAMP: f64 = 1e-12;
/// An LHV witness must reproduce every table entry this closely.
pub const WITNESS_TOLERANCE: f64 = 1e-7;
/// A NotLhv certificate must separate by more than this.
pub const CERTIFICATE_MARGIN: f64 = 1e-7;
/// Ceiling on deterministic strategies and on total table entries.
pub const FEASIBILITY_CAP: usize = 20_000;
/// Simplex pivot tolerance.
pub const PIVOT_TOLERANCE: f64 = 1e-9;

/// All setting tuples of a scenario in lexicographic order (site-major,
/// last site fastest).
pub fn setting_tuples(scenario: &Scenario) -> Vec<Vec<usize>> {
    let mut tuples = vec![Vec::new()];
    for &s in scenario.settings() {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..s).map(move |v| {
                    let mut next = t.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    tuples
}

fn grid_dims(scenario: &Scenario, settings: &[usize]) -> Vec<usize> {
    settings
        .iter()
        .enumerate()
        .map(|(n, &s)| scenario.alphabet_size(n, s))
        .collect()
}

fn grid_size(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Row-major index with the last site fastest.
fn grid_index(dims: &[usize], outcome: &[usize]) -> usize {
    outcome
        .iter()
        .zip(dims)
        .fold(0, |acc, (&o, &d)| acc * d + o)
}

fn grid_decode(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in dims.iter().enumerate().rev() {
        out[slot] = index % d;
        index /= d;
    }
    out
}

/// Family of joint probability tables, one per setting tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Arc<Scenario>,
    tables: BTreeMap<Vec<usize>, Vec<f64>>,
}

impl Behavior {
    pub fn new(scenario: Arc<Scenario>, tables: BTreeMap<Vec<usize>, Vec<f64>>) -> Result<Self> {
        if !scenario.all_finite() {
            return Err(Error::InvalidFunctional(
                "behaviors require finite outcome alphabets".into(),
            ));
        }
        let expected = setting_tuples(&scenario);
        if tables.len() != expected.len() {
            return Err(Error::Validation {
                path: "tables".into(),
                message: format!(
                    "expected {} setting tuples, got {}",
                    expected.len(),
                    tables.len()
                ),
            });
        }
        let mut clean = BTreeMap::new();
        for tuple in expected {
            let key = tuple
                .iter()
                .map(|s| (s + 1).to_string())
                .collect::<Vec<_>>()
                .join(",");
            let Some(raw) = tables.get(&tuple) else {
                return Err(Error::Validation {
                    path: format!("tables.{key}"),
                    message: "missing table".into(),
                });
            };
            let dims = grid_dims(&scenario, &tuple);
            if raw.len() != grid_size(&dims) {
                return Err(Error::Validation {
                    path: format!("tables.{key}"),
                    message: format!(
                        "table has {} entries, grid needs {}",
                        raw.len(),
                        grid_size(&dims)
                    ),
                });
            }
            let mut sum = 0.0;
            let mut entries = Vec::with_capacity(raw.len());
            for (i, &p) in raw.iter().enumerate() {
                if !p.is_finite() || p < -ENTRY_CLAMP {
                    return Err(Error::Validation {
                        path: format!("tables.{key}[{i}]"),
                        message: format!("invalid probability {p}"),
                    });
                }
                let p = p.max(0.0);
                sum += p;
                entries.push(p);
            }
            if (sum - 1.0).abs() > TABLE_TOLERANCE {
                return Err(Error::Validation {
                    path: format!("tables.{key}"),
                    message: format!("table sums to {sum}, expected 1"),
                });
            }
            clean.insert(tuple, entries);
        }
        Ok(Behavior {
            scenario,
            tables: clean,
        })
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn table(&self, settings: &[usize]) -> &[f64] {
        &self.tables[settings]
    }

    pub fn tables(&self) -> &BTreeMap<Vec<usize>, Vec<f64>> {
        &self.tables
    }

    /// Max absolute entry difference against another behavior of the same
    /// shape.
    pub fn max_entry_deviation(&self, other: &Behavior) -> f64 {
        self.tables
            .iter()
            .map(|(tuple, table)| {
                table
                    .iter()
                    .zip(&other.tables[tuple])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Expectation of the product of outcome values at `sites` under the given
/// settings, marginalizing all other sites (their settings do not matter
/// for no-signaling behaviors; setting 1 is used to pick the table).
pub fn correlation(b: &Behavior, sites: &[usize], settings: &[usize]) -> Result<f64> {
    let scenario = b.scenario();
    if sites.is_empty() || sites.len() != settings.len() {
        return Err(Error::InvalidArgument(
            "site and setting lists must be nonempty and of equal length".into(),
        ));
    }
    for w in sites.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument(
                "sites must be strictly increasing".into(),
            ));
        }
    }
    let mut full = vec![0usize; scenario.parties()];
    for (&n, &s) in sites.iter().zip(settings) {
        if n >= scenario.parties() || s >= scenario.settings()[n] {
            return Err(Error::InvalidArgument(format!(
                "site {} / setting {} out of range",
                n + 1,
                s + 1
            )));
        }
        full[n] = s;
    }
    let dims = grid_dims(scenario, &full);
    let table = b.table(&full);
    let mut acc = 0.0;
    for (idx, &p) in table.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let outcome = grid_decode(&dims, idx);
        let mut prod = p;
        for (&n, &s) in sites.iter().zip(settings) {
            prod *= scenario.outcome_space(n, s).values().unwrap()[outcome[n]];
        }
        acc += prod;
    }
    Ok(acc)
}

fn require_same_shape(b: &Behavior, f: &Functional) -> Result<()> {
    if !b.scenario().same_shape(f.scenario()) {
        return Err(Error::ScenarioMismatch(
            "behavior and functional scenarios differ in parties, settings, or alphabet sizes"
                .into(),
        ));
    }
    Ok(())
}

/// Value of a functional on a behavior: correlation functionals contract
/// outcome values against correlations, probability functionals sum event
/// probabilities (including lower-order marginal terms), event functionals
/// sum the probabilities of their outcome sets.
pub fn evaluate_functional(b: &Behavior, f: &Functional) -> Result<f64> {
    require_same_shape(b, f)?;
    let scenario = b.scenario();
    match f {
        Functional::Correlation(f) => {
            // correlation values depend on the outcome values themselves
            for n in 0..scenario.parties() {
                for s in 0..scenario.settings()[n] {
                    if scenario.outcome_space(n, s).values()
                        != f.scenario().outcome_space(n, s).values()
                    {
                        return Err(Error::ScenarioMismatch(format!(
                            "outcome values differ at site {}, setting {}",
                            n + 1,
                            s + 1
                        )));
                    }
                }
            }
            let mut acc = 0.0;
            for (key, &gamma) in f.terms() {
                acc += gamma * correlation(b, &key.sites, &key.settings)?;
            }
            Ok(acc)
        }
        Functional::Probability(f) => {
            let mut acc = 0.0;
            for (key, &gamma) in f.terms() {
                let mut full = vec![0usize; scenario.parties()];
                for (&n, &s) in key.sites.iter().zip(&key.settings) {
                    full[n] = s;
                }
                let dims = grid_dims(scenario, &full);
                let table = b.table(&full);
                let mut prob = 0.0;
                for (idx, &p) in table.iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    let outcome = grid_decode(&dims, idx);
                    let inside = key
                        .sites
                        .iter()
                        .zip(key.settings.iter().zip(&key.blocks))
                        .all(|(&n, (&s, &q))| f.event(n, s, q).binary_search(&outcome[n]).is_ok());
                    if inside {
                        prob += p;
                    }
                }
                acc += gamma * prob;
            }
            Ok(acc)
        }
        Functional::Event(f) => {
            let mut acc = 0.0;
            for term in f.terms() {
                let dims = grid_dims(scenario, &term.settings);
                let table = b.table(&term.settings);
                let prob: f64 = term
                    .outcomes
                    .iter()
                    .map(|tuple| table[grid_index(&dims, tuple)])
                    .sum();
                acc += term.gamma * prob;
            }
            Ok(acc)
        }
    }
}

/// One marginal disagreement: the same site subset, two setting tuples that
/// agree on it, and the largest entry deviation between the marginals.
#[derive(Debug, Clone, Serialize)]
pub struct NsViolation {
    /// 0-based site indices.
    pub sites: Vec<usize>,
    pub settings_a: Vec<usize>,
    pub settings_b: Vec<usize>,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoSignalingReport {
    pub passed: bool,
    pub tolerance: f64,
    /// Largest marginal deviation seen anywhere, passing or not.
    pub max_deviation: f64,
    pub violations: Vec<NsViolation>,
}

fn marginal(b: &Behavior, sites: &[usize], tuple: &[usize]) -> Vec<f64> {
    let scenario = b.scenario();
    let dims = grid_dims(scenario, tuple);
    let sub_dims: Vec<usize> = sites.iter().map(|&n| dims[n]).collect();
    let mut out = vec![0.0; grid_size(&sub_dims)];
    for (idx, &p) in b.table(tuple).iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let outcome = grid_decode(&dims, idx);
        let sub: Vec<usize> = sites.iter().map(|&n| outcome[n]).collect();
        out[grid_index(&sub_dims, &sub)] += p;
    }
    out
}

/// Checks that every marginal depends only on the settings of its own
/// sites: for every proper site subset and every pair of setting tuples
/// agreeing on it, the marginal tables must match within tolerance.
pub fn check_no_signaling(b: &Behavior) -> NoSignalingReport {
    let scenario = b.scenario();
    let parties = scenario.parties();
    let tuples = setting_tuples(scenario);
    let mut max_deviation = 0.0f64;
    let mut violations = Vec::new();
    for mask in 1..(1u32 << parties) - 1 {
        let sites: Vec<usize> = (0..parties).filter(|&n| mask >> n & 1 == 1).collect();
        for (i, ta) in tuples.iter().enumerate() {
            for tb in &tuples[i + 1..] {
                if sites.iter().any(|&n| ta[n] != tb[n]) {
                    continue;
                }
                let ma = marginal(b, &sites, ta);
                let mb = marginal(b, &sites, tb);
                let dev = ma
                    .iter()
                    .zip(&mb)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                max_deviation = max_deviation.max(dev);
                if dev > TABLE_TOLERANCE {
                    violations.push(NsViolation {
                        sites: sites.clone(),
                        settings_a: ta.clone(),
                        settings_b: tb.clone(),
                        max_deviation: dev,
                    });
                }
            }
        }
    }
    NoSignalingReport {
        passed: violations.is_empty(),
        tolerance: TABLE_TOLERANCE,
        max_deviation,
        violations,
    }
}

/// Number of deterministic strategies: the product of all alphabet sizes
/// over every (site, setting).
pub fn strategy_count(scenario: &Scenario) -> u128 {
    let mut count: u128 = 1;
    for n in 0..scenario.parties() {
        for s in 0..scenario.settings()[n] {
            count = count.saturating_mul(scenario.alphabet_size(n, s) as u128);
        }
    }
    count
}

fn strategy_radices(scenario: &Scenario) -> Vec<Vec<usize>> {
    (0..scenario.parties())
        .map(|n| {
            (0..scenario.settings()[n])
                .map(|s| scenario.alphabet_size(n, s))
                .collect()
        })
        .collect()
}

/// Outcome index chosen by strategy `k` at every (site, setting); digits are
/// site-major, setting-minor, first slot most significant.
pub fn strategy_outcomes(scenario: &Scenario, k: u64) -> Vec<Vec<usize>> {
    let radices = strategy_radices(scenario);
    let mut digits: Vec<Vec<usize>> = radices.iter().map(|r| vec![0; r.len()]).collect();
    let mut rest = k;
    for n in (0..radices.len()).rev() {
        for s in (0..radices[n].len()).rev() {
            digits[n][s] = (rest % radices[n][s] as u64) as usize;
            rest /= radices[n][s] as u64;
        }
    }
    digits
}

/// Probability vector over deterministic strategies: a discrete joint
/// measure over all outcomes of all settings.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    scenario: Arc<Scenario>,
    weights: Vec<f64>,
}

impl LhvModel {
    pub fn new(scenario: Arc<Scenario>, weights: Vec<f64>) -> Result<Self> {
        let count = strategy_count(&scenario);
        if count != weights.len() as u128 {
            return Err(Error::Validation {
                path: "weights".into(),
                message: format!("expected {count} strategy weights, got {}", weights.len()),
            });
        }
        let mut sum = 0.0;
        let mut clean = Vec::with_capacity(weights.len());
        for (k, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < -ENTRY_CLAMP {
                return Err(Error::Validation {
                    path: format!("weights[{k}]"),
                    message: format!("invalid weight {w}"),
                });
            }
            let w = w.max(0.0);
            sum += w;
            clean.push(w);
        }
        if (sum - 1.0).abs() > TABLE_TOLERANCE {
            return Err(Error::Validation {
                path: "weights".into(),
                message: format!("weights sum to {sum}, expected 1"),
            });
        }
        Ok(LhvModel {
            scenario,
            weights: clean,
        })
    }

    /// All weight on one strategy.
    pub fn point_mass(scenario: Arc<Scenario>, strategy: u64) -> Result<Self> {
        let count = strategy_count(&scenario);
        if u128::from(strategy) >= count {
            return Err(Error::InvalidArgument(format!(
                "strategy {strategy} out of range 0..{count}"
            )));
        }
        let mut weights = vec![0.0; count as usize];
        weights[strategy as usize] = 1.0;
        LhvModel::new(scenario, weights)
    }

    pub fn uniform(scenario: Arc<Scenario>) -> Result<Self> {
        let count = strategy_count(&scenario) as usize;
        LhvModel::new(scenario, vec![1.0 / count as f64; count])
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Mixes the deterministic strategies into tables: the marginal of the
/// model's joint measure at each setting tuple.
pub fn behavior_from_lhv(model: &LhvModel) -> Behavior {
    let scenario = model.scenario();
    let tuples = setting_tuples(scenario);
    let mut tables: BTreeMap<Vec<usize>, Vec<f64>> = tuples
        .iter()
        .map(|t| (t.clone(), vec![0.0; grid_size(&grid_dims(scenario, t))]))
        .collect();
    for (k, &w) in model.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let choice = strategy_outcomes(scenario, k as u64);
        for tuple in &tuples {
            let dims = grid_dims(scenario, tuple);
            let outcome: Vec<usize> = tuple
                .iter()
                .enumerate()
                .map(|(n, &s)| choice[n][s])
                .collect();
            tables.get_mut(tuple).unwrap()[grid_index(&dims, &outcome)] += w;
        }
    }
    Behavior::new(model.scenario().clone(), tables).expect("an LHV mixture is a valid behavior")
}

/// Separating linear functional on probability entries: its value on the
/// behavior strictly exceeds its maximum over all deterministic strategies.
#[derive(Debug, Clone)]
pub struct LhvCertificate {
    /// Coefficient per table entry, in the behavior's table layout.
    pub entry_coefficients: BTreeMap<Vec<usize>, Vec<f64>>,
    /// Coefficient on the normalization row of the feasibility system.
    pub normalization_coefficient: f64,
    pub value_on_behavior: f64,
    pub max_over_strategies: f64,
    /// `value_on_behavior - max_over_strategies`, recomputed independently
    /// of the solver.
    pub margin: f64,
}

/// Outcome of the LHV membership decision.
#[derive(Debug, Clone)]
pub enum LhvVerdict {
    /// A witness model; `behavior_from_lhv` reproduces the tables within
    /// [`WITNESS_TOLERANCE`] per entry.
    Lhv(LhvModel),
    /// A separating certificate with margin above [`CERTIFICATE_MARGIN`].
    NotLhv(LhvCertificate),
    /// The solver landed within tolerance of the membership boundary;
    /// neither a witness nor a certificate is trustworthy.
    BoundaryInconclusive { detail: String },
}

/// Decides LHV membership by linear feasibility over deterministic
/// strategies. Signaling behaviors are rejected with an error before the
/// solve; verdicts are self-certifying either way.
pub fn is_lhv(b: &Behavior) -> Result<LhvVerdict> {
    let ns = check_no_signaling(b);
    if !ns.passed {
        return Err(Error::SignalingBehavior {
            max_deviation: ns.max_deviation,
            tolerance: ns.tolerance,
        });
    }
    let scenario = b.scenario();
    let strategies = strategy_count(scenario);
    if strategies > FEASIBILITY_CAP as u128 {
        return Err(Error::FeasibilityCapExceeded(format!(
            "{strategies} deterministic strategies exceed the cap of {FEASIBILITY_CAP}"
        )));
    }
    let strategies = strategies as usize;
    let tuples = setting_tuples(scenario);
    let entries: usize = tuples
        .iter()
        .map(|t| grid_size(&grid_dims(scenario, t)))
        .sum();
    if entries > FEASIBILITY_CAP {
        return Err(Error::FeasibilityCapExceeded(format!(
            "{entries} table entries exceed the cap of {FEASIBILITY_CAP}"
        )));
    }

    // rows: one per table entry in tuple-lex then row-major order, plus the
    // normalization row; columns: one per strategy
    let rows = entries + 1;
    let mut a = vec![vec![0.0f64; strategies]; rows];
    let mut rhs = Vec::with_capacity(rows);
    let mut row_base = BTreeMap::new();
    {
        let mut base = 0usize;
        for tuple in &tuples {
            row_base.insert(tuple.clone(), base);
            let table = b.table(tuple);
            rhs.extend_from_slice(table);
            base += table.len();
        }
        rhs.push(1.0);
    }
    for k in 0..strategies {
        let choice = strategy_outcomes(scenario, k as u64);
        for tuple in &tuples {
            let dims = grid_dims(scenario, tuple);
            let outcome: Vec<usize> = tuple
                .iter()
                .enumerate()
                .map(|(n, &s)| choice[n][s])
                .collect();
            a[row_base[tuple] + grid_index(&dims, &outcome)][k] = 1.0;
        }
        a[rows - 1][k] = 1.0;
    }

    match solve_equality_feasibility(&a, &rhs, PIVOT_TOLERANCE)? {
        Phase1Outcome::Feasible(weights) => {
            let total: f64 = weights.iter().sum();
            let weights: Vec<f64> = if total > 0.0 {
                weights.iter().map(|w| w / total).collect()
            } else {
                weights
            };
            let model = LhvModel::new(scenario.clone(), weights)?;
            let reproduced = behavior_from_lhv(&model);
            let deviation = b.max_entry_deviation(&reproduced);
            if deviation <= WITNESS_TOLERANCE {
                Ok(LhvVerdict::Lhv(model))
            } else {
                Ok(LhvVerdict::BoundaryInconclusive {
                    detail: format!(
                        "feasible weights reproduce tables only to {deviation:.3e} per entry"
                    ),
                })
            }
        }
        Phase1Outcome::Infeasible { dual, objective } => {
            let mut entry_coefficients = BTreeMap::new();
            for tuple in &tuples {
                let base = row_base[tuple];
                let len = grid_size(&grid_dims(scenario, tuple));
                entry_coefficients.insert(tuple.clone(), dual[base..base + len].to_vec());
            }
            let normalization_coefficient = dual[rows - 1];
            let value_on_behavior: f64 = tuples
                .iter()
                .map(|t| {
                    b.table(t)
                        .iter()
                        .zip(&entry_coefficients[t])
                        .map(|(p, c)| p * c)
                        .sum::<f64>()
                })
                .sum();
            let max_over_strategies = (0..strategies)
                .map(|k| {
                    let choice = strategy_outcomes(scenario, k as u64);
                    tuples
                        .iter()
                        .map(|tuple| {
                            let dims = grid_dims(scenario, tuple);
                            let outcome: Vec<usize> = tuple
                                .iter()
                                .enumerate()
                                .map(|(n, &s)| choice[n][s])
                                .collect();
                            entry_coefficients[tuple][grid_index(&dims, &outcome)]
                        })
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let margin = value_on_behavior - max_over_strategies;
            if margin > CERTIFICATE_MARGIN {
                Ok(LhvVerdict::NotLhv(LhvCertificate {
                    entry_coefficients,
                    normalization_coefficient,
                    value_on_behavior,
                    max_over_strategies,
                    margin,
                }))
            } else {
                Ok(LhvVerdict::BoundaryInconclusive {
                    detail: format!(
                        "phase-1 residual {objective:.3e} but certificate margin {margin:.3e} is within tolerance"
                    ),
                })
            }
        }
    }
}

/// The no-signaling box with CHSH value 4: perfectly correlated outcomes
/// except under the (2, 2) setting pair, where they anticorrelate.
pub fn pr_box() -> Behavior {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let mut tables = BTreeMap::new();
    for s1 in 0..2usize {
        for s2 in 0..2usize {
            let anticorrelated = s1 == 1 && s2 == 1;
            let mut table = vec![0.0; 4];
            for x in 0..2usize {
                for y in 0..2usize {
                    let same = x == y;
                    if same != anticorrelated {
                        table[x * 2 + y] = 0.5;
                    }
                }
            }
            tables.insert(vec![s1, s2], table);
        }
    }
    Behavior::new(scenario, tables).expect("PR box tables are valid")
}

/// Binary 2x2 behavior with uniform marginals and the given correlation
/// matrix: p(x, y | a, b) = (1 + x y E[a][b]) / 4.
pub fn correlated_binary(e: [[f64; 2]; 2]) -> Result<Behavior> {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let mut tables = BTreeMap::new();
    for (a, row) in e.iter().enumerate() {
        for (b, &corr) in row.iter().enumerate() {
            if corr.abs() > 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "correlation {corr} at ({}, {}) is outside [-1, 1]",
                    a + 1,
                    b + 1
                )));
            }
            let mut table = vec![0.0; 4];
            for (xi, x) in [(0usize, -1.0), (1, 1.0)] {
                for (yi, y) in [(0usize, -1.0), (1, 1.0)] {
                    table[xi * 2 + yi] = (1.0 + x * y * corr) / 4.0;
                }
            }
            tables.insert(vec![a, b], table);
        }
    }
    Behavior::new(scenario, tables)
}

/// Statistics of projective measurements on the two-qubit singlet along
/// coplanar axes pi/4 apart, outcomes relabeled so the CHSH combination
/// comes out at +2*sqrt(2).
pub fn singlet_statistics() -> Behavior {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    correlated_binary([[c, c], [c, -c]]).expect("singlet correlations are valid")
}

#[derive(Serialize, Deserialize)]
struct RawBehavior {
    scenario: serde_json::Value,
    tables: BTreeMap<String, Vec<f64>>,
}

/// Parses a behavior file: a scenario document plus one probability table
/// per setting tuple, keyed "s1,...,sN" with 1-based settings.
pub fn behavior_from_json(value: &serde_json::Value) -> Result<Behavior> {
    let raw: RawBehavior =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let document = document_from_json(&raw.scenario)?;
    let mut tables = BTreeMap::new();
    for (key, table) in raw.tables {
        let tuple = key
            .split(',')
            .map(|p| {
                let v: usize = p.trim().parse().map_err(|_| Error::Validation {
                    path: format!("tables.{key}"),
                    message: format!("non-integer setting `{p}`"),
                })?;
                if v == 0 {
                    return Err(Error::Validation {
                        path: format!("tables.{key}"),
                        message: "settings are 1-based".into(),
                    });
                }
                Ok(v - 1)
            })
            .collect::<Result<Vec<usize>>>()?;
        tables.insert(tuple, table);
    }
    Behavior::new(document.scenario, tables)
}

pub fn behavior_to_json(b: &Behavior) -> serde_json::Value {
    let document = ScenarioDocument {
        scenario: b.scenario().clone(),
        functionals: Vec::new(),
    };
    let tables: BTreeMap<String, Vec<f64>> = b
        .tables()
        .iter()
        .map(|(tuple, table)| {
            (
                tuple
                    .iter()
                    .map(|s| (s + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                table.clone(),
            )
        })
        .collect();
    serde_json::to_value(RawBehavior {
        scenario: document_to_json(&document),
        tables,
    })
    .expect("behavior serialization cannot fail")
}

pub fn load_behavior(path: &Path) -> Result<Behavior> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    behavior_from_json(&value)
}

#[cfg(test)]
mod tests;
