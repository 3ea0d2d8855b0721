//! Catalog of named inequality families, each paired with its published
//! LHV bound for regression testing.
//!
//! Every generator emits exact small-integer coefficients, so all bound
//! computations on them are exact in 64-bit floating point. Bipartite
//! matrices use the (setting, block) double-index flattening with settings
//! major and blocks minor; that single ordering is used everywhere a matrix
//! appears.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scenario::{
    CorrelationFunctional, CorrelationKey, EventFunctional, EventTerm, Functional,
    ProbabilityFunctional, ProbabilityKey, Scenario,
};

/// A functional together with the bound its source reports, when any.
/// Published bounds are regression targets: the exact computation in
/// [`crate::forms`] must reproduce them.
#[derive(Debug, Clone)]
pub struct NamedInequality {
    pub name: String,
    pub functional: Functional,
    pub published_min: Option<f64>,
    pub published_max: Option<f64>,
}

const CHSH_GAMMA: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, -1.0]];

/// CHSH correlation functional with the minus sign at `sign_cell`
/// (row-major cell 1..=4; the canonical form uses cell 4).
pub fn chsh(sign_cell: usize) -> Result<NamedInequality> {
    chsh_signed(sign_cell, false)
}

/// CHSH variant with the minus at `sign_cell` and an optional global sign
/// flip; both leave the bound at 2.
pub fn chsh_signed(sign_cell: usize, negated: bool) -> Result<NamedInequality> {
    if !(1..=4).contains(&sign_cell) {
        return Err(Error::InvalidArgument(format!(
            "sign cell must be 1..=4, got {sign_cell}"
        )));
    }
    let minus = sign_cell - 1;
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let global = if negated { -1.0 } else { 1.0 };
    let terms = (0..2).flat_map(|i| {
        (0..2).map(move |k| {
            let sign = if i * 2 + k == minus { -1.0 } else { 1.0 };
            (CorrelationKey::new(vec![0, 1], vec![i, k]), global * sign)
        })
    });
    Ok(NamedInequality {
        name: "chsh".into(),
        functional: Functional::Correlation(CorrelationFunctional::new(scenario, terms)?),
        published_min: Some(-2.0),
        published_max: Some(2.0),
    })
}

/// Clauser-Horne probability functional: 2x2 settings, one event block per
/// setting, bilinear part with CHSH signs and marginal parts -P_1(A_1),
/// -P_2(B_1). Published bounds: [-1, 0].
pub fn ch() -> NamedInequality {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    // block 1 at every (site, setting) is the event "outcome +1"
    let events = vec![vec![vec![vec![1]]; 2]; 2];
    let mut terms: Vec<(ProbabilityKey, f64)> = Vec::new();
    for i in 0..2 {
        for k in 0..2 {
            terms.push((
                ProbabilityKey {
                    sites: vec![0, 1],
                    settings: vec![i, k],
                    blocks: vec![0, 0],
                },
                CHSH_GAMMA[i][k],
            ));
        }
    }
    for site in 0..2 {
        terms.push((
            ProbabilityKey {
                sites: vec![site],
                settings: vec![0],
                blocks: vec![0],
            },
            -1.0,
        ));
    }
    let functional =
        ProbabilityFunctional::new(scenario, vec![1, 1], events, terms).expect("CH is valid");
    NamedInequality {
        name: "ch".into(),
        functional: Functional::Probability(functional),
        published_min: Some(-1.0),
        published_max: Some(0.0),
    }
}

/// Full-correlation coefficients of the Mermin-Klyshko family, built from
/// the CHSH base by the recursion
///
///   gamma(s_1..s_n) = gamma(s_1..s_{n-1})
///                   + (delta_{s_n,1} - delta_{s_n,2}) * gamma(bar s_1..bar s_{n-1})
///
/// Setting tuples are 0-based here; bar(s) = 1 - s.
pub fn mk_setting_coefficients(parties: usize) -> Result<BTreeMap<Vec<usize>, f64>> {
    if parties < 2 {
        return Err(Error::InvalidArgument(format!(
            "the MK family needs at least 2 parties, got {parties}"
        )));
    }
    let mut gamma: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for i in 0..2 {
        for k in 0..2 {
            gamma.insert(vec![i, k], CHSH_GAMMA[i][k]);
        }
    }
    for _ in 2..parties {
        let bar = |key: &[usize]| -> Vec<usize> { key.iter().map(|&s| 1 - s).collect() };
        let mut next = BTreeMap::new();
        for (key, &value) in &gamma {
            let barred = gamma[&bar(key)];
            let mut with_one = key.clone();
            with_one.push(0);
            next.insert(with_one, value + barred);
            let mut with_two = key.clone();
            with_two.push(1);
            next.insert(with_two, value - barred);
        }
        gamma = next;
    }
    gamma.retain(|_, v| *v != 0.0);
    Ok(gamma)
}

/// Mermin-Klyshko inequality for N parties with two settings each.
/// Published bound: max |F| = 2^(N-1); reduces to CHSH at N = 2.
pub fn mk_coefficients(parties: usize) -> Result<NamedInequality> {
    let gamma = mk_setting_coefficients(parties)?;
    let scenario = Arc::new(Scenario::uniform_binary(parties, 2));
    let sites: Vec<usize> = (0..parties).collect();
    let functional = CorrelationFunctional::new(
        scenario,
        gamma
            .into_iter()
            .map(|(settings, g)| (CorrelationKey::new(sites.clone(), settings), g)),
    )?;
    let bound = (1u64 << (parties - 1)) as f64;
    Ok(NamedInequality {
        name: format!("mk{parties}"),
        functional: Functional::Correlation(functional),
        published_min: Some(-bound),
        published_max: Some(bound),
    })
}

/// Collins-Gisin I4422: 4x4 settings, one block per setting. Only the
/// upper bound 0 is published.
pub fn collins_gisin_4422() -> NamedInequality {
    let gamma: [[f64; 4]; 4] = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, 0.0],
        [1.0, -1.0, 0.0, 0.0],
    ];
    let gamma_1 = [-1.0, 0.0, 0.0, 0.0];
    let gamma_2 = [-3.0, -2.0, -1.0, 0.0];
    let scenario = Arc::new(Scenario::uniform_binary(2, 4));
    let events = vec![vec![vec![vec![1]]; 4]; 2];
    let mut terms: Vec<(ProbabilityKey, f64)> = Vec::new();
    for i in 0..4 {
        for k in 0..4 {
            if gamma[i][k] != 0.0 {
                terms.push((
                    ProbabilityKey {
                        sites: vec![0, 1],
                        settings: vec![i, k],
                        blocks: vec![0, 0],
                    },
                    gamma[i][k],
                ));
            }
        }
    }
    for (site, marginals) in [(0usize, gamma_1), (1usize, gamma_2)] {
        for (s, &g) in marginals.iter().enumerate() {
            if g != 0.0 {
                terms.push((
                    ProbabilityKey {
                        sites: vec![site],
                        settings: vec![s],
                        blocks: vec![0],
                    },
                    g,
                ));
            }
        }
    }
    let functional =
        ProbabilityFunctional::new(scenario, vec![1, 1], events, terms).expect("I4422 is valid");
    NamedInequality {
        name: "cg4422".into(),
        functional: Functional::Probability(functional),
        published_min: None,
        published_max: Some(0.0),
    }
}

/// Collins-Gisin I2233: 2x2 settings, two blocks per setting over ternary
/// alphabets. Only the upper bound 0 is published.
pub fn collins_gisin_2233() -> NamedInequality {
    // rows (i,j), columns (k,l) in (setting, block) order (1,1),(1,2),(2,1),(2,2)
    let gamma: [[f64; 4]; 4] = [
        [1.0, 1.0, 0.0, 1.0],
        [1.0, 0.0, 1.0, 1.0],
        [0.0, 1.0, 0.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
    ];
    let marginal = [-1.0, -1.0, 0.0, 0.0];
    let scenario =
        Arc::new(Scenario::uniform_finite(2, 2, vec![-1.0, 0.0, 1.0]).expect("ternary scenario"));
    // blocks 1 and 2 are the first two outcomes; the third keeps the union proper
    let events = vec![vec![vec![vec![0], vec![1]]; 2]; 2];
    let mut terms: Vec<(ProbabilityKey, f64)> = Vec::new();
    for row in 0..4 {
        for col in 0..4 {
            if gamma[row][col] != 0.0 {
                let (i, j) = (row / 2, row % 2);
                let (k, l) = (col / 2, col % 2);
                terms.push((
                    ProbabilityKey {
                        sites: vec![0, 1],
                        settings: vec![i, k],
                        blocks: vec![j, l],
                    },
                    gamma[row][col],
                ));
            }
        }
    }
    for site in 0..2 {
        for (pos, &g) in marginal.iter().enumerate() {
            if g != 0.0 {
                terms.push((
                    ProbabilityKey {
                        sites: vec![site],
                        settings: vec![pos / 2],
                        blocks: vec![pos % 2],
                    },
                    g,
                ));
            }
        }
    }
    let functional =
        ProbabilityFunctional::new(scenario, vec![2, 2], events, terms).expect("I2233 is valid");
    NamedInequality {
        name: "cg2233".into(),
        functional: Functional::Probability(functional),
        published_min: None,
        published_max: Some(0.0),
    }
}

/// Largest outcome count whose 2x2-setting grid (K^4 assignments) fits the
/// default enumeration cap.
pub const ZOHREN_GILL_MAX_OUTCOMES: usize = 181;

/// Zohren-Gill event functional on outcomes {1, ..., K} per (site, setting):
/// a cycle of four order events, each with coefficient 1. Three comparisons
/// are strict; the one closing the cycle is not, which is what forces at
/// least one event to fire under every deterministic assignment. Published
/// bound: inf = 1 for every K.
pub fn zohren_gill(outcomes: usize) -> Result<NamedInequality> {
    if !(2..=ZOHREN_GILL_MAX_OUTCOMES).contains(&outcomes) {
        return Err(Error::InvalidArgument(format!(
            "outcome count must be 2..={ZOHREN_GILL_MAX_OUTCOMES}, got {outcomes}"
        )));
    }
    let values: Vec<f64> = (1..=outcomes).map(|v| v as f64).collect();
    let scenario = Arc::new(Scenario::uniform_finite(2, 2, values)?);
    enum Order {
        BobGreater,
        AliceGreater,
        AliceAtLeast,
    }
    let cycle = [
        (0usize, 0usize, Order::BobGreater), // lambda_2^(1) >  lambda_1^(1)
        (0, 1, Order::AliceGreater),         // lambda_1^(1) >  lambda_2^(2)
        (1, 1, Order::BobGreater),           // lambda_2^(2) >  lambda_1^(2)
        (1, 0, Order::AliceAtLeast),         // lambda_1^(2) >= lambda_2^(1)
    ];
    let terms = cycle
        .into_iter()
        .map(|(sa, sb, order)| {
            let mut event = Vec::new();
            for a in 0..outcomes {
                for b in 0..outcomes {
                    let hit = match order {
                        Order::BobGreater => b > a,
                        Order::AliceGreater => a > b,
                        Order::AliceAtLeast => a >= b,
                    };
                    if hit {
                        event.push(vec![a, b]);
                    }
                }
            }
            EventTerm {
                settings: vec![sa, sb],
                outcomes: event,
                gamma: 1.0,
            }
        })
        .collect();
    let functional = EventFunctional::new(scenario, terms)?;
    Ok(NamedInequality {
        name: format!("zg{outcomes}"),
        functional: Functional::Event(functional),
        published_min: Some(1.0),
        published_max: None,
    })
}
