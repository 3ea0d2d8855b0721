use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use super::*;
use crate::forms::{lhv_bounds, ScanConfig};
use crate::generators;
use crate::scenario::{OutcomeSpace, Scenario};

fn seeded_model(scenario: &Arc<Scenario>, seed: u64) -> LhvModel {
    let count = strategy_count(scenario) as usize;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..count).map(|_| rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    LhvModel::new(scenario.clone(), weights).unwrap()
}

#[test]
fn all_plus_deterministic_correlations_are_one() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    // strategy choosing outcome index 1 (+1) everywhere is the last one
    let strategy = strategy_count(&scenario) as u64 - 1;
    let b = behavior_from_lhv(&LhvModel::point_mass(scenario, strategy).unwrap());
    for (sites, settings) in [
        (vec![0], vec![0]),
        (vec![1], vec![1]),
        (vec![0, 1], vec![0, 1]),
        (vec![0, 1], vec![1, 1]),
    ] {
        assert_eq!(correlation(&b, &sites, &settings).unwrap(), 1.0);
    }
}

#[test]
fn independent_uniform_correlation_is_zero() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let b = behavior_from_lhv(&LhvModel::uniform(scenario).unwrap());
    assert_eq!(correlation(&b, &[0, 1], &[0, 0]).unwrap(), 0.0);
    assert_eq!(correlation(&b, &[0], &[1]).unwrap(), 0.0);
}

#[test]
fn singlet_table_correlation_at_pi_over_four() {
    // p(x, y) = (1 - x y cos(pi/4)) / 4 has <xy> = -cos(pi/4)
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let b = correlated_binary([[-c, -c], [-c, -c]]).unwrap();
    let value = correlation(&b, &[0, 1], &[0, 0]).unwrap();
    assert!((value + c).abs() < 1e-12);
}

#[test]
fn chsh_on_singlet_statistics_is_two_sqrt_two() {
    let b = singlet_statistics();
    let chsh = generators::chsh(4).unwrap();
    let value = evaluate_functional(&b, &chsh.functional).unwrap();
    assert!((value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
}

#[test]
fn full_correlation_functionals_vanish_on_uniform_behavior() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let b = behavior_from_lhv(&LhvModel::uniform(scenario).unwrap());
    let chsh = generators::chsh(4).unwrap();
    assert_eq!(evaluate_functional(&b, &chsh.functional).unwrap(), 0.0);
}

#[test]
fn ch_attains_its_minimum_on_a_deterministic_behavior() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    // site 1: +1 under setting 1, -1 under setting 2; same for site 2,
    // so A1, B1 are certain and A2, B2 impossible
    let choice = [[1usize, 0], [1, 0]];
    let mut strategy = 0u64;
    for site in 0..2 {
        for setting in 0..2 {
            strategy = strategy * 2 + choice[site][setting] as u64;
        }
    }
    let b = behavior_from_lhv(&LhvModel::point_mass(scenario, strategy).unwrap());
    let ch = generators::ch();
    assert_eq!(evaluate_functional(&b, &ch.functional).unwrap(), -1.0);
}

#[test]
fn pr_box_chsh_value_is_four() {
    let b = pr_box();
    let chsh = generators::chsh(4).unwrap();
    assert_eq!(evaluate_functional(&b, &chsh.functional).unwrap(), 4.0);
}

#[test]
fn lhv_induced_behavior_passes_no_signaling() {
    let scenario = Arc::new(Scenario::uniform_binary(3, 2));
    let b = behavior_from_lhv(&seeded_model(&scenario, 5));
    let report = check_no_signaling(&b);
    assert!(report.passed);
    assert!(report.max_deviation <= 1e-12);
}

#[test]
fn pr_box_passes_no_signaling() {
    let report = check_no_signaling(&pr_box());
    assert!(report.passed, "PR box marginals are uniform");
}

#[test]
fn perturbed_table_fails_no_signaling_with_named_pair() {
    let mut tables = pr_box().tables().clone();
    // disturb only the (1, 1) table and renormalize it
    let table = tables.get_mut(&vec![0, 0]).unwrap();
    table[0] += 0.01;
    let sum: f64 = table.iter().sum();
    for p in table.iter_mut() {
        *p /= sum;
    }
    let b = Behavior::new(Arc::new(Scenario::uniform_binary(2, 2)), tables).unwrap();
    let report = check_no_signaling(&b);
    assert!(!report.passed);
    let v = &report.violations[0];
    assert!(v.max_deviation > 1e-3);
    assert!(v.settings_a != v.settings_b);
    // every reported pair agrees on the violating subset
    for &n in &v.sites {
        assert_eq!(v.settings_a[n], v.settings_b[n]);
    }
}

#[test]
fn point_mass_behavior_is_deterministic() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let b = behavior_from_lhv(&LhvModel::point_mass(scenario, 5).unwrap());
    for table in b.tables().values() {
        let ones = table.iter().filter(|&&p| p == 1.0).count();
        let zeros = table.iter().filter(|&&p| p == 0.0).count();
        assert_eq!(ones, 1);
        assert_eq!(zeros, table.len() - 1);
    }
}

#[test]
fn uniform_weights_give_uniform_tables() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let b = behavior_from_lhv(&LhvModel::uniform(scenario).unwrap());
    for table in b.tables().values() {
        for &p in table {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn strategy_outcomes_digit_order_is_site_major() {
    let scenario = Arc::new(Scenario::uniform_finite(2, 2, vec![0.0, 1.0, 2.0]).unwrap());
    assert_eq!(strategy_count(&scenario), 81);
    let outcomes = strategy_outcomes(&scenario, 80);
    assert_eq!(outcomes, vec![vec![2, 2], vec![2, 2]]);
    let outcomes = strategy_outcomes(&scenario, 1);
    assert_eq!(outcomes, vec![vec![0, 0], vec![0, 1]]);
}

#[test]
fn random_lhv_behaviors_respect_generated_inequalities() {
    let cfg = ScanConfig::default().with_threads(Some(1));
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let candidates = [
        generators::chsh(4).unwrap(),
        generators::ch(),
        generators::mk_coefficients(2).unwrap(),
        generators::zohren_gill(2).unwrap(),
    ];
    for seed in 0..25 {
        let b = behavior_from_lhv(&seeded_model(&scenario, seed));
        for ineq in &candidates {
            let bounds = lhv_bounds(&ineq.functional, &cfg).unwrap();
            let value = evaluate_functional(&b, &ineq.functional).unwrap();
            assert!(
                value >= bounds.min - 1e-9 && value <= bounds.max + 1e-9,
                "{} violated at seed {seed}: {value} outside [{}, {}]",
                ineq.name,
                bounds.min,
                bounds.max
            );
        }
    }
}

#[test]
fn membership_accepts_constructed_lhv_behaviors() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    for seed in 0..10 {
        let b = behavior_from_lhv(&seeded_model(&scenario, seed));
        match is_lhv(&b).unwrap() {
            LhvVerdict::Lhv(model) => {
                let reproduced = behavior_from_lhv(&model);
                assert!(b.max_entry_deviation(&reproduced) <= WITNESS_TOLERANCE);
            }
            other => panic!("expected LHV verdict at seed {seed}, got {other:?}"),
        }
    }
}

#[test]
fn membership_rejects_pr_box_with_positive_margin() {
    match is_lhv(&pr_box()).unwrap() {
        LhvVerdict::NotLhv(cert) => {
            assert!(cert.margin > CERTIFICATE_MARGIN);
            // re-verify the separation directly
            let value: f64 = pr_box()
                .tables()
                .iter()
                .map(|(tuple, table)| {
                    table
                        .iter()
                        .zip(&cert.entry_coefficients[tuple])
                        .map(|(p, c)| p * c)
                        .sum::<f64>()
                })
                .sum();
            assert!((value - cert.value_on_behavior).abs() < 1e-9);
            assert!(value > cert.max_over_strategies + CERTIFICATE_MARGIN);
        }
        other => panic!("expected NotLhv, got {other:?}"),
    }
}

#[test]
fn membership_rejects_singlet_statistics() {
    match is_lhv(&singlet_statistics()).unwrap() {
        LhvVerdict::NotLhv(cert) => assert!(cert.margin > CERTIFICATE_MARGIN),
        other => panic!("expected NotLhv, got {other:?}"),
    }
}

#[test]
fn membership_errors_on_signaling_behavior() {
    let mut tables = pr_box().tables().clone();
    let table = tables.get_mut(&vec![0, 0]).unwrap();
    table[0] += 0.01;
    let sum: f64 = table.iter().sum();
    for p in table.iter_mut() {
        *p /= sum;
    }
    let b = Behavior::new(Arc::new(Scenario::uniform_binary(2, 2)), tables).unwrap();
    assert!(matches!(
        is_lhv(&b),
        Err(crate::Error::SignalingBehavior { .. })
    ));
}

#[test]
fn rescaling_outcome_values_rescales_correlations() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let b = behavior_from_lhv(&seeded_model(&scenario, 123));
    let before_full = correlation(&b, &[0, 1], &[1, 0]).unwrap();
    let before_other = correlation(&b, &[0, 1], &[0, 0]).unwrap();
    // scale the values at (site 1, setting 2) by 2
    let scaled = Arc::new(
        Scenario::new(
            vec![2, 2],
            vec![
                vec![
                    OutcomeSpace::binary_pm1(),
                    OutcomeSpace::FiniteReal(vec![-2.0, 2.0]),
                ],
                vec![OutcomeSpace::binary_pm1(), OutcomeSpace::binary_pm1()],
            ],
        )
        .unwrap(),
    );
    let b2 = Behavior::new(scaled, b.tables().clone()).unwrap();
    assert_eq!(
        correlation(&b2, &[0, 1], &[1, 0]).unwrap(),
        2.0 * before_full
    );
    assert_eq!(correlation(&b2, &[0, 1], &[0, 0]).unwrap(), before_other);
}

#[test]
fn behavior_json_roundtrip() {
    let b = singlet_statistics();
    let value = behavior_to_json(&b);
    let parsed = behavior_from_json(&value).unwrap();
    assert_eq!(b, parsed);
}

#[test]
fn behavior_rejects_bad_tables() {
    let scenario = Arc::new(Scenario::uniform_binary(2, 2));
    let good = behavior_from_lhv(&LhvModel::uniform(scenario.clone()).unwrap());
    // missing tuple
    let mut tables = good.tables().clone();
    tables.remove(&vec![0, 0]);
    assert!(Behavior::new(scenario.clone(), tables).is_err());
    // bad normalization
    let mut tables = good.tables().clone();
    tables.get_mut(&vec![0, 0]).unwrap()[0] += 0.5;
    assert!(Behavior::new(scenario.clone(), tables).is_err());
    // negative entry
    let mut tables = good.tables().clone();
    tables.get_mut(&vec![0, 0]).unwrap()[0] = -0.25;
    assert!(Behavior::new(scenario, tables).is_err());
}

#[test]
fn evaluate_functional_rejects_shape_mismatch() {
    let b = pr_box();
    let mk3 = generators::mk_coefficients(3).unwrap();
    assert!(matches!(
        evaluate_functional(&b, &mk3.functional),
        Err(crate::Error::ScenarioMismatch(_))
    ));
}
