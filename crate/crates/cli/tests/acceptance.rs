//! Acceptance suite: every release gate as one test, printing one
//! PASS line per criterion (run with `--nocapture` to see them).
//!
//! Tolerances are pinned here, in code: exact integer equality where the
//! sources state integers, 1e-9 slack on floating comparisons, and the
//! stated wall-clock budgets.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use bellbound::behaviors::{
    behavior_from_lhv, evaluate_functional, is_lhv, pr_box, singlet_statistics, strategy_count,
    Behavior, LhvModel, LhvVerdict,
};
use bellbound::forms::{
    evaluate_probability_form, face_count, lemma1_audit, lhv_bounds, lhv_bounds_correlation,
    lhv_bounds_events, lhv_bounds_full_correlation, lhv_bounds_probability, ScanConfig,
    XiAssignment,
};
use bellbound::generators::{self, NamedInequality};
use bellbound::quantum::{
    bell_operator, expectation, expectation_operator, tensor, Operator, State,
};
use bellbound::scenario::{
    CorrelationFunctional, CorrelationKey, EventFunctional, Functional, ProbabilityFunctional,
    Scenario,
};

fn cfg() -> ScanConfig {
    ScanConfig::default().with_threads(Some(1))
}

fn pass(id: u32, name: &str, detail: String) {
    println!("ACCEPTANCE {id} ({name}): PASS - {detail}");
}

fn correlation(f: &Functional) -> &CorrelationFunctional {
    match f {
        Functional::Correlation(f) => f,
        _ => panic!("correlation functional expected"),
    }
}

fn probability(f: &Functional) -> &ProbabilityFunctional {
    match f {
        Functional::Probability(f) => f,
        _ => panic!("probability functional expected"),
    }
}

fn event(f: &Functional) -> &EventFunctional {
    match f {
        Functional::Event(f) => f,
        _ => panic!("event functional expected"),
    }
}

#[test]
fn criterion_01_chsh_bound() {
    let ineq = generators::chsh(4).unwrap();
    let report = lhv_bounds_correlation(correlation(&ineq.functional), &cfg()).unwrap();
    assert_eq!(report.max, 2.0, "CHSH max must be exactly 2");
    assert_eq!(report.min, -2.0, "CHSH min must be exactly -2");
    assert!(
        report.elapsed < Duration::from_millis(1),
        "runtime {:?} exceeds 1 ms",
        report.elapsed
    );
    pass(1, "chsh-bound", format!("[-2, 2] in {:?}", report.elapsed));
}

#[test]
fn criterion_02_mk_family() {
    for parties in 2..=8usize {
        let ineq = generators::mk_coefficients(parties).unwrap();
        let expected = (1u64 << (parties - 1)) as f64;
        let report = lhv_bounds_full_correlation(correlation(&ineq.functional), &cfg()).unwrap();
        assert_eq!(report.max, expected, "MK{parties} max");
        assert_eq!(report.min, -expected, "MK{parties} min");
    }
    // N = 8 over the full 2^16 vertex set
    let ineq = generators::mk_coefficients(8).unwrap();
    let report = lhv_bounds_correlation(correlation(&ineq.functional), &cfg()).unwrap();
    assert_eq!(report.max, 128.0);
    assert_eq!(report.vertices_scanned, 1 << 16);
    assert!(
        report.elapsed < Duration::from_millis(100),
        "runtime {:?} exceeds 100 ms",
        report.elapsed
    );
    pass(
        2,
        "mk-family",
        format!(
            "2^(N-1) for N=2..8; N=8 scan of 65536 vertices in {:?}",
            report.elapsed
        ),
    );
}

#[test]
fn criterion_03_collins_gisin() {
    let cases = [
        (
            generators::collins_gisin_4422(),
            vec![vec![1u8, 1, 1, 1], vec![1, 1, 1, 1]],
        ),
        (
            generators::collins_gisin_2233(),
            vec![vec![1u8, 0, 0, 1], vec![1, 0, 0, 0]],
        ),
    ];
    let mut timings = Vec::new();
    for (ineq, witness_bits) in cases {
        let f = probability(&ineq.functional);
        let report = lhv_bounds_probability(f, &cfg()).unwrap();
        assert_eq!(report.max, 0.0, "{} max must be exactly 0", ineq.name);
        let witness = XiAssignment::from_bits(f, witness_bits).unwrap();
        assert_eq!(
            evaluate_probability_form(f, &witness).unwrap(),
            report.max,
            "{}: the published witness must be optimal",
            ineq.name
        );
        assert!(
            report.elapsed < Duration::from_millis(50),
            "{} runtime {:?} exceeds 50 ms",
            ineq.name,
            report.elapsed
        );
        timings.push(format!("{} in {:?}", ineq.name, report.elapsed));
    }
    pass(3, "collins-gisin", timings.join(", "));
}

#[test]
fn criterion_04_ch_bounds() {
    let ineq = generators::ch();
    let report = lhv_bounds_probability(probability(&ineq.functional), &cfg()).unwrap();
    assert_eq!(report.min, -1.0, "CH min must be exactly -1");
    assert_eq!(report.max, 0.0, "CH max must be exactly 0");
    pass(4, "ch-bounds", "[-1, 0] exactly".into());
}

#[test]
fn criterion_05_zohren_gill() {
    let mut last = None;
    for k in 2..=16usize {
        let ineq = generators::zohren_gill(k).unwrap();
        let report = lhv_bounds_events(event(&ineq.functional), &cfg()).unwrap();
        assert_eq!(report.min, 1.0, "ZG infimum must be exactly 1 at K = {k}");
        last = Some(report);
    }
    let report = last.unwrap();
    assert_eq!(report.vertices_scanned, 16u64.pow(4));
    assert!(
        report.elapsed < Duration::from_millis(50),
        "K=16 runtime {:?} exceeds 50 ms",
        report.elapsed
    );
    pass(
        5,
        "zohren-gill",
        format!(
            "inf = 1 for K=2..16; K=16 grid of 65536 in {:?}",
            report.elapsed
        ),
    );
}

#[test]
fn criterion_06_lemma1_audit() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(600);
    let mut worst_margin = f64::INFINITY;
    for trial in 0..20 {
        let parties = rng.random_range(1..=3usize);
        let settings = rng.random_range(1..=3usize);
        let scenario = Arc::new(Scenario::uniform_binary(parties, settings));
        let terms: Vec<(CorrelationKey, f64)> = (0..rng.random_range(1..=12))
            .map(|_| {
                let mask = rng.random_range(1..(1u32 << parties));
                let sites: Vec<usize> = (0..parties).filter(|&n| mask >> n & 1 == 1).collect();
                let key_settings: Vec<usize> = sites
                    .iter()
                    .map(|_| rng.random_range(0..settings))
                    .collect();
                (
                    CorrelationKey::new(sites, key_settings),
                    rng.random_range(-256..=256i32) as f64 / 32.0,
                )
            })
            .collect();
        let f = CorrelationFunctional::new(scenario, terms).unwrap();
        let report = lemma1_audit(&f, 100_000, trial as u64, &cfg()).unwrap();
        assert!(
            report.passed(),
            "trial {trial}: {} samples escaped the vertex bounds",
            report.escapes.len()
        );
        worst_margin = worst_margin.min(report.lower_margin.min(report.upper_margin));
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "total runtime {elapsed:?} exceeds 10 s"
    );
    pass(
        6,
        "lemma1-audit",
        format!(
            "20 x 1e5 samples inside bounds, tightest margin {worst_margin:.3e}, total {elapsed:?}"
        ),
    );
}

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

/// 100 models on the 2x2 binary scenario and 100 on the 2x2x2 binary
/// scenario, with the inequality families that fit each.
fn lhv_closure_fixtures() -> Vec<(Behavior, Vec<NamedInequality>)> {
    let two_party: Vec<NamedInequality> = vec![
        generators::chsh(4).unwrap(),
        generators::ch(),
        generators::mk_coefficients(2).unwrap(),
        generators::zohren_gill(2).unwrap(),
    ];
    let three_party: Vec<NamedInequality> = vec![generators::mk_coefficients(3).unwrap()];
    let mut fixtures = Vec::with_capacity(200);
    let scenario2 = Arc::new(Scenario::uniform_binary(2, 2));
    for seed in 0..100 {
        fixtures.push((
            behavior_from_lhv(&seeded_model(&scenario2, seed)),
            two_party.clone(),
        ));
    }
    let scenario3 = Arc::new(Scenario::uniform_binary(3, 2));
    for seed in 1000..1100 {
        fixtures.push((
            behavior_from_lhv(&seeded_model(&scenario3, seed)),
            three_party.clone(),
        ));
    }
    fixtures
}

#[test]
fn criterion_07_lhv_closure_end_to_end() {
    let start = Instant::now();
    let mut worst_slack = f64::INFINITY;
    let mut evaluations = 0u32;
    for (behavior, inequalities) in lhv_closure_fixtures() {
        for ineq in &inequalities {
            let bounds = lhv_bounds(&ineq.functional, &cfg()).unwrap();
            let value = evaluate_functional(&behavior, &ineq.functional).unwrap();
            let slack = (value - bounds.min).min(bounds.max - value);
            assert!(
                slack >= -1e-9,
                "{}: value {value} escapes [{}, {}]",
                ineq.name,
                bounds.min,
                bounds.max
            );
            worst_slack = worst_slack.min(slack);
            evaluations += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "total runtime {elapsed:?} exceeds 30 s"
    );
    pass(
        7,
        "lhv-closure",
        format!("200 LHV behaviors, {evaluations} inequality evaluations, worst slack {worst_slack:.3e}, total {elapsed:?}"),
    );
}

#[test]
fn criterion_08_membership_duality() {
    for (index, (behavior, _)) in lhv_closure_fixtures().into_iter().enumerate() {
        match is_lhv(&behavior).unwrap() {
            LhvVerdict::Lhv(model) => {
                let reproduced = behavior_from_lhv(&model);
                let deviation = behavior.max_entry_deviation(&reproduced);
                assert!(
                    deviation <= 1e-7,
                    "witness {index} reproduces tables only to {deviation:.3e}"
                );
            }
            other => panic!("behavior {index} must be accepted, got {other:?}"),
        }
    }
    let mut margins = Vec::new();
    for (name, behavior) in [
        ("pr-box", pr_box()),
        ("singlet-statistics", singlet_statistics()),
    ] {
        match is_lhv(&behavior).unwrap() {
            LhvVerdict::NotLhv(cert) => {
                assert!(
                    cert.margin > 1e-7,
                    "{name}: certificate margin {} too small",
                    cert.margin
                );
                margins.push(format!("{name} margin {:.3e}", cert.margin));
            }
            other => panic!("{name} must be rejected, got {other:?}"),
        }
    }
    pass(
        8,
        "membership-duality",
        format!(
            "200 accepted with 1e-7 reproduction; {}",
            margins.join(", ")
        ),
    );
}

fn rotated_bob_pair(sign: f64) -> (Operator, Operator) {
    let s = sign * std::f64::consts::FRAC_1_SQRT_2;
    let b1 =
        Operator::from_re_im(&[vec![s, s], vec![s, -s]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
    let b2 =
        Operator::from_re_im(&[vec![s, -s], vec![-s, -s]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
    (b1, b2)
}

#[test]
fn criterion_09_quantum_chsh() {
    // singlet (|01> - |10>)/sqrt(2) as a real density matrix
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [0.0, s, -s, 0.0];
    let re: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..4).map(|j| psi[i] * psi[j]).collect())
        .collect();
    let singlet = State::from_re_im(&re, &vec![vec![0.0; 4]; 4]).unwrap();
    // optimal observables for the singlet: z/x for Alice, the negated
    // rotated pair for Bob
    let bell = bell_operator(&[
        (Operator::pauli_z(), Operator::pauli_x()),
        rotated_bob_pair(-1.0),
    ])
    .unwrap();
    let value = expectation(&singlet, &bell).unwrap();
    let expected = 2.0 * std::f64::consts::SQRT_2;
    assert!(
        (value - expected).abs() <= 1e-9,
        "singlet CHSH value {value} differs from 2*sqrt(2)"
    );
    assert!(value > 2.0, "the LHV bound 2 must be exceeded");
    pass(9, "quantum-chsh", format!("tr[rho B_2] = {value:.12} > 2"));
}

fn random_hermitian_norm_one(rng: &mut ChaCha12Rng, dim: usize) -> Operator {
    let mut re = vec![vec![0.0; dim]; dim];
    let mut im = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            re[i][j] = rng.random_range(-1.0..1.0);
            im[i][j] = rng.random_range(-1.0..1.0);
        }
    }
    let mut hre = vec![vec![0.0; dim]; dim];
    let mut him = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            hre[i][j] = (re[i][j] + re[j][i]) / 2.0;
            him[i][j] = (im[i][j] - im[j][i]) / 2.0;
        }
    }
    let probe = Operator::from_re_im(&hre, &him).unwrap();
    let scale = 1.0 / probe.operator_norm().max(1.0);
    for i in 0..dim {
        for j in 0..dim {
            hre[i][j] *= scale;
            him[i][j] *= scale;
        }
    }
    Operator::from_re_im(&hre, &him).unwrap()
}

fn random_state(rng: &mut ChaCha12Rng, dim: usize) -> State {
    let mut gre = vec![vec![0.0; dim]; dim];
    let mut gim = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            gre[i][j] = rng.random_range(-1.0..1.0);
            gim[i][j] = rng.random_range(-1.0..1.0);
        }
    }
    // rho = G G^dagger, normalized to unit trace
    let mut re = vec![vec![0.0; dim]; dim];
    let mut im = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                re[i][j] += gre[i][k] * gre[j][k] + gim[i][k] * gim[j][k];
                im[i][j] += gim[i][k] * gre[j][k] - gre[i][k] * gim[j][k];
            }
        }
    }
    let trace: f64 = (0..dim).map(|i| re[i][i]).sum();
    for i in 0..dim {
        for j in 0..dim {
            re[i][j] /= trace;
            im[i][j] /= trace;
        }
    }
    State::from_re_im(&re, &im).unwrap()
}

#[test]
fn criterion_10_recursion_expansion_identity() {
    let mut rng = ChaCha12Rng::seed_from_u64(1010);
    let mut worst = 0.0f64;
    for parties in 2..=4usize {
        for _ in 0..5 {
            let observables: Vec<(Operator, Operator)> = (0..parties)
                .map(|_| {
                    (
                        random_hermitian_norm_one(&mut rng, 2),
                        random_hermitian_norm_one(&mut rng, 2),
                    )
                })
                .collect();
            let rho = random_state(&mut rng, 1 << parties);
            let bell = bell_operator(&observables).unwrap();
            let direct = expectation(&rho, &bell).unwrap();
            let gamma = generators::mk_setting_coefficients(parties).unwrap();
            let mut expanded = 0.0;
            for (settings, g) in gamma {
                let mut product = if settings[0] == 0 {
                    observables[0].0.clone()
                } else {
                    observables[0].1.clone()
                };
                for (n, &s) in settings.iter().enumerate().skip(1) {
                    let x = if s == 0 {
                        &observables[n].0
                    } else {
                        &observables[n].1
                    };
                    product = tensor(&product, x).unwrap();
                }
                expanded += g * expectation_operator(&rho, &product).unwrap();
            }
            let gap = (direct - expanded).abs();
            assert!(
                gap <= 1e-9,
                "N={parties}: |recursion - expansion| = {gap:.3e}"
            );
            worst = worst.max(gap);
        }
    }
    pass(
        10,
        "recursion-expansion",
        format!("N=2..4, 5 trials each, worst gap {worst:.3e}"),
    );
}

#[test]
fn criterion_11_face_count() {
    assert_eq!(face_count(4, 0).unwrap(), 16);
    assert_eq!(face_count(4, 1).unwrap(), 32);
    assert_eq!(face_count(5, 2).unwrap(), 160);
    for d in 0..=10u32 {
        assert_eq!(face_count(d, 0).unwrap(), 1u128 << d, "d = {d}");
    }
    pass(
        11,
        "face-count",
        "spot values 16/32/160 and 2^d vertices for d <= 10".into(),
    );
}

#[test]
fn criterion_12_determinism_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_bellbound");
    let fixtures = [
        ("chsh.json", vec!["chsh"]),
        ("mk6.json", vec!["mk", "--parties", "6"]),
        ("cg2233.json", vec!["cg2233"]),
        ("zg4.json", vec!["zohren-gill", "--outcomes", "4"]),
    ];
    for (file, args) in fixtures {
        let path = dir.path().join(file);
        let status = Command::new(bin)
            .arg("generate")
            .args(&args)
            .args(["--output", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        let mut outputs = Vec::new();
        for threads in ["1", "2", "8"] {
            let output = Command::new(bin)
                .args([
                    "bound",
                    path.to_str().unwrap(),
                    "0",
                    "--no-timing",
                    "--threads",
                    threads,
                ])
                .output()
                .unwrap();
            assert_eq!(output.status.code(), Some(0), "{file} --threads {threads}");
            outputs.push(output.stdout);
        }
        assert_eq!(outputs[0], outputs[1], "{file}: threads 1 vs 2 differ");
        assert_eq!(outputs[0], outputs[2], "{file}: threads 1 vs 8 differ");
    }
    pass(
        12,
        "determinism",
        "bound output byte-identical across --threads 1, 2, 8 on four fixtures".into(),
    );
}
