//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;

use qubitsec_cli::commands::{cmd_attack, cmd_prop_check, cmd_session, DataSource};
use qubitsec_cli::{ExperimentConfig, OutputFormat, StrategySpec};
use qubitsec_core::adversary::{Adversary, EveStrategy, ReplacementPolicy};
use qubitsec_core::analysis::montecarlo::{
    angle_guess_accuracy, check_detection, detection_curve, frame_attack, return_leg_pairs,
    session_batch,
};
use qubitsec_core::analysis::oracles::{cos_square_sum, cross_term_sum};
use qubitsec_core::analysis::{
    error_prob_general, error_prob_uniform, exhaustive_session_oracle, max_posterior_accuracy,
    undetected_prob, Estimate,
};
use qubitsec_core::channels::{Leg, QubitSource};
use qubitsec_core::protocols::SessionConfig;
use qubitsec_core::rng::{derive_seed, substream};
use qubitsec_core::AngleScheme;
use rand::Rng;

const SIGMAS: f64 = 4.0;
const ENTROPY_TOL: f64 = 0.01;
const IDENTITY_TOL: f64 = 1e-12;
const FLOOR_TOL: f64 = 0.005;
const ORACLE_TOL: f64 = 1e-10;
const SINGLE_INSPECTION_TOL: f64 = 0.008;
const REPLICA_TOL: f64 = 0.01;
const MITM_DETECTION_FLOOR: f64 = 0.99;

const SEED: u64 = 20_241_014;

fn grid24() -> Vec<f64> {
    (0..24).map(|i| i as f64 * PI / 12.0).collect()
}

fn scheme(n: usize) -> AngleScheme {
    AngleScheme::new(n).unwrap()
}

/// `|p̂ - p| < k·σ` with the stderr of the hypothesised rate.
fn within_band(e: &Estimate, p: f64) -> bool {
    (e.value - p).abs() < SIGMAS * e.null_stderr(p) + 1e-12
}

fn verdict(criterion: u32, title: &str, pass: bool, detail: String) -> bool {
    println!(
        "[{}] criterion {criterion:>2}: {title} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn criterion_01_correctness() -> bool {
    let config = SessionConfig::new(scheme(3), 8, 8).unwrap();
    let stats = session_batch(
        &config,
        &Adversary::passive(),
        100_000,
        derive_seed(SEED, 1),
    )
    .unwrap();
    let pass =
        stats.sessions == 100_000 && stats.completed == stats.sessions && stats.decode_errors == 0;
    verdict(
        1,
        "passive sessions decode without error",
        pass,
        format!(
            "{} sessions, {} completed, {} bit errors",
            stats.sessions, stats.completed, stats.decode_errors
        ),
    )
}

fn criterion_02_confidentiality() -> bool {
    let s = scheme(3);
    let mut worst_z: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    let mut pass = true;
    for (i, alpha) in grid24().into_iter().enumerate() {
        let counts = return_leg_pairs(&s, alpha, 100_000, derive_seed(SEED ^ 2, i as u64)).unwrap();
        let [x0, _] = counts.0;
        let e = Estimate::from_counts(x0[0], x0[0] + x0[1]);
        let z = (e.value - 0.5).abs() / e.null_stderr(0.5);
        let h = counts.conditional_entropy().unwrap();
        pass &= z < SIGMAS && (h - 1.0).abs() < ENTROPY_TOL;
        worst_z = worst_z.max(z);
        worst_h = worst_h.max((h - 1.0).abs());
    }
    verdict(
        2,
        "Eve's return-leg reading is unbiased and uninformative",
        pass,
        format!("max |z| = {worst_z:.2}, max |H(X|Z) - 1| = {worst_h:.2e}"),
    )
}

fn criterion_03_detection_curve() -> bool {
    let s = scheme(3);
    let curve = detection_curve(&s, &grid24(), 100_000, derive_seed(SEED, 3)).unwrap();
    let mut pass = true;
    let mut worst_z: f64 = 0.0;
    for p in &curve.points {
        let independent = 0.5 - p.alpha.cos() / 4.0;
        pass &= (p.closed_form - independent).abs() < IDENTITY_TOL;
        pass &= within_band(&p.empirical, independent);
        worst_z = worst_z
            .max((p.empirical.value - independent).abs() / p.empirical.null_stderr(independent));
    }
    let mut worst_gap: f64 = 0.0;
    let mut rng = substream(SEED, 3);
    for n in [3, 4, 5, 8] {
        let sn = scheme(n);
        let alphas = grid24()
            .into_iter()
            .chain((0..100).map(|_| rng.random_range(-10.0..10.0)));
        for alpha in alphas {
            let gap =
                (error_prob_general(&sn, alpha) - error_prob_uniform(n, alpha).unwrap()).abs();
            worst_gap = worst_gap.max(gap);
        }
    }
    pass &= worst_gap < IDENTITY_TOL;
    verdict(
        3,
        "detection curve matches 1/2 - cos(alpha)/4",
        pass,
        format!(
            "{} points, max |z| = {worst_z:.2}, general-uniform gap = {worst_gap:.1e}",
            curve.points.len()
        ),
    )
}

fn criterion_04_detection_floor() -> bool {
    let s = scheme(3);
    let floor = check_detection(&s, 0.0, 100_000, derive_seed(SEED, 4)).unwrap();
    let curve = detection_curve(&s, &grid24(), 100_000, derive_seed(SEED, 40)).unwrap();
    let argmin = curve.empirical_minimum().unwrap().alpha;
    let pass = (floor.value - 0.25).abs() <= FLOOR_TOL && argmin == 0.0;
    verdict(
        4,
        "detection floor of 1/4 at alpha = 0",
        pass,
        format!(
            "P(detect | alpha=0) = {:.5}, grid argmin = {argmin}",
            floor.value
        ),
    )
}

fn criterion_05_frame_inspection() -> bool {
    let s = scheme(3);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for total in 2..=6usize {
        for m in 1..total {
            let n = total - m;
            for l in 0..=total {
                let strategy = EveStrategy::MeasureRandom { count: l };
                let table = exhaustive_session_oracle(n, m, &s, &strategy).unwrap();
                let closed = undetected_prob(n as u64, m as u64, l as u64, 0.25).unwrap();
                worst = worst.max((table.undetected - closed).abs());
                cases += 1;
            }
        }
    }
    let mut pass = worst < ORACLE_TOL;

    let single = frame_attack(
        2,
        1,
        &s,
        &EveStrategy::MeasureRandom { count: 1 },
        100_000,
        derive_seed(SEED, 5),
    )
    .unwrap()
    .undetected;
    pass &= (single.value - 11.0 / 12.0).abs() <= SINGLE_INSPECTION_TOL;

    let mut case_one = true;
    for m in 1..=20usize {
        let e = frame_attack(
            4,
            m,
            &s,
            &EveStrategy::MeasureAll,
            20_000,
            derive_seed(SEED ^ 5, m as u64),
        )
        .unwrap()
        .undetected;
        case_one &= within_band(&e, 0.75f64.powi(m as i32));
    }
    pass &= case_one;

    let mut case_two = true;
    for (n, m) in [(1usize, 1usize), (2, 3), (5, 5), (8, 2)] {
        let expected = 1.0 - m as f64 / (4.0 * (n + m) as f64);
        let closed = undetected_prob(n as u64, m as u64, 1, 0.25).unwrap();
        let e = frame_attack(
            n,
            m,
            &s,
            &EveStrategy::MeasureRandom { count: 1 },
            50_000,
            derive_seed(SEED ^ 55, (n * 10 + m) as u64),
        )
        .unwrap()
        .undetected;
        case_two &= (closed - expected).abs() < IDENTITY_TOL && within_band(&e, expected);
    }
    pass &= case_two;
    verdict(
        5,
        "frame inspection matches the hypergeometric closed form",
        pass,
        format!(
            "{cases} enumerated cases, max gap {worst:.1e}; (2,1,1) = {:.4}; case I {}; case II {}",
            single.value,
            if case_one { "ok" } else { "off" },
            if case_two { "ok" } else { "off" }
        ),
    )
}

fn criterion_06_replacement() -> bool {
    let s = scheme(3);
    // C(3, L) / C(5, L)
    let expected = [(1usize, 3.0 / 5.0), (2, 3.0 / 10.0), (3, 1.0 / 10.0)];
    let mut pass = true;
    let mut seen = Vec::new();
    for (l, p) in expected {
        let strategy = EveStrategy::ReplaceQubits {
            count: l,
            policy: ReplacementPolicy::UniformScheme,
        };
        let e = frame_attack(3, 2, &s, &strategy, 50_000, derive_seed(SEED ^ 6, l as u64))
            .unwrap()
            .no_check_touched;
        pass &= within_band(&e, p);
        seen.push(format!("L={l}: {:.4}/{p:.4}", e.value));
    }

    let config = SessionConfig::new(scheme(3), 2, 2)
        .unwrap()
        .with_source(QubitSource::new(2).unwrap());
    let stats = session_batch(
        &config,
        &Adversary::new(EveStrategy::ReplicaCapture),
        100_000,
        derive_seed(SEED, 6),
    )
    .unwrap();
    let replica = stats.substitution_success().value;
    pass &= (replica - 1.0 / 6.0).abs() <= REPLICA_TOL;
    verdict(
        6,
        "replacement success matches C(N,L)/C(M+N,L)",
        pass,
        format!("{}; replica capture {replica:.4}/0.1667", seen.join(", ")),
    )
}

fn criterion_07_two_angle_vulnerability() -> bool {
    let two = angle_guess_accuracy(&scheme(2), 10_000, derive_seed(SEED, 7)).unwrap();
    let s3 = scheme(3);
    let baseline = max_posterior_accuracy(&s3, 0.0);
    let three = angle_guess_accuracy(&s3, 10_000, derive_seed(SEED ^ 7, 3)).unwrap();
    let pass = two.value == 1.0
        && (baseline - 7.0 / 12.0).abs() < IDENTITY_TOL
        && three.value <= baseline + SIGMAS * three.null_stderr(baseline);
    verdict(
        7,
        "two angles let Eve identify every qubit; three do not",
        pass,
        format!(
            "n=2 accuracy {:.4}; n=3 accuracy {:.4} vs baseline {baseline:.4}",
            two.value, three.value
        ),
    )
}

fn criterion_08_man_in_the_middle() -> bool {
    let adversary = Adversary::new(EveStrategy::InterceptResend);
    let open = SessionConfig::new(scheme(3), 8, 8)
        .unwrap()
        .unsafe_without_checks(Leg::Outbound);
    let stats = session_batch(&open, &adversary, 10_000, derive_seed(SEED, 8)).unwrap();
    let recovery = stats.eve_recovery().value;
    let bits = stats.eve_bit_accuracy().map(|e| e.value).unwrap_or(0.0);

    let guarded = SessionConfig::new(scheme(3), 8, 20).unwrap();
    let detection = session_batch(&guarded, &adversary, 10_000, derive_seed(SEED ^ 8, 20))
        .unwrap()
        .outbound_detection()
        .value;
    let pass = recovery == 1.0 && bits == 1.0 && detection >= MITM_DETECTION_FLOOR;
    verdict(
        8,
        "intercept-resend succeeds only on an unchecked outbound leg",
        pass,
        format!("unchecked recovery {recovery:.4}; checked detection {detection:.4}"),
    )
}

fn criterion_09_angle_sums() -> bool {
    let mut rng = substream(SEED, 9);
    let mut worst_balance: f64 = 0.0;
    for n in 2..=12 {
        let s = scheme(n);
        for _ in 0..100 {
            let alpha = rng.random_range(0.0..2.0 * PI);
            worst_balance = worst_balance.max(s.balance_check(alpha).abs());
        }
    }
    let mut worst_sums: f64 = 0.0;
    for n in 3..=12 {
        worst_sums = worst_sums
            .max((cos_square_sum(n) - n as f64 / 2.0).abs())
            .max(cross_term_sum(n).abs());
    }
    let pass = worst_balance < IDENTITY_TOL && worst_sums < IDENTITY_TOL;
    verdict(
        9,
        "angle sums vanish as required",
        pass,
        format!("balance residual {worst_balance:.1e}; sum residual {worst_sums:.1e}"),
    )
}

fn small(subcommand: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::defaults(subcommand);
    c.trials = 5_000;
    c.seed = SEED;
    c
}

fn criterion_10_determinism() -> bool {
    let prop = small("prop-check");
    let mut attack = small("attack");
    attack.strategy = "measure-random".parse::<StrategySpec>().unwrap();
    attack.payload = 3;
    attack.checks = 3;
    let session = small("session");
    let data = DataSource::Hex("c0ffee".into());

    let render = || {
        vec![
            cmd_prop_check(&prop).unwrap().render(OutputFormat::Json),
            cmd_attack(&attack).unwrap().render(OutputFormat::Json),
            cmd_session(&session, Some(&data))
                .unwrap()
                .render(OutputFormat::Json),
        ]
    };
    let first = render();
    let one_worker = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(render);
    let three_workers = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(render);
    let mut pass = first == one_worker && first == three_workers;

    let run_binary = || {
        let out = Command::new(env!("CARGO_BIN_EXE_qubitsec"))
            .args([
                "attack",
                "--strategy",
                "replace",
                "--payload",
                "3",
                "--checks",
                "2",
            ])
            .args(["--trials", "3000", "--seed", "11", "--format", "json"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let a = run_binary();
    let b = run_binary();
    pass &= a == b && !a.is_empty();
    verdict(
        10,
        "identical seeds give byte-identical JSON reports",
        pass,
        format!(
            "{} library reports and 2 binary runs compared",
            first.len() * 3
        ),
    )
}

fn main() -> std::process::ExitCode {
    let criteria: [fn() -> bool; 10] = [
        criterion_01_correctness,
        criterion_02_confidentiality,
        criterion_03_detection_curve,
        criterion_04_detection_floor,
        criterion_05_frame_inspection,
        criterion_06_replacement,
        criterion_07_two_angle_vulnerability,
        criterion_08_man_in_the_middle,
        criterion_09_angle_sums,
        criterion_10_determinism,
    ];
    let mut failed = 0;
    for (i, criterion) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(criterion) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("[FAIL] criterion {:>2}: panicked", i + 1);
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        std::process::ExitCode::SUCCESS
    } else {
        std::process::ExitCode::FAILURE
    }
}
