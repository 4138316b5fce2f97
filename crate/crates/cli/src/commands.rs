//! Subcommand bodies. Each takes a resolved config and returns a report.

use std::path::Path;

use qubitsec_core::adversary::{Adversary, Eavesdropper, EveStrategy};
use qubitsec_core::analysis::estimate::BAND_SIGMAS;
use qubitsec_core::analysis::montecarlo::{
    angle_guess_accuracy, check_detection, detection_curve, frame_attack, return_leg_pairs,
    session_batch, SessionStats,
};
use qubitsec_core::analysis::oracles::{cos_square_sum, cross_term_sum};
use qubitsec_core::analysis::{
    error_prob_general, error_prob_uniform, eve_zero_prob, max_posterior_accuracy,
    replace_success_prob, undetected_prob, Estimate,
};
use qubitsec_core::channels::{Leg, QubitSource};
use qubitsec_core::protocols::{run_protocol2, SessionConfig};
use qubitsec_core::qubit::Bit;
use qubitsec_core::rng::{derive_seed, substream};
use qubitsec_core::AngleScheme;

use crate::config::{CliError, ExperimentConfig, OutputFormat};
use crate::report::{bit_string, CheckResult, EveSummary, SessionSummary, SweepPoint, SweepReport};
use crate::strategy::StrategyKind;

/// Tolerance of the detection floor at `alpha = 0`.
pub const FLOOR_TOLERANCE: f64 = 0.005;
/// Tolerance of `H(X|Z)` around one bit.
pub const ENTROPY_TOLERANCE: f64 = 0.01;
/// Tolerance of analytic identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Seed labels of the independent sub-experiments.
mod label {
    pub const DECODE: u64 = 1;
    pub const BIAS: u64 = 2;
    pub const CURVE: u64 = 3;
    pub const FLOOR: u64 = 4;
    pub const ANGLE: u64 = 5;
    pub const ATTACK: u64 = 6;
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Sweep(Box<SweepReport>),
    Session(Box<SessionSummary>),
}

impl Outcome {
    pub fn pass(&self) -> bool {
        match self {
            Outcome::Sweep(r) => r.pass,
            Outcome::Session(_) => true,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match self {
            Outcome::Sweep(r) => r.render(format),
            Outcome::Session(s) => s.render(format),
        }
    }
}

fn session_config(
    config: &ExperimentConfig,
    payload: usize,
    checks: usize,
) -> Result<SessionConfig, CliError> {
    let mut s = SessionConfig::new(AngleScheme::new(config.n)?, payload, checks)?
        .with_source(QubitSource::new(config.replicas)?);
    if config.unsafe_test_mode {
        if !config.outbound_checks {
            s = s.unsafe_without_checks(Leg::Outbound);
        }
        if !config.return_checks {
            s = s.unsafe_without_checks(Leg::Return);
        }
    }
    Ok(s)
}

fn point(x: f64, closed_form: f64, empirical: Estimate) -> SweepPoint {
    SweepPoint {
        x,
        closed_form,
        pass: empirical.agrees_with(closed_form, BAND_SIGMAS),
        empirical,
    }
}

/// Per-check failure probability when Eve swaps a check for a fresh random
/// scheme state.
fn swap_failure_prob(scheme: &AngleScheme) -> f64 {
    1.0 - scheme
        .angles()
        .iter()
        .zip(scheme.probs())
        .map(|(&t, &p)| p * eve_zero_prob(scheme, t))
        .sum::<f64>()
}

/// Decode correctness, bit bias, conditional entropy, detection curve and
/// floor, angle identification and the analytic identities.
pub fn cmd_prop_check(config: &ExperimentConfig) -> Result<SweepReport, CliError> {
    config.validate()?;
    let scheme = AngleScheme::new(config.n)?;
    let trials = config.trials;
    let seed = config.seed;
    let grid = config.alpha_grid.points();
    let mut checks = Vec::new();
    let mut flags = Vec::new();

    let stats = session_batch(
        &session_config(config, config.payload, config.checks)?,
        &Adversary::passive(),
        trials,
        derive_seed(seed, label::DECODE),
    )?;
    let mut decode = CheckResult::new(
        "decode-correctness",
        "sessions without an eavesdropper decode every bit",
    );
    decode.closed_form = Some(0.0);
    decode.empirical = stats.bit_error_rate();
    decode.pass = stats.completed == stats.sessions && stats.decode_errors == 0;
    checks.push(decode);

    let bias_seed = derive_seed(seed, label::BIAS);
    let mut bias_points = Vec::new();
    let mut entropy_points = Vec::new();
    for (i, &alpha) in grid.iter().enumerate() {
        let counts = return_leg_pairs(&scheme, alpha, trials, derive_seed(bias_seed, i as u64))?;
        let [x0, _] = counts.0;
        let z0_given_x0 = Estimate::from_counts(x0[0], x0[0] + x0[1]);
        bias_points.push(point(alpha, eve_zero_prob(&scheme, alpha), z0_given_x0));
        let h = counts.conditional_entropy()?;
        entropy_points.push(SweepPoint {
            x: alpha,
            closed_form: 1.0,
            empirical: Estimate {
                value: h,
                stderr: 0.0,
                trials: counts.total(),
                hits: 0,
            },
            pass: (h - 1.0).abs() < ENTROPY_TOLERANCE,
        });
    }
    checks.push(CheckResult::swept(
        "bit-bias",
        "P(Z=0 | X=0) of Eve's reading of an encoded qubit",
        "alpha",
        bias_points,
    ));
    let mut entropy = CheckResult::swept(
        "conditional-entropy",
        "plug-in H(X|Z) in bits for Bob's uniform bit",
        "alpha",
        entropy_points,
    );
    entropy.tolerance = Some(ENTROPY_TOLERANCE);
    checks.push(entropy);

    let curve = detection_curve(&scheme, &grid, trials, derive_seed(seed, label::CURVE))?;
    let curve_points: Vec<SweepPoint> = curve
        .points
        .iter()
        .map(|p| point(p.alpha, p.closed_form, p.empirical))
        .collect();
    let argmin_closed = grid
        .iter()
        .copied()
        .min_by(|a, b| error_prob_general(&scheme, *a).total_cmp(&error_prob_general(&scheme, *b)));
    let argmin_empirical = curve.empirical_minimum().map(|p| p.alpha);
    checks.push(CheckResult::swept(
        "detection-curve",
        "per-check detection after Eve rotates by -alpha and measures",
        "alpha",
        curve_points,
    ));

    let floor_closed = error_prob_general(&scheme, 0.0);
    let floor = check_detection(&scheme, 0.0, trials, derive_seed(seed, label::FLOOR))?;
    let mut floor_check = CheckResult::new(
        "detection-floor",
        "detection at alpha = 0 and the grid minimum sits where the closed form's does",
    );
    floor_check.closed_form = Some(floor_closed);
    floor_check.empirical = Some(floor);
    floor_check.tolerance = Some(FLOOR_TOLERANCE);
    floor_check.pass =
        (floor.value - floor_closed).abs() <= FLOOR_TOLERANCE && argmin_empirical == argmin_closed;
    floor_check.sweep = Some("alpha".into());
    checks.push(floor_check);

    let accuracy = angle_guess_accuracy(&scheme, trials, derive_seed(seed, label::ANGLE))?;
    checks.push(CheckResult::banded(
        "angle-identification",
        "Eve's maximum-likelihood guess of Alice's angle from one reading",
        max_posterior_accuracy(&scheme, 0.0),
        accuracy,
        BAND_SIGMAS,
    ));
    let broken = !scheme.is_secure();
    if broken {
        flags.push("confidentiality-break".to_string());
    }
    if config.assert_secure {
        let mut secure = CheckResult::new(
            "secure-scheme",
            "more than two equally likely angles, so no reading pins down Alice's angle",
        );
        secure.pass = !broken && accuracy.value < 1.0;
        secure.value = Some(accuracy.value);
        checks.push(secure);
    }

    let mut residual: f64 = 0.0;
    for &alpha in &grid {
        residual = residual.max(scheme.balance_check(alpha).abs());
        if config.n > 2 {
            let uniform = error_prob_uniform(config.n, alpha)?;
            residual = residual.max((error_prob_general(&scheme, alpha) - uniform).abs());
        }
    }
    if config.n > 2 {
        residual = residual
            .max((cos_square_sum(config.n) - config.n as f64 / 2.0).abs())
            .max(cross_term_sum(config.n).abs());
    }
    let mut identities = CheckResult::new(
        "analytic-identities",
        "balance sum, general against uniform detection formula, trigonometric sums",
    );
    identities.closed_form = Some(0.0);
    identities.value = Some(residual);
    identities.tolerance = Some(IDENTITY_TOLERANCE);
    identities.pass = residual < IDENTITY_TOLERANCE;
    checks.push(identities);

    Ok(SweepReport::new(config.clone(), checks, flags))
}

fn frame_sweep<I>(
    config: &ExperimentConfig,
    name: &str,
    description: &str,
    sweep: &str,
    values: I,
    mut run: impl FnMut(usize, u64) -> Result<(f64, Estimate), CliError>,
) -> Result<CheckResult, CliError>
where
    I: IntoIterator<Item = usize>,
{
    let base = derive_seed(config.seed, label::ATTACK);
    let points = values
        .into_iter()
        .map(|v| {
            let (closed, est) = run(v, derive_seed(base, v as u64))?;
            Ok(point(v as f64, closed, est))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(CheckResult::swept(name, description, sweep, points))
}

fn session_stats(
    config: &ExperimentConfig,
    adversary: &Adversary,
) -> Result<SessionStats, CliError> {
    let sc = session_config(config, config.payload, config.checks)?;
    adversary.validate(config.replicas)?;
    Ok(session_batch(
        &sc,
        adversary,
        config.trials,
        derive_seed(config.seed, label::ATTACK),
    )?)
}

fn informational(name: &str, description: &str, e: Option<Estimate>) -> CheckResult {
    CheckResult {
        empirical: e,
        ..CheckResult::new(name, description)
    }
}

/// Runs the configured strategy and compares against its closed form.
pub fn cmd_attack(config: &ExperimentConfig) -> Result<SweepReport, CliError> {
    config.validate()?;
    let scheme = AngleScheme::new(config.n)?;
    let (n_pay, m_chk, trials) = (config.payload, config.checks, config.trials);
    let pe0 = error_prob_general(&scheme, 0.0);
    let spec = &config.strategy;
    let single_leg = !matches!(
        spec.kind,
        StrategyKind::InterceptResend | StrategyKind::ReplicaCapture | StrategyKind::DisruptReturn
    );
    let frame_level =
        single_leg && spec.leg != Some(Leg::Return) && spec.kind != StrategyKind::Passive;
    let mut checks = Vec::new();

    if frame_level {
        let check = match spec.kind {
            StrategyKind::MeasureAll => frame_sweep(
                config,
                "undetected",
                "frame passes every check while Eve measures all slots",
                "checks",
                1..=m_chk,
                |m, seed| {
                    let s = spec.strategy(None, None)?;
                    let stats = frame_attack(n_pay, m, &scheme, &s, trials, seed)?;
                    let closed = undetected_prob(n_pay as u64, m as u64, (n_pay + m) as u64, pe0)?;
                    Ok((closed, stats.undetected))
                },
            )?,
            StrategyKind::MeasureRandom(fixed) => {
                let values: Vec<usize> = match fixed {
                    Some(l) => vec![l],
                    None => (1..=n_pay + m_chk).collect(),
                };
                frame_sweep(
                    config,
                    "undetected",
                    "frame passes every check while Eve measures L random slots",
                    "inspected",
                    values,
                    |l, seed| {
                        let s = spec.strategy(Some(l), None)?;
                        let stats = frame_attack(n_pay, m_chk, &scheme, &s, trials, seed)?;
                        let closed = undetected_prob(n_pay as u64, m_chk as u64, l as u64, pe0)?;
                        Ok((closed, stats.undetected))
                    },
                )?
            }
            StrategyKind::RotateMeasure { alpha, count } => {
                let inspected = count.unwrap_or(n_pay + m_chk) as u64;
                let alphas: Vec<f64> = match alpha {
                    Some(a) => vec![a],
                    None => config.alpha_grid.points(),
                };
                let base = derive_seed(config.seed, label::ATTACK);
                let points = alphas
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| {
                        let s = spec.strategy(None, Some(a))?;
                        let stats = frame_attack(
                            n_pay,
                            m_chk,
                            &scheme,
                            &s,
                            trials,
                            derive_seed(base, i as u64),
                        )?;
                        let pe = error_prob_general(&scheme, a);
                        let closed = undetected_prob(n_pay as u64, m_chk as u64, inspected, pe)?;
                        Ok(point(a, closed, stats.undetected))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                CheckResult::swept(
                    "undetected",
                    "frame passes every check while Eve rotates by -alpha and measures",
                    "alpha",
                    points,
                )
            }
            StrategyKind::Replace { count, .. } => {
                let values: Vec<usize> = match count {
                    Some(l) => vec![l],
                    None => (1..=n_pay).collect(),
                };
                frame_sweep(
                    config,
                    "replacement-success",
                    "Eve's L replaced slots avoid every check qubit",
                    "replaced",
                    values,
                    |l, seed| {
                        let s = spec.strategy(Some(l), None)?;
                        let stats = frame_attack(n_pay, m_chk, &scheme, &s, trials, seed)?;
                        let closed = replace_success_prob(n_pay as u64, m_chk as u64, l as u64)?;
                        Ok((closed, stats.no_check_touched))
                    },
                )?
            }
            StrategyKind::Passive
            | StrategyKind::InterceptResend
            | StrategyKind::ReplicaCapture
            | StrategyKind::DisruptReturn => unreachable!("handled at session level"),
        };
        checks.push(check);
        return Ok(SweepReport::new(config.clone(), checks, Vec::new()));
    }

    let adversary = spec.adversary(None, None)?;
    let stats = session_stats(config, &adversary)?;
    let m = m_chk as i32;
    match spec.kind {
        StrategyKind::InterceptResend => {
            if config.outbound_checks {
                checks.push(CheckResult::banded(
                    "outbound-detection",
                    "outbound frame rejected after Eve measured every slot",
                    1.0 - (1.0 - pe0).powi(m),
                    stats.outbound_detection(),
                    BAND_SIGMAS,
                ));
                checks.push(informational(
                    "eve-recovery",
                    "Eve's reading of Bob's data is exact",
                    Some(stats.eve_recovery()),
                ));
            } else {
                checks.push(CheckResult::banded(
                    "eve-recovery",
                    "Eve's reading of Bob's data is exact with the outbound leg unchecked",
                    1.0,
                    stats.eve_recovery(),
                    BAND_SIGMAS,
                ));
            }
            checks.push(informational(
                "eve-bit-accuracy",
                "fraction of Bob's bits Eve reads correctly",
                stats.eve_bit_accuracy(),
            ));
        }
        StrategyKind::ReplicaCapture => {
            checks.push(CheckResult::banded(
                "replica-substitution",
                "Eve's N substitutions land exactly on the return data slots",
                replace_success_prob(n_pay as u64, m_chk as u64, n_pay as u64)?,
                stats.substitution_success(),
                BAND_SIGMAS,
            ));
            checks.push(informational(
                "forged",
                "Alice accepts the return frame and decodes Eve's fake data",
                Some(Estimate::from_counts(stats.forged, stats.sessions)),
            ));
        }
        StrategyKind::DisruptReturn => {
            let q = swap_failure_prob(&scheme);
            if config.return_checks {
                let check = match stats.return_detection() {
                    Some(e) => CheckResult::banded(
                        "return-detection",
                        "return frame rejected after Eve replaced every slot",
                        1.0 - (1.0 - q).powi(m),
                        e,
                        BAND_SIGMAS,
                    ),
                    None => informational(
                        "return-detection",
                        "no session reached the return leg",
                        None,
                    ),
                };
                checks.push(check);
            } else {
                let check = match stats.bit_error_rate() {
                    Some(e) => CheckResult::banded(
                        "bit-error-rate",
                        "Alice's decoded bits after Eve replaced the unchecked return frame",
                        0.5,
                        e,
                        BAND_SIGMAS,
                    ),
                    None => informational("bit-error-rate", "no session completed", None),
                };
                checks.push(check);
            }
        }
        _ => {
            let outbound_closed = if adversary.outbound == EveStrategy::Passive {
                Some(0.0)
            } else {
                None
            };
            let mut out = informational(
                "outbound-detection",
                "outbound frame rejected",
                Some(stats.outbound_detection()),
            );
            if let Some(c) = outbound_closed {
                out = CheckResult::banded(
                    &out.name,
                    &out.description,
                    c,
                    stats.outbound_detection(),
                    BAND_SIGMAS,
                );
            }
            checks.push(out);
            checks.push(informational(
                "return-detection",
                "return frame rejected",
                stats.return_detection(),
            ));
            let mut ber = informational(
                "bit-error-rate",
                "Alice's decoded bits",
                stats.bit_error_rate(),
            );
            if adversary == Adversary::passive() {
                ber.closed_form = Some(0.0);
                ber.pass = stats.decode_errors == 0 && stats.completed == stats.sessions;
            }
            checks.push(ber);
        }
    }
    Ok(SweepReport::new(config.clone(), checks, Vec::new()))
}

/// Bob's data for `session`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Bits(String),
    Hex(String),
    File(std::path::PathBuf),
}

fn parse_bits(s: &str) -> Result<Vec<Bit>, CliError> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(CliError::Usage(format!("bad bit {other:?} in data"))),
        })
        .collect()
}

fn parse_hex(s: &str) -> Result<Vec<Bit>, CliError> {
    let digits: String = s
        .trim()
        .trim_start_matches("0x")
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect();
    if digits.len() % 2 == 1 {
        return Err(CliError::Usage(
            "hex data has an odd number of digits".into(),
        ));
    }
    let mut bits = Vec::with_capacity(digits.len() * 4);
    for c in digits.chars() {
        let v = c
            .to_digit(16)
            .ok_or_else(|| CliError::Usage(format!("bad hex digit {c:?} in data")))?;
        bits.extend((0..4).rev().map(|i| ((v >> i) & 1) as Bit));
    }
    Ok(bits)
}

impl DataSource {
    /// A file holds either a bit string or `0x`-prefixed hex.
    pub fn bits(&self) -> Result<Vec<Bit>, CliError> {
        let bits = match self {
            DataSource::Bits(s) => parse_bits(s)?,
            DataSource::Hex(s) => parse_hex(s)?,
            DataSource::File(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::io(Path::new(path), e))?;
                if text.trim_start().starts_with("0x") {
                    parse_hex(&text)?
                } else {
                    parse_bits(&text)?
                }
            }
        };
        if bits.is_empty() {
            return Err(CliError::Usage("data input is empty".into()));
        }
        Ok(bits)
    }
}

/// One round trip on `data`. The payload size is the data length.
pub fn cmd_session(
    config: &ExperimentConfig,
    data: Option<&DataSource>,
) -> Result<SessionSummary, CliError> {
    let data = data
        .ok_or_else(|| CliError::Usage("session needs --bits, --hex or --data-file".into()))?
        .bits()?;
    let mut config = config.clone();
    config.payload = data.len();
    config.validate()?;
    let sc = session_config(&config, data.len(), config.checks)?;
    let mut adversary = config.strategy.adversary(None, None)?;
    let mut rng = substream(config.seed, 0);
    let r = run_protocol2(&sc, &data, &mut adversary, &mut rng)?;
    let eve = EveSummary {
        outbound_strategy: adversary.outbound.tag(),
        return_strategy: adversary.return_leg.tag(),
        captures: r.eve.captures.len(),
        touched_outbound: r.outbound.touched_slots.clone(),
        touched_return: r
            .return_leg
            .as_ref()
            .map(|l| l.touched_slots.clone())
            .unwrap_or_default(),
        injected: r.eve.injected.len(),
        replicas_held: r.eve.replicas_held.iter().map(Vec::len).sum(),
        data_estimate: r.eve_data_estimate.as_deref().map(bit_string),
        recovered_data: r.eve_recovered_data,
    };
    Ok(SessionSummary {
        tool: crate::report::TOOL,
        version: env!("CARGO_PKG_VERSION"),
        data: bit_string(&r.data),
        decoded: r.decoded.as_deref().map(bit_string),
        decode_errors: r.decode_errors,
        completed: r.completed(),
        abort: r.abort.clone(),
        outbound: r.outbound.clone(),
        return_leg: r.return_leg.clone(),
        eve,
        transcript: r.transcript.messages().to_vec(),
        config,
    })
}
