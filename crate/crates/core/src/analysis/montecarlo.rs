//! Monte Carlo estimators driven through the real protocol code.
//!
//! Trials are cut into fixed-size blocks; block `b` always draws from
//! substream `b` of the master seed. Blocks run in parallel and are merged in
//! block order, so results depend only on `(seed, trials)` and adding trials
//! leaves earlier blocks untouched.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entropy::JointCounts;
use super::estimate::{CurvePoint, DetectionCurve, Estimate};
use super::oracles::error_prob_general;
use crate::adversary::{
    apply_leg_strategy, eve_angle_guess, Adversary, EveRecord, EveStrategy, EveView, Selection,
};
use crate::channels::{ClassicalTranscript, Leg, QubitFrame};
use crate::error::{Error, Result};
use crate::protocols::{
    p1_build_frame, p1_verify, p2_alice_prepare, p2_bob_encode, run_protocol2, SessionConfig,
    Verdict,
};
use crate::qubit::{Bit, QubitState};
use crate::rng::{substream, SimRng};
use crate::scheme::AngleScheme;

pub const BLOCK_TRIALS: u64 = 4096;

/// Run `trials` trials in seeded blocks; `block(rng, count)` handles one block.
pub fn run_blocks<A, F>(trials: u64, seed: u64, block: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut SimRng, u64) -> A + Sync,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            let mut rng = substream(seed, b);
            block(&mut rng, count)
        })
        .collect()
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::input("at least one trial is required"));
    }
    Ok(())
}

/// Frequency of a fallible per-trial event.
pub fn bernoulli<F>(trials: u64, seed: u64, trial: F) -> Result<Estimate>
where
    F: Fn(&mut SimRng) -> Result<bool> + Sync,
{
    require_trials(trials)?;
    let hits = run_blocks(trials, seed, |rng, count| {
        let mut hits = 0u64;
        for _ in 0..count {
            hits += trial(rng)? as u64;
        }
        Ok::<_, Error>(hits)
    })
    .into_iter()
    .sum::<Result<u64>>()?;
    Ok(Estimate::from_counts(hits, trials))
}

fn outbound_view<'a>(scheme: &'a AngleScheme, transcript: &'a ClassicalTranscript) -> EveView<'a> {
    EveView {
        leg: Leg::Outbound,
        scheme,
        transcript: transcript.view(),
        leaked: &[],
        protected: true,
        payload_len: 0,
    }
}

/// `P(Z = 0)` for an outbound data qubit read by Eve after rotating by
/// `-alpha`. Alice's outbound qubits carry no data, so this is the
/// `X = 0` row of Eve's channel.
pub fn eve_bit_bias(scheme: &AngleScheme, alpha: f64, trials: u64, seed: u64) -> Result<Estimate> {
    let strategy = EveStrategy::RotateMeasure {
        alpha,
        selection: Selection::All,
    };
    let transcript = ClassicalTranscript::new();
    bernoulli(trials, seed, |rng| {
        let (_, qubits) = p2_alice_prepare(1, scheme, rng)?;
        let mut record = EveRecord::default();
        apply_leg_strategy(
            &strategy,
            QubitFrame::new(qubits),
            &outbound_view(scheme, &transcript),
            &mut record,
            rng,
        )?;
        Ok(record.captures[0].bit == 0)
    })
}

/// Joint counts of Bob's uniformly random bit `X` and Eve's reading `Z` of the
/// encoded return qubit after rotating by `-alpha`.
pub fn return_leg_pairs(
    scheme: &AngleScheme,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<JointCounts> {
    require_trials(trials)?;
    let strategy = EveStrategy::RotateMeasure {
        alpha,
        selection: Selection::All,
    };
    let transcript = ClassicalTranscript::new();
    let blocks = run_blocks(trials, seed, |rng, count| {
        let mut counts = JointCounts::default();
        for _ in 0..count {
            let (_, qubits) = p2_alice_prepare(1, scheme, rng)?;
            let x: Bit = rng.random_range(0..2);
            let encoded = p2_bob_encode(&qubits, &[x])?;
            let mut record = EveRecord::default();
            let view = EveView {
                leg: Leg::Return,
                ..outbound_view(scheme, &transcript)
            };
            apply_leg_strategy(&strategy, QubitFrame::new(encoded), &view, &mut record, rng)?;
            counts.add(x, record.captures[0].bit);
        }
        Ok::<_, Error>(counts)
    });
    let mut total = JointCounts::default();
    for b in blocks {
        total.merge(&b?);
    }
    Ok(total)
}

/// Frequency with which one check qubit fails verification after Eve rotates
/// it by `-alpha` and measures it.
pub fn check_detection(
    scheme: &AngleScheme,
    alpha: f64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    let strategy = EveStrategy::RotateMeasure {
        alpha,
        selection: Selection::All,
    };
    let transcript = ClassicalTranscript::new();
    bernoulli(trials, seed, |rng| {
        let sender = p1_build_frame(Vec::new(), scheme, 1, rng)?;
        let disclosure = sender.disclosure();
        let mut record = EveRecord::default();
        let frame = apply_leg_strategy(
            &strategy,
            sender.frame,
            &outbound_view(scheme, &transcript),
            &mut record,
            rng,
        )?;
        Ok(p1_verify(&frame, &disclosure, scheme, rng)?.verdict == Verdict::AuthenticationError)
    })
}

/// Empirical against closed-form check detection over a grid of angles.
/// Grid point `i` draws from `derive_seed(seed, i)`.
pub fn detection_curve(
    scheme: &AngleScheme,
    alphas: &[f64],
    trials: u64,
    seed: u64,
) -> Result<DetectionCurve> {
    let points = alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            Ok(CurvePoint {
                alpha,
                closed_form: error_prob_general(scheme, alpha),
                empirical: check_detection(
                    scheme,
                    alpha,
                    trials,
                    crate::rng::derive_seed(seed, i as u64),
                )?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DetectionCurve { points })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameAttackStats {
    /// Every check read 0.
    pub undetected: Estimate,
    /// Eve touched no check slot.
    pub no_check_touched: Estimate,
}

/// One authenticated frame of random data qubits attacked by a single-leg
/// strategy, repeated `trials` times.
pub fn frame_attack(
    payload: usize,
    checks: usize,
    scheme: &AngleScheme,
    strategy: &EveStrategy,
    trials: u64,
    seed: u64,
) -> Result<FrameAttackStats> {
    require_trials(trials)?;
    let transcript = ClassicalTranscript::new();
    let blocks = run_blocks(trials, seed, |rng, count| {
        let mut undetected = 0u64;
        let mut clean = 0u64;
        for _ in 0..count {
            let data: Vec<QubitState> = (0..payload)
                .map(|_| QubitState::new(scheme.angle(scheme.sample_index(rng))))
                .collect::<Result<_>>()?;
            let sender = p1_build_frame(data, scheme, checks, rng)?;
            let disclosure = sender.disclosure();
            let mut record = EveRecord::default();
            let view = EveView {
                payload_len: payload,
                ..outbound_view(scheme, &transcript)
            };
            let frame =
                apply_leg_strategy(strategy, sender.frame.clone(), &view, &mut record, rng)?;
            let verdict = p1_verify(&frame, &disclosure, scheme, rng)?.verdict;
            undetected += (verdict == Verdict::Authentic) as u64;
            let hit = record
                .touched_on(Leg::Outbound)
                .iter()
                .any(|&s| sender.is_check_slot(s));
            clean += (!hit) as u64;
        }
        Ok::<_, Error>((undetected, clean))
    });
    let (mut undetected, mut clean) = (0, 0);
    for b in blocks {
        let (u, c) = b?;
        undetected += u;
        clean += c;
    }
    Ok(FrameAttackStats {
        undetected: Estimate::from_counts(undetected, trials),
        no_check_touched: Estimate::from_counts(clean, trials),
    })
}

/// How often Eve's maximum-likelihood guess of Alice's angle index is right
/// after measuring an outbound data qubit in the computational basis.
pub fn angle_guess_accuracy(scheme: &AngleScheme, trials: u64, seed: u64) -> Result<Estimate> {
    let transcript = ClassicalTranscript::new();
    bernoulli(trials, seed, |rng| {
        let (secrets, qubits) = p2_alice_prepare(1, scheme, rng)?;
        let mut record = EveRecord::default();
        apply_leg_strategy(
            &EveStrategy::MeasureAll,
            QubitFrame::new(qubits),
            &outbound_view(scheme, &transcript),
            &mut record,
            rng,
        )?;
        Ok(eve_angle_guess(&record, scheme)[0].index == secrets[0])
    })
}

/// Aggregated outcomes of many full round-trip sessions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SessionStats {
    pub sessions: u64,
    pub completed: u64,
    pub outbound_failures: u64,
    pub return_failures: u64,
    pub return_attempts: u64,
    pub decoded_bits: u64,
    pub decode_errors: u64,
    pub sessions_with_errors: u64,
    pub eve_recovered: u64,
    pub eve_estimates: u64,
    pub eve_bits: u64,
    pub eve_correct_bits: u64,
    /// Eve's return-leg substitution landed exactly on the data slots.
    pub exact_substitutions: u64,
    /// Alice accepted and decoded exactly Eve's fake bits.
    pub forged: u64,
}

impl SessionStats {
    fn merge(&mut self, o: &SessionStats) {
        self.sessions += o.sessions;
        self.completed += o.completed;
        self.outbound_failures += o.outbound_failures;
        self.return_failures += o.return_failures;
        self.return_attempts += o.return_attempts;
        self.decoded_bits += o.decoded_bits;
        self.decode_errors += o.decode_errors;
        self.sessions_with_errors += o.sessions_with_errors;
        self.eve_recovered += o.eve_recovered;
        self.eve_estimates += o.eve_estimates;
        self.eve_bits += o.eve_bits;
        self.eve_correct_bits += o.eve_correct_bits;
        self.exact_substitutions += o.exact_substitutions;
        self.forged += o.forged;
    }

    pub fn outbound_detection(&self) -> Estimate {
        Estimate::from_counts(self.outbound_failures, self.sessions)
    }

    /// Return-leg detection among sessions that reached the return leg.
    pub fn return_detection(&self) -> Option<Estimate> {
        (self.return_attempts > 0)
            .then(|| Estimate::from_counts(self.return_failures, self.return_attempts))
    }

    pub fn bit_error_rate(&self) -> Option<Estimate> {
        (self.decoded_bits > 0)
            .then(|| Estimate::from_counts(self.decode_errors, self.decoded_bits))
    }

    pub fn eve_recovery(&self) -> Estimate {
        Estimate::from_counts(self.eve_recovered, self.sessions)
    }

    pub fn eve_bit_accuracy(&self) -> Option<Estimate> {
        (self.eve_bits > 0).then(|| Estimate::from_counts(self.eve_correct_bits, self.eve_bits))
    }

    pub fn substitution_success(&self) -> Estimate {
        Estimate::from_counts(self.exact_substitutions, self.sessions)
    }
}

/// Run `trials` sessions with uniformly random data against copies of
/// `adversary`.
pub fn session_batch(
    config: &SessionConfig,
    adversary: &Adversary,
    trials: u64,
    seed: u64,
) -> Result<SessionStats> {
    require_trials(trials)?;
    let blocks = run_blocks(trials, seed, |rng, count| {
        let mut stats = SessionStats::default();
        for _ in 0..count {
            let data: Vec<Bit> = (0..config.payload)
                .map(|_| rng.random_range(0..2))
                .collect();
            let mut eve = Adversary::per_leg(adversary.outbound, adversary.return_leg);
            let r = run_protocol2(config, &data, &mut eve, rng)?;
            stats.sessions += 1;
            stats.outbound_failures +=
                (r.outbound.verdict == Some(Verdict::AuthenticationError)) as u64;
            if let Some(ret) = &r.return_leg {
                stats.return_attempts += 1;
                stats.return_failures += (ret.verdict == Some(Verdict::AuthenticationError)) as u64;
                stats.exact_substitutions += ret.injected_exactly_payload as u64;
            }
            if let (Some(decoded), Some(errors)) = (&r.decoded, r.decode_errors) {
                stats.completed += 1;
                stats.decoded_bits += decoded.len() as u64;
                stats.decode_errors += errors as u64;
                stats.sessions_with_errors += (errors > 0) as u64;
                stats.forged += (!r.eve.fake_data.is_empty() && *decoded == r.eve.fake_data) as u64;
            }
            if let Some(est) = &r.eve_data_estimate {
                stats.eve_estimates += 1;
                stats.eve_bits += est.len() as u64;
                stats.eve_correct_bits +=
                    est.iter().zip(&data).filter(|(a, b)| a == b).count() as u64;
            }
            stats.eve_recovered += r.eve_recovered_data as u64;
        }
        Ok::<_, Error>(stats)
    });
    let mut total = SessionStats::default();
    for b in blocks {
        total.merge(&b?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::estimate::BAND_SIGMAS;
    use crate::analysis::oracles::eve_zero_prob;
    use std::f64::consts::PI;

    #[test]
    fn blocks_do_not_depend_on_total() {
        let a = run_blocks(3 * BLOCK_TRIALS, 9, |rng, n| {
            (0..n).map(|_| rng.random::<u32>() as u64).sum::<u64>()
        });
        let b = run_blocks(5 * BLOCK_TRIALS + 7, 9, |rng, n| {
            (0..n).map(|_| rng.random::<u32>() as u64).sum::<u64>()
        });
        assert_eq!(a[..], b[..3]);
        assert_eq!(b.len(), 6);
    }

    #[test]
    fn zero_trials_rejected() {
        let s = AngleScheme::new(3).unwrap();
        assert!(eve_bit_bias(&s, 0.0, 0, 1).is_err());
    }

    #[test]
    fn bit_bias_is_balanced_for_three_angles() {
        let s = AngleScheme::new(3).unwrap();
        let e = eve_bit_bias(&s, 0.7, 100_000, 3).unwrap();
        assert!(e.agrees_with(0.5, BAND_SIGMAS), "{e:?}");
    }

    #[test]
    fn bit_bias_for_two_angles() {
        // averaged over Alice's two orthogonal choices the reading is still a
        // fair coin, but each choice is read deterministically
        let s = AngleScheme::new(2).unwrap();
        let e = eve_bit_bias(&s, 0.0, 100_000, 4).unwrap();
        assert!(e.agrees_with(eve_zero_prob(&s, 0.0), BAND_SIGMAS));
        assert_eq!(angle_guess_accuracy(&s, 10_000, 4).unwrap().value, 1.0);
    }

    #[test]
    fn bit_bias_for_skewed_scheme() {
        let s = AngleScheme::custom_uniform_weights(vec![0.0, PI / 3.0]);
        let e = eve_bit_bias(&s, 0.0, 100_000, 5).unwrap();
        assert!(e.agrees_with(0.875, BAND_SIGMAS), "{e:?}");
    }

    #[test]
    fn sessions_run_deterministically() {
        let config = SessionConfig::new(AngleScheme::new(3).unwrap(), 4, 2).unwrap();
        let adv = Adversary::new(EveStrategy::MeasureRandom { count: 2 });
        let a = session_batch(&config, &adv, 3000, 11).unwrap();
        let b = session_batch(&config, &adv, 3000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sessions, 3000);
    }

    #[test]
    fn rotate_measure_on_return_leg_leaks_nothing() {
        let s = AngleScheme::new(3).unwrap();
        let c = return_leg_pairs(&s, 1.1, 200_000, 6).unwrap();
        assert!(c.mutual_information().unwrap() < 1e-3);
    }
}
