//! Exact probabilities by brute-force enumeration of small frames.
//!
//! Nothing here samples. Every branch of check placement, Eve's slot choice
//! and check angle is visited and weighted, and measurement branches are
//! summed with [`prob_zero`]. The result is an independent ground truth for
//! the closed forms in [`super::oracles`].

use serde::{Deserialize, Serialize};

use crate::adversary::{EveStrategy, ReplacementPolicy, Selection};
use crate::error::{Error, Result};
use crate::qubit::{prob_zero, rotate_adjoint, QubitState};
use crate::scheme::AngleScheme;

/// Largest number of branches an enumeration may visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleTable {
    /// Every check qubit reads 0.
    pub undetected: f64,
    pub detected: f64,
    /// Eve's touched slots contain no check qubit.
    pub no_check_touched: f64,
    pub branches: u128,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

enum Touch {
    Measure { alpha: f64 },
    Replace(ReplacementPolicy),
}

fn state(theta: f64) -> QubitState {
    QubitState::new(theta).expect("finite angle")
}

/// Probability that a check prepared at `theta` still reads 0 after Eve.
fn check_pass(theta: f64, touch: Option<&Touch>, scheme: &AngleScheme) -> f64 {
    let bob_zero = |s: QubitState| prob_zero(rotate_adjoint(s, theta).expect("finite angle"));
    match touch {
        None => bob_zero(state(theta)),
        Some(Touch::Measure { alpha }) => {
            let eve_zero = prob_zero(rotate_adjoint(state(theta), *alpha).expect("finite angle"));
            eve_zero * bob_zero(QubitState::ZERO) + (1.0 - eve_zero) * bob_zero(QubitState::ONE)
        }
        Some(Touch::Replace(ReplacementPolicy::UniformScheme)) => scheme
            .angles()
            .iter()
            .zip(scheme.probs())
            .map(|(&t, &p)| p * bob_zero(state(t)))
            .sum(),
        Some(Touch::Replace(ReplacementPolicy::Fixed(t))) => bob_zero(state(*t)),
    }
}

/// Exact detection statistics of one authenticated frame of `payload` data
/// and `checks` check qubits under a single-leg strategy.
pub fn exhaustive_session_oracle(
    payload: usize,
    checks: usize,
    scheme: &AngleScheme,
    strategy: &EveStrategy,
) -> Result<OracleTable> {
    if checks < 1 {
        return Err(Error::input("at least one check qubit is required"));
    }
    let len = payload + checks;
    let (selection, touch) = match *strategy {
        EveStrategy::Passive => (Selection::Random(0), None),
        EveStrategy::MeasureAll | EveStrategy::InterceptResend => {
            (Selection::All, Some(Touch::Measure { alpha: 0.0 }))
        }
        EveStrategy::MeasureRandom { count } => (
            Selection::Random(count),
            Some(Touch::Measure { alpha: 0.0 }),
        ),
        EveStrategy::RotateMeasure { alpha, selection } => {
            (selection, Some(Touch::Measure { alpha }))
        }
        EveStrategy::ReplaceQubits { count, policy } => {
            (Selection::Random(count), Some(Touch::Replace(policy)))
        }
        other => {
            return Err(Error::Configuration(format!(
                "no single-frame enumeration for {}",
                other.tag()
            )))
        }
    };
    let eve_sets = match selection {
        Selection::All => vec![(0..len).collect()],
        Selection::Random(count) if count <= len => combinations(len, count),
        Selection::Random(count) => {
            return Err(Error::Configuration(format!(
                "cannot select {count} slots from a frame of {len}"
            )))
        }
    };
    let check_sets = combinations(len, checks);
    let n = scheme.n();

    let angle_tuples = (n as u128).checked_pow(checks as u32).unwrap_or(u128::MAX);
    let size = (check_sets.len() as u128)
        .saturating_mul(eve_sets.len() as u128)
        .saturating_mul(angle_tuples)
        .saturating_mul(checks as u128);
    if size > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }

    // pass probability per (touched?, angle index)
    let pass_untouched: Vec<f64> = (0..n)
        .map(|k| check_pass(scheme.angle(k), None, scheme))
        .collect();
    let pass_touched: Vec<f64> = (0..n)
        .map(|k| check_pass(scheme.angle(k), touch.as_ref(), scheme))
        .collect();

    let placement_weight = 1.0 / (check_sets.len() as f64 * eve_sets.len() as f64);
    let mut undetected = 0.0;
    let mut clean = 0.0;
    let mut indices = vec![0usize; checks];
    for check_slots in &check_sets {
        for eve_slots in &eve_sets {
            let hit: Vec<bool> = check_slots.iter().map(|s| eve_slots.contains(s)).collect();
            if hit.iter().all(|h| !h) {
                clean += placement_weight;
            }
            // odometer over every assignment of angle indices to the checks
            indices.iter_mut().for_each(|k| *k = 0);
            loop {
                let mut branch = placement_weight;
                for (i, &k) in indices.iter().enumerate() {
                    let pass = if hit[i] {
                        pass_touched[k]
                    } else {
                        pass_untouched[k]
                    };
                    branch *= scheme.probs()[k] * pass;
                }
                undetected += branch;

                let mut pos = 0;
                loop {
                    if pos == checks {
                        break;
                    }
                    indices[pos] += 1;
                    if indices[pos] < n {
                        break;
                    }
                    indices[pos] = 0;
                    pos += 1;
                }
                if pos == checks {
                    break;
                }
            }
        }
    }

    Ok(OracleTable {
        undetected,
        detected: 1.0 - undetected,
        no_check_touched: clean,
        branches: size,
    })
}

/// Accuracy of the Bayes-optimal guess of Alice's angle index from one
/// reading `Z` taken after rotating by `-alpha`: `Σ_Z max_k p_k P(Z|k)`.
pub fn max_posterior_accuracy(scheme: &AngleScheme, alpha: f64) -> f64 {
    let zero: Vec<f64> = scheme
        .angles()
        .iter()
        .map(|&t| prob_zero(rotate_adjoint(state(t), alpha).expect("finite angle")))
        .collect();
    let best = |lik: &dyn Fn(usize) -> f64| {
        (0..scheme.n())
            .map(|k| scheme.probs()[k] * lik(k))
            .fold(0.0, f64::max)
    };
    best(&|k| zero[k]) + best(&|k| 1.0 - zero[k])
}
