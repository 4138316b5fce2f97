//! Closed-form probabilities.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scheme::AngleScheme;

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `num / den` as a float without overflowing either operand.
pub(crate) fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let (n, d) = if shift >= 0 {
        (num << shift as u64, den.clone())
    } else {
        (num.clone(), den << (-shift) as u64)
    };
    let q = (n / d).to_f64().expect("quotient fits in f64");
    q * 2f64.powi(-shift as i32)
}

/// Probability that Eve's rotate-by-`α`-and-measure reading of a check qubit
/// flips the receiver's verification:
/// `Σ p_k [sin²(θ_k/2)·cos²((θ_k−α)/2) + cos²(θ_k/2)·sin²((θ_k−α)/2)]`.
pub fn error_prob_general(scheme: &AngleScheme, alpha: f64) -> f64 {
    scheme
        .angles()
        .iter()
        .zip(scheme.probs())
        .map(|(&theta, &p)| {
            let a = theta / 2.0;
            let b = (theta - alpha) / 2.0;
            p * (a.sin().powi(2) * b.cos().powi(2) + a.cos().powi(2) * b.sin().powi(2))
        })
        .sum()
}

/// The same error probability for an equally spaced scheme with `n > 2`,
/// which reduces to `1/2 − cos(α)/4` independent of `n`.
pub fn error_prob_uniform(n: usize, alpha: f64) -> Result<f64> {
    if n <= 2 {
        return Err(Error::input(format!(
            "the reduced error probability needs more than two angles, got {n}"
        )));
    }
    Ok(0.5 - alpha.cos() / 4.0)
}

/// Probability that Eve reads 0 after rotating by `-α`, given that the
/// encoded bit is 0: `Σ p_k cos²((θ_k−α)/2)`.
pub fn eve_zero_prob(scheme: &AngleScheme, alpha: f64) -> f64 {
    scheme
        .angles()
        .iter()
        .zip(scheme.probs())
        .map(|(&theta, &p)| p * ((theta - alpha) / 2.0).cos().powi(2))
        .sum()
}

/// Probability that Eve inspects `L` random slots of an `N + M` frame and no
/// check fails, when each inspected check fails with probability `Pe`:
/// `Σ_k (1−Pe)^k · C(N, L−k)·C(M, k) / C(M+N, L)`.
///
/// This is the probability of going *undetected*.
pub fn undetected_prob(payload: u64, checks: u64, inspected: u64, pe: f64) -> Result<f64> {
    if inspected > payload + checks {
        return Err(Error::input(format!(
            "cannot inspect {inspected} slots of a frame of {}",
            payload + checks
        )));
    }
    if !(0.0..=1.0).contains(&pe) {
        return Err(Error::input(format!(
            "detection probability {pe} outside [0, 1]"
        )));
    }
    let total = binomial(payload + checks, inspected);
    let mut sum = 0.0;
    for k in 0..=inspected {
        if inspected - k > payload || k > checks {
            continue;
        }
        let ways = binomial(payload, inspected - k) * binomial(checks, k);
        sum += (1.0 - pe).powi(k as i32) * ratio(&ways, &total);
    }
    Ok(sum)
}

/// Probability that replacing `L` random slots hits no check qubit:
/// `C(N, L) / C(M+N, L)`.
pub fn replace_success_prob(payload: u64, checks: u64, replaced: u64) -> Result<f64> {
    if replaced > payload {
        return Err(Error::input(format!(
            "cannot replace {replaced} of {payload} data slots"
        )));
    }
    Ok(ratio(
        &binomial(payload, replaced),
        &binomial(payload + checks, replaced),
    ))
}

/// `Σ_k cos²(2kπ/n)`.
pub fn cos_square_sum(n: usize) -> f64 {
    (0..n)
        .map(|k| (std::f64::consts::TAU * k as f64 / n as f64).cos().powi(2))
        .sum()
}

/// `Σ_k cos(2kπ/n)·sin(2kπ/n)`.
pub fn cross_term_sum(n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            t.cos() * t.sin()
        })
        .sum()
}
