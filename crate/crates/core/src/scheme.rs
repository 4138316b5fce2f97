//! The public angle set `θ_k = 2kπ/n` with uniform selection probabilities.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleScheme {
    angles: Vec<f64>,
    probs: Vec<f64>,
    uniform: bool,
}

/// Number of angles used when nothing else is configured.
pub const DEFAULT_ANGLE_COUNT: usize = 3;

impl AngleScheme {
    /// Uniform scheme over `n` equally spaced angles.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::input(format!(
                "angle count must be at least 2, got {n}"
            )));
        }
        let angles = (0..n).map(|k| k as f64 * TAU / n as f64).collect();
        Ok(AngleScheme {
            angles,
            probs: vec![1.0 / n as f64; n],
            uniform: true,
        })
    }

    /// Arbitrary angle set with uniform weights, for demonstrating what goes
    /// wrong without equal spacing.
    #[cfg(test)]
    pub(crate) fn custom_uniform_weights(angles: Vec<f64>) -> Self {
        let n = angles.len();
        AngleScheme {
            angles,
            probs: vec![1.0 / n as f64; n],
            uniform: false,
        }
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Angle of index `k`. Panics if `k >= n`.
    pub fn angle(&self, k: usize) -> f64 {
        self.angles[k]
    }

    /// Equally spaced with more than two angles. Two angles still detect
    /// tampering but leak the angle index to a measuring eavesdropper.
    pub fn is_secure(&self) -> bool {
        self.uniform && self.n() > 2
    }

    pub fn is_equally_spaced(&self) -> bool {
        self.uniform
    }

    /// Draw an angle index. Consumes one uniform draw.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let n = self.n();
        if self.uniform {
            ((u * n as f64) as usize).min(n - 1)
        } else {
            let mut acc = 0.0;
            for (k, p) in self.probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return k;
                }
            }
            n - 1
        }
    }

    /// `Σ p_k cos²((θ_k−α)/2) − Σ p_k sin²((θ_k−α)/2)`, which collapses to
    /// `Σ p_k cos(θ_k−α)`. Zero for every `α` exactly when Eve's measured bit is
    /// independent of the encoded bit.
    pub fn balance_check(&self, alpha: f64) -> f64 {
        self.angles
            .iter()
            .zip(&self.probs)
            .map(|(&theta, &p)| {
                let half = (theta - alpha) / 2.0;
                p * (half.cos().powi(2) - half.sin().powi(2))
            })
            .sum()
    }

    /// Weighted sum of the unit vectors at each angle, `(z, x)` components.
    pub fn vector_sum(&self) -> (f64, f64) {
        self.angles
            .iter()
            .zip(&self.probs)
            .fold((0.0, 0.0), |(z, x), (&theta, &p)| {
                (z + p * theta.cos(), x + p * theta.sin())
            })
    }
}

impl Default for AngleScheme {
    fn default() -> Self {
        AngleScheme::new(DEFAULT_ANGLE_COUNT).expect("default angle count is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn three_angle_scheme() {
        let s = AngleScheme::new(3).unwrap();
        assert_eq!(s.n(), 3);
        for (k, expected) in [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0].iter().enumerate() {
            assert_abs_diff_eq!(s.angle(k), *expected, epsilon = 1e-15);
            assert_abs_diff_eq!(s.probs()[k], 1.0 / 3.0, epsilon = 1e-15);
        }
        assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.is_secure());
    }

    #[test]
    fn two_angle_scheme_is_flagged() {
        let s = AngleScheme::new(2).unwrap();
        assert_abs_diff_eq!(s.angle(1), PI, epsilon = 1e-15);
        assert!(!s.is_secure());
    }

    #[test]
    fn too_few_angles() {
        assert!(AngleScheme::new(1).is_err());
        assert!(AngleScheme::new(0).is_err());
    }

    #[test]
    fn sample_index_frequencies() {
        let s = AngleScheme::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut counts = [0usize; 3];
        let trials = 300_000;
        for _ in 0..trials {
            counts[s.sample_index(&mut rng)] += 1;
        }
        for c in counts {
            assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.01);
        }
    }

    #[test]
    fn sample_index_range_and_replay() {
        let s = AngleScheme::new(2).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(4);
        let mut b = ChaCha8Rng::seed_from_u64(4);
        let xs: Vec<usize> = (0..1000).map(|_| s.sample_index(&mut a)).collect();
        let ys: Vec<usize> = (0..1000).map(|_| s.sample_index(&mut b)).collect();
        assert!(xs.iter().all(|&k| k < 2));
        assert_eq!(xs, ys);
    }

    #[test]
    fn balance_holds_on_grid() {
        let s = AngleScheme::new(3).unwrap();
        for i in 0..100 {
            let alpha = i as f64 * TAU / 100.0 - 1.0;
            assert!(s.balance_check(alpha).abs() < 1e-12);
        }
        assert!(AngleScheme::new(2).unwrap().balance_check(0.0).abs() < 1e-15);
    }

    #[test]
    fn skewed_scheme_is_unbalanced() {
        let s = AngleScheme::custom_uniform_weights(vec![0.0, PI / 3.0]);
        assert_abs_diff_eq!(s.balance_check(0.0), 0.75, epsilon = 1e-12);
        assert!(!s.is_secure());
    }

    #[test]
    fn vector_sum_vanishes() {
        for n in [2, 3, 4, 5, 8, 12] {
            let (z, x) = AngleScheme::new(n).unwrap().vector_sum();
            assert!(z.abs() < 1e-12 && x.abs() < 1e-12, "n={n}");
        }
    }

    proptest! {
        #[test]
        fn balance_equals_dot_product(n in 2usize..13, alpha in -10.0f64..10.0) {
            let s = AngleScheme::new(n).unwrap();
            let dot: f64 = s.angles().iter().zip(s.probs())
                .map(|(t, p)| p * (t.cos() * alpha.cos() + t.sin() * alpha.sin()))
                .sum();
            prop_assert!((s.balance_check(alpha) - dot).abs() < 1e-12);
        }
    }
}
