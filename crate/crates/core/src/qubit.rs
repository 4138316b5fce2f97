//! Single qubits confined to the xz-plane of the Bloch sphere.
//!
//! A state is stored as the single angle `theta` of `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
//! The angle is kept modulo 2π; `R(2π) = -I` only contributes a global phase,
//! which no measurement statistic can see.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classical bit value, always 0 or 1.
pub type Bit = u8;

/// Absolute tolerance for comparing reduced angles.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

/// Reduce an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    theta: f64,
}

impl QubitState {
    /// `|0⟩`
    pub const ZERO: QubitState = QubitState { theta: 0.0 };
    /// `|1⟩`
    pub const ONE: QubitState = QubitState { theta: PI };

    /// The state `R(theta)|0⟩`.
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::input(format!("non-finite angle {theta}")));
        }
        Ok(QubitState {
            theta: normalize_angle(theta),
        })
    }

    /// Computational basis state for a bit.
    pub fn basis(bit: Bit) -> Self {
        if bit == 0 {
            Self::ZERO
        } else {
            Self::ONE
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// True when the two states agree up to [`ANGLE_TOLERANCE`].
    pub fn approx_eq(&self, other: &QubitState) -> bool {
        angle_distance(self.theta, other.theta) <= ANGLE_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub bit: Bit,
    pub collapsed: QubitState,
}

/// Apply `R(angle)`, a rotation about the y-axis.
pub fn rotate(state: QubitState, angle: f64) -> Result<QubitState> {
    if !angle.is_finite() {
        return Err(Error::input(format!("non-finite rotation angle {angle}")));
    }
    Ok(QubitState {
        theta: normalize_angle(state.theta + angle),
    })
}

/// Apply `R†(angle) = R(-angle)`.
pub fn rotate_adjoint(state: QubitState, angle: f64) -> Result<QubitState> {
    if !angle.is_finite() {
        return Err(Error::input(format!("non-finite rotation angle {angle}")));
    }
    rotate(state, -angle)
}

/// Probability of reading 0 in the computational basis, `cos²(θ/2)`.
pub fn prob_zero(state: QubitState) -> f64 {
    let c = (state.theta / 2.0).cos();
    c * c
}

/// Measure in the computational basis. Consumes exactly one uniform draw.
pub fn measure<R: Rng + ?Sized>(state: QubitState, rng: &mut R) -> MeasurementOutcome {
    let u: f64 = rng.random();
    let bit = if u < prob_zero(state) { 0 } else { 1 };
    MeasurementOutcome {
        bit,
        collapsed: QubitState::basis(bit),
    }
}
