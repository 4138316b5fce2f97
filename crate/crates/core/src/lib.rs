//! Simulation of a two-layer qubit transmission scheme.
//!
//! The lower layer sends authenticated qubit frames: the sender hides check
//! qubits of publicly known (but later disclosed) angles at secret random
//! positions, and the receiver verifies them after the disclosure arrives on
//! an authenticated classical channel. The upper layer moves classical bits
//! confidentially on a round trip: Alice prepares qubits at secret angles, Bob
//! encodes each bit as a half-turn rotation without measuring, and Alice undoes
//! her rotation before measuring.
//!
//! Every probability the scheme's security argument relies on is available here
//! in three forms: a closed form ([`analysis::oracles`]), an exhaustive
//! enumeration over small instances ([`analysis::enumerate`]), and a Monte
//! Carlo estimate driven through the real protocol code ([`analysis::montecarlo`]).

pub mod adversary;
pub mod analysis;
pub mod channels;
pub mod error;
pub mod protocols;
pub mod qubit;
pub mod rng;
pub mod scheme;

pub use error::{Error, Result};
pub use qubit::{Bit, MeasurementOutcome, QubitState};
pub use scheme::AngleScheme;
