//! Closed forms, exhaustive enumeration and Monte Carlo estimators for every
//! probability the protocols' security argument relies on.

pub mod entropy;
pub mod enumerate;
pub mod estimate;
pub mod montecarlo;
pub mod oracles;

pub use entropy::{empirical_conditional_entropy, JointCounts};
pub use enumerate::{exhaustive_session_oracle, max_posterior_accuracy, OracleTable};
pub use estimate::{CurvePoint, DetectionCurve, Estimate};
pub use oracles::{
    binomial, error_prob_general, error_prob_uniform, eve_zero_prob, replace_success_prob,
    undetected_prob,
};
