use serde::{Deserialize, Serialize};

/// A Bernoulli frequency with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub hits: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        assert!(trials > 0, "an estimate needs at least one trial");
        let value = hits as f64 / trials as f64;
        Estimate {
            value,
            stderr: (value * (1.0 - value) / trials as f64).sqrt(),
            trials,
            hits,
        }
    }

    /// Standard error of a frequency over this many trials if the true
    /// probability were `p`.
    pub fn null_stderr(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Two-sided band test against an expected probability. The band is
    /// `sigmas` standard errors computed under the expected value, so an
    /// expected 0 or 1 demands an exact match.
    pub fn agrees_with(&self, expected: f64, sigmas: f64) -> bool {
        (self.value - expected).abs() <= sigmas * self.null_stderr(expected) + 1e-12
    }

    pub fn merge(&self, other: &Estimate) -> Estimate {
        Estimate::from_counts(self.hits + other.hits, self.trials + other.trials)
    }
}

/// Half-width of every Monte Carlo acceptance band, in standard errors.
pub const BAND_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha: f64,
    pub closed_form: f64,
    pub empirical: Estimate,
}

impl CurvePoint {
    pub fn agrees(&self) -> bool {
        self.empirical.agrees_with(self.closed_form, BAND_SIGMAS)
    }
}

/// Detection probability against Eve's rotation angle.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionCurve {
    pub points: Vec<CurvePoint>,
}

impl DetectionCurve {
    pub fn all_agree(&self) -> bool {
        self.points.iter().all(CurvePoint::agrees)
    }

    /// Grid point with the smallest empirical detection probability.
    pub fn empirical_minimum(&self) -> Option<&CurvePoint> {
        self.points
            .iter()
            .min_by(|a, b| a.empirical.value.total_cmp(&b.empirical.value))
    }
}
