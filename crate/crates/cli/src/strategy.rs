//! `--strategy <tag[:params][@leg]>` parsing.
//!
//! | tag                | params           | notes                                  |
//! |--------------------|------------------|----------------------------------------|
//! | `passive`          |                  |                                        |
//! | `measure-all`      |                  |                                        |
//! | `measure-random`   | `L`              | without `L`, `attack` sweeps L         |
//! | `rotate-measure`   | `alpha[,L]`      | without alpha, `attack` sweeps the grid|
//! | `replace`          | `L[,theta]`      | fixed replacement angle optional       |
//! | `intercept-resend` |                  | both legs                              |
//! | `replica-capture`  |                  | both legs, needs `--replicas >= 2`     |
//! | `disrupt-return`   |                  | return leg                             |
//!
//! Angles accept a `pi` suffix (`0.5pi`, `2pi`). `@outbound` or `@return`
//! moves a single-leg strategy to the named leg.

use std::fmt;
use std::str::FromStr;

use qubitsec_core::adversary::{Adversary, EveStrategy, ReplacementPolicy, Selection};
use qubitsec_core::channels::Leg;
use serde::{Serialize, Serializer};

use crate::config::{parse_angle, CliError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    Passive,
    MeasureAll,
    MeasureRandom(Option<usize>),
    RotateMeasure {
        alpha: Option<f64>,
        count: Option<usize>,
    },
    Replace {
        count: Option<usize>,
        fixed: Option<f64>,
    },
    InterceptResend,
    ReplicaCapture,
    DisruptReturn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub leg: Option<Leg>,
    raw: String,
}

impl StrategySpec {
    pub fn passive() -> Self {
        "passive".parse().expect("valid")
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            StrategyKind::Passive => "passive",
            StrategyKind::MeasureAll => "measure-all",
            StrategyKind::MeasureRandom(_) => "measure-random",
            StrategyKind::RotateMeasure { .. } => "rotate-measure",
            StrategyKind::Replace { .. } => "replace",
            StrategyKind::InterceptResend => "intercept-resend",
            StrategyKind::ReplicaCapture => "replica-capture",
            StrategyKind::DisruptReturn => "disrupt-return",
        }
    }

    /// The single-leg strategy with any sweep parameter filled in. `count`
    /// and `alpha` override values fixed in the strategy string.
    pub fn strategy(
        &self,
        count: Option<usize>,
        alpha: Option<f64>,
    ) -> Result<EveStrategy, CliError> {
        let missing = |what: &str| CliError::Usage(format!("strategy {} needs {what}", self.tag()));
        Ok(match self.kind {
            StrategyKind::Passive => EveStrategy::Passive,
            StrategyKind::MeasureAll => EveStrategy::MeasureAll,
            StrategyKind::MeasureRandom(l) => EveStrategy::MeasureRandom {
                count: count.or(l).ok_or_else(|| missing("a slot count"))?,
            },
            StrategyKind::RotateMeasure { alpha: a, count: l } => EveStrategy::RotateMeasure {
                alpha: alpha.or(a).ok_or_else(|| missing("an angle"))?,
                selection: match count.or(l) {
                    Some(l) => Selection::Random(l),
                    None => Selection::All,
                },
            },
            StrategyKind::Replace { count: l, fixed } => EveStrategy::ReplaceQubits {
                count: count.or(l).ok_or_else(|| missing("a slot count"))?,
                policy: match fixed {
                    Some(t) => ReplacementPolicy::Fixed(t),
                    None => ReplacementPolicy::UniformScheme,
                },
            },
            StrategyKind::InterceptResend => EveStrategy::InterceptResend,
            StrategyKind::ReplicaCapture => EveStrategy::ReplicaCapture,
            StrategyKind::DisruptReturn => EveStrategy::DisruptReturn,
        })
    }

    pub fn adversary(
        &self,
        count: Option<usize>,
        alpha: Option<f64>,
    ) -> Result<Adversary, CliError> {
        let s = self.strategy(count, alpha)?;
        Ok(match self.leg {
            None => Adversary::new(s),
            Some(Leg::Outbound) => Adversary::per_leg(s, EveStrategy::Passive),
            Some(Leg::Return) => Adversary::per_leg(EveStrategy::Passive, s),
        })
    }
}

fn parse_count(tag: &str, s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("bad slot count {s:?} for {tag}")))
}

impl FromStr for StrategySpec {
    type Err = CliError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let (body, leg) = match raw.split_once('@') {
            Some((b, "outbound")) | Some((b, "1")) => (b, Some(Leg::Outbound)),
            Some((b, "return")) | Some((b, "2")) => (b, Some(Leg::Return)),
            Some((_, other)) => return Err(CliError::Usage(format!("unknown leg {other:?}"))),
            None => (raw, None),
        };
        let (tag, params) = match body.split_once(':') {
            Some((t, p)) => (t, Some(p)),
            None => (body, None),
        };
        let params: Vec<&str> = params.map(|p| p.split(',').collect()).unwrap_or_default();
        let no_params = |kind: StrategyKind| {
            if params.is_empty() {
                Ok(kind)
            } else {
                Err(CliError::Usage(format!(
                    "strategy {tag} takes no parameters"
                )))
            }
        };
        let kind = match tag {
            "passive" => no_params(StrategyKind::Passive)?,
            "measure-all" => no_params(StrategyKind::MeasureAll)?,
            "intercept-resend" => no_params(StrategyKind::InterceptResend)?,
            "replica-capture" => no_params(StrategyKind::ReplicaCapture)?,
            "disrupt-return" => no_params(StrategyKind::DisruptReturn)?,
            "measure-random" => match params.as_slice() {
                [] => StrategyKind::MeasureRandom(None),
                [l] => StrategyKind::MeasureRandom(Some(parse_count(tag, l)?)),
                _ => return Err(CliError::Usage("measure-random takes one parameter".into())),
            },
            "rotate-measure" => match params.as_slice() {
                [] => StrategyKind::RotateMeasure {
                    alpha: None,
                    count: None,
                },
                [a] => StrategyKind::RotateMeasure {
                    alpha: Some(parse_angle(a)?),
                    count: None,
                },
                [a, l] => StrategyKind::RotateMeasure {
                    alpha: Some(parse_angle(a)?),
                    count: Some(parse_count(tag, l)?),
                },
                _ => {
                    return Err(CliError::Usage(
                        "rotate-measure takes at most two parameters".into(),
                    ))
                }
            },
            "replace" => match params.as_slice() {
                [] => StrategyKind::Replace {
                    count: None,
                    fixed: None,
                },
                [l] => StrategyKind::Replace {
                    count: Some(parse_count(tag, l)?),
                    fixed: None,
                },
                [l, t] => StrategyKind::Replace {
                    count: Some(parse_count(tag, l)?),
                    fixed: Some(parse_angle(t)?),
                },
                _ => {
                    return Err(CliError::Usage(
                        "replace takes at most two parameters".into(),
                    ))
                }
            },
            other => return Err(CliError::Usage(format!("unknown strategy tag {other:?}"))),
        };
        let multi_leg = matches!(
            kind,
            StrategyKind::InterceptResend
                | StrategyKind::ReplicaCapture
                | StrategyKind::DisruptReturn
        );
        if multi_leg && leg.is_some() {
            return Err(CliError::Usage(format!(
                "strategy {tag} chooses its own legs"
            )));
        }
        Ok(StrategySpec {
            kind,
            leg,
            raw: raw.to_string(),
        })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl Serialize for StrategySpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.raw)
    }
}
