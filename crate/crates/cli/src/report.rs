//! Report types and their JSON, text and CSV renderings.
//!
//! Reports embed the resolved config and contain nothing that varies between
//! runs of the same config, so their JSON form is reproducible byte for byte.

use std::fmt::Write as _;

use qubitsec_core::analysis::Estimate;
use qubitsec_core::channels::Posted;
use qubitsec_core::protocols::{Abort, LegReport};
use qubitsec_core::qubit::Bit;
use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat};

pub const TOOL: &str = "qubitsec";

/// One point of a swept check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub x: f64,
    pub closed_form: f64,
    pub empirical: Estimate,
    pub pass: bool,
}

/// One acceptance band. A check without a closed form is informational and
/// always passes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub description: String,
    pub pass: bool,
    pub closed_form: Option<f64>,
    pub empirical: Option<Estimate>,
    /// Deterministic statistic the band is applied to, when not an estimate.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    /// Name of the swept variable.
    pub sweep: Option<String>,
    pub points: Vec<SweepPoint>,
}

impl CheckResult {
    pub fn new(name: &str, description: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            description: description.to_string(),
            pass: true,
            closed_form: None,
            empirical: None,
            value: None,
            tolerance: None,
            sweep: None,
            points: Vec::new(),
        }
    }

    /// `empirical` against `closed_form` within the given sigma band.
    pub fn banded(
        name: &str,
        description: &str,
        closed_form: f64,
        empirical: Estimate,
        sigmas: f64,
    ) -> Self {
        CheckResult {
            pass: empirical.agrees_with(closed_form, sigmas),
            closed_form: Some(closed_form),
            empirical: Some(empirical),
            ..Self::new(name, description)
        }
    }

    /// Pass iff every point passes.
    pub fn swept(name: &str, description: &str, sweep: &str, points: Vec<SweepPoint>) -> Self {
        CheckResult {
            pass: points.iter().all(|p| p.pass),
            sweep: Some(sweep.to_string()),
            points,
            ..Self::new(name, description)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub pass: bool,
    /// Findings that hold regardless of band outcomes, e.g.
    /// `confidentiality-break`.
    pub flags: Vec<String>,
    pub checks: Vec<CheckResult>,
}

impl SweepReport {
    pub fn new(config: ExperimentConfig, checks: Vec<CheckResult>, flags: Vec<String>) -> Self {
        SweepReport {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            pass: checks.iter().all(|c| c.pass),
            config,
            flags,
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Text => self.text(),
            OutputFormat::Csv => self.csv(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(
            out,
            "{} {}  n={} N={} M={} trials={} seed={} strategy={}",
            self.config.subcommand,
            if self.pass { "PASS" } else { "FAIL" },
            c.n,
            c.payload,
            c.checks,
            c.trials,
            c.seed,
            c.strategy
        );
        for f in &self.flags {
            let _ = writeln!(out, "flag: {f}");
        }
        let _ = writeln!(
            out,
            "{:<24} {:<4} {:>12} {:>12} {:>10} {:>10}",
            "check", "ok", "closed", "empirical", "stderr", "trials"
        );
        for check in &self.checks {
            let (emp, se, t) = match (&check.empirical, check.value) {
                (Some(e), _) => (fmt_f(e.value), fmt_f(e.stderr), e.trials.to_string()),
                (None, Some(v)) => (fmt_f(v), "-".into(), "-".into()),
                _ => ("-".into(), "-".into(), "-".into()),
            };
            let _ = writeln!(
                out,
                "{:<24} {:<4} {:>12} {:>12} {:>10} {:>10}",
                check.name,
                ok(check.pass),
                check.closed_form.map(fmt_f).unwrap_or_else(|| "-".into()),
                emp,
                se,
                t
            );
            for p in &check.points {
                let _ = writeln!(
                    out,
                    "  {:<22} {:<4} {:>12} {:>12} {:>10} {:>10}",
                    format!("{}={}", check.sweep.as_deref().unwrap_or("x"), fmt_x(p.x)),
                    ok(p.pass),
                    fmt_f(p.closed_form),
                    fmt_f(p.empirical.value),
                    fmt_f(p.empirical.stderr),
                    p.empirical.trials
                );
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("check,sweep,x,closed_form,empirical,stderr,trials,pass\n");
        for check in &self.checks {
            if check.points.is_empty() {
                let emp = check.empirical.map(|e| e.value).or(check.value);
                let _ = writeln!(
                    out,
                    "{},,,{},{},{},{},{}",
                    check.name,
                    opt(check.closed_form),
                    opt(emp),
                    opt(check.empirical.map(|e| e.stderr)),
                    check
                        .empirical
                        .map(|e| e.trials.to_string())
                        .unwrap_or_default(),
                    check.pass
                );
            }
            for p in &check.points {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    check.name,
                    check.sweep.as_deref().unwrap_or(""),
                    p.x,
                    p.closed_form,
                    p.empirical.value,
                    p.empirical.stderr,
                    p.empirical.trials,
                    p.pass
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EveSummary {
    pub outbound_strategy: &'static str,
    pub return_strategy: &'static str,
    pub captures: usize,
    pub touched_outbound: Vec<usize>,
    pub touched_return: Vec<usize>,
    pub injected: usize,
    pub replicas_held: usize,
    pub data_estimate: Option<String>,
    pub recovered_data: bool,
}

/// One full round trip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub data: String,
    pub decoded: Option<String>,
    pub decode_errors: Option<usize>,
    pub completed: bool,
    pub abort: Option<Abort>,
    pub outbound: LegReport,
    pub return_leg: Option<LegReport>,
    pub eve: EveSummary,
    pub transcript: Vec<Posted>,
}

impl SessionSummary {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => to_json(self),
            OutputFormat::Text => self.text(),
            OutputFormat::Csv => self.csv(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        let verdict = |l: Option<&LegReport>| match l {
            None => "not reached".to_string(),
            Some(l) if !l.protected => "unchecked".to_string(),
            Some(l) => format!("{:?}", l.verdict.expect("protected legs have a verdict")),
        };
        let _ = writeln!(out, "data     {}", self.data);
        let _ = writeln!(out, "decoded  {}", self.decoded.as_deref().unwrap_or("-"));
        let _ = writeln!(
            out,
            "errors   {}",
            self.decode_errors
                .map(|e| e.to_string())
                .unwrap_or_else(|| "-".into())
        );
        let _ = writeln!(out, "outbound {}", verdict(Some(&self.outbound)));
        let _ = writeln!(out, "return   {}", verdict(self.return_leg.as_ref()));
        if let Some(a) = &self.abort {
            let _ = writeln!(out, "abort    {a:?}");
        }
        let e = &self.eve;
        let _ = writeln!(
            out,
            "eve      {}/{} captures={} touched={}+{} injected={} recovered={}",
            e.outbound_strategy,
            e.return_strategy,
            e.captures,
            e.touched_outbound.len(),
            e.touched_return.len(),
            e.injected,
            e.recovered_data
        );
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("index,data,decoded\n");
        let decoded: Vec<char> = self.decoded.as_deref().unwrap_or("").chars().collect();
        for (i, d) in self.data.chars().enumerate() {
            let got = decoded.get(i).map(|c| c.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{i},{d},{got}");
        }
        out
    }
}

pub fn bit_string(bits: &[Bit]) -> String {
    bits.iter()
        .map(|b| if *b == 0 { '0' } else { '1' })
        .collect()
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn ok(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "FAIL"
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.6}")
}

fn fmt_x(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.6}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
