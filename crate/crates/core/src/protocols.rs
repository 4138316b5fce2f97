//! The two protocols.
//!
//! Protocol 1 authenticates a frame of qubits: the sender mixes `M` check
//! qubits `R(2kπ/n)|0⟩` into `N` payload qubits at secret positions, delivers
//! the frame, and only then discloses `(position, k)` for every check. The
//! receiver undoes each check rotation and accepts the frame only if every
//! check reads 0.
//!
//! Protocol 2 moves Bob's bits to Alice on a round trip. Alice prepares
//! `R(2πk_i/n)|0⟩` with secret `k_i`, Bob applies `R(πx_i)` without
//! measuring, and Alice applies `R†(2πk_i/n)` and measures `x_i`. Both legs
//! travel inside Protocol 1 frames with fresh checks.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{Eavesdropper, EveRecord, EveView};
use crate::channels::{
    transmit_quantum, CheckDisclosure, ClassicalTranscript, Leg, Message, Party, QubitFrame,
    QubitSource,
};
use crate::error::{Error, Result};
use crate::qubit::{measure, rotate, rotate_adjoint, Bit, QubitState};
use crate::scheme::AngleScheme;

/// Sender-side bookkeeping for one authenticated frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol1SenderState {
    pub payload_count: usize,
    pub check_count: usize,
    /// 1-based frame positions, in the order the checks were generated.
    pub check_positions: Vec<usize>,
    pub check_indices: Vec<usize>,
    pub frame: QubitFrame,
}

impl Protocol1SenderState {
    pub fn disclosure(&self) -> CheckDisclosure {
        CheckDisclosure {
            pairs: self
                .check_positions
                .iter()
                .copied()
                .zip(self.check_indices.iter().copied())
                .collect(),
        }
    }

    pub fn is_check_slot(&self, slot: usize) -> bool {
        self.check_positions.contains(&(slot + 1))
    }

    /// 0-based slots holding payload, in payload order.
    pub fn payload_slots(&self) -> Vec<usize> {
        (0..self.frame.len())
            .filter(|&s| !self.is_check_slot(s))
            .collect()
    }
}

/// Build an authenticated frame around `payload`.
pub fn p1_build_frame<R: Rng + ?Sized>(
    payload: Vec<QubitState>,
    scheme: &AngleScheme,
    checks: usize,
    rng: &mut R,
) -> Result<Protocol1SenderState> {
    if checks < 1 {
        return Err(Error::input("at least one check qubit is required"));
    }
    let payload_count = payload.len();
    let len = payload_count + checks;

    let check_indices: Vec<usize> = (0..checks).map(|_| scheme.sample_index(rng)).collect();
    let check_positions: Vec<usize> = sample(rng, len, checks)
        .into_iter()
        .map(|slot| slot + 1)
        .collect();

    let mut slots: Vec<Option<QubitState>> = vec![None; len];
    for (&pos, &k) in check_positions.iter().zip(&check_indices) {
        slots[pos - 1] = Some(QubitState::new(scheme.angle(k))?);
    }
    let mut payload_iter = payload.into_iter();
    let slots: Vec<QubitState> = slots
        .into_iter()
        .map(|s| {
            s.or_else(|| payload_iter.next())
                .expect("slot count matches")
        })
        .collect();

    Ok(Protocol1SenderState {
        payload_count,
        check_count: checks,
        check_positions,
        check_indices,
        frame: QubitFrame::new(slots),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Authentic,
    AuthenticationError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthResult {
    pub verdict: Verdict,
    /// Check readings in disclosure order.
    pub check_bits: Vec<Bit>,
    /// Present iff the verdict is `Authentic`.
    pub payload: Option<Vec<QubitState>>,
}

/// Receiver-side check of an authenticated frame.
///
/// The checks are measured in disclosure order; every qubit is independent,
/// so the order does not affect any statistic.
pub fn p1_verify<R: Rng + ?Sized>(
    frame: &QubitFrame,
    disclosure: &CheckDisclosure,
    scheme: &AngleScheme,
    rng: &mut R,
) -> Result<AuthResult> {
    disclosure.validate(frame.len(), scheme.n(), None)?;
    let mut check_bits = Vec::with_capacity(disclosure.pairs.len());
    for &(pos, k) in &disclosure.pairs {
        let undone = rotate_adjoint(frame.slots()[pos - 1], scheme.angle(k))?;
        check_bits.push(measure(undone, rng).bit);
    }
    if check_bits.iter().any(|&b| b != 0) {
        return Ok(AuthResult {
            verdict: Verdict::AuthenticationError,
            check_bits,
            payload: None,
        });
    }
    let mut is_check = vec![false; frame.len()];
    for slot in disclosure.slots() {
        is_check[slot] = true;
    }
    let payload = frame
        .slots()
        .iter()
        .zip(&is_check)
        .filter(|(_, &c)| !c)
        .map(|(s, _)| *s)
        .collect();
    Ok(AuthResult {
        verdict: Verdict::Authentic,
        check_bits,
        payload: Some(payload),
    })
}

/// Alice's secret angle indices and the qubits prepared from them.
pub fn p2_alice_prepare<R: Rng + ?Sized>(
    count: usize,
    scheme: &AngleScheme,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<QubitState>)> {
    if count < 1 {
        return Err(Error::input("at least one data qubit is required"));
    }
    let secrets: Vec<usize> = (0..count).map(|_| scheme.sample_index(rng)).collect();
    let qubits = secrets
        .iter()
        .map(|&k| QubitState::new(scheme.angle(k)))
        .collect::<Result<_>>()?;
    Ok((secrets, qubits))
}

/// Bob's encoding: a half turn for every 1 bit, no measurement.
pub fn p2_bob_encode(qubits: &[QubitState], data: &[Bit]) -> Result<Vec<QubitState>> {
    if qubits.len() != data.len() {
        return Err(Error::input(format!(
            "{} qubits for {} data bits",
            qubits.len(),
            data.len()
        )));
    }
    qubits
        .iter()
        .zip(data)
        .map(|(&q, &x)| {
            if x > 1 {
                return Err(Error::input(format!("data bit {x} is not 0 or 1")));
            }
            rotate(q, std::f64::consts::PI * x as f64)
        })
        .collect()
}

/// Alice undoes her secret rotations and reads the bits.
pub fn p2_alice_decode<R: Rng + ?Sized>(
    qubits: &[QubitState],
    secrets: &[usize],
    scheme: &AngleScheme,
    rng: &mut R,
) -> Result<Vec<Bit>> {
    if qubits.len() != secrets.len() {
        return Err(Error::input(format!(
            "{} qubits for {} secret indices",
            qubits.len(),
            secrets.len()
        )));
    }
    qubits
        .iter()
        .zip(secrets)
        .map(|(&q, &k)| {
            if k >= scheme.n() {
                return Err(Error::input(format!("secret index {k} outside scheme")));
            }
            Ok(measure(rotate_adjoint(q, scheme.angle(k))?, rng).bit)
        })
        .collect()
}

/// Parameters of a round-trip session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub scheme: AngleScheme,
    /// `N`: data bits per session.
    pub payload: usize,
    /// `M`: check qubits per authenticated frame.
    pub checks: usize,
    /// Alice's qubit source.
    pub source: QubitSource,
    protect_outbound: bool,
    protect_return: bool,
}

impl SessionConfig {
    pub fn new(scheme: AngleScheme, payload: usize, checks: usize) -> Result<Self> {
        if payload < 1 {
            return Err(Error::input("at least one data bit is required"));
        }
        if checks < 1 {
            return Err(Error::input("at least one check qubit is required"));
        }
        Ok(SessionConfig {
            scheme,
            payload,
            checks,
            source: QubitSource::perfect(),
            protect_outbound: true,
            protect_return: true,
        })
    }

    pub fn with_source(mut self, source: QubitSource) -> Self {
        self.source = source;
        self
    }

    /// Send one leg without check qubits. Insecure; exists only to reproduce
    /// the attacks that check qubits prevent.
    pub fn unsafe_without_checks(mut self, leg: Leg) -> Self {
        match leg {
            Leg::Outbound => self.protect_outbound = false,
            Leg::Return => self.protect_return = false,
        }
        self
    }

    pub fn is_protected(&self, leg: Leg) -> bool {
        match leg {
            Leg::Outbound => self.protect_outbound,
            Leg::Return => self.protect_return,
        }
    }

    fn frame_len(&self, leg: Leg) -> usize {
        if self.is_protected(leg) {
            self.payload + self.checks
        } else {
            self.payload
        }
    }
}

/// What happened on one leg of the round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegReport {
    pub leg: Leg,
    pub protected: bool,
    /// `None` when the leg carried no checks.
    pub verdict: Option<Verdict>,
    /// 0-based slots of the check qubits.
    pub check_slots: Vec<usize>,
    /// Slots Eve measured or overwrote.
    pub touched_slots: Vec<usize>,
    pub touched_checks: usize,
    /// Eve overwrote exactly the data slots and nothing else.
    pub injected_exactly_payload: bool,
}

impl LegReport {
    pub fn authentic(&self) -> bool {
        self.verdict != Some(Verdict::AuthenticationError)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Abort {
    AuthenticationFailed { leg: Leg },
    Malformed { leg: Leg, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub data: Vec<Bit>,
    pub outbound: LegReport,
    pub return_leg: Option<LegReport>,
    pub decoded: Option<Vec<Bit>>,
    pub decode_errors: Option<usize>,
    pub abort: Option<Abort>,
    pub eve: EveRecord,
    pub eve_data_estimate: Option<Vec<Bit>>,
    pub eve_recovered_data: bool,
    pub transcript: ClassicalTranscript,
    /// Alice's secret indices; kept for analysis, never posted.
    pub secret_indices: Vec<usize>,
}

impl SessionReport {
    pub fn completed(&self) -> bool {
        self.decoded.is_some()
    }
}

struct LegRun {
    report: LegReport,
    payload: Option<Vec<QubitState>>,
    malformed: Option<String>,
}

fn run_leg<E: Eavesdropper, R: Rng + ?Sized>(
    config: &SessionConfig,
    leg: Leg,
    payload: Vec<QubitState>,
    source: QubitSource,
    transcript: &mut ClassicalTranscript,
    adversary: &mut E,
    rng: &mut R,
) -> Result<LegRun> {
    let (sender, receiver) = match leg {
        Leg::Outbound => (Party::Alice, Party::Bob),
        Leg::Return => (Party::Bob, Party::Alice),
    };
    let protected = config.is_protected(leg);
    let sender_state = if protected {
        Some(p1_build_frame(
            payload.clone(),
            &config.scheme,
            config.checks,
            rng,
        )?)
    } else {
        None
    };
    let frame = match &sender_state {
        Some(s) => s.frame.clone(),
        None => QubitFrame::new(payload),
    };
    let (frame, leaked) = source.emit_frame(frame);

    let delivered = {
        let view = EveView {
            leg,
            scheme: &config.scheme,
            transcript: transcript.view(),
            leaked: &leaked,
            protected,
            payload_len: config.payload,
        };
        let mut hook = |f: QubitFrame| adversary.intercept(f, &view, rng);
        transmit_quantum(frame, Some(&mut hook))?
    };

    let check_slots: Vec<usize> = sender_state
        .as_ref()
        .map(|s| s.check_positions.iter().map(|p| p - 1).collect())
        .unwrap_or_default();
    let mut touched_slots = adversary.record().touched_on(leg);
    touched_slots.sort_unstable();
    touched_slots.dedup();
    let touched_checks = touched_slots
        .iter()
        .filter(|s| check_slots.contains(s))
        .count();
    let mut injected = adversary.record().injected_on(leg);
    injected.sort_unstable();
    let payload_slots: Vec<usize> = (0..delivered.len())
        .filter(|s| !check_slots.contains(s))
        .collect();
    let mut report = LegReport {
        leg,
        protected,
        verdict: None,
        check_slots,
        touched_slots,
        touched_checks,
        injected_exactly_payload: injected == payload_slots,
    };

    let Some(sender_state) = sender_state else {
        return Ok(LegRun {
            report,
            payload: Some(delivered.into_slots()),
            malformed: None,
        });
    };

    let disclosure = sender_state.disclosure();
    transcript.post(
        sender,
        Message::Disclosure {
            leg,
            disclosure: disclosure.clone(),
        },
    )?;
    let auth = match p1_verify(&delivered, &disclosure, &config.scheme, rng) {
        Ok(a) => a,
        Err(Error::MalformedDisclosure(detail)) => {
            return Ok(LegRun {
                report,
                payload: None,
                malformed: Some(detail),
            })
        }
        Err(e) => return Err(e),
    };
    report.verdict = Some(auth.verdict);
    let notice = match auth.verdict {
        Verdict::Authentic => Message::FrameAccepted { leg },
        Verdict::AuthenticationError => Message::AuthenticationError { leg },
    };
    transcript.post(receiver, notice)?;
    Ok(LegRun {
        report,
        payload: auth.payload,
        malformed: None,
    })
}

/// One complete round-trip session.
///
/// A failed check on either leg aborts the session: both parties drop the
/// frame, so nothing is encoded or decoded past that point.
pub fn run_protocol2<E: Eavesdropper, R: Rng + ?Sized>(
    config: &SessionConfig,
    data: &[Bit],
    adversary: &mut E,
    rng: &mut R,
) -> Result<SessionReport> {
    if data.len() != config.payload {
        return Err(Error::input(format!(
            "{} data bits for a payload of {}",
            data.len(),
            config.payload
        )));
    }
    if let Some(&bad) = data.iter().find(|&&x| x > 1) {
        return Err(Error::input(format!("data bit {bad} is not 0 or 1")));
    }
    adversary.validate(config.source.replicas())?;

    let mut transcript = ClassicalTranscript::new();
    let (secrets, qubits) = p2_alice_prepare(config.payload, &config.scheme, rng)?;

    let outbound = run_leg(
        config,
        Leg::Outbound,
        qubits,
        config.source,
        &mut transcript,
        adversary,
        rng,
    )?;

    let mut report = SessionReport {
        data: data.to_vec(),
        outbound: outbound.report,
        return_leg: None,
        decoded: None,
        decode_errors: None,
        abort: None,
        eve: EveRecord::default(),
        eve_data_estimate: None,
        eve_recovered_data: false,
        transcript: ClassicalTranscript::new(),
        secret_indices: secrets.clone(),
    };

    let received = match (outbound.payload, outbound.malformed) {
        (_, Some(detail)) => {
            report.abort = Some(Abort::Malformed {
                leg: Leg::Outbound,
                detail,
            });
            None
        }
        (None, None) => {
            report.abort = Some(Abort::AuthenticationFailed { leg: Leg::Outbound });
            None
        }
        (Some(p), None) => Some(p),
    };

    if let Some(received) = received {
        let encoded = p2_bob_encode(&received, data)?;
        let ret = run_leg(
            config,
            Leg::Return,
            encoded,
            QubitSource::perfect(),
            &mut transcript,
            adversary,
            rng,
        )?;
        report.return_leg = Some(ret.report);
        match (ret.payload, ret.malformed) {
            (_, Some(detail)) => {
                report.abort = Some(Abort::Malformed {
                    leg: Leg::Return,
                    detail,
                })
            }
            (None, None) => report.abort = Some(Abort::AuthenticationFailed { leg: Leg::Return }),
            (Some(back), None) => {
                let decoded = p2_alice_decode(&back, &secrets, &config.scheme, rng)?;
                report.decode_errors =
                    Some(decoded.iter().zip(data).filter(|(y, x)| y != x).count());
                report.decoded = Some(decoded);
            }
        }
    }

    if report.return_leg.is_some() {
        report.eve_data_estimate = adversary.data_estimate(
            transcript.view(),
            config.frame_len(Leg::Outbound),
            config.frame_len(Leg::Return),
            config.payload,
        );
    }
    report.eve_recovered_data = report.eve_data_estimate.as_deref() == Some(data);
    report.eve = adversary.record().clone();
    report.transcript = transcript;
    Ok(report)
}
