//! Eavesdropper behaviours.
//!
//! Each [`EveStrategy`] is a single-leg behaviour applied at the quantum
//! channel's interposition point. An [`Adversary`] assigns one strategy to each
//! leg of the round trip and keeps Eve's session-local memory in an
//! [`EveRecord`]. What Eve can see at each point is passed in explicitly as an
//! [`EveView`]; the frame's own check disclosure is never in it, because Bob
//! receives the frame before the disclosure is posted.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{Leg, QubitFrame, TranscriptView};
use crate::error::{Error, Result};
use crate::qubit::{measure, prob_zero, rotate, rotate_adjoint, Bit, QubitState};
use crate::scheme::AngleScheme;

/// Which slots a measuring strategy touches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    All,
    /// A uniformly random subset of this size, drawn without replacement.
    Random(usize),
}

/// States Eve prepares when she substitutes qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplacementPolicy {
    /// A uniformly random angle from the public scheme.
    UniformScheme,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum EveStrategy {
    Passive,
    /// Measure every slot in the computational basis.
    MeasureAll,
    /// Measure `count` random slots in the computational basis.
    MeasureRandom {
        count: usize,
    },
    /// Rotate the selected slots by `-alpha`, measure and forward the
    /// collapsed state.
    RotateMeasure {
        alpha: f64,
        selection: Selection,
    },
    /// Substitute `count` random slots with freshly prepared states.
    ReplaceQubits {
        count: usize,
        policy: ReplacementPolicy,
    },
    /// Outbound: measure everything and forward the collapsed qubits.
    /// Return: measure everything again, which reads Bob's encoding.
    InterceptResend,
    /// Outbound: keep the surplus replicas leaked by an imperfect source.
    /// Return: guess the data positions and substitute the kept data replicas
    /// encoded with fake bits.
    ReplicaCapture,
    /// Return only: measure Bob's qubits, drop them, and send arbitrary ones.
    DisruptReturn,
}

impl EveStrategy {
    pub fn tag(&self) -> &'static str {
        match self {
            EveStrategy::Passive => "passive",
            EveStrategy::MeasureAll => "measure-all",
            EveStrategy::MeasureRandom { .. } => "measure-random",
            EveStrategy::RotateMeasure { .. } => "rotate-measure",
            EveStrategy::ReplaceQubits { .. } => "replace",
            EveStrategy::InterceptResend => "intercept-resend",
            EveStrategy::ReplicaCapture => "replica-capture",
            EveStrategy::DisruptReturn => "disrupt-return",
        }
    }

    fn check_static(&self, leg: Leg) -> Result<()> {
        match self {
            EveStrategy::RotateMeasure { alpha, .. } if !alpha.is_finite() => Err(
                Error::Configuration(format!("rotation angle {alpha} is not finite")),
            ),
            EveStrategy::ReplaceQubits {
                policy: ReplacementPolicy::Fixed(theta),
                ..
            } if !theta.is_finite() => Err(Error::Configuration(format!(
                "replacement angle {theta} is not finite"
            ))),
            EveStrategy::DisruptReturn if leg == Leg::Outbound => Err(Error::Configuration(
                "disrupt-return only applies to the return leg".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Everything Eve may look at while a frame is in flight.
#[derive(Debug, Clone, Copy)]
pub struct EveView<'a> {
    pub leg: Leg,
    pub scheme: &'a AngleScheme,
    /// The classical transcript as of the moment the frame is in flight.
    pub transcript: TranscriptView<'a>,
    /// Surplus replicas per slot from an imperfect source; empty otherwise.
    pub leaked: &'a [Vec<QubitState>],
    /// Whether check qubits are used on this leg (public protocol parameter).
    pub protected: bool,
    /// Number of data qubits per frame (public protocol parameter).
    pub payload_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capture {
    pub leg: Leg,
    /// 0-based frame slot.
    pub slot: usize,
    /// Rotation Eve applied before measuring.
    pub alpha: f64,
    pub bit: Bit,
}

/// Eve's session-local memory. Only ever appended to during a session.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EveRecord {
    pub captures: Vec<Capture>,
    /// Surplus replicas kept from the outbound frame, indexed by slot.
    pub replicas_held: Vec<Vec<QubitState>>,
    /// Slots Eve measured, rotated or overwrote, per leg.
    pub touched: Vec<(Leg, usize)>,
    /// Slots Eve overwrote with states of her own, per leg.
    pub injected: Vec<(Leg, usize)>,
    /// Bits Eve encoded into substituted replicas.
    pub fake_data: Vec<Bit>,
}

impl EveRecord {
    pub fn is_empty(&self) -> bool {
        self.captures.is_empty() && self.replicas_held.is_empty() && self.touched.is_empty()
    }

    pub fn touched_on(&self, leg: Leg) -> Vec<usize> {
        self.touched
            .iter()
            .filter(|(l, _)| *l == leg)
            .map(|&(_, s)| s)
            .collect()
    }

    pub fn injected_on(&self, leg: Leg) -> Vec<usize> {
        self.injected
            .iter()
            .filter(|(l, _)| *l == leg)
            .map(|&(_, s)| s)
            .collect()
    }

    pub fn capture(&self, leg: Leg, slot: usize) -> Option<&Capture> {
        self.captures
            .iter()
            .find(|c| c.leg == leg && c.slot == slot)
    }
}

fn pick_slots<R: Rng + ?Sized>(
    len: usize,
    selection: Selection,
    rng: &mut R,
) -> Result<Vec<usize>> {
    match selection {
        Selection::All => Ok((0..len).collect()),
        Selection::Random(count) => {
            if count > len {
                return Err(Error::Configuration(format!(
                    "cannot select {count} slots from a frame of {len}"
                )));
            }
            let mut slots = sample(rng, len, count).into_vec();
            slots.sort_unstable();
            Ok(slots)
        }
    }
}

fn rotate_measure_slots<R: Rng + ?Sized>(
    frame: &mut QubitFrame,
    slots: &[usize],
    alpha: f64,
    leg: Leg,
    record: &mut EveRecord,
    rng: &mut R,
) -> Result<()> {
    for &slot in slots {
        let turned = rotate_adjoint(frame.slots()[slot], alpha)?;
        let out = measure(turned, rng);
        frame.slots_mut()[slot] = out.collapsed;
        record.captures.push(Capture {
            leg,
            slot,
            alpha,
            bit: out.bit,
        });
        record.touched.push((leg, slot));
    }
    Ok(())
}

fn prepare_replacement<R: Rng + ?Sized>(
    policy: ReplacementPolicy,
    scheme: &AngleScheme,
    rng: &mut R,
) -> Result<QubitState> {
    match policy {
        ReplacementPolicy::UniformScheme => QubitState::new(scheme.angle(scheme.sample_index(rng))),
        ReplacementPolicy::Fixed(theta) => QubitState::new(theta),
    }
}

/// Apply one strategy to a frame in flight.
pub fn apply_leg_strategy<R: Rng + ?Sized>(
    strategy: &EveStrategy,
    mut frame: QubitFrame,
    view: &EveView<'_>,
    record: &mut EveRecord,
    rng: &mut R,
) -> Result<QubitFrame> {
    strategy.check_static(view.leg)?;
    let leg = view.leg;
    match *strategy {
        EveStrategy::Passive => {}
        EveStrategy::MeasureAll => {
            let slots = pick_slots(frame.len(), Selection::All, rng)?;
            rotate_measure_slots(&mut frame, &slots, 0.0, leg, record, rng)?;
        }
        EveStrategy::MeasureRandom { count } => {
            let slots = pick_slots(frame.len(), Selection::Random(count), rng)?;
            rotate_measure_slots(&mut frame, &slots, 0.0, leg, record, rng)?;
        }
        EveStrategy::RotateMeasure { alpha, selection } => {
            let slots = pick_slots(frame.len(), selection, rng)?;
            rotate_measure_slots(&mut frame, &slots, alpha, leg, record, rng)?;
        }
        EveStrategy::ReplaceQubits { count, policy } => {
            let slots = pick_slots(frame.len(), Selection::Random(count), rng)?;
            for slot in slots {
                frame.slots_mut()[slot] = prepare_replacement(policy, view.scheme, rng)?;
                record.touched.push((leg, slot));
                record.injected.push((leg, slot));
            }
        }
        EveStrategy::InterceptResend => {
            // Forwarding the collapsed qubit is indistinguishable from
            // sending a fresh basis state prepared from the reading.
            let slots: Vec<usize> = (0..frame.len()).collect();
            rotate_measure_slots(&mut frame, &slots, 0.0, leg, record, rng)?;
        }
        EveStrategy::ReplicaCapture => match leg {
            Leg::Outbound => {
                if view.leaked.is_empty() || view.leaked.iter().all(|r| r.is_empty()) {
                    return Err(Error::Configuration(
                        "replica capture needs an imperfect source emitting surplus replicas"
                            .into(),
                    ));
                }
                record.replicas_held = view.leaked.to_vec();
            }
            Leg::Return => substitute_replicas(&mut frame, view, record, rng)?,
        },
        EveStrategy::DisruptReturn => {
            let slots: Vec<usize> = (0..frame.len()).collect();
            rotate_measure_slots(&mut frame, &slots, 0.0, leg, record, rng)?;
            for slot in slots {
                frame.slots_mut()[slot] =
                    prepare_replacement(ReplacementPolicy::UniformScheme, view.scheme, rng)?;
                record.injected.push((leg, slot));
            }
        }
    }
    Ok(frame)
}

/// Return-leg half of the replica attack.
fn substitute_replicas<R: Rng + ?Sized>(
    frame: &mut QubitFrame,
    view: &EveView<'_>,
    record: &mut EveRecord,
    rng: &mut R,
) -> Result<()> {
    if record.replicas_held.is_empty() {
        return Err(Error::Configuration(
            "replica substitution requires replicas captured on the outbound leg".into(),
        ));
    }
    // The outbound disclosure is public by now: drop the check replicas.
    let check_slots: Vec<usize> = view
        .transcript
        .disclosure(Leg::Outbound)
        .map(|d| d.slots().collect())
        .unwrap_or_default();
    let data_replicas: Vec<QubitState> = record
        .replicas_held
        .iter()
        .enumerate()
        .filter(|(slot, _)| !check_slots.contains(slot))
        .filter_map(|(_, copies)| copies.first().copied())
        .collect();
    if data_replicas.len() != view.payload_len {
        return Err(Error::Configuration(format!(
            "held {} data replicas for a payload of {}",
            data_replicas.len(),
            view.payload_len
        )));
    }
    let targets = pick_slots(frame.len(), Selection::Random(view.payload_len), rng)?;
    for (replica, slot) in data_replicas.into_iter().zip(targets) {
        let fake: Bit = rng.random_range(0..2);
        frame.slots_mut()[slot] = rotate(replica, PI * fake as f64)?;
        record.fake_data.push(fake);
        record.touched.push((Leg::Return, slot));
        record.injected.push((Leg::Return, slot));
    }
    Ok(())
}

/// Anything that can sit on the quantum channel for a whole session.
pub trait Eavesdropper {
    /// Reject configurations the adversary cannot act on.
    fn validate(&self, _source_replicas: usize) -> Result<()> {
        Ok(())
    }

    fn intercept<R: Rng + ?Sized>(
        &mut self,
        frame: QubitFrame,
        view: &EveView<'_>,
        rng: &mut R,
    ) -> Result<QubitFrame>;

    fn record(&self) -> &EveRecord;

    /// Eve's reading of Bob's data after the session, if she has one.
    fn data_estimate(
        &self,
        _transcript: TranscriptView<'_>,
        _outbound_len: usize,
        _return_len: usize,
        _payload_len: usize,
    ) -> Option<Vec<Bit>> {
        None
    }
}

/// Strategies for both legs plus Eve's memory for one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adversary {
    pub outbound: EveStrategy,
    pub return_leg: EveStrategy,
    pub record: EveRecord,
}

impl Adversary {
    /// Place a strategy where it is meant to act: the multi-leg attacks get
    /// both legs, `DisruptReturn` the return leg, and everything else the
    /// outbound leg.
    pub fn new(strategy: EveStrategy) -> Self {
        let (outbound, return_leg) = match strategy {
            EveStrategy::InterceptResend | EveStrategy::ReplicaCapture => (strategy, strategy),
            EveStrategy::DisruptReturn => (EveStrategy::Passive, strategy),
            other => (other, EveStrategy::Passive),
        };
        Self::per_leg(outbound, return_leg)
    }

    pub fn per_leg(outbound: EveStrategy, return_leg: EveStrategy) -> Self {
        Adversary {
            outbound,
            return_leg,
            record: EveRecord::default(),
        }
    }

    pub fn passive() -> Self {
        Self::new(EveStrategy::Passive)
    }

    pub fn strategy(&self, leg: Leg) -> &EveStrategy {
        match leg {
            Leg::Outbound => &self.outbound,
            Leg::Return => &self.return_leg,
        }
    }
}

impl Eavesdropper for Adversary {
    /// Reject strategies that cannot act on the legs they are assigned to.
    fn validate(&self, source_replicas: usize) -> Result<()> {
        self.outbound.check_static(Leg::Outbound)?;
        self.return_leg.check_static(Leg::Return)?;
        if self.outbound == EveStrategy::ReplicaCapture && source_replicas < 2 {
            return Err(Error::Configuration(
                "replica capture needs a source emitting at least two replicas".into(),
            ));
        }
        if self.return_leg == EveStrategy::ReplicaCapture
            && self.outbound != EveStrategy::ReplicaCapture
        {
            return Err(Error::Configuration(
                "replica substitution on the return leg needs replica capture outbound".into(),
            ));
        }
        Ok(())
    }

    fn intercept<R: Rng + ?Sized>(
        &mut self,
        frame: QubitFrame,
        view: &EveView<'_>,
        rng: &mut R,
    ) -> Result<QubitFrame> {
        let strategy = *self.strategy(view.leg);
        apply_leg_strategy(&strategy, frame, view, &mut self.record, rng)
    }

    fn record(&self) -> &EveRecord {
        &self.record
    }

    /// Eve's best reading of Bob's data once the session is over.
    ///
    /// Both disclosures are public by now, so Eve knows which slots carried
    /// data on each leg. A return-leg reading `w` of a qubit she collapsed to
    /// `z` on the way out gives `x = w ⊕ z`; with no outbound reading she
    /// guesses `x = w`.
    fn data_estimate(
        &self,
        transcript: TranscriptView<'_>,
        outbound_len: usize,
        return_len: usize,
        payload_len: usize,
    ) -> Option<Vec<Bit>> {
        let out_data = data_slots(transcript, Leg::Outbound, outbound_len);
        let ret_data = data_slots(transcript, Leg::Return, return_len);
        if out_data.len() != payload_len || ret_data.len() != payload_len {
            return None;
        }
        let mut estimate = Vec::with_capacity(payload_len);
        for (&o, &r) in out_data.iter().zip(&ret_data) {
            let w = self.record.capture(Leg::Return, r)?;
            let z = match self.record.capture(Leg::Outbound, o) {
                Some(c) if c.alpha == 0.0 => c.bit,
                _ => 0,
            };
            estimate.push(w.bit ^ z);
        }
        Some(estimate)
    }
}

fn data_slots(transcript: TranscriptView<'_>, leg: Leg, len: usize) -> Vec<usize> {
    match transcript.disclosure(leg) {
        Some(d) => {
            let checks: Vec<usize> = d.slots().collect();
            (0..len).filter(|s| !checks.contains(s)).collect()
        }
        None => (0..len).collect(),
    }
}

/// Maximum-likelihood angle index for a measured slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleGuess {
    pub slot: usize,
    pub index: usize,
}

/// Eve's maximum-likelihood estimate of Alice's angle index for every
/// outbound slot she measured. Ties go to the lowest index.
pub fn eve_angle_guess(record: &EveRecord, scheme: &AngleScheme) -> Vec<AngleGuess> {
    record
        .captures
        .iter()
        .filter(|c| c.leg == Leg::Outbound)
        .map(|c| {
            let mut best = 0;
            let mut best_lik = f64::NEG_INFINITY;
            for k in 0..scheme.n() {
                let state =
                    QubitState::new(scheme.angle(k) - c.alpha).expect("scheme angles are finite");
                let p0 = prob_zero(state);
                let lik = if c.bit == 0 { p0 } else { 1.0 - p0 };
                if lik > best_lik + 1e-12 {
                    best = k;
                    best_lik = lik;
                }
            }
            AngleGuess {
                slot: c.slot,
                index: best,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{CheckDisclosure, ClassicalTranscript, Message, Party};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frame_of(thetas: &[f64]) -> QubitFrame {
        thetas
            .iter()
            .map(|&t| QubitState::new(t).unwrap())
            .collect::<Vec<_>>()
            .into()
    }

    fn view<'a>(
        leg: Leg,
        scheme: &'a AngleScheme,
        transcript: &'a ClassicalTranscript,
        leaked: &'a [Vec<QubitState>],
    ) -> EveView<'a> {
        EveView {
            leg,
            scheme,
            transcript: transcript.view(),
            leaked,
            protected: true,
            payload_len: 2,
        }
    }

    #[test]
    fn passive_is_identity() {
        let scheme = AngleScheme::new(3).unwrap();
        let t = ClassicalTranscript::new();
        let mut rec = EveRecord::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = frame_of(&[0.1, 0.2, 0.3]);
        let out = apply_leg_strategy(
            &EveStrategy::Passive,
            f.clone(),
            &view(Leg::Outbound, &scheme, &t, &[]),
            &mut rec,
            &mut rng,
        )
        .unwrap();
        assert_eq!(out, f);
        assert!(rec.is_empty());
    }

    #[test]
    fn measure_random_touches_exact_count() {
        let scheme = AngleScheme::new(3).unwrap();
        let t = ClassicalTranscript::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for count in 0..=5 {
            let mut rec = EveRecord::default();
            let out = apply_leg_strategy(
                &EveStrategy::MeasureRandom { count },
                frame_of(&[1.0; 5]),
                &view(Leg::Outbound, &scheme, &t, &[]),
                &mut rec,
                &mut rng,
            )
            .unwrap();
            let mut touched = rec.touched_on(Leg::Outbound);
            touched.dedup();
            assert_eq!(touched.len(), count);
            let collapsed = out
                .slots()
                .iter()
                .filter(|s| **s == QubitState::ZERO || **s == QubitState::ONE)
                .count();
            assert_eq!(collapsed, count);
        }
    }

    #[test]
    fn oversized_selection_is_a_configuration_error() {
        let scheme = AngleScheme::new(3).unwrap();
        let t = ClassicalTranscript::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = apply_leg_strategy(
            &EveStrategy::ReplaceQubits {
                count: 4,
                policy: ReplacementPolicy::UniformScheme,
            },
            frame_of(&[0.0; 3]),
            &view(Leg::Outbound, &scheme, &t, &[]),
            &mut EveRecord::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));
    }

    #[test]
    fn leg_mismatches_are_rejected() {
        let scheme = AngleScheme::new(3).unwrap();
        let t = ClassicalTranscript::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = apply_leg_strategy(
            &EveStrategy::DisruptReturn,
            frame_of(&[0.0]),
            &view(Leg::Outbound, &scheme, &t, &[]),
            &mut EveRecord::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));

        let err = apply_leg_strategy(
            &EveStrategy::ReplicaCapture,
            frame_of(&[0.0]),
            &view(Leg::Outbound, &scheme, &t, &[]),
            &mut EveRecord::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Configuration(_)));

        assert!(Adversary::new(EveStrategy::ReplicaCapture)
            .validate(1)
            .is_err());
        assert!(Adversary::new(EveStrategy::ReplicaCapture)
            .validate(2)
            .is_ok());
        assert!(
            Adversary::per_leg(EveStrategy::DisruptReturn, EveStrategy::Passive)
                .validate(1)
                .is_err()
        );
        assert!(
            Adversary::per_leg(EveStrategy::Passive, EveStrategy::ReplicaCapture)
                .validate(3)
                .is_err()
        );
    }

    #[test]
    fn placement_of_strategies() {
        let a = Adversary::new(EveStrategy::DisruptReturn);
        assert_eq!(a.outbound, EveStrategy::Passive);
        assert_eq!(a.return_leg, EveStrategy::DisruptReturn);
        let a = Adversary::new(EveStrategy::InterceptResend);
        assert_eq!(a.outbound, a.return_leg);
        let a = Adversary::new(EveStrategy::MeasureAll);
        assert_eq!(a.return_leg, EveStrategy::Passive);
    }

    #[test]
    fn replica_capture_discards_disclosed_checks() {
        let scheme = AngleScheme::new(3).unwrap();
        let mut t = ClassicalTranscript::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sent = frame_of(&[0.0, 2.0, 4.0]);
        let leaked: Vec<Vec<QubitState>> = sent.slots().iter().map(|s| vec![*s]).collect();
        let mut adv = Adversary::new(EveStrategy::ReplicaCapture);
        let out = adv
            .intercept(
                sent.clone(),
                &view(Leg::Outbound, &scheme, &t, &leaked),
                &mut rng,
            )
            .unwrap();
        assert_eq!(out, sent);
        assert_eq!(adv.record.replicas_held.len(), 3);

        t.post(
            Party::Alice,
            Message::Disclosure {
                leg: Leg::Outbound,
                disclosure: CheckDisclosure {
                    pairs: vec![(2, 0)],
                },
            },
        )
        .unwrap();
        // return frame with two data slots and two checks
        let ret = frame_of(&[0.0; 4]);
        let out = adv
            .intercept(ret, &view(Leg::Return, &scheme, &t, &[]), &mut rng)
            .unwrap();
        let injected = adv.record.injected_on(Leg::Return);
        assert_eq!(injected.len(), 2);
        assert_eq!(adv.record.fake_data.len(), 2);
        // injected states are the kept replicas (slots 0 and 2) with fake bits
        let kept = [0.0, 4.0];
        for ((slot, theta), fake) in injected.iter().zip(kept).zip(&adv.record.fake_data) {
            let expected = QubitState::new(theta + PI * *fake as f64).unwrap();
            assert!(out.slots()[*slot].approx_eq(&expected));
        }
    }

    #[test]
    fn angle_guess_for_two_angles_is_exact() {
        let scheme = AngleScheme::new(2).unwrap();
        let t = ClassicalTranscript::new();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let k = scheme.sample_index(&mut rng);
            let mut rec = EveRecord::default();
            apply_leg_strategy(
                &EveStrategy::MeasureAll,
                frame_of(&[scheme.angle(k)]),
                &view(Leg::Outbound, &scheme, &t, &[]),
                &mut rec,
                &mut rng,
            )
            .unwrap();
            assert_eq!(eve_angle_guess(&rec, &scheme)[0].index, k);
        }
        assert!(eve_angle_guess(&EveRecord::default(), &scheme).is_empty());
    }

    #[test]
    fn disrupt_return_replaces_everything() {
        let scheme = AngleScheme::new(3).unwrap();
        let t = ClassicalTranscript::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rec = EveRecord::default();
        apply_leg_strategy(
            &EveStrategy::DisruptReturn,
            frame_of(&[0.5; 6]),
            &view(Leg::Return, &scheme, &t, &[]),
            &mut rec,
            &mut rng,
        )
        .unwrap();
        assert_eq!(rec.injected_on(Leg::Return).len(), 6);
        assert_eq!(rec.captures.len(), 6);
    }
}
