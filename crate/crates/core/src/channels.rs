//! Quantum and classical transport.
//!
//! The quantum channel is lossless and noiseless; its only interesting
//! property is the interposition point where an adversary can touch the frame.
//! The classical channel is an append-only transcript that only Alice and Bob
//! can write to and that everyone, Eve included, can read.
//!
//! Bob always receives a frame before the matching check disclosure is posted.
//! An adversary able to hold a frame until its disclosure arrives would defeat
//! the check qubits; the simulator does not model that.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::QubitState;

/// Ordered qubit slots as they travel over the quantum channel.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QubitFrame {
    slots: Vec<QubitState>,
}

impl QubitFrame {
    pub fn new(slots: Vec<QubitState>) -> Self {
        QubitFrame { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[QubitState] {
        &self.slots
    }

    pub fn slots_mut(&mut self) -> &mut [QubitState] {
        &mut self.slots
    }

    pub fn into_slots(self) -> Vec<QubitState> {
        self.slots
    }
}

impl From<Vec<QubitState>> for QubitFrame {
    fn from(slots: Vec<QubitState>) -> Self {
        QubitFrame { slots }
    }
}

/// Which trip of the round trip a frame is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    /// Alice to Bob.
    Outbound,
    /// Bob back to Alice.
    Return,
}

/// Position and angle index of every check qubit in a frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckDisclosure {
    /// `(position, angle index)` with 1-based positions.
    pub pairs: Vec<(usize, usize)>,
}

impl CheckDisclosure {
    /// Check bounds, distinctness and count against a frame.
    pub fn validate(&self, frame_len: usize, n: usize, expected: Option<usize>) -> Result<()> {
        if let Some(m) = expected {
            if self.pairs.len() != m {
                return Err(Error::MalformedDisclosure(format!(
                    "expected {m} check pairs, got {}",
                    self.pairs.len()
                )));
            }
        }
        let mut seen = HashSet::with_capacity(self.pairs.len());
        for &(pos, k) in &self.pairs {
            if pos == 0 || pos > frame_len {
                return Err(Error::MalformedDisclosure(format!(
                    "position {pos} outside frame of length {frame_len}"
                )));
            }
            if k >= n {
                return Err(Error::MalformedDisclosure(format!(
                    "angle index {k} outside 0..{n}"
                )));
            }
            if !seen.insert(pos) {
                return Err(Error::MalformedDisclosure(format!(
                    "position {pos} repeated"
                )));
            }
        }
        Ok(())
    }

    /// 0-based slot indices of the disclosed checks.
    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(pos, _)| pos - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Alice,
    Bob,
    Eve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Message {
    Disclosure {
        leg: Leg,
        disclosure: CheckDisclosure,
    },
    /// The receiver found a check qubit reading 1; both sides drop the frame.
    AuthenticationError {
        leg: Leg,
    },
    FrameAccepted {
        leg: Leg,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Posted {
    pub sender: Party,
    pub message: Message,
}

/// Authenticated public channel. Append-only; Eve may read but not post.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTranscript {
    messages: Vec<Posted>,
}

impl ClassicalTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn post(&mut self, sender: Party, message: Message) -> Result<()> {
        if sender == Party::Eve {
            return Err(Error::AuthenticityViolation(
                "the classical channel only accepts messages from Alice or Bob".into(),
            ));
        }
        self.messages.push(Posted { sender, message });
        Ok(())
    }

    pub fn messages(&self) -> &[Posted] {
        &self.messages
    }

    /// Read-only handle for the eavesdropper.
    pub fn view(&self) -> TranscriptView<'_> {
        TranscriptView {
            messages: &self.messages,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TranscriptView<'a> {
    messages: &'a [Posted],
}

impl<'a> TranscriptView<'a> {
    pub fn messages(&self) -> &'a [Posted] {
        self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// The check disclosure posted for `leg`, if it has been posted yet.
    pub fn disclosure(&self, leg: Leg) -> Option<&'a CheckDisclosure> {
        self.messages.iter().find_map(|p| match &p.message {
            Message::Disclosure { leg: l, disclosure } if *l == leg => Some(disclosure),
            _ => None,
        })
    }
}

/// A qubit source; `replicas > 1` models an imperfect source that emits
/// several copies in the same state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitSource {
    replicas: usize,
}

impl QubitSource {
    pub fn new(replicas: usize) -> Result<Self> {
        if replicas == 0 {
            return Err(Error::input("a source must emit at least one replica"));
        }
        Ok(QubitSource { replicas })
    }

    pub fn perfect() -> Self {
        QubitSource { replicas: 1 }
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    pub fn is_perfect(&self) -> bool {
        self.replicas == 1
    }

    pub fn emit(&self, state: QubitState) -> Vec<QubitState> {
        vec![state; self.replicas]
    }

    /// Emit every slot of a frame. Returns the frame that enters the channel
    /// and, per slot, the surplus replicas that leak out of the source.
    pub fn emit_frame(&self, frame: QubitFrame) -> (QubitFrame, Vec<Vec<QubitState>>) {
        if self.is_perfect() {
            return (frame, Vec::new());
        }
        let mut leaked = Vec::with_capacity(frame.len());
        for &slot in frame.slots() {
            let mut copies = self.emit(slot);
            copies.pop();
            leaked.push(copies);
        }
        (frame, leaked)
    }
}

impl Default for QubitSource {
    fn default() -> Self {
        Self::perfect()
    }
}

/// Something that sits on the quantum channel and may rewrite the frame.
pub trait Interposer {
    fn intercept(&mut self, frame: QubitFrame) -> Result<QubitFrame>;
}

impl<F> Interposer for F
where
    F: FnMut(QubitFrame) -> Result<QubitFrame>,
{
    fn intercept(&mut self, frame: QubitFrame) -> Result<QubitFrame> {
        self(frame)
    }
}

/// Deliver a frame over the quantum channel.
pub fn transmit_quantum(
    frame: QubitFrame,
    interposer: Option<&mut dyn Interposer>,
) -> Result<QubitFrame> {
    let Some(hook) = interposer else {
        return Ok(frame);
    };
    let sent = frame.len();
    let delivered = hook.intercept(frame)?;
    if delivered.len() != sent {
        return Err(Error::ProtocolViolation(format!(
            "frame of length {sent} arrived with length {}",
            delivered.len()
        )));
    }
    Ok(delivered)
}
