use serde::Serialize;

use crate::decoy::CheckOutcome;
use crate::field::FieldElement;
use crate::qudit::{GhzLabel, Particle};

/// One decoy-checked transmission between two parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hop {
    pub index: usize,
    pub from: String,
    pub to: String,
    pub carries: Vec<Particle>,
}

impl Hop {
    pub fn id(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    /// Joint state after a party's operation. `label` is `None` once a
    /// measurement in transit has left the GHZ basis.
    LabelAfterStep {
        actor: String,
        step: String,
        label: Option<GhzLabel>,
    },
    DecoyCheck {
        hop: Hop,
        outcome: CheckOutcome,
    },
    Measurement {
        actor: String,
        label: GhzLabel,
    },
    Verification {
        actor: String,
        recovered: [FieldElement; 3],
        verified: [bool; 3],
        accepted: bool,
    },
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::LabelAfterStep { .. } => "label_after_step",
            Event::DecoyCheck { .. } => "decoy_check",
            Event::Measurement { .. } => "measurement",
            Event::Verification { .. } => "verification",
        }
    }

    pub fn actor(&self) -> String {
        match self {
            Event::LabelAfterStep { actor, .. }
            | Event::Measurement { actor, .. }
            | Event::Verification { actor, .. } => actor.clone(),
            Event::DecoyCheck { hop, .. } => hop.id(),
        }
    }
}

/// Append-only, ordered record of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Labels from every `LabelAfterStep` event, in order.
    pub fn label_chain(&self) -> Vec<Option<GhzLabel>> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::LabelAfterStep { label, .. } => Some(*label),
                _ => None,
            })
            .collect()
    }

    pub fn decoy_checks(&self) -> impl Iterator<Item = (&Hop, &CheckOutcome)> {
        self.events.iter().filter_map(|e| match e {
            Event::DecoyCheck { hop, outcome } => Some((hop, outcome)),
            _ => None,
        })
    }
}
