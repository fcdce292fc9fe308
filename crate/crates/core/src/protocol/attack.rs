//! Dishonest-participant and collusion models.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{QssError, Result};
use crate::field::FieldElement;
use crate::msp::{ParticipantId, ShareBundle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareComponent {
    S,
    T,
    Lambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjust {
    /// Add a (possibly negative) offset mod `d`.
    Add(i64),
    /// Replace with a fixed value.
    Set(u64),
}

/// A participant that substitutes one of its share components.
///
/// Textual form: `P2.s=+1`, `P3.t=-2`, `P1.lambda=5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tamper {
    pub participant: ParticipantId,
    pub component: ShareComponent,
    pub adjust: Adjust,
}

impl Tamper {
    pub fn apply(&self, bundle: &mut ShareBundle) {
        let slot = match self.component {
            ShareComponent::S => &mut bundle.s_component,
            ShareComponent::T => &mut bundle.t_component,
            ShareComponent::Lambda => &mut bundle.lambda_component,
        };
        let d = slot.modulus();
        *slot = match self.adjust {
            Adjust::Add(delta) => *slot + d.element_i64(delta),
            Adjust::Set(v) => d.element(v),
        };
    }
}

impl FromStr for Tamper {
    type Err = QssError;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = || QssError::InvalidTamper(spec.to_owned());
        let (target, value) = spec.split_once('=').ok_or_else(bad)?;
        let (participant, component) = target.rsplit_once('.').ok_or_else(bad)?;
        if participant.is_empty() {
            return Err(bad());
        }
        let component = match component {
            "s" => ShareComponent::S,
            "t" => ShareComponent::T,
            "lambda" => ShareComponent::Lambda,
            _ => return Err(bad()),
        };
        let adjust = if let Some(v) = value.strip_prefix('+') {
            Adjust::Add(v.parse().map_err(|_| bad())?)
        } else if value.starts_with('-') {
            Adjust::Add(value.parse().map_err(|_| bad())?)
        } else {
            Adjust::Set(value.parse().map_err(|_| bad())?)
        };
        Ok(Tamper {
            participant: ParticipantId::from(participant),
            component,
            adjust,
        })
    }
}

impl fmt::Display for Tamper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.component {
            ShareComponent::S => "s",
            ShareComponent::T => "t",
            ShareComponent::Lambda => "lambda",
        };
        match self.adjust {
            Adjust::Add(v) if v >= 0 => write!(f, "{}.{c}=+{v}", self.participant),
            Adjust::Add(v) => write!(f, "{}.{c}={v}", self.participant),
            Adjust::Set(v) => write!(f, "{}.{c}={v}", self.participant),
        }
    }
}

/// What members other than the recovering participant learn by pooling
/// their bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollusionOutcome {
    /// `(sum lambda_j s_j, sum lambda_j t_j)` over the coalition.
    pub guess: (FieldElement, FieldElement),
    pub truth: (FieldElement, FieldElement),
    /// The excluded member's contribution `(lambda_1 s_1, lambda_1 t_1)`.
    pub missing: (FieldElement, FieldElement),
}

impl CollusionOutcome {
    pub fn recovered_both(&self) -> bool {
        self.guess == self.truth
    }
}

fn combine<'a>(bundles: impl Iterator<Item = &'a ShareBundle>, zero: FieldElement) -> (FieldElement, FieldElement) {
    bundles.fold((zero, zero), |(s, t), b| {
        (
            s + b.lambda_component * b.s_component,
            t + b.lambda_component * b.t_component,
        )
    })
}

/// Pools every bundle except the first (the recovering participant's) and
/// compares the coalition's linear combination with the true `(s1, s2)`.
pub fn collusion_attack(bundles: &[ShareBundle], s1: FieldElement, s2: FieldElement) -> CollusionOutcome {
    let zero = s1.modulus().zero();
    CollusionOutcome {
        guess: combine(bundles.iter().skip(1), zero),
        truth: (s1, s2),
        missing: combine(bundles.iter().take(1), zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeModulus;

    #[test]
    fn parses_tamper_specs() {
        let t: Tamper = "P2.s=+1".parse().unwrap();
        assert_eq!(t.participant, ParticipantId::from("P2"));
        assert_eq!(t.component, ShareComponent::S);
        assert_eq!(t.adjust, Adjust::Add(1));
        assert_eq!("P3.t=-2".parse::<Tamper>().unwrap().adjust, Adjust::Add(-2));
        assert_eq!("P1.lambda=5".parse::<Tamper>().unwrap().adjust, Adjust::Set(5));
        for bad in ["P2.s", "P2.x=+1", ".s=1", "P2.s=+a", "P2s=1"] {
            assert!(bad.parse::<Tamper>().is_err(), "{bad}");
        }
        assert_eq!("P2.s=+1".parse::<Tamper>().unwrap().to_string(), "P2.s=+1");
    }

    #[test]
    fn applies_mod_d() {
        let m = PrimeModulus::new(7).unwrap();
        let mut b = ShareBundle {
            participant: ParticipantId::from("P2"),
            s_component: m.element(3),
            t_component: m.element(2),
            lambda_component: m.element(3),
        };
        "P2.s=+5".parse::<Tamper>().unwrap().apply(&mut b);
        assert_eq!(b.s_component, m.element(1));
        "P2.t=-3".parse::<Tamper>().unwrap().apply(&mut b);
        assert_eq!(b.t_component, m.element(6));
        "P2.lambda=0".parse::<Tamper>().unwrap().apply(&mut b);
        assert_eq!(b.lambda_component, m.zero());
    }
}
